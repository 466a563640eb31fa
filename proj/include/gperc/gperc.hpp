#pragma once

#include "gperc/data.hpp"
#include "gperc/errors.hpp"
#include "gperc/experiment.hpp"
#include "gperc/metrics.hpp"
#include "gperc/model.hpp"
#include "gperc/regions.hpp"
