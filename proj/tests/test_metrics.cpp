#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "gperc/metrics.hpp"
#include "oracles.hpp"

using namespace gperc;

TEST_CASE("confusion tallies against the 0.5 threshold") {
  const std::vector<int> labels = {1, 0};

  SECTION("perfect separation") {
    const std::vector<double> scores = {0.9, 0.1};
    ConfusionCounts c = confusion(labels, scores);
    CHECK(c.tp == 1);
    CHECK(c.tn == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
  }
  SECTION("inverted scorer") {
    const std::vector<double> scores = {0.1, 0.9};
    ConfusionCounts c = confusion(labels, scores);
    CHECK(c.fn == 1);
    CHECK(c.fp == 1);
  }
  SECTION("score equal to the threshold counts as positive") {
    ConfusionCounts c = confusion(labels, std::vector<double>{0.5, 0.5});
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
  }
  SECTION("length mismatch rejected") {
    CHECK_THROWS_AS(confusion(labels, std::vector<double>{0.5}), DimensionError);
  }
}

TEST_CASE("derive_metrics formulas") {
  SECTION("reference run with one error on each side") {
    MetricReport r = derive_metrics({39, 73, 1, 1});
    CHECK(r.accuracy == Approx(112.0 / 114.0).epsilon(1e-12));
    CHECK(r.accuracy == Approx(0.982).margin(5e-4));
  }
  SECTION("zero false positives give precision exactly 1") {
    MetricReport r = derive_metrics({43, 70, 0, 1});
    CHECK(r.precision == 1.0);
    CHECK(r.recall == Approx(43.0 / 44.0).epsilon(1e-12));
    CHECK(r.f1 == Approx(0.988).margin(1e-3));
  }
  SECTION("weak classifier counts") {
    MetricReport r = derive_metrics({29, 87, 17, 21});
    CHECK(r.accuracy == Approx(0.753).margin(5e-4));
    CHECK(r.precision == Approx(0.630).margin(5e-4));
  }
  SECTION("zero denominators define the ratio as 0") {
    MetricReport r = derive_metrics({0, 5, 0, 0});
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
  }
  SECTION("empty counts rejected") {
    CHECK_THROWS_AS(derive_metrics({0, 0, 0, 0}), DataError);
  }
  SECTION("consistency: metrics recompute from counts to 1e-9") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> d(0, 200);
    for (int k = 0; k < 200; ++k) {
      ConfusionCounts c{d(rng), d(rng), d(rng), d(rng)};
      if (c.total() == 0) continue;
      MetricReport r = derive_metrics(c);
      const double total = static_cast<double>(c.total());
      CHECK(r.accuracy == Approx((double)(c.tp + c.tn) / total).margin(1e-9));
      if (c.tp + c.fp > 0)
        CHECK(r.precision == Approx((double)c.tp / (double)(c.tp + c.fp)).margin(1e-9));
      if (c.tp + c.fn > 0)
        CHECK(r.recall == Approx((double)c.tp / (double)(c.tp + c.fn)).margin(1e-9));
      if (r.precision + r.recall > 0)
        CHECK(r.f1 == Approx(2 * r.precision * r.recall / (r.precision + r.recall))
                          .margin(1e-9));
    }
  }
}

TEST_CASE("roc_auc curve shape and area") {
  SECTION("perfectly separated scores give auc 1") {
    RocCurve c = roc_auc(std::vector<int>{1, 1, 0, 0},
                         std::vector<double>{0.9, 0.8, 0.2, 0.1});
    CHECK(c.auc == 1.0);
  }
  SECTION("identical scores give auc 0.5") {
    RocCurve c = roc_auc(std::vector<int>{1, 0, 1, 0},
                         std::vector<double>{0.4, 0.4, 0.4, 0.4});
    CHECK(c.auc == 0.5);
  }
  SECTION("curve runs from (0,0) to (1,1) with FPR non-decreasing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<int> labels;
    std::vector<double> scores;
    for (int i = 0; i < 50; ++i) {
      labels.push_back(i % 3 == 0);
      scores.push_back(std::round(u(rng) * 10) / 10.0);
    }
    RocCurve c = roc_auc(labels, scores);
    CHECK(c.points.front().fpr == 0.0);
    CHECK(c.points.front().tpr == 0.0);
    CHECK(c.points.back().fpr == 1.0);
    CHECK(c.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < c.points.size(); ++i)
      CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
  }
  SECTION("auc equals the pairwise oracle exactly, ties included") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<int> labels;
      std::vector<double> scores;
      const int n = 5 + rep % 20;
      for (int i = 0; i < n; ++i) {
        labels.push_back(u(rng) < 0.4);
        scores.push_back(std::round(u(rng) * 8) / 8.0);  // force ties
      }
      bool has_pos = false, has_neg = false;
      for (int y : labels) (y ? has_pos : has_neg) = true;
      if (!has_pos || !has_neg) continue;
      CHECK(roc_auc(labels, scores).auc == oracles::pairwise_auc(labels, scores));
    }
  }
  SECTION("flipping labels complements the area; so does flipping scores") {
    const std::vector<int> labels = {1, 0, 1, 0, 1, 0, 0};
    const std::vector<double> scores = {0.9, 0.8, 0.7, 0.7, 0.3, 0.2, 0.7};
    std::vector<int> flipped;
    for (int y : labels) flipped.push_back(1 - y);
    std::vector<double> inverted;
    for (double s : scores) inverted.push_back(1.0 - s);
    const double auc = roc_auc(labels, scores).auc;
    CHECK(roc_auc(flipped, scores).auc == Approx(1.0 - auc).margin(1e-12));
    CHECK(roc_auc(labels, inverted).auc == Approx(1.0 - auc).margin(1e-12));
    CHECK(roc_auc(flipped, inverted).auc == Approx(auc).margin(1e-12));
  }
  SECTION("single-class labels rejected") {
    CHECK_THROWS_AS(roc_auc(std::vector<int>{1, 1}, std::vector<double>{0.4, 0.6}),
                    DataError);
    CHECK_THROWS_AS(roc_auc(std::vector<int>{0, 0}, std::vector<double>{0.4, 0.6}),
                    DataError);
  }
}

TEST_CASE("bce_loss") {
  SECTION("near-perfect prediction") {
    const double loss = bce_loss(std::vector<int>{1}, std::vector<double>{1.0 - 1e-12});
    CHECK(loss == Approx(1e-12).margin(1e-13));
  }
  SECTION("maximal uncertainty is ln 2") {
    const double loss =
        bce_loss(std::vector<int>{1, 0}, std::vector<double>{0.5, 0.5});
    CHECK(loss == Approx(std::log(2.0)).margin(1e-12));
  }
  SECTION("matches the extended-precision oracle") {
    const std::vector<int> labels = {1, 0, 1};
    const std::vector<double> scores = {0.9, 0.2, 0.8};
    CHECK(bce_loss(labels, scores) ==
          Approx(oracles::mean_bce_ld(labels, scores)).margin(1e-12));
  }
  SECTION("saturated scores stay finite via the clamp") {
    const double loss = bce_loss(std::vector<int>{1, 0}, std::vector<double>{0.0, 1.0});
    CHECK(std::isfinite(loss));
    CHECK(loss == Approx(-std::log(1e-12)).margin(1e-6));
  }
  SECTION("length mismatch rejected") {
    CHECK_THROWS_AS(bce_loss(std::vector<int>{1}, std::vector<double>{0.5, 0.5}),
                    DimensionError);
  }
}

TEST_CASE("raising the threshold never raises TP nor lowers TN") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<int> labels;
  std::vector<double> scores;
  for (int i = 0; i < 200; ++i) {
    labels.push_back(u(rng) < 0.5);
    scores.push_back(u(rng));
  }
  ConfusionCounts prev = confusion(labels, scores, -0.1);
  for (double t = 0.0; t <= 1.1; t += 0.05) {
    ConfusionCounts c = confusion(labels, scores, t);
    CHECK(c.tp <= prev.tp);
    CHECK(c.tn >= prev.tn);
    prev = c;
  }
}

TEST_CASE("multiclass confusion") {
  SECTION("perfect predictions give a diagonal matrix") {
    const std::vector<int> labels = {0, 1, 2, 1, 0};
    MulticlassConfusion m = multiclass_confusion(labels, labels, 3);
    CHECK(m.accuracy() == 1.0);
    CHECK(m.at(0, 0) == 2);
    CHECK(m.at(1, 1) == 2);
    CHECK(m.at(2, 2) == 1);
    CHECK(m.at(0, 1) == 0);
  }
  SECTION("one cross-class confusion in a 30-sample split") {
    std::vector<int> labels, predictions;
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 10; ++i) {
        labels.push_back(c);
        predictions.push_back(c);
      }
    predictions[15] = 2;  // one versicolor taken for virginica
    MulticlassConfusion m = multiclass_confusion(labels, predictions, 3);
    CHECK(m.accuracy() == Approx(29.0 / 30.0).epsilon(1e-12));
    CHECK(m.at(1, 2) == 1);
  }
  SECTION("constant predictor on a balanced set") {
    std::vector<int> labels = {0, 0, 1, 1, 2, 2};
    std::vector<int> predictions(6, 0);
    CHECK(multiclass_confusion(labels, predictions, 3).accuracy() ==
          Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SECTION("out-of-range entries rejected") {
    CHECK_THROWS_AS(multiclass_confusion(std::vector<int>{3}, std::vector<int>{0}, 3),
                    DataError);
    CHECK_THROWS_AS(multiclass_confusion(std::vector<int>{0}, std::vector<int>{3}, 3),
                    DataError);
  }
}

TEST_CASE("serialized report format") {
  MetricReport r = derive_metrics({39, 73, 1, 1});
  r.auc = 0.999;
  const std::string json = metric_report_json(r);
  CHECK(json.find("\"tp\":39") != std::string::npos);
  CHECK(json.find("\"auc\":0.999") != std::string::npos);
  CHECK(json.front() == '{');
  CHECK(json.back() == '}');

  RocCurve c = roc_auc(std::vector<int>{1, 0}, std::vector<double>{0.9, 0.1});
  const std::string csv = roc_csv(c);
  CHECK(csv.rfind("fpr,tpr,threshold\n", 0) == 0);
  CHECK(csv.find("inf") != std::string::npos);  // sentinel first threshold
}
