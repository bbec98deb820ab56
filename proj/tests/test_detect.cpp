#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "polygen/core/error.hpp"
#include "polygen/core/rng.hpp"
#include "polygen/detect/eval.hpp"
#include "polygen/detect/toy_detector.hpp"

using namespace polygen;
namespace fs = std::filesystem;

namespace {

BinaryMask rect_mask(int w, int h, int x0, int x1, int y0, int y1) {
  BinaryMask m = BinaryMask::filled(w, h, 0);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.at(y, x) = 1;
  return m;
}

DetectionRecord det(const std::string& id, int x0, int x1, int y0, int y1,
                    double score = 0.9) {
  return {id, {x0, x1, y0, y1}, score};
}

FrameGroundTruth positive_frame(const std::string& id, BinaryMask mask) {
  FrameGroundTruth gt;
  gt.frame_id = id;
  gt.mask = std::move(mask);
  gt.box = mask_to_bbox(gt.mask);
  return gt;
}

FrameGroundTruth negative_frame(const std::string& id, int extent = 64) {
  FrameGroundTruth gt;
  gt.frame_id = id;
  gt.mask = BinaryMask::filled(extent, extent, 0);
  return gt;
}

}  // namespace

TEST_SUITE_BEGIN("detect");

TEST_CASE("mask_to_bbox: empty, single pixel, spanning box over two blobs") {
  CHECK(!mask_to_bbox(BinaryMask::filled(8, 8, 0)).has_value());

  BinaryMask one = BinaryMask::filled(8, 8, 0);
  one.at(5, 2) = 1;
  auto b = mask_to_bbox(one);
  REQUIRE(b.has_value());
  CHECK(b->x_min == 2);
  CHECK(b->x_max == 2);
  CHECK(b->y_min == 5);
  CHECK(b->y_max == 5);

  // Two disjoint blobs: tight min/max over both, matching a brute scan.
  BinaryMask two = BinaryMask::filled(16, 16, 0);
  two.at(2, 3) = 1;
  two.at(12, 11) = 1;
  auto bb = mask_to_bbox(two);
  REQUIRE(bb.has_value());
  int mnx = 16, mxx = -1, mny = 16, mxy = -1;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (two.at(y, x)) {
        mnx = std::min(mnx, x);
        mxx = std::max(mxx, x);
        mny = std::min(mny, y);
        mxy = std::max(mxy, y);
      }
  CHECK(bb->x_min == mnx);
  CHECK(bb->x_max == mxx);
  CHECK(bb->y_min == mny);
  CHECK(bb->y_max == mxy);
}

TEST_CASE("score_frame: paper counting rules on positive and negative frames") {
  FrameGroundTruth gt = positive_frame("f1", rect_mask(64, 64, 20, 40, 20, 40));

  // One detection centred in the mask.
  {
    std::vector<DetectionRecord> d{det("f1", 18, 42, 18, 42)};
    MetricCounts c = score_frame(d, gt);
    CHECK(c == MetricCounts{1, 0, 0, 0});
  }
  // Two detections both centred in the mask: surplus hit counts as nothing.
  {
    std::vector<DetectionRecord> d{det("f1", 18, 42, 18, 42), det("f1", 22, 38, 22, 38)};
    MetricCounts c = score_frame(d, gt);
    CHECK(c == MetricCounts{1, 0, 0, 0});
  }
  // A hit plus an outside detection.
  {
    std::vector<DetectionRecord> d{det("f1", 18, 42, 18, 42), det("f1", 1, 8, 1, 8)};
    MetricCounts c = score_frame(d, gt);
    CHECK(c == MetricCounts{1, 1, 0, 0});
  }
  // No detections on a positive frame.
  {
    MetricCounts c = score_frame(std::vector<DetectionRecord>{}, gt);
    CHECK(c == MetricCounts{0, 0, 1, 0});
  }
  // Negative frame.
  {
    FrameGroundTruth neg = negative_frame("f2");
    MetricCounts none = score_frame(std::vector<DetectionRecord>{}, neg);
    CHECK(none == MetricCounts{0, 0, 0, 1});
    std::vector<DetectionRecord> d{det("f2", 1, 8, 1, 8)};
    MetricCounts one = score_frame(d, neg);
    CHECK(one == MetricCounts{0, 1, 0, 0});
  }
  // Frame id mismatch.
  {
    std::vector<DetectionRecord> d{det("other", 18, 42, 18, 42)};
    CHECK_THROWS_AS(score_frame(d, gt), DataError);
  }
}

TEST_CASE("score_frame: box-center rule vs IoU rule") {
  FrameGroundTruth gt = positive_frame("f", rect_mask(64, 64, 20, 40, 20, 40));
  // Center inside the mask but box mostly outside: center rule hits, IoU
  // (0.5) does not.
  std::vector<DetectionRecord> d{det("f", 21, 59, 21, 59)};
  MetricCounts center = score_frame(d, gt, {MatchRule::kCenterInMask});
  CHECK(center.tp == 1);
  ScoringOptions iou;
  iou.rule = MatchRule::kIoU;
  MetricCounts strict = score_frame(d, gt, iou);
  CHECK(strict.tp == 0);
  CHECK(strict.fp == 1);
  CHECK(strict.fn == 1);

  // Exact box match passes IoU.
  std::vector<DetectionRecord> exact{det("f", 20, 40, 20, 40)};
  CHECK(score_frame(exact, gt, iou).tp == 1);
}

TEST_CASE("score_frame: component splitting treats blobs as separate polyps") {
  BinaryMask m = rect_mask(64, 64, 4, 14, 4, 14);
  for (int y = 40; y <= 50; ++y)
    for (int x = 40; x <= 50; ++x) m.at(y, x) = 1;
  FrameGroundTruth gt = positive_frame("f", m);

  std::vector<DetectionRecord> d{det("f", 4, 14, 4, 14), det("f", 40, 50, 40, 50)};
  // Default: one mask, one polyp; the second hit is surplus.
  MetricCounts merged = score_frame(d, gt);
  CHECK(merged == MetricCounts{1, 0, 0, 0});
  // Split: both components counted, and a missing one becomes FN.
  ScoringOptions split;
  split.split_components = true;
  MetricCounts both = score_frame(d, gt, split);
  CHECK(both == MetricCounts{2, 0, 0, 0});
  std::vector<DetectionRecord> one{det("f", 4, 14, 4, 14)};
  MetricCounts half = score_frame(one, gt, split);
  CHECK(half == MetricCounts{1, 0, 1, 0});
}

TEST_CASE("precision_recall: reproduces the published table rows") {
  struct Row {
    std::int64_t tp, fp, fn;
    double pre, rec;
  };
  // Combined training set, augmented runs, and their original counterparts.
  // The fourth row's published precision reads 81.9, but its own counts give
  // 6011/7344 = 81.849% -> 81.8; the formula value is asserted here.
  const Row rows[] = {
      {6760, 2981, 3265, 69.4, 67.4},
      {6113, 2981, 3912, 67.2, 61.0},
      {7517, 1995, 2508, 79.0, 75.0},
      {6011, 1333, 4014, 81.8, 60.0},
      {6831, 1177, 3194, 85.3, 68.1},
  };
  for (const Row& r : rows) {
    MetricCounts c{r.tp, r.fp, r.fn, 0};
    PrecisionRecall pr = precision_recall(c);
    REQUIRE(pr.precision.has_value());
    REQUIRE(pr.recall.has_value());
    CHECK(std::fabs(round_pct(*pr.precision) - r.pre) < 0.05);
    CHECK(std::fabs(round_pct(*pr.recall) - r.rec) < 0.05);
    // Positive-frame bookkeeping: TP + FN equals the positive frame count.
    CHECK(r.tp + r.fn == 10025);
  }

  // The one published row whose recall disagrees with its own counts: the
  // formula value is 43.0%, not the printed 48%.
  MetricCounts flagged{4308, 2962, 5717, 1365};
  PrecisionRecall pr = precision_recall(flagged);
  CHECK(round_pct(*pr.precision) == doctest::Approx(59.3));
  CHECK(round_pct(*pr.recall) == doctest::Approx(43.0));
  CHECK(round_pct(*pr.recall) != doctest::Approx(48.0));
}

TEST_CASE("precision_recall: undefined ratios are absent, never silent zeros") {
  PrecisionRecall none = precision_recall({0, 0, 0, 5});
  CHECK(!none.precision.has_value());
  CHECK(!none.recall.has_value());
  PrecisionRecall p_only = precision_recall({0, 3, 0, 0});
  CHECK(p_only.precision.has_value());
  CHECK(!p_only.recall.has_value());
}

TEST_CASE("evaluate: totals equal per-frame sums, order independent") {
  Rng rng(90);
  std::vector<FrameGroundTruth> frames;
  std::vector<DetectionRecord> dets;
  int positives = 0;
  for (int i = 0; i < 40; ++i) {
    const std::string id = "fr" + std::to_string(i);
    if (rng.bernoulli(0.6)) {
      ++positives;
      const int x0 = 5 + static_cast<int>(rng.uniform_int(30));
      const int y0 = 5 + static_cast<int>(rng.uniform_int(30));
      frames.push_back(positive_frame(id, rect_mask(64, 64, x0, x0 + 12, y0, y0 + 12)));
      const int n = static_cast<int>(rng.uniform_int(4));
      for (int k = 0; k < n; ++k) {
        if (rng.bernoulli(0.5)) {
          dets.push_back(det(id, x0 + 2, x0 + 10, y0 + 2, y0 + 10));  // hit
        } else {
          const int ox = static_cast<int>(rng.uniform_int(8));
          dets.push_back(det(id, 50 + ox, 55 + ox, 50, 55));  // usually a miss
        }
      }
    } else {
      frames.push_back(negative_frame(id));
      if (rng.bernoulli(0.3)) dets.push_back(det(id, 10, 20, 10, 20));
    }
  }

  EvalReport report = evaluate(dets, frames);

  // Brute-force re-scan.
  MetricCounts manual;
  for (const auto& f : frames) {
    std::vector<DetectionRecord> mine;
    for (const auto& d : dets)
      if (d.frame_id == f.frame_id) mine.push_back(d);
    manual += score_frame(mine, f);
  }
  CHECK(report.totals == manual);
  CHECK(report.totals.tp + report.totals.fn == positives);

  // Permuting frames and detections leaves the totals unchanged.
  std::vector<FrameGroundTruth> shuffled = frames;
  std::reverse(shuffled.begin(), shuffled.end());
  std::vector<DetectionRecord> rdets = dets;
  std::reverse(rdets.begin(), rdets.end());
  CHECK(evaluate(rdets, shuffled).totals == report.totals);

  // Unknown frame id is rejected.
  std::vector<DetectionRecord> bad = dets;
  bad.push_back(det("nosuch", 1, 2, 1, 2));
  CHECK_THROWS_AS(evaluate(bad, frames), DataError);
}

TEST_CASE("evaluate: all-negative set with no detections gives TN = n") {
  std::vector<FrameGroundTruth> frames;
  for (int i = 0; i < 7; ++i) frames.push_back(negative_frame("n" + std::to_string(i)));
  EvalReport report = evaluate({}, frames);
  CHECK(report.totals == MetricCounts{0, 0, 0, 7});
  CHECK(!report.pr.precision.has_value());
  CHECK(!report.pr.recall.has_value());
}

TEST_CASE("toy_detect: blank, one blob, two blobs") {
  GrayImage blank = GrayImage::filled(48, 48, 30);
  CHECK(toy_detect(blank, "b").empty());

  GrayImage one = GrayImage::filled(48, 48, 30);
  for (int y = 10; y <= 20; ++y)
    for (int x = 12; x <= 22; ++x) one.at(y, x) = 220;
  auto dets1 = toy_detect(one, "one");
  REQUIRE(dets1.size() == 1);
  CHECK(dets1[0].box.x_min == 12);
  CHECK(dets1[0].box.x_max == 22);
  CHECK(dets1[0].box.y_min == 10);
  CHECK(dets1[0].box.y_max == 20);
  CHECK(dets1[0].score == doctest::Approx(220.0 / 255.0).epsilon(1e-6));

  GrayImage two = one;
  for (int y = 30; y <= 40; ++y)
    for (int x = 30; x <= 40; ++x) two.at(y, x) = 240;
  auto dets2 = toy_detect(two, "two");
  CHECK(dets2.size() == 2);

  // Sub-minimum-area blips are ignored.
  GrayImage tiny = GrayImage::filled(48, 48, 30);
  tiny.at(5, 5) = 255;
  CHECK(toy_detect(tiny, "tiny").empty());
}

TEST_CASE("detections CSV: round trip and malformed input") {
  const fs::path dir = fs::temp_directory_path() / "polygen_test_detcsv";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string path = (dir / "dets.csv").string();

  std::vector<DetectionRecord> dets{det("a", 1, 5, 2, 6, 0.25), det("b", 0, 63, 0, 63, 1.0)};
  save_detections_csv(path, dets);
  auto loaded = load_detections_csv(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].frame_id == "a");
  CHECK(loaded[0].box.x_max == 5);
  CHECK(loaded[0].score == doctest::Approx(0.25));

  std::ofstream bad(dir / "bad.csv");
  bad << "frame_id,x_min,x_max,y_min,y_max,score\nfoo,1,2\n";
  bad.close();
  CHECK_THROWS_AS(load_detections_csv((dir / "bad.csv").string()), DataError);

  std::ofstream nohdr(dir / "nohdr.csv");
  nohdr << "id,x0\n";
  nohdr.close();
  CHECK_THROWS_AS(load_detections_csv((dir / "nohdr.csv").string()), DataError);
}

TEST_SUITE_END();
