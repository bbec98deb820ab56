#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polygen/imaging/image.hpp"

namespace polygen {

// Inclusive pixel bounds, (x_min, x_max, y_min, y_max).
struct Box {
  int x_min = 0;
  int x_max = 0;
  int y_min = 0;
  int y_max = 0;
};

struct DetectionRecord {
  std::string frame_id;
  Box box;
  double score = 0.0;  // in [0, 1]
};

struct FrameGroundTruth {
  std::string frame_id;
  BinaryMask mask;  // empty extents or all-zero => negative frame
  std::optional<Box> box;

  bool positive() const { return mask.width > 0 && !mask.empty_mask(); }
};

struct MetricCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  MetricCounts& operator+=(const MetricCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const MetricCounts&) const = default;
};

// Tight bounds of the on-pixels; nullopt for an empty mask. Disjoint blobs
// yield one spanning box (single-box semantics).
std::optional<Box> mask_to_bbox(const BinaryMask& mask);

enum class MatchRule { kCenterInMask, kIoU };

struct ScoringOptions {
  MatchRule rule = MatchRule::kCenterInMask;
  double iou_threshold = 0.5;
  // Treat each 8-connected mask component as its own polyp (TP capped per
  // component). Off by default: one mask, one polyp.
  bool split_components = false;
};

// Paper counting rules: on a positive frame at most one TP per polyp, every
// non-hit detection is an FP, a polyp with no hits adds one FN, and surplus
// hits beyond the first count as nothing. On a negative frame every
// detection is an FP and an empty detection set adds one TN.
MetricCounts score_frame(std::span<const DetectionRecord> dets,
                         const FrameGroundTruth& gt,
                         const ScoringOptions& opts = {});

struct PrecisionRecall {
  std::optional<double> precision;  // TP/(TP+FP), absent when undefined
  std::optional<double> recall;     // TP/(TP+FN)
};

PrecisionRecall precision_recall(const MetricCounts& counts);

// Percentage rounded to one decimal, half away from zero.
double round_pct(double fraction);

struct EvalReport {
  MetricCounts totals;
  std::vector<std::pair<std::string, MetricCounts>> per_frame;
  PrecisionRecall pr;
};

EvalReport evaluate(const std::vector<DetectionRecord>& dets,
                    const std::vector<FrameGroundTruth>& frames,
                    const ScoringOptions& opts = {});

// File front-end: detections CSV (frame_id,x_min,x_max,y_min,y_max,score),
// ground-truth manifest JSON mapping frame id -> mask path ("" = negative).
// Writes a per-frame CSV report and a JSON summary.
EvalReport evaluate_files(const std::string& dets_csv, const std::string& gt_manifest,
                          const ScoringOptions& opts, const std::string& report_csv,
                          const std::string& summary_json);

std::vector<DetectionRecord> load_detections_csv(const std::string& path);
void save_detections_csv(const std::string& path,
                         const std::vector<DetectionRecord>& dets);
std::vector<FrameGroundTruth> load_gt_manifest(const std::string& path);

}  // namespace polygen
