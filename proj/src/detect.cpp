#include "polygen/detect/eval.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "polygen/core/error.hpp"

namespace polygen {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<Box> mask_to_bbox(const BinaryMask& mask) {
  Box b{mask.width, -1, mask.height, -1};
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(y, x)) {
        b.x_min = std::min(b.x_min, x);
        b.x_max = std::max(b.x_max, x);
        b.y_min = std::min(b.y_min, y);
        b.y_max = std::max(b.y_max, y);
      }
  if (b.x_max < 0) return std::nullopt;
  return b;
}

namespace {

double iou(const Box& a, const Box& b) {
  const int ix_min = std::max(a.x_min, b.x_min);
  const int ix_max = std::min(a.x_max, b.x_max);
  const int iy_min = std::max(a.y_min, b.y_min);
  const int iy_max = std::min(a.y_max, b.y_max);
  const std::int64_t iw = std::max(0, ix_max - ix_min + 1);
  const std::int64_t ih = std::max(0, iy_max - iy_min + 1);
  const std::int64_t inter = iw * ih;
  auto area = [](const Box& box) {
    return static_cast<std::int64_t>(box.x_max - box.x_min + 1) *
           (box.y_max - box.y_min + 1);
  };
  const std::int64_t uni = area(a) + area(b) - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// 8-connected component labels, 0 = background; component ids start at 1.
std::vector<int> label_components(const BinaryMask& mask, int& n_components) {
  std::vector<int> labels(mask.pixels.size(), 0);
  n_components = 0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * mask.width + x;
      if (!mask.pixels[i] || labels[i]) continue;
      ++n_components;
      std::deque<std::pair<int, int>> q{{y, x}};
      labels[i] = n_components;
      while (!q.empty()) {
        auto [cy, cx] = q.front();
        q.pop_front();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = cy + dy, nx = cx + dx;
            if (ny < 0 || ny >= mask.height || nx < 0 || nx >= mask.width) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * mask.width + nx;
            if (mask.pixels[j] && !labels[j]) {
              labels[j] = n_components;
              q.emplace_back(ny, nx);
            }
          }
      }
    }
  return labels;
}

void check_box(const DetectionRecord& d, const FrameGroundTruth& gt) {
  if (d.box.x_min > d.box.x_max || d.box.y_min > d.box.y_max)
    throw DataError("eval: degenerate box for frame " + d.frame_id);
  if (gt.mask.width > 0) {
    if (d.box.x_min < 0 || d.box.y_min < 0 || d.box.x_max >= gt.mask.width ||
        d.box.y_max >= gt.mask.height)
      throw DataError("eval: box outside frame bounds for frame " + d.frame_id);
  }
}

}  // namespace

MetricCounts score_frame(std::span<const DetectionRecord> dets,
                         const FrameGroundTruth& gt, const ScoringOptions& opts) {
  for (const auto& d : dets) {
    if (d.frame_id != gt.frame_id)
      throw DataError("eval: detection for frame '" + d.frame_id +
                      "' scored against frame '" + gt.frame_id + "'");
    check_box(d, gt);
  }

  MetricCounts counts;
  if (!gt.positive()) {
    if (dets.empty())
      counts.tn = 1;
    else
      counts.fp = static_cast<std::int64_t>(dets.size());
    return counts;
  }

  // Polyp index per detection hit: which polyp (component) the detection
  // falls on, or -1 for a miss.
  int n_polyps = 1;
  std::vector<int> labels;
  if (opts.split_components) labels = label_components(gt.mask, n_polyps);

  std::vector<Box> polyp_boxes;
  if (opts.rule == MatchRule::kIoU) {
    if (opts.split_components) {
      polyp_boxes.resize(n_polyps);
      std::vector<bool> seen(n_polyps, false);
      for (int y = 0; y < gt.mask.height; ++y)
        for (int x = 0; x < gt.mask.width; ++x) {
          const int l = labels[static_cast<std::size_t>(y) * gt.mask.width + x];
          if (!l) continue;
          Box& b = polyp_boxes[l - 1];
          if (!seen[l - 1]) {
            b = {x, x, y, y};
            seen[l - 1] = true;
          } else {
            b.x_min = std::min(b.x_min, x);
            b.x_max = std::max(b.x_max, x);
            b.y_min = std::min(b.y_min, y);
            b.y_max = std::max(b.y_max, y);
          }
        }
    } else {
      polyp_boxes.push_back(gt.box ? *gt.box : *mask_to_bbox(gt.mask));
    }
  }

  auto hit_polyp = [&](const DetectionRecord& d) -> int {
    if (opts.rule == MatchRule::kCenterInMask) {
      const int cx = (d.box.x_min + d.box.x_max) / 2;
      const int cy = (d.box.y_min + d.box.y_max) / 2;
      if (!gt.mask.at(cy, cx)) return -1;
      return opts.split_components
                 ? labels[static_cast<std::size_t>(cy) * gt.mask.width + cx] - 1
                 : 0;
    }
    int best = -1;
    double best_iou = opts.iou_threshold;
    for (int p = 0; p < static_cast<int>(polyp_boxes.size()); ++p) {
      const double v = iou(d.box, polyp_boxes[p]);
      if (v >= best_iou) {
        best_iou = v;
        best = p;
      }
    }
    return best;
  };

  std::vector<bool> polyp_hit(static_cast<std::size_t>(n_polyps), false);
  for (const auto& d : dets) {
    const int p = hit_polyp(d);
    if (p < 0) {
      ++counts.fp;  // outside every polyp
    } else if (!polyp_hit[p]) {
      polyp_hit[p] = true;
      ++counts.tp;  // first hit on this polyp
    }
    // surplus hits on an already-hit polyp count as nothing
  }
  for (bool hit : polyp_hit)
    if (!hit) ++counts.fn;
  return counts;
}

PrecisionRecall precision_recall(const MetricCounts& c) {
  PrecisionRecall pr;
  if (c.tp + c.fp > 0)
    pr.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0)
    pr.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return pr;
}

double round_pct(double fraction) {
  const double pct = fraction * 100.0;
  const double scaled = pct * 10.0;
  return (scaled >= 0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5)) / 10.0;
}

EvalReport evaluate(const std::vector<DetectionRecord>& dets,
                    const std::vector<FrameGroundTruth>& frames,
                    const ScoringOptions& opts) {
  std::map<std::string, std::vector<DetectionRecord>> by_frame;
  std::map<std::string, bool> known;
  for (const auto& f : frames) {
    if (known.count(f.frame_id))
      throw DataError("eval: duplicate frame id '" + f.frame_id + "'");
    known[f.frame_id] = true;
  }
  for (const auto& d : dets) {
    if (!known.count(d.frame_id))
      throw DataError("eval: detection references unknown frame '" + d.frame_id + "'");
    by_frame[d.frame_id].push_back(d);
  }

  EvalReport report;
  for (const auto& f : frames) {
    const auto it = by_frame.find(f.frame_id);
    static const std::vector<DetectionRecord> kNone;
    const auto& frame_dets = it == by_frame.end() ? kNone : it->second;
    const MetricCounts c = score_frame(frame_dets, f, opts);
    report.per_frame.emplace_back(f.frame_id, c);
    report.totals += c;
  }
  report.pr = precision_recall(report.totals);
  return report;
}

std::vector<DetectionRecord> load_detections_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("eval: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError("eval: empty detections file " + path);
  if (line != "frame_id,x_min,x_max,y_min,y_max,score")
    throw DataError("eval: bad header in " + path);
  std::vector<DetectionRecord> out;
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    DetectionRecord d;
    std::string field;
    try {
      std::getline(ss, d.frame_id, ',');
      std::getline(ss, field, ',');
      d.box.x_min = std::stoi(field);
      std::getline(ss, field, ',');
      d.box.x_max = std::stoi(field);
      std::getline(ss, field, ',');
      d.box.y_min = std::stoi(field);
      std::getline(ss, field, ',');
      d.box.y_max = std::stoi(field);
      std::getline(ss, field, ',');
      d.score = std::stod(field);
    } catch (const std::exception&) {
      throw DataError("eval: bad row " + std::to_string(line_no) + " in " + path);
    }
    if (d.frame_id.empty() || !ss.eof())
      throw DataError("eval: bad row " + std::to_string(line_no) + " in " + path);
    if (d.score < 0.0 || d.score > 1.0)
      throw DataError("eval: score out of [0,1] at row " + std::to_string(line_no));
    out.push_back(std::move(d));
  }
  return out;
}

void save_detections_csv(const std::string& path,
                         const std::vector<DetectionRecord>& dets) {
  std::ofstream f(path);
  if (!f) throw DataError("eval: cannot write " + path);
  f << "frame_id,x_min,x_max,y_min,y_max,score\n";
  char buf[160];
  for (const auto& d : dets) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%d,%.6g\n", d.frame_id.c_str(),
                  d.box.x_min, d.box.x_max, d.box.y_min, d.box.y_max, d.score);
    f << buf;
  }
}

std::vector<FrameGroundTruth> load_gt_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("eval: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw DataError("eval: bad JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw DataError("eval: gt manifest must map frame id to mask path");
  const fs::path base = fs::path(path).parent_path();
  std::vector<FrameGroundTruth> out;
  for (const auto& [id, value] : j.items()) {
    FrameGroundTruth gt;
    gt.frame_id = id;
    const std::string mask_path = value.get<std::string>();
    if (!mask_path.empty()) {
      gt.mask = read_mask((base / mask_path).string());
      gt.box = mask_to_bbox(gt.mask);
    }
    out.push_back(std::move(gt));
  }
  return out;
}

EvalReport evaluate_files(const std::string& dets_csv, const std::string& gt_manifest,
                          const ScoringOptions& opts, const std::string& report_csv,
                          const std::string& summary_json) {
  const auto dets = load_detections_csv(dets_csv);
  const auto frames = load_gt_manifest(gt_manifest);
  EvalReport report = evaluate(dets, frames, opts);

  if (!report_csv.empty()) {
    std::ofstream f(report_csv);
    if (!f) throw DataError("eval: cannot write " + report_csv);
    f << "frame_id,tp,fp,fn,tn\n";
    for (const auto& [id, c] : report.per_frame)
      f << id << "," << c.tp << "," << c.fp << "," << c.fn << "," << c.tn << "\n";
    f << "TOTAL," << report.totals.tp << "," << report.totals.fp << ","
      << report.totals.fn << "," << report.totals.tn << "\n";
  }
  if (!summary_json.empty()) {
    json j;
    j["tp"] = report.totals.tp;
    j["fp"] = report.totals.fp;
    j["fn"] = report.totals.fn;
    j["tn"] = report.totals.tn;
    j["precision"] = report.pr.precision ? json(*report.pr.precision) : json(nullptr);
    j["recall"] = report.pr.recall ? json(*report.pr.recall) : json(nullptr);
    j["precision_pct"] =
        report.pr.precision ? json(round_pct(*report.pr.precision)) : json(nullptr);
    j["recall_pct"] = report.pr.recall ? json(round_pct(*report.pr.recall)) : json(nullptr);
    std::ofstream f(summary_json);
    if (!f) throw DataError("eval: cannot write " + summary_json);
    f << j.dump(2) << "\n";
  }
  return report;
}

}  // namespace polygen
