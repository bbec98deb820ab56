#pragma once

#include <string>
#include <vector>

#include "polygen/detect/eval.hpp"
#include "polygen/imaging/image.hpp"

namespace polygen {

// Intensity-threshold blob detector standing in for a learned detector in
// desk-scale end-to-end runs: 8-connected components above the threshold,
// one box per component above the minimum area, score = mean intensity / 255.
struct ToyDetectorConfig {
  int threshold = 160;
  int min_area = 4;
};

std::vector<DetectionRecord> toy_detect(const GrayImage& image,
                                        const std::string& frame_id,
                                        const ToyDetectorConfig& cfg = {});

}  // namespace polygen
