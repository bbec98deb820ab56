#include "polygen/detect/toy_detector.hpp"

#include <algorithm>
#include <deque>

namespace polygen {

std::vector<DetectionRecord> toy_detect(const GrayImage& image,
                                        const std::string& frame_id,
                                        const ToyDetectorConfig& cfg) {
  const int w = image.width, h = image.height;
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
  std::vector<DetectionRecord> out;

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (visited[i] || image.pixels[i] < cfg.threshold) continue;
      // flood one component
      Box box{x, x, y, y};
      std::int64_t area = 0;
      double intensity_sum = 0.0;
      std::deque<std::pair<int, int>> q{{y, x}};
      visited[i] = 1;
      while (!q.empty()) {
        auto [cy, cx] = q.front();
        q.pop_front();
        ++area;
        intensity_sum += image.at(cy, cx);
        box.x_min = std::min(box.x_min, cx);
        box.x_max = std::max(box.x_max, cx);
        box.y_min = std::min(box.y_min, cy);
        box.y_max = std::max(box.y_max, cy);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = cy + dy, nx = cx + dx;
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (!visited[j] && image.pixels[j] >= cfg.threshold) {
              visited[j] = 1;
              q.emplace_back(ny, nx);
            }
          }
      }
      if (area >= cfg.min_area) {
        DetectionRecord d;
        d.frame_id = frame_id;
        d.box = box;
        d.score = std::clamp(intensity_sum / static_cast<double>(area) / 255.0, 0.0, 1.0);
        out.push_back(std::move(d));
      }
    }
  return out;
}

}  // namespace polygen
