// Copyright 2026 The stgt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stgt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stgt {

bool Box::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 <= x2 && y1 <= y2;
}

Box Box::hull(const Box& a, const Box& b) {
  return Box{std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
             std::max(a.y2, b.y2)};
}

double box_intersection_area(const Box& a, const Box& b) {
  double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const Box& a, const Box& b) {
  double inter = box_intersection_area(a, b);
  double uni = a.area() + b.area() - inter;
  if (uni == 0.0) {
    throw UndefinedGeometryError("iou of two degenerate boxes is undefined");
  }
  return inter / uni;
}

double giou(const Box& a, const Box& b) {
  double inter = box_intersection_area(a, b);
  double uni = a.area() + b.area() - inter;
  if (uni == 0.0) {
    throw UndefinedGeometryError("giou of two degenerate boxes is undefined");
  }
  double hull_area = Box::hull(a, b).area();
  return inter / uni - (hull_area - uni) / hull_area;
}

Mask::Mask(int width, int height, std::vector<std::uint32_t> runs,
           std::vector<float> depth)
    : width_(width), height_(height), runs_(std::move(runs)),
      depth_(std::move(depth)) {
  if (width_ <= 0 || height_ <= 0) {
    throw DimensionError("mask dimensions must be positive");
  }
  std::int64_t total = 0;
  std::int64_t fg = 0;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    total += runs_[i];
    if (i % 2 == 1) fg += runs_[i];
  }
  if (total != static_cast<std::int64_t>(width_) * height_) {
    throw DimensionError("mask run lengths must sum to width*height");
  }
  area_ = fg;
  if (!depth_.empty() && static_cast<std::int64_t>(depth_.size()) != area_) {
    throw DimensionError("mask depth must hold one value per foreground pixel");
  }
}

Mask Mask::from_grid(int width, int height,
                     const std::vector<std::uint8_t>& grid,
                     std::vector<float> depth) {
  if (static_cast<std::int64_t>(grid.size()) !=
      static_cast<std::int64_t>(width) * height) {
    throw DimensionError("grid size must equal width*height");
  }
  std::vector<std::uint32_t> runs;
  std::uint8_t prev = 0;
  std::uint32_t count = 0;
  for (std::uint8_t cell : grid) {
    std::uint8_t v = cell ? 1 : 0;
    if (v != prev) {
      runs.push_back(count);
      count = 0;
      prev = v;
    }
    ++count;
  }
  runs.push_back(count);
  return Mask(width, height, std::move(runs), std::move(depth));
}

namespace {
std::vector<std::uint8_t> rect_grid(int width, int height, int x1, int y1,
                                    int x2, int y2) {
  std::vector<std::uint8_t> grid(
      static_cast<std::size_t>(width) * height, 0);
  x1 = std::max(0, x1);
  y1 = std::max(0, y1);
  x2 = std::min(width, x2);
  y2 = std::min(height, y2);
  for (int x = x1; x < x2; ++x) {
    for (int y = y1; y < y2; ++y) {
      grid[static_cast<std::size_t>(x) * height + y] = 1;
    }
  }
  return grid;
}
}  // namespace

Mask Mask::from_rect(int width, int height, int x1, int y1, int x2, int y2) {
  return from_grid(width, height, rect_grid(width, height, x1, y1, x2, y2));
}

Mask Mask::from_rect(int width, int height, int x1, int y1, int x2, int y2,
                     float depth) {
  auto grid = rect_grid(width, height, x1, y1, x2, y2);
  std::int64_t fg = std::accumulate(grid.begin(), grid.end(), std::int64_t{0});
  return from_grid(width, height, grid,
                   std::vector<float>(static_cast<std::size_t>(fg), depth));
}

std::vector<std::uint8_t> Mask::to_grid() const {
  std::vector<std::uint8_t> grid(
      static_cast<std::size_t>(width_) * height_);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (std::uint32_t run : runs_) {
    std::fill_n(grid.begin() + pos, run, value);
    pos += run;
    value = 1 - value;
  }
  return grid;
}

bool Mask::at(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
  std::int64_t idx = static_cast<std::int64_t>(x) * height_ + y;
  std::int64_t pos = 0;
  bool value = false;
  for (std::uint32_t run : runs_) {
    pos += run;
    if (idx < pos) return value;
    value = !value;
  }
  return false;
}

Box mask_to_box(const Mask& m) {
  if (m.area() == 0) {
    throw EmptyMaskError("cannot compute bounding box of an empty mask");
  }
  int min_x = m.width(), max_x = -1;
  int min_y = m.height(), max_y = -1;
  std::int64_t pos = 0;
  bool value = false;
  for (std::uint32_t run : m.runs()) {
    if (value && run > 0) {
      // Column-major: index k maps to column k / height, row k % height.
      std::int64_t first = pos;
      std::int64_t last = pos + run - 1;
      int cx1 = static_cast<int>(first / m.height());
      int cx2 = static_cast<int>(last / m.height());
      min_x = std::min(min_x, cx1);
      max_x = std::max(max_x, cx2);
      if (cx1 == cx2) {
        min_y = std::min(min_y, static_cast<int>(first % m.height()));
        max_y = std::max(max_y, static_cast<int>(last % m.height()));
      } else {
        // A run crossing a column boundary touches the last row of the
        // earlier column and the first row of the later one.
        min_y = 0;
        max_y = m.height() - 1;
      }
    }
    pos += run;
    value = !value;
  }
  return Box{static_cast<double>(min_x), static_cast<double>(min_y),
             static_cast<double>(max_x + 1), static_cast<double>(max_y + 1)};
}

std::int64_t mask_intersection_area(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("mask intersection requires matching dimensions");
  }
  // Two-pointer sweep over the run boundaries; no decode needed.
  std::int64_t inter = 0;
  std::size_t ia = 0, ib = 0;
  std::int64_t end_a = ia < a.runs().size() ? a.runs()[ia] : 0;
  std::int64_t end_b = ib < b.runs().size() ? b.runs()[ib] : 0;
  bool va = false, vb = false;
  std::int64_t pos = 0;
  std::int64_t total = static_cast<std::int64_t>(a.width()) * a.height();
  while (pos < total) {
    while (ia < a.runs().size() && end_a <= pos) {
      ++ia;
      va = !va;
      end_a += ia < a.runs().size() ? a.runs()[ia] : 0;
    }
    while (ib < b.runs().size() && end_b <= pos) {
      ++ib;
      vb = !vb;
      end_b += ib < b.runs().size() ? b.runs()[ib] : 0;
    }
    std::int64_t next = std::min(end_a, end_b);
    if (next <= pos) break;
    if (va && vb) inter += next - pos;
    pos = next;
  }
  return inter;
}

}  // namespace stgt
