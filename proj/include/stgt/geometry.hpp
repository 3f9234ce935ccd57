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

#pragma once

#include <cstdint>
#include <vector>

#include "stgt/error.hpp"

namespace stgt {

/// Axis-aligned box in continuous half-open pixel coordinates,
/// [x1, x2) x [y1, y2) with x1 <= x2 and y1 <= y2.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool degenerate() const { return area() == 0.0; }
  bool valid() const;

  /// Smallest box enclosing both arguments.
  static Box hull(const Box& a, const Box& b);

  bool operator==(const Box& other) const = default;
};

double box_intersection_area(const Box& a, const Box& b);

/// Intersection over union. Throws UndefinedGeometryError when both boxes
/// have zero area.
double iou(const Box& a, const Box& b);

/// Generalized IoU: iou(a,b) - (area(hull) - area(union)) / area(hull).
/// Range [-1, 1]; throws UndefinedGeometryError when both boxes are
/// degenerate.
double giou(const Box& a, const Box& b);

/// Binary mask stored as COCO-style run-length encoding: runs are counted in
/// column-major order and start with the number of background pixels.
/// Optionally carries one depth value per foreground pixel, in the same
/// column-major order.
class Mask {
 public:
  Mask(int width, int height, std::vector<std::uint32_t> runs,
       std::vector<float> depth = {});

  /// Builds a mask from a column-major 0/1 grid of width*height cells.
  static Mask from_grid(int width, int height,
                        const std::vector<std::uint8_t>& grid,
                        std::vector<float> depth = {});

  /// Rectangle [x1, x2) x [y1, y2) clipped to the grid; optionally filled
  /// with a constant depth.
  static Mask from_rect(int width, int height, int x1, int y1, int x2, int y2);
  static Mask from_rect(int width, int height, int x1, int y1, int x2, int y2,
                        float depth);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint32_t>& runs() const { return runs_; }

  /// Foreground pixel count.
  std::int64_t area() const { return area_; }

  bool has_depth() const { return !depth_.empty(); }
  const std::vector<float>& depth() const { return depth_; }

  /// Column-major 0/1 grid of width*height cells.
  std::vector<std::uint8_t> to_grid() const;

  /// Foreground test for a single pixel.
  bool at(int x, int y) const;

  bool operator==(const Mask& other) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint32_t> runs_;
  std::vector<float> depth_;
  std::int64_t area_;
};

/// Tight bounding box of the foreground, half-open pixel convention.
/// Throws EmptyMaskError when the mask has no foreground pixel.
Box mask_to_box(const Mask& m);

/// Number of pixels foreground in both masks. Throws DimensionError on
/// shape mismatch.
std::int64_t mask_intersection_area(const Mask& a, const Mask& b);

}  // namespace stgt
