#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace omniflow {

/// Dense row-major 2D array. Index origin is the top-left pixel.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), cells_(checked_size(width, height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  T& at(int x, int y) { return cells_[static_cast<size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const { return cells_[static_cast<size_t>(y) * width_ + x]; }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

  T* data() { return cells_.data(); }
  const T* data() const { return cells_.data(); }

  auto begin() { return cells_.begin(); }
  auto end() { return cells_.end(); }
  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }

  bool operator==(const Grid& o) const {
    return width_ == o.width_ && height_ == o.height_ && cells_ == o.cells_;
  }

 private:
  static size_t checked_size(int width, int height) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("Grid: dimensions must be positive");
    return static_cast<size_t>(width) * static_cast<size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

}  // namespace omniflow
