// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "proxyvote/geometry.hpp"

namespace proxyvote {

/// Row-major per-pixel grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
              fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& at(int row, int col) { return data_[index(row, col)]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }
  int row_of(std::size_t i) const { return static_cast<int>(i / width_); }
  int col_of(std::size_t i) const { return static_cast<int>(i % width_); }
  Point2 center(std::size_t i) const { return pixel_center(row_of(i), col_of(i)); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using VectorField = Grid<Direction2>;
/// Segmentation scores s(p), probabilities in [0, 1].
using SegScores = Grid<double>;

/// Object mask; nonzero means the pixel belongs to the object.
class Mask : public Grid<std::uint8_t> {
 public:
  using Grid::Grid;

  bool contains(std::size_t i) const { return (*this)[i] != 0; }
  std::size_t count() const;
  /// Flat indices of masked pixels in row-major order.
  std::vector<std::size_t> indices() const;
};

}  // namespace proxyvote
