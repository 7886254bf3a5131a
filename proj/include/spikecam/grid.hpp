#pragma once

#include <cstddef>
#include <vector>

#include "spikecam/errors.hpp"

namespace spikecam {

// Dense row-major H x W map.
template <typename T>
struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t h, std::size_t w, T fill = T{}) : height(h), width(w), data(h * w, fill) {}

  std::size_t size() const { return data.size(); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  T& at(std::size_t row, std::size_t col) { return data[row * width + col]; }
  const T& at(std::size_t row, std::size_t col) const { return data[row * width + col]; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return height == other.height && width == other.width;
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

// Normalized intensity image; reconstructions keep every value in [0, 1].
using Image = Grid<double>;

}  // namespace spikecam
