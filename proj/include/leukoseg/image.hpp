#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "leukoseg/error.hpp"

namespace leukoseg {

struct Point {
  int x = 0;
  int y = 0;
  auto operator<=>(const Point&) const = default;
};

struct PointF {
  double x = 0.0;
  double y = 0.0;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

// Row-major pixel grid. Width and height are both >= 1 for any non-default
// grid; a default-constructed grid is empty.
template <typename T>
class Grid {
 public:
  Grid() = default;

  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw DimensionMismatchError("pixel buffer length does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  const T& at(int x, int y) const { return data_[index(x, y)]; }
  std::span<const T> data() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Grid&) const = default;

 protected:
  T& mut(int x, int y) { return data_[index(x, y)]; }
  std::vector<T>& buffer() noexcept { return data_; }

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("image dimensions must be >= 1");
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

class RasterImage : public Grid<Rgb> {
 public:
  using Grid::Grid;
  using Grid::at;
  Rgb& at(int x, int y) { return mut(x, y); }
  std::span<Rgb> pixels() noexcept { return buffer(); }
};

// Single-channel 8-bit image.
class ChannelImage : public Grid<std::uint8_t> {
 public:
  using Grid::Grid;
  using Grid::at;
  std::uint8_t& at(int x, int y) { return mut(x, y); }
  std::span<std::uint8_t> values() noexcept { return buffer(); }
};

// Binary mask holding only 0 and 255.
class BinaryMask : public Grid<std::uint8_t> {
 public:
  static constexpr std::uint8_t kOn = 255;

  BinaryMask() = default;
  BinaryMask(int width, int height) : Grid(width, height, 0) {}
  BinaryMask(int width, int height, std::vector<std::uint8_t> values);

  bool test(int x, int y) const { return at(x, y) != 0; }
  bool test(Point p) const { return contains(p.x, p.y) && at(p.x, p.y) != 0; }
  void set(int x, int y, bool on = true) { mut(x, y) = on ? kOn : 0; }
  void set(Point p, bool on = true) { set(p.x, p.y, on); }

  std::size_t count() const noexcept;
  bool none() const noexcept { return count() == 0; }
};

// Mask algebra used across the pipeline. All require equal shapes.
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);
std::size_t overlap_count(const BinaryMask& a, const BinaryMask& b);

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionMismatchError(std::string(what) + ": image dimensions differ");
  }
}

}  // namespace leukoseg
