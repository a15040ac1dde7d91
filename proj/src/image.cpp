#include "leukoseg/image.hpp"

#include <algorithm>

namespace leukoseg {

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> values)
    : Grid(width, height, std::move(values)) {
  for (auto v : data()) {
    if (v != 0 && v != kOn) {
      throw std::invalid_argument("binary mask values must be 0 or 255");
    }
  }
}

std::size_t BinaryMask::count() const noexcept {
  auto d = data();
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), kOn));
}

namespace {

template <typename Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, const char* what, Op op) {
  require_same_shape(a, b, what);
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      out.set(x, y, op(a.test(x, y), b.test(x, y)));
    }
  }
  return out;
}

}  // namespace

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_or", [](bool p, bool q) { return p || q; });
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_and", [](bool p, bool q) { return p && q; });
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_and_not", [](bool p, bool q) { return p && !q; });
}

std::size_t overlap_count(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "overlap_count");
  auto da = a.data();
  auto db = b.data();
  std::size_t n = 0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    n += (da[i] != 0 && db[i] != 0) ? 1 : 0;
  }
  return n;
}

}  // namespace leukoseg
