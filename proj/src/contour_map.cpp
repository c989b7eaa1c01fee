#include "sgft/contour_map.hpp"

#include <algorithm>

#include "sgft/error.hpp"

namespace sgft {

ContourMap::ContourMap(std::size_t width, std::size_t height)
    : width_(width),
      height_(height),
      horizontal_(width > 0 ? (width - 1) * height : 0, 0),
      vertical_(height > 0 ? width * (height - 1) : 0, 0) {}

void ContourMap::set_horizontal(std::size_t x, std::size_t y, bool broken) {
  if (x + 1 >= width_ || y >= height_) {
    throw Error(ErrorCode::kOutOfBounds, "horizontal link outside image");
  }
  horizontal_[y * (width_ - 1) + x] = broken ? 1 : 0;
}

void ContourMap::set_vertical(std::size_t x, std::size_t y, bool broken) {
  if (x >= width_ || y + 1 >= height_) {
    throw Error(ErrorCode::kOutOfBounds, "vertical link outside image");
  }
  vertical_[y * width_ + x] = broken ? 1 : 0;
}

bool ContourMap::broken_between(std::size_t x, std::size_t y, int dx, int dy) const {
  if (dx == 1) return x + 1 < width_ && horizontal(x, y);
  if (dx == -1) return x >= 1 && horizontal(x - 1, y);
  if (dy == 1) return y + 1 < height_ && vertical(x, y);
  if (dy == -1) return y >= 1 && vertical(x, y - 1);
  return false;
}

std::size_t ContourMap::link_count() const {
  return static_cast<std::size_t>(std::count(horizontal_.begin(), horizontal_.end(), 1) +
                                  std::count(vertical_.begin(), vertical_.end(), 1));
}

BlockContour ContourMap::block_view(std::size_t x0, std::size_t y0, std::size_t size) const {
  if (x0 + size > width_ || y0 + size > height_) {
    throw Error(ErrorCode::kOutOfBounds, "block extends past image");
  }
  BlockContour c(size);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      if (x + 1 < size && horizontal(x0 + x, y0 + y)) c.set_horizontal(x, y);
      if (y + 1 < size && vertical(x0 + x, y0 + y)) c.set_vertical(x, y);
    }
  return c;
}

bool ContourMap::any_in_block(std::size_t x0, std::size_t y0, std::size_t size) const {
  if (x0 + size > width_ || y0 + size > height_) {
    throw Error(ErrorCode::kOutOfBounds, "block extends past image");
  }
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      if (x + 1 < size && horizontal(x0 + x, y0 + y)) return true;
      if (y + 1 < size && vertical(x0 + x, y0 + y)) return true;
    }
  return false;
}

}  // namespace sgft
