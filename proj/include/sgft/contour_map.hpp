#pragma once

#include <cstddef>
#include <vector>

#include "sgft/signed_graph.hpp"

namespace sgft {

// Broken links between 4-adjacent pixels of a width x height image.
//
// horizontal(x, y): link (x, y) -- (x + 1, y), x < width - 1
// vertical(x, y):   link (x, y) -- (x, y + 1), y < height - 1
class ContourMap {
 public:
  ContourMap() = default;
  ContourMap(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  bool horizontal(std::size_t x, std::size_t y) const {
    return horizontal_[y * (width_ - 1) + x] != 0;
  }
  bool vertical(std::size_t x, std::size_t y) const {
    return vertical_[y * width_ + x] != 0;
  }
  // Bounds-checked writes; throw kOutOfBounds.
  void set_horizontal(std::size_t x, std::size_t y, bool broken = true);
  void set_vertical(std::size_t x, std::size_t y, bool broken = true);

  // Link between pixel (x, y) and its neighbour in direction (dx, dy), one of
  // the four unit steps. False when the neighbour is outside the image.
  bool broken_between(std::size_t x, std::size_t y, int dx, int dy) const;

  std::size_t link_count() const;
  bool empty() const { return link_count() == 0; }

  // Links with both endpoints inside the size x size block at (x0, y0).
  BlockContour block_view(std::size_t x0, std::size_t y0, std::size_t size) const;
  bool any_in_block(std::size_t x0, std::size_t y0, std::size_t size) const;

  bool operator==(const ContourMap&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<unsigned char> horizontal_;
  std::vector<unsigned char> vertical_;
};

}  // namespace sgft
