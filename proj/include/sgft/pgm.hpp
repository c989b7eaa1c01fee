#pragma once

#include <iosfwd>
#include <string>

#include "sgft/codec.hpp"

namespace sgft {

// Binary (P5) and ASCII (P2) greymaps with maxval <= 255. Throws kIo.
DepthImage read_pgm(std::istream& in);
DepthImage read_pgm(const std::string& path);

// Always writes P5, maxval 255.
void write_pgm(std::ostream& out, const DepthImage& img);
void write_pgm(const std::string& path, const DepthImage& img);

}  // namespace sgft
