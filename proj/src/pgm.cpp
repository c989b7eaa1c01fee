#include "sgft/pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "sgft/error.hpp"

namespace sgft {
namespace {

// Skips whitespace and '#' comments, then reads a decimal header field.
std::size_t header_field(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  std::size_t value = 0;
  if (!(in >> value)) throw Error(ErrorCode::kIo, "malformed PGM header");
  return value;
}

}  // namespace

DepthImage read_pgm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw Error(ErrorCode::kIo, "not a P5/P2 PGM file");
  }
  const std::size_t width = header_field(in);
  const std::size_t height = header_field(in);
  const std::size_t maxval = header_field(in);
  if (width == 0 || height == 0 || width > 65535 || height > 65535) {
    throw Error(ErrorCode::kIo, "PGM dimensions out of range");
  }
  if (maxval == 0 || maxval > 255) throw Error(ErrorCode::kIo, "only 8-bit PGM is supported");

  DepthImage img(width, height);
  if (magic[1] == '5') {
    in.get();  // single whitespace byte after maxval
    if (!in.read(reinterpret_cast<char*>(img.samples.data()),
                 static_cast<std::streamsize>(img.samples.size()))) {
      throw Error(ErrorCode::kIo, "PGM pixel data is truncated");
    }
  } else {
    for (auto& s : img.samples) {
      const std::size_t v = header_field(in);
      if (v > maxval) throw Error(ErrorCode::kIo, "PGM sample exceeds maxval");
      s = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

DepthImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const DepthImage& img) {
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.samples.data()),
            static_cast<std::streamsize>(img.samples.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing PGM");
}

void write_pgm(const std::string& path, const DepthImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path);
  write_pgm(out, img);
}

}  // namespace sgft
