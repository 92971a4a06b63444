#include "torsionlab/errors.hpp"
#include "torsionlab/geometry.hpp"

#include <cctype>
#include <fstream>
#include <istream>

namespace torsionlab {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(char(ch));
  }
  return tok;
}

}  // namespace

DomainMask read_pgm(const std::filesystem::path& path, double h, std::string name) {
  if (!(h > 0.0)) throw BadSpec("grid spacing h must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadSpec("cannot open PGM file " + path.string());
  if (header_token(in) != "P5") throw BadSpec("not a binary P5 PGM: " + path.string());
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(header_token(in));
    height = std::stoi(header_token(in));
    maxval = std::stoi(header_token(in));
  } catch (const std::exception&) {
    throw BadSpec("malformed PGM header in " + path.string());
  }
  if (width < 1 || height < 1) throw BadSpec("PGM has empty dimensions");
  if (maxval != 255) throw BadSpec("PGM maxval must be 255");

  std::vector<unsigned char> pix(std::size_t(width) * height);
  in.read(reinterpret_cast<char*>(pix.data()), std::streamsize(pix.size()));
  if (in.gcount() != std::streamsize(pix.size())) throw BadSpec("truncated PGM pixel data");

  bool touches = false;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const unsigned char p = pix[std::size_t(r) * width + c];
      if (p != 0 && p != 255) throw BadSpec("PGM pixel values must be 0 or 255");
      if (p == 255 && (r == 0 || c == 0 || r == height - 1 || c == width - 1)) touches = true;
    }
  }
  const int pad = touches ? 1 : 0;

  DomainMask mask;
  mask.grid = GridSpec{-pad * h, -pad * h, h, width + 2 * pad, height + 2 * pad};
  mask.inside = MaskArray::Constant(mask.grid.nx, mask.grid.ny, false);
  mask.name = std::move(name);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      mask.inside(c + pad, height - 1 - r + pad) = pix[std::size_t(r) * width + c] == 255;
    }
  }
  if (mask.inside_count() == 0) throw EmptyRaster("PGM " + path.string() + " has no inside pixels");
  return mask;
}

void write_pgm(const DomainMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write PGM file " + path.string());
  const int w = mask.grid.nx, ht = mask.grid.ny;
  out << "P5\n" << w << ' ' << ht << "\n255\n";
  std::vector<unsigned char> row(w);
  for (int r = 0; r < ht; ++r) {
    const int j = ht - 1 - r;
    for (int i = 0; i < w; ++i) row[i] = mask.inside(i, j) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), w);
  }
}

}  // namespace torsionlab
