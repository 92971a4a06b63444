#include "torsionlab/field.hpp"

#include "torsionlab/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

namespace torsionlab {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (in.gcount() != std::streamsize(sizeof(T))) throw Error("truncated raw field file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_csv(const ScalarField& field, const DomainMask& mask, const std::filesystem::path& path) {
  if (!(field.grid == mask.grid)) throw GridMismatch("field and mask grids differ");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "i,j,x,y,value\n" << std::setprecision(17);
  for (int j = 0; j < field.grid.ny; ++j) {
    for (int i = 0; i < field.grid.nx; ++i) {
      if (!mask.inside(i, j)) continue;
      const auto c = field.grid.center(i, j);
      out << i << ',' << j << ',' << c.x() << ',' << c.y() << ',' << field.values(i, j) << '\n';
    }
  }
}

void write_raw(const ScalarField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  put_le<std::uint64_t>(out, std::uint64_t(field.grid.nx));
  put_le<std::uint64_t>(out, std::uint64_t(field.grid.ny));
  put_le<double>(out, field.grid.h);
  for (int j = 0; j < field.grid.ny; ++j)
    for (int i = 0; i < field.grid.nx; ++i) put_le<double>(out, field.values(i, j));
}

ScalarField read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  ScalarField f;
  f.grid.nx = int(get_le<std::uint64_t>(in));
  f.grid.ny = int(get_le<std::uint64_t>(in));
  f.grid.h = get_le<double>(in);
  f.values.resize(f.grid.nx, f.grid.ny);
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) f.values(i, j) = get_le<double>(in);
  return f;
}

}  // namespace torsionlab
