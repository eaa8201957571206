#include "mfglab/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfglab/errors.hpp"

namespace mfglab::io {
namespace {

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFFU);
  out.write(b.data(), 8);
}

void read_exact(std::istream& in, char* dst, std::size_t count, const char* what) {
  in.read(dst, static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw FormatError(std::string("truncated ") + what);
}

std::uint8_t get_u8(std::istream& in, const char* what) {
  char c = 0;
  read_exact(in, &c, 1, what);
  return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), 4, what);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), 8, what);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return std::bit_cast<double>(v);
}

void expect_magic(std::istream& in, const char* magic, const char* what) {
  char got[4] = {};
  read_exact(in, got, 4, what);
  if (std::memcmp(got, magic, 4) != 0)
    throw FormatError(std::string("bad magic for ") + what + ", expected " + magic);
  const auto version = get_u8(in, what);
  if (version != kFormatVersion)
    throw FormatError(std::string("unsupported ") + what + " version " + std::to_string(version));
}

// Storage index of the record-order entry `r`: each axis walks -n/2 .. n/2-1.
std::size_t storage_index(const spectral::TorusGrid& grid, std::size_t r) {
  const int d = grid.dimension();
  const int n = grid.modes();
  std::vector<int> pos(static_cast<std::size_t>(d));
  for (int a = d - 1; a >= 0; --a) {
    const int k = static_cast<int>(r % static_cast<std::size_t>(n)) - n / 2;
    pos[a] = grid.position(k);
    r /= static_cast<std::size_t>(n);
  }
  return grid.flatten(pos);
}

}  // namespace

void write_field(std::ostream& out, const spectral::SpectralField& field) {
  const auto& grid = field.grid();
  out.write("MFGM", 4);
  put_u8(out, kFormatVersion);
  put_u8(out, static_cast<std::uint8_t>(grid.dimension()));
  put_u32(out, static_cast<std::uint32_t>(grid.modes()));
  const auto c = field.coeffs();
  for (std::size_t r = 0; r < c.size(); ++r) {
    const auto z = c[storage_index(grid, r)];
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
}

spectral::SpectralField read_field(std::istream& in) {
  expect_magic(in, "MFGM", "field snapshot");
  const int d = get_u8(in, "field snapshot");
  const auto n = get_u32(in, "field snapshot");
  if (d < 1 || d > 8 || n < 4 || n % 2 != 0 || n > (1U << 16))
    throw FormatError("field snapshot has an invalid grid header");
  const spectral::TorusGrid grid(d, static_cast<int>(n));
  std::vector<spectral::Complex> c(grid.node_count());
  for (std::size_t r = 0; r < c.size(); ++r) {
    const double re = get_f64(in, "field snapshot");
    const double im = get_f64(in, "field snapshot");
    c[storage_index(grid, r)] = {re, im};
  }
  return spectral::SpectralField(grid, std::move(c));
}

void write_path(std::ostream& out, const std::vector<spectral::SpectralField>& path) {
  out.write("MFGP", 4);
  put_u8(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(path.size()));
  for (const auto& f : path) write_field(out, f);
}

std::vector<spectral::SpectralField> read_path(std::istream& in) {
  expect_magic(in, "MFGP", "path");
  const auto count = get_u32(in, "path");
  std::vector<spectral::SpectralField> path;
  path.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) path.push_back(read_field(in));
  return path;
}

void write_kernel(std::ostream& out, const KernelBlock& kernel) {
  std::size_t rows = 1;
  for (int a = 0; a < kernel.d; ++a) rows *= static_cast<std::size_t>(kernel.n);
  if (kernel.values.size() != rows * kernel.probes)
    throw InputShapeError("kernel block size does not match its header");
  out.write("MFGK", 4);
  put_u8(out, kFormatVersion);
  put_u8(out, static_cast<std::uint8_t>(kernel.d));
  put_u32(out, static_cast<std::uint32_t>(kernel.n));
  put_u32(out, static_cast<std::uint32_t>(kernel.probes));
  for (double v : kernel.values) put_f64(out, v);
}

KernelBlock read_kernel(std::istream& in) {
  expect_magic(in, "MFGK", "kernel");
  KernelBlock k;
  k.d = get_u8(in, "kernel");
  k.n = static_cast<int>(get_u32(in, "kernel"));
  k.probes = get_u32(in, "kernel");
  if (k.d < 1 || k.d > 8 || k.n < 4 || k.n % 2 != 0 || k.n > (1 << 16))
    throw FormatError("kernel has an invalid grid header");
  std::size_t rows = 1;
  for (int a = 0; a < k.d; ++a) rows *= static_cast<std::size_t>(k.n);
  k.values.resize(rows * k.probes);
  for (auto& v : k.values) v = get_f64(in, "kernel");
  return k;
}

std::string to_bytes(const std::vector<spectral::SpectralField>& path) {
  std::ostringstream out(std::ios::binary);
  write_path(out, path);
  return out.str();
}

std::vector<spectral::SpectralField> path_from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_path(in);
}

}  // namespace mfglab::io
