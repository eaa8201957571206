#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <sstream>

#include "mfglab/errors.hpp"
#include "mfglab/io.hpp"
#include "support.hpp"

using namespace mfglab;
using spectral::SpectralField;
using spectral::TorusGrid;

namespace {

std::string field_bytes(const SpectralField& f) {
  std::ostringstream out;
  io::write_field(out, f);
  return out.str();
}

double f64_at(const std::string& bytes, std::size_t offset) {
  double v;
  std::memcpy(&v, bytes.data() + offset, 8);
  return v;
}

}  // namespace

TEST_CASE("field layout: header and k ordering") {
  const TorusGrid g(1, 4);
  // coefficient k lives at storage position k mod n; put k into the real part
  std::vector<std::complex<double>> c{{0, 0}, {1, 0}, {-2, 0}, {-1, 0}};
  const auto bytes = field_bytes(SpectralField(g, c));
  REQUIRE(bytes.size() == 4 + 1 + 1 + 4 + 4 * 16);
  CHECK(bytes.substr(0, 4) == "MFGM");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 1);
  CHECK(static_cast<unsigned char>(bytes[6]) == 4);
  CHECK(bytes[7] == 0);
  for (int i = 0; i < 4; ++i) CHECK(f64_at(bytes, 10 + 16 * i) == double(i - 2));
}

TEST_CASE("round trips") {
  for (int d = 1; d <= 2; ++d) {
    const TorusGrid g(d, 8);
    const auto f = testing::random_field(g, 5, 3);
    std::istringstream in(field_bytes(f));
    CHECK(io::read_field(in) == f);

    const std::vector<SpectralField> path{f, 2.0 * f, SpectralField(g)};
    const auto back = io::path_from_bytes(io::to_bytes(path));
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == path[i]);
  }
  io::KernelBlock k{1, 4, 2, {1, 2, 3, 4, 5, 6, 7, 8}};
  std::stringstream buf;
  io::write_kernel(buf, k);
  const auto back = io::read_kernel(buf);
  CHECK(back.d == 1);
  CHECK(back.n == 4);
  CHECK(back.probes == 2);
  CHECK(back.values == k.values);
}

TEST_CASE("malformed input raises FormatError") {
  const TorusGrid g(1, 8);
  const auto good = field_bytes(testing::random_field(g, 1, 3));
  auto expect_bad = [](std::string bytes) {
    std::istringstream in(bytes);
    CHECK_THROWS_AS(io::read_field(in), FormatError);
  };
  expect_bad("");
  expect_bad("MFGX" + good.substr(4));
  std::string v2 = good;
  v2[4] = 2;
  expect_bad(v2);
  expect_bad(good.substr(0, good.size() - 3));
  std::string d9 = good;
  d9[5] = 9;
  expect_bad(d9);
  CHECK_THROWS_AS(io::path_from_bytes(good), FormatError);  // a field is not a path

  io::KernelBlock k{1, 4, 2, {1, 2, 3}};  // 3 != 4 x 2
  std::stringstream buf;
  CHECK_THROWS_AS(io::write_kernel(buf, k), InputShapeError);
}
