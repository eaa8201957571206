#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfglab/errors.hpp"
#include "mfglab/spectral.hpp"
#include "support.hpp"

using namespace mfglab;
using namespace mfglab::spectral;
using testing::from_fn;
using testing::kTwoPi;
using testing::random_field;

namespace {
Complex at1(const SpectralField& f, int k) {
  const int kk[1] = {k};
  return f.at(kk);
}
}  // namespace

TEST_CASE("analyze: constant, cosine and sine coefficients") {
  const TorusGrid g(1, 16);
  const auto one = from_fn(g, [](auto) { return 1.0; });
  CHECK(at1(one, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  for (int k = 1; k < 8; ++k) CHECK(std::abs(at1(one, k)) < 1e-15);

  const auto c = from_fn(g, [](auto x) { return std::cos(x[0]); });
  CHECK(std::abs(at1(c, 1) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(at1(c, -1) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(at1(c, 2)) < 1e-15);

  const auto s = from_fn(g, [](auto x) { return std::sin(x[0]); });
  CHECK(std::abs(at1(s, 1) - Complex(0.0, -0.5)) < 1e-15);
  CHECK(std::abs(at1(s, -1) - Complex(0.0, 0.5)) < 1e-15);
}

TEST_CASE("analyze rejects a wrong sample count") {
  const TorusGrid g(1, 16);
  std::vector<double> v(15, 0.0);
  CHECK_THROWS_AS(analyze(g, v), InputShapeError);
}

TEST_CASE("grid invariants") {
  CHECK_THROWS(TorusGrid(1, 5));
  CHECK_THROWS(TorusGrid(1, 2));
  CHECK(TorusGrid(2, 8).node_count() == 64);
}

TEST_CASE("round trip and Hermitian symmetry on random fields") {
  for (int d = 1; d <= 2; ++d) {
    const TorusGrid g(d, d == 1 ? 32 : 16);
    for (unsigned seed = 0; seed < 10; ++seed) {
      const auto f = random_field(g, seed, 5);
      const auto back = analyze(g, synthesize(f));
      CHECK(testing::coeff_distance(f, back) <= 1e-12 * testing::coeff_scale(f));
      CHECK(imaginary_defect(f) < 1e-12);
    }
  }
}

TEST_CASE("lambda multiplier examples and exact composition") {
  const TorusGrid g(1, 16);
  const auto one = SpectralField::constant(g, 1.0);
  CHECK(testing::coeff_distance(lambda_apply(one, SobolevIndex(3.7)), one) == 0.0);
  const auto c = from_fn(g, [](auto x) { return std::cos(x[0]); });
  CHECK(at1(lambda_apply(c, SobolevIndex(2.0)), 1).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(at1(lambda_apply(c, SobolevIndex(-1.0)), 1).real() ==
        doctest::Approx(0.5 * 0.70710678118654752).epsilon(1e-15));

  const TorusGrid g2(2, 16);
  const auto f = random_field(g2, 4);
  const auto ab = lambda_apply(lambda_apply(f, SobolevIndex(1.3)), SobolevIndex(-2.9));
  const auto direct = lambda_apply(f, SobolevIndex(-1.6));
  CHECK(testing::coeff_distance(ab, direct) <= 1e-12 * testing::coeff_scale(direct));
}

TEST_CASE("sobolev norm examples") {
  const TorusGrid g(1, 64);
  const auto one = SpectralField::constant(g, 1.0);
  for (double l : {-7.0, -1.0, 0.0, 2.5, 6.0}) CHECK(sobolev_norm(one, SobolevIndex(l)) == doctest::Approx(1.0));
  const auto c = from_fn(g, [](auto x) { return std::cos(x[0]); });
  CHECK(sobolev_norm(c, SobolevIndex(0.0)) == doctest::Approx(0.70710678118654752).epsilon(1e-14));
  // truncated Dirac, oracle computed with 40-digit arithmetic
  const auto delta = synthesize_datum(DiracAt{{0.0}}, g);
  CHECK(sobolev_norm(delta, SobolevIndex(-7.0)) == doctest::Approx(0.16039555927830816).epsilon(1e-13));
}

TEST_CASE("sobolev norm equals ||Lambda^l f||_L2 and is monotone in l") {
  const TorusGrid g(1, 32);
  const auto f = random_field(g, 11, 10);
  double prev = 0.0;
  for (double l = -3.0; l <= 3.0; l += 0.5) {
    const double n = sobolev_norm(f, SobolevIndex(l));
    CHECK(n == doctest::Approx(sobolev_norm(lambda_apply(f, SobolevIndex(l)), SobolevIndex(0.0))).epsilon(1e-13));
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("Plancherel, explicit equivalence, duality and interpolation") {
  for (int d = 1; d <= 2; ++d) {
    const TorusGrid g(d, 16);
    for (unsigned seed = 0; seed < 100; ++seed) {
      const auto f = random_field(g, seed, 7);
      double sum = 0.0;
      for (const auto& c : f.coeffs()) sum += std::norm(c);
      const double l2 = sobolev_norm(f, SobolevIndex(0.0));
      CHECK(std::abs(l2 * l2 - sum) <= 1e-12 * sum);

      const double s = 6.0;
      const double lhs = std::pow(sobolev_norm(gradient(f), SobolevIndex(-s - 1.0)), 2) +
                         std::pow(sobolev_norm(f, SobolevIndex(-s - 1.0)), 2);
      const double rhs = std::pow(sobolev_norm(f, SobolevIndex(-s)), 2);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);

      const auto h = random_field(g, seed + 1000, 7);
      const double pair = std::abs(pairing(f, h));
      CHECK(pair <= std::pow(kTwoPi, d) * sobolev_norm(f, SobolevIndex(-s)) * sobolev_norm(h, SobolevIndex(s)) *
                         (1 + 1e-12));

      const double a = 1.5, b = 4.0;
      const double interp = std::pow(l2, 1.0 - a / b) * std::pow(sobolev_norm(f, SobolevIndex(b)), a / b);
      CHECK(sobolev_norm(f, SobolevIndex(a)) <= interp * (1 + 1e-12));
    }
  }
}

TEST_CASE("gradient, divergence, laplacian") {
  const TorusGrid g(1, 16);
  const auto one = SpectralField::constant(g, 1.0);
  CHECK(testing::coeff_scale(gradient(one)[0]) == 0.0);
  const auto s = from_fn(g, [](auto x) { return std::sin(x[0]); });
  const auto c = from_fn(g, [](auto x) { return std::cos(x[0]); });
  CHECK(testing::coeff_distance(gradient(s)[0], c) < 1e-15);
  CHECK(testing::coeff_distance(laplacian(c), -1.0 * c) < 1e-14);

  const TorusGrid g2(2, 16);
  const auto f = random_field(g2, 3);
  CHECK(testing::coeff_distance(divergence(gradient(f)), laplacian(f)) < 1e-13);
  CHECK_THROWS_AS(partial(f, 2), InputShapeError);
}

TEST_CASE("Nyquist coefficients vanish after differentiation") {
  const TorusGrid g(1, 8);
  std::vector<double> v(8);
  for (int i = 0; i < 8; ++i) v[i] = i % 2 ? -1.0 : 1.0;  // pure Nyquist mode
  const auto f = analyze(g, v);
  CHECK(std::abs(at1(f, -4)) == doctest::Approx(1.0));
  CHECK(testing::coeff_scale(partial(f, 0)) == 0.0);
  CHECK(testing::coeff_scale(drop_nyquist(f)) == 0.0);
}

TEST_CASE("pointwise_apply: identity, cos^2, and domain errors") {
  const TorusGrid g(1, 32);
  const auto f = random_field(g, 9, 8);
  const SpectralField fields[] = {f};
  const auto id = pointwise_apply(fields, [](std::span<const double> in) { return in[0]; });
  CHECK(testing::coeff_distance(id, f) <= 1e-12 * testing::coeff_scale(f));

  const auto c = from_fn(g, [](auto x) { return std::cos(x[0]); });
  const auto c2 = multiply(c, c);
  CHECK(at1(c2, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at1(c2, 2).real() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(at1(c2, -2).real() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::abs(at1(c2, 1)) < 1e-15);

  const SpectralField cf[] = {c};
  try {
    pointwise_apply(cf, [](std::span<const double> in) { return std::log(in[0]); });
    FAIL("expected a domain error");
  } catch (const NonlinearityDomainError& e) {
    CHECK(e.inputs().size() == 1);
    CHECK(e.inputs()[0] <= 0.0);
  }
}

TEST_CASE("dealiased product of band-limited fields is exact") {
  const TorusGrid g(1, 32);
  const auto a = random_field(g, 1, 7);
  const auto b = random_field(g, 2, 8);
  const auto p = multiply(a, b);
  // direct convolution oracle
  std::vector<Complex> conv(g.node_count());
  for (int k1 = -7; k1 <= 7; ++k1) {
    for (int k2 = -8; k2 <= 8; ++k2) {
      const int kk1[1] = {k1}, kk2[1] = {k2};
      conv[g.position(k1 + k2)] += a.at(kk1) * b.at(kk2);
    }
  }
  const SpectralField ref(g, conv);
  CHECK(testing::coeff_distance(p, ref) <= 1e-12 * testing::coeff_scale(ref));
}

TEST_CASE("negative-index product estimate holds with a uniform constant") {
  const TorusGrid g(1, 32);
  double worst = 0.0;
  for (unsigned seed = 0; seed < 50; ++seed) {
    const auto f = random_field(g, seed, 10);
    const auto h = random_field(g, seed + 77, 5);
    const double ratio = sobolev_norm(multiply(f, h), SobolevIndex(-1.0)) /
                         (sobolev_norm(f, SobolevIndex(-1.0)) * sobolev_norm(h, SobolevIndex(1.0)));
    worst = std::max(worst, ratio);
  }
  CHECK(worst < 4.0);
}

TEST_CASE("mollifier") {
  const TorusGrid g(1, 32);
  const auto one = SpectralField::constant(g, 1.0);
  CHECK(testing::coeff_distance(mollify(one, 0.7), one) == 0.0);
  const auto c = from_fn(g, [](auto x) { return std::cos(x[0]); });
  CHECK(at1(mollify(c, 1.0), 1).real() == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
  const auto f = random_field(g, 5, 12);
  double prev = INFINITY;
  for (int j = 0; j < 12; ++j) {
    const double e = sobolev_norm(mollify(f, std::ldexp(1.0, -j)) - f, SobolevIndex(2.0));
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-4 * sobolev_norm(f, SobolevIndex(2.0)));
}

TEST_CASE("zero-mean projection") {
  const TorusGrid g(1, 16);
  CHECK(testing::coeff_scale(project_zero_mean(SpectralField::constant(g, 1.0))) == 0.0);
  const auto c = from_fn(g, [](auto x) { return std::cos(x[0]); });
  const auto one_c = from_fn(g, [](auto x) { return 1.0 + std::cos(x[0]); });
  CHECK(testing::coeff_distance(project_zero_mean(one_c), c) < 1e-15);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto f = random_field(g, seed);
    const auto p = project_zero_mean(f);
    CHECK(project_zero_mean(p) == p);
    CHECK(sobolev_norm(p, SobolevIndex(1.0)) <= sobolev_norm(f, SobolevIndex(1.0)));
  }
}

TEST_CASE("distributional data") {
  const TorusGrid g(1, 64);
  const auto d0 = synthesize_datum(DiracAt{{0.0}}, g);
  for (int k = -31; k <= 31; ++k) CHECK(std::abs(at1(d0, k) - Complex(1.0 / kTwoPi, 0.0)) < 1e-16);
  CHECK(at1(d0, -32) == Complex(0.0, 0.0));
  CHECK(datum_mass(DiracAt{{0.0}}) == 1.0);

  const auto dg = synthesize_datum(DiracGradientAt{{0.0}, 0}, g);
  CHECK(dg.mean_mode() == Complex(0.0, 0.0));
  CHECK(datum_mass(DiracGradientAt{{0.0}, 0}) == 0.0);
  const double y = 1.1;
  const auto dy = synthesize_datum(DiracAt{{y}}, g);
  const auto dgy = synthesize_datum(DiracGradientAt{{y}, 0}, g);
  for (int k = -31; k <= 31; ++k) {
    CHECK(std::abs(at1(dy, k) - std::polar(1.0 / kTwoPi, -k * y)) < 1e-16);
    CHECK(std::abs(at1(dgy, k) - Complex(0.0, k) * at1(dy, k)) < 1e-15);
  }

  // Lipschitz in H^{-7}, exact constant from the 40-digit oracle
  const double lip = 0.019960647453867492;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.3 * i, b = a + 0.01 * (i + 1);
    const double dist =
        sobolev_norm(synthesize_datum(DiracAt{{a}}, g) - synthesize_datum(DiracAt{{b}}, g), SobolevIndex(-7.0));
    CHECK(dist <= lip * std::abs(b - a) * (1 + 1e-12));
  }
}

TEST_CASE("resample zero-pads and truncates") {
  const TorusGrid g(1, 16);
  const auto f = random_field(g, 8, 7);
  const auto up = resample(f, g.refined());
  CHECK(sobolev_norm(up, SobolevIndex(0.0)) == doctest::Approx(sobolev_norm(f, SobolevIndex(0.0))).epsilon(1e-14));
  CHECK(testing::coeff_distance(resample(up, g), f) == 0.0);
}
