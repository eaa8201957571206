#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfglab/errors.hpp"
#include "mfglab/model.hpp"
#include "support.hpp"

using namespace mfglab;
using namespace mfglab::model;
using spectral::SobolevIndex;
using testing::from_fn;
using testing::kTwoPi;
using testing::random_field;

namespace {
const TorusGrid kGrid(1, 32);

SpectralField density(double a) {
  return from_fn(kGrid, [a](auto x) { return (1.0 + a * std::cos(x[0])) / kTwoPi; });
}
}  // namespace

TEST_CASE("catalog names and unknown entries") {
  const auto names = hamiltonian_names();
  CHECK(names.size() == 6);
  for (const auto& n : names) CHECK(make_hamiltonian(n).name == n);
  CHECK_THROWS_AS(make_hamiltonian("congestion"), ValidationError);
  CHECK_THROWS_AS(make_payoff("cubic", 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_payoff("tanh", 1.0, 0.0), ValidationError);
}

TEST_CASE("transcendental Hamiltonian at a scalar point") {
  const auto h = make_hamiltonian("transcendental");
  const double x[1] = {0.3}, p[1] = {1.0};
  // sin(1) ln 2, 40-digit oracle
  CHECK(h.eval(0.0, x, p, 1.0) == doctest::Approx(0.58326324064259404).epsilon(1e-15));
}

TEST_CASE("h_fields: transcendental H vanishes at zero momentum") {
  const auto h = make_hamiltonian("transcendental");
  const auto u = SpectralField(kGrid);
  const auto m = SpectralField::constant(kGrid, 1.0 / kTwoPi);
  const auto r = h_fields(h, 0.0, spectral::gradient(u), m, HSelector::Value);
  CHECK(testing::coeff_scale(r.fields[0]) == 0.0);
  CHECK(r.clamped_nodes == 0);
  CHECK(r.total_nodes == kGrid.refined().node_count());
}

TEST_CASE("analytic partials agree with central differences for every built-in") {
  for (const auto& n : hamiltonian_names()) {
    for (int d = 1; d <= 2; ++d) {
      CAPTURE(n);
      CHECK(derivative_check(make_hamiltonian(n), d, 100, 1e-5, 42) <= 1e-6);
    }
  }
}

TEST_CASE("coupled_quadratic composed fields match the closed form") {
  const auto h = make_hamiltonian("coupled_quadratic");
  const auto u = from_fn(kGrid, [](auto x) { return 0.2 * std::sin(x[0]); });
  const auto m = density(0.3);
  const auto val = h_fields(h, 0.0, spectral::gradient(u), m, HSelector::Value).fields[0];
  // H = p^2/2 + p q, exact as a dealiased polynomial of band-limited inputs
  const auto ux = spectral::gradient(u)[0];
  const auto ref = 0.5 * spectral::multiply(ux, ux) + spectral::multiply(ux, m);
  CHECK(testing::coeff_distance(val, ref) < 1e-15);
}

TEST_CASE("density clamping is counted") {
  const auto h = make_hamiltonian("product");
  const auto m = from_fn(kGrid, [](auto x) { return 0.05 + 0.1 * std::cos(x[0]); });
  const auto r = drift_flux(h, 0.0, spectral::gradient(SpectralField(kGrid)), m);
  CHECK(r.clamped_nodes > 0);
  CHECK(r.clamped_nodes < r.total_nodes);
}

TEST_CASE("payoff: uniform density and zero g") {
  const auto pay = make_payoff("tanh", 1.0, 1.0);
  const auto g = g_eval(pay, SpectralField::constant(kGrid, 1.0 / kTwoPi));
  // tanh(1/(2pi)), 40-digit oracle
  CHECK(g.mean_mode().real() == doctest::Approx(0.15782460665934731).epsilon(1e-14));
  CHECK(testing::coeff_scale(spectral::project_zero_mean(g)) < 1e-16);

  const auto zero = make_payoff("constant", 0.0, 1.0);
  CHECK(testing::coeff_scale(g_eval(zero, density(0.3))) == 0.0);
}

TEST_CASE("payoff spectrum decays like the kernel symbol") {
  const auto pay = make_payoff("tanh", 1.0, 1.0);
  const auto g = g_eval(pay, density(0.5));
  const int k0[1] = {0};
  const double bound = std::abs(g.at(k0));  // tanh(m) > 0, so each |coefficient| <= the mean
  for (int k = 1; k < 16; ++k) {
    const int kk[1] = {k};
    CHECK(std::abs(g.at(kk)) <= std::exp(-double(k * k)) * bound * (1 + 1e-12));
  }
}

TEST_CASE("dG/dm: zero, linear symbol, linearity, first order") {
  const auto m = density(0.3);
  const auto pay = make_payoff("tanh", 1.0, 1.0);
  CHECK(testing::coeff_scale(dg_dm_apply(pay, m, SpectralField(kGrid))) == 0.0);

  const auto lin = make_payoff("linear", 1.0, 1.0);
  const auto c = from_fn(kGrid, [](auto x) { return std::cos(x[0]); });
  const auto out = dg_dm_apply(lin, m, c);
  CHECK(testing::coeff_distance(out, std::exp(-1.0) * c) < 1e-16);

  const auto a = random_field(kGrid, 1, 6), b = random_field(kGrid, 2, 6);
  const auto sum = dg_dm_apply(pay, m, 0.7 * a + (-1.3) * b);
  const auto parts = 0.7 * dg_dm_apply(pay, m, a) + (-1.3) * dg_dm_apply(pay, m, b);
  CHECK(testing::coeff_distance(sum, parts) <= 1e-12 * testing::coeff_scale(sum));

  const auto mu = 0.01 * random_field(kGrid, 3, 4);
  std::vector<double> eps, err;
  for (int j = 1; j <= 6; ++j) {
    const double e = std::ldexp(1.0, -j);
    eps.push_back(e);
    err.push_back(spectral::sobolev_norm(g_eval(pay, m + e * mu) - g_eval(pay, m) - e * dg_dm_apply(pay, m, mu),
                                         SobolevIndex(6.0)));
  }
  CHECK(experiments::fit_loglog(eps, err).slope >= 1.95);
}

TEST_CASE("Taylor remainders: zero increments and the separable closed form") {
  const auto u = 0.1 * random_field(kGrid, 5, 4);
  const auto m = density(0.3);
  for (const auto& n : hamiltonian_names()) {
    const auto r = taylor_remainders(make_hamiltonian(n), 0.0, u, u, m, m);
    CHECK(testing::coeff_scale(r.f1) == 0.0);
    CHECK(testing::coeff_scale(r.f2) == 0.0);
  }
  // H = p^2/2 + q: F1 = |grad(u~ - u)|^2 / 2, whatever m~ - m is
  const auto sep = make_hamiltonian("separable");
  const auto ut = u + 0.05 * random_field(kGrid, 6, 4);
  const auto dx = spectral::gradient(ut - u)[0];
  const auto ref = 0.5 * spectral::multiply(dx, dx);
  for (double a : {0.0, 0.2}) {
    const auto r = taylor_remainders(sep, 0.0, u, ut, m, density(a));
    CHECK(testing::coeff_distance(r.f1, ref) < 1e-15);
  }
}

TEST_CASE("remainder eps-slopes for every built-in") {
  const auto u = 0.05 * random_field(kGrid, 7, 3);
  const auto m = density(0.3);
  const auto phi = 0.05 * random_field(kGrid, 8, 3);
  const auto psi = 0.05 * spectral::project_zero_mean(random_field(kGrid, 9, 3));
  std::vector<double> eps;
  for (int j = 2; j <= 8; ++j) eps.push_back(std::ldexp(1.0, -j));
  for (const auto& n : hamiltonian_names()) {
    if (n == "constant") continue;  // remainders vanish identically
    CAPTURE(n);
    const auto sw = remainder_sweep(make_hamiltonian(n), u, m, phi, psi, 1.25, eps);
    CHECK(sw.f1_fit.slope >= 1.9);
    CHECK(sw.f2_fit.slope >= 1.9);
  }
}

TEST_CASE("audit rejects samples outside the radius and reports constants") {
  const auto h = make_hamiltonian("coupled_quadratic");
  const auto pay = make_payoff("tanh", 1.0, 1.0);
  const auto u = 0.01 * random_field(kGrid, 1, 3);
  const auto m = density(0.3);
  std::vector<AuditSample> samples{{u, u + 0.002 * random_field(kGrid, 2, 3), m, m + 0.001 * random_field(kGrid, 3, 3)}};
  AuditSettings settings;
  const auto res = audit_assumptions(h, pay, samples, settings);
  CHECK(res.f1_ratio.size() == 1);
  CHECK(std::isfinite(res.f1_constant));
  CHECK(res.kappa > 0.0);
  CHECK(res.upsilon > 0.0);

  samples.push_back({1000.0 * u, u, m, m});
  CHECK_THROWS_AS(audit_assumptions(h, pay, samples, settings), AuditDomainError);
}
