#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfglab/linearized.hpp"
#include "support.hpp"

using namespace mfglab;
using namespace mfglab::linearized;
using spectral::TorusGrid;
using spectral::ZeroMeanField;
using testing::from_fn;
using testing::kTwoPi;

namespace {

const TorusGrid kGrid(1, 32);

SpectralField density(double a) {
  return from_fn(kGrid, [a](auto x) { return (1.0 + a * std::cos(x[0])) / kTwoPi; });
}

PathPair solve_base(const model::HamiltonianSpec& ham, const model::PayoffSpec& pay, const SpectralField& m0,
                    int steps = 50) {
  return mfg::solve_mfg(ham, pay, m0, TimeGrid(0.0, 0.1, steps), mfg::SolverSettings{}).first;
}

struct Fixture {
  model::HamiltonianSpec ham = model::make_hamiltonian("coupled_quadratic");
  model::PayoffSpec pay = model::make_payoff("tanh", 1.0, 1.0);
  PathPair base = solve_base(ham, pay, density(0.3));
  FrozenCoefficients coeffs = freeze_coefficients(ham, base);

  LinearizedPair solve(const spectral::DistributionalDatum& d) const {
    return solve_linearized(coeffs, pay, d, LinearOptions{});
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

double path_scale(const std::vector<SpectralField>& p) {
  double s = 0.0;
  for (const auto& f : p) s = std::max(s, testing::coeff_scale(f));
  return s;
}

// max over nodes of the coefficient distance between a and alpha b + beta c
double combo_gap(const std::vector<SpectralField>& a, double alpha, const std::vector<SpectralField>& b,
                 double beta, const std::vector<SpectralField>& c) {
  double worst = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    worst = std::max(worst, testing::coeff_distance(a[n], alpha * b[n] + beta * c[n]));
  return worst;
}

}  // namespace

TEST_CASE("zero datum gives the zero solution") {
  const auto sol = fixture().solve(ZeroMeanField{SpectralField(kGrid)});
  CHECK(sol.diagnostics.converged);
  CHECK(path_scale(sol.v_path) == 0.0);
  CHECK(path_scale(sol.mu_path) == 0.0);
  const auto nn = negative_norms(sol.time_grid, sol.v_path, sol.mu_path, SpectralField(kGrid), 6.0);
  CHECK(std::isnan(nn.v_ratio));
  CHECK(std::isnan(nn.mu_ratio));
}

TEST_CASE("superposition on smooth zero-mean data") {
  const auto& fx = fixture();
  const auto a = spectral::project_zero_mean(0.1 * testing::random_field(kGrid, 11, 6));
  const auto b = spectral::project_zero_mean(0.1 * testing::random_field(kGrid, 12, 6));
  const double alpha = 0.8, beta = -1.7;
  const auto sa = fx.solve(ZeroMeanField{a}), sb = fx.solve(ZeroMeanField{b});
  const auto sab = fx.solve(ZeroMeanField{alpha * a + beta * b});
  CHECK(combo_gap(sab.v_path, alpha, sa.v_path, beta, sb.v_path) <= 1e-10);
  CHECK(combo_gap(sab.mu_path, alpha, sa.mu_path, beta, sb.mu_path) <= 1e-10);
}

TEST_CASE("superposition on a Dirac pair and on Dirac gradients") {
  const auto& fx = fixture();
  const spectral::DiracAt d1{{0.4}}, d2{{2.9}};
  const auto s1 = fx.solve(d1), s2 = fx.solve(d2);
  const auto pair = fx.solve(ZeroMeanField{spectral::synthesize_datum(d1, kGrid) - spectral::synthesize_datum(d2, kGrid)});
  CHECK(combo_gap(pair.v_path, 1.0, s1.v_path, -1.0, s2.v_path) <= 1e-10);
  CHECK(combo_gap(pair.mu_path, 1.0, s1.mu_path, -1.0, s2.mu_path) <= 1e-10);

  const spectral::DiracGradientAt g1{{1.0}, 0}, g2{{4.0}, 0};
  const auto t1 = fx.solve(g1), t2 = fx.solve(g2);
  const auto both = fx.solve(
      ZeroMeanField{0.5 * spectral::synthesize_datum(g1, kGrid) + 2.0 * spectral::synthesize_datum(g2, kGrid)});
  CHECK(combo_gap(both.v_path, 0.5, t1.v_path, 2.0, t2.v_path) <= 1e-10);
  CHECK(combo_gap(both.mu_path, 0.5, t1.mu_path, 2.0, t2.mu_path) <= 1e-10);
}

TEST_CASE("scaling, terminal coupling and mass of mu") {
  const auto& fx = fixture();
  const auto a = spectral::project_zero_mean(0.1 * testing::random_field(kGrid, 21, 5));
  const auto s1 = fx.solve(ZeroMeanField{a});
  const auto s3 = fx.solve(ZeroMeanField{3.0 * a});
  CHECK(s1.diagnostics.converged);
  CHECK(combo_gap(s3.v_path, 3.0, s1.v_path, 0.0, s1.v_path) <= 1e-10);
  CHECK(combo_gap(s3.mu_path, 3.0, s1.mu_path, 0.0, s1.mu_path) <= 1e-10);

  // v(T) = dG/dm(m_T) mu(T) up to the iteration tolerance
  const auto tv = model::dg_dm_apply(fx.pay, fx.base.m_path.back(), s1.mu_path.back());
  CHECK(testing::coeff_distance(s1.v_path.back(), tv) <= 1e-11 * path_scale(s1.v_path));

  for (const auto& mu : s1.mu_path) CHECK(std::abs(mu.mean_mode()) < 1e-15);
  for (const auto& mu : s1.mu_path) CHECK(spectral::imaginary_defect(mu) < 1e-12);
}

TEST_CASE("a Dirac keeps its unit mass along the flow") {
  const auto sol = fixture().solve(spectral::DiracAt{{1.3}});
  for (const auto& mu : sol.mu_path) CHECK(std::abs(mu.mean_mode().real() - 1.0 / kTwoPi) < 1e-13);
}

TEST_CASE("frozen coefficients: separable has no cross term, D_pH = m at u = 0") {
  const auto sep = model::make_hamiltonian("separable");
  const auto base = solve_base(sep, model::make_payoff("linear", 1.0, 1.0), density(0.3), 20);
  const auto fc = freeze_coefficients(sep, base);
  for (const auto& node : fc.nodes) {
    CHECK(testing::coeff_scale(node.m_cross[0]) == 0.0);
    CHECK(testing::coeff_distance(node.dqh, SpectralField::constant(kGrid, 1.0)) < 1e-15);
  }

  const auto cq = model::make_hamiltonian("coupled_quadratic");
  const TimeGrid tg(0.0, 0.1, 4);
  const auto m = density(0.3);
  const PathPair flat{tg, std::vector<SpectralField>(5, SpectralField(kGrid)), std::vector<SpectralField>(5, m)};
  const auto fq = freeze_coefficients(cq, flat);
  for (const auto& node : fq.nodes) {
    CHECK(testing::coeff_distance(node.dph[0], m) < 1e-15);
    CHECK(testing::coeff_distance(node.m_hess[0], m) < 1e-15);
    CHECK(testing::coeff_distance(node.m_cross[0], m) < 1e-15);
    CHECK(testing::coeff_distance(node.dqh, SpectralField(kGrid)) < 1e-15);  // d_qH = p = 0
  }
}

TEST_CASE("per-mode recursion around the uniform state") {
  // u constant, m = 1/(2pi): each Fourier mode decouples into a 2x2 recursion.
  const auto sep = model::make_hamiltonian("separable", {1.0});
  const auto pay = model::make_payoff("linear", 1.0, 1.0);
  const auto base = solve_base(sep, pay, mfg::uniform_density(kGrid), 40);
  const auto fc = freeze_coefficients(sep, base);
  // independent dense solve of the coupled per-mode system, datum cos(kx) so mu0_hat(k) = 1/2
  const struct {
    int k;
    double v0, muN;
  } oracle[] = {{1, 0.10480548999119521, 0.45037817750771764}, {3, -0.022704393152018096, 0.20415051416007526}};
  for (const auto& o : oracle) {
    CAPTURE(o.k);
    const auto datum = from_fn(kGrid, [k = o.k](auto x) { return std::cos(k * x[0]); });
    const auto sol = solve_linearized(fc, pay, ZeroMeanField{datum}, LinearOptions{});
    CHECK(sol.diagnostics.converged);
    const int kk[1] = {o.k};
    CHECK(sol.v_path.front().at(kk).real() == doctest::Approx(o.v0).epsilon(1e-10));
    CHECK(sol.mu_path.back().at(kk).real() == doctest::Approx(o.muN).epsilon(1e-10));
    CHECK(std::abs(sol.v_path.front().at(kk).imag()) < 1e-15);
    const int other[1] = {o.k + 1};
    CHECK(std::abs(sol.v_path.front().at(other)) < 1e-15);
  }
}
