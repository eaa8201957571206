#include "mfglab/master.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "mfglab/errors.hpp"
#include "mfglab/parallel.hpp"

namespace mfglab::master {
namespace {

using spectral::SobolevIndex;
using spectral::TorusGrid;

double cell_volume(const TorusGrid& grid) { return std::pow(grid.spacing(), grid.dimension()); }

mfg::TimeGrid time_grid_for(double t0, const MasterConfig& config) {
  return mfg::TimeGrid(t0, config.T, config.n_steps);
}

}  // namespace

MasterEvaluation evaluate_master(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                                 const SpectralField& m0, double t0, const MasterConfig& config) {
  auto [base, diag] = mfg::solve_mfg(ham, payoff, m0, time_grid_for(t0, config), config.solver);
  SpectralField u0 = base.u_path.front();
  return MasterEvaluation{t0, m0, std::move(u0), std::move(base), std::move(diag)};
}

// ------------------------------------------------------------------ Kernel

Kernel::Kernel(double t0, SpectralField m0, std::vector<std::vector<double>> probes,
               std::vector<double> values)
    : t0_(t0), m0_(std::move(m0)), probes_(std::move(probes)), values_(std::move(values)) {
  if (values_.size() != rows() * columns())
    throw InputShapeError("kernel values do not match x grid times probe count");
}

std::vector<double> Kernel::column(std::size_t probe) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, probe);
  return out;
}

bool Kernel::full_grid() const {
  const auto& g = grid();
  if (columns() != g.node_count()) return false;
  std::vector<double> x(static_cast<std::size_t>(g.dimension()));
  for (std::size_t j = 0; j < columns(); ++j) {
    g.node(j, x);
    if (probes_[j].size() != x.size()) return false;
    for (std::size_t a = 0; a < x.size(); ++a) {
      if (std::abs(probes_[j][a] - x[a]) > 1e-12) return false;
    }
  }
  return true;
}

std::vector<double> Kernel::apply(const SpectralField& mu0) const {
  if (!full_grid()) throw UnsupportedGridError("quadrature against K needs the full probe grid");
  const auto mu = spectral::synthesize(spectral::resample(mu0, grid()));
  const double h = cell_volume(grid());
  std::vector<double> out(rows(), 0.0);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < columns(); ++j) out[i] += h * mu[j] * at(i, j);
  }
  return out;
}

Kernel Kernel::normalized() const {
  if (!full_grid()) throw UnsupportedGridError("normalization needs the full probe grid");
  const auto m = spectral::synthesize(m0_);
  const double h = cell_volume(grid());
  std::vector<double> values = values_;
  for (std::size_t i = 0; i < rows(); ++i) {
    double avg = 0.0;
    for (std::size_t j = 0; j < columns(); ++j) avg += h * m[j] * at(i, j);
    for (std::size_t j = 0; j < columns(); ++j) values[i * columns() + j] -= avg;
  }
  return Kernel(t0_, m0_, probes_, std::move(values));
}

std::vector<std::vector<double>> grid_probes(const TorusGrid& grid) {
  std::vector<std::vector<double>> probes(grid.node_count(),
                                          std::vector<double>(static_cast<std::size_t>(grid.dimension())));
  for (std::size_t j = 0; j < probes.size(); ++j) grid.node(j, probes[j]);
  return probes;
}

Kernel extract_kernel(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                      const MasterEvaluation& evaluation,
                      std::vector<std::vector<double>> probes, const MasterConfig& config) {
  const auto& grid = evaluation.m0.grid();
  if (probes.empty()) probes = grid_probes(grid);
  const auto coeffs = linearized::freeze_coefficients(ham, evaluation.base);
  const std::size_t rows = grid.node_count();
  std::vector<double> values(rows * probes.size(), 0.0);

  std::mutex failed_mutex;
  std::vector<std::size_t> failed;
  std::string first_error;
  parallel_for(probes.size(), config.workers, [&](std::size_t j) {
    try {
      auto pair = linearized::solve_linearized(coeffs, payoff, spectral::DiracAt{probes[j]},
                                               config.linear);
      const auto col = spectral::synthesize(pair.v_path.front());
      for (std::size_t i = 0; i < rows; ++i) values[i * probes.size() + j] = col[i];
    } catch (const Error& e) {
      std::lock_guard lock(failed_mutex);
      failed.push_back(j);
      if (first_error.empty()) first_error = e.what();
    }
  });
  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    std::ostringstream msg;
    msg << failed.size() << " of " << probes.size() << " probe solves failed; first: " << first_error;
    throw PartialKernelError(msg.str(), std::move(failed));
  }
  return Kernel(evaluation.t0, evaluation.m0, std::move(probes), std::move(values));
}

Kernel extract_kernel(const HamiltonianSpec& ham, const PayoffSpec& payoff, const SpectralField& m0,
                      double t0, std::vector<std::vector<double>> probes,
                      const MasterConfig& config) {
  const auto evaluation = evaluate_master(ham, payoff, m0, t0, config);
  return extract_kernel(ham, payoff, evaluation, std::move(probes), config);
}

// ------------------------------------------------------------ gradient

WassersteinGradient wasserstein_gradient(const Kernel& kernel) {
  if (!kernel.full_grid())
    throw UnsupportedGridError("Wasserstein gradient needs probes on the full y grid");
  const auto& grid = kernel.grid();
  const int d = grid.dimension();
  const std::size_t rows = kernel.rows(), cols = kernel.columns();
  WassersteinGradient out;
  out.grad.assign(static_cast<std::size_t>(d), std::vector<double>(rows * cols));
  out.divergence.assign(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = spectral::analyze(
        grid, std::span<const double>(kernel.values().data() + i * cols, cols));
    for (int a = 0; a < d; ++a) {
      const auto da = spectral::partial(row, a);
      const auto g = spectral::synthesize(da);
      const auto gg = spectral::synthesize(spectral::partial(da, a));
      for (std::size_t j = 0; j < cols; ++j) {
        out.grad[a][i * cols + j] = g[j];
        out.divergence[i * cols + j] += gg[j];
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ residual

MasterResidual master_residual(const HamiltonianSpec& ham, const MasterEvaluation& evaluation,
                               const SpectralField& u_next, const Kernel& kernel) {
  const auto& grid = evaluation.m0.grid();
  const int d = grid.dimension();
  const std::size_t nodes = grid.node_count();
  const double t0 = evaluation.t0;
  const double dt = evaluation.base.time_grid.dt();
  const SpectralField& u0 = evaluation.u0;
  const auto wgrad = wasserstein_gradient(kernel);

  const auto grad_u = spectral::gradient(u0);
  const auto h = model::h_fields(ham, t0, grad_u, evaluation.m0, model::HSelector::Value);
  const auto dudt = spectral::synthesize((u_next - u0) * (1.0 / dt));
  const auto lap = spectral::synthesize(spectral::laplacian(u0));
  const auto hval = spectral::synthesize(h.fields[0]);

  // D_pH(t0, y, grad U(t0, y), m0(y)) m0(y) at the quadrature nodes
  const auto m = spectral::synthesize(evaluation.m0);
  std::vector<std::vector<double>> du(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) du[a] = spectral::synthesize(grad_u[a]);
  std::vector<std::vector<double>> flux(static_cast<std::size_t>(d), std::vector<double>(nodes));
  std::vector<double> y(d), p(d), g(d);
  for (std::size_t j = 0; j < nodes; ++j) {
    grid.node(j, y);
    for (int a = 0; a < d; ++a) p[a] = du[a][j];
    ham.grad_p(t0, y, p, std::max(m[j], ham.q_domain_floor), g);
    for (int a = 0; a < d; ++a) flux[a][j] = g[a] * m[j];
  }

  const double vol = cell_volume(grid);
  MasterResidual r;
  r.dt = dt;
  r.values.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    double nonlocal = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
      double term = -wgrad.divergence[i * nodes + j] * m[j];
      for (int a = 0; a < d; ++a) term += wgrad.grad[a][i * nodes + j] * flux[a][j];
      nonlocal += vol * term;
    }
    r.values[i] = -dudt[i] - lap[i] + hval[i] + nonlocal;
    r.sup_norm = std::max(r.sup_norm, std::abs(r.values[i]));
    r.time_derivative_sup = std::max(r.time_derivative_sup, std::abs(dudt[i]));
    r.nonlocal_sup = std::max(r.nonlocal_sup, std::abs(nonlocal));
  }
  return r;
}

MasterResidual master_residual(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                               const SpectralField& m0, double t0, const MasterConfig& config) {
  if (config.n_steps < 2) throw ValidationError("master residual needs at least two time steps");
  const auto evaluation = evaluate_master(ham, payoff, m0, t0, config);
  const auto shifted = evaluation.base.time_grid.shifted(1);
  auto [next, diag] = mfg::solve_mfg(ham, payoff, m0, shifted, config.solver);
  const auto kernel = extract_kernel(ham, payoff, evaluation, {}, config);
  return master_residual(ham, evaluation, next.u_path.front(), kernel);
}

// ---------------------------------------------------------- uniqueness

double uniqueness_consistency(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                              const SpectralField& m0, double t0, const MasterConfig& config) {
  const auto tg = time_grid_for(t0, config);
  auto [base, diag] = mfg::solve_mfg(ham, payoff, m0, tg, config.solver);
  const double dt = tg.dt();
  const SobolevIndex h1(1.0);
  SpectralField m = m0;
  double defect = 0.0;
  for (int n = 0; n < tg.n_steps; ++n) {
    auto [path, d] = mfg::solve_mfg(ham, payoff, m, tg.shifted(n), config.solver);
    const SpectralField& u = path.u_path.front();
    defect = std::max(defect, spectral::sobolev_norm(u - base.u_path[n], h1));
    const auto flux = model::drift_flux(ham, tg.time(n), spectral::gradient(u), m);
    m = mfg::heat_propagate(m + dt * spectral::divergence(flux.fields), dt);
  }
  const auto terminal = model::g_eval(payoff, m);
  return std::max(defect, spectral::sobolev_norm(terminal - base.u_path.back(), h1));
}

}  // namespace mfglab::master
