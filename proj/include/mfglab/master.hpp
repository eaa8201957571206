#pragma once

// The master function U(t0, x, m0) := u(t0, x), its measure derivative
// K(t0, x, m0, y) = dU/dm read off from Dirac probes, the Wasserstein
// gradient grad_y K and the pointwise master-equation residual.

#include <cstddef>
#include <vector>

#include "mfglab/linearized.hpp"
#include "mfglab/mfg.hpp"
#include "mfglab/model.hpp"
#include "mfglab/spectral.hpp"

namespace mfglab::master {

using mfg::PathPair;
using model::HamiltonianSpec;
using model::PayoffSpec;
using spectral::SpectralField;

struct MasterConfig {
  double T = 0.1;
  /// Steps over [t0, T]; dt = (T - t0) / n_steps.
  int n_steps = 200;
  mfg::SolverSettings solver;
  linearized::LinearOptions linear;
  unsigned workers = 1;
};

struct MasterEvaluation {
  double t0;
  SpectralField m0;
  SpectralField u0;
  PathPair base;
  mfg::SolveDiagnostics diagnostics;
};

MasterEvaluation evaluate_master(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                                 const SpectralField& m0, double t0, const MasterConfig& config);

class Kernel {
 public:
  /// values: row-major, one row per x node, one column per probe.
  Kernel(double t0, SpectralField m0, std::vector<std::vector<double>> probes,
         std::vector<double> values);

  double t0() const noexcept { return t0_; }
  const SpectralField& m0() const noexcept { return m0_; }
  const spectral::TorusGrid& grid() const noexcept { return m0_.grid(); }
  const std::vector<std::vector<double>>& probes() const noexcept { return probes_; }
  std::size_t rows() const noexcept { return grid().node_count(); }
  std::size_t columns() const noexcept { return probes_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double at(std::size_t x, std::size_t probe) const { return values_[x * columns() + probe]; }
  std::vector<double> column(std::size_t probe) const;
  /// True when probe j sits on grid node j for every node.
  bool full_grid() const;

  /// K - <K, m0>, the variant with zero m0-average in y.
  Kernel normalized() const;
  /// Trapezoid quadrature h^d sum_j mu0(y_j) K(x_i, y_j) on a full-grid kernel.
  std::vector<double> apply(const SpectralField& mu0) const;

 private:
  double t0_;
  SpectralField m0_;
  std::vector<std::vector<double>> probes_;
  std::vector<double> values_;
};

/// Every node of the grid, in flat order.
std::vector<std::vector<double>> grid_probes(const spectral::TorusGrid& grid);

/// Kernel around an existing base; probes empty means the full grid.
Kernel extract_kernel(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                      const MasterEvaluation& evaluation,
                      std::vector<std::vector<double>> probes, const MasterConfig& config);
Kernel extract_kernel(const HamiltonianSpec& ham, const PayoffSpec& payoff, const SpectralField& m0,
                      double t0, std::vector<std::vector<double>> probes,
                      const MasterConfig& config);

struct WassersteinGradient {
  /// grad[a] is d/dy_a K, row-major x by y like Kernel::values.
  std::vector<std::vector<double>> grad;
  /// sum_a d^2/dy_a^2 K.
  std::vector<double> divergence;
};

/// Spectral differentiation along the probe axis; needs a full-grid kernel.
WassersteinGradient wasserstein_gradient(const Kernel& kernel);

struct MasterResidual {
  std::vector<double> values;  // on the x grid
  double sup_norm = 0.0;
  double time_derivative_sup = 0.0;
  double nonlocal_sup = 0.0;
  double dt = 0.0;
};

MasterResidual master_residual(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                               const SpectralField& m0, double t0, const MasterConfig& config);

/// Residual from precomputed pieces: evaluation at t0, value U(t0 + dt, ., m0)
/// and the kernel at t0.
MasterResidual master_residual(const HamiltonianSpec& ham, const MasterEvaluation& evaluation,
                               const SpectralField& u_next, const Kernel& kernel);

/// Evolves m with the drift built from U(t, ., m_t) and returns
/// sup_t ||U(t, ., m_t) - u(t, .)||_{H^1} against the base solution.
double uniqueness_consistency(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                              const SpectralField& m0, double t0, const MasterConfig& config);

}  // namespace mfglab::master
