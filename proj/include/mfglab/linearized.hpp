#pragma once

// Linearization of the MFG system around a converged solution (u, m):
//   -v_t - Lap v + D_pH . grad v + d_qH mu = 0,          v(T) = dG/dm(m_T) mu_T
//    mu_t - Lap mu - div(mu D_pH + m D2_ppH grad v + m D_p d_qH mu) = 0,  mu(t0) = mu0
// Coefficients are composed on (grad u, m) and frozen per time node.

#include <cstddef>
#include <vector>

#include "mfglab/mfg.hpp"
#include "mfglab/model.hpp"
#include "mfglab/report.hpp"
#include "mfglab/spectral.hpp"

namespace mfglab::linearized {

using mfg::PathPair;
using mfg::TimeGrid;
using spectral::DistributionalDatum;
using spectral::SpectralField;
using spectral::VectorField;

struct NodeCoefficients {
  VectorField dph;      // D_pH, one field per axis
  SpectralField dqh;    // d_qH
  VectorField m_hess;   // m D2_ppH, row-major d x d
  VectorField m_cross;  // m D_p d_qH
};

struct FrozenCoefficients {
  TimeGrid time_grid;
  std::vector<NodeCoefficients> nodes;
  /// Density at the terminal node, needed for the terminal coupling.
  SpectralField m_terminal;
  std::size_t clamped_nodes = 0;
  std::size_t total_nodes = 0;

  /// Refined-grid nodal values of the coefficients, used by the sweeps.
  struct Nodal {
    std::vector<std::vector<double>> dph, m_hess, m_cross;
    std::vector<double> dqh;
  };
  std::vector<Nodal> nodal;
};

FrozenCoefficients freeze_coefficients(const model::HamiltonianSpec& ham, const PathPair& base);

struct LinearOptions {
  /// Stop once both relative path increments fall below this.
  double tol = 1e-12;
  int max_iter = 200;
  double damping = 0.5;
  /// Mollified outer stages run before the unmollified final stage.
  std::vector<double> mollify_schedule = {0.5, 0.25, 0.125};
  int stage_iterations = 3;
  double s = 6.0;
};

struct LinearDiagnostics {
  int iterations = 0;
  double final_defect = 0.0;
  bool converged = false;
  std::vector<double> defect_history;
};

struct LinearizedPair {
  TimeGrid time_grid;
  std::vector<SpectralField> v_path;
  std::vector<SpectralField> mu_path;
  DistributionalDatum datum;
  LinearDiagnostics diagnostics;
};

LinearizedPair solve_linearized(const FrozenCoefficients& coeffs, const model::PayoffSpec& payoff,
                                const DistributionalDatum& mu0, const LinearOptions& options);

struct NegativeNorms {
  double mu0_norm = 0.0;       // ||mu0||_{H^{-s-1}}
  double v_sup = 0.0;          // sup_t ||v||_{H^{-s}}
  double mu_sup = 0.0;         // sup_t ||mu||_{H^{-s-1}}
  double v_ratio = 0.0;        // v_sup / mu0_norm, NaN when both vanish
  double mu_ratio = 0.0;
  double grad_v_integral = 0.0;   // int ||grad v||^2_{H^{-s}} dt
  double grad_mu_integral = 0.0;  // int ||grad mu||^2_{H^{-s-1}} dt
};

/// Norm trace of v and mu; ratios are 0/0 (NaN) for zero data.
NegativeNorms negative_norms(const TimeGrid& time_grid, const std::vector<SpectralField>& v_path,
                             const std::vector<SpectralField>& mu_path, const SpectralField& mu0,
                             double s);

experiments::StudyReport negative_norm_trace(const LinearizedPair& pair, double s);

}  // namespace mfglab::linearized
