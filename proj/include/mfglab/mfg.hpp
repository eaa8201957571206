#pragma once

// Forward-backward MFG system on the torus:
//   -u_t - Lap u + H(t, x, grad u, m) = 0,   u(T) = G(., m_T)
//    m_t - Lap m - div(m D_pH(t, x, grad u, m)) = 0,   m(t0) = m0
// Lawson-Euler stepping in Fourier space with damped Picard coupling.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mfglab/model.hpp"
#include "mfglab/spectral.hpp"

namespace mfglab::mfg {

using model::HamiltonianSpec;
using model::PayoffSpec;
using spectral::SpectralField;

struct TimeGrid {
  TimeGrid(double t0, double T, int n_steps);

  double t0;
  double T;
  int n_steps;

  double dt() const noexcept { return (T - t0) / n_steps; }
  double time(int i) const noexcept { return t0 + i * dt(); }
  /// Grid starting `shift` steps later with the same dt.
  TimeGrid shifted(int shift) const;
};

struct PathPair {
  TimeGrid time_grid;
  std::vector<SpectralField> u_path;
  std::vector<SpectralField> m_path;
};

struct PicardOptions {
  double tol = 1e-9;
  int max_iter = 200;
  double damping = 0.5;
};

struct SolverSettings {
  PicardOptions picard;
  double s = 6.0;       // Sobolev index of the value function
  double radius = 1.0;  // R of the admissible ball around the uniform density
  double clamp_flag_fraction = 1e-3;
};

struct SolveDiagnostics {
  int picard_iterations = 0;
  double final_defect = 0.0;
  double clamp_fraction = 0.0;
  bool clamp_flagged = false;
  bool converged = false;
  std::vector<double> defect_history;
};

/// Clamp bookkeeping shared by the sweeps.
struct SweepStats {
  std::size_t clamped = 0;
  std::size_t total = 0;
};

SpectralField heat_propagate(const SpectralField& f, double tau);

std::vector<SpectralField> hjb_backward_sweep(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                                              const std::vector<SpectralField>& m_path,
                                              const TimeGrid& time_grid,
                                              SweepStats* stats = nullptr);

std::vector<SpectralField> fp_forward_sweep(const HamiltonianSpec& ham,
                                            const std::vector<SpectralField>& u_path,
                                            const SpectralField& m0, const TimeGrid& time_grid,
                                            SweepStats* stats = nullptr);

/// Uniform density (2pi)^-d.
SpectralField uniform_density(const spectral::TorusGrid& grid);

/// Throws ValidationError when m0 does not have unit mass or leaves Q_R.
void check_initial_density(const SpectralField& m0, const SolverSettings& settings);

std::pair<PathPair, SolveDiagnostics> solve_mfg(const HamiltonianSpec& ham,
                                                const PayoffSpec& payoff, const SpectralField& m0,
                                                const TimeGrid& time_grid,
                                                const SolverSettings& settings);

/// Sup over nodes of |m_hat(0, t) - m_hat(0, t0)|.
double mass_drift(const std::vector<SpectralField>& path);

/// Process-wide count of MFG and linearized solves, for cache instrumentation.
std::uint64_t solver_invocations() noexcept;
void count_solver_invocation() noexcept;

}  // namespace mfglab::mfg
