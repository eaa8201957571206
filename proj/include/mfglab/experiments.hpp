#pragma once

// Parameter sweeps behind the empirical checks: Taylor rate of U in m,
// L2 stability, negative-norm bounds for the linearized system and
// Lipschitz regularity of the kernel in y.

#include <string>
#include <utility>
#include <vector>

#include "mfglab/master.hpp"
#include "mfglab/report.hpp"

namespace mfglab::experiments {

using master::MasterConfig;
using model::HamiltonianSpec;
using model::PayoffSpec;
using spectral::SpectralField;

/// cos(x_1) + 0.5 cos(2 x_1 + 1), zero mean.
SpectralField default_direction(const spectral::TorusGrid& grid);
/// Band-limited zero-mean random field with modes |k_j| <= max_mode and unit L2 norm.
SpectralField random_direction(const spectral::TorusGrid& grid, unsigned seed, int max_mode = 4);

/// Max over min of the finite, nonnegative entries; 1 when all vanish.
double spread(const std::vector<double>& values);

struct TaylorOptions {
  double t0 = 0.0;
  double r = 1.25;
  double slope_floor = 1.25 - 0.05;
  double min_r_squared = 0.98;
  /// Points with sup_t ||z||_{H^r} below this multiple of the Picard tolerance are not fitted.
  double noise_multiple = 100.0;
};

StudyReport taylor_rate_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                              const SpectralField& m0, const SpectralField& chi,
                              const std::vector<double>& eps_list, const MasterConfig& config,
                              const TaylorOptions& options = {});

struct StabilityPair {
  double parameter;
  SpectralField a;
  SpectralField b;
};

StudyReport stability_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                            const std::vector<StabilityPair>& pairs, const MasterConfig& config,
                            double spread_threshold = 3.0, double t0 = 0.0);

struct DatumCase {
  enum class Kind { Mode, Dirac, DiracGradient, Zero };
  Kind kind = Kind::Zero;
  std::vector<int> k;     // Mode: e^{ik.x}
  std::vector<double> y;  // Dirac, DiracGradient
  int axis = 0;

  std::string label() const;
};

/// e^{ikx} for k in [k_min, k_max] along axis 0, then Diracs at `diracs` equispaced points.
std::vector<DatumCase> default_datum_family(int dimension, int k_min, int k_max, int diracs);

StudyReport hminus_bound_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                               const SpectralField& m0, const std::vector<DatumCase>& family,
                               const MasterConfig& config, double spread_threshold = 10.0,
                               double t0 = 0.0);

struct KernelQuotients {
  std::vector<double> y;  // first probe of each adjacent pair (axis-0 coordinate)
  std::vector<double> k, grad, hess;
};

/// Difference quotients ||F(., y') - F(., y)||_{H^-s} / |y' - y| over adjacent
/// probes for F = K, grad_y K, D2_yy K.
KernelQuotients kernel_quotients(const master::Kernel& kernel, double s);

/// refined: optional kernel on a finer probe grid; its max quotients may
/// exceed the coarse ones by at most refine_tolerance.
StudyReport kernel_regularity_study(const master::Kernel& kernel, double s = 6.0,
                                    double spread_threshold = 10.0,
                                    const master::Kernel* refined = nullptr,
                                    double refine_tolerance = 1.25);

struct AuditOptions {
  double s = 6.0;
  double r = 1.25;
  double radius = 1.0;
  int samples = 12;
  double slope_floor = 1.9;
  /// Size of the base u and of the increment directions phi, psi.
  double amplitude = 0.05;
  unsigned seed = 7;
};

/// Remainder audit around (u, m0) with random band-limited u, phi, psi:
/// sample ratios, exact vanishing at zero increments, eps-slopes of F1 and
/// F2, and a finite-difference check of the analytic partials.
StudyReport assumption_audit_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                                   const SpectralField& m0, const AuditOptions& options = {});

}  // namespace mfglab::experiments
