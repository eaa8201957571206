#pragma once

// Hamiltonians H(t, x, p, q) and terminal payoffs G(x, m) = [W * g(m)](x).

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mfglab/report.hpp"
#include "mfglab/spectral.hpp"

namespace mfglab::model {

using spectral::SobolevIndex;
using spectral::SpectralField;
using spectral::TorusGrid;
using spectral::VectorField;

/// Closed-form Hamiltonian with analytic partials in (p, q).
///
/// All callables receive t, the point x (size d), momentum p (size d) and the
/// density value q. Matrix outputs are row-major d x d.
struct HamiltonianSpec {
  using Scalar = std::function<double(double t, std::span<const double> x,
                                      std::span<const double> p, double q)>;
  using Vector = std::function<void(double t, std::span<const double> x,
                                    std::span<const double> p, double q, std::span<double> out)>;

  std::string name;
  std::vector<double> params;
  Scalar eval;
  Vector grad_p;
  Scalar d_q;
  Vector hess_pp;
  Vector cross_pq;
  double q_domain_floor = 1e-8;
  /// True when H does not depend on q (no density coupling in the HJB).
  bool density_free = false;
};

/// Built-in catalog:
///   coupled_quadratic  H = |p|^2/2 + c p_1 q        (params: c = 1)
///   transcendental     H = sin(|p|^2) ln(1 + q^2)
///   separable          H = |p|^2/2 + c q            (params: c = 1)
///   potential          H = |p|^2/2 + c cos x_1      (params: c = 1)
///   product            H = (1 + a cos x_1) |p|^2 q^2 (params: a = 0.5)
///   constant           H = c                        (params: c = 0)
HamiltonianSpec make_hamiltonian(const std::string& name, const std::vector<double>& params = {});
std::vector<std::string> hamiltonian_names();

enum class GChoice { Tanh, Linear, Constant };

/// G(x, m) = [W * g(m)](x) with W_hat(k) = exp(-decay |k|^2).
struct PayoffSpec {
  double decay = 1.0;
  GChoice g_choice = GChoice::Tanh;
  /// tanh: g = tanh(param q); linear: g = param q; constant: g = param.
  double g_param = 1.0;

  double kernel_symbol(double k2) const;
  double g(double q) const;
  double g_prime(double q) const;
  double g_second(double q) const;
  bool density_free() const { return g_choice == GChoice::Constant; }
};

PayoffSpec make_payoff(const std::string& g_name, double g_param, double decay);

enum class HSelector { Value, DqH, GradP, HessPP, CrossPQ };

struct HFieldResult {
  std::vector<SpectralField> fields;
  std::size_t clamped_nodes = 0;
  std::size_t total_nodes = 0;
};

/// Composes the selected derivative of H with (grad u, m) by dealiased
/// pointwise evaluation; density values below the floor are clamped.
HFieldResult h_fields(const HamiltonianSpec& spec, double t, const VectorField& u_grad,
                      const SpectralField& m, HSelector which);

/// Drift flux m * D_pH(t, x, grad u, m), one field per axis. The density
/// argument of D_pH is clamped, the multiplier is the raw density.
HFieldResult drift_flux(const HamiltonianSpec& spec, double t, const VectorField& u_grad,
                        const SpectralField& m);

SpectralField g_eval(const PayoffSpec& spec, const SpectralField& m);
/// (dG/dm)(., m) mu = W * (g'(m) mu).
SpectralField dg_dm_apply(const PayoffSpec& spec, const SpectralField& m, const SpectralField& mu);

/// Taylor remainders of H and of the divergence drift for the increments
/// (u_tilde - u, m_tilde - m).
struct Remainders {
  SpectralField f1;
  SpectralField f2;
};
Remainders taylor_remainders(const HamiltonianSpec& spec, double t, const SpectralField& u,
                             const SpectralField& u_tilde, const SpectralField& m,
                             const SpectralField& m_tilde);

/// Norms ||F1||_{H^r} and ||F2||_{H^{r-1}} along u~ = u + eps phi,
/// m~ = m + eps psi, with their log-log slopes against eps.
struct RemainderSweep {
  std::vector<double> eps;
  std::vector<double> f1_norm;
  std::vector<double> f2_norm;
  experiments::LogLogFit f1_fit;
  experiments::LogLogFit f2_fit;
};
RemainderSweep remainder_sweep(const HamiltonianSpec& spec, const SpectralField& u,
                               const SpectralField& m, const SpectralField& phi,
                               const SpectralField& psi, double r, std::span<const double> eps);

struct AuditSample {
  SpectralField u;
  SpectralField u_tilde;
  SpectralField m;
  SpectralField m_tilde;
};

struct AuditSettings {
  double s = 6.0;
  double r = 1.25;
  double radius = 1.0;
  /// Box |p| <= p_box, q in [0, q_box] sampled for (H3) constants.
  double p_box = 1.0;
  double q_box = 1.0;
  std::size_t lipschitz_samples = 200;
  unsigned seed = 7;
};

struct AuditResult {
  std::vector<double> f1_ratio;  // ||F1||^2 / (||du||^4_{r+1} + ||dm||^4_r)
  std::vector<double> f2_ratio;  // ||F2||^2 / (||du||^4_r + ||dm||^4_{r-1})
  double f1_constant = 0.0;
  double f2_constant = 0.0;
  double kappa = 0.0;
  double upsilon = 0.0;
  std::map<std::string, double> lipschitz;
  std::map<std::string, double> derivative_bounds;
};

AuditResult audit_assumptions(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                              std::span<const AuditSample> samples, const AuditSettings& settings);
experiments::StudyReport audit_report(const HamiltonianSpec& ham, const AuditResult& result,
                                      const AuditSettings& settings);

/// Largest relative mismatch between every analytic partial and central
/// differences with step h, over `count` random points in the audit box.
double derivative_check(const HamiltonianSpec& spec, int d, std::size_t count, double h,
                        unsigned seed);

}  // namespace mfglab::model
