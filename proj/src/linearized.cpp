#include "mfglab/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfglab/errors.hpp"

namespace mfglab::linearized {
namespace {

using spectral::SobolevIndex;
using spectral::TorusGrid;

std::vector<double> fine_values(const SpectralField& f) {
  return spectral::synthesize(spectral::resample(f, f.grid().refined()));
}

SpectralField from_fine(const TorusGrid& grid, const std::vector<double>& values) {
  return spectral::drop_nyquist(spectral::resample(spectral::analyze(grid.refined(), values), grid));
}

void check_finite(const SpectralField& f, std::size_t index, const char* what) {
  for (const auto& c : f.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream msg;
      msg << what << " blew up at time index " << index;
      throw BlowUpError(msg.str(), index);
    }
  }
}

// One sweep pair of the linear system with data mu0. eps > 0 mollifies the
// coupling sources.
class Sweeper {
 public:
  Sweeper(const FrozenCoefficients& c, const model::PayoffSpec& payoff)
      : c_(c), payoff_(payoff), grid_(c.m_terminal.grid()), d_(grid_.dimension()) {}

  std::vector<SpectralField> backward(const std::vector<SpectralField>& mu, double eps) const {
    const auto steps = static_cast<std::size_t>(c_.time_grid.n_steps);
    const double dt = c_.time_grid.dt();
    std::vector<SpectralField> v(steps + 1, SpectralField(grid_));
    v[steps] = model::dg_dm_apply(payoff_, c_.m_terminal, smooth(mu[steps], eps));
    const std::size_t fine = grid_.refined().node_count();
    std::vector<double> transport(fine), source(fine);
    for (std::size_t n = steps; n-- > 0;) {
      const auto& k = c_.nodal[n + 1];
      std::fill(transport.begin(), transport.end(), 0.0);
      for (int i = 0; i < d_; ++i) {
        const auto dv = fine_values(spectral::partial(v[n + 1], i));
        for (std::size_t j = 0; j < fine; ++j) transport[j] += k.dph[i][j] * dv[j];
      }
      const auto mu_f = fine_values(mu[n + 1]);
      for (std::size_t j = 0; j < fine; ++j) source[j] = k.dqh[j] * mu_f[j];
      SpectralField rhs = from_fine(grid_, transport) + smooth(from_fine(grid_, source), eps);
      v[n] = mfg::heat_propagate(v[n + 1] - dt * rhs, dt);
      check_finite(v[n], n, "linearized value");
    }
    return v;
  }

  std::vector<SpectralField> forward(const std::vector<SpectralField>& v, const SpectralField& mu0,
                                     double eps) const {
    const auto steps = static_cast<std::size_t>(c_.time_grid.n_steps);
    const double dt = c_.time_grid.dt();
    const std::size_t fine = grid_.refined().node_count();
    std::vector<SpectralField> mu;
    mu.reserve(steps + 1);
    mu.push_back(mu0);
    std::vector<std::vector<double>> dv(d_);
    std::vector<double> drift(fine), coupling(fine);
    for (std::size_t n = 0; n < steps; ++n) {
      const auto& k = c_.nodal[n];
      const auto mu_f = fine_values(mu[n]);
      for (int i = 0; i < d_; ++i) dv[i] = fine_values(spectral::partial(v[n], i));
      SpectralField div(grid_);
      for (int i = 0; i < d_; ++i) {
        std::fill(coupling.begin(), coupling.end(), 0.0);
        for (std::size_t j = 0; j < fine; ++j) {
          drift[j] = (k.dph[i][j] + k.m_cross[i][j]) * mu_f[j];
          for (int l = 0; l < d_; ++l) coupling[j] += k.m_hess[i * d_ + l][j] * dv[l][j];
        }
        SpectralField flux = from_fine(grid_, drift) + smooth(from_fine(grid_, coupling), eps);
        div += spectral::partial(flux, i);
      }
      mu.push_back(mfg::heat_propagate(mu[n] + dt * div, dt));
      check_finite(mu.back(), n + 1, "linearized density");
    }
    return mu;
  }

 private:
  static SpectralField smooth(const SpectralField& f, double eps) {
    return eps > 0.0 ? spectral::mollify(f, eps) : f;
  }

  const FrozenCoefficients& c_;
  const model::PayoffSpec& payoff_;
  TorusGrid grid_;
  int d_;
};

double sup_norm_path(const std::vector<SpectralField>& path, double l) {
  double worst = 0.0;
  for (const auto& f : path) worst = std::max(worst, spectral::sobolev_norm(f, SobolevIndex(l)));
  return worst;
}

double sup_diff_path(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b,
                     double l) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, spectral::sobolev_norm(a[i] - b[i], SobolevIndex(l)));
  return worst;
}

double relative(double diff, double scale) {
  if (diff == 0.0) return 0.0;
  return scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
}

}  // namespace

FrozenCoefficients freeze_coefficients(const model::HamiltonianSpec& ham, const PathPair& base) {
  const auto& grid = base.m_path.front().grid();
  const TorusGrid fine = grid.refined();
  const int d = grid.dimension();
  const std::size_t nf = fine.node_count();
  const double floor = ham.q_domain_floor;

  FrozenCoefficients c{base.time_grid, {}, base.m_path.back(), 0, 0, {}};
  c.nodes.reserve(base.m_path.size());
  c.nodal.reserve(base.m_path.size());

  std::vector<double> x(d), p(d), grad(d), hess(d * d), cross(d);
  for (std::size_t n = 0; n < base.m_path.size(); ++n) {
    const double t = base.time_grid.time(static_cast<int>(n));
    std::vector<std::vector<double>> du(d);
    for (int i = 0; i < d; ++i) du[i] = fine_values(spectral::partial(base.u_path[n], i));
    const auto m = fine_values(base.m_path[n]);

    FrozenCoefficients::Nodal k;
    k.dph.assign(d, std::vector<double>(nf));
    k.m_hess.assign(d * d, std::vector<double>(nf));
    k.m_cross.assign(d, std::vector<double>(nf));
    k.dqh.assign(nf, 0.0);
    for (std::size_t j = 0; j < nf; ++j) {
      fine.node(j, x);
      for (int i = 0; i < d; ++i) p[i] = du[i][j];
      const double raw = m[j];
      if (!std::isfinite(raw)) throw DensityDomainError("non-finite density value in base solution");
      const bool clamped = raw < floor;
      const double q = clamped ? floor : raw;
      c.clamped_nodes += clamped;
      ham.grad_p(t, x, p, q, grad);
      ham.hess_pp(t, x, p, q, hess);
      ham.cross_pq(t, x, p, q, cross);
      // Derivatives in q vanish where the density argument is clamped.
      k.dqh[j] = clamped ? 0.0 : ham.d_q(t, x, p, q);
      for (int i = 0; i < d; ++i) {
        k.dph[i][j] = grad[i];
        k.m_cross[i][j] = clamped ? 0.0 : raw * cross[i];
      }
      for (int i = 0; i < d * d; ++i) k.m_hess[i][j] = raw * hess[i];
    }
    c.total_nodes += nf;

    NodeCoefficients fields{{}, from_fine(grid, k.dqh), {}, {}};
    for (int i = 0; i < d; ++i) {
      fields.dph.push_back(from_fine(grid, k.dph[i]));
      fields.m_cross.push_back(from_fine(grid, k.m_cross[i]));
    }
    for (int i = 0; i < d * d; ++i) fields.m_hess.push_back(from_fine(grid, k.m_hess[i]));
    c.nodes.push_back(std::move(fields));
    c.nodal.push_back(std::move(k));
  }
  return c;
}

LinearizedPair solve_linearized(const FrozenCoefficients& coeffs, const model::PayoffSpec& payoff,
                                const DistributionalDatum& datum, const LinearOptions& options) {
  mfg::count_solver_invocation();
  const auto& grid = coeffs.m_terminal.grid();
  const SpectralField mu0 = spectral::synthesize_datum(datum, grid);
  const auto nodes = static_cast<std::size_t>(coeffs.time_grid.n_steps) + 1;
  const double s = options.s;
  Sweeper sweep(coeffs, payoff);

  LinearDiagnostics diag;
  std::vector<SpectralField> mu_path(nodes, mu0);

  // Outer stages on mollified data only seed the final unmollified iteration.
  for (double eps : options.mollify_schedule) {
    const SpectralField data = spectral::mollify(mu0, eps);
    std::vector<SpectralField> staged(nodes, data);
    for (int it = 0; it < options.stage_iterations; ++it) {
      auto v = sweep.backward(staged, eps);
      auto mu_new = sweep.forward(v, data, eps);
      for (std::size_t n = 0; n < nodes; ++n)
        staged[n] = options.damping * mu_new[n] + (1.0 - options.damping) * staged[n];
    }
    // Shift the staged path back onto the exact data.
    for (std::size_t n = 0; n < nodes; ++n) mu_path[n] = staged[n] + (mu0 - data);
  }

  std::vector<SpectralField> v_prev, mu_prev;
  for (int it = 1; it <= options.max_iter; ++it) {
    auto v = sweep.backward(mu_path, 0.0);
    auto mu_new = sweep.forward(v, mu0, 0.0);
    double defect = std::numeric_limits<double>::infinity();
    if (!v_prev.empty()) {
      const double dv = relative(sup_diff_path(v, v_prev, s), sup_norm_path(v, s));
      const double dmu = relative(sup_diff_path(mu_new, mu_prev, s - 1.0), sup_norm_path(mu_new, s - 1.0));
      defect = std::max(dv, dmu);
    }
    diag.defect_history.push_back(defect);
    diag.iterations = it;
    diag.final_defect = defect;
    if (defect <= options.tol) {
      diag.converged = true;
      return LinearizedPair{coeffs.time_grid, std::move(v), std::move(mu_new), datum, diag};
    }
    for (std::size_t n = 0; n < nodes; ++n)
      mu_path[n] = options.damping * mu_new[n] + (1.0 - options.damping) * mu_path[n];
    v_prev = std::move(v);
    mu_prev = std::move(mu_new);
  }
  std::ostringstream msg;
  msg << "linearized coupling did not converge in " << options.max_iter
      << " iterations (last relative defect " << diag.final_defect << ")";
  throw NonConvergenceError(msg.str(), diag.defect_history);
}

NegativeNorms negative_norms(const TimeGrid& time_grid, const std::vector<SpectralField>& v_path,
                             const std::vector<SpectralField>& mu_path, const SpectralField& mu0,
                             double s) {
  const SobolevIndex lv(-s), lmu(-s - 1.0);
  NegativeNorms r;
  r.mu0_norm = spectral::sobolev_norm(mu0, lmu);
  const double dt = time_grid.dt();
  for (std::size_t n = 0; n < v_path.size(); ++n) {
    r.v_sup = std::max(r.v_sup, spectral::sobolev_norm(v_path[n], lv));
    r.mu_sup = std::max(r.mu_sup, spectral::sobolev_norm(mu_path[n], lmu));
    const double w = (n == 0 || n + 1 == v_path.size()) ? 0.5 * dt : dt;
    const double gv = spectral::sobolev_norm(spectral::gradient(v_path[n]), lv);
    const double gm = spectral::sobolev_norm(spectral::gradient(mu_path[n]), lmu);
    r.grad_v_integral += w * gv * gv;
    r.grad_mu_integral += w * gm * gm;
  }
  r.v_ratio = r.v_sup / r.mu0_norm;
  r.mu_ratio = r.mu_sup / r.mu0_norm;
  return r;
}

experiments::StudyReport negative_norm_trace(const LinearizedPair& pair, double s) {
  const SpectralField mu0 = pair.mu_path.front();
  const auto norms = negative_norms(pair.time_grid, pair.v_path, pair.mu_path, mu0, s);
  experiments::StudyReport report("negative_norm_trace", "t");
  report.set_meta("s", s);
  report.set_meta("mu0_norm", norms.mu0_norm);
  report.set_meta("v_sup", norms.v_sup);
  report.set_meta("mu_sup", norms.mu_sup);
  report.set_meta("v_ratio", norms.v_ratio);
  report.set_meta("mu_ratio", norms.mu_ratio);
  report.set_meta("grad_v_integral", norms.grad_v_integral);
  report.set_meta("grad_mu_integral", norms.grad_mu_integral);
  for (std::size_t n = 0; n < pair.v_path.size(); ++n) {
    report.add_row(pair.time_grid.time(static_cast<int>(n)),
                   {{"v_norm", spectral::sobolev_norm(pair.v_path[n], SobolevIndex(-s))},
                    {"mu_norm", spectral::sobolev_norm(pair.mu_path[n], SobolevIndex(-s - 1.0))}});
  }
  return report;
}

}  // namespace mfglab::linearized
