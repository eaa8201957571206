#include "mfglab/mfg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mfglab/errors.hpp"

namespace mfglab::mfg {
namespace {

void check_finite(const SpectralField& f, std::size_t index, const char* what) {
  for (const auto& c : f.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream msg;
      msg << what << " blew up at time index " << index;
      throw BlowUpError(msg.str(), index);
    }
  }
}

double path_defect(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b,
                   double l) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, spectral::sobolev_norm(a[i] - b[i], spectral::SobolevIndex(l)));
  return worst;
}

}  // namespace

TimeGrid::TimeGrid(double t0_, double T_, int n) : t0(t0_), T(T_), n_steps(n) {
  if (!(T > t0)) throw ValidationError("time grid needs T > t0");
  if (n_steps < 1) throw ValidationError("time grid needs at least one step");
}

TimeGrid TimeGrid::shifted(int shift) const {
  const double step = dt();
  return TimeGrid(t0 + shift * step, T, n_steps - shift);
}

SpectralField heat_propagate(const SpectralField& f, double tau) {
  if (tau < 0.0) throw InputShapeError("heat propagation time must be nonnegative");
  if (tau == 0.0) return f;
  return f.apply_real_symbol([tau](double k2) { return std::exp(-k2 * tau); });
}

std::vector<SpectralField> hjb_backward_sweep(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                                              const std::vector<SpectralField>& m_path,
                                              const TimeGrid& time_grid, SweepStats* stats) {
  const auto steps = static_cast<std::size_t>(time_grid.n_steps);
  if (m_path.size() != steps + 1) throw InputShapeError("density path length mismatch");
  const double dt = time_grid.dt();
  std::vector<SpectralField> u(steps + 1, SpectralField(m_path.front().grid()));
  u[steps] = model::g_eval(payoff, m_path[steps]);
  for (std::size_t n = steps; n-- > 0;) {
    auto h = model::h_fields(ham, time_grid.time(static_cast<int>(n + 1)),
                             spectral::gradient(u[n + 1]), m_path[n + 1], model::HSelector::Value);
    if (stats) {
      stats->clamped += h.clamped_nodes;
      stats->total += h.total_nodes;
    }
    u[n] = heat_propagate(u[n + 1] - dt * h.fields[0], dt);
    check_finite(u[n], n, "value function");
  }
  return u;
}

std::vector<SpectralField> fp_forward_sweep(const HamiltonianSpec& ham,
                                            const std::vector<SpectralField>& u_path,
                                            const SpectralField& m0, const TimeGrid& time_grid,
                                            SweepStats* stats) {
  const auto steps = static_cast<std::size_t>(time_grid.n_steps);
  if (u_path.size() != steps + 1) throw InputShapeError("value path length mismatch");
  const double dt = time_grid.dt();
  std::vector<SpectralField> m;
  m.reserve(steps + 1);
  m.push_back(m0);
  for (std::size_t n = 0; n < steps; ++n) {
    auto flux = model::drift_flux(ham, time_grid.time(static_cast<int>(n)),
                                  spectral::gradient(u_path[n]), m[n]);
    if (stats) {
      stats->clamped += flux.clamped_nodes;
      stats->total += flux.total_nodes;
    }
    m.push_back(heat_propagate(m[n] + dt * spectral::divergence(flux.fields), dt));
    check_finite(m.back(), n + 1, "density");
  }
  return m;
}

SpectralField uniform_density(const spectral::TorusGrid& grid) {
  return SpectralField::constant(grid, std::pow(2.0 * std::numbers::pi, -grid.dimension()));
}

void check_initial_density(const SpectralField& m0, const SolverSettings& settings) {
  const double total = spectral::mass(m0);
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "initial density has mass " << total << ", expected 1";
    throw ValidationError(msg.str());
  }
  const double dist =
      spectral::sobolev_norm(m0 - uniform_density(m0.grid()), spectral::SobolevIndex(settings.s));
  if (dist > settings.radius) {
    std::ostringstream msg;
    msg << "initial density lies outside Q_R: ||m0 - m_bar||_{H^" << settings.s << "} = " << dist
        << " > R = " << settings.radius;
    throw ValidationError(msg.str());
  }
}

std::pair<PathPair, SolveDiagnostics> solve_mfg(const HamiltonianSpec& ham,
                                                const PayoffSpec& payoff, const SpectralField& m0,
                                                const TimeGrid& time_grid,
                                                const SolverSettings& settings) {
  count_solver_invocation();
  check_initial_density(m0, settings);
  const auto nodes = static_cast<std::size_t>(time_grid.n_steps) + 1;
  const PicardOptions& opt = settings.picard;
  const bool decoupled = ham.density_free && payoff.density_free();

  std::vector<SpectralField> m_path(nodes, m0);
  std::vector<SpectralField> u_prev, m_prev;
  SolveDiagnostics diag;

  for (int it = 1; it <= opt.max_iter; ++it) {
    SweepStats stats;
    auto u = hjb_backward_sweep(ham, payoff, m_path, time_grid, &stats);
    auto m_new = fp_forward_sweep(ham, u, m0, time_grid, &stats);

    double defect = std::numeric_limits<double>::infinity();
    if (it == 1 && decoupled) {
      defect = 0.0;
    } else if (!u_prev.empty()) {
      defect = path_defect(u, u_prev, settings.s) + path_defect(m_new, m_prev, settings.s - 1.0);
    }
    diag.defect_history.push_back(defect);
    diag.picard_iterations = it;
    diag.final_defect = defect;
    diag.clamp_fraction =
        stats.total ? static_cast<double>(stats.clamped) / static_cast<double>(stats.total) : 0.0;

    if (defect <= opt.tol) {
      diag.converged = true;
      diag.clamp_flagged = diag.clamp_fraction > settings.clamp_flag_fraction;
      return {PathPair{time_grid, std::move(u), std::move(m_new)}, diag};
    }
    for (std::size_t n = 0; n < nodes; ++n)
      m_path[n] = opt.damping * m_new[n] + (1.0 - opt.damping) * m_path[n];
    u_prev = std::move(u);
    m_prev = std::move(m_new);
  }
  std::ostringstream msg;
  msg << "Picard coupling did not converge in " << opt.max_iter << " iterations (last defect "
      << diag.final_defect << "); the horizon may be too long";
  throw NonConvergenceError(msg.str(), diag.defect_history);
}

double mass_drift(const std::vector<SpectralField>& path) {
  double worst = 0.0;
  for (const auto& f : path)
    worst = std::max(worst, std::abs(f.mean_mode() - path.front().mean_mode()));
  return worst;
}

namespace {
std::atomic<std::uint64_t> g_solves{0};
}

std::uint64_t solver_invocations() noexcept { return g_solves.load(); }
void count_solver_invocation() noexcept { ++g_solves; }

}  // namespace mfglab::mfg
