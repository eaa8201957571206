#include "mfglab/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mfglab/errors.hpp"

namespace mfglab::model {
namespace {

double norm2(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return s;
}

double param_or(const std::vector<double>& params, std::size_t i, double fallback) {
  return i < params.size() ? params[i] : fallback;
}

void fill_identity(std::span<double> out, std::size_t d, double scale) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < d; ++i) out[i * d + i] = scale;
}

HamiltonianSpec coupled_quadratic(double c) {
  HamiltonianSpec h;
  h.name = "coupled_quadratic";
  h.params = {c};
  h.density_free = (c == 0.0);
  h.eval = [c](double, std::span<const double>, std::span<const double> p, double q) {
    return 0.5 * norm2(p) + c * p[0] * q;
  };
  h.grad_p = [c](double, std::span<const double>, std::span<const double> p, double q,
                 std::span<double> out) {
    std::copy(p.begin(), p.end(), out.begin());
    out[0] += c * q;
  };
  h.d_q = [c](double, std::span<const double>, std::span<const double> p, double) {
    return c * p[0];
  };
  h.hess_pp = [](double, std::span<const double>, std::span<const double> p, double,
                 std::span<double> out) { fill_identity(out, p.size(), 1.0); };
  h.cross_pq = [c](double, std::span<const double>, std::span<const double>, double,
                   std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = c;
  };
  return h;
}

HamiltonianSpec transcendental() {
  HamiltonianSpec h;
  h.name = "transcendental";
  h.eval = [](double, std::span<const double>, std::span<const double> p, double q) {
    return std::sin(norm2(p)) * std::log1p(q * q);
  };
  h.grad_p = [](double, std::span<const double>, std::span<const double> p, double q,
                std::span<double> out) {
    const double f = 2.0 * std::cos(norm2(p)) * std::log1p(q * q);
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = f * p[i];
  };
  h.d_q = [](double, std::span<const double>, std::span<const double> p, double q) {
    return std::sin(norm2(p)) * 2.0 * q / (1.0 + q * q);
  };
  h.hess_pp = [](double, std::span<const double>, std::span<const double> p, double q,
                 std::span<double> out) {
    const double pp = norm2(p);
    const double l = std::log1p(q * q);
    const std::size_t d = p.size();
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        out[i * d + j] = -4.0 * p[i] * p[j] * std::sin(pp) * l + (i == j ? 2.0 * std::cos(pp) * l : 0.0);
      }
    }
  };
  h.cross_pq = [](double, std::span<const double>, std::span<const double> p, double q,
                  std::span<double> out) {
    const double f = 2.0 * std::cos(norm2(p)) * 2.0 * q / (1.0 + q * q);
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = f * p[i];
  };
  return h;
}

HamiltonianSpec separable(double c) {
  HamiltonianSpec h;
  h.name = "separable";
  h.params = {c};
  h.density_free = (c == 0.0);
  h.eval = [c](double, std::span<const double>, std::span<const double> p, double q) {
    return 0.5 * norm2(p) + c * q;
  };
  h.grad_p = [](double, std::span<const double>, std::span<const double> p, double,
                std::span<double> out) { std::copy(p.begin(), p.end(), out.begin()); };
  h.d_q = [c](double, std::span<const double>, std::span<const double>, double) { return c; };
  h.hess_pp = [](double, std::span<const double>, std::span<const double> p, double,
                 std::span<double> out) { fill_identity(out, p.size(), 1.0); };
  h.cross_pq = [](double, std::span<const double>, std::span<const double>, double,
                  std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  return h;
}

HamiltonianSpec potential(double c) {
  HamiltonianSpec h = separable(0.0);
  h.name = "potential";
  h.params = {c};
  h.eval = [c](double, std::span<const double> x, std::span<const double> p, double) {
    return 0.5 * norm2(p) + c * std::cos(x[0]);
  };
  return h;
}

HamiltonianSpec product(double a) {
  HamiltonianSpec h;
  h.name = "product";
  h.params = {a};
  auto amp = [a](std::span<const double> x) { return 1.0 + a * std::cos(x[0]); };
  h.eval = [amp](double, std::span<const double> x, std::span<const double> p, double q) {
    return amp(x) * norm2(p) * q * q;
  };
  h.grad_p = [amp](double, std::span<const double> x, std::span<const double> p, double q,
                   std::span<double> out) {
    const double f = 2.0 * amp(x) * q * q;
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = f * p[i];
  };
  h.d_q = [amp](double, std::span<const double> x, std::span<const double> p, double q) {
    return 2.0 * amp(x) * norm2(p) * q;
  };
  h.hess_pp = [amp](double, std::span<const double> x, std::span<const double> p, double q,
                    std::span<double> out) { fill_identity(out, p.size(), 2.0 * amp(x) * q * q); };
  h.cross_pq = [amp](double, std::span<const double> x, std::span<const double> p, double q,
                     std::span<double> out) {
    const double f = 4.0 * amp(x) * q;
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = f * p[i];
  };
  return h;
}

HamiltonianSpec constant(double c) {
  HamiltonianSpec h;
  h.name = "constant";
  h.params = {c};
  h.density_free = true;
  h.eval = [c](double, std::span<const double>, std::span<const double>, double) { return c; };
  auto zero_vec = [](double, std::span<const double>, std::span<const double>, double,
                     std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  h.grad_p = zero_vec;
  h.d_q = [](double, std::span<const double>, std::span<const double>, double) { return 0.0; };
  h.hess_pp = zero_vec;
  h.cross_pq = zero_vec;
  return h;
}

}  // namespace

HamiltonianSpec make_hamiltonian(const std::string& name, const std::vector<double>& params) {
  if (name == "coupled_quadratic") return coupled_quadratic(param_or(params, 0, 1.0));
  if (name == "transcendental") return transcendental();
  if (name == "separable") return separable(param_or(params, 0, 1.0));
  if (name == "potential") return potential(param_or(params, 0, 1.0));
  if (name == "product") return product(param_or(params, 0, 0.5));
  if (name == "constant") return constant(param_or(params, 0, 0.0));
  throw ValidationError("unknown hamiltonian '" + name + "'");
}

std::vector<std::string> hamiltonian_names() {
  return {"coupled_quadratic", "transcendental", "separable", "potential", "product", "constant"};
}

// ------------------------------------------------------------------ payoff

double PayoffSpec::kernel_symbol(double k2) const { return std::exp(-decay * k2); }

double PayoffSpec::g(double q) const {
  switch (g_choice) {
    case GChoice::Tanh: return std::tanh(g_param * q);
    case GChoice::Linear: return g_param * q;
    case GChoice::Constant: return g_param;
  }
  return 0.0;
}

double PayoffSpec::g_prime(double q) const {
  switch (g_choice) {
    case GChoice::Tanh: {
      const double th = std::tanh(g_param * q);
      return g_param * (1.0 - th * th);
    }
    case GChoice::Linear: return g_param;
    case GChoice::Constant: return 0.0;
  }
  return 0.0;
}

double PayoffSpec::g_second(double q) const {
  if (g_choice != GChoice::Tanh) return 0.0;
  const double th = std::tanh(g_param * q);
  return -2.0 * g_param * g_param * th * (1.0 - th * th);
}

PayoffSpec make_payoff(const std::string& g_name, double g_param, double decay) {
  PayoffSpec p;
  p.decay = decay;
  p.g_param = g_param;
  if (g_name == "tanh") {
    p.g_choice = GChoice::Tanh;
  } else if (g_name == "linear") {
    p.g_choice = GChoice::Linear;
  } else if (g_name == "constant") {
    p.g_choice = GChoice::Constant;
  } else {
    throw ValidationError("unknown payoff g '" + g_name + "'");
  }
  if (!(decay > 0.0)) throw ValidationError("payoff kernel decay must be positive");
  return p;
}

// ---------------------------------------------------------------- h_fields

HFieldResult h_fields(const HamiltonianSpec& spec, double t, const VectorField& u_grad,
                      const SpectralField& m, HSelector which) {
  const std::size_t d = u_grad.size();
  if (d == 0 || static_cast<int>(d) != m.grid().dimension())
    throw InputShapeError("h_fields: gradient component count differs from dimension");
  std::vector<SpectralField> inputs(u_grad.begin(), u_grad.end());
  inputs.push_back(m);

  std::size_t outputs = 1;
  if (which == HSelector::GradP || which == HSelector::CrossPQ) outputs = d;
  if (which == HSelector::HessPP) outputs = d * d;

  HFieldResult result;
  const double floor = spec.q_domain_floor;
  std::size_t clamped = 0;
  result.fields = spectral::pointwise_apply(
      inputs,
      spectral::PositionalFn([&](std::span<const double> x, std::span<const double> in,
                                 std::span<double> out) {
        double q = in[d];
        if (!std::isfinite(q)) throw DensityDomainError("non-finite density value");
        if (q < floor) {
          q = floor;
          ++clamped;
        }
        const auto p = in.first(d);
        switch (which) {
          case HSelector::Value: out[0] = spec.eval(t, x, p, q); break;
          case HSelector::DqH: out[0] = spec.d_q(t, x, p, q); break;
          case HSelector::GradP: spec.grad_p(t, x, p, q, out); break;
          case HSelector::HessPP: spec.hess_pp(t, x, p, q, out); break;
          case HSelector::CrossPQ: spec.cross_pq(t, x, p, q, out); break;
        }
      }),
      outputs);
  result.clamped_nodes = clamped;
  result.total_nodes = m.grid().refined().node_count();
  return result;
}

HFieldResult drift_flux(const HamiltonianSpec& spec, double t, const VectorField& u_grad,
                        const SpectralField& m) {
  const std::size_t d = u_grad.size();
  if (d == 0 || static_cast<int>(d) != m.grid().dimension())
    throw InputShapeError("drift_flux: gradient component count differs from dimension");
  std::vector<SpectralField> inputs(u_grad.begin(), u_grad.end());
  inputs.push_back(m);
  const double floor = spec.q_domain_floor;
  std::size_t clamped = 0;
  HFieldResult result;
  result.fields = spectral::pointwise_apply(
      inputs,
      spectral::PositionalFn([&](std::span<const double> x, std::span<const double> in,
                                 std::span<double> out) {
        const double raw = in[d];
        if (!std::isfinite(raw)) throw DensityDomainError("non-finite density value");
        double q = raw;
        if (q < floor) {
          q = floor;
          ++clamped;
        }
        spec.grad_p(t, x, in.first(d), q, out);
        for (std::size_t i = 0; i < d; ++i) out[i] *= raw;
      }),
      d);
  result.clamped_nodes = clamped;
  result.total_nodes = m.grid().refined().node_count();
  return result;
}

SpectralField g_eval(const PayoffSpec& spec, const SpectralField& m) {
  const SpectralField in[] = {m};
  SpectralField gm = spectral::pointwise_apply(in, [&spec](std::span<const double> v) {
    return spec.g(v[0]);
  });
  return gm.apply_real_symbol([&spec](double k2) { return spec.kernel_symbol(k2); });
}

SpectralField dg_dm_apply(const PayoffSpec& spec, const SpectralField& m, const SpectralField& mu) {
  const SpectralField in[] = {m, mu};
  SpectralField prod = spectral::pointwise_apply(in, [&spec](std::span<const double> v) {
    return spec.g_prime(v[0]) * v[1];
  });
  return prod.apply_real_symbol([&spec](double k2) { return spec.kernel_symbol(k2); });
}

// -------------------------------------------------------------- remainders

Remainders taylor_remainders(const HamiltonianSpec& spec, double t, const SpectralField& u,
                             const SpectralField& u_tilde, const SpectralField& m,
                             const SpectralField& m_tilde) {
  const std::size_t d = static_cast<std::size_t>(u.grid().dimension());
  VectorField inputs = spectral::gradient(u);
  for (auto& g : spectral::gradient(u_tilde)) inputs.push_back(std::move(g));
  inputs.push_back(m);
  inputs.push_back(m_tilde);

  const double floor = spec.q_domain_floor;
  // outputs: F1, then the d components of the drift remainder R with
  // F2 = -div R.
  auto out_fields = spectral::pointwise_apply(
      inputs,
      spectral::PositionalFn([&](std::span<const double> x, std::span<const double> in,
                                 std::span<double> out) {
        const auto p = in.subspan(0, d);
        const auto pt = in.subspan(d, d);
        const double q = std::max(in[2 * d], floor);
        const double qt = std::max(in[2 * d + 1], floor);
        std::vector<double> dp(d), dpt(d), hess(d * d), cross(d), dgrad(d);
        spec.grad_p(t, x, p, q, dp);
        spec.grad_p(t, x, pt, qt, dpt);
        spec.hess_pp(t, x, p, q, hess);
        spec.cross_pq(t, x, p, q, cross);
        const double dq = qt - q;
        double lin = spec.d_q(t, x, p, q) * dq;
        for (std::size_t i = 0; i < d; ++i) {
          dgrad[i] = pt[i] - p[i];
          lin += dp[i] * dgrad[i];
        }
        out[0] = spec.eval(t, x, pt, qt) - spec.eval(t, x, p, q) - lin;
        for (std::size_t i = 0; i < d; ++i) {
          double hv = 0.0;
          for (std::size_t j = 0; j < d; ++j) hv += hess[i * d + j] * dgrad[j];
          out[1 + i] = qt * dpt[i] - q * dp[i] - dq * dp[i] - q * hv - q * cross[i] * dq;
        }
      }),
      1 + d);
  VectorField drift(out_fields.begin() + 1, out_fields.end());
  return {out_fields[0], spectral::divergence(drift) * -1.0};
}

RemainderSweep remainder_sweep(const HamiltonianSpec& spec, const SpectralField& u,
                               const SpectralField& m, const SpectralField& phi,
                               const SpectralField& psi, double r, std::span<const double> eps) {
  RemainderSweep out;
  for (double e : eps) {
    const auto rem = taylor_remainders(spec, 0.0, u, u + e * phi, m, m + e * psi);
    out.eps.push_back(e);
    out.f1_norm.push_back(sobolev_norm(rem.f1, SobolevIndex(r)));
    out.f2_norm.push_back(sobolev_norm(rem.f2, SobolevIndex(r - 1.0)));
  }
  out.f1_fit = experiments::fit_loglog(out.eps, out.f1_norm, "F1");
  out.f2_fit = experiments::fit_loglog(out.eps, out.f2_norm, "F2");
  return out;
}

// ------------------------------------------------------------------- audit

AuditResult audit_assumptions(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                              std::span<const AuditSample> samples, const AuditSettings& settings) {
  const SobolevIndex r(settings.r);
  const SobolevIndex r1(settings.r + 1.0);
  const SobolevIndex rm1(settings.r - 1.0);
  AuditResult out;

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& smp = samples[i];
    const double radii[] = {sobolev_norm(smp.m, r), sobolev_norm(smp.m_tilde, r),
                            sobolev_norm(smp.u, r1), sobolev_norm(smp.u_tilde, r1)};
    for (double rad : radii) {
      if (rad > settings.radius) {
        std::ostringstream msg;
        msg << "audit sample " << i << " lies outside the radius " << settings.radius
            << " (norm " << rad << ")";
        throw AuditDomainError(msg.str());
      }
    }
    const auto rem = taylor_remainders(ham, 0.0, smp.u, smp.u_tilde, smp.m, smp.m_tilde);
    const SpectralField du = smp.u - smp.u_tilde;
    const SpectralField dm = smp.m - smp.m_tilde;
    const double f1 = std::pow(sobolev_norm(rem.f1, r), 2);
    const double f2 = std::pow(sobolev_norm(rem.f2, rm1), 2);
    const double den1 = std::pow(sobolev_norm(du, r1), 4) + std::pow(sobolev_norm(dm, r), 4);
    const double den2 = std::pow(sobolev_norm(du, r), 4) + std::pow(sobolev_norm(dm, rm1), 4);
    out.f1_ratio.push_back(den1 > 0.0 ? f1 / den1 : 0.0);
    out.f2_ratio.push_back(den2 > 0.0 ? f2 / den2 : 0.0);

    const double dm_l2 = sobolev_norm(dm, SobolevIndex(0.0));
    if (dm_l2 > 0.0) {
      const SpectralField mu = smp.m_tilde - smp.m;
      const double dg = sobolev_norm(dg_dm_apply(payoff, smp.m, mu), SobolevIndex(settings.s));
      const double mu_n = sobolev_norm(mu, SobolevIndex(settings.s - 1.0));
      out.kappa = std::max(out.kappa, dg * dg / (mu_n * mu_n));
      const double lip = sobolev_norm(g_eval(payoff, smp.m) - g_eval(payoff, smp.m_tilde),
                                      SobolevIndex(1.0));
      out.upsilon = std::max(out.upsilon, lip * lip / (dm_l2 * dm_l2));
    }
  }
  for (double v : out.f1_ratio) out.f1_constant = std::max(out.f1_constant, v);
  for (double v : out.f2_ratio) out.f2_constant = std::max(out.f2_constant, v);

  // (H2)/(H3) proxies on a box of (p, q): sup of each partial and its local
  // Lipschitz quotient.
  std::mt19937_64 rng(settings.seed);
  std::uniform_real_distribution<double> pd(-settings.p_box, settings.p_box);
  std::uniform_real_distribution<double> qd(0.0, settings.q_box);
  std::uniform_real_distribution<double> jitter(-1e-2, 1e-2);
  const std::size_t d = 1;
  auto partials = [&](std::span<const double> p, double q) {
    std::vector<double> v;
    const double x[] = {0.0};
    v.push_back(ham.eval(0.0, x, p, q));
    std::vector<double> buf(d * d);
    ham.grad_p(0.0, x, p, q, std::span<double>(buf).first(d));
    v.push_back(buf[0]);
    v.push_back(ham.d_q(0.0, x, p, q));
    ham.hess_pp(0.0, x, p, q, buf);
    v.push_back(buf[0]);
    ham.cross_pq(0.0, x, p, q, std::span<double>(buf).first(d));
    v.push_back(buf[0]);
    return v;
  };
  const char* labels[] = {"H", "DpH", "dqH", "DppH", "DpdqH"};
  std::vector<double> lip(5, 0.0), bound(5, 0.0);
  for (std::size_t i = 0; i < settings.lipschitz_samples; ++i) {
    const double p1[] = {pd(rng)};
    const double q1 = qd(rng);
    const double p2[] = {p1[0] + jitter(rng)};
    const double q2 = std::max(0.0, q1 + jitter(rng));
    const auto a = partials(p1, q1);
    const auto b = partials(p2, q2);
    const double dist = std::abs(p1[0] - p2[0]) + std::abs(q1 - q2);
    for (std::size_t j = 0; j < a.size(); ++j) {
      bound[j] = std::max(bound[j], std::abs(a[j]));
      if (dist > 0.0) lip[j] = std::max(lip[j], std::abs(a[j] - b[j]) / dist);
    }
  }
  for (std::size_t j = 0; j < 5; ++j) {
    out.lipschitz[labels[j]] = lip[j];
    out.derivative_bounds[labels[j]] = bound[j];
  }
  return out;
}

experiments::StudyReport audit_report(const HamiltonianSpec& ham, const AuditResult& result,
                                      const AuditSettings& settings) {
  experiments::StudyReport report("audit-assumptions", "sample");
  report.set_meta("hamiltonian", ham.name);
  report.set_meta("s", settings.s);
  report.set_meta("r", settings.r);
  report.set_meta("radius", settings.radius);
  report.set_meta("f1_constant", result.f1_constant);
  report.set_meta("f2_constant", result.f2_constant);
  report.set_meta("kappa_measured", result.kappa);
  report.set_meta("kappa_used", std::max(1.0, result.kappa));
  report.set_meta("upsilon", result.upsilon);
  for (const auto& [k, v] : result.lipschitz) report.set_meta("lipschitz_" + k, v);
  for (const auto& [k, v] : result.derivative_bounds) report.set_meta("sup_" + k, v);
  report.set_meta("unchecked", "derivative bounds of order > 3 (H2 requires order s+2)");
  for (std::size_t i = 0; i < result.f1_ratio.size(); ++i) {
    report.add_row(static_cast<double>(i),
                   {{"f1_ratio", result.f1_ratio[i]}, {"f2_ratio", result.f2_ratio[i]}});
  }
  return report;
}

// -------------------------------------------------------- derivative check

double derivative_check(const HamiltonianSpec& spec, int d, std::size_t count, double h,
                        unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pd(-1.0, 1.0);
  std::uniform_real_distribution<double> qd(0.05, 1.0);
  std::uniform_real_distribution<double> xd(0.0, 6.283185307179586);
  const auto du = static_cast<std::size_t>(d);
  double worst = 0.0;
  auto record = [&worst](double analytic, double numeric) {
    worst = std::max(worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic)));
  };
  std::vector<double> x(du), p(du), pp(du), pm(du);
  std::vector<double> g(du), gp(du), gm(du), hess(du * du), cross(du);
  for (std::size_t s = 0; s < count; ++s) {
    for (auto& v : x) v = xd(rng);
    for (auto& v : p) v = pd(rng);
    const double q = qd(rng);
    const double t = 0.0;
    spec.grad_p(t, x, p, q, g);
    spec.hess_pp(t, x, p, q, hess);
    spec.cross_pq(t, x, p, q, cross);
    for (std::size_t i = 0; i < du; ++i) {
      pp = p;
      pm = p;
      pp[i] += h;
      pm[i] -= h;
      record(g[i], (spec.eval(t, x, pp, q) - spec.eval(t, x, pm, q)) / (2 * h));
      spec.grad_p(t, x, pp, q, gp);
      spec.grad_p(t, x, pm, q, gm);
      for (std::size_t j = 0; j < du; ++j) record(hess[j * du + i], (gp[j] - gm[j]) / (2 * h));
    }
    record(spec.d_q(t, x, p, q), (spec.eval(t, x, p, q + h) - spec.eval(t, x, p, q - h)) / (2 * h));
    spec.grad_p(t, x, p, q + h, gp);
    spec.grad_p(t, x, p, q - h, gm);
    for (std::size_t j = 0; j < du; ++j) record(cross[j], (gp[j] - gm[j]) / (2 * h));
  }
  return worst;
}

}  // namespace mfglab::model
