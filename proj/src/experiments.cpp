#include "mfglab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "mfglab/errors.hpp"
#include "mfglab/linearized.hpp"
#include "mfglab/parallel.hpp"

namespace mfglab::experiments {
namespace {

using spectral::SobolevIndex;
using spectral::TorusGrid;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SpectralField from_nodes(const TorusGrid& grid, auto&& fn) {
  std::vector<double> values(grid.node_count());
  std::vector<double> x(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    grid.node(i, x);
    values[i] = fn(x);
  }
  return spectral::analyze(grid, values);
}

Verdict rate_verdict(const std::string& name, const LogLogFit& fit, double floor, double min_r2) {
  std::ostringstream detail;
  detail << "fit r2=" << format_number(fit.r_squared) << " over " << fit.points << " points";
  Verdict v = judge(name, fit.points >= 2 ? fit.slope : kNaN, ">=", floor, detail.str());
  if (fit.points < 3 || !(fit.r_squared >= min_r2)) {
    v.outcome = Outcome::Inconclusive;
    v.detail += "; needs r2 >= " + format_number(min_r2) + " and 3 points";
  }
  return v;
}

std::string describe(const std::exception& e) {
  std::string s = e.what();
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

SpectralField default_direction(const TorusGrid& grid) {
  return spectral::project_zero_mean(from_nodes(grid, [](const std::vector<double>& x) {
    return std::cos(x[0]) + 0.5 * std::cos(2.0 * x[0] + 1.0);
  }));
}

SpectralField random_direction(const TorusGrid& grid, unsigned seed, int max_mode) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int d = grid.dimension();
  const int cap = std::min(max_mode, grid.modes() / 2 - 1);
  // Sum of a cos(k.x) + b sin(k.x) over a half-lattice of wavenumbers.
  std::vector<std::vector<int>> ks;
  std::vector<int> k(static_cast<std::size_t>(d), -cap);
  while (true) {
    bool positive = false;
    for (int a = 0; a < d; ++a) {
      if (k[a] != 0) {
        positive = k[a] > 0;
        break;
      }
    }
    if (positive) ks.push_back(k);
    int a = d - 1;
    while (a >= 0 && k[a] == cap) k[a--] = -cap;
    if (a < 0) break;
    ++k[a];
  }
  std::vector<std::pair<double, double>> amp;
  for (std::size_t i = 0; i < ks.size(); ++i) amp.emplace_back(normal(rng), normal(rng));
  auto f = from_nodes(grid, [&](const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += ks[i][a] * x[a];
      v += amp[i].first * std::cos(phase) + amp[i].second * std::sin(phase);
    }
    return v;
  });
  f = spectral::project_zero_mean(f);
  return f * (1.0 / spectral::sobolev_norm(f, SobolevIndex(0.0)));
}

double spread(const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool any = false;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) continue;
    any = true;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!any) return kNaN;
  if (hi == 0.0) return 1.0;
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// ------------------------------------------------------------- Taylor

StudyReport taylor_rate_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                              const SpectralField& m0, const SpectralField& chi,
                              const std::vector<double>& eps_list, const MasterConfig& config,
                              const TaylorOptions& options) {
  StudyReport report("taylor_rate", "eps");
  report.set_meta("hamiltonian", ham.name);
  report.set_meta("r", options.r);
  report.set_meta("s", config.solver.s);
  report.set_meta("radius", config.solver.radius);
  report.set_meta("picard_tol", config.solver.picard.tol);
  report.set_meta("fit_window", "excludes the largest eps and points with ||z|| < " +
                                    format_number(options.noise_multiple) + " x picard_tol");

  const mfg::TimeGrid tg(options.t0, config.T, config.n_steps);
  auto [base, base_diag] = mfg::solve_mfg(ham, payoff, m0, tg, config.solver);
  const auto coeffs = linearized::freeze_coefficients(ham, base);
  const auto lin = linearized::solve_linearized(coeffs, payoff, spectral::ZeroMeanField{chi},
                                                config.linear);
  const SpectralField chi0 = lin.mu_path.front();
  const double chi_hm1 = spectral::sobolev_norm(chi0, SobolevIndex(-1.0));
  const double chi_hs = spectral::sobolev_norm(chi0, SobolevIndex(config.solver.s));

  struct Point {
    double eps;
    std::map<std::string, double> values;
    std::string note;
  };
  std::vector<Point> points(eps_list.size());
  parallel_for(eps_list.size(), config.workers, [&](std::size_t i) {
    const double eps = eps_list[i];
    Point& pt = points[i];
    pt.eps = eps;
    pt.values["control_hm1"] = eps * chi_hm1;
    pt.values["control_hs"] = eps * chi_hs;
    try {
      auto [pert, diag] = mfg::solve_mfg(ham, payoff, m0 + eps * chi0, tg, config.solver);
      double z_sup = 0.0, nu_sup = 0.0;
      for (std::size_t n = 0; n < base.u_path.size(); ++n) {
        const auto z = pert.u_path[n] - base.u_path[n] - eps * lin.v_path[n];
        z_sup = std::max(z_sup, spectral::sobolev_norm(z, SobolevIndex(options.r)));
        const auto nu = pert.m_path[n] - base.m_path[n] - eps * lin.mu_path[n];
        nu_sup = std::max(nu_sup, spectral::sobolev_norm(nu, SobolevIndex(options.r - 1.0)));
      }
      const auto& mT = base.m_path.back();
      const auto zT = pert.u_path.back() - base.u_path.back() - eps * lin.v_path.back();
      const auto expected = model::g_eval(payoff, pert.m_path.back()) - model::g_eval(payoff, mT) -
                            model::dg_dm_apply(payoff, mT, eps * lin.mu_path.back());
      pt.values["z_sup"] = z_sup;
      pt.values["nu_sup"] = nu_sup;
      pt.values["terminal_identity_defect"] =
          spectral::sobolev_norm(zT - expected, SobolevIndex(options.r));
      pt.values["picard_iterations"] = diag.picard_iterations;
    } catch (const Error& e) {
      pt.note = "failed: " + describe(e);
    }
  });

  double largest = 0.0;
  for (double e : eps_list) largest = std::max(largest, e);
  const double noise = options.noise_multiple * config.solver.picard.tol;
  std::vector<double> fit_hm1, fit_hs, fit_z;
  for (auto& pt : points) {
    const auto z = pt.values.find("z_sup");
    const bool usable = pt.note.empty() && pt.eps < largest && z != pt.values.end() && z->second >= noise;
    pt.values["in_fit"] = usable ? 1.0 : 0.0;
    if (usable) {
      fit_hm1.push_back(pt.values["control_hm1"]);
      fit_hs.push_back(pt.values["control_hs"]);
      fit_z.push_back(z->second);
    }
    report.add_row(pt.eps, pt.values, pt.note);
  }
  const auto f1 = fit_loglog(fit_hm1, fit_z, "z_vs_hm1");
  const auto f2 = fit_loglog(fit_hs, fit_z, "z_vs_hs");
  report.add_fit(f1);
  report.add_fit(f2);
  report.add_verdict(rate_verdict("slope_hm1", f1, options.slope_floor, options.min_r_squared));
  report.add_verdict(rate_verdict("slope_hs", f2, options.slope_floor, options.min_r_squared));
  return report;
}

// ----------------------------------------------------------- stability

StudyReport stability_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                            const std::vector<StabilityPair>& pairs, const MasterConfig& config,
                            double spread_threshold, double t0) {
  StudyReport report("stability", "parameter");
  report.set_meta("hamiltonian", ham.name);
  const mfg::TimeGrid tg(t0, config.T, config.n_steps);
  struct Point {
    std::map<std::string, double> values;
    std::string note;
  };
  std::vector<Point> points(pairs.size());
  parallel_for(pairs.size(), config.workers, [&](std::size_t i) {
    auto& pt = points[i];
    try {
      auto [a, da] = mfg::solve_mfg(ham, payoff, pairs[i].a, tg, config.solver);
      auto [b, db] = mfg::solve_mfg(ham, payoff, pairs[i].b, tg, config.solver);
      double num = 0.0;
      for (std::size_t n = 0; n < a.u_path.size(); ++n) {
        const double du = spectral::sobolev_norm(a.u_path[n] - b.u_path[n], SobolevIndex(1.0));
        const double dm = spectral::sobolev_norm(a.m_path[n] - b.m_path[n], SobolevIndex(0.0));
        num = std::max(num, du * du + dm * dm);
      }
      const double d0 = spectral::sobolev_norm(pairs[i].a - pairs[i].b, SobolevIndex(0.0));
      pt.values["numerator"] = num;
      pt.values["initial_gap_sq"] = d0 * d0;
      pt.values["ratio"] = num / (d0 * d0);
      if (d0 == 0.0) pt.note = "identical pair";
    } catch (const Error& e) {
      pt.note = "failed: " + describe(e);
    }
  });
  std::vector<double> ratios;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (auto it = points[i].values.find("ratio"); it != points[i].values.end()) ratios.push_back(it->second);
    report.add_row(pairs[i].parameter, points[i].values, points[i].note);
  }
  const double sp = spread(ratios);
  report.set_meta("ratio_spread", sp);
  report.add_verdict(judge("ratio_spread", sp, "<=", spread_threshold));
  return report;
}

// --------------------------------------------------------- H^-s bounds

std::string DatumCase::label() const {
  std::ostringstream s;
  auto list = [&s](const auto& v) {
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
  };
  switch (kind) {
    case Kind::Mode: s << "mode k="; list(k); break;
    case Kind::Dirac: s << "dirac y="; list(y); break;
    case Kind::DiracGradient: s << "dirac_gradient axis=" << axis << " y="; list(y); break;
    case Kind::Zero: s << "zero"; break;
  }
  return s.str();
}

std::vector<DatumCase> default_datum_family(int dimension, int k_min, int k_max, int diracs) {
  std::vector<DatumCase> family;
  for (int k = k_min; k <= k_max; ++k) {
    DatumCase c;
    c.kind = DatumCase::Kind::Mode;
    c.k.assign(static_cast<std::size_t>(dimension), 0);
    c.k[0] = k;
    family.push_back(c);
  }
  for (int j = 0; j < diracs; ++j) {
    DatumCase c;
    c.kind = DatumCase::Kind::Dirac;
    c.y.assign(static_cast<std::size_t>(dimension), 0.0);
    c.y[0] = 2.0 * std::numbers::pi * j / diracs;
    family.push_back(c);
  }
  return family;
}

StudyReport hminus_bound_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                               const SpectralField& m0, const std::vector<DatumCase>& family,
                               const MasterConfig& config, double spread_threshold, double t0) {
  StudyReport report("hminus_bound", "case");
  const double s = config.solver.s;
  report.set_meta("hamiltonian", ham.name);
  report.set_meta("s", s);
  report.set_meta("ratio", "sup_t ||v||_{H^-s} / ||mu0||_{H^-s-1}");
  const auto& grid = m0.grid();
  const mfg::TimeGrid tg(t0, config.T, config.n_steps);
  auto [base, diag] = mfg::solve_mfg(ham, payoff, m0, tg, config.solver);
  const auto coeffs = linearized::freeze_coefficients(ham, base);

  auto solve = [&](const spectral::DistributionalDatum& datum) {
    return linearized::solve_linearized(coeffs, payoff, datum, config.linear);
  };
  // Complex combination a + i b of two real paths.
  auto combine = [](const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
    std::vector<SpectralField> out;
    out.reserve(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
      std::vector<spectral::Complex> c(a[n].data());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += spectral::Complex{0.0, 1.0} * b[n].data()[i];
      out.emplace_back(a[n].grid(), std::move(c));
    }
    return out;
  };

  std::vector<linearized::NegativeNorms> results(family.size());
  std::vector<std::string> notes(family.size());
  parallel_for(family.size(), config.workers, [&](std::size_t i) {
    const auto& c = family[i];
    notes[i] = c.label();
    try {
      switch (c.kind) {
        case DatumCase::Kind::Mode: {
          auto phase = [&c](const std::vector<double>& x) {
            double p = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) p += c.k[a] * x[a];
            return p;
          };
          const auto cosf = from_nodes(grid, [&](const auto& x) { return std::cos(phase(x)); });
          const auto sinf = from_nodes(grid, [&](const auto& x) { return std::sin(phase(x)); });
          const auto re = solve(spectral::ZeroMeanField{cosf});
          const auto im = solve(spectral::ZeroMeanField{sinf});
          const auto v = combine(re.v_path, im.v_path);
          const auto mu = combine(re.mu_path, im.mu_path);
          results[i] = linearized::negative_norms(tg, v, mu, mu.front(), s);
          break;
        }
        case DatumCase::Kind::Dirac: {
          const auto p = solve(spectral::DiracAt{c.y});
          results[i] = linearized::negative_norms(tg, p.v_path, p.mu_path, p.mu_path.front(), s);
          break;
        }
        case DatumCase::Kind::DiracGradient: {
          const auto p = solve(spectral::DiracGradientAt{c.y, c.axis});
          results[i] = linearized::negative_norms(tg, p.v_path, p.mu_path, p.mu_path.front(), s);
          break;
        }
        case DatumCase::Kind::Zero: {
          const auto p = solve(spectral::ZeroMeanField{SpectralField(grid)});
          results[i] = linearized::negative_norms(tg, p.v_path, p.mu_path, p.mu_path.front(), s);
          break;
        }
      }
    } catch (const Error& e) {
      notes[i] += "; failed: " + describe(e);
      results[i].v_ratio = results[i].mu_ratio = kNaN;
    }
  });

  std::vector<double> ratios, mode_ratios;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& r = results[i];
    report.add_row(static_cast<double>(i),
                   {{"mu0_norm", r.mu0_norm},
                    {"v_sup", r.v_sup},
                    {"mu_sup", r.mu_sup},
                    {"v_ratio", r.v_ratio},
                    {"mu_ratio", r.mu_ratio},
                    {"grad_v_integral", r.grad_v_integral},
                    {"grad_mu_integral", r.grad_mu_integral}},
                   notes[i]);
    if (family[i].kind == DatumCase::Kind::Zero) continue;
    ratios.push_back(r.v_ratio);
    if (family[i].kind == DatumCase::Kind::Mode) mode_ratios.push_back(r.v_ratio);
  }
  const double sp = spread(ratios);
  double bound = 0.0;
  for (double r : ratios) {
    if (std::isfinite(r)) bound = std::max(bound, r);
  }
  report.set_meta("ratio_bound", bound);
  report.set_meta("ratio_spread", sp);
  report.add_verdict(judge("ratio_spread", sp, "<=", spread_threshold));
  if (mode_ratios.size() >= 2) {
    std::size_t increases = 0;
    for (std::size_t i = 1; i < mode_ratios.size(); ++i) increases += mode_ratios[i] > mode_ratios[i - 1];
    const double fraction = static_cast<double>(increases) / static_cast<double>(mode_ratios.size() - 1);
    report.add_verdict(judge("mode_growth_fraction", fraction, "<", 1.0,
                             "share of consecutive k with a larger ratio"));
  }
  return report;
}

// ------------------------------------------------------ kernel regularity

KernelQuotients kernel_quotients(const master::Kernel& kernel, double s) {
  if (!kernel.full_grid())
    throw UnsupportedGridError("kernel regularity needs probes on the full y grid");
  const auto& grid = kernel.grid();
  const int d = grid.dimension();
  const std::size_t rows = kernel.rows(), cols = kernel.columns();

  // y-derivatives of K, row by row: first order (d) and second order (d*d).
  std::vector<std::vector<double>> first(d, std::vector<double>(rows * cols));
  std::vector<std::vector<double>> second(d * d, std::vector<double>(rows * cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = spectral::analyze(
        grid, std::span<const double>(kernel.values().data() + i * cols, cols));
    for (int a = 0; a < d; ++a) {
      const auto da = spectral::partial(row, a);
      const auto va = spectral::synthesize(da);
      std::copy(va.begin(), va.end(), first[a].begin() + static_cast<std::ptrdiff_t>(i * cols));
      for (int b = 0; b < d; ++b) {
        const auto vab = spectral::synthesize(spectral::partial(da, b));
        std::copy(vab.begin(), vab.end(), second[a * d + b].begin() + static_cast<std::ptrdiff_t>(i * cols));
      }
    }
  }
  auto column_field = [&](const std::vector<double>& values, std::size_t j, std::size_t j2) {
    std::vector<double> diff(rows);
    for (std::size_t i = 0; i < rows; ++i) diff[i] = values[i * cols + j2] - values[i * cols + j];
    return spectral::sobolev_norm(spectral::analyze(grid, diff), SobolevIndex(-s));
  };
  auto quotient = [&](const std::vector<std::vector<double>>& family, std::size_t j, std::size_t j2) {
    double sum = 0.0;
    for (const auto& f : family) {
      const double n = column_field(f, j, j2);
      sum += n * n;
    }
    return std::sqrt(sum) / grid.spacing();
  };

  const std::vector<std::vector<double>> zeroth{kernel.values()};
  KernelQuotients q;
  std::vector<int> pos(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < cols; ++j) {
    grid.unflatten(j, pos);
    for (int a = 0; a < d; ++a) {
      auto next = pos;
      next[a] = (next[a] + 1) % grid.modes();
      const std::size_t j2 = grid.flatten(next);
      q.y.push_back(kernel.probes()[j][0]);
      q.k.push_back(quotient(zeroth, j, j2));
      q.grad.push_back(quotient(first, j, j2));
      q.hess.push_back(quotient(second, j, j2));
    }
  }
  return q;
}

StudyReport kernel_regularity_study(const master::Kernel& kernel, double s,
                                    double spread_threshold, const master::Kernel* refined,
                                    double refine_tolerance) {
  StudyReport report("kernel_regularity", "y");
  report.set_meta("s", s);
  report.set_meta("probes", static_cast<double>(kernel.columns()));
  const auto q = kernel_quotients(kernel, s);
  for (std::size_t i = 0; i < q.y.size(); ++i)
    report.add_row(q.y[i], {{"k_quotient", q.k[i]}, {"grad_quotient", q.grad[i]}, {"hess_quotient", q.hess[i]}});

  auto max_of = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
  const std::pair<const char*, const std::vector<double>*> families[] = {
      {"k", &q.k}, {"grad", &q.grad}, {"hess", &q.hess}};
  std::optional<KernelQuotients> fine;
  if (refined) {
    fine = kernel_quotients(*refined, s);
    report.set_meta("refined_probes", static_cast<double>(refined->columns()));
  }
  for (const auto& [name, values] : families) {
    const double sp = spread(*values);
    report.set_meta(std::string(name) + "_max", max_of(*values));
    report.set_meta(std::string(name) + "_spread", sp);
    report.add_verdict(judge(std::string(name) + "_spread", sp, "<=", spread_threshold));
    if (fine) {
      const auto& fv = std::string(name) == "k" ? fine->k : std::string(name) == "grad" ? fine->grad : fine->hess;
      const double coarse_max = max_of(*values);
      const double growth = coarse_max > 0.0 ? max_of(fv) / coarse_max : (max_of(fv) == 0.0 ? 1.0 : kNaN);
      report.set_meta(std::string(name) + "_refined_max", max_of(fv));
      report.add_verdict(judge(std::string(name) + "_refinement_growth", growth, "<=", refine_tolerance,
                               "max quotient on the refined probe grid over the coarse one"));
    }
  }
  return report;
}

}  // namespace mfglab::experiments

namespace mfglab::experiments {

StudyReport assumption_audit_study(const HamiltonianSpec& ham, const PayoffSpec& payoff,
                                   const SpectralField& m0, const AuditOptions& options) {
  const auto& grid = m0.grid();
  const SpectralField u = options.amplitude * random_direction(grid, options.seed, 3);
  const SpectralField phi = options.amplitude * random_direction(grid, options.seed + 1, 3);
  const SpectralField psi = options.amplitude * random_direction(grid, options.seed + 2, 3);

  std::vector<model::AuditSample> samples;
  for (int i = 0; i < options.samples; ++i) {
    const double e = std::ldexp(1.0, -i);
    samples.push_back({u, u + e * phi, m0, m0 + e * psi});
  }
  model::AuditSettings settings;
  settings.s = options.s;
  settings.r = options.r;
  settings.radius = options.radius;
  settings.seed = options.seed;
  const auto result = model::audit_assumptions(ham, payoff, samples, settings);
  auto report = model::audit_report(ham, result, settings);

  const auto zero = model::taylor_remainders(ham, 0.0, u, u, m0, m0);
  const double zero_norm = std::max(spectral::sup_norm(zero.f1), spectral::sup_norm(zero.f2));
  report.add_verdict(judge("zero_increment_remainder", zero_norm, "<=", 0.0,
                           "F1, F2 at u~ = u, m~ = m"));

  std::vector<double> eps;
  for (int j = 1; j <= 7; ++j) eps.push_back(std::ldexp(1.0, -j));
  const auto sweep = model::remainder_sweep(ham, u, m0, phi, psi, options.r, eps);
  auto list = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_number(v[i]);
    return out;
  };
  report.set_meta("sweep_eps", list(sweep.eps));
  report.set_meta("sweep_f1_norm", list(sweep.f1_norm));
  report.set_meta("sweep_f2_norm", list(sweep.f2_norm));
  report.add_fit(sweep.f1_fit);
  report.add_fit(sweep.f2_fit);
  const std::pair<const char*, const std::pair<const LogLogFit*, const std::vector<double>*>> fams[] = {
      {"f1_slope", {&sweep.f1_fit, &sweep.f1_norm}}, {"f2_slope", {&sweep.f2_fit, &sweep.f2_norm}}};
  for (const auto& [name, fam] : fams) {
    const auto& [fit, norms] = fam;
    if (*std::max_element(norms->begin(), norms->end()) == 0.0) {
      // H is exactly affine along this family; the remainder is zero at every eps
      // any power of eps bounds a zero remainder
      Verdict v{name, Outcome::Pass, std::numeric_limits<double>::infinity(), ">=",
                options.slope_floor, "remainder vanishes identically"};
      report.add_verdict(std::move(v));
    } else {
      report.add_verdict(rate_verdict(name, *fit, options.slope_floor, 0.98));
    }
  }

  const double dc = model::derivative_check(ham, grid.dimension(), 50, 1e-5, options.seed);
  report.add_verdict(judge("derivative_check", dc, "<=", 1e-6,
                           "analytic partials against central differences, h = 1e-5"));
  return report;
}

}  // namespace mfglab::experiments
