#include "mfglab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "mfglab/config.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/experiments.hpp"
#include "mfglab/io.hpp"
#include "mfglab/master.hpp"

namespace mfglab::cli {
namespace {

namespace fs = std::filesystem;
using cache::Artifact;
using cache::ArtifactCache;
using config::RunConfig;
using experiments::StudyReport;
using spectral::SpectralField;

const std::vector<std::pair<std::string, std::string>> kCommandHelp = {
    {"solve-mfg", "solve the coupled HJB / Fokker-Planck system, write u and m paths"},
    {"solve-linearized", "solve the linearized system for linear.datum around the base solution"},
    {"extract-kernel", "K(t0, ., m0, y) on the full probe grid"},
    {"check-master", "pointwise master equation residual, optional refinement and uniqueness checks"},
    {"taylor-rate", "second-order Taylor remainder of U in m"},
    {"stability", "L2 stability ratio over nested initial-density pairs"},
    {"hminus-bound", "negative-norm bounds of the linearized solution over a datum family"},
    {"kernel-regularity", "difference quotients of K and its y-derivatives"},
    {"audit-assumptions", "remainder audit of the Hamiltonian and payoff"},
    {"norms", "Sobolev norms of a reference field"}};

const std::vector<std::string> kCommands = [] {
  std::vector<std::string> names;
  for (const auto& [name, help] : kCommandHelp) names.push_back(name);
  return names;
}();

// Lossless text for doubles kept in cache sidecars.
std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_exact(const std::map<std::string, std::string>& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw CorruptCacheError("cache metadata lacks '" + key + "'");
  if (it->second == "nan") return std::nan("");
  double v = 0.0;
  const auto& s = it->second;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw CorruptCacheError("cache metadata '" + key + "' is not a number");
  return v;
}

/// Canonical entries of the listed sections, the inputs of an artifact key.
std::string section_inputs(const RunConfig& cfg, std::initializer_list<const char*> sections) {
  std::string out;
  for (const auto& [k, v] : config::canonical_entries(cfg)) {
    for (const char* s : sections) {
      if (k.rfind(std::string(s) + ".", 0) == 0) out += k + " = " + v + "\n";
    }
  }
  return out;
}

const char* module_of(const Error& e) {
  if (dynamic_cast<const NonConvergenceError*>(&e) || dynamic_cast<const BlowUpError*>(&e) ||
      dynamic_cast<const DensityDomainError*>(&e))
    return "mfg";
  if (dynamic_cast<const PartialKernelError*>(&e) || dynamic_cast<const UnsupportedGridError*>(&e))
    return "master";
  if (dynamic_cast<const NonlinearityDomainError*>(&e) || dynamic_cast<const AuditDomainError*>(&e))
    return "model";
  if (dynamic_cast<const ValidationError*>(&e)) return "config";
  if (dynamic_cast<const FormatError*>(&e)) return "io";
  if (dynamic_cast<const CorruptCacheError*>(&e)) return "cache";
  if (dynamic_cast<const InputShapeError*>(&e)) return "spectral";
  return "mfglab";
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct Base {
  mfg::PathPair pair;
  mfg::SolveDiagnostics diag;
};

class Session {
 public:
  Session(RunConfig cfg, fs::path out_dir, std::ostream& out, std::ostream& log)
      : cfg_(std::move(cfg)),
        hash_(config::config_hash(cfg_)),
        out_dir_(std::move(out_dir)),
        cache_(cfg_.cache_dir),
        out_(out),
        log_(log) {}

  const std::string& hash() const { return hash_; }
  ArtifactCache& cache() { return cache_; }

  int dispatch(const std::string& command);

 private:
  // ---------------------------------------------------------- artifacts
  Base base_for(const RunConfig& cfg) {
    const auto key = ArtifactCache::make_key(
        "path", section_inputs(cfg, {"grid", "sobolev", "time", "hamiltonian", "payoff", "picard", "density"}));
    const auto art = cache_.get_or_compute(key, "path", [&] {
      log_ << "computing MFG base path\n";
      auto [pair, diag] = mfg::solve_mfg(config::hamiltonian_of(cfg), config::payoff_of(cfg),
                                         config::initial_density(cfg),
                                         mfg::TimeGrid(cfg.t0, cfg.T, cfg.n_steps),
                                         config::master_config_of(cfg).solver);
      Artifact a;
      a.bytes = io::to_bytes(pair.u_path) + io::to_bytes(pair.m_path);
      a.meta = {{"picard_iterations", std::to_string(diag.picard_iterations)},
                {"final_defect", exact(diag.final_defect)},
                {"clamp_fraction", exact(diag.clamp_fraction)}};
      return a;
    });
    std::istringstream in(art.bytes, std::ios::binary);
    Base b{mfg::PathPair{mfg::TimeGrid(cfg.t0, cfg.T, cfg.n_steps), io::read_path(in), io::read_path(in)}, {}};
    b.diag.picard_iterations = static_cast<int>(parse_exact(art.meta, "picard_iterations"));
    b.diag.final_defect = parse_exact(art.meta, "final_defect");
    b.diag.clamp_fraction = parse_exact(art.meta, "clamp_fraction");
    b.diag.converged = true;
    if (b.pair.u_path.size() != static_cast<std::size_t>(cfg.n_steps + 1) ||
        b.pair.m_path.size() != b.pair.u_path.size())
      throw CorruptCacheError("cached base path has the wrong node count");
    return b;
  }

  master::MasterEvaluation evaluation_for(const RunConfig& cfg) {
    auto b = base_for(cfg);
    SpectralField u0 = b.pair.u_path.front();
    return {cfg.t0, config::initial_density(cfg), std::move(u0), std::move(b.pair), b.diag};
  }

  master::Kernel kernel_for(const RunConfig& cfg) {
    const auto key = ArtifactCache::make_key(
        "kernel", section_inputs(cfg, {"grid", "sobolev", "time", "hamiltonian", "payoff", "picard",
                                       "density", "linear"}));
    const auto art = cache_.get_or_compute(key, "kernel", [&] {
      const auto evaluation = evaluation_for(cfg);
      log_ << "extracting kernel on " << evaluation.m0.grid().node_count() << " probes\n";
      const auto k = master::extract_kernel(config::hamiltonian_of(cfg), config::payoff_of(cfg), evaluation,
                                            {}, config::master_config_of(cfg));
      std::ostringstream out(std::ios::binary);
      io::write_kernel(out, {cfg.d, cfg.n, k.columns(), k.values()});
      return Artifact{out.str(), {{"t0", exact(k.t0())}}};
    });
    std::istringstream in(art.bytes, std::ios::binary);
    auto block = io::read_kernel(in);
    const auto grid = config::grid_of(cfg);
    if (block.d != cfg.d || block.n != cfg.n || block.probes != grid.node_count())
      throw CorruptCacheError("cached kernel does not match the configured grid");
    return master::Kernel(parse_exact(art.meta, "t0"), config::initial_density(cfg),
                          master::grid_probes(grid), std::move(block.values));
  }

  /// Report CSV for `command`, cached under the full config hash.
  std::pair<std::string, experiments::Outcome> cached_report(const std::string& command,
                                                             const std::function<StudyReport()>& make) {
    const auto key = ArtifactCache::make_key("report-" + command, hash_);
    const auto art = cache_.get_or_compute(key, "report", [&] {
      auto report = make();
      report.set_meta("config_hash", hash_);
      return Artifact{report.to_csv(), {{"overall", experiments::to_string(report.overall())}}};
    });
    const auto it = art.meta.find("overall");
    const std::string overall = it == art.meta.end() ? "" : it->second;
    auto outcome = experiments::Outcome::Inconclusive;
    if (overall == "pass") outcome = experiments::Outcome::Pass;
    else if (overall == "fail") outcome = experiments::Outcome::Fail;
    return {art.bytes, outcome};
  }

  int emit(const std::string& command, const std::string& csv, experiments::Outcome outcome) {
    const auto path = out_dir_ / (command + ".csv");
    write_file(path, csv);
    out_ << command << ": " << experiments::to_string(outcome) << " -> " << path.string() << '\n';
    log_ << "wrote " << path.string() << " (" << experiments::to_string(outcome) << ")\n";
    return outcome == experiments::Outcome::Fail ? kVerdictFailure : kSuccess;
  }

  int emit(const std::string& command, StudyReport report) {
    report.set_meta("config_hash", hash_);
    return emit(command, report.to_csv(), report.overall());
  }

  // ---------------------------------------------------------- commands
  int solve_mfg_cmd();
  int solve_linearized_cmd();
  int extract_kernel_cmd();
  int check_master_cmd();
  int norms_cmd();
  StudyReport taylor_report();
  StudyReport stability_report();
  StudyReport hminus_report();
  StudyReport kernel_regularity_report();
  StudyReport audit_report();

  RunConfig cfg_;
  std::string hash_;
  fs::path out_dir_;
  ArtifactCache cache_;
  std::ostream& out_;
  std::ostream& log_;
};

int Session::solve_mfg_cmd() {
  const auto b = base_for(cfg_);
  {
    std::ofstream u(out_dir_ / "u_path.mfgp", std::ios::binary);
    io::write_path(u, b.pair.u_path);
    std::ofstream m(out_dir_ / "m_path.mfgp", std::ios::binary);
    io::write_path(m, b.pair.m_path);
  }
  StudyReport report("solve-mfg", "t");
  report.set_meta("picard_iterations", static_cast<double>(b.diag.picard_iterations));
  report.set_meta("final_defect", b.diag.final_defect);
  report.set_meta("clamp_fraction", b.diag.clamp_fraction);
  const double drift = mfg::mass_drift(b.pair.m_path);
  report.set_meta("mass_drift", drift);
  const auto mbar = mfg::uniform_density(config::grid_of(cfg_));
  for (std::size_t n = 0; n < b.pair.u_path.size(); ++n) {
    const auto& u = b.pair.u_path[n];
    const auto& m = b.pair.m_path[n];
    const auto mv = spectral::synthesize(m);
    report.add_row(b.pair.time_grid.time(static_cast<int>(n)),
                   {{"mass", spectral::mass(m)},
                    {"m_min", *std::min_element(mv.begin(), mv.end())},
                    {"m_distance_hs", spectral::sobolev_norm(m - mbar, spectral::SobolevIndex(cfg_.s))},
                    {"u_h1", spectral::sobolev_norm(u, spectral::SobolevIndex(1.0))},
                    {"u_sup", spectral::sup_norm(u)}});
  }
  report.add_verdict(experiments::judge("mass_drift", drift, "<=", 1e-12, "sup_t |m_hat(0, t) - m_hat(0, t0)|"));
  return emit("solve-mfg", std::move(report));
}

int Session::solve_linearized_cmd() {
  const auto datum = config::datum_of(cfg_);
  const auto key = ArtifactCache::make_key(
      "linear", section_inputs(cfg_, {"grid", "sobolev", "time", "hamiltonian", "payoff", "picard",
                                      "density", "linear"}));
  const auto art = cache_.get_or_compute(key, "path", [&] {
    const auto b = base_for(cfg_);
    const auto coeffs = linearized::freeze_coefficients(config::hamiltonian_of(cfg_), b.pair);
    const auto pair = linearized::solve_linearized(coeffs, config::payoff_of(cfg_), datum,
                                                   config::master_config_of(cfg_).linear);
    return Artifact{io::to_bytes(pair.v_path) + io::to_bytes(pair.mu_path),
                    {{"iterations", std::to_string(pair.diagnostics.iterations)},
                     {"final_defect", exact(pair.diagnostics.final_defect)}}};
  });
  std::istringstream in(art.bytes, std::ios::binary);
  linearized::LinearizedPair pair{mfg::TimeGrid(cfg_.t0, cfg_.T, cfg_.n_steps), io::read_path(in),
                                  io::read_path(in), datum, {}};
  pair.diagnostics.iterations = static_cast<int>(parse_exact(art.meta, "iterations"));
  pair.diagnostics.final_defect = parse_exact(art.meta, "final_defect");
  pair.diagnostics.converged = true;
  {
    std::ofstream v(out_dir_ / "v_path.mfgp", std::ios::binary);
    io::write_path(v, pair.v_path);
    std::ofstream mu(out_dir_ / "mu_path.mfgp", std::ios::binary);
    io::write_path(mu, pair.mu_path);
  }
  auto report = linearized::negative_norm_trace(pair, cfg_.s);
  report.set_meta("datum", cfg_.datum);
  report.set_meta("linear_iterations", static_cast<double>(pair.diagnostics.iterations));
  report.set_meta("linear_defect", pair.diagnostics.final_defect);
  const double drift = mfg::mass_drift(pair.mu_path);
  report.set_meta("mass_drift", drift);
  report.add_verdict(experiments::judge("mass_drift", drift, "<=", 1e-12, "sup_t |mu_hat(0, t) - mu_hat(0, t0)|"));
  return emit("solve-linearized", std::move(report));
}

int Session::extract_kernel_cmd() {
  const auto k = kernel_for(cfg_);
  {
    std::ofstream out(out_dir_ / "kernel.mfgk", std::ios::binary);
    io::write_kernel(out, {cfg_.d, cfg_.n, k.columns(), k.values()});
  }
  StudyReport report("extract-kernel", cfg_.d == 1 ? "y" : "probe");
  report.set_meta("t0", k.t0());
  report.set_meta("probes", static_cast<double>(k.columns()));
  const auto grid = k.grid();
  for (std::size_t j = 0; j < k.columns(); ++j) {
    const auto col = k.column(j);
    double sup = 0.0;
    for (double v : col) sup = std::max(sup, std::abs(v));
    const auto f = spectral::analyze(grid, col);
    report.add_row(cfg_.d == 1 ? k.probes()[j][0] : static_cast<double>(j),
                   {{"column_sup", sup},
                    {"column_h_minus_s", spectral::sobolev_norm(f, spectral::SobolevIndex(-cfg_.s))}});
  }
  return emit("extract-kernel", std::move(report));
}

int Session::check_master_cmd() {
  auto [csv, outcome] = cached_report("check-master", [&] {
    const auto ham = config::hamiltonian_of(cfg_);
    const auto payoff = config::payoff_of(cfg_);
    const auto mc = config::master_config_of(cfg_);
    if (cfg_.n_steps < 2) throw ValidationError("check-master needs time.n_steps >= 2");
    const auto evaluation = evaluation_for(cfg_);
    const auto kernel = kernel_for(cfg_);
    auto [next, diag] = mfg::solve_mfg(ham, payoff, evaluation.m0,
                                       evaluation.base.time_grid.shifted(1), mc.solver);
    const auto r = master::master_residual(ham, evaluation, next.u_path.front(), kernel);
    StudyReport report("check-master", cfg_.d == 1 ? "x" : "node");
    report.set_meta("dt", r.dt);
    report.set_meta("sup_norm", r.sup_norm);
    report.set_meta("time_derivative_sup", r.time_derivative_sup);
    report.set_meta("nonlocal_sup", r.nonlocal_sup);
    std::vector<double> x(static_cast<std::size_t>(cfg_.d));
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      kernel.grid().node(i, x);
      report.add_row(cfg_.d == 1 ? x[0] : static_cast<double>(i), {{"residual", r.values[i]}});
    }
    if (cfg_.residual_tolerance > 0.0)
      report.add_verdict(experiments::judge("residual_sup", r.sup_norm, "<=", cfg_.residual_tolerance));
    if (cfg_.master_refine) {
      auto fine_mc = mc;
      fine_mc.n_steps = 2 * mc.n_steps;
      const auto fine = master::master_residual(ham, payoff, evaluation.m0, cfg_.t0, fine_mc);
      report.set_meta("refined_sup_norm", fine.sup_norm);
      const double factor = fine.sup_norm > 0.0 ? r.sup_norm / fine.sup_norm : std::nan("");
      report.add_verdict(experiments::judge("refinement_factor", factor, ">=", 1.8,
                                            "residual decrease when dt is halved"));
    }
    if (cfg_.uniqueness) {
      const double u = master::uniqueness_consistency(ham, payoff, evaluation.m0, cfg_.t0, mc);
      report.set_meta("uniqueness_defect", u);
      report.add_verdict(experiments::judge("uniqueness_defect", u, "<=", 10.0 * cfg_.picard_tol,
                                            "sup_t ||U(t, ., m_t) - u(t)||_H1"));
    }
    return report;
  });
  return emit("check-master", csv, outcome);
}

StudyReport Session::taylor_report() {
  auto cfg = cfg_;
  cfg.radius = cfg_.taylor_radius;
  const auto m0 = config::initial_density(cfg);
  const auto grid = m0.grid();
  const auto chi = cfg.taylor_direction == "random" ? experiments::random_direction(grid, cfg.seed)
                                                    : experiments::default_direction(grid);
  std::vector<double> eps;
  for (int j = cfg.taylor_eps_min; j <= cfg.taylor_eps_max; ++j) eps.push_back(std::ldexp(1.0, -j));
  experiments::TaylorOptions options;
  options.t0 = cfg.t0;
  options.r = cfg.r;
  return experiments::taylor_rate_study(config::hamiltonian_of(cfg), config::payoff_of(cfg), m0, chi, eps,
                                        config::master_config_of(cfg), options);
}

StudyReport Session::stability_report() {
  const auto m0 = config::initial_density(cfg_);
  const auto chi = experiments::default_direction(m0.grid());
  std::vector<experiments::StabilityPair> pairs;
  for (int j = 1; j <= cfg_.stability_j_max; ++j)
    pairs.push_back({static_cast<double>(j), m0, m0 + std::ldexp(cfg_.stability_scale, -j) * chi});
  return experiments::stability_study(config::hamiltonian_of(cfg_), config::payoff_of(cfg_), pairs,
                                      config::master_config_of(cfg_), cfg_.stability_spread, cfg_.t0);
}

StudyReport Session::hminus_report() {
  const auto family = experiments::default_datum_family(cfg_.d, cfg_.hminus_k_min, cfg_.hminus_k_max,
                                                        cfg_.hminus_diracs);
  return experiments::hminus_bound_study(config::hamiltonian_of(cfg_), config::payoff_of(cfg_),
                                         config::initial_density(cfg_), family,
                                         config::master_config_of(cfg_), cfg_.hminus_spread, cfg_.t0);
}

StudyReport Session::kernel_regularity_report() {
  const auto kernel = kernel_for(cfg_);
  std::optional<master::Kernel> refined;
  if (cfg_.kernel_refine_n > 0) {
    auto fine = cfg_;
    fine.n = cfg_.kernel_refine_n;
    refined.emplace(kernel_for(fine));
  }
  return experiments::kernel_regularity_study(kernel, cfg_.s, cfg_.kernel_spread,
                                              refined ? &*refined : nullptr, cfg_.kernel_refine_tolerance);
}

StudyReport Session::audit_report() {
  experiments::AuditOptions options;
  options.s = cfg_.s;
  options.r = cfg_.r;
  options.radius = cfg_.radius;
  options.samples = cfg_.audit_samples;
  options.slope_floor = cfg_.audit_slope_floor;
  options.seed = cfg_.seed;
  return experiments::assumption_audit_study(config::hamiltonian_of(cfg_), config::payoff_of(cfg_),
                                             config::initial_density(cfg_), options);
}

int Session::norms_cmd() {
  const auto grid = config::grid_of(cfg_);
  SpectralField f = cfg_.norms_field == "m0"          ? config::initial_density(cfg_)
                    : cfg_.norms_field == "direction" ? experiments::default_direction(grid)
                                                      : SpectralField::constant(grid, 1.0);
  StudyReport report("norms", "l");
  report.set_meta("field", cfg_.norms_field);
  for (double l : cfg_.norms_indices) {
    const double v = spectral::sobolev_norm(f, spectral::SobolevIndex(l));
    report.add_row(l, {{"norm", v}});
    std::string text = experiments::format_number(v);
    if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
    out_ << "||" << cfg_.norms_field << "||_H^" << experiments::format_number(l) << " = " << text << '\n';
  }
  return emit("norms", std::move(report));
}

int Session::dispatch(const std::string& command) {
  if (command == "solve-mfg") return solve_mfg_cmd();
  if (command == "solve-linearized") return solve_linearized_cmd();
  if (command == "extract-kernel") return extract_kernel_cmd();
  if (command == "check-master") return check_master_cmd();
  if (command == "norms") return norms_cmd();
  std::function<StudyReport()> make;
  if (command == "taylor-rate") make = [this] { return taylor_report(); };
  else if (command == "stability") make = [this] { return stability_report(); };
  else if (command == "hminus-bound") make = [this] { return hminus_report(); };
  else if (command == "kernel-regularity") make = [this] { return kernel_regularity_report(); };
  else if (command == "audit-assumptions") make = [this] { return audit_report(); };
  else throw ValidationError("unknown subcommand " + command);
  auto [csv, outcome] = cached_report(command, make);
  return emit(command, csv, outcome);
}

}  // namespace

std::vector<std::string> subcommands() { return kCommands; }

RunResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunResult result;
  const auto solves_before = mfg::solver_invocations();

  CLI::App app{"mfglab: pseudo-spectral mean field game and master equation lab", "mfglab"};
  std::string config_path, cache_dir, out_dir = "mfglab-out";
  std::vector<std::string> overrides;
  unsigned workers = 0;
  app.add_option("--config", config_path, "INI run configuration");
  app.add_option("--set", overrides, "section.key=value override (repeatable)")->take_all();
  app.add_option("--cache-dir", cache_dir, "artifact cache directory (overrides run.cache_dir)");
  app.add_option("--workers", workers, "worker threads for probe sweeps (overrides run.workers)");
  app.add_option("--out", out_dir, "output directory for CSVs, binaries and run.log");
  app.require_subcommand(1, 1);
  for (const auto& [name, help] : kCommandHelp) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    result.exit_code = code == 0 ? kSuccess : kError;
    return result;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::ofstream log;
  try {
    auto cfg = config::load(config_path, overrides);
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (workers > 0) cfg.workers = workers;
    fs::create_directories(out_dir);
    log.open(fs::path(out_dir) / "run.log", std::ios::trunc);
    const auto started = std::chrono::steady_clock::now();
    Session session(cfg, out_dir, out, log);
    log << "command: " << command << "\nconfig_hash: " << session.hash() << '\n';
    for (const auto& [k, v] : config::canonical_entries(cfg)) log << "config " << k << " = " << v << '\n';
    try {
      result.exit_code = session.dispatch(command);
    } catch (...) {
      result.cache = session.cache().stats();
      throw;
    }
    result.cache = session.cache().stats();
    log << "cache: hits=" << result.cache.hits << " misses=" << result.cache.misses
        << " evictions=" << result.cache.evictions << '\n'
        << "solver_calls: " << mfg::solver_invocations() - solves_before << '\n'
        << "elapsed_s: "
        << std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() << '\n'
        << "exit: " << result.exit_code << '\n';
  } catch (const Error& e) {
    err << "error [" << command << "/" << module_of(e) << "]: " << e.what() << '\n';
    if (log.is_open()) log << "error [" << module_of(e) << "]: " << e.what() << "\nexit: 1\n";
    result.exit_code = kError;
  } catch (const std::exception& e) {
    err << "error [" << command << "]: " << e.what() << '\n';
    if (log.is_open()) log << "error: " << e.what() << "\nexit: 1\n";
    result.exit_code = kError;
  }
  result.solver_calls = mfg::solver_invocations() - solves_before;
  return result;
}

}  // namespace mfglab::cli
