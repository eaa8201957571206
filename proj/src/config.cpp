#include "mfglab/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <variant>

#include "mfglab/errors.hpp"
#include "mfglab/report.hpp"

namespace mfglab::config {
namespace {

using Slot = std::variant<int*, unsigned*, double*, std::string*, bool*, std::vector<double>*>;

struct Field {
  const char* key;
  Slot slot;
  bool numeric;  // participates in the config hash
};

std::vector<Field> fields_of(RunConfig& c) {
  return {
      {"grid.d", &c.d, true},
      {"grid.n", &c.n, true},
      {"sobolev.s", &c.s, true},
      {"sobolev.r", &c.r, true},
      {"time.t0", &c.t0, true},
      {"time.T", &c.T, true},
      {"time.n_steps", &c.n_steps, true},
      {"hamiltonian.name", &c.hamiltonian, true},
      {"hamiltonian.params", &c.hamiltonian_params, true},
      {"payoff.g", &c.g, true},
      {"payoff.g_param", &c.g_param, true},
      {"payoff.decay", &c.decay, true},
      {"picard.tol", &c.picard_tol, true},
      {"picard.max_iter", &c.picard_max_iter, true},
      {"picard.damping", &c.picard_damping, true},
      {"density.radius", &c.radius, true},
      {"density.amplitude", &c.amplitude, true},
      {"density.mode", &c.density_mode, true},
      {"linear.tol", &c.linear_tol, true},
      {"linear.max_iter", &c.linear_max_iter, true},
      {"linear.stage_iterations", &c.linear_stage_iterations, true},
      {"linear.datum", &c.datum, true},
      {"master.residual_tolerance", &c.residual_tolerance, true},
      {"master.uniqueness", &c.uniqueness, true},
      {"master.refine", &c.master_refine, true},
      {"taylor.radius", &c.taylor_radius, true},
      {"taylor.eps_min", &c.taylor_eps_min, true},
      {"taylor.eps_max", &c.taylor_eps_max, true},
      {"taylor.direction", &c.taylor_direction, true},
      {"stability.scale", &c.stability_scale, true},
      {"stability.j_max", &c.stability_j_max, true},
      {"stability.spread", &c.stability_spread, true},
      {"hminus.k_min", &c.hminus_k_min, true},
      {"hminus.k_max", &c.hminus_k_max, true},
      {"hminus.diracs", &c.hminus_diracs, true},
      {"hminus.spread", &c.hminus_spread, true},
      {"kernel.spread", &c.kernel_spread, true},
      {"kernel.refine_n", &c.kernel_refine_n, true},
      {"kernel.refine_tolerance", &c.kernel_refine_tolerance, true},
      {"audit.samples", &c.audit_samples, true},
      {"audit.slope_floor", &c.audit_slope_floor, true},
      {"norms.field", &c.norms_field, true},
      {"norms.indices", &c.norms_indices, true},
      {"run.seed", &c.seed, true},
      {"run.workers", &c.workers, false},
      {"run.cache_dir", &c.cache_dir, false},
  };
}

std::string trim(std::string s) {
  const auto issp = [](unsigned char ch) { return std::isspace(ch) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || end != t.data() + t.size() || t.empty() || !std::isfinite(v))
    throw ValidationError(key + ": '" + text + "' is not a finite number");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || end != t.data() + t.size() || t.empty())
    throw ValidationError(key + ": '" + text + "' is not an integer");
  return v;
}

void assign(const std::string& key, const Slot& slot, const std::string& text) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, int>) {
          *p = static_cast<int>(to_integer(key, text));
        } else if constexpr (std::is_same_v<T, unsigned>) {
          const auto v = to_integer(key, text);
          if (v < 0) throw ValidationError(key + " must be nonnegative");
          *p = static_cast<unsigned>(v);
        } else if constexpr (std::is_same_v<T, double>) {
          *p = to_double(key, text);
        } else if constexpr (std::is_same_v<T, bool>) {
          const auto t = trim(text);
          if (t == "true" || t == "1" || t == "yes") *p = true;
          else if (t == "false" || t == "0" || t == "no") *p = false;
          else throw ValidationError(key + ": '" + text + "' is not a boolean");
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = trim(text);
        } else {
          p->clear();
          std::stringstream ss(text);
          std::string item;
          while (std::getline(ss, item, ',')) {
            if (!trim(item).empty()) p->push_back(to_double(key, item));
          }
        }
      },
      slot);
}

std::string render(const Slot& slot) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return experiments::format_number(*p);
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return *p;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string out;
          for (std::size_t i = 0; i < p->size(); ++i) {
            if (i) out += ',';
            out += experiments::format_number((*p)[i]);
          }
          return out;
        } else {
          return std::to_string(*p);
        }
      },
      slot);
}

RunConfig from_tree(const boost::property_tree::ptree& tree, const std::vector<std::string>& overrides) {
  RunConfig c;
  auto fields = fields_of(c);
  auto find = [&](const std::string& key) -> Field& {
    for (auto& f : fields)
      if (key == f.key) return f;
    throw ValidationError("unknown config key '" + key + "'");
  };
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ValidationError("config key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      assign(full, find(full).slot, value.data());
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + o + "' is not key=value");
    const std::string key = trim(o.substr(0, eq));
    assign(key, find(key).slot, o.substr(eq + 1));
  }
  return c;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

std::string num(double v) { return experiments::format_number(v); }

}  // namespace

RunConfig parse(const std::string& text, const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  auto c = from_tree(tree, overrides);
  validate(c);
  return c;
}

RunConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  if (path.empty()) return parse("", overrides);
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), overrides);
}

int sobolev_floor(int d) {
  const int half = (d + 1) / 2;
  return std::max((d + 5 + 1) / 2 + 1, 4 * half + 1);
}

void validate(const RunConfig& c) {
  require(c.d >= 1 && c.d <= 3, "grid.d must satisfy 1 <= d <= 3");
  require(c.n >= 4 && c.n % 2 == 0, "grid.n must be even and >= 4");
  const int floor = sobolev_floor(c.d);
  require(c.s > floor, "sobolev.s = " + num(c.s) + " violates s > " + std::to_string(floor) +
                           " = max{ceil((d+5)/2)+1, 4 ceil(d/2)+1} for d = " + std::to_string(c.d));
  const int half = (c.d + 1) / 2;
  require(c.r > half, "sobolev.r = " + num(c.r) + " violates r > ceil(d/2) = " + std::to_string(half));
  require(4.0 * c.r + 1.0 <= c.s,
          "sobolev.r = " + num(c.r) + " violates 4r + 1 <= s with s = " + num(c.s));
  require(c.T > c.t0, "time.T must exceed time.t0");
  require(c.n_steps >= 1, "time.n_steps must be >= 1");
  const auto names = model::hamiltonian_names();
  require(std::find(names.begin(), names.end(), c.hamiltonian) != names.end(),
          "hamiltonian.name '" + c.hamiltonian + "' is not a built-in Hamiltonian");
  require(c.g == "tanh" || c.g == "linear" || c.g == "constant",
          "payoff.g must be tanh, linear or constant");
  require(c.decay > 0.0, "payoff.decay must be > 0");
  require(c.picard_tol > 0.0, "picard.tol must be > 0");
  require(c.picard_max_iter >= 1, "picard.max_iter must be >= 1");
  require(c.picard_damping > 0.0 && c.picard_damping <= 1.0, "picard.damping must lie in (0, 1]");
  require(c.radius > 0.0, "density.radius must be > 0");
  require(std::abs(c.amplitude) < 1.0, "density.amplitude must satisfy |a| < 1 to keep m0 positive");
  require(c.density_mode >= 1 && c.density_mode < c.n / 2, "density.mode must satisfy 1 <= mode < n/2");
  require(c.linear_tol > 0.0 && c.linear_max_iter >= 1 && c.linear_stage_iterations >= 0,
          "linear.tol > 0, linear.max_iter >= 1, linear.stage_iterations >= 0 required");
  require(c.residual_tolerance >= 0.0, "master.residual_tolerance must be >= 0");
  require(c.taylor_radius > 0.0, "taylor.radius must be > 0");
  require(c.taylor_eps_min >= 0 && c.taylor_eps_max >= c.taylor_eps_min + 2,
          "taylor needs 0 <= eps_min and eps_max >= eps_min + 2");
  require(c.taylor_direction == "default" || c.taylor_direction == "random",
          "taylor.direction must be default or random");
  require(c.stability_scale > 0.0 && c.stability_j_max >= 2, "stability.scale > 0 and j_max >= 2 required");
  require(c.hminus_k_min >= 1 && c.hminus_k_max >= c.hminus_k_min && c.hminus_k_max < c.n / 2,
          "hminus needs 1 <= k_min <= k_max < n/2");
  require(c.hminus_diracs >= 0, "hminus.diracs must be >= 0");
  require(c.kernel_refine_n == 0 || (c.kernel_refine_n > c.n && c.kernel_refine_n % 2 == 0),
          "kernel.refine_n must be 0 or an even count above grid.n");
  require(c.audit_samples >= 1, "audit.samples must be >= 1");
  require(c.norms_field == "one" || c.norms_field == "m0" || c.norms_field == "direction",
          "norms.field must be one, m0 or direction");
  require(c.workers >= 1, "run.workers must be >= 1");
}

std::vector<std::pair<std::string, std::string>> canonical_entries(const RunConfig& config) {
  RunConfig copy = config;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields_of(copy)) out.emplace_back(f.key, render(f.slot));
  std::sort(out.begin(), out.end());
  return out;
}

std::string config_hash(const RunConfig& config) {
  RunConfig copy = config;
  std::set<std::string> numeric;
  for (const auto& f : fields_of(copy))
    if (f.numeric) numeric.insert(f.key);
  std::string text;
  for (const auto& [k, v] : canonical_entries(config)) {
    if (numeric.count(k)) text += k + " = " + v + "\n";
  }
  return sha256_hex(text);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

spectral::TorusGrid grid_of(const RunConfig& c) { return spectral::TorusGrid(c.d, c.n); }

model::HamiltonianSpec hamiltonian_of(const RunConfig& c) {
  return model::make_hamiltonian(c.hamiltonian, c.hamiltonian_params);
}

model::PayoffSpec payoff_of(const RunConfig& c) { return model::make_payoff(c.g, c.g_param, c.decay); }

master::MasterConfig master_config_of(const RunConfig& c) {
  master::MasterConfig m;
  m.T = c.T;
  m.n_steps = c.n_steps;
  m.solver.picard = {c.picard_tol, c.picard_max_iter, c.picard_damping};
  m.solver.s = c.s;
  m.solver.radius = c.radius;
  m.linear.tol = c.linear_tol;
  m.linear.max_iter = c.linear_max_iter;
  m.linear.stage_iterations = c.linear_stage_iterations;
  m.linear.s = c.s;
  m.workers = c.workers;
  return m;
}

spectral::SpectralField initial_density(const RunConfig& c) {
  const auto grid = grid_of(c);
  const double mbar = std::pow(2.0 * std::numbers::pi, -c.d);
  std::vector<double> values(grid.node_count());
  std::vector<double> x(static_cast<std::size_t>(c.d));
  for (std::size_t i = 0; i < values.size(); ++i) {
    grid.node(i, x);
    values[i] = mbar * (1.0 + c.amplitude * std::cos(c.density_mode * x[0]));
  }
  return spectral::analyze(grid, values);
}

spectral::DistributionalDatum datum_of(const RunConfig& c) {
  const auto grid = grid_of(c);
  const std::string& text = c.datum;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto point = [&](const std::string& list) {
    std::vector<double> y;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) y.push_back(to_double("linear.datum", item));
    if (y.size() != static_cast<std::size_t>(c.d))
      throw ValidationError("linear.datum point needs " + std::to_string(c.d) + " coordinates");
    return y;
  };
  if (kind == "dirac") return spectral::DiracAt{point(rest)};
  if (kind == "dirac_gradient") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw ValidationError("linear.datum dirac_gradient needs axis:y");
    const int axis = static_cast<int>(to_integer("linear.datum", rest.substr(0, c2)));
    if (axis < 0 || axis >= c.d) throw ValidationError("linear.datum axis out of range");
    return spectral::DiracGradientAt{point(rest.substr(c2 + 1)), axis};
  }
  if (kind == "mode") {
    const int k = static_cast<int>(to_integer("linear.datum", rest));
    if (k < 1 || k >= c.n / 2) throw ValidationError("linear.datum mode must satisfy 1 <= k < n/2");
    std::vector<double> values(grid.node_count());
    std::vector<double> x(static_cast<std::size_t>(c.d));
    for (std::size_t i = 0; i < values.size(); ++i) {
      grid.node(i, x);
      values[i] = std::cos(k * x[0]);
    }
    return spectral::ZeroMeanField{spectral::analyze(grid, values)};
  }
  if (kind == "zero") return spectral::ZeroMeanField{spectral::SpectralField(grid)};
  throw ValidationError("linear.datum '" + text + "' must be dirac, dirac_gradient, mode or zero");
}

}  // namespace mfglab::config
