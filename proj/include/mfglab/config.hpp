#pragma once

// Run configuration: INI sections with key = value pairs. Every key has a
// default; see configs/README.md for the schema.

#include <string>
#include <utility>
#include <vector>

#include "mfglab/master.hpp"
#include "mfglab/model.hpp"
#include "mfglab/spectral.hpp"

namespace mfglab::config {

struct RunConfig {
  // [grid]
  int d = 1;
  int n = 64;
  // [sobolev]
  double s = 6.0;
  double r = 1.25;
  // [time]
  double t0 = 0.0;
  double T = 0.1;
  int n_steps = 200;
  // [hamiltonian]
  std::string hamiltonian = "coupled_quadratic";
  std::vector<double> hamiltonian_params;
  // [payoff]
  std::string g = "tanh";
  double g_param = 1.0;
  double decay = 1.0;
  // [picard]
  double picard_tol = 1e-9;
  int picard_max_iter = 200;
  double picard_damping = 0.5;
  // [density]  m0 = (2pi)^-d (1 + amplitude cos(mode x_1))
  double radius = 1.0;
  double amplitude = 0.3;
  int density_mode = 1;
  // [linear]
  double linear_tol = 1e-12;
  int linear_max_iter = 200;
  int linear_stage_iterations = 3;
  std::string datum = "dirac:0";
  // [master]
  double residual_tolerance = 0.0;  // 0 disables the verdict
  bool uniqueness = false;
  bool master_refine = false;  // also solve with n_steps doubled and report the decrease
  // [taylor]
  double taylor_radius = 8.0;
  int taylor_eps_min = 3;  // eps runs 2^-min .. 2^-max
  int taylor_eps_max = 9;
  std::string taylor_direction = "default";  // or "random"
  // [stability]
  double stability_scale = 0.02;
  int stability_j_max = 6;
  double stability_spread = 3.0;
  // [hminus]
  int hminus_k_min = 2;
  int hminus_k_max = 16;
  int hminus_diracs = 8;
  double hminus_spread = 10.0;
  // [kernel]
  double kernel_spread = 10.0;
  int kernel_refine_n = 0;  // 0 skips the refinement check
  double kernel_refine_tolerance = 1.25;
  // [audit]
  int audit_samples = 12;
  double audit_slope_floor = 1.9;
  // [norms]
  std::string norms_field = "one";  // one, m0 or direction
  std::vector<double> norms_indices = {0.0, 1.0, -1.0, 6.0};
  // [run]
  unsigned seed = 12345;
  unsigned workers = 1;
  std::string cache_dir = ".mfglab-cache";
};

/// Parses an INI file; an empty path gives the defaults.
RunConfig load(const std::string& path, const std::vector<std::string>& overrides = {});
/// Parses INI text.
RunConfig parse(const std::string& text, const std::vector<std::string>& overrides = {});

/// Throws ValidationError naming the first violated requirement.
void validate(const RunConfig& config);

/// Smallest admissible s is strictly above this bound for dimension d.
int sobolev_floor(int d);

/// "section.key = value" lines for every key, sorted, numbers in CSV format.
std::vector<std::pair<std::string, std::string>> canonical_entries(const RunConfig& config);
/// SHA-256 over the entries that affect the numerics (not workers or cache_dir).
std::string config_hash(const RunConfig& config);

spectral::TorusGrid grid_of(const RunConfig& config);
model::HamiltonianSpec hamiltonian_of(const RunConfig& config);
model::PayoffSpec payoff_of(const RunConfig& config);
master::MasterConfig master_config_of(const RunConfig& config);
spectral::SpectralField initial_density(const RunConfig& config);
/// Parses datum strings: dirac:y1[,y2..], dirac_gradient:axis:y1[,..], mode:k, zero.
spectral::DistributionalDatum datum_of(const RunConfig& config);

/// Hex SHA-256 of arbitrary bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace mfglab::config
