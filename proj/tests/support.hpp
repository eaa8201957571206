#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "mfglab/spectral.hpp"

namespace testing {

using mfglab::spectral::SpectralField;
using mfglab::spectral::TorusGrid;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline SpectralField from_fn(const TorusGrid& grid, const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> values(grid.node_count());
  std::vector<double> x(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    grid.node(i, x);
    values[i] = fn(x);
  }
  return mfglab::spectral::analyze(grid, values);
}

/// Real random field with modes |k_j| <= max_mode (no Nyquist content).
inline SpectralField random_field(const TorusGrid& grid, unsigned seed, int max_mode = 6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int d = grid.dimension();
  const std::size_t count = grid.node_count();
  std::vector<std::complex<double>> c(count);
  std::vector<int> pos(static_cast<std::size_t>(d)), neg(static_cast<std::size_t>(d));
  for (std::size_t f = 0; f < count; ++f) {
    grid.unflatten(f, pos);
    bool keep = true;
    for (int a = 0; a < d; ++a) {
      const int k = grid.wavenumber(pos[a]);
      keep = keep && std::abs(k) <= max_mode;
      neg[a] = grid.position(-k);
    }
    if (!keep) continue;
    const std::size_t g = grid.flatten(neg);
    if (g < f) continue;
    if (g == f) {
      c[f] = nd(rng);
    } else {
      c[f] = {nd(rng), nd(rng)};
      c[g] = std::conj(c[f]);
    }
  }
  return SpectralField(grid, std::move(c));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double coeff_distance(const SpectralField& a, const SpectralField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i)
    worst = std::max(worst, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return worst;
}

inline double coeff_scale(const SpectralField& a) {
  double worst = 0.0;
  for (const auto& c : a.coeffs()) worst = std::max(worst, std::abs(c));
  return worst;
}

}  // namespace testing
