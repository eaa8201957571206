#pragma once

// Fourier representation of scalar fields on the flat torus [0, 2pi)^d.
//
// Coefficients follow f_hat(k) = (2pi)^-d \int e^{-ik.x} f(x) dx, so the
// constant field 1 has f_hat(0) = 1 and unit L2 norm. Storage is FFT order
// (k = 0 .. n/2-1, -n/2 .. -1 along each axis, axis 0 slowest).

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace mfglab::spectral {

using Complex = std::complex<double>;

class TorusGrid {
 public:
  TorusGrid(int dimension, int modes_per_dim);

  int dimension() const noexcept { return d_; }
  int modes() const noexcept { return n_; }
  std::size_t node_count() const noexcept { return count_; }

  /// Wavenumber stored at position `i` of one axis.
  int wavenumber(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
  /// Storage position of wavenumber `k` along one axis (k in [-n/2, n/2)).
  int position(int k) const noexcept { return k >= 0 ? k : k + n_; }

  /// Multi-index (storage positions) of a flat index.
  void unflatten(std::size_t flat, std::span<int> index) const noexcept;
  std::size_t flatten(std::span<const int> index) const noexcept;

  /// Physical coordinates of node `flat`.
  void node(std::size_t flat, std::span<double> x) const noexcept;
  double spacing() const noexcept;

  /// Twice as many nodes per axis; used for dealiased products.
  TorusGrid refined() const { return TorusGrid(d_, 2 * n_); }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int d_;
  int n_;
  std::size_t count_;
};

/// Index of a fractional Sobolev space H^l.
struct SobolevIndex {
  constexpr explicit SobolevIndex(double l) : value(l) {}
  double value;
};

class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid);
  SpectralField(TorusGrid grid, std::vector<Complex> coeffs);

  static SpectralField constant(TorusGrid grid, double value);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  const std::vector<Complex>& data() const noexcept { return coeffs_; }

  /// Coefficient at wavenumber vector `k`, each component in [-n/2, n/2).
  Complex at(std::span<const int> k) const;
  Complex mean_mode() const noexcept { return coeffs_[0]; }

  /// New field with every coefficient multiplied by symbol(k).
  SpectralField apply_symbol(const std::function<Complex(std::span<const int>)>& symbol) const;
  SpectralField apply_real_symbol(const std::function<double(double k2)>& radial) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

using VectorField = std::vector<SpectralField>;

/// Pointwise nonlinearity: `in` holds one value per input field at a node,
/// `out` receives one value per output field.
using PointwiseFn = std::function<void(std::span<const double> in, std::span<double> out)>;
/// Same, additionally receiving the refined-grid node coordinates.
using PositionalFn = std::function<void(std::span<const double> x, std::span<const double> in,
                                        std::span<double> out)>;

SpectralField analyze(const TorusGrid& grid, std::span<const double> values);
std::vector<double> synthesize(const SpectralField& f);
/// Largest imaginary part of the synthesized samples.
double imaginary_defect(const SpectralField& f);

SpectralField lambda_apply(const SpectralField& f, SobolevIndex l);
double sobolev_norm(const SpectralField& f, SobolevIndex l);
double sobolev_norm(const VectorField& f, SobolevIndex l);
/// Sum_k conj(f_hat) g_hat (2pi)^d, the L2 pairing of real fields.
double pairing(const SpectralField& f, const SpectralField& g);
/// (2pi)^d f_hat(0).
double mass(const SpectralField& f);
double sup_norm(const SpectralField& f);

VectorField gradient(const SpectralField& f);
SpectralField partial(const SpectralField& f, int axis);
SpectralField divergence(const VectorField& v);
SpectralField laplacian(const SpectralField& f);

/// Evaluates fn nodewise on a 2x zero-padded grid and truncates back to the
/// retained modes |k_j| < n/2.
std::vector<SpectralField> pointwise_apply(std::span<const SpectralField> fields,
                                           const PointwiseFn& fn, std::size_t outputs);
std::vector<SpectralField> pointwise_apply(std::span<const SpectralField> fields,
                                           const PositionalFn& fn, std::size_t outputs);
SpectralField pointwise_apply(std::span<const SpectralField> fields,
                              const std::function<double(std::span<const double>)>& fn);
/// Dealiased pointwise product.
SpectralField multiply(const SpectralField& a, const SpectralField& b);

SpectralField mollify(const SpectralField& f, double eps);
SpectralField project_zero_mean(const SpectralField& f);
/// Zeroes every coefficient with a Nyquist component.
SpectralField drop_nyquist(const SpectralField& f);
/// Zero-pads (or truncates) f onto a grid with a different mode count.
SpectralField resample(const SpectralField& f, const TorusGrid& target);

struct DiracAt {
  std::vector<double> y;
};
struct DiracGradientAt {
  std::vector<double> y;
  int axis = 0;
};
struct ZeroMeanField {
  SpectralField field;
};
using DistributionalDatum = std::variant<DiracAt, DiracGradientAt, ZeroMeanField>;

/// Truncated Fourier representation of a datum; Nyquist modes are zero.
SpectralField synthesize_datum(const DistributionalDatum& datum, const TorusGrid& grid);
double datum_mass(const DistributionalDatum& datum);

}  // namespace mfglab::spectral
