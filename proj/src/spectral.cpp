#include "mfglab/spectral.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "mfglab/errors.hpp"

namespace mfglab::spectral {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-grid wavenumber tables, built once per thread and reused.
struct ModeTable {
  std::vector<int> k;        // node_count x d wavenumbers
  std::vector<double> k2;    // |k|^2
  std::vector<char> nyquist; // any component equal to -n/2
  std::map<double, std::vector<double>> sobolev;  // (1+|k|^2)^l
};

const ModeTable& modes_of(const TorusGrid& grid) {
  thread_local std::map<std::pair<int, int>, ModeTable> tables;
  auto key = std::make_pair(grid.dimension(), grid.modes());
  if (auto it = tables.find(key); it != tables.end()) return it->second;
  ModeTable t;
  const int d = grid.dimension();
  const std::size_t count = grid.node_count();
  t.k.resize(count * static_cast<std::size_t>(d));
  t.k2.resize(count);
  t.nyquist.resize(count);
  std::vector<int> pos(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < count; ++flat) {
    grid.unflatten(flat, pos);
    double k2 = 0.0;
    bool nyq = false;
    for (int a = 0; a < d; ++a) {
      const int kj = grid.wavenumber(pos[a]);
      t.k[flat * d + a] = kj;
      k2 += static_cast<double>(kj) * kj;
      nyq = nyq || kj == -grid.modes() / 2;
    }
    t.k2[flat] = k2;
    t.nyquist[flat] = nyq;
  }
  return tables.emplace(key, std::move(t)).first->second;
}

const std::vector<double>& sobolev_weights(const TorusGrid& grid, double l) {
  auto& table = const_cast<ModeTable&>(modes_of(grid));
  if (auto it = table.sobolev.find(l); it != table.sobolev.end()) return it->second;
  std::vector<double> w(table.k2.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(1.0 + table.k2[i], l);
  return table.sobolev.emplace(l, std::move(w)).first->second;
}

// Calls fn(flat, k) for every stored mode, k holding wavenumbers.
template <class Fn>
void for_each_mode(const TorusGrid& grid, Fn&& fn) {
  const auto& t = modes_of(grid);
  const auto d = static_cast<std::size_t>(grid.dimension());
  for (std::size_t flat = 0; flat < grid.node_count(); ++flat)
    fn(flat, std::span<const int>(t.k.data() + flat * d, d));
}

double k_squared(std::span<const int> k) {
  double s = 0.0;
  for (int kj : k) s += static_cast<double>(kj) * kj;
  return s;
}

bool has_nyquist(const TorusGrid& grid, std::span<const int> k) {
  return std::any_of(k.begin(), k.end(), [&](int kj) { return kj == -grid.modes() / 2; });
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b)) throw InputShapeError("fields live on different grids");
}

}  // namespace

// ---------------------------------------------------------------- TorusGrid

TorusGrid::TorusGrid(int dimension, int modes_per_dim) : d_(dimension), n_(modes_per_dim) {
  if (d_ < 1) throw InputShapeError("torus dimension must be positive");
  if (n_ < 4 || n_ % 2 != 0) throw InputShapeError("modes per dimension must be even and >= 4");
  count_ = 1;
  for (int i = 0; i < d_; ++i) count_ *= static_cast<std::size_t>(n_);
}

void TorusGrid::unflatten(std::size_t flat, std::span<int> index) const noexcept {
  for (int a = d_ - 1; a >= 0; --a) {
    index[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
}

std::size_t TorusGrid::flatten(std::span<const int> index) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < d_; ++a) flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(index[a]);
  return flat;
}

void TorusGrid::node(std::size_t flat, std::span<double> x) const noexcept {
  for (int a = d_ - 1; a >= 0; --a) {
    x[a] = spacing() * static_cast<double>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
}

double TorusGrid::spacing() const noexcept { return kTwoPi / n_; }

// ------------------------------------------------------------ SpectralField

SpectralField::SpectralField(TorusGrid grid) : grid_(grid), coeffs_(grid.node_count()) {}

SpectralField::SpectralField(TorusGrid grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.node_count())
    throw InputShapeError("coefficient count does not match grid");
}

SpectralField SpectralField::constant(TorusGrid grid, double value) {
  SpectralField f(grid);
  f.coeffs_[0] = value;
  return f;
}

Complex SpectralField::at(std::span<const int> k) const {
  std::vector<int> pos(k.size());
  for (std::size_t a = 0; a < k.size(); ++a) {
    if (k[a] < -grid_.modes() / 2 || k[a] >= grid_.modes() / 2) return {0.0, 0.0};
    pos[a] = grid_.position(k[a]);
  }
  return coeffs_[grid_.flatten(pos)];
}

SpectralField SpectralField::apply_symbol(
    const std::function<Complex(std::span<const int>)>& symbol) const {
  SpectralField out(grid_);
  for_each_mode(grid_, [&](std::size_t flat, std::span<const int> k) {
    out.coeffs_[flat] = coeffs_[flat] * symbol(k);
  });
  return out;
}

SpectralField SpectralField::apply_real_symbol(const std::function<double(double)>& radial) const {
  SpectralField out(grid_);
  const auto& k2 = modes_of(grid_).k2;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = coeffs_[i] * radial(k2[i]);
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

// --------------------------------------------------------------- transforms

SpectralField analyze(const TorusGrid& grid, std::span<const double> values) {
  if (values.size() != grid.node_count()) {
    std::ostringstream msg;
    msg << "analyze: expected " << grid.node_count() << " samples, got " << values.size();
    throw InputShapeError(msg.str());
  }
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out(values.size());
  detail::fft(grid.dimension(), grid.modes(), -1, in, out);
  const double scale = 1.0 / static_cast<double>(grid.node_count());
  for (auto& c : out) c *= scale;
  return SpectralField(grid, std::move(out));
}

namespace {
std::vector<Complex> synthesize_complex(const SpectralField& f) {
  std::vector<Complex> out(f.grid().node_count());
  detail::fft(f.grid().dimension(), f.grid().modes(), +1, f.coeffs(), out);
  return out;
}
}  // namespace

std::vector<double> synthesize(const SpectralField& f) {
  auto c = synthesize_complex(f);
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](Complex z) { return z.real(); });
  return out;
}

double imaginary_defect(const SpectralField& f) {
  double worst = 0.0;
  for (Complex z : synthesize_complex(f)) worst = std::max(worst, std::abs(z.imag()));
  return worst;
}

// -------------------------------------------------------------------- norms

SpectralField lambda_apply(const SpectralField& f, SobolevIndex l) {
  const double half = 0.5 * l.value;
  return f.apply_real_symbol([half](double k2) { return std::pow(1.0 + k2, half); });
}

double sobolev_norm(const SpectralField& f, SobolevIndex l) {
  double sum = 0.0;
  const auto c = f.coeffs();
  const auto& w = sobolev_weights(f.grid(), l.value);
  for (std::size_t i = 0; i < c.size(); ++i) sum += std::norm(c[i]) * w[i];
  return std::sqrt(sum);
}

double sobolev_norm(const VectorField& f, SobolevIndex l) {
  double sum = 0.0;
  for (const auto& component : f) {
    const double n = sobolev_norm(component, l);
    sum += n * n;
  }
  return std::sqrt(sum);
}

double pairing(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid());
  Complex sum = 0.0;
  const auto a = f.coeffs();
  const auto b = g.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum.real() * std::pow(kTwoPi, f.grid().dimension());
}

double mass(const SpectralField& f) {
  return f.mean_mode().real() * std::pow(kTwoPi, f.grid().dimension());
}

double sup_norm(const SpectralField& f) {
  double worst = 0.0;
  for (double v : synthesize(f)) worst = std::max(worst, std::abs(v));
  return worst;
}

// -------------------------------------------------------------- derivatives

SpectralField partial(const SpectralField& f, int axis) {
  const TorusGrid& grid = f.grid();
  if (axis < 0 || axis >= grid.dimension()) throw InputShapeError("partial: axis out of range");
  const auto& t = modes_of(grid);
  const auto d = static_cast<std::size_t>(grid.dimension());
  const auto c = f.coeffs();
  std::vector<Complex> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!t.nyquist[i]) out[i] = c[i] * Complex{0.0, static_cast<double>(t.k[i * d + axis])};
  }
  return SpectralField(grid, std::move(out));
}

VectorField gradient(const SpectralField& f) {
  VectorField out;
  out.reserve(static_cast<std::size_t>(f.grid().dimension()));
  for (int a = 0; a < f.grid().dimension(); ++a) out.push_back(partial(f, a));
  return out;
}

SpectralField divergence(const VectorField& v) {
  if (v.empty()) throw InputShapeError("divergence of an empty vector field");
  if (static_cast<int>(v.size()) != v.front().grid().dimension())
    throw InputShapeError("vector field component count differs from dimension");
  SpectralField out = partial(v[0], 0);
  for (std::size_t a = 1; a < v.size(); ++a) out += partial(v[a], static_cast<int>(a));
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const TorusGrid& grid = f.grid();
  return f.apply_symbol([&grid](std::span<const int> k) -> Complex {
    if (has_nyquist(grid, k)) return {0.0, 0.0};
    return {-k_squared(k), 0.0};
  });
}

// ------------------------------------------------------------ resampling

namespace {
// Destination of each source mode: a flat index, kDropped, or kSplit for a
// source Nyquist mode that has to be shared between +n/2 and -n/2.
constexpr std::ptrdiff_t kDropped = -1;
constexpr std::ptrdiff_t kSplit = -2;

const std::vector<std::ptrdiff_t>& resample_map(const TorusGrid& src, const TorusGrid& target) {
  thread_local std::map<std::tuple<int, int, int>, std::vector<std::ptrdiff_t>> maps;
  auto key = std::make_tuple(src.dimension(), src.modes(), target.modes());
  if (auto it = maps.find(key); it != maps.end()) return it->second;
  const int d = src.dimension();
  const int half_dst = target.modes() / 2;
  const bool growing = target.modes() > src.modes();
  std::vector<std::ptrdiff_t> dest(src.node_count(), kDropped);
  std::vector<int> pos(static_cast<std::size_t>(d));
  for_each_mode(src, [&](std::size_t flat, std::span<const int> k) {
    if (growing && has_nyquist(src, k)) {
      dest[flat] = kSplit;
      return;
    }
    for (int a = 0; a < d; ++a) {
      if (k[a] <= -half_dst || k[a] >= half_dst) return;
      pos[a] = target.position(k[a]);
    }
    dest[flat] = static_cast<std::ptrdiff_t>(target.flatten(pos));
  });
  return maps.emplace(key, std::move(dest)).first->second;
}
}  // namespace

SpectralField resample(const SpectralField& f, const TorusGrid& target) {
  const TorusGrid& src = f.grid();
  if (src.dimension() != target.dimension())
    throw InputShapeError("resample: dimension mismatch");
  if (src == target) return f;
  const int d = src.dimension();
  const int half_src = src.modes() / 2;
  const auto& dest = resample_map(src, target);
  const auto c = f.coeffs();
  const auto& table = modes_of(src);
  std::vector<Complex> dst(target.node_count());
  std::vector<int> pos(static_cast<std::size_t>(d));
  std::vector<int> nyq_axes;

  for (std::size_t flat = 0; flat < c.size(); ++flat) {
    if (dest[flat] >= 0) {
      dst[static_cast<std::size_t>(dest[flat])] += c[flat];
      continue;
    }
    if (dest[flat] == kDropped || c[flat] == Complex{0.0, 0.0}) continue;
    // Source Nyquist modes are split evenly between +n/2 and -n/2 so the
    // padded field stays real.
    const int* k = table.k.data() + flat * static_cast<std::size_t>(d);
    nyq_axes.clear();
    for (int a = 0; a < d; ++a) {
      if (k[a] == -half_src) nyq_axes.push_back(a);
    }
    const std::size_t combos = std::size_t{1} << nyq_axes.size();
    const double share = 1.0 / static_cast<double>(combos);
    for (std::size_t mask = 0; mask < combos; ++mask) {
      for (int a = 0; a < d; ++a) pos[a] = target.position(k[a]);
      for (std::size_t j = 0; j < nyq_axes.size(); ++j) {
        if (mask >> j & 1U) pos[nyq_axes[j]] = target.position(half_src);
      }
      dst[target.flatten(pos)] += c[flat] * share;
    }
  }
  return SpectralField(target, std::move(dst));
}

SpectralField drop_nyquist(const SpectralField& f) {
  const auto& nyq = modes_of(f.grid()).nyquist;
  std::vector<Complex> c = f.data();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (nyq[i]) c[i] = 0.0;
  }
  return SpectralField(f.grid(), std::move(c));
}

// ------------------------------------------------------------- pointwise

std::vector<SpectralField> pointwise_apply(std::span<const SpectralField> fields,
                                           const PositionalFn& fn, std::size_t outputs) {
  if (fields.empty()) throw InputShapeError("pointwise_apply needs at least one field");
  const TorusGrid grid = fields.front().grid();
  for (const auto& f : fields) require_same_grid(grid, f.grid());
  const TorusGrid fine = grid.refined();
  const std::size_t nodes = fine.node_count();

  std::vector<std::vector<double>> samples;
  samples.reserve(fields.size());
  for (const auto& f : fields) samples.push_back(synthesize(resample(f, fine)));

  std::vector<std::vector<double>> results(outputs, std::vector<double>(nodes));
  std::vector<double> in(fields.size());
  std::vector<double> out(outputs);
  std::vector<double> x(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t j = 0; j < nodes; ++j) {
    for (std::size_t i = 0; i < fields.size(); ++i) in[i] = samples[i][j];
    fine.node(j, x);
    fn(x, in, out);
    for (std::size_t o = 0; o < outputs; ++o) {
      if (!std::isfinite(out[o])) {
        std::ostringstream msg;
        msg << "pointwise nonlinearity returned a non-finite value at refined node " << j;
        throw NonlinearityDomainError(msg.str(), j, in);
      }
      results[o][j] = out[o];
    }
  }

  std::vector<SpectralField> fields_out;
  fields_out.reserve(outputs);
  for (const auto& r : results) fields_out.push_back(drop_nyquist(resample(analyze(fine, r), grid)));
  return fields_out;
}

std::vector<SpectralField> pointwise_apply(std::span<const SpectralField> fields,
                                           const PointwiseFn& fn, std::size_t outputs) {
  return pointwise_apply(
      fields,
      PositionalFn([&fn](std::span<const double>, std::span<const double> in,
                         std::span<double> out) { fn(in, out); }),
      outputs);
}

SpectralField pointwise_apply(std::span<const SpectralField> fields,
                              const std::function<double(std::span<const double>)>& fn) {
  auto out = pointwise_apply(
      fields, PointwiseFn([&fn](std::span<const double> in, std::span<double> o) { o[0] = fn(in); }),
      1);
  return std::move(out.front());
}

SpectralField multiply(const SpectralField& a, const SpectralField& b) {
  const SpectralField pair[] = {a, b};
  return pointwise_apply(pair, [](std::span<const double> v) { return v[0] * v[1]; });
}

// -------------------------------------------------------------- filters

SpectralField mollify(const SpectralField& f, double eps) {
  if (!(eps > 0.0)) throw InputShapeError("mollifier width must be positive");
  const double e2 = eps * eps;
  return f.apply_real_symbol([e2](double k2) { return std::exp(-e2 * k2); });
}

SpectralField project_zero_mean(const SpectralField& f) {
  std::vector<Complex> c = f.data();
  c[0] = 0.0;
  return SpectralField(f.grid(), std::move(c));
}

// --------------------------------------------------------------- data

namespace {
SpectralField dirac(const std::vector<double>& y, const TorusGrid& grid) {
  if (static_cast<int>(y.size()) != grid.dimension())
    throw InputShapeError("probe point dimension differs from grid dimension");
  const double amp = std::pow(kTwoPi, -grid.dimension());
  std::vector<Complex> c(grid.node_count());
  for_each_mode(grid, [&](std::size_t flat, std::span<const int> k) {
    if (has_nyquist(grid, k)) return;
    double phase = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) phase -= k[a] * y[a];
    c[flat] = amp * std::polar(1.0, phase);
  });
  return SpectralField(grid, std::move(c));
}
}  // namespace

SpectralField synthesize_datum(const DistributionalDatum& datum, const TorusGrid& grid) {
  return std::visit(
      [&grid](const auto& d) -> SpectralField {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DiracAt>) {
          return dirac(d.y, grid);
        } else if constexpr (std::is_same_v<T, DiracGradientAt>) {
          if (d.axis < 0 || d.axis >= grid.dimension())
            throw InputShapeError("Dirac gradient axis out of range");
          return partial(dirac(d.y, grid), d.axis);
        } else {
          return project_zero_mean(resample(d.field, grid));
        }
      },
      datum);
}

double datum_mass(const DistributionalDatum& datum) {
  return std::holds_alternative<DiracAt>(datum) ? 1.0 : 0.0;
}

}  // namespace mfglab::spectral
