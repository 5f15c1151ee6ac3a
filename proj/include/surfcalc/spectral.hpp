#pragma once

// Uniform periodic grids on [0, 2pi)^2, 2D discrete Fourier transforms and
// Fourier-diagonal (symbol) operators.
//
// Layout: nodal values are stored with the u index fastest, linear index
// l * N + k for node (u_k, v_l). Spectra use the same layout over the
// wrapped mode indices, so mode m lives at index m (m >= 0) or m + N (m < 0).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace surfcalc {

using complex = std::complex<double>;

/// N x N uniform periodic grid with N odd, nodes u_k = k h, h = 2 pi / N.
class Grid {
 public:
  explicit Grid(int n_points) : n_(n_points) {
    if (n_points < 3 || n_points % 2 == 0) {
      throw std::invalid_argument("Grid: N must be odd and >= 3, got " +
                                  std::to_string(n_points));
    }
  }

  int size() const noexcept { return n_; }
  std::size_t points() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  double spacing() const noexcept { return 2.0 * std::numbers::pi / n_; }
  double node(int k) const noexcept { return k * spacing(); }

  /// Largest resolved mode, (N - 1) / 2.
  int max_mode() const noexcept { return (n_ - 1) / 2; }
  int mode_of(int index) const noexcept {
    return index <= max_mode() ? index : index - n_;
  }
  int index_of(int mode) const noexcept { return mode >= 0 ? mode : mode + n_; }

  std::size_t linear(int k, int l) const noexcept {
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(k);
  }

  bool operator==(const Grid&) const = default;

 private:
  int n_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": grid mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

/// Real nodal values of a periodic scalar field.
class ScalarGrid {
 public:
  explicit ScalarGrid(Grid grid, double fill = 0.0)
      : grid_(grid), values_(grid.points(), fill) {}

  ScalarGrid(Grid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.points()) {
      throw std::invalid_argument("ScalarGrid: expected " +
                                  std::to_string(grid_.points()) +
                                  " values, got " +
                                  std::to_string(values_.size()));
    }
  }

  /// Samples f(u, v) at every node.
  template <class Function>
  static ScalarGrid sample(Grid grid, Function&& f) {
    ScalarGrid out(grid);
    const int n = grid.size();
    for (int l = 0; l < n; ++l) {
      const double v = grid.node(l);
      for (int k = 0; k < n; ++k) {
        out.values_[grid.linear(k, l)] = f(grid.node(k), v);
      }
    }
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::vector<double>& storage() noexcept { return values_; }
  const std::vector<double>& storage() const noexcept { return values_; }

  double& operator()(int k, int l) noexcept { return values_[grid_.linear(k, l)]; }
  double operator()(int k, int l) const noexcept {
    return values_[grid_.linear(k, l)];
  }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

  ScalarGrid& operator+=(const ScalarGrid& o) {
    require_same_grid(grid_, o.grid_, "ScalarGrid +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  ScalarGrid& operator-=(const ScalarGrid& o) {
    require_same_grid(grid_, o.grid_, "ScalarGrid -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  // Pointwise product.
  ScalarGrid& operator*=(const ScalarGrid& o) {
    require_same_grid(grid_, o.grid_, "ScalarGrid *=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
    return *this;
  }
  ScalarGrid& operator/=(const ScalarGrid& o) {
    require_same_grid(grid_, o.grid_, "ScalarGrid /=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] /= o.values_[i];
    return *this;
  }
  ScalarGrid& operator+=(double c) noexcept {
    for (double& x : values_) x += c;
    return *this;
  }
  ScalarGrid& operator-=(double c) noexcept {
    for (double& x : values_) x -= c;
    return *this;
  }
  ScalarGrid& operator*=(double c) noexcept {
    for (double& x : values_) x *= c;
    return *this;
  }

  /// this += a * x
  ScalarGrid& add_scaled(double a, const ScalarGrid& x) {
    require_same_grid(grid_, x.grid_, "ScalarGrid add_scaled");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
    return *this;
  }

  template <class UnaryOp>
  ScalarGrid map(UnaryOp&& op) const {
    ScalarGrid out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = op(values_[i]);
    return out;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline ScalarGrid operator+(ScalarGrid a, const ScalarGrid& b) { return a += b; }
inline ScalarGrid operator-(ScalarGrid a, const ScalarGrid& b) { return a -= b; }
inline ScalarGrid operator*(ScalarGrid a, const ScalarGrid& b) { return a *= b; }
inline ScalarGrid operator/(ScalarGrid a, const ScalarGrid& b) { return a /= b; }
inline ScalarGrid operator*(double c, ScalarGrid a) { return a *= c; }
inline ScalarGrid operator*(ScalarGrid a, double c) { return a *= c; }
inline ScalarGrid operator+(ScalarGrid a, double c) { return a += c; }
inline ScalarGrid operator-(ScalarGrid a, double c) { return a -= c; }
inline ScalarGrid operator-(ScalarGrid a) { return a *= -1.0; }

/// Complex Fourier coefficients over the full mode range
/// m, n in [-(N-1)/2, (N-1)/2].
class SpectralGrid {
 public:
  explicit SpectralGrid(Grid grid)
      : grid_(grid), coeffs_(grid.points(), complex{0.0, 0.0}) {}

  const Grid& grid() const noexcept { return grid_; }
  std::span<const complex> coeffs() const noexcept { return coeffs_; }
  std::span<complex> coeffs() noexcept { return coeffs_; }

  complex& coeff(int m, int n) noexcept {
    return coeffs_[grid_.linear(grid_.index_of(m), grid_.index_of(n))];
  }
  complex coeff(int m, int n) const noexcept {
    return coeffs_[grid_.linear(grid_.index_of(m), grid_.index_of(n))];
  }

 private:
  Grid grid_;
  std::vector<complex> coeffs_;
};

/// Raised when an inverse transform that must produce a real field leaves a
/// significant imaginary part.
class SpectrumError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

// FFTW_ESTIMATE picks plans without timing runs, so results are bitwise
// reproducible from run to run.
#ifndef SURFCALC_FFTW_FLAGS
#define SURFCALC_FFTW_FLAGS FFTW_ESTIMATE
#endif

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  void* p = fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(static_cast<T*>(p));
}

enum class PlanKind { kForward, kBackward, kRealToComplex, kComplexToReal };

// Planning is serialized; executing a cached plan on fresh (fftw_malloc'd,
// out-of-place) arrays through the new-array interface is thread safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  fftw_plan get(int n, PlanKind kind) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, kind);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t full = static_cast<std::size_t>(n) * n;
    const std::size_t half = static_cast<std::size_t>(n) * (n / 2 + 1);
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::kForward:
      case PlanKind::kBackward: {
        auto in = fftw_buffer<fftw_complex>(full);
        auto out = fftw_buffer<fftw_complex>(full);
        plan = fftw_plan_dft_2d(
            n, n, in.get(), out.get(),
            kind == PlanKind::kForward ? FFTW_FORWARD : FFTW_BACKWARD,
            SURFCALC_FFTW_FLAGS);
        break;
      }
      case PlanKind::kRealToComplex: {
        auto in = fftw_buffer<double>(full);
        auto out = fftw_buffer<fftw_complex>(half);
        plan = fftw_plan_dft_r2c_2d(n, n, in.get(), out.get(), SURFCALC_FFTW_FLAGS);
        break;
      }
      case PlanKind::kComplexToReal: {
        auto in = fftw_buffer<fftw_complex>(half);
        auto out = fftw_buffer<double>(full);
        plan = fftw_plan_dft_c2r_2d(n, n, in.get(), out.get(), SURFCALC_FFTW_FLAGS);
        break;
      }
    }
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<int, PlanKind>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(complex* p) noexcept {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace detail

/// Half-plane spectrum of a real field (real-to-complex layout): rows are
/// v modes over the full range, columns are u modes m = 0..(N-1)/2.
/// Coefficients carry the forward normalization 1/N^2.
class RealSpectrum {
 public:
  explicit RealSpectrum(Grid grid)
      : grid_(grid),
        cols_(grid.size() / 2 + 1),
        data_(detail::fftw_buffer<complex>(static_cast<std::size_t>(grid.size()) *
                                           cols_)) {
    std::fill_n(data_.get(), size(), complex{0.0, 0.0});
  }

  RealSpectrum(const RealSpectrum& o) : RealSpectrum(o.grid_) {
    std::copy_n(o.data_.get(), size(), data_.get());
  }
  RealSpectrum& operator=(const RealSpectrum& o) {
    if (this != &o) {
      RealSpectrum tmp(o);
      *this = std::move(tmp);
    }
    return *this;
  }
  RealSpectrum(RealSpectrum&&) noexcept = default;
  RealSpectrum& operator=(RealSpectrum&&) noexcept = default;

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(grid_.size()) * cols_;
  }
  complex* data() noexcept { return data_.get(); }
  const complex* data() const noexcept { return data_.get(); }

  /// Calls fn(m, n, coeff&) for every stored mode.
  template <class Fn>
  void for_each_mode(Fn&& fn) {
    const int n_pts = grid_.size();
    for (int row = 0; row < n_pts; ++row) {
      const int n = grid_.mode_of(row);
      complex* r = data_.get() + static_cast<std::size_t>(row) * cols_;
      for (int m = 0; m < cols_; ++m) fn(m, n, r[m]);
    }
  }

  /// Multiplies every coefficient by symbol(m, n). The symbol must satisfy
  /// symbol(-m, -n) = conj(symbol(m, n)) for the result to represent a real
  /// field.
  template <class Symbol>
  RealSpectrum& apply(Symbol&& symbol) {
    for_each_mode([&](int m, int n, complex& c) { c *= symbol(m, n); });
    return *this;
  }

  RealSpectrum& operator+=(const RealSpectrum& o) {
    require_same_grid(grid_, o.grid_, "RealSpectrum +=");
    for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

 private:
  Grid grid_;
  int cols_;
  detail::FftwBuffer<complex> data_;
};

/// Forward real transform with the (h / 2 pi)^2 = 1/N^2 normalization.
inline RealSpectrum rfft2(const ScalarGrid& f) {
  const Grid& grid = f.grid();
  const std::size_t np = grid.points();
  auto in = detail::fftw_buffer<double>(np);
  std::copy(f.values().begin(), f.values().end(), in.get());
  RealSpectrum out(grid);
  fftw_plan plan =
      detail::PlanCache::instance().get(grid.size(), detail::PlanKind::kRealToComplex);
  fftw_execute_dft_r2c(plan, in.get(), detail::as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(np);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= scale;
  return out;
}

/// Inverse real transform (bare sum over modes).
inline ScalarGrid irfft2(RealSpectrum spectrum) {
  const Grid& grid = spectrum.grid();
  auto out = detail::fftw_buffer<double>(grid.points());
  fftw_plan plan =
      detail::PlanCache::instance().get(grid.size(), detail::PlanKind::kComplexToReal);
  // c2r overwrites its input; spectrum is owned here.
  fftw_execute_dft_c2r(plan, detail::as_fftw(spectrum.data()), out.get());
  return ScalarGrid(grid, std::vector<double>(out.get(), out.get() + grid.points()));
}

inline SpectralGrid dft2_forward(const ScalarGrid& f) {
  const Grid& grid = f.grid();
  const std::size_t np = grid.points();
  auto in = detail::fftw_buffer<complex>(np);
  for (std::size_t i = 0; i < np; ++i) in[i] = complex{f[i], 0.0};
  auto out = detail::fftw_buffer<complex>(np);
  fftw_plan plan =
      detail::PlanCache::instance().get(grid.size(), detail::PlanKind::kForward);
  fftw_execute_dft(plan, detail::as_fftw(in.get()), detail::as_fftw(out.get()));
  SpectralGrid result(grid);
  const double scale = 1.0 / static_cast<double>(np);
  auto coeffs = result.coeffs();
  for (std::size_t i = 0; i < np; ++i) coeffs[i] = out[i] * scale;
  return result;
}

/// Largest imaginary part, relative to the largest modulus, that the inverse
/// transform accepts before declaring the spectrum non-symmetric.
inline constexpr double kImaginaryResidueTolerance = 1e-11;

/// Complex inverse transform; returns the full complex nodal values.
inline std::vector<complex> dft2_inverse_complex(const SpectralGrid& spectrum) {
  const Grid& grid = spectrum.grid();
  const std::size_t np = grid.points();
  auto in = detail::fftw_buffer<complex>(np);
  std::copy(spectrum.coeffs().begin(), spectrum.coeffs().end(), in.get());
  auto out = detail::fftw_buffer<complex>(np);
  fftw_plan plan =
      detail::PlanCache::instance().get(grid.size(), detail::PlanKind::kBackward);
  fftw_execute_dft(plan, detail::as_fftw(in.get()), detail::as_fftw(out.get()));
  return std::vector<complex>(out.get(), out.get() + np);
}

/// Inverse transform of a conjugate-symmetric spectrum. Throws SpectrumError
/// if the imaginary residue exceeds kImaginaryResidueTolerance (relative).
inline ScalarGrid dft2_inverse(const SpectralGrid& spectrum) {
  auto values = dft2_inverse_complex(spectrum);
  double max_mod = 0.0;
  double max_imag = 0.0;
  std::vector<double> real(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    max_mod = std::max(max_mod, std::abs(values[i]));
    max_imag = std::max(max_imag, std::abs(values[i].imag()));
    real[i] = values[i].real();
  }
  if (max_imag > kImaginaryResidueTolerance * max_mod) {
    throw SpectrumError("dft2_inverse: imaginary residue " +
                        std::to_string(max_imag) + " relative to " +
                        std::to_string(max_mod) +
                        " (spectrum is not conjugate symmetric)");
  }
  return ScalarGrid(spectrum.grid(), std::move(real));
}

/// Returns F*( sigma . F(f) ) for a symbol sigma(m, n), m the u mode and n the
/// v mode. Conjugate-symmetric symbols take the real-transform path; others go
/// through the full complex transform and its residue check.
template <class Symbol>
ScalarGrid apply_mode_symbol(const ScalarGrid& f, Symbol&& sigma) {
  const Grid& grid = f.grid();
  const int mm = grid.max_mode();
  bool hermitian = true;
  for (int n = -mm; n <= mm && hermitian; ++n) {
    for (int m = 0; m <= mm; ++m) {
      const complex a = sigma(m, n);
      const complex b = std::conj(sigma(-m, -n));
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      if (std::abs(a - b) > 1e-14 * scale) {
        hermitian = false;
        break;
      }
    }
  }
  if (hermitian) {
    RealSpectrum s = rfft2(f);
    s.apply(sigma);
    return irfft2(std::move(s));
  }
  SpectralGrid s = dft2_forward(f);
  for (int n = -mm; n <= mm; ++n) {
    for (int m = -mm; m <= mm; ++m) s.coeff(m, n) *= sigma(m, n);
  }
  return dft2_inverse(s);
}

/// (1/N^2) sum of nodal values; equals the (0, 0) coefficient.
inline double mean_value(const ScalarGrid& f) {
  double sum = 0.0;
  for (double x : f.values()) sum += x;
  return sum / static_cast<double>(f.size());
}

// Spectral derivatives. The symbols i m and i n are odd, so they vanish on the
// (0, 0) mode and the result is real.

inline ScalarGrid partial_u(RealSpectrum s) {
  s.apply([](int m, int) { return complex{0.0, static_cast<double>(m)}; });
  return irfft2(std::move(s));
}

inline ScalarGrid partial_v(RealSpectrum s) {
  s.apply([](int, int n) { return complex{0.0, static_cast<double>(n)}; });
  return irfft2(std::move(s));
}

inline ScalarGrid partial_u(const ScalarGrid& f) { return partial_u(rfft2(f)); }
inline ScalarGrid partial_v(const ScalarGrid& f) { return partial_v(rfft2(f)); }

/// d/du a + d/dv b with a single inverse transform.
inline ScalarGrid flat_divergence(const ScalarGrid& a, const ScalarGrid& b) {
  require_same_grid(a.grid(), b.grid(), "flat_divergence");
  RealSpectrum sa = rfft2(a);
  RealSpectrum sb = rfft2(b);
  sa.apply([](int m, int) { return complex{0.0, static_cast<double>(m)}; });
  sb.apply([](int, int n) { return complex{0.0, static_cast<double>(n)}; });
  sa += sb;
  return irfft2(std::move(sa));
}

}  // namespace surfcalc
