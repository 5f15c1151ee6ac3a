#pragma once

// Laplace-Beltrami solve with the flat-torus preconditioner, and the
// randomized nullspace computation of harmonic vector fields.

#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "surfcalc/calculus.hpp"
#include "surfcalc/krylov.hpp"
#include "surfcalc/spectral.hpp"

namespace surfcalc {

// ---------------------------------------------------------------------------
// Flat-torus operators

/// (Delta_I + 1 1^T) f: the flat Laplacian plus the sum of f on every node.
inline ScalarGrid flat_lb_stabilized(const ScalarGrid& f) {
  const double total = mean_value(f) * static_cast<double>(f.size());
  ScalarGrid out = apply_mode_symbol(f, [](int m, int n) {
    return complex{-static_cast<double>(m * m + n * n), 0.0};
  });
  return out += total;
}

/// Exact inverse of (Delta_I + 1 1^T): -1/(m^2 + n^2) on nonzero modes and
/// 1/N^2 on the (0, 0) mode.
inline ScalarGrid flat_lb_inverse(const ScalarGrid& b) {
  const double zero_mode = 1.0 / static_cast<double>(b.size());
  RealSpectrum s = rfft2(b);
  s.apply([zero_mode](int m, int n) {
    const int k2 = m * m + n * n;
    return k2 == 0 ? zero_mode : -1.0 / static_cast<double>(k2);
  });
  return irfft2(std::move(s));
}

/// Flat divergence/curl system applied to F: (d_u F1 + d_v F2, -d_v F1 + d_u F2).
/// The result is packed as a TangentField whose f1 holds the divergence row and
/// f2 the curl row.
inline TangentField flat_field_operator(const TangentField& field) {
  RealSpectrum a = rfft2(field.f1);
  RealSpectrum b = rfft2(field.f2);
  RealSpectrum d(field.grid()), c(field.grid());
  const int rows = field.grid().size();
  const int cols = rows / 2 + 1;
  for (int row = 0; row < rows; ++row) {
    const double n = field.grid().mode_of(row);
    for (int m = 0; m < cols; ++m) {
      const std::size_t i = static_cast<std::size_t>(row) * cols + m;
      const complex im{0.0, static_cast<double>(m)}, in{0.0, n};
      d.data()[i] = im * a.data()[i] + in * b.data()[i];
      c.data()[i] = -in * a.data()[i] + im * b.data()[i];
    }
  }
  return TangentField(irfft2(std::move(d)), irfft2(std::move(c)));
}

/// Per-mode inverse of the flat system [[i m, i n], [-i n, i m]], whose
/// determinant is -(m^2 + n^2); the (0, 0) block is replaced by the identity.
/// Input f1 is the divergence row, f2 the curl row.
inline TangentField flat_field_pseudoinverse(const TangentField& rhs) {
  RealSpectrum d = rfft2(rhs.f1);
  RealSpectrum c = rfft2(rhs.f2);
  RealSpectrum a(rhs.grid()), b(rhs.grid());
  const int rows = rhs.grid().size();
  const int cols = rows / 2 + 1;
  for (int row = 0; row < rows; ++row) {
    const int n = rhs.grid().mode_of(row);
    for (int m = 0; m < cols; ++m) {
      const std::size_t i = static_cast<std::size_t>(row) * cols + m;
      if (m == 0 && n == 0) {
        a.data()[i] = d.data()[i];
        b.data()[i] = c.data()[i];
        continue;
      }
      const double det = -static_cast<double>(m * m + n * n);
      const complex im{0.0, static_cast<double>(m)}, in{0.0, static_cast<double>(n)};
      a.data()[i] = (im * d.data()[i] - in * c.data()[i]) / det;
      b.data()[i] = (in * d.data()[i] + im * c.data()[i]) / det;
    }
  }
  return TangentField(irfft2(std::move(a)), irfft2(std::move(b)));
}

// ---------------------------------------------------------------------------
// Packing between grids and flat Krylov vectors

inline Vector pack(const ScalarGrid& f) { return f.storage(); }

inline ScalarGrid unpack_scalar(const Grid& grid, Vector v) {
  return ScalarGrid(grid, std::move(v));
}

inline Vector pack(const TangentField& field) {
  Vector out;
  out.reserve(2 * field.f1.size());
  out.insert(out.end(), field.f1.values().begin(), field.f1.values().end());
  out.insert(out.end(), field.f2.values().begin(), field.f2.values().end());
  return out;
}

inline TangentField unpack_field(const Grid& grid, const Vector& v) {
  const std::size_t np = grid.points();
  if (v.size() != 2 * np) throw std::invalid_argument("unpack_field: size mismatch");
  return TangentField(
      ScalarGrid(grid, Vector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(np))),
      ScalarGrid(grid, Vector(v.begin() + static_cast<std::ptrdiff_t>(np), v.end())));
}

// ---------------------------------------------------------------------------
// Laplace-Beltrami

struct LaplaceSolution {
  ScalarGrid phi;
  SolveReport report;
  /// ||<b, e> e|| / (<e, e> ||b||): the mean component removed from b.
  double removed_mean = 0.0;
};

/// Mean components of b larger than this (relative) are worth a warning.
inline constexpr double kMeanWarningThreshold = 1e-10;

/// Delta_h phi + <e, phi> e, the rank-one stabilized operator.
inline ScalarGrid stabilized_laplace_beltrami(const MetricGrids& metric,
                                              const ScalarGrid& phi) {
  const double h = phi.grid().spacing();
  double weighted = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) weighted += metric.sqrt_g[i] * phi[i];
  ScalarGrid out = laplace_beltrami(metric, phi);
  return out += h * h * weighted;
}

/// Solves Delta_h phi = b for mean-zero phi. The mean component of b (which
/// has no solution) is projected out first and its size reported. Uses
/// BiCGStab on the stabilized operator, left-preconditioned by
/// flat_lb_inverse unless cfg.precondition is false.
inline LaplaceSolution solve_laplace_beltrami(const MetricGrids& metric,
                                              const ScalarGrid& b,
                                              const KrylovConfig& cfg) {
  require_same_grid(metric.grid(), b.grid(), "solve_laplace_beltrami");
  const Grid grid = b.grid();
  const double area = surface_area(metric);
  const double b_mean = inner_product_scalar(metric, b, ScalarGrid(grid, 1.0)) / area;
  const ScalarGrid rhs = b - b_mean;
  const double b_norm = norm(metric, b);
  const double removed =
      b_norm > 0.0 ? std::abs(b_mean) * std::sqrt(area) / b_norm : 0.0;

  auto apply = [&](const Vector& x) {
    return pack(stabilized_laplace_beltrami(metric, ScalarGrid(grid, x)));
  };
  auto precond = [&](const Vector& x) {
    if (!cfg.precondition) return x;
    return pack(flat_lb_inverse(ScalarGrid(grid, x)));
  };
  auto [x, report] = bicgstab(apply, precond, pack(rhs), cfg);
  ScalarGrid phi = remove_mean(metric, ScalarGrid(grid, std::move(x)));
  return {std::move(phi), report, removed};
}

// ---------------------------------------------------------------------------
// Harmonic vector fields

/// The discrete system A F = (Div_h F, Curl_h F), packed like
/// flat_field_operator (f1 = divergence row, f2 = curl row).
inline TangentField div_curl(const MetricGrids& metric, const TangentField& field) {
  return TangentField(div(metric, field), curl(metric, field));
}

/// Random rank-two perturbation R S^T and random vector Q, all entries i.i.d.
/// standard normal from a seeded generator.
struct RankTwoPerturbation {
  Vector r1, r2;  // columns of R
  Vector s1, s2;  // columns of S
  Vector q;

  static RankTwoPerturbation draw(std::size_t length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto column = [&] {
      Vector c(length);
      for (double& x : c) x = normal(rng);
      return c;
    };
    RankTwoPerturbation p;
    p.r1 = column();
    p.r2 = column();
    p.s1 = column();
    p.s2 = column();
    p.q = column();
    return p;
  }

  /// y += R (S^T x)
  void apply_add(const Vector& x, Vector& y) const {
    const double a = detail::dot(s1, x);
    const double b = detail::dot(s2, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * r1[i] + b * r2[i];
  }
};

struct HarmonicBasis {
  TangentField h1;  // unit vector-L2 norm
  TangentField h2;  // n x h1
  SolveReport report;
  /// ||S^T F|| / ||F|| after the solve (zero in exact arithmetic).
  double nullspace_residual = 0.0;
};

/// Threshold on ||F - Q|| / ||Q|| below which the null vector is rejected.
inline constexpr double kDegenerateNullVector = 1e-8;

/// Computes a basis {h1, n x h1} of harmonic fields by solving
/// (A + R S^T) F = A Q with BiCGStab, preconditioned by the flat
/// pseudoinverse, and taking h1 = F - Q. Throws SolverError with kind
/// kDegenerateNullVector if F - Q is negligible; callers may retry with a
/// different seed.
inline HarmonicBasis harmonic_basis(const MetricGrids& metric, const KrylovConfig& cfg) {
  const Grid grid = metric.grid();
  const auto perturbation = RankTwoPerturbation::draw(2 * grid.points(), cfg.rng_seed);

  auto apply = [&](const Vector& x) {
    Vector y = pack(div_curl(metric, unpack_field(grid, x)));
    perturbation.apply_add(x, y);
    return y;
  };
  auto precond = [&](const Vector& x) {
    if (!cfg.precondition) return x;
    return pack(flat_field_pseudoinverse(unpack_field(grid, x)));
  };
  const Vector rhs = pack(div_curl(metric, unpack_field(grid, perturbation.q)));
  auto [f, report] = bicgstab(apply, precond, rhs, cfg);

  const double st_f = std::hypot(detail::dot(perturbation.s1, f),
                                 detail::dot(perturbation.s2, f));
  const double f_norm = detail::norm2(f);

  Vector diff(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) diff[i] = f[i] - perturbation.q[i];
  const double diff_norm = detail::norm2(diff);
  if (!(diff_norm > kDegenerateNullVector * detail::norm2(perturbation.q))) {
    throw SolverError(SolverError::Kind::kDegenerateNullVector,
                      "harmonic_basis: F - Q is negligible; retry with another seed",
                      report);
  }

  TangentField h1 = unpack_field(grid, diff);
  h1 *= 1.0 / norm(metric, h1);
  TangentField h2 = cross_normal(metric, h1);
  return {std::move(h1), std::move(h2), report, f_norm > 0.0 ? st_f / f_norm : 0.0};
}

}  // namespace surfcalc
