#pragma once

// Discrete surface operators: pseudospectral gradient, divergence, curl and
// Laplace-Beltrami in contravariant components, plus the tangential algebra
// and quadrature inner products they are tested against.
//
// Derivatives are spectral; products with metric coefficients are formed
// pointwise in physical space, without dealiasing.

#include <cmath>
#include <utility>

#include "surfcalc/geometry.hpp"
#include "surfcalc/spectral.hpp"

namespace surfcalc {

/// Tangential field F = F1 d_u x + F2 d_v x, stored by its contravariant
/// components.
struct TangentField {
  ScalarGrid f1;
  ScalarGrid f2;

  explicit TangentField(Grid grid) : f1(grid), f2(grid) {}
  TangentField(ScalarGrid a, ScalarGrid b) : f1(std::move(a)), f2(std::move(b)) {
    require_same_grid(f1.grid(), f2.grid(), "TangentField");
  }

  const Grid& grid() const noexcept { return f1.grid(); }

  TangentField& operator+=(const TangentField& o) {
    f1 += o.f1;
    f2 += o.f2;
    return *this;
  }
  TangentField& operator-=(const TangentField& o) {
    f1 -= o.f1;
    f2 -= o.f2;
    return *this;
  }
  TangentField& operator*=(double c) noexcept {
    f1 *= c;
    f2 *= c;
    return *this;
  }
  TangentField& add_scaled(double a, const TangentField& o) {
    f1.add_scaled(a, o.f1);
    f2.add_scaled(a, o.f2);
    return *this;
  }
};

inline TangentField operator+(TangentField a, const TangentField& b) { return a += b; }
inline TangentField operator-(TangentField a, const TangentField& b) { return a -= b; }
inline TangentField operator*(double c, TangentField a) { return a *= c; }
inline TangentField operator-(TangentField a) { return a *= -1.0; }

/// Surface gradient: spectral (d_u f, d_v f) multiplied by G^{-1}.
inline TangentField grad(const MetricGrids& metric, const ScalarGrid& f) {
  require_same_grid(metric.grid(), f.grid(), "grad");
  RealSpectrum s = rfft2(f);
  ScalarGrid fu = partial_u(s);
  ScalarGrid fv = partial_v(std::move(s));
  const std::size_t np = f.size();
  TangentField out(f.grid());
  for (std::size_t i = 0; i < np; ++i) {
    const double duv = metric.neg_uv_over_g[i];
    out.f1[i] = metric.vv_over_g[i] * fu[i] + duv * fv[i];
    out.f2[i] = duv * fu[i] + metric.uu_over_g[i] * fv[i];
  }
  return out;
}

/// Surface divergence, (d_u g / 2g) F1 + d_u F1 + (d_v g / 2g) F2 + d_v F2.
inline ScalarGrid div(const MetricGrids& metric, const TangentField& field) {
  require_same_grid(metric.grid(), field.grid(), "div");
  ScalarGrid out = flat_divergence(field.f1, field.f2);
  const std::size_t np = out.size();
  for (std::size_t i = 0; i < np; ++i) {
    out[i] += metric.du_g_over_2g[i] * field.f1[i] +
              metric.dv_g_over_2g[i] * field.f2[i];
  }
  return out;
}

/// Surface curl, Curl F = -Div(n x F), via the factorization
///   C1 = D_{u,uv} - D_{v,uu} + D_{uvg} d_u - D_{uug} d_v
///   C2 = D_{u,vv} - D_{v,uv} + D_{vvg} d_u - D_{uvg} d_v.
inline ScalarGrid curl(const MetricGrids& metric, const TangentField& field) {
  require_same_grid(metric.grid(), field.grid(), "curl");
  RealSpectrum s1 = rfft2(field.f1);
  RealSpectrum s2 = rfft2(field.f2);
  const ScalarGrid f1u = partial_u(s1);
  const ScalarGrid f1v = partial_v(std::move(s1));
  const ScalarGrid f2u = partial_u(s2);
  const ScalarGrid f2v = partial_v(std::move(s2));
  ScalarGrid out(field.grid());
  const std::size_t np = out.size();
  const auto& m = metric;
  for (std::size_t i = 0; i < np; ++i) {
    const double c1 = (m.du_uv_over_sqrt_g[i] - m.dv_uu_over_sqrt_g[i]) * field.f1[i] +
                      m.uv_over_sqrt_g[i] * f1u[i] - m.uu_over_sqrt_g[i] * f1v[i];
    const double c2 = (m.du_vv_over_sqrt_g[i] - m.dv_uv_over_sqrt_g[i]) * field.f2[i] +
                      m.vv_over_sqrt_g[i] * f2u[i] - m.uv_over_sqrt_g[i] * f2v[i];
    out[i] = c1 + c2;
  }
  return out;
}

/// Discrete Laplace-Beltrami operator, the composition div(grad f).
inline ScalarGrid laplace_beltrami(const MetricGrids& metric, const ScalarGrid& f) {
  return div(metric, grad(metric, f));
}

/// Value and partial derivatives up to second order of a smooth f(u, v).
struct FunctionJet {
  double value = 0.0;
  double du = 0.0, dv = 0.0;
  double duu = 0.0, duv = 0.0, dvv = 0.0;
};

/// Laplace-Beltrami of a smooth function given through its exact derivatives,
/// evaluated at the nodes from the divergence form
///   (1/sqrt g) [d_u((G_vv f_u - G_uv f_v)/sqrt g) + d_v((G_uu f_v - G_uv f_u)/sqrt g)].
/// Only the metric coefficients G/sqrt(g) are differentiated spectrally, so the
/// result does not inherit the discretization error of laplace_beltrami on f.
template <class JetFunction>
ScalarGrid laplace_beltrami_exact(const MetricGrids& metric, JetFunction&& jet) {
  const Grid& grid = metric.grid();
  const ScalarGrid& a_uu = metric.uu_over_sqrt_g;
  const ScalarGrid& a_uv = metric.uv_over_sqrt_g;
  const ScalarGrid& a_vv = metric.vv_over_sqrt_g;
  RealSpectrum uv_hat = rfft2(a_uv);
  const ScalarGrid du_a_uv = partial_u(uv_hat);
  const ScalarGrid dv_a_uv = partial_v(std::move(uv_hat));
  const ScalarGrid du_a_vv = partial_u(a_vv);
  const ScalarGrid dv_a_uu = partial_v(a_uu);

  ScalarGrid out(grid);
  const int n = grid.size();
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      const FunctionJet f = jet(grid.node(k), grid.node(l));
      const std::size_t i = grid.linear(k, l);
      const double flux_u = du_a_vv[i] * f.du + a_vv[i] * f.duu -
                            du_a_uv[i] * f.dv - a_uv[i] * f.duv;
      const double flux_v = dv_a_uu[i] * f.dv + a_uu[i] * f.dvv -
                            dv_a_uv[i] * f.du - a_uv[i] * f.duv;
      out[i] = (flux_u + flux_v) / metric.sqrt_g[i];
    }
  }
  return out;
}

/// n x F in contravariant components:
///   ((-G_uv F1 - G_vv F2) / sqrt g, (G_uu F1 + G_uv F2) / sqrt g).
inline TangentField cross_normal(const MetricGrids& metric, const TangentField& field) {
  require_same_grid(metric.grid(), field.grid(), "cross_normal");
  TangentField out(field.grid());
  const std::size_t np = field.f1.size();
  const auto& m = metric;
  for (std::size_t i = 0; i < np; ++i) {
    const double a = field.f1[i], b = field.f2[i];
    out.f1[i] = -m.uv_over_sqrt_g[i] * a - m.vv_over_sqrt_g[i] * b;
    out.f2[i] = m.uu_over_sqrt_g[i] * a + m.uv_over_sqrt_g[i] * b;
  }
  return out;
}

/// Tangential part of an ambient vector field, in contravariant components:
/// F = G^{-1} (t . d_u x, t . d_v x).
inline TangentField project_tangential(const MetricGrids& metric,
                                       const VectorGrid& ambient) {
  require_same_grid(metric.grid(), ambient.grid(), "project_tangential");
  const ScalarGrid a = dot(ambient, metric.surface.du);
  const ScalarGrid b = dot(ambient, metric.surface.dv);
  TangentField out(ambient.grid());
  const std::size_t np = a.size();
  for (std::size_t i = 0; i < np; ++i) {
    out.f1[i] = metric.vv_over_g[i] * a[i] + metric.neg_uv_over_g[i] * b[i];
    out.f2[i] = metric.neg_uv_over_g[i] * a[i] + metric.uu_over_g[i] * b[i];
  }
  return out;
}

/// Ambient components F1 d_u x + F2 d_v x.
inline VectorGrid to_ambient(const MetricGrids& metric, const TangentField& field) {
  const auto& du = metric.surface.du;
  const auto& dv = metric.surface.dv;
  return VectorGrid(field.f1 * du.x + field.f2 * dv.x,
                    field.f1 * du.y + field.f2 * dv.y,
                    field.f1 * du.z + field.f2 * dv.z);
}

/// h^2 sum f g sqrt(g).
inline double inner_product_scalar(const MetricGrids& metric, const ScalarGrid& f,
                                   const ScalarGrid& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product_scalar");
  require_same_grid(metric.grid(), f.grid(), "inner_product_scalar");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i] * metric.sqrt_g[i];
  const double h = f.grid().spacing();
  return h * h * sum;
}

/// h^2 sum (F^T G H) sqrt(g), the quadrature of the embedded dot product.
inline double inner_product_vector(const MetricGrids& metric, const TangentField& a,
                                   const TangentField& b) {
  require_same_grid(a.grid(), b.grid(), "inner_product_vector");
  require_same_grid(metric.grid(), a.grid(), "inner_product_vector");
  double sum = 0.0;
  const auto& m = metric;
  for (std::size_t i = 0; i < a.f1.size(); ++i) {
    const double dotp = a.f1[i] * b.f1[i] * m.g_uu[i] +
                        (a.f1[i] * b.f2[i] + a.f2[i] * b.f1[i]) * m.g_uv[i] +
                        a.f2[i] * b.f2[i] * m.g_vv[i];
    sum += dotp * m.sqrt_g[i];
  }
  const double h = a.grid().spacing();
  return h * h * sum;
}

inline double norm(const MetricGrids& metric, const ScalarGrid& f) {
  return std::sqrt(inner_product_scalar(metric, f, f));
}

inline double norm(const MetricGrids& metric, const TangentField& field) {
  return std::sqrt(inner_product_vector(metric, field, field));
}

/// Surface area, <1, 1>.
inline double surface_area(const MetricGrids& metric) {
  double sum = 0.0;
  for (double x : metric.sqrt_g.values()) sum += x;
  const double h = metric.grid().spacing();
  return h * h * sum;
}

/// f - (<f, e> / <e, e>) e.
inline ScalarGrid remove_mean(const MetricGrids& metric, const ScalarGrid& f) {
  const double mean =
      inner_product_scalar(metric, f, ScalarGrid(f.grid(), 1.0)) / surface_area(metric);
  return f - mean;
}

}  // namespace surfcalc
