#pragma once

// Genus-one surface parametrizations x(u, v) and the pointwise metric data
// consumed by the surface operators.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "surfcalc/spectral.hpp"

namespace surfcalc {

/// One term a cos(k t) + b sin(k t) of a trigonometric polynomial.
struct TrigTerm {
  int harmonic = 0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// Real 2 pi-periodic trigonometric polynomial.
struct TrigSeries {
  std::vector<TrigTerm> terms;

  double value(double t) const noexcept {
    double s = 0.0;
    for (const auto& term : terms) {
      const double a = term.harmonic * t;
      s += term.cos_coeff * std::cos(a) + term.sin_coeff * std::sin(a);
    }
    return s;
  }
  double derivative(double t) const noexcept {
    double s = 0.0;
    for (const auto& term : terms) {
      const double k = term.harmonic;
      const double a = k * t;
      s += k * (term.sin_coeff * std::cos(a) - term.cos_coeff * std::sin(a));
    }
    return s;
  }
};

/// ((R + r cos u) cos v, (R + r cos u) sin v, r sin u).
struct TorusOfRevolution {
  double major_radius = 3.0;
  double minor_radius = 1.0;
};

/// (r(u) cos v, r(u) sin v, z(u)) with r > 0.
struct SurfaceOfRevolution {
  TrigSeries r;
  TrigSeries z;
};

/// Coefficient Delta_{m,n} of the outer-surface modes cos/sin((1 - m) u + n v).
struct DeltaCoefficient {
  int m = 0;
  int n = 0;
  double value = 0.0;
};

/// Stretch function R(s, u, v) = s (a0 + a1 (1 - s) cos u sin v).
struct StretchFunction {
  double a0 = 1.0;
  double a1 = 0.01;
};

/// Garabedian-coordinate stellarator surface at radius-like parameter s:
/// interpolates between the magnetic axis (r0(v) cos v, r0(v) sin v, z0(v))
/// and the outer trigonometric surface through the stretch R(s, u, v).
struct GarabedianStellarator {
  TrigSeries axis_r;
  TrigSeries axis_z;
  std::vector<DeltaCoefficient> deltas;
  double s = 0.8;
  StretchFunction stretch;
};

using SurfaceSpec =
    std::variant<TorusOfRevolution, SurfaceOfRevolution, GarabedianStellarator>;

/// The stellarator instance used for the convergence studies.
inline GarabedianStellarator reference_stellarator() {
  GarabedianStellarator st;
  st.axis_r.terms = {{0, 4.8, 0.0}, {1, 0.1, 0.0}};
  st.axis_z.terms = {{1, 0.0, 0.1}};
  st.deltas = {{-1, -1, 0.17}, {-1, 0, 0.11}, {0, 0, 1.0},  {0, 1, 0.07},
               {1, 0, 4.5},    {2, 0, -0.25}, {2, 1, -0.45}};
  st.s = 0.8;
  st.stretch = {1.0, 0.01};
  return st;
}

inline void validate(const SurfaceSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TorusOfRevolution>) {
          if (!(s.major_radius > 0.0) || !(s.minor_radius > 0.0) ||
              !(s.minor_radius < s.major_radius)) {
            throw std::invalid_argument(
                "torus: need 0 < minor_radius < major_radius");
          }
        } else if constexpr (std::is_same_v<T, SurfaceOfRevolution>) {
          if (s.r.terms.empty()) {
            throw std::invalid_argument("surface of revolution: empty r(u)");
          }
        } else {
          if (!(s.s > 0.0) || s.s > 1.0) {
            throw std::invalid_argument("stellarator: s must lie in (0, 1]");
          }
          if (s.deltas.empty()) {
            throw std::invalid_argument("stellarator: no Delta coefficients");
          }
        }
      },
      spec);
}

/// Three nodal grids holding the Cartesian components of a vector field.
struct VectorGrid {
  ScalarGrid x, y, z;

  explicit VectorGrid(Grid grid) : x(grid), y(grid), z(grid) {}
  VectorGrid(ScalarGrid x_, ScalarGrid y_, ScalarGrid z_)
      : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}

  const Grid& grid() const noexcept { return x.grid(); }
};

inline ScalarGrid dot(const VectorGrid& a, const VectorGrid& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline VectorGrid cross(const VectorGrid& a, const VectorGrid& b) {
  return VectorGrid(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
                    a.x * b.y - a.y * b.x);
}

/// Embedding x(u, v) and analytic tangents d_u x, d_v x at every node.
struct SurfaceSample {
  VectorGrid position;
  VectorGrid du;
  VectorGrid dv;

  explicit SurfaceSample(Grid grid) : position(grid), du(grid), dv(grid) {}
  const Grid& grid() const noexcept { return position.grid(); }
};

namespace detail {

struct Point {
  double x, y, z;
};

struct LocalFrame {
  Point position, du, dv;
};

inline LocalFrame revolution_frame(double r, double dr, double z, double dz,
                                   double v) {
  const double c = std::cos(v), s = std::sin(v);
  return {{r * c, r * s, z}, {dr * c, dr * s, dz}, {-r * s, r * c, 0.0}};
}

inline LocalFrame evaluate_point(const TorusOfRevolution& t, double u, double v) {
  return revolution_frame(t.major_radius + t.minor_radius * std::cos(u),
                          -t.minor_radius * std::sin(u),
                          t.minor_radius * std::sin(u),
                          t.minor_radius * std::cos(u), v);
}

inline LocalFrame evaluate_point(const SurfaceOfRevolution& s, double u, double v) {
  return revolution_frame(s.r.value(u), s.r.derivative(u), s.z.value(u),
                          s.z.derivative(u), v);
}

// rho = r0 + R (X - r0), x = rho cos v, y = rho sin v, z = z0 + R (Z - z0),
// differentiated by the product and chain rules.
inline LocalFrame evaluate_point(const GarabedianStellarator& st, double u,
                                 double v) {
  double X = 0.0, Xu = 0.0, Xv = 0.0, Z = 0.0, Zu = 0.0, Zv = 0.0;
  for (const auto& d : st.deltas) {
    const double ku = 1.0 - d.m;
    const double kv = d.n;
    const double theta = ku * u + kv * v;
    const double c = std::cos(theta), s = std::sin(theta);
    X += d.value * c;
    Xu -= d.value * ku * s;
    Xv -= d.value * kv * s;
    Z += d.value * s;
    Zu += d.value * ku * c;
    Zv += d.value * kv * c;
  }
  const double r0 = st.axis_r.value(v), r0v = st.axis_r.derivative(v);
  const double z0 = st.axis_z.value(v), z0v = st.axis_z.derivative(v);

  const double amp = st.s * st.stretch.a1 * (1.0 - st.s);
  const double R = st.s * st.stretch.a0 + amp * std::cos(u) * std::sin(v);
  const double Ru = -amp * std::sin(u) * std::sin(v);
  const double Rv = amp * std::cos(u) * std::cos(v);

  const double rho = r0 + R * (X - r0);
  const double rho_u = Ru * (X - r0) + R * Xu;
  const double rho_v = r0v + Rv * (X - r0) + R * (Xv - r0v);
  const double z = z0 + R * (Z - z0);
  const double zu = Ru * (Z - z0) + R * Zu;
  const double zv = z0v + Rv * (Z - z0) + R * (Zv - z0v);

  const double cv = std::cos(v), sv = std::sin(v);
  return {{rho * cv, rho * sv, z},
          {rho_u * cv, rho_u * sv, zu},
          {-rho * sv + rho_v * cv, rho * cv + rho_v * sv, zv}};
}

}  // namespace detail

/// Embedding position and tangents of the surface at (u, v).
inline std::array<std::array<double, 3>, 3> evaluate_point(const SurfaceSpec& spec,
                                                           double u, double v) {
  const auto f = std::visit(
      [&](const auto& s) { return detail::evaluate_point(s, u, v); }, spec);
  return {{{f.position.x, f.position.y, f.position.z},
           {f.du.x, f.du.y, f.du.z},
           {f.dv.x, f.dv.y, f.dv.z}}};
}

/// Evaluates the embedding and its analytic tangents at every grid node.
inline SurfaceSample evaluate_surface(const SurfaceSpec& spec, Grid grid) {
  validate(spec);
  SurfaceSample out(grid);
  const int n = grid.size();
  std::visit(
      [&](const auto& s) {
        for (int l = 0; l < n; ++l) {
          for (int k = 0; k < n; ++k) {
            const auto f = detail::evaluate_point(s, grid.node(k), grid.node(l));
            out.position.x(k, l) = f.position.x;
            out.position.y(k, l) = f.position.y;
            out.position.z(k, l) = f.position.z;
            out.du.x(k, l) = f.du.x;
            out.du.y(k, l) = f.du.y;
            out.du.z(k, l) = f.du.z;
            out.dv.x(k, l) = f.dv.x;
            out.dv.y(k, l) = f.dv.y;
            out.dv.z(k, l) = f.dv.z;
          }
        }
      },
      spec);
  return out;
}

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pointwise metric data on a shared grid. Besides G, g, sqrt(g) and the unit
/// normal, holds every diagonal coefficient used by the discrete operators.
struct MetricGrids {
  SurfaceSample surface;
  ScalarGrid g_uu, g_uv, g_vv;
  ScalarGrid g;       // det G
  ScalarGrid sqrt_g;  // area element
  VectorGrid normal;

  ScalarGrid du_g_over_2g;  // d_u g / (2 g)
  ScalarGrid dv_g_over_2g;  // d_v g / (2 g)
  ScalarGrid vv_over_g;     // G_vv / g
  ScalarGrid neg_uv_over_g; // -G_uv / g
  ScalarGrid uu_over_g;     // G_uu / g
  ScalarGrid uu_over_sqrt_g;
  ScalarGrid uv_over_sqrt_g;
  ScalarGrid vv_over_sqrt_g;
  ScalarGrid du_uv_over_sqrt_g;  // d_u G_uv / sqrt(g)
  ScalarGrid dv_uv_over_sqrt_g;  // d_v G_uv / sqrt(g)
  ScalarGrid dv_uu_over_sqrt_g;  // d_v G_uu / sqrt(g)
  ScalarGrid du_vv_over_sqrt_g;  // d_u G_vv / sqrt(g)

  const Grid& grid() const noexcept { return g.grid(); }
};

namespace detail {

inline MetricGrids assemble_metric(SurfaceSample surface, ScalarGrid guu,
                                   ScalarGrid guv, ScalarGrid gvv,
                                   VectorGrid normal) {
  ScalarGrid g = guu * gvv - guv * guv;
  const double min_guu = *std::min_element(guu.values().begin(), guu.values().end());
  const double min_g = *std::min_element(g.values().begin(), g.values().end());
  if (!(min_g > 0.0) || !(min_guu > 0.0)) {
    throw GeometryError("degenerate parametrization: min g = " +
                        std::to_string(min_g) +
                        ", min G_uu = " + std::to_string(min_guu));
  }
  ScalarGrid sqrt_g = g.map([](double x) { return std::sqrt(x); });

  RealSpectrum g_hat = rfft2(g);
  ScalarGrid two_g = 2.0 * g;
  ScalarGrid du_g = partial_u(g_hat) / two_g;
  ScalarGrid dv_g = partial_v(std::move(g_hat)) / two_g;

  RealSpectrum uv_hat = rfft2(guv);
  ScalarGrid du_uv = partial_u(uv_hat) / sqrt_g;
  ScalarGrid dv_uv = partial_v(std::move(uv_hat)) / sqrt_g;
  ScalarGrid dv_uu = partial_v(guu) / sqrt_g;
  ScalarGrid du_vv = partial_u(gvv) / sqrt_g;

  ScalarGrid vv_over_g = gvv / g;
  ScalarGrid neg_uv_over_g = -(guv / g);
  ScalarGrid uu_over_g = guu / g;
  ScalarGrid uu_over_sqrt_g = guu / sqrt_g;
  ScalarGrid uv_over_sqrt_g = guv / sqrt_g;
  ScalarGrid vv_over_sqrt_g = gvv / sqrt_g;

  return MetricGrids{std::move(surface),
                     std::move(guu),
                     std::move(guv),
                     std::move(gvv),
                     std::move(g),
                     std::move(sqrt_g),
                     std::move(normal),
                     std::move(du_g),
                     std::move(dv_g),
                     std::move(vv_over_g),
                     std::move(neg_uv_over_g),
                     std::move(uu_over_g),
                     std::move(uu_over_sqrt_g),
                     std::move(uv_over_sqrt_g),
                     std::move(vv_over_sqrt_g),
                     std::move(du_uv),
                     std::move(dv_uv),
                     std::move(dv_uu),
                     std::move(du_vv)};
}

}  // namespace detail

/// Builds the metric from sampled tangents. Metric-entry derivatives are
/// spectral derivatives of the nodal metric grids. Throws GeometryError if
/// g or G_uu is not strictly positive at every node.
inline MetricGrids build_metric(SurfaceSample surface) {
  ScalarGrid guu = dot(surface.du, surface.du);
  ScalarGrid guv = dot(surface.du, surface.dv);
  ScalarGrid gvv = dot(surface.dv, surface.dv);
  VectorGrid n = cross(surface.du, surface.dv);
  ScalarGrid len = dot(n, n).map([](double x) { return std::sqrt(x); });
  if (!(*std::min_element(len.values().begin(), len.values().end()) > 0.0)) {
    throw GeometryError("degenerate parametrization: tangents are parallel");
  }
  n.x /= len;
  n.y /= len;
  n.z /= len;
  return detail::assemble_metric(std::move(surface), std::move(guu),
                                 std::move(guv), std::move(gvv), std::move(n));
}

inline MetricGrids build_metric(const SurfaceSpec& spec, Grid grid) {
  return build_metric(evaluate_surface(spec, grid));
}

/// Metric of the flat torus, G = I. There is no isometric embedding in R^3,
/// so the tangents are the unit vectors e_x, e_y, the normal is e_z and the
/// positions are (u, v, 0).
inline MetricGrids flat_metric(Grid grid) {
  SurfaceSample s(grid);
  s.position.x = ScalarGrid::sample(grid, [](double u, double) { return u; });
  s.position.y = ScalarGrid::sample(grid, [](double, double v) { return v; });
  s.du.x = ScalarGrid(grid, 1.0);
  s.dv.y = ScalarGrid(grid, 1.0);
  VectorGrid n(grid);
  n.z = ScalarGrid(grid, 1.0);
  return detail::assemble_metric(std::move(s), ScalarGrid(grid, 1.0),
                                 ScalarGrid(grid, 0.0), ScalarGrid(grid, 1.0),
                                 std::move(n));
}

}  // namespace surfcalc
