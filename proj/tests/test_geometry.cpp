#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "surfcalc/geometry.hpp"

using namespace surfcalc;

namespace {

double max_rel_diff(const ScalarGrid& a, const ScalarGrid& b) {
  return oracle::max_abs_diff(a, b) / std::max(1.0, b.max_abs());
}

SurfaceOfRevolution wavy_profile() {
  SurfaceOfRevolution s;
  s.r.terms = {{0, 3.0, 0.0}, {1, 1.0, 0.0}, {2, 0.1, 0.0}};
  s.z.terms = {{1, 0.0, 1.4}};
  return s;
}

}  // namespace

TEST(EvaluateSurface, TorusAtOrigin) {
  const auto p = evaluate_point(TorusOfRevolution{3.0, 1.0}, 0.0, 0.0);
  EXPECT_NEAR(p[0][0], 4.0, 1e-15);
  EXPECT_NEAR(p[0][1], 0.0, 1e-15);
  EXPECT_NEAR(p[0][2], 0.0, 1e-15);
  EXPECT_NEAR(p[1][0], 0.0, 1e-15);
  EXPECT_NEAR(p[1][1], 0.0, 1e-15);
  EXPECT_NEAR(p[1][2], 1.0, 1e-15);
  EXPECT_NEAR(p[2][0], 0.0, 1e-15);
  EXPECT_NEAR(p[2][1], 4.0, 1e-15);
  EXPECT_NEAR(p[2][2], 0.0, 1e-15);
}

TEST(EvaluateSurface, ZeroStretchCollapsesToMagneticAxis) {
  GarabedianStellarator st = reference_stellarator();
  st.stretch = {0.0, 0.0};
  for (double v : {0.0, 0.7, 2.5, 4.0}) {
    for (double u : {0.0, 1.3, 3.3}) {
      const auto p = evaluate_point(st, u, v);
      const double r0 = 4.8 + 0.1 * std::cos(v);
      EXPECT_NEAR(p[0][0], r0 * std::cos(v), 1e-14);
      EXPECT_NEAR(p[0][1], r0 * std::sin(v), 1e-14);
      EXPECT_NEAR(p[0][2], 0.1 * std::sin(v), 1e-14);
    }
  }
}

TEST(EvaluateSurface, StellaratorTangentsMatchCentralDifferences) {
  const SurfaceSpec spec = reference_stellarator();
  const Grid grid(47);
  const SurfaceSample s = evaluate_surface(spec, grid);
  double worst = 0.0;
  for (int l = 0; l < grid.size(); l += 3) {
    for (int k = 0; k < grid.size(); k += 3) {
      const auto t = oracle::central_difference_tangents(spec, grid.node(k), grid.node(l), 1e-6);
      const std::size_t i = grid.linear(k, l);
      worst = std::max({worst, std::abs(t.du[0] - s.du.x[i]), std::abs(t.du[1] - s.du.y[i]),
                        std::abs(t.du[2] - s.du.z[i]), std::abs(t.dv[0] - s.dv.x[i]),
                        std::abs(t.dv[1] - s.dv.y[i]), std::abs(t.dv[2] - s.dv.z[i])});
    }
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(EvaluateSurface, RevolutionTangentsMatchCentralDifferences) {
  const SurfaceSpec spec = wavy_profile();
  for (double u : {0.2, 1.9, 4.4}) {
    for (double v : {0.1, 3.0}) {
      const auto t = oracle::central_difference_tangents(spec, u, v, 1e-6);
      const auto p = evaluate_point(spec, u, v);
      for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(t.du[c], p[1][c], 1e-8);
        EXPECT_NEAR(t.dv[c], p[2][c], 1e-8);
      }
    }
  }
}

TEST(Validate, RejectsBadSpecs) {
  EXPECT_THROW(validate(TorusOfRevolution{1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(validate(TorusOfRevolution{3.0, 0.0}), std::invalid_argument);
  GarabedianStellarator st = reference_stellarator();
  st.s = 1.5;
  EXPECT_THROW(validate(st), std::invalid_argument);
  st = reference_stellarator();
  st.deltas.clear();
  EXPECT_THROW(validate(st), std::invalid_argument);
  EXPECT_THROW(validate(SurfaceOfRevolution{}), std::invalid_argument);
  EXPECT_NO_THROW(validate(reference_stellarator()));
}

TEST(BuildMetric, TorusMatchesClosedForm) {
  const oracle::Torus t;
  const Grid grid(31);
  const MetricGrids m = build_metric(TorusOfRevolution{t.R, t.r}, grid);
  const auto gvv = ScalarGrid::sample(grid, [&](double u, double) { return t.g_vv(u); });
  const auto sg = ScalarGrid::sample(grid, [&](double u, double) { return t.sqrt_g(u); });
  const auto dug = ScalarGrid::sample(grid, [&](double u, double) { return t.du_g_over_2g(u); });
  EXPECT_LE(max_rel_diff(m.g_uu, ScalarGrid(grid, 1.0)), 1e-12);
  EXPECT_LE(m.g_uv.max_abs(), 1e-12);
  EXPECT_LE(max_rel_diff(m.g_vv, gvv), 1e-12);
  EXPECT_LE(max_rel_diff(m.g, gvv), 1e-12);
  EXPECT_LE(max_rel_diff(m.sqrt_g, sg), 1e-12);
  EXPECT_LE(max_rel_diff(m.du_g_over_2g, dug), 1e-12);
  EXPECT_LE(m.dv_g_over_2g.max_abs(), 1e-12);
}

TEST(BuildMetric, SurfaceOfRevolutionIsDiagonal) {
  const SurfaceOfRevolution s = wavy_profile();
  const Grid grid(41);
  const MetricGrids m = build_metric(s, grid);
  const auto guu = ScalarGrid::sample(grid, [&](double u, double) {
    const double a = s.r.derivative(u), b = s.z.derivative(u);
    return a * a + b * b;
  });
  const auto gvv = ScalarGrid::sample(grid, [&](double u, double) {
    const double r = s.r.value(u);
    return r * r;
  });
  EXPECT_LE(m.g_uv.max_abs(), 1e-12);
  EXPECT_LE(max_rel_diff(m.g_uu, guu), 1e-12);
  EXPECT_LE(max_rel_diff(m.g_vv, gvv), 1e-12);
}

TEST(BuildMetric, ReferenceStellaratorIsNondegenerate) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(47));
  double min_g = 1e300;
  for (double x : m.g.values()) min_g = std::min(min_g, x);
  EXPECT_GT(min_g, 0.0);
}

TEST(BuildMetric, NormalIsUnitAndOrthogonal) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(47));
  const auto& s = m.surface;
  const ScalarGrid nn = dot(m.normal, m.normal);
  const ScalarGrid ndu = dot(m.normal, s.du), ndv = dot(m.normal, s.dv);
  for (std::size_t i = 0; i < nn.size(); ++i) {
    EXPECT_NEAR(nn[i], 1.0, 1e-13);
    EXPECT_LE(std::abs(ndu[i]), 1e-12 * std::sqrt(m.g_uu[i]));
    EXPECT_LE(std::abs(ndv[i]), 1e-12 * std::sqrt(m.g_vv[i]));
  }
}

TEST(BuildMetric, LagrangeIdentity) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(47));
  const VectorGrid c = cross(m.surface.du, m.surface.dv);
  const ScalarGrid cc = dot(c, c);
  for (std::size_t i = 0; i < cc.size(); ++i) EXPECT_NEAR(m.g[i], cc[i], 1e-12 * cc[i]);
}

TEST(BuildMetric, SpectralMetricDerivativeMatchesCentralDifference) {
  const SurfaceSpec spec = reference_stellarator();
  auto g_at = [&](double u, double v) {
    const auto p = evaluate_point(spec, u, v);
    auto d = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
      return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    return d(p[1], p[1]) * d(p[2], p[2]) - d(p[1], p[2]) * d(p[1], p[2]);
  };
  for (int n : {95, 191}) {
    const Grid grid(n);
    const MetricGrids m = build_metric(spec, grid);
    double worst = 0.0;
    for (int l = 0; l < n; l += 5) {
      for (int k = 0; k < n; k += 5) {
        const std::size_t i = grid.linear(k, l);
        const double spectral = 2.0 * m.g[i] * m.du_g_over_2g[i];
        const double fd = oracle::central_du(g_at, grid.node(k), grid.node(l), 1e-5);
        worst = std::max(worst, std::abs(spectral - fd));
      }
    }
    EXPECT_LE(worst, 1e-6) << "N=" << n;
  }
}

TEST(BuildMetric, InvariantUnderRigidRotation) {
  const Grid grid(47);
  SurfaceSample s = evaluate_surface(reference_stellarator(), grid);
  const MetricGrids ref = build_metric(s);

  // Rotation by 0.7 rad about the axis (1, 2, 2)/3.
  const double a = 0.7, c = std::cos(a), sn = std::sin(a);
  const double k[3] = {1.0 / 3, 2.0 / 3, 2.0 / 3};
  double rot[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) rot[i][j] = (i == j ? c : 0.0) + (1 - c) * k[i] * k[j];
  }
  rot[0][1] -= sn * k[2];
  rot[0][2] += sn * k[1];
  rot[1][0] += sn * k[2];
  rot[1][2] -= sn * k[0];
  rot[2][0] -= sn * k[1];
  rot[2][1] += sn * k[0];
  auto rotate = [&](VectorGrid& v) {
    for (std::size_t i = 0; i < v.x.size(); ++i) {
      const double p[3] = {v.x[i], v.y[i], v.z[i]};
      v.x[i] = rot[0][0] * p[0] + rot[0][1] * p[1] + rot[0][2] * p[2];
      v.y[i] = rot[1][0] * p[0] + rot[1][1] * p[1] + rot[1][2] * p[2];
      v.z[i] = rot[2][0] * p[0] + rot[2][1] * p[1] + rot[2][2] * p[2];
    }
  };
  rotate(s.position);
  rotate(s.du);
  rotate(s.dv);
  const MetricGrids rotated = build_metric(s);

  const std::pair<const ScalarGrid*, const ScalarGrid*> fields[] = {
      {&ref.g_uu, &rotated.g_uu},
      {&ref.g_uv, &rotated.g_uv},
      {&ref.g_vv, &rotated.g_vv},
      {&ref.g, &rotated.g},
      {&ref.sqrt_g, &rotated.sqrt_g},
      {&ref.du_g_over_2g, &rotated.du_g_over_2g},
      {&ref.dv_g_over_2g, &rotated.dv_g_over_2g},
      {&ref.vv_over_g, &rotated.vv_over_g},
      {&ref.neg_uv_over_g, &rotated.neg_uv_over_g},
      {&ref.uu_over_g, &rotated.uu_over_g},
      {&ref.uu_over_sqrt_g, &rotated.uu_over_sqrt_g},
      {&ref.uv_over_sqrt_g, &rotated.uv_over_sqrt_g},
      {&ref.vv_over_sqrt_g, &rotated.vv_over_sqrt_g},
      {&ref.du_uv_over_sqrt_g, &rotated.du_uv_over_sqrt_g},
      {&ref.dv_uv_over_sqrt_g, &rotated.dv_uv_over_sqrt_g},
      {&ref.dv_uu_over_sqrt_g, &rotated.dv_uu_over_sqrt_g},
      {&ref.du_vv_over_sqrt_g, &rotated.du_vv_over_sqrt_g},
  };
  for (const auto& [a_, b_] : fields) EXPECT_LE(max_rel_diff(*b_, *a_), 1e-13);
}

TEST(BuildMetric, DegenerateParametrizationThrows) {
  SurfaceOfRevolution pinched;  // z and r constant in u: d_u x = 0
  pinched.r.terms = {{0, 2.0, 0.0}};
  EXPECT_THROW(build_metric(pinched, Grid(15)), GeometryError);
}

TEST(FlatMetric, IdentityCoefficients) {
  const MetricGrids m = flat_metric(Grid(9));
  EXPECT_LE(max_rel_diff(m.g, ScalarGrid(Grid(9), 1.0)), 0.0);
  EXPECT_EQ(m.du_g_over_2g.max_abs(), 0.0);
  EXPECT_EQ(m.neg_uv_over_g.max_abs(), 0.0);
  EXPECT_EQ(m.du_vv_over_sqrt_g.max_abs(), 0.0);
}
