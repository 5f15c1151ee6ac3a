#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "surfcalc/calculus.hpp"

using namespace surfcalc;

namespace {

const oracle::Torus kTorus;

MetricGrids torus_metric(int n) {
  return build_metric(TorusOfRevolution{kTorus.R, kTorus.r}, Grid(n));
}

SurfaceOfRevolution wavy_profile() {
  SurfaceOfRevolution s;
  s.r.terms = {{0, 3.0, 0.0}, {1, 1.0, 0.0}, {2, 0.1, 0.0}};
  s.z.terms = {{1, 0.0, 1.4}};
  return s;
}

double max_abs(const TangentField& f) { return std::max(f.f1.max_abs(), f.f2.max_abs()); }

TangentField random_tangent(Grid g, std::uint64_t seed) {
  return TangentField(oracle::random_field(g, seed), oracle::random_field(g, seed + 1));
}

}  // namespace

TEST(Grad, ConstantHasZeroGradient) {
  const MetricGrids m = torus_metric(47);
  EXPECT_LE(max_abs(grad(m, ScalarGrid(m.grid(), 7.0))), 1e-13);
  const MetricGrids st = build_metric(reference_stellarator(), Grid(47));
  EXPECT_LE(max_abs(grad(st, ScalarGrid(st.grid(), 7.0))), 1e-12);
}

TEST(Grad, TorusSinV) {
  const MetricGrids m = torus_metric(31);
  const TangentField gf =
      grad(m, ScalarGrid::sample(m.grid(), [](double, double v) { return std::sin(v); }));
  const auto expect2 = ScalarGrid::sample(
      m.grid(), [](double u, double v) { return std::cos(v) / kTorus.g_vv(u); });
  EXPECT_LE(gf.f1.max_abs(), 1e-12);
  EXPECT_LE(oracle::max_abs_diff(gf.f2, expect2), 1e-12);
}

TEST(Grad, FlatMetricMode) {
  const MetricGrids m = flat_metric(Grid(15));
  const int a = 3, b = -2;
  const auto f = ScalarGrid::sample(m.grid(), [&](double u, double v) { return std::cos(a * u + b * v); });
  const auto s = ScalarGrid::sample(m.grid(), [&](double u, double v) { return std::sin(a * u + b * v); });
  const TangentField gf = grad(m, f);
  EXPECT_LE(oracle::max_abs_diff(gf.f1, -a * s), 1e-13);
  EXPECT_LE(oracle::max_abs_diff(gf.f2, -b * s), 1e-13);
}

TEST(Div, TorusConstantField) {
  const MetricGrids m = torus_metric(31);
  const TangentField f(ScalarGrid(m.grid(), 0.8), ScalarGrid(m.grid(), -1.3));
  const auto expect = ScalarGrid::sample(
      m.grid(), [](double u, double) { return 0.8 * kTorus.du_g_over_2g(u); });
  EXPECT_LE(oracle::max_abs_diff(div(m, f), expect), 1e-12);
}

TEST(DivCurl, RevolutionHarmonicField) {
  const MetricGrids m = build_metric(wavy_profile(), Grid(63));
  const TangentField h(ScalarGrid(m.grid(), 0.0), ScalarGrid(m.grid(), 1.0) / m.g_vv);
  EXPECT_LE(div(m, h).max_abs(), 1e-12);
  EXPECT_LE(curl(m, h).max_abs(), 1e-12);
}

TEST(LaplaceBeltrami, TorusSinV) {
  for (int n : {95, 127}) {
    const MetricGrids m = torus_metric(n);
    const ScalarGrid lb =
        laplace_beltrami(m, ScalarGrid::sample(m.grid(), [](double, double v) { return std::sin(v); }));
    const auto expect =
        ScalarGrid::sample(m.grid(), [](double u, double v) { return kTorus.lb_sin_v(u, v); });
    EXPECT_LE(oracle::max_abs_diff(lb, expect), 1e-11) << "N=" << n;
  }
}

TEST(LaplaceBeltrami, AnnihilatesConstants) {
  const MetricGrids m = torus_metric(47);
  EXPECT_LE(laplace_beltrami(m, ScalarGrid(m.grid(), 1.0)).max_abs(), 1e-13);
  const MetricGrids st = build_metric(reference_stellarator(), Grid(47));
  EXPECT_LE(laplace_beltrami(st, ScalarGrid(st.grid(), 1.0)).max_abs(), 1e-12);
}

TEST(LaplaceBeltrami, FlatSymbol) {
  const MetricGrids m = flat_metric(Grid(21));
  const auto f = ScalarGrid::sample(m.grid(), [](double u, double v) { return std::cos(4 * u - 7 * v); });
  EXPECT_LE(oracle::max_abs_diff(laplace_beltrami(m, f), -65.0 * f), 1e-11);
}

TEST(LaplaceBeltrami, ExactJetMatchesTorusClosedForm) {
  const MetricGrids m = torus_metric(63);
  const ScalarGrid lb = laplace_beltrami_exact(m, [](double, double v) {
    FunctionJet j;
    j.value = std::sin(v);
    j.dv = std::cos(v);
    j.dvv = -std::sin(v);
    return j;
  });
  const auto expect =
      ScalarGrid::sample(m.grid(), [](double u, double v) { return kTorus.lb_sin_v(u, v); });
  EXPECT_LE(oracle::max_abs_diff(lb, expect), 1e-12);
}

TEST(LaplaceBeltrami, ExactJetAgreesWithDiscreteOperatorWhenResolved) {
  // f = cos(u) sin(2 v) on the stellarator; both converge to the same limit.
  const auto jet = [](double u, double v) {
    FunctionJet j;
    j.value = std::cos(u) * std::sin(2 * v);
    j.du = -std::sin(u) * std::sin(2 * v);
    j.dv = 2 * std::cos(u) * std::cos(2 * v);
    j.duu = -j.value;
    j.duv = -2 * std::sin(u) * std::cos(2 * v);
    j.dvv = -4 * j.value;
    return j;
  };
  const MetricGrids m = build_metric(reference_stellarator(), Grid(191));
  const ScalarGrid f = ScalarGrid::sample(m.grid(), [&](double u, double v) { return jet(u, v).value; });
  const ScalarGrid exact = laplace_beltrami_exact(m, jet);
  EXPECT_LE(oracle::max_abs_diff(laplace_beltrami(m, f), exact), 1e-8 * exact.max_abs());
}

TEST(Curl, FlatRotatedGradientIsLaplacian) {
  // Curl F = -Div(n x F) and n x (n x grad f) = -grad f give Curl(n x grad f) = Delta f.
  const MetricGrids m = flat_metric(Grid(17));
  const auto f = ScalarGrid::sample(m.grid(), [](double u, double v) { return std::cos(2 * u + v); });
  const ScalarGrid c = curl(m, cross_normal(m, grad(m, f)));
  EXPECT_LE(oracle::max_abs_diff(c, -5.0 * f), 1e-12);
}

TEST(Curl, TorusIdentitiesHoldToRoundoff) {
  const MetricGrids m = torus_metric(63);
  const ScalarGrid f = oracle::random_band_limited(m.grid(), 8, 4);
  const TangentField gf = grad(m, f);
  EXPECT_LE(curl(m, gf).max_abs(), 1e-11 * max_abs(gf));
  EXPECT_LE(div(m, cross_normal(m, gf)).max_abs(), 1e-11 * max_abs(gf));
}

TEST(Curl, StellaratorIdentitiesConvergeSpectrally) {
  // curl(grad f) and -div(n x F) - curl F vanish in the limit; the discrete
  // residue is aliasing of the metric coefficients and decays with N.
  double prev_cg = 1e300, prev_cons = 1e300;
  for (int n : {47, 95, 191}) {
    const MetricGrids m = build_metric(reference_stellarator(), Grid(n));
    const ScalarGrid f = ScalarGrid::sample(
        m.grid(), [](double u, double v) { return std::cos(u) + std::sin(2 * v); });
    const double cg = curl(m, grad(m, f)).max_abs();
    const TangentField F(ScalarGrid::sample(m.grid(), [](double u, double v) { return std::sin(u + v); }),
                         ScalarGrid::sample(m.grid(), [](double u, double) { return std::cos(2 * u); }));
    const double cons = (curl(m, F) + div(m, cross_normal(m, F))).max_abs();
    EXPECT_LT(cg, 0.01 * prev_cg) << "N=" << n;
    EXPECT_LT(cons, 0.01 * prev_cons) << "N=" << n;
    prev_cg = cg;
    prev_cons = cons;
  }
  EXPECT_LT(prev_cg, 1e-7);
  EXPECT_LT(prev_cons, 1e-8);
}

TEST(CrossNormal, TwiceIsMinusIdentity) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(47));
  const TangentField f = random_tangent(m.grid(), 17);
  TangentField r = cross_normal(m, cross_normal(m, f));
  r += f;
  EXPECT_LE(max_abs(r), 1e-12 * max_abs(f));
}

TEST(CrossNormal, FlatRotation) {
  const MetricGrids m = flat_metric(Grid(9));
  const TangentField f = random_tangent(m.grid(), 3);
  const TangentField r = cross_normal(m, f);
  EXPECT_LE(oracle::max_abs_diff(r.f1, -f.f2), 0.0);
  EXPECT_LE(oracle::max_abs_diff(r.f2, f.f1), 0.0);
}

TEST(CrossNormal, TorusUnitU) {
  const MetricGrids m = torus_metric(21);
  const TangentField r =
      cross_normal(m, TangentField(ScalarGrid(m.grid(), 1.0), ScalarGrid(m.grid(), 0.0)));
  const auto expect = ScalarGrid::sample(m.grid(), [](double u, double) { return 1.0 / kTorus.rho(u); });
  EXPECT_LE(r.f1.max_abs(), 1e-15);
  EXPECT_LE(oracle::max_abs_diff(r.f2, expect), 1e-15);
}

TEST(CrossNormal, AgreesWithAmbientCrossProduct) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(23));
  const TangentField f = random_tangent(m.grid(), 5);
  const VectorGrid lhs = to_ambient(m, cross_normal(m, f));
  const VectorGrid rhs = cross(m.normal, to_ambient(m, f));
  EXPECT_LE(oracle::max_abs_diff(lhs.x, rhs.x), 1e-12 * rhs.x.max_abs());
  EXPECT_LE(oracle::max_abs_diff(lhs.y, rhs.y), 1e-12 * rhs.y.max_abs());
  EXPECT_LE(oracle::max_abs_diff(lhs.z, rhs.z), 1e-12 * rhs.z.max_abs());
}

TEST(ProjectTangential, NormalProjectsToZero) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(23));
  EXPECT_LE(max_abs(project_tangential(m, m.normal)), 1e-12);
}

TEST(ProjectTangential, TangentBasisVector) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(23));
  const TangentField f = project_tangential(m, m.surface.du);
  EXPECT_LE(oracle::max_abs_diff(f.f1, ScalarGrid(m.grid(), 1.0)), 1e-13);
  EXPECT_LE(f.f2.max_abs(), 1e-13);
}

TEST(ProjectTangential, RemovesNormalComponent) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(23));
  const VectorGrid t(oracle::random_field(m.grid(), 1), oracle::random_field(m.grid(), 2),
                     oracle::random_field(m.grid(), 3));
  const VectorGrid back = to_ambient(m, project_tangential(m, t));
  const ScalarGrid tn = dot(t, m.normal);
  EXPECT_LE(oracle::max_abs_diff(back.x, t.x - tn * m.normal.x), 1e-12);
  EXPECT_LE(oracle::max_abs_diff(back.y, t.y - tn * m.normal.y), 1e-12);
  EXPECT_LE(oracle::max_abs_diff(back.z, t.z - tn * m.normal.z), 1e-12);
}

TEST(InnerProduct, TorusArea) {
  const MetricGrids m = torus_metric(31);
  const ScalarGrid one(m.grid(), 1.0);
  EXPECT_NEAR(inner_product_scalar(m, one, one), kTorus.area(), 1e-10 * kTorus.area());
  EXPECT_NEAR(surface_area(m), kTorus.area(), 1e-10 * kTorus.area());
}

TEST(InnerProduct, FlatOrthogonalModes) {
  const MetricGrids m = flat_metric(Grid(15));
  const auto s = ScalarGrid::sample(m.grid(), [](double u, double) { return std::sin(u); });
  const auto c = ScalarGrid::sample(m.grid(), [](double u, double) { return std::cos(u); });
  EXPECT_NEAR(inner_product_scalar(m, s, c), 0.0, 1e-13);
  EXPECT_NEAR(inner_product_scalar(m, s, s), 2 * std::numbers::pi * std::numbers::pi, 1e-12);
}

TEST(InnerProduct, VectorProductMatchesAmbientDot) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(23));
  const TangentField a = random_tangent(m.grid(), 7), b = random_tangent(m.grid(), 9);
  const ScalarGrid pointwise = dot(to_ambient(m, a), to_ambient(m, b));
  const ScalarGrid one(m.grid(), 1.0);
  const double expect = inner_product_scalar(m, pointwise, one);
  EXPECT_NEAR(inner_product_vector(m, a, b), expect, 1e-12 * std::abs(expect));
}

TEST(InnerProduct, GradientAndRotatedGradientAreOrthogonal) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(95));
  const ScalarGrid a = oracle::random_band_limited(m.grid(), 6, 1);
  const ScalarGrid b = oracle::random_band_limited(m.grid(), 6, 2);
  const TangentField ga = grad(m, a), gb = grad(m, b);
  const TangentField rb = cross_normal(m, gb);
  EXPECT_LE(std::abs(inner_product_vector(m, ga, rb)), 1e-10 * norm(m, ga) * norm(m, rb));
}

TEST(RemoveMean, ProducesMeanZero) {
  const MetricGrids m = build_metric(reference_stellarator(), Grid(23));
  const ScalarGrid f = remove_mean(m, oracle::random_field(m.grid(), 4) + 3.0);
  EXPECT_NEAR(inner_product_scalar(m, f, ScalarGrid(m.grid(), 1.0)), 0.0, 1e-12);
}

TEST(TangentFieldAlgebra, ArithmeticOperators) {
  const Grid g(7);
  const TangentField a = random_tangent(g, 1), b = random_tangent(g, 3);
  const TangentField c = 2.0 * a - b + (-a);
  EXPECT_LE(oracle::max_abs_diff(c.f1, a.f1 - b.f1), 1e-15);
  EXPECT_LE(oracle::max_abs_diff(c.f2, a.f2 - b.f2), 1e-15);
  EXPECT_THROW(TangentField(ScalarGrid(Grid(7)), ScalarGrid(Grid(9))), std::invalid_argument);
}
