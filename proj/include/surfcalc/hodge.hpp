#pragma once

// Hodge decomposition j = grad(alpha) + n x grad(beta) + c1 h1 + c2 h2 of a
// tangential field on a genus-one surface.

#include <cmath>
#include <utility>

#include "surfcalc/calculus.hpp"
#include "surfcalc/krylov.hpp"
#include "surfcalc/solvers.hpp"

namespace surfcalc {

struct HodgeDecomposition {
  ScalarGrid alpha;  // mean-zero potential of the curl-free part
  ScalarGrid beta;   // mean-zero stream function of the divergence-free part
  double c1 = 0.0;
  double c2 = 0.0;
  TangentField grad_part;      // grad(alpha)
  TangentField rot_part;       // n x grad(beta)
  TangentField harmonic_part;  // c1 h1 + c2 h2
  SolveReport alpha_report;
  SolveReport beta_report;
};

/// Relative Gram determinant below which the harmonic basis is rejected.
inline constexpr double kSingularGram = 1e-12;

/// Solves Delta alpha = Div j and Delta beta = -Div(n x j), and the 2 x 2 Gram
/// system <h_i, h_k> c_k = <h_i, j> for the harmonic coefficients.
inline HodgeDecomposition hodge_decompose(const MetricGrids& metric,
                                          const TangentField& j,
                                          const TangentField& h1,
                                          const TangentField& h2,
                                          const KrylovConfig& cfg) {
  const double g11 = inner_product_vector(metric, h1, h1);
  const double g12 = inner_product_vector(metric, h1, h2);
  const double g22 = inner_product_vector(metric, h2, h2);
  const double det = g11 * g22 - g12 * g12;
  if (!(det > kSingularGram * g11 * g22)) {
    throw SolverError(SolverError::Kind::kSingularGram,
                      "hodge_decompose: singular Gram matrix of harmonic basis");
  }
  const double p1 = inner_product_vector(metric, h1, j);
  const double p2 = inner_product_vector(metric, h2, j);
  const double c1 = (g22 * p1 - g12 * p2) / det;
  const double c2 = (g11 * p2 - g12 * p1) / det;

  const ScalarGrid rhs_alpha = div(metric, j);
  const ScalarGrid rhs_beta = -div(metric, cross_normal(metric, j));
  LaplaceSolution alpha = solve_laplace_beltrami(metric, rhs_alpha, cfg);
  LaplaceSolution beta = solve_laplace_beltrami(metric, rhs_beta, cfg);

  TangentField grad_part = grad(metric, alpha.phi);
  TangentField rot_part = cross_normal(metric, grad(metric, beta.phi));
  TangentField harmonic_part = c1 * h1;
  harmonic_part.add_scaled(c2, h2);

  return {std::move(alpha.phi),     std::move(beta.phi), c1,           c2,
          std::move(grad_part),     std::move(rot_part), std::move(harmonic_part),
          alpha.report,             beta.report};
}

struct ReconstructionError {
  double absolute = 0.0;
  double relative = 0.0;  // absolute / ||j||, or absolute when j = 0
};

/// ||j - grad_part - rot_part - harmonic_part|| in the vector L2 norm.
inline ReconstructionError reconstruction_error(const MetricGrids& metric,
                                                const TangentField& j,
                                                const HodgeDecomposition& d) {
  TangentField residual = j;
  residual -= d.grad_part;
  residual -= d.rot_part;
  residual -= d.harmonic_part;
  const double abs_err = norm(metric, residual);
  const double j_norm = norm(metric, j);
  return {abs_err, j_norm > 0.0 ? abs_err / j_norm : abs_err};
}

}  // namespace surfcalc
