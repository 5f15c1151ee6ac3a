#pragma once

// Left-preconditioned BiCGStab (van der Vorst) on dense std::vector<double>
// iterates with operator callbacks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace surfcalc {

using Vector = std::vector<double>;

struct KrylovConfig {
  double rel_tolerance = 1e-13;
  int max_iterations = 500;
  std::uint64_t rng_seed = 20240601;
  /// Off only for diagnostics (identity in place of the flat preconditioner).
  bool precondition = true;

  void validate() const {
    if (!(rel_tolerance > 0.0)) {
      throw std::invalid_argument("KrylovConfig: rel_tolerance must be > 0");
    }
    if (max_iterations < 1) {
      throw std::invalid_argument("KrylovConfig: max_iterations must be >= 1");
    }
  }
};

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  double wall_time = 0.0;  // seconds
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { kBreakdown, kMaxIterations, kDegenerateNullVector, kSingularGram };

  SolverError(Kind kind, const std::string& what, SolveReport report = {})
      : std::runtime_error(what), kind_(kind), report_(report) {}

  Kind kind() const noexcept { return kind_; }
  const SolveReport& report() const noexcept { return report_; }

 private:
  Kind kind_;
  SolveReport report_;
};

inline const char* to_string(SolverError::Kind kind) {
  switch (kind) {
    case SolverError::Kind::kBreakdown: return "Breakdown";
    case SolverError::Kind::kMaxIterations: return "MaxIterations";
    case SolverError::Kind::kDegenerateNullVector: return "DegenerateNullVector";
    case SolverError::Kind::kSingularGram: return "SingularGram";
  }
  return "Unknown";
}

namespace detail {

inline double dot(const Vector& a, const Vector& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) noexcept { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Solves apply(x) = b through BiCGStab on precond(apply(.)) = precond(b).
///
/// Stops when the preconditioned residual satisfies
/// ||precond(apply(x) - b)|| <= tol ||precond(b)||. Convergence of the
/// recursively updated residual is confirmed against the true residual; on a
/// mismatch the iteration restarts from the true residual. Throws SolverError
/// with kind kBreakdown or kMaxIterations.
template <class Apply, class Precond>
std::pair<Vector, SolveReport> bicgstab(Apply&& apply, Precond&& precond,
                                        const Vector& b, const KrylovConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  auto op = [&](const Vector& x) { return precond(apply(x)); };

  const std::size_t n = b.size();
  Vector x(n, 0.0);
  const Vector c = precond(b);
  const double c_norm = detail::norm2(c);
  SolveReport report;
  if (c_norm == 0.0) {
    report.wall_time = elapsed();
    return {std::move(x), report};
  }
  const double target = cfg.rel_tolerance * c_norm;

  Vector r = c;
  Vector r_hat = r;
  Vector p(n, 0.0), v(n, 0.0), s(n), t;
  double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
  double res = c_norm;

  auto restart_from_true_residual = [&]() {
    const Vector ax = op(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = c[i] - ax[i];
    res = detail::norm2(r);
    r_hat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    rho_prev = alpha = omega = 1.0;
    return res <= target;
  };

  auto fail = [&](SolverError::Kind kind, const std::string& why, int iters) {
    report.iterations = iters;
    report.final_relative_residual = res / c_norm;
    report.wall_time = elapsed();
    throw SolverError(kind, "bicgstab: " + why, report);
  };

  int restarts = 0;
  bool converged = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    double rho = detail::dot(r_hat, r);
    if (std::abs(rho) <= 1e-30 * detail::norm2(r_hat) * res) {
      // Shadow residual became orthogonal to r: restart from the true residual.
      if (++restarts > 3) fail(SolverError::Kind::kBreakdown, "rho vanished", it);
      if (restart_from_true_residual()) {
        report.iterations = it - 1;
        converged = true;
        break;
      }
      rho = detail::dot(r_hat, r);
    }
    const double beta = (rho / rho_prev) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);

    v = op(p);
    const double denom = detail::dot(r_hat, v);
    if (denom == 0.0 || !std::isfinite(denom)) {
      fail(SolverError::Kind::kBreakdown, "(r_hat, v) vanished", it);
    }
    alpha = rho / denom;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    const double s_norm = detail::norm2(s);
    if (s_norm <= target) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
      res = s_norm;
      if (restart_from_true_residual()) {
        report.iterations = it;
        converged = true;
        break;
      }
      continue;
    }

    t = op(s);
    const double tt = detail::dot(t, t);
    omega = tt > 0.0 ? detail::dot(t, s) / tt : 0.0;
    if (omega == 0.0 || !std::isfinite(omega)) {
      fail(SolverError::Kind::kBreakdown, "omega vanished", it);
    }
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    rho_prev = rho;
    res = detail::norm2(r);
    if (!std::isfinite(res)) fail(SolverError::Kind::kBreakdown, "non-finite residual", it);
    if (res <= target && restart_from_true_residual()) {
      report.iterations = it;
      converged = true;
      break;
    }
  }
  if (!converged) {
    fail(SolverError::Kind::kMaxIterations,
         "no convergence in " + std::to_string(cfg.max_iterations) + " iterations",
         cfg.max_iterations);
  }

  report.final_relative_residual = res / c_norm;
  report.wall_time = elapsed();
  return {std::move(x), report};
}

}  // namespace surfcalc
