#pragma once

// Convergence studies over a list of grid sizes: Laplace-Beltrami solve,
// harmonic vector fields and Hodge decomposition. Each row is independent;
// a failing row is recorded and the remaining rows still run.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "surfcalc/calculus.hpp"
#include "surfcalc/config.hpp"
#include "surfcalc/export.hpp"
#include "surfcalc/geometry.hpp"
#include "surfcalc/hodge.hpp"
#include "surfcalc/krylov.hpp"
#include "surfcalc/solvers.hpp"

namespace surfcalc {

enum class Experiment { kLaplaceBeltrami, kHarmonic, kHodge, kAll };

inline Experiment parse_experiment(const std::string& name) {
  if (name == "lb") return Experiment::kLaplaceBeltrami;
  if (name == "harmonic") return Experiment::kHarmonic;
  if (name == "hodge") return Experiment::kHodge;
  if (name == "all") return Experiment::kAll;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

struct ExperimentConfig {
  SurfaceSpec surface = reference_stellarator();
  std::vector<int> n_list = {47, 95, 191, 383};
  Experiment experiment = Experiment::kAll;
  KrylovConfig krylov;  // krylov.rng_seed seeds the harmonic-field solve
  std::filesystem::path output_dir = ".";
  bool export_fields = false;

  void validate() const {
    if (n_list.empty()) throw std::invalid_argument("n_list must not be empty");
    for (int n : n_list) {
      if (n < 3 || n % 2 == 0) {
        throw std::invalid_argument("grid size " + std::to_string(n) +
                                    " must be odd and >= 3");
      }
    }
    krylov.validate();
    surfcalc::validate(surface);
  }
};

// ---------------------------------------------------------------------------
// Test data

/// psi = exp(cos u + sin v) + exp(cos(kappa (u - v))) with its derivatives.
inline FunctionJet lb_test_function(double u, double v, double kappa = 12.0) {
  const double a = std::exp(std::cos(u) + std::sin(v));
  const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
  const double w = kappa * (u - v);
  const double b = std::exp(std::cos(w));
  const double sw = std::sin(w), cw = std::cos(w);
  // d/du exp(cos w) = -kappa sin w e; d2/du2 = kappa^2 (sin^2 w - cos w) e
  const double b1 = -kappa * sw * b;
  const double b2 = kappa * kappa * (sw * sw - cw) * b;
  FunctionJet j;
  j.value = a + b;
  j.du = -su * a + b1;
  j.dv = cv * a - b1;
  j.duu = (su * su - cu) * a + b2;
  j.dvv = (cv * cv - sv) * a + b2;
  j.duv = -su * cv * a - b2;
  return j;
}

/// Tangential part of t = grad f + n x grad f for f = sin(kappa z), computed
/// from the ambient gradient kappa cos(kappa z) e_z.
inline TangentField hodge_test_field(const MetricGrids& metric, double kappa = 10.0) {
  const Grid& grid = metric.grid();
  const auto& z = metric.surface.position.z;
  const auto& n = metric.normal;
  VectorGrid t(grid);
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const double c = kappa * std::cos(kappa * z[i]);
    t.x[i] = c * n.y[i];
    t.y[i] = -c * n.x[i];
    t.z[i] = c;
  }
  return project_tangential(metric, t);
}

// ---------------------------------------------------------------------------
// Rows

struct LbRow {
  int n = 0;
  int iterations = 0;
  double wall_time = 0.0;
  double abs_error = NAN;
  double rel_error = NAN;
  double removed_mean = 0.0;
  std::string failure;
  bool ok() const { return failure.empty(); }
};

struct HarmonicRow {
  int n = 0;
  int iterations = 0;
  double wall_time = 0.0;
  double div_error = NAN;
  double curl_error = NAN;
  std::uint64_t seed = 0;  // seed that produced the basis, after retries
  std::string failure;
  bool ok() const { return failure.empty(); }
};

struct HodgeRow {
  int n = 0;
  int iterations = 0;  // harmonic-basis solve
  int alpha_iterations = 0;
  int beta_iterations = 0;
  double wall_time = 0.0;
  double abs_error = NAN;
  double rel_error = NAN;
  double c1 = NAN;
  double c2 = NAN;
  std::string failure;
  bool ok() const { return failure.empty(); }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string describe(const std::exception& e) {
  if (const auto* s = dynamic_cast<const SolverError*>(&e)) {
    return std::string(to_string(s->kind())) + ": " + s->what();
  }
  return e.what();
}

inline std::filesystem::path export_stem(const ExperimentConfig& cfg, const char* name,
                                         int n) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir / (std::string(name) + "_N" + std::to_string(n));
}

inline constexpr int kHarmonicSeedRetries = 3;

/// harmonic_basis with up to kHarmonicSeedRetries fresh seeds when the null
/// vector comes out degenerate.
inline HarmonicBasis harmonic_basis_with_retry(const MetricGrids& metric,
                                               KrylovConfig cfg, std::uint64_t* used_seed) {
  for (int attempt = 0;; ++attempt) {
    try {
      HarmonicBasis b = harmonic_basis(metric, cfg);
      if (used_seed) *used_seed = cfg.rng_seed;
      return b;
    } catch (const SolverError& e) {
      if (e.kind() != SolverError::Kind::kDegenerateNullVector ||
          attempt + 1 >= kHarmonicSeedRetries) {
        throw;
      }
      cfg.rng_seed += 0x9E3779B97F4A7C15ULL;
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Studies

/// Solves Delta phi = Delta psi0 for the mean-zero part psi0 of
/// lb_test_function and reports ||phi - psi0||. The right-hand side is the
/// continuous Laplace-Beltrami of psi0 at the nodes.
inline std::vector<LbRow> run_lb_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<LbRow> rows;
  for (int n : cfg.n_list) {
    LbRow row;
    row.n = n;
    try {
      const MetricGrids metric = build_metric(cfg.surface, Grid(n));
      const ScalarGrid psi = ScalarGrid::sample(
          metric.grid(), [](double u, double v) { return lb_test_function(u, v).value; });
      const ScalarGrid psi0 = remove_mean(metric, psi);
      const ScalarGrid b = laplace_beltrami_exact(
          metric, [](double u, double v) { return lb_test_function(u, v); });
      const LaplaceSolution sol = solve_laplace_beltrami(metric, b, cfg.krylov);
      row.iterations = sol.report.iterations;
      row.wall_time = sol.report.wall_time;
      row.removed_mean = sol.removed_mean;
      const ScalarGrid err = sol.phi - psi0;
      row.abs_error = norm(metric, err);
      row.rel_error = row.abs_error / norm(metric, psi0);
      if (cfg.export_fields) {
        FieldSet fields;
        fields.add("phi", sol.phi).add("psi0", psi0).add("error", err).add("rhs", b);
        export_fields(metric, fields, detail::export_stem(cfg, "lb", n));
      }
    } catch (const SolverError& e) {
      row.iterations = e.report().iterations;
      row.wall_time = e.report().wall_time;
      row.failure = detail::describe(e);
    } catch (const std::exception& e) {
      row.failure = detail::describe(e);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Computes the harmonic basis and reports ||Div h1|| and ||Curl h1|| for the
/// unit-norm h1.
inline std::vector<HarmonicRow> run_harmonic_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<HarmonicRow> rows;
  for (int n : cfg.n_list) {
    HarmonicRow row;
    row.n = n;
    try {
      const MetricGrids metric = build_metric(cfg.surface, Grid(n));
      const HarmonicBasis basis =
          detail::harmonic_basis_with_retry(metric, cfg.krylov, &row.seed);
      row.iterations = basis.report.iterations;
      row.wall_time = basis.report.wall_time;
      const ScalarGrid d = div(metric, basis.h1);
      const ScalarGrid c = curl(metric, basis.h1);
      row.div_error = norm(metric, d);
      row.curl_error = norm(metric, c);
      if (cfg.export_fields) {
        FieldSet fields;
        fields.add("div_h1", d).add("curl_h1", c).add("h1", basis.h1).add("h2", basis.h2);
        export_fields(metric, fields, detail::export_stem(cfg, "harmonic", n));
      }
    } catch (const SolverError& e) {
      row.iterations = e.report().iterations;
      row.wall_time = e.report().wall_time;
      row.failure = detail::describe(e);
    } catch (const std::exception& e) {
      row.failure = detail::describe(e);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Decomposes hodge_test_field and reports the reconstruction error. The
/// iterations column is the harmonic-basis solve; wall_time covers the basis
/// and both potential solves.
inline std::vector<HodgeRow> run_hodge_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<HodgeRow> rows;
  for (int n : cfg.n_list) {
    HodgeRow row;
    row.n = n;
    try {
      const MetricGrids metric = build_metric(cfg.surface, Grid(n));
      const TangentField j = hodge_test_field(metric);
      const auto t0 = std::chrono::steady_clock::now();
      const HarmonicBasis basis = detail::harmonic_basis_with_retry(metric, cfg.krylov, nullptr);
      row.iterations = basis.report.iterations;
      const HodgeDecomposition d = hodge_decompose(metric, j, basis.h1, basis.h2, cfg.krylov);
      row.wall_time = detail::seconds_since(t0);
      row.alpha_iterations = d.alpha_report.iterations;
      row.beta_iterations = d.beta_report.iterations;
      row.c1 = d.c1;
      row.c2 = d.c2;
      const ReconstructionError e = reconstruction_error(metric, j, d);
      row.abs_error = e.absolute;
      row.rel_error = e.relative;
      if (cfg.export_fields) {
        FieldSet fields;
        fields.add("alpha", d.alpha).add("beta", d.beta);
        fields.add("j", j).add("grad_alpha", d.grad_part).add("n_cross_grad_beta", d.rot_part);
        fields.add("harmonic", d.harmonic_part);
        export_fields(metric, fields, detail::export_stem(cfg, "hodge", n));
      }
    } catch (const SolverError& e) {
      row.failure = detail::describe(e);
    } catch (const std::exception& e) {
      row.failure = detail::describe(e);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Tables

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string status_cell(const std::string& failure) {
  return failure.empty() ? "ok" : csv_quote("failed: " + failure);
}

/// Mantissa in [0.1, 1) with two digits, as in 0.36E-02.
inline std::string fortran_e(double x) {
  if (std::isnan(x)) return "NaN";
  if (x == 0.0) return "0.00E+00";
  const double a = std::abs(x);
  int e = static_cast<int>(std::floor(std::log10(a))) + 1;
  double m = a / std::pow(10.0, e);
  if (std::round(m * 100.0) >= 100.0) {
    m /= 10.0;
    ++e;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s0.%02dE%c%02d", x < 0 ? "-" : "",
                static_cast<int>(std::round(m * 100.0)), e < 0 ? '-' : '+', std::abs(e));
  return buf;
}

}  // namespace detail

inline void write_csv(std::ostream& out, const std::vector<LbRow>& rows) {
  using detail::g17;
  out << "N,iterations,wall_time,abs_error,rel_error,removed_mean,status\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.iterations << ',' << g17(r.wall_time) << ',' << g17(r.abs_error)
        << ',' << g17(r.rel_error) << ',' << g17(r.removed_mean) << ','
        << detail::status_cell(r.failure) << '\n';
  }
}

inline void write_csv(std::ostream& out, const std::vector<HarmonicRow>& rows) {
  using detail::g17;
  out << "N,iterations,wall_time,div_error,curl_error,seed,status\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.iterations << ',' << g17(r.wall_time) << ',' << g17(r.div_error)
        << ',' << g17(r.curl_error) << ',' << r.seed << ','
        << detail::status_cell(r.failure) << '\n';
  }
}

inline void write_csv(std::ostream& out, const std::vector<HodgeRow>& rows) {
  using detail::g17;
  out << "N,iterations,alpha_iterations,beta_iterations,wall_time,abs_error,rel_error,c1,c2,"
         "status\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.iterations << ',' << r.alpha_iterations << ','
        << r.beta_iterations << ',' << g17(r.wall_time) << ',' << g17(r.abs_error) << ','
        << g17(r.rel_error) << ',' << g17(r.c1) << ',' << g17(r.c2) << ','
        << detail::status_cell(r.failure) << '\n';
  }
}

namespace detail {

template <class Row, class Cells>
void pretty_table(std::ostream& out, const char* title, const std::vector<Row>& rows,
                  const std::vector<std::string>& head, Cells&& cells) {
  out << title << '\n';
  char buf[256];
  std::snprintf(buf, sizeof buf, "  %6s", "N");
  std::string line = buf;
  for (const auto& h : head) {
    std::snprintf(buf, sizeof buf, "%12s", h.c_str());
    line += buf;
  }
  out << line << '\n';
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "  %6d", r.n);
    line = buf;
    if (!r.ok()) {
      out << line << "   failed: " << r.failure << '\n';
      continue;
    }
    for (const auto& c : cells(r)) {
      std::snprintf(buf, sizeof buf, "%12s", c.c_str());
      line += buf;
    }
    out << line << '\n';
  }
}

inline std::string fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace detail

inline void write_pretty(std::ostream& out, const std::vector<LbRow>& rows) {
  detail::pretty_table(out, "Laplace-Beltrami solver", rows,
                       {"Iter", "Time", "Error", "Rel. error"}, [](const LbRow& r) {
                         return std::vector<std::string>{
                             std::to_string(r.iterations), detail::fixed(r.wall_time, 3),
                             detail::fortran_e(r.abs_error), detail::fortran_e(r.rel_error)};
                       });
}

inline void write_pretty(std::ostream& out, const std::vector<HarmonicRow>& rows) {
  detail::pretty_table(out, "Harmonic vector fields", rows,
                       {"Iter", "Time", "Div error", "Curl error"}, [](const HarmonicRow& r) {
                         return std::vector<std::string>{
                             std::to_string(r.iterations), detail::fixed(r.wall_time, 3),
                             detail::fortran_e(r.div_error), detail::fortran_e(r.curl_error)};
                       });
}

inline void write_pretty(std::ostream& out, const std::vector<HodgeRow>& rows) {
  detail::pretty_table(out, "Hodge decomposition", rows,
                       {"Iter", "Time", "Error", "Rel. error"}, [](const HodgeRow& r) {
                         return std::vector<std::string>{
                             std::to_string(r.iterations), detail::fixed(r.wall_time, 3),
                             detail::fortran_e(r.abs_error), detail::fortran_e(r.rel_error)};
                       });
}

template <class Row>
bool all_ok(const std::vector<Row>& rows) {
  for (const auto& r : rows) {
    if (!r.ok()) return false;
  }
  return true;
}

}  // namespace surfcalc
