// surface-calc: convergence studies on genus-one surfaces.
//
//   surface-calc <lb|harmonic|hodge|all> [--config FILE] [--n 47,95,191]
//                [--seed U64] [--out DIR] [--export-fields] [--pretty]
//
// Writes lb.csv, harmonic.csv and hodge.csv into DIR. Exits nonzero if any
// row failed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surfcalc/surfcalc.hpp"

namespace {

template <class Row>
bool emit(const surfcalc::ExperimentConfig& cfg, const char* name,
          const std::vector<Row>& rows, bool pretty) {
  const auto path = cfg.output_dir / (std::string(name) + ".csv");
  std::ofstream out(path);
  if (!out) {
    std::cerr << "surface-calc: cannot write " << path.string() << '\n';
    return false;
  }
  surfcalc::write_csv(out, rows);
  if (pretty) {
    surfcalc::write_pretty(std::cout, rows);
    std::cout << '\n';
  } else {
    surfcalc::write_csv(std::cout, rows);
  }
  for (const auto& r : rows) {
    if (!r.ok()) std::cerr << "surface-calc: " << name << " N=" << r.n << ": " << r.failure << '\n';
  }
  return surfcalc::all_ok(rows) && static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral surface calculus on genus-one surfaces"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<int> n_list = {47, 95, 191, 383};
  std::uint64_t seed = surfcalc::KrylovConfig{}.rng_seed;
  std::string out_dir = ".";
  bool export_fields = false, pretty = false, unpreconditioned = false;
  double tol = surfcalc::KrylovConfig{}.rel_tolerance;
  int max_iter = surfcalc::KrylovConfig{}.max_iterations;

  for (const char* name : {"lb", "harmonic", "hodge", "all"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " study");
    sub->add_option("--config", config_path, "surface specification file (default: built-in stellarator)")
        ->check(CLI::ExistingFile);
    sub->add_option("--n", n_list, "comma-separated odd grid sizes")->delimiter(',');
    sub->add_option("--seed", seed, "seed for the harmonic-field perturbation");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--export-fields", export_fields, "write VTK and CSV field files per row");
    sub->add_flag("--pretty", pretty, "print formatted tables instead of CSV");
    sub->add_option("--tol", tol, "BiCGStab relative tolerance");
    sub->add_option("--max-iter", max_iter, "BiCGStab iteration limit");
    sub->add_flag("--unpreconditioned", unpreconditioned,
                  "disable the flat-torus preconditioners (diagnostic)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  surfcalc::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg.surface = surfcalc::load_surface_config(config_path);
    cfg.n_list = n_list;
    cfg.experiment = surfcalc::parse_experiment(command);
    cfg.krylov.rng_seed = seed;
    cfg.krylov.rel_tolerance = tol;
    cfg.krylov.max_iterations = max_iter;
    cfg.krylov.precondition = !unpreconditioned;
    cfg.output_dir = out_dir;
    cfg.export_fields = export_fields;
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
  } catch (const std::exception& e) {
    std::cerr << "surface-calc: " << e.what() << '\n';
    return 2;
  }

  using surfcalc::Experiment;
  const bool all = cfg.experiment == Experiment::kAll;
  bool ok = true;
  if (all || cfg.experiment == Experiment::kLaplaceBeltrami) {
    const auto rows = surfcalc::run_lb_convergence(cfg);
    for (const auto& r : rows) {
      if (r.ok() && r.removed_mean > surfcalc::kMeanWarningThreshold) {
        std::cerr << "surface-calc: warning: lb N=" << r.n
                  << ": removed mean component of the right-hand side, relative size "
                  << r.removed_mean << '\n';
      }
    }
    ok = emit(cfg, "lb", rows, pretty) && ok;
  }
  if (all || cfg.experiment == Experiment::kHarmonic) {
    ok = emit(cfg, "harmonic", surfcalc::run_harmonic_convergence(cfg), pretty) && ok;
  }
  if (all || cfg.experiment == Experiment::kHodge) {
    ok = emit(cfg, "hodge", surfcalc::run_hodge_convergence(cfg), pretty) && ok;
  }
  return ok ? 0 : 1;
}
