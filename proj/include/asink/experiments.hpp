// The experiment commands behind the CLI. Each one writes CSV, SVG and a
// manifest into an output directory and also returns its numbers so tests
// can check them without parsing files.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asink/core.hpp"
#include "asink/report.hpp"
#include "asink/schedule.hpp"
#include "asink/solvers.hpp"

namespace asink {

struct Context {
  Problem problem;
  std::string problem_spec;  // as given on the command line
  std::filesystem::path out;
  /// 0 = geometric sampling (t = 1..10, 13, 18, ...), otherwise every k iterations.
  long record_stride = 0;
  bool high_accuracy = false;
  bool quiet = true;
};

/// OT(p, q), read from `<out>/exact_ot.txt` when its fingerprint matches the
/// problem and recomputed (and stored) otherwise.
double cached_ot_value(const Problem& prob, const std::filesystem::path& out);

/// 10 / ||c||_osc.
double default_beta0(const Problem& prob);

struct NamedRun {
  std::string name;
  Variant variant = Variant::annealed;
  Schedule schedule = Schedule::constant(1.0);
  std::vector<RunRecord> records;

  /// Record at iteration t; throws std::out_of_range when not recorded.
  const RunRecord& at(long t) const;
};

struct RunSpec {
  std::string name;
  Variant variant;
  Schedule schedule;
};

/// `VARIANT=SCHEDULE` or a bare schedule (annealed).
RunSpec parse_run_spec(const std::string& text);

struct ParetoOutput {
  double ot_value = 0.0;
  std::vector<NamedRun> baselines;  // standard Sinkhorn, one per beta
  std::vector<NamedRun> runs;
};

/// Baseline multipliers {10, 10^1.5, 100, 10^2.5, 1000} of 1 / ||c||_osc.
std::vector<double> default_baseline_grid();

/// Empty `runs` means annealed kappa = 1/2 and debiased kappa = 2/3 with
/// beta_0 = 10 / ||c||_osc. `extra_t` are always recorded.
ParetoOutput cmd_pareto(const Context& ctx, std::vector<RunSpec> runs, long max_t,
                        const std::vector<double>& baseline_multipliers,
                        const std::vector<long>& extra_t = {});

struct SweepPoint {
  double kappa = 0.0;
  double subopt = 0.0;
};

struct SweepOutput {
  Variant variant;
  std::vector<SweepPoint> points;
  double argmin_kappa = 0.0;
};

/// `a:b:step`, inclusive of b up to rounding.
std::vector<double> parse_grid(const std::string& text);

std::vector<SweepOutput> cmd_sweep(const Context& ctx, const std::vector<Variant>& variants,
                                   const std::vector<double>& kappas, long t_eval);

struct PathsRow {
  long t = 0;
  double beta = 0.0;
  double alpha = 0.0;
  double opt_l1_p = 0.0;   // ||pi_t 1 - p||_1
  double reg_l1_p = 0.0;   // ||pi^reg_t 1 - p||_1
  double distance = 0.0;   // ||pi_t 1 - pi^reg_t 1||_1
  double reg_residual = 0.0;
  long reg_sweeps = 0;
};

/// Annealed Sinkhorn and the regularization path on `sched` at the times ts.
std::vector<PathsRow> cmd_paths(const Context& ctx, const Schedule& sched,
                                const std::vector<long>& ts);

struct PlateauOutput {
  std::vector<long> update_times;
  NamedRun plateau;
  NamedRun smooth;
  NamedRun debiased;  // kappa = 2/3 reference
};

PlateauOutput cmd_plateau(const Context& ctx, double kappa, long max_t);

/// annealed, debiased, symmetric, symmetric_debiased on the same schedule.
std::vector<NamedRun> cmd_symmetric(const Context& ctx, const Schedule& sched, long max_t,
                                    const std::vector<long>& extra_t = {});

}  // namespace asink
