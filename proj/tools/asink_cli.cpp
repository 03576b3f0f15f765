// asink: run annealed Sinkhorn experiments and write CSV/SVG results.
//
// Exit codes: 0 success, 1 output failure, 2 bad arguments or input file,
// 3 numeric failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "asink/experiments.hpp"
#include "asink/problems.hpp"
#include "asink/report.hpp"

namespace {

using namespace asink;

struct Common {
  std::string problem = "gen:geometric,300,300,0";
  std::string out = "out";
  long record_stride = 0;
  bool high_accuracy = false;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--problem", c.problem, "problem file or gen:FAMILY,M,N,SEED")
      ->capture_default_str();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--record-stride", c.record_stride,
                  "record every k iterations (0: geometric sampling)")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--high-accuracy", c.high_accuracy,
                "solve regularization-path points to residual 1e-10");
  app->add_option("--seed", c.seed, "overrides the seed of a gen: problem");
  app->add_flag("-v,--verbose", c.verbose, "progress on stderr");
}

Context make_context(const Common& c) {
  Context ctx;
  std::string spec = c.problem;
  if (spec.rfind("gen:", 0) == 0) {
    GeneratorSpec g = parse_generator(spec);
    if (c.seed) g.seed = *c.seed;
    ctx.problem = generate(g);
    spec = ctx.problem.label;
  } else {
    if (c.seed) throw std::invalid_argument("--seed only applies to gen: problems");
    try {
      ctx.problem = load_problem_spec(spec);
    } catch (const std::runtime_error& e) {
      // A missing or malformed input file is a usage error.
      throw std::invalid_argument(e.what());
    }
  }
  ctx.problem_spec = spec;
  ctx.out = c.out;
  ctx.record_stride = c.record_stride;
  ctx.high_accuracy = c.high_accuracy;
  ctx.quiet = !c.verbose;
  return ctx;
}

Schedule schedule_or_poly(const std::string& text, const Problem& prob, double kappa) {
  if (!text.empty()) return Schedule::parse(text);
  return Schedule::polynomial(default_beta0(prob), kappa);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annealed Sinkhorn experiments"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> schedules;
  std::string schedule;
  std::string variant = "annealed";
  std::vector<std::string> variants{"annealed", "debiased"};
  std::string kappa_grid = "0.1:0.9:0.1";
  std::vector<long> ts{10, 30, 100, 300, 1000, 3000};
  long max_t = 2000;
  double kappa = 0.5;

  auto* gen = app.add_subcommand("gen", "write a generated problem to a file");
  std::string gen_spec = "gen:geometric,300,300,0";
  std::string gen_file = "problem.txt";
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--problem", gen_spec, "gen:FAMILY,M,N,SEED")->capture_default_str();
  gen->add_option("--seed", gen_seed, "overrides the seed");
  gen->add_option("--out", gen_file, "output file")->capture_default_str();

  auto* run_cmd = app.add_subcommand("run", "one solver run, CSV of diagnostics");
  add_common(run_cmd, common);
  run_cmd->add_option("--variant", variant,
                      "standard, annealed, debiased, symmetric, symmetric_debiased")
      ->capture_default_str();
  run_cmd->add_option("--schedule", schedule, "const:B, poly:B0,K, lin:B0,A, geom:S,BMAX, plateau(...)");
  run_cmd->add_option("--kappa", kappa, "exponent when no schedule is given")->capture_default_str();
  run_cmd->add_option("--max-t", max_t)->check(CLI::PositiveNumber)->capture_default_str();

  auto* pareto = app.add_subcommand("pareto", "constant-beta baselines vs annealed runs");
  add_common(pareto, common);
  pareto->add_option("--schedule", schedules,
                     "VARIANT=SCHEDULE or SCHEDULE (annealed); repeatable");
  pareto->add_option("--max-t", max_t)->check(CLI::PositiveNumber)->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "suboptimality at a fixed t against kappa");
  add_common(sweep, common);
  sweep->add_option("--kappa-grid", kappa_grid, "a:b:step")->capture_default_str();
  sweep->add_option("--variant", variants, "repeatable")->capture_default_str();
  long t_eval = 200;
  sweep->add_option("--max-t", t_eval, "evaluation iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* paths = app.add_subcommand("paths", "optimization path vs regularization path");
  add_common(paths, common);
  paths->add_option("--kappa", kappa)->capture_default_str();
  paths->add_option("--schedule", schedule, "overrides --kappa");
  paths->add_option("--ts", ts, "evaluation times")->capture_default_str();

  auto* plateau = app.add_subcommand("plateau", "piecewise-constant vs smooth schedule");
  add_common(plateau, common);
  plateau->add_option("--kappa", kappa)->capture_default_str();
  plateau->add_option("--max-t", max_t)->check(CLI::PositiveNumber)->capture_default_str();

  auto* symmetric = app.add_subcommand("symmetric", "symmetric vs asymmetric variants");
  add_common(symmetric, common);
  symmetric->add_option("--kappa", kappa)->capture_default_str();
  symmetric->add_option("--schedule", schedule, "overrides --kappa");
  symmetric->add_option("--max-t", max_t)->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      GeneratorSpec g = parse_generator(gen_spec);
      if (gen_seed) g.seed = *gen_seed;
      save_problem(generate(g), gen_file);
      return 0;
    }
    const Context ctx = make_context(common);
    if (run_cmd->parsed()) {
      const Schedule s = schedule_or_poly(schedule, ctx.problem, kappa);
      SolverConfig cfg(parse_variant(variant), s, max_t);
      if (ctx.record_stride > 0) {
        cfg.record_every = ctx.record_stride;
      } else {
        cfg.geometric_records = true;
      }
      std::filesystem::create_directories(ctx.out);
      RunOptions opts;
      opts.ot_value = cached_ot_value(ctx.problem, ctx.out);
      const RunResult res = run(cfg, ctx.problem, opts);
      write_run_csv(ctx.out / "run.csv", res.records);
      Manifest man;
      man.set("command", "run");
      man.set("problem", ctx.problem_spec);
      man.set("fingerprint", fingerprint(ctx.problem));
      man.set("variant", variant);
      man.set("schedule", s.describe());
      man.set("max_t", std::to_string(max_t));
      man.set("exact_ot", *opts.ot_value);
      man.write(ctx.out / "manifest.txt");
    } else if (pareto->parsed()) {
      std::vector<RunSpec> runs;
      for (const std::string& s : schedules) runs.push_back(parse_run_spec(s));
      cmd_pareto(ctx, runs, max_t, default_baseline_grid());
    } else if (sweep->parsed()) {
      std::vector<Variant> vs;
      for (const std::string& v : variants) vs.push_back(parse_variant(v));
      const auto res = cmd_sweep(ctx, vs, parse_grid(kappa_grid), t_eval);
      for (const SweepOutput& s : res) {
        std::printf("%s argmin kappa = %g\n", std::string(to_string(s.variant)).c_str(),
                    s.argmin_kappa);
      }
    } else if (paths->parsed()) {
      cmd_paths(ctx, schedule_or_poly(schedule, ctx.problem, kappa), ts);
    } else if (plateau->parsed()) {
      cmd_plateau(ctx, kappa, max_t);
    } else if (symmetric->parsed()) {
      cmd_symmetric(ctx, schedule_or_poly(schedule, ctx.problem, kappa), max_t);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric failure at iteration " << e.iteration() << ": " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
