#include "asink/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "asink/problems.hpp"
#include "asink/reference.hpp"
#include "asink/regpath.hpp"

namespace asink {

namespace fs = std::filesystem;

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Keeps run names usable as file names.
std::string sanitize(std::string s) {
  for (char& ch : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_';
    if (!ok) ch = '_';
  }
  return s;
}

void log_line(const Context& ctx, const std::string& msg) {
  if (!ctx.quiet) std::cerr << msg << '\n';
}

void prepare_out(const Context& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + ctx.out.string() + "'");
}

Manifest base_manifest(const Context& ctx, const std::string& command, double ot) {
  Manifest m;
  m.set("command", command);
  m.set("problem", ctx.problem_spec.empty() ? ctx.problem.label : ctx.problem_spec);
  m.set("fingerprint", fingerprint(ctx.problem));
  m.set("m", std::to_string(ctx.problem.rows()));
  m.set("n", std::to_string(ctx.problem.cols()));
  m.set("osc_norm", osc_norm(ctx.problem.cost));
  m.set("exact_ot", ot);
  m.set("record_stride", std::to_string(ctx.record_stride));
  m.set("high_accuracy", ctx.high_accuracy ? "true" : "false");
  return m;
}

NamedRun execute(const Context& ctx, const PreparedProblem& prep, const RunSpec& spec,
                 long max_t, double ot, const std::vector<long>& extra_t) {
  SolverConfig cfg(spec.variant, spec.schedule, max_t);
  if (ctx.record_stride > 0) {
    cfg.record_every = ctx.record_stride;
  } else {
    cfg.geometric_records = true;
  }
  cfg.record_at = extra_t;
  RunOptions opts;
  opts.ot_value = ot;
  log_line(ctx, "run " + spec.name + " (" + std::string(to_string(spec.variant)) + ", " +
                    spec.schedule.describe() + ", " + std::to_string(max_t) + " iterations)");
  RunResult res = run(cfg, prep, opts);
  return NamedRun{spec.name, spec.variant, spec.schedule, std::move(res.records)};
}

Series subopt_series(const NamedRun& r, bool dashed) {
  Series s;
  s.name = r.name;
  s.dashed = dashed;
  for (const RunRecord& rec : r.records) {
    s.x.push_back(static_cast<double>(rec.t));
    s.y.push_back(rec.subopt_rounded.value_or(0.0));
  }
  return s;
}

void write_runs(const Context& ctx, const std::string& prefix, const std::vector<NamedRun>& runs,
                Manifest& manifest) {
  for (const NamedRun& r : runs) {
    const std::string file = prefix + "_" + r.name + ".csv";
    write_run_csv(ctx.out / file, r.records);
    manifest.set("run." + r.name, std::string(to_string(r.variant)) + " " +
                                      r.schedule.describe() + " -> " + file);
  }
}

std::vector<long> merged(std::vector<long> a, const std::vector<long>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

double cached_ot_value(const Problem& prob, const fs::path& out) {
  const std::string fp = fingerprint(prob);
  const fs::path file = out / "exact_ot.txt";
  {
    std::ifstream in(file);
    std::string key;
    double value = 0.0;
    if (in >> key >> value && key == fp) return value;
  }
  const double value = exact_ot(prob).value;
  write_text(file, fp + " " + g17(value) + "\n");
  return value;
}

double default_beta0(const Problem& prob) {
  const double osc = osc_norm(prob.cost);
  if (!(osc > 0.0)) throw std::invalid_argument("cost matrix is constant; ||c||_osc = 0");
  return 10.0 / osc;
}

const RunRecord& NamedRun::at(long t) const {
  for (const RunRecord& r : records) {
    if (r.t == t) return r;
  }
  throw std::out_of_range("run " + name + " has no record at t = " + std::to_string(t));
}

RunSpec parse_run_spec(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    Schedule s = Schedule::parse(text);
    return RunSpec{sanitize("annealed_" + s.describe()), Variant::annealed, s};
  }
  const Variant v = parse_variant(text.substr(0, eq));
  Schedule s = Schedule::parse(text.substr(eq + 1));
  return RunSpec{sanitize(std::string(to_string(v)) + "_" + s.describe()), v, s};
}

std::vector<double> default_baseline_grid() {
  return {10.0, std::pow(10.0, 1.5), 100.0, std::pow(10.0, 2.5), 1000.0};
}

ParetoOutput cmd_pareto(const Context& ctx, std::vector<RunSpec> runs, long max_t,
                        const std::vector<double>& baseline_multipliers,
                        const std::vector<long>& extra_t) {
  if (max_t < 1) throw std::invalid_argument("pareto: max-t must be >= 1");
  prepare_out(ctx);
  const PreparedProblem prep(ctx.problem);
  const double osc = osc_norm(ctx.problem.cost);
  const double b0 = default_beta0(ctx.problem);
  if (runs.empty()) {
    runs.push_back({"annealed_k0.5", Variant::annealed, Schedule::polynomial(b0, 0.5)});
    runs.push_back({"debiased_k0.667", Variant::debiased, Schedule::polynomial(b0, 2.0 / 3.0)});
  }
  ParetoOutput out;
  out.ot_value = cached_ot_value(ctx.problem, ctx.out);
  Manifest man = base_manifest(ctx, "pareto", out.ot_value);
  man.set("max_t", std::to_string(max_t));
  for (double mult : baseline_multipliers) {
    const RunSpec spec{"standard_x" + short_num(mult), Variant::standard,
                       Schedule::constant(mult / osc)};
    out.baselines.push_back(execute(ctx, prep, spec, max_t, out.ot_value, extra_t));
  }
  for (const RunSpec& spec : runs) {
    out.runs.push_back(execute(ctx, prep, spec, max_t, out.ot_value, extra_t));
  }

  write_runs(ctx, "pareto", out.baselines, man);
  write_runs(ctx, "pareto", out.runs, man);
  Plot plot;
  plot.title = "Rounded suboptimality";
  plot.xlabel = "iteration t";
  plot.ylabel = "<c, round(pi_t)> - OT";
  for (const NamedRun& r : out.baselines) plot.series.push_back(subopt_series(r, true));
  for (const NamedRun& r : out.runs) plot.series.push_back(subopt_series(r, false));
  write_svg(ctx.out / "pareto.svg", plot);
  man.write(ctx.out / "manifest.txt");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid: bad number '" + item + "' in '" + text + "'");
    }
  }
  if (parts.size() != 3) throw std::invalid_argument("grid must be a:b:step, got '" + text + "'");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || !(b >= a)) throw std::invalid_argument("grid: need step > 0 and b >= a");
  std::vector<double> out;
  const long k = std::lround(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= k; ++i) {
    // Round to 12 digits so 0.1 + 2 * 0.1 prints as 0.3.
    const double v = a + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

std::vector<SweepOutput> cmd_sweep(const Context& ctx, const std::vector<Variant>& variants,
                                   const std::vector<double>& kappas, long t_eval) {
  if (t_eval < 1) throw std::invalid_argument("sweep: t must be >= 1");
  if (kappas.empty()) throw std::invalid_argument("sweep: empty kappa grid");
  prepare_out(ctx);
  const PreparedProblem prep(ctx.problem);
  const double b0 = default_beta0(ctx.problem);
  const double ot = cached_ot_value(ctx.problem, ctx.out);
  Manifest man = base_manifest(ctx, "sweep", ot);
  man.set("t_eval", std::to_string(t_eval));

  std::vector<SweepOutput> out;
  Table table;
  table.header = {"variant", "kappa", "beta_t", "subopt_rounded"};
  Plot plot;
  plot.title = "Suboptimality at t = " + std::to_string(t_eval);
  plot.xlabel = "kappa";
  plot.ylabel = "<c, round(pi_t)> - OT";
  plot.logx = false;
  for (Variant v : variants) {
    SweepOutput so{v, {}, 0.0};
    Series s;
    s.name = std::string(to_string(v));
    for (double kappa : kappas) {
      const Schedule sched = Schedule::polynomial(b0, kappa);
      SolverConfig cfg(v, sched, t_eval);
      cfg.record_every = t_eval;
      RunOptions opts;
      opts.ot_value = ot;
      log_line(ctx, "sweep " + s.name + " kappa=" + short_num(kappa));
      const RunResult res = run(cfg, prep, opts);
      const double sub = *res.records.back().subopt_rounded;
      so.points.push_back({kappa, sub});
      table.add({s.name, short_num(kappa), g17(sched.beta(t_eval)), g17(sub)});
      s.x.push_back(kappa);
      s.y.push_back(sub);
    }
    const auto best = std::min_element(so.points.begin(), so.points.end(),
                                       [](const SweepPoint& a, const SweepPoint& b) {
                                         return a.subopt < b.subopt;
                                       });
    so.argmin_kappa = best->kappa;
    plot.markers.emplace_back(best->kappa, best->subopt);
    man.set("argmin." + s.name, short_num(best->kappa));
    plot.series.push_back(std::move(s));
    out.push_back(std::move(so));
  }
  write_table(ctx.out / "sweep_summary.csv", table);
  write_svg(ctx.out / "sweep.svg", plot);
  man.write(ctx.out / "manifest.txt");
  return out;
}

std::vector<PathsRow> cmd_paths(const Context& ctx, const Schedule& sched,
                                const std::vector<long>& ts_in) {
  std::vector<long> ts = ts_in;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.empty() || ts.front() < 1) throw std::invalid_argument("paths: times must be >= 1");
  prepare_out(ctx);
  const PreparedProblem prep(ctx.problem);
  const double ot = cached_ot_value(ctx.problem, ctx.out);
  Manifest man = base_manifest(ctx, "paths", ot);
  man.set("schedule", sched.describe());

  // Optimization path: first marginals at the requested times.
  std::vector<Vector> opt_rows;
  SolverConfig cfg(Variant::annealed, sched, ts.back());
  if (ctx.record_stride > 0) {
    cfg.record_every = ctx.record_stride;
  } else {
    cfg.geometric_records = true;
  }
  cfg.record_at = ts;
  RunOptions opts;
  opts.ot_value = ot;
  std::size_t next = 0;
  opts.observer = [&](const SolverState& s) {
    if (next < ts.size() && s.t == ts[next]) {
      opt_rows.push_back(current_plan(s, prep).row_sums());
      ++next;
    }
  };
  log_line(ctx, "paths: annealed run to t = " + std::to_string(ts.back()));
  const RunResult res = run(cfg, prep, opts);
  write_run_csv(ctx.out / "paths_annealed.csv", res.records);

  PathOptions po;
  po.high_accuracy = ctx.high_accuracy;
  log_line(ctx, "paths: regularization path at " + std::to_string(ts.size()) + " times");
  const std::vector<RegPathPoint> reg = path(ctx.problem, sched, ts, po);

  std::vector<PathsRow> rows;
  Table table;
  table.header = {"t",        "beta",     "alpha",        "opt_l1_p",  "reg_l1_p",
                  "distance", "residual", "online_bound"};
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const Vector reg_rows = reg[k].plan.row_sums();
    PathsRow r;
    r.t = ts[k];
    r.beta = sched.beta(ts[k]);
    r.alpha = sched.alpha(ts[k]);
    r.opt_l1_p = l1_distance(opt_rows[k], ctx.problem.p);
    r.reg_l1_p = l1_distance(reg_rows, ctx.problem.p);
    r.distance = l1_distance(opt_rows[k], reg_rows);
    r.reg_residual = reg[k].residual;
    r.reg_sweeps = reg[k].sweeps;
    table.add({std::to_string(r.t), g17(r.beta), g17(r.alpha), g17(r.opt_l1_p), g17(r.reg_l1_p),
               g17(r.distance), g17(r.reg_residual),
               g17(online_gap_bound(r.alpha, r.beta, ctx.problem.rows(), ctx.problem.cols()))});
    rows.push_back(r);
  }
  write_table(ctx.out / "paths_distance.csv", table);

  Plot plot;
  plot.title = "Optimization vs regularization path";
  plot.xlabel = "iteration t";
  plot.ylabel = "l1 distance of first marginals";
  Series a{"||pi_t 1 - p||", {}, {}, false};
  Series b{"||pi_reg 1 - p||", {}, {}, false};
  Series d{"path distance", {}, {}, true};
  for (const PathsRow& r : rows) {
    a.x.push_back(static_cast<double>(r.t));
    a.y.push_back(r.opt_l1_p);
    b.x.push_back(static_cast<double>(r.t));
    b.y.push_back(r.reg_l1_p);
    d.x.push_back(static_cast<double>(r.t));
    d.y.push_back(r.distance);
  }
  plot.series = {a, b, d};
  write_svg(ctx.out / "paths.svg", plot);
  man.write(ctx.out / "manifest.txt");
  return rows;
}

PlateauOutput cmd_plateau(const Context& ctx, double kappa, long max_t) {
  if (max_t < 1) throw std::invalid_argument("plateau: max-t must be >= 1");
  prepare_out(ctx);
  const PreparedProblem prep(ctx.problem);
  const double b0 = default_beta0(ctx.problem);
  const double ot = cached_ot_value(ctx.problem, ctx.out);
  Manifest man = base_manifest(ctx, "plateau", ot);
  man.set("max_t", std::to_string(max_t));
  man.set("kappa", kappa);

  PlateauOutput out;
  out.update_times = plateau_update_times(max_t);
  // Record the first and last iteration of every plateau.
  std::vector<long> marks;
  for (long u : out.update_times) {
    if (u >= 1) marks.push_back(u);
    if (u - 1 >= 1) marks.push_back(u - 1);
  }
  const Schedule smooth = Schedule::polynomial(b0, kappa);
  out.plateau = execute(ctx, prep, {"plateau", Variant::annealed, Schedule::plateau(smooth)},
                        max_t, ot, marks);
  out.smooth = execute(ctx, prep, {"smooth", Variant::annealed, smooth}, max_t, ot, marks);
  out.debiased = execute(ctx, prep,
                         {"debiased_k0.667", Variant::debiased, Schedule::polynomial(b0, 2.0 / 3.0)},
                         max_t, ot, marks);
  write_runs(ctx, "plateau", {out.plateau, out.smooth, out.debiased}, man);
  std::string times;
  for (long u : out.update_times) times += (times.empty() ? "" : " ") + std::to_string(u);
  man.set("update_times", times);

  Plot plot;
  plot.title = "Plateau vs smooth schedule";
  plot.xlabel = "iteration t";
  plot.ylabel = "<c, round(pi_t)> - OT";
  plot.series = {subopt_series(out.plateau, false), subopt_series(out.smooth, false),
                 subopt_series(out.debiased, true)};
  for (long u : out.update_times) {
    if (u >= 1) plot.vlines.push_back(static_cast<double>(u));
  }
  write_svg(ctx.out / "plateau.svg", plot);
  man.write(ctx.out / "manifest.txt");
  return out;
}

std::vector<NamedRun> cmd_symmetric(const Context& ctx, const Schedule& sched, long max_t,
                                    const std::vector<long>& extra_t) {
  if (max_t < 1) throw std::invalid_argument("symmetric: max-t must be >= 1");
  prepare_out(ctx);
  const PreparedProblem prep(ctx.problem);
  const double ot = cached_ot_value(ctx.problem, ctx.out);
  Manifest man = base_manifest(ctx, "symmetric", ot);
  man.set("max_t", std::to_string(max_t));
  man.set("schedule", sched.describe());
  std::vector<NamedRun> runs;
  for (Variant v : {Variant::annealed, Variant::debiased, Variant::symmetric,
                    Variant::symmetric_debiased}) {
    runs.push_back(execute(ctx, prep, {std::string(to_string(v)), v, sched}, max_t, ot,
                           merged({}, extra_t)));
  }
  write_runs(ctx, "symmetric", runs, man);
  Plot plot;
  plot.title = "Symmetric and asymmetric variants";
  plot.xlabel = "iteration t";
  plot.ylabel = "<c, round(pi_t)> - OT";
  for (const NamedRun& r : runs) plot.series.push_back(subopt_series(r, is_symmetric(r.variant)));
  write_svg(ctx.out / "symmetric.svg", plot);
  man.write(ctx.out / "manifest.txt");
  return runs;
}

}  // namespace asink
