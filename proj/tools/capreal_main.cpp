// capreal: experiment runner and generic solver front end.
//
//   capreal run --config cfg.json [--out dir]
//   capreal bench --table {1,2,4,5,6} [--full] [--out dir] [--seed N]
//   capreal solve --problem prob.json [--trace out.csv] [--out sol.json]
//   capreal certify --problem prob.json
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure.

#include "liftadmm/experiment.hpp"
#include "liftadmm/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, bool traces) {
  liftadmm::ExperimentConfig cfg = liftadmm::load_experiment_json(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (traces) cfg.emit_traces = true;
  liftadmm::ExperimentResult res = liftadmm::run_experiment(cfg);

  std::printf("algorithm=%s noise=%s(%g) n=%lld s=%lld trials=%d\n",
              liftadmm::to_string(cfg.algorithm).c_str(), liftadmm::to_string(cfg.noise).c_str(),
              cfg.noise_param, static_cast<long long>(cfg.n), static_cast<long long>(cfg.s),
              cfg.trials);
  std::printf("%8s %6s %10s %10s %14s %10s %10s\n", "m/n", "m", "success%", "mean_snr",
              "median_rel", "mean_iter", "mean_sec");
  for (const auto& r : res.rows)
    std::printf("%8.3f %6lld %10.1f %10.2f %14.3e %10.1f %10.3f\n", r.ratio,
                static_cast<long long>(r.m), r.success_percent, r.mean_snr_db,
                r.median_rel_error, r.mean_iterations, r.mean_wall_seconds);
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    liftadmm::emit_csv(res, cfg.output_dir + "/results.csv");
    liftadmm::emit_json(res, cfg, cfg.output_dir + "/results.json");
    std::printf("wrote %s/results.{csv,json}\n", cfg.output_dir.c_str());
  }
  return 0;
}

int cmd_bench(int table, bool full, std::uint64_t seed, const std::string& out_dir) {
  auto results = liftadmm::run_bench_table(table, full, seed, out_dir);
  for (const auto& [label, res] : results) {
    std::printf("-- table %d / %s\n", table, label.c_str());
    for (const auto& r : res.rows)
      std::printf("   m/n=%.3f success=%.1f%% mean_snr=%.2f dB median_rel=%.3e iter=%.1f\n",
                  r.ratio, r.success_percent, r.mean_snr_db, r.median_rel_error,
                  r.mean_iterations);
  }
  return 0;
}

int cmd_solve(const std::string& problem_path, const std::string& trace_path,
              const std::string& out_path) {
  auto [problem, config] = liftadmm::load_problem_json(problem_path);
  liftadmm::RunResult res = liftadmm::run(problem, config);
  std::printf("terminated: %s after %zu iterations\n",
              res.reason == liftadmm::Termination::kConverged ? "converged" : "max_iterations",
              res.trace.records.size());
  if (!res.trace.records.empty()) {
    const auto& last = res.trace.records.back();
    std::printf("stop_residual=%.3e feasibility=%.3e objective=%.6e\n", last.stop_residual,
                last.feasibility, last.objective);
  }
  if (!trace_path.empty()) res.trace.to_csv(trace_path);
  if (!out_path.empty()) {
    nlohmann::json sol;
    for (const auto& xj : res.solution.x)
      sol["x"].push_back(std::vector<double>(xj.data(), xj.data() + xj.size()));
    sol["z"] = std::vector<double>(res.solution.z.data(),
                                   res.solution.z.data() + res.solution.z.size());
    sol["converged"] = res.reason == liftadmm::Termination::kConverged;
    std::ofstream out(out_path);
    out << sol.dump(2) << '\n';
  }
  return 0;
}

int cmd_certify(const std::string& problem_path) {
  auto [problem, config] = liftadmm::load_problem_json(problem_path);
  const liftadmm::ProximalMetric metric = liftadmm::assemble_metric(problem, config);
  const liftadmm::AssumptionReport rep = liftadmm::verify_assumptions(metric);
  std::printf("G PSD:             %s (min eig %.3e)\n", rep.g_psd ? "yes" : "no", rep.g_min_eig);
  std::printf("G2 PSD:            %s (min eig %.3e)\n", rep.g2_psd ? "yes" : "no", rep.g2_min_eig);
  std::printf("strong condition:  %s (margin %.3e)\n", rep.strong_condition ? "yes" : "no",
              rep.strong_margin);
  std::printf("convergence %scertified\n", rep.convergence_certified() ? "" : "NOT ");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial proximal ADMM solvers for multi-block convex programs and "
               "compressive affine phase retrieval"};
  app.require_subcommand(1);

  std::string config_path, problem_path, out_dir, trace_path, out_path;
  int table = 1;
  bool full = false, traces = false;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--out", out_dir, "output directory for CSV/JSON results");
  run->add_flag("--trace", traces, "emit per-iteration trace CSVs");

  auto* bench = app.add_subcommand("bench", "reproduce a benchmark table at desk scale");
  bench->add_option("--table", table, "table number: 1, 2, 4, 5 or 6")->required();
  bench->add_flag("--full", full, "full-paper scale (100 trials, full ratio grid)");
  bench->add_option("--seed", seed, "master seed");
  bench->add_option("--out", out_dir, "output directory");

  auto* solve = app.add_subcommand("solve", "solve a generic multi-block problem");
  solve->add_option("--problem", problem_path, "problem JSON")->required();
  solve->add_option("--trace", trace_path, "write per-iteration trace CSV");
  solve->add_option("--out", out_path, "write solution JSON");

  auto* certify = app.add_subcommand("certify", "report metric/assumption checks for a problem");
  certify->add_option("--problem", problem_path, "problem JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, traces);
    if (bench->parsed()) return cmd_bench(table, full, seed, out_dir);
    if (solve->parsed()) return cmd_solve(problem_path, trace_path, out_path);
    if (certify->parsed()) return cmd_certify(problem_path);
  } catch (const liftadmm::InvalidArgument& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return 2;
  } catch (const liftadmm::NumericFailure& ex) {
    std::cerr << "numeric failure: " << ex.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 3;
  }
  return 0;
}
