#include "liftadmm/experiment.hpp"

#include "liftadmm/kernel.hpp"
#include "liftadmm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace liftadmm {

namespace {

// Stream ids within one trial seed; fixed so adding draws to one stream
// never perturbs another.
enum Stream : std::uint64_t {
  kStreamA = 1,
  kStreamSupport = 2,
  kStreamXVals = 3,
  kStreamXi = 4,
  kStreamYRef = 5,
  kStreamNoise = 6,
};

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kCapReal: return "capreal";
    case Algorithm::kPCapReal1: return "pcapreal-1";
    case Algorithm::kPCapReal2: return "pcapreal-2";
    case Algorithm::kPCapRealInf: return "pcapreal-inf";
    case Algorithm::kZero: return "zero";
    case Algorithm::kJacobi: return "jacobi";
    case Algorithm::kTwisted: return "twisted";
  }
  return "?";
}

std::string to_string(NoiseModel m) {
  switch (m) {
    case NoiseModel::kNone: return "none";
    case NoiseModel::kGaussian: return "gaussian";
    case NoiseModel::kCauchy: return "cauchy";
    case NoiseModel::kUniform: return "uniform";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  require(n >= 1 && s >= 1 && s <= n, "ExperimentConfig: need n >= s >= 1");
  require(trials >= 1, "ExperimentConfig: trials must be positive");
  require(!m_ratios.empty(), "ExperimentConfig: at least one m/n ratio");
  for (double r : m_ratios)
    require(static_cast<Index>(std::lround(r * static_cast<double>(n))) >= 1,
            "ExperimentConfig: each ratio must give m >= 1");
  if (noise != NoiseModel::kNone)
    require(noise_param > 0.0, "ExperimentConfig: noise parameter must be positive");
  require(success_threshold > 0.0, "ExperimentConfig: success threshold must be positive");
  require(precondition_exponent >= 0.0 && precondition_exponent <= 1.0,
          "ExperimentConfig: precondition exponent in [0, 1]");
}

GeneratedInstance gen_instance(Index n, Index s, Index m, std::uint64_t seed) {
  require(s >= 1 && s <= n && m >= 1, "gen_instance: need 1 <= s <= n and m >= 1");
  GeneratedInstance g;

  Philox rng_a(seed, kStreamA);
  g.A.resize(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) g.A(i, j) = rng_a.normal();

  // uniform random s-subset by partial Fisher-Yates
  Philox rng_sup(seed, kStreamSupport);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < s; ++i) {
    const Index j = i + static_cast<Index>(rng_sup.next_u64() % static_cast<std::uint64_t>(n - i));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  Philox rng_x(seed, kStreamXVals);
  g.x_o = Vector::Zero(n);
  for (Index i = 0; i < s; ++i) g.x_o[perm[static_cast<std::size_t>(i)]] = rng_x.uniform(-1.0, 1.0);

  Philox rng_xi(seed, kStreamXi), rng_y(seed, kStreamYRef);
  g.b.resize(m);
  for (Index i = 0; i < m; ++i) g.b[i] = rng_xi.uniform(-1.0, 1.0) * rng_y.normal();

  g.bbar_noiseless = (g.A * g.x_o + g.b).cwiseAbs2();
  return g;
}

Vector gen_noise(NoiseModel model, double param, Index m, std::uint64_t seed) {
  if (model == NoiseModel::kNone) return Vector::Zero(m);
  require(param > 0.0, "gen_noise: parameter must be positive");
  Philox rng(seed, kStreamNoise);
  Vector e(m);
  switch (model) {
    case NoiseModel::kGaussian:
      for (Index i = 0; i < m; ++i) e[i] = param * rng.normal();
      break;
    case NoiseModel::kCauchy:
      for (Index i = 0; i < m; ++i) e[i] = rng.cauchy(param);
      break;
    case NoiseModel::kUniform:
      for (Index i = 0; i < m; ++i) e[i] = rng.uniform(-param, param);
      break;
    case NoiseModel::kNone:
      break;
  }
  return e;
}

Metrics metrics(const Vector& x_star, const Vector& x_o, double threshold) {
  require(x_star.size() == x_o.size(), "metrics: dimension mismatch");
  const double no = x_o.norm();
  require(no > 0.0, "metrics: ground truth is zero (undefined metric)");
  Metrics out;
  out.rel_error = (x_star - x_o).norm() / no;
  out.snr_db = out.rel_error > 0.0 ? -20.0 * std::log10(out.rel_error) : 300.0;
  out.success = out.rel_error <= threshold;
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t ratio_index, int trial_index) {
  return Philox::mix(master, static_cast<std::uint64_t>(ratio_index),
                     static_cast<std::uint64_t>(trial_index));
}

int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LIFTADMM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
    if (cap >= 1 && cap >= static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

namespace {

TrialResult run_one_trial(const ExperimentConfig& cfg, std::size_t ratio_index, int trial_index) {
  TrialResult tr;
  tr.ratio = cfg.m_ratios[ratio_index];
  tr.m = static_cast<Index>(std::lround(tr.ratio * static_cast<double>(cfg.n)));
  tr.trial_index = trial_index;
  tr.seed = trial_seed(cfg.master_seed, ratio_index, trial_index);

  GeneratedInstance g = gen_instance(cfg.n, cfg.s, tr.m, tr.seed);
  Vector bbar = g.bbar_noiseless + gen_noise(cfg.noise, cfg.noise_param, tr.m, tr.seed);

  if (cfg.precondition_exponent > 0.0) {
    const double scale = std::pow(spectral_norm(g.A), cfg.precondition_exponent);
    g.A /= scale;
    g.b /= scale;
    bbar /= scale * scale;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const LiftedInstance inst = build_instance(g.A, g.b, bbar);
    CapRealParams params = cfg.params;
    params.sparsity = cfg.s;
    CapRealResult res;
    switch (cfg.algorithm) {
      case Algorithm::kCapReal:
        res = capreal_run(inst, params, g.x_o);
        break;
      case Algorithm::kPCapReal1:
        res = pcapreal_run(inst, PNorm::kOne, params, g.x_o);
        break;
      case Algorithm::kPCapReal2:
        res = pcapreal_run(inst, PNorm::kTwo, params, g.x_o);
        break;
      case Algorithm::kPCapRealInf:
        res = pcapreal_run(inst, PNorm::kInf, params, g.x_o);
        break;
      case Algorithm::kZero:
        res = baseline_run(BaselineVariant::kZero, inst, params, g.x_o);
        break;
      case Algorithm::kJacobi:
        res = baseline_run(BaselineVariant::kJacobi, inst, params, g.x_o);
        break;
      case Algorithm::kTwisted:
        res = baseline_run(BaselineVariant::kTwisted, inst, params, g.x_o);
        break;
    }
    const Vector x_star =
        compensate(res.x_hat, SymmetricMatrix(res.X_hat), res.Y_hat, cfg.s).x_star;
    const Metrics met = metrics(x_star, g.x_o, cfg.success_threshold);
    tr.rel_error = met.rel_error;
    tr.snr_db = met.snr_db;
    tr.success = met.success;
    tr.iterations = res.iterations;
    if (cfg.emit_traces && !cfg.output_dir.empty()) {
      std::filesystem::create_directories(cfg.output_dir);
      res.trace.to_csv(cfg.output_dir + "/trace_" + to_string(cfg.algorithm) + "_r" +
                       std::to_string(ratio_index) + "_t" + std::to_string(trial_index) + ".csv");
    }
  } catch (const std::exception& ex) {
    tr.error = ex.what();
    tr.rel_error = std::numeric_limits<double>::infinity();
    tr.snr_db = -std::numeric_limits<double>::infinity();
    tr.success = false;
  }
  tr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return tr;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n_ratios = cfg.m_ratios.size();
  const std::size_t total = n_ratios * static_cast<std::size_t>(cfg.trials);

  std::vector<TrialResult> results(total);
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(thread_budget(), static_cast<int>(total));
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::size_t ratio_index = i / static_cast<std::size_t>(cfg.trials);
      const int trial_index = static_cast<int>(i % static_cast<std::size_t>(cfg.trials));
      results[i] = run_one_trial(cfg, ratio_index, trial_index);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResult out;
  out.trial_results = std::move(results);  // already ordered by (ratio, trial)
  for (std::size_t r = 0; r < n_ratios; ++r) {
    TableRow row;
    row.ratio = cfg.m_ratios[r];
    row.m = static_cast<Index>(std::lround(row.ratio * static_cast<double>(cfg.n)));
    row.trials = cfg.trials;
    std::vector<double> rels;
    double snr_sum = 0.0, it_sum = 0.0, time_sum = 0.0;
    int successes = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      const TrialResult& tr = out.trial_results[r * static_cast<std::size_t>(cfg.trials) +
                                                static_cast<std::size_t>(t)];
      successes += tr.success ? 1 : 0;
      rels.push_back(tr.rel_error);
      snr_sum += std::isfinite(tr.snr_db) ? tr.snr_db : 0.0;
      it_sum += tr.iterations;
      time_sum += tr.wall_seconds;
    }
    std::sort(rels.begin(), rels.end());
    row.success_percent = 100.0 * successes / cfg.trials;
    row.mean_snr_db = snr_sum / cfg.trials;
    row.median_rel_error = rels[rels.size() / 2];
    row.mean_iterations = it_sum / cfg.trials;
    row.mean_wall_seconds = time_sum / cfg.trials;
    out.rows.push_back(row);
  }
  return out;
}

void emit_csv(const ExperimentResult& result, const std::string& path) {
  require(!result.rows.empty(), "emit_csv: no rows to emit");
  std::ofstream out(path);
  if (!out) throw InvalidArgument("emit_csv: cannot open " + path);
  out.precision(17);
  out << "ratio,m,trials,success_percent,mean_snr_db,median_rel_error,mean_iterations,"
         "mean_wall_seconds\n";
  for (const auto& r : result.rows)
    out << r.ratio << ',' << r.m << ',' << r.trials << ',' << r.success_percent << ','
        << r.mean_snr_db << ',' << r.median_rel_error << ',' << r.mean_iterations << ','
        << r.mean_wall_seconds << '\n';
}

namespace {

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"n", c.n},
          {"s", c.s},
          {"m_ratios", c.m_ratios},
          {"trials", c.trials},
          {"noise", to_string(c.noise)},
          {"noise_param", c.noise_param},
          {"algorithm", to_string(c.algorithm)},
          {"tau", c.params.tau},
          {"lambda", c.params.lambda},
          {"rho", c.params.rho},
          {"beta", c.params.beta},
          {"max_iter", c.params.max_iter},
          {"epsilon", c.params.epsilon},
          {"epsilon_tilde", c.params.epsilon_tilde},
          {"success_threshold", c.success_threshold},
          {"master_seed", c.master_seed},
          {"precondition_exponent", c.precondition_exponent}};
}

}  // namespace

void emit_json(const ExperimentResult& result, const ExperimentConfig& config,
               const std::string& path) {
  require(!result.rows.empty(), "emit_json: no rows to emit");
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows)
    rows.push_back({{"ratio", r.ratio},
                    {"m", r.m},
                    {"trials", r.trials},
                    {"success_percent", r.success_percent},
                    {"mean_snr_db", r.mean_snr_db},
                    {"median_rel_error", r.median_rel_error},
                    {"mean_iterations", r.mean_iterations},
                    {"mean_wall_seconds", r.mean_wall_seconds}});
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : result.trial_results)
    trials.push_back({{"seed", t.seed},
                      {"ratio", t.ratio},
                      {"m", t.m},
                      {"trial", t.trial_index},
                      {"rel_error", std::isfinite(t.rel_error) ? t.rel_error : -1.0},
                      {"snr_db", std::isfinite(t.snr_db) ? t.snr_db : -999.0},
                      {"success", t.success},
                      {"iterations", t.iterations},
                      {"wall_seconds", t.wall_seconds},
                      {"error", t.error}});
  nlohmann::json doc = {{"schema", "liftadmm/1"},
                        {"config", config_to_json(config)},
                        {"rows", rows},
                        {"trials", trials}};
  std::ofstream out(path);
  if (!out) throw InvalidArgument("emit_json: cannot open " + path);
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Bench tables
// ---------------------------------------------------------------------------

namespace {

ExperimentConfig bench_base(std::uint64_t master_seed, bool full) {
  ExperimentConfig c;
  c.n = 64;
  c.s = 4;
  c.trials = full ? 100 : 20;
  c.m_ratios = full ? std::vector<double>{0.5, 0.75, 0.875, 1.0, 1.25, 1.5, 1.75, 2.0}
                    : std::vector<double>{0.5, 1.0, 1.5, 2.0};
  c.master_seed = master_seed;
  c.params.tau = 1.0;
  c.params.lambda = 1.0;
  c.params.beta = 2.0;
  return c;
}

/// rho tuned per noise level: the slack penalty must scale like the inverse
/// of the preconditioned noise magnitude. s^2 here is the typical
/// ||A||_2^(2q) preconditioning scale at n = 64, m = 128.
double bench_rho(double noise_param) { return 9.5 / noise_param; }

}  // namespace

std::map<std::string, ExperimentResult> run_bench_table(int table, bool full,
                                                        std::uint64_t master_seed,
                                                        const std::string& output_dir) {
  std::map<std::string, ExperimentResult> out;
  if (!output_dir.empty()) std::filesystem::create_directories(output_dir);
  auto save = [&](const std::string& label, const ExperimentConfig& cfg) {
    ExperimentResult r = run_experiment(cfg);
    if (!output_dir.empty()) {
      emit_csv(r, output_dir + "/table" + std::to_string(table) + "_" + label + ".csv");
      emit_json(r, cfg, output_dir + "/table" + std::to_string(table) + "_" + label + ".json");
    }
    out.emplace(label, std::move(r));
  };

  switch (table) {
    case 1: {
      // success percentage across step-size schedules
      const std::vector<std::pair<std::string, Schedule>> schedules = {
          {"alpha_1_8", Schedule::constant(0.125)}, {"alpha_1_4", Schedule::constant(0.25)},
          {"alpha_1_3", Schedule::constant(1.0 / 3.0)}, {"alpha_1_2", Schedule::constant(0.5)},
          {"piecewise_up", Schedule::piecewise_up()}, {"piecewise_down", Schedule::piecewise_down()}};
      for (const auto& [label, sched] : schedules) {
        ExperimentConfig c = bench_base(master_seed, full);
        c.params.schedule = sched;
        save(label, c);
      }
      break;
    }
    case 2: {
      // algorithm comparison at the same instances (paired by master seed)
      for (Algorithm a : {Algorithm::kCapReal, Algorithm::kZero, Algorithm::kJacobi,
                          Algorithm::kTwisted}) {
        ExperimentConfig c = bench_base(master_seed, full);
        c.m_ratios = full ? std::vector<double>{1.0, 1.5, 2.0} : std::vector<double>{2.0};
        c.algorithm = a;
        if (a == Algorithm::kTwisted) c.params.twisted_relax = 0.6;  // stable at this scale
        save(to_string(a), c);
      }
      break;
    }
    case 4: {
      for (double sigma : {1e-3, 1e-1}) {
        ExperimentConfig c = bench_base(master_seed, full);
        c.trials = full ? 100 : 10;
        c.algorithm = Algorithm::kPCapReal2;
        c.noise = NoiseModel::kGaussian;
        c.noise_param = sigma;
        c.params.rho = bench_rho(sigma);
        save("sigma_" + std::to_string(sigma), c);
      }
      break;
    }
    case 5: {
      for (double gamma : {1e-4, 1e-2}) {
        ExperimentConfig c = bench_base(master_seed, full);
        c.trials = full ? 100 : 10;
        c.algorithm = Algorithm::kPCapReal1;
        c.noise = NoiseModel::kCauchy;
        c.noise_param = gamma;
        c.params.rho = bench_rho(gamma);
        save("gamma_" + std::to_string(gamma), c);
      }
      break;
    }
    case 6: {
      for (double delta : {1e-3, 1e-2, 1e-1, 1.0}) {
        ExperimentConfig c = bench_base(master_seed, full);
        c.trials = full ? 100 : 10;
        c.algorithm = Algorithm::kPCapRealInf;
        c.noise = NoiseModel::kUniform;
        c.noise_param = delta;
        c.params.rho = bench_rho(delta);
        save("delta_" + std::to_string(delta), c);
      }
      break;
    }
    default:
      throw InvalidArgument("run_bench_table: table must be one of {1, 2, 4, 5, 6}");
  }
  return out;
}

}  // namespace liftadmm
