#pragma once

// JSON ingest for generic multi-block problems and experiment configs, plus
// the JSON + binary instance bundle (A, b, bbar, x_o, seed).

#include "liftadmm/experiment.hpp"
#include "liftadmm/lifting.hpp"
#include "liftadmm/multiblock.hpp"

#include <optional>
#include <string>
#include <utility>

namespace liftadmm {

/// Parse a problem document:
/// {
///   "blocks": [{"A": [[...]] | {"file": "A.csv"},
///               "objective": {"kind": "quadratic"|"l1"|"trace_psd"|"lp"|"linf"|"zero", ...},
///               "h": {"kind": "prox_linear"|"standard"|"explicit", ...}  (optional)}, ...],
///   "c": [...],
///   "config": {"beta", "h_spec", "schedule", "epsilon", "max_iter", "seed"}
/// }
/// Matrix file references are CSV, one row per line.
std::pair<BlockProblem, SolverConfig> load_problem_json(const std::string& path);

/// Experiment config document; keys mirror ExperimentConfig.
ExperimentConfig load_experiment_json(const std::string& path);

/// Instance bundle: <path>.json manifest + <path>.bin with little-endian f64
/// arrays (A column-major, then b, bbar, optional x_o).
struct InstanceBundle {
  Matrix A;
  Vector b;
  Vector bbar;
  std::optional<Vector> x_o;
  std::uint64_t seed = 0;
};

void save_instance_bundle(const InstanceBundle& bundle, const std::string& path_prefix);
InstanceBundle load_instance_bundle(const std::string& path_prefix);

Matrix load_csv_matrix(const std::string& path);

}  // namespace liftadmm
