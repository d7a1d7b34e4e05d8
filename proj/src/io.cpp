#include "liftadmm/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace liftadmm {

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  json doc;
  in >> doc;
  return doc;
}

Matrix matrix_from_json(const json& node, const std::string& base_dir) {
  if (node.is_object() && node.contains("file")) {
    std::filesystem::path p = node.at("file").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return load_csv_matrix(p.string());
  }
  require(node.is_array() && !node.empty(), "matrix: expected nested array or {file: ...}");
  const std::size_t rows = node.size();
  const std::size_t cols = node.at(0).size();
  Matrix M(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    require(node.at(i).size() == cols, "matrix: ragged rows");
    for (std::size_t j = 0; j < cols; ++j)
      M(static_cast<Index>(i), static_cast<Index>(j)) = node.at(i).at(j).get<double>();
  }
  return M;
}

Vector vector_from_json(const json& node) {
  require(node.is_array(), "vector: expected array");
  Vector v(static_cast<Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v[static_cast<Index>(i)] = node.at(i).get<double>();
  return v;
}

BlockObjective objective_from_json(const json& node) {
  const std::string kind = node.value("kind", "zero");
  if (kind == "zero") return BlockObjective::zero();
  if (kind == "quadratic") {
    Matrix Q = matrix_from_json(node.at("Q"), "");
    Vector q = node.contains("q") ? vector_from_json(node.at("q")) : Vector::Zero(Q.rows());
    return BlockObjective::quadratic(std::move(Q), std::move(q));
  }
  if (kind == "l1") return BlockObjective::l1(node.at("coeff").get<double>());
  if (kind == "trace_psd") return BlockObjective::trace_psd(node.at("dim").get<Index>());
  if (kind == "lp")
    return BlockObjective::lp(node.at("p").get<int>(), node.at("coeff").get<double>());
  if (kind == "linf") return BlockObjective::linf(node.at("coeff").get<double>());
  throw InvalidArgument("objective: unknown kind '" + kind + "'");
}

HSpec hspec_from_json(const json& node) {
  const std::string kind = node.value("kind", "prox_linear");
  if (kind == "prox_linear") return HSpec::prox_linear(node.at("eta").get<double>());
  if (kind == "standard") return HSpec::standard(node.at("eta").get<double>());
  if (kind == "explicit") return HSpec::explicit_matrix(matrix_from_json(node.at("H"), ""));
  throw InvalidArgument("h spec: unknown kind '" + kind + "'");
}

Schedule schedule_from_json(const json& node) {
  const std::string kind = node.value("kind", "constant");
  if (kind == "constant") return Schedule::constant(node.value("alpha", 0.25));
  if (kind == "zero") return Schedule::zero();
  if (kind == "adaptive") return Schedule::adaptive();
  if (kind == "piecewise_increasing") return Schedule::piecewise_up();
  if (kind == "piecewise_decreasing") return Schedule::piecewise_down();
  throw InvalidArgument("schedule: unknown kind '" + kind + "'");
}

}  // namespace

Matrix load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty()) require(row.size() == rows.front().size(), "csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), "csv: empty file " + path);
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return M;
}

std::pair<BlockProblem, SolverConfig> load_problem_json(const std::string& path) {
  const json doc = load_json_file(path);
  const std::string base = std::filesystem::path(path).parent_path().string();

  BlockProblem problem;
  SolverConfig config;
  std::vector<HSpec> per_block;
  bool any_block_h = false;

  for (const auto& bnode : doc.at("blocks")) {
    Block blk;
    blk.A = matrix_from_json(bnode.at("A"), base);
    blk.f = objective_from_json(bnode.value("objective", json{{"kind", "zero"}}));
    problem.blocks.push_back(std::move(blk));
    if (bnode.contains("h")) {
      per_block.push_back(hspec_from_json(bnode.at("h")));
      any_block_h = true;
    } else {
      per_block.push_back(HSpec::prox_linear(0.0));  // placeholder; filled from global spec
    }
  }
  problem.c = vector_from_json(doc.at("c"));

  const json cnode = doc.value("config", json::object());
  config.beta = cnode.value("beta", 1.0);
  config.epsilon = cnode.value("epsilon", 1e-8);
  config.max_iter = cnode.value("max_iter", 10000);
  config.seed = cnode.value("seed", 0);
  if (cnode.contains("schedule")) config.schedule = schedule_from_json(cnode.at("schedule"));

  if (any_block_h) {
    // Blocks without their own spec fall back to the global one.
    if (cnode.contains("h_spec")) {
      const HSpec global = hspec_from_json(cnode.at("h_spec"));
      for (std::size_t j = 0; j < per_block.size(); ++j) {
        const auto& bnode = doc.at("blocks").at(j);
        if (!bnode.contains("h")) per_block[j] = global;
      }
    }
    config.h = std::move(per_block);
  } else if (cnode.contains("h_spec")) {
    config.h = {hspec_from_json(cnode.at("h_spec"))};
  } else {
    throw InvalidArgument("problem json: no H spec given (config.h_spec or per-block h)");
  }
  return {std::move(problem), std::move(config)};
}

ExperimentConfig load_experiment_json(const std::string& path) {
  const json doc = load_json_file(path);
  ExperimentConfig c;
  c.n = doc.value("n", c.n);
  c.s = doc.value("s", c.s);
  if (doc.contains("m_ratios")) c.m_ratios = doc.at("m_ratios").get<std::vector<double>>();
  c.trials = doc.value("trials", c.trials);
  const std::string noise = doc.value("noise", "none");
  if (noise == "none") c.noise = NoiseModel::kNone;
  else if (noise == "gaussian") c.noise = NoiseModel::kGaussian;
  else if (noise == "cauchy") c.noise = NoiseModel::kCauchy;
  else if (noise == "uniform") c.noise = NoiseModel::kUniform;
  else throw InvalidArgument("experiment json: unknown noise model '" + noise + "'");
  c.noise_param = doc.value("noise_param", 0.0);
  const std::string alg = doc.value("algorithm", "capreal");
  if (alg == "capreal") c.algorithm = Algorithm::kCapReal;
  else if (alg == "pcapreal-1") c.algorithm = Algorithm::kPCapReal1;
  else if (alg == "pcapreal-2") c.algorithm = Algorithm::kPCapReal2;
  else if (alg == "pcapreal-inf") c.algorithm = Algorithm::kPCapRealInf;
  else if (alg == "zero") c.algorithm = Algorithm::kZero;
  else if (alg == "jacobi") c.algorithm = Algorithm::kJacobi;
  else if (alg == "twisted") c.algorithm = Algorithm::kTwisted;
  else throw InvalidArgument("experiment json: unknown algorithm '" + alg + "'");
  c.params.tau = doc.value("tau", c.params.tau);
  c.params.lambda = doc.value("lambda", c.params.lambda);
  c.params.rho = doc.value("rho", c.params.rho);
  c.params.beta = doc.value("beta", c.params.beta);
  c.params.epsilon = doc.value("epsilon", c.params.epsilon);
  c.params.epsilon_tilde = doc.value("epsilon_tilde", c.params.epsilon_tilde);
  c.params.max_iter = doc.value("max_iter", c.params.max_iter);
  c.params.literal_y_threshold = doc.value("literal_y_threshold", false);
  c.params.twisted_relax = doc.value("twisted_relax", c.params.twisted_relax);
  c.params.jacobi_gamma = doc.value("jacobi_gamma", c.params.jacobi_gamma);
  if (doc.contains("schedule")) c.params.schedule = schedule_from_json(doc.at("schedule"));
  c.success_threshold = doc.value("success_threshold", c.success_threshold);
  c.master_seed = doc.value("master_seed", c.master_seed);
  c.precondition_exponent = doc.value("precondition_exponent", c.precondition_exponent);
  c.emit_traces = doc.value("emit_traces", false);
  c.output_dir = doc.value("output_dir", std::string{});
  return c;
}

namespace {

void append_array(std::ofstream& bin, json& manifest, const std::string& name,
                  const double* data, Index rows, Index cols, std::size_t& offset) {
  const std::size_t bytes = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 8;
  bin.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  manifest["arrays"][name] = {{"offset", offset}, {"rows", rows}, {"cols", cols}};
  offset += bytes;
}

}  // namespace

void save_instance_bundle(const InstanceBundle& bundle, const std::string& path_prefix) {
  json manifest = {{"schema", "liftadmm/instance/1"},
                   {"dtype", "f64"},
                   {"byte_order", "little"},
                   {"order", "column_major"},
                   {"n", bundle.A.cols()},
                   {"m", bundle.A.rows()},
                   {"seed", bundle.seed},
                   {"arrays", json::object()}};
  std::ofstream bin(path_prefix + ".bin", std::ios::binary);
  if (!bin) throw InvalidArgument("save_instance_bundle: cannot open " + path_prefix + ".bin");
  std::size_t offset = 0;
  append_array(bin, manifest, "A", bundle.A.data(), bundle.A.rows(), bundle.A.cols(), offset);
  append_array(bin, manifest, "b", bundle.b.data(), bundle.b.size(), 1, offset);
  append_array(bin, manifest, "bbar", bundle.bbar.data(), bundle.bbar.size(), 1, offset);
  if (bundle.x_o)
    append_array(bin, manifest, "x_o", bundle.x_o->data(), bundle.x_o->size(), 1, offset);
  std::ofstream meta(path_prefix + ".json");
  if (!meta) throw InvalidArgument("save_instance_bundle: cannot open " + path_prefix + ".json");
  meta << manifest.dump(2) << '\n';
}

InstanceBundle load_instance_bundle(const std::string& path_prefix) {
  const json manifest = load_json_file(path_prefix + ".json");
  require(manifest.value("schema", "") == "liftadmm/instance/1",
          "load_instance_bundle: unknown schema");
  std::ifstream bin(path_prefix + ".bin", std::ios::binary);
  if (!bin) throw InvalidArgument("load_instance_bundle: cannot open " + path_prefix + ".bin");

  auto read_array = [&](const std::string& name) -> Matrix {
    const auto& node = manifest.at("arrays").at(name);
    const Index rows = node.at("rows").get<Index>();
    const Index cols = node.at("cols").get<Index>();
    Matrix M(rows, cols);
    bin.seekg(static_cast<std::streamoff>(node.at("offset").get<std::size_t>()));
    bin.read(reinterpret_cast<char*>(M.data()),
             static_cast<std::streamsize>(static_cast<std::size_t>(rows * cols) * 8));
    if (!bin) throw NumericFailure("load_instance_bundle: short read for " + name);
    return M;
  };

  InstanceBundle out;
  out.A = read_array("A");
  out.b = read_array("b").col(0);
  out.bbar = read_array("bbar").col(0);
  if (manifest.at("arrays").contains("x_o")) out.x_o = Vector(read_array("x_o").col(0));
  out.seed = manifest.value("seed", 0ull);
  return out;
}

}  // namespace liftadmm
