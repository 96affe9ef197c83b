#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "infbo/errors.hpp"
#include "infbo/harness.hpp"

namespace infbo {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(out);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a nonnegative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: " + key + " expects true/false, got '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_key_help() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"benchmark", "objective name (ackley|rosenbrock|stybtang[_ht|_ns]|quadratic); required"},
      {"dimension", "decision-space dimension (default 2)"},
      {"algorithm", "comma list of infgp_ts|gp_ts|gp_ucb|gp_ei (default infgp_ts)"},
      {"budget", "optimization iterations N after seeding (default 100)"},
      {"replications", "independent replications R (default 10)"},
      {"seed", "root RNG seed (default 12345)"},
      {"workers", "parallel replication workers, 0 = logical cores (default 0)"},
      {"output_dir", "directory for CSV/SVG artifacts (default out)"},
      {"acquisition.C1", "exploration schedule constant in (0,1] (default 1.0)"},
      {"acquisition.lambda1", "exploration decay exponent in (0,1) (default 0.5)"},
      {"acquisition.num_candidates", "candidate-set size, 0 = 256*dimension (default 0)"},
      {"acquisition.candidate_scheme", "latin_hypercube | uniform (default latin_hypercube)"},
      {"gibbs.B", "Gibbs sweeps per fit (default 500)"},
      {"gibbs.L_max", "cap on the truncation level (default 16)"},
      {"gibbs.kappa", "truncation slack; negative tracks the nu estimate (default -1)"},
      {"gibbs.warm_start", "reuse the previous iteration's chain state (default true)"},
      {"gibbs.phi_mode", "isotropic_grid | anisotropic_mle (default isotropic_grid)"},
      {"gibbs.phi_grid_size", "grid points for the isotropic length-scale update (default 30)"},
      {"prior.a_tau", "observation-variance prior shape (default 2)"},
      {"prior.b_tau", "observation-variance prior scale, 0 = standardized variance (default 0)"},
      {"prior.a_sigma", "surface-variance prior shape (default 2)"},
      {"prior.b_sigma", "surface-variance prior scale, 0 = standardized variance (default 0)"},
      {"prior.a_nu", "concentration prior shape (default 2)"},
      {"prior.b_nu", "concentration prior rate (default 2)"},
      {"prior.b_phi", "length-scale upper support, 0 = from box diameter (default 0)"},
      {"prior.beta0", "trend prior mean, broadcast over dimensions (default 0)"},
      {"prior.sigma_beta_scale", "trend prior covariance scale (default 100)"},
      {"weights.checkpoint_every", "surface-weight export cadence (default 10)"},
  };
  return keys;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");

    if (key == "benchmark") cfg.benchmark = value;
    else if (key == "dimension") cfg.dimension = to_int(key, value);
    else if (key == "algorithm") cfg.algorithms = split_csv(value);
    else if (key == "budget") cfg.budget = to_int(key, value);
    else if (key == "replications") cfg.replications = to_int(key, value);
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "workers") cfg.workers = to_int(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "acquisition.C1") cfg.acq.c1 = to_double(key, value);
    else if (key == "acquisition.lambda1") cfg.acq.lambda1 = to_double(key, value);
    else if (key == "acquisition.num_candidates") cfg.acq.num_candidates = to_int(key, value);
    else if (key == "acquisition.candidate_scheme") {
      if (value == "uniform") cfg.acq.scheme = CandidateScheme::kUniform;
      else if (value == "latin_hypercube") cfg.acq.scheme = CandidateScheme::kLatinHypercube;
      else throw ConfigError("config: acquisition.candidate_scheme must be uniform or "
                             "latin_hypercube, got '" + value + "'");
    }
    else if (key == "gibbs.B") cfg.gibbs_sweeps = to_int(key, value);
    else if (key == "gibbs.L_max") cfg.l_max = to_int(key, value);
    else if (key == "gibbs.kappa") cfg.kappa = to_double(key, value);
    else if (key == "gibbs.warm_start") cfg.warm_start = to_bool(key, value);
    else if (key == "gibbs.phi_mode") {
      if (value == "isotropic_grid") cfg.phi_mode = PhiMode::kIsotropicGrid;
      else if (value == "anisotropic_mle") cfg.phi_mode = PhiMode::kAnisotropicMle;
      else throw ConfigError("config: gibbs.phi_mode must be isotropic_grid or "
                             "anisotropic_mle, got '" + value + "'");
    }
    else if (key == "gibbs.phi_grid_size") cfg.priors.phi_grid_size = to_int(key, value);
    else if (key == "prior.a_tau") cfg.priors.a_tau = to_double(key, value);
    else if (key == "prior.b_tau") cfg.priors.b_tau = to_double(key, value);
    else if (key == "prior.a_sigma") cfg.priors.a_sigma = to_double(key, value);
    else if (key == "prior.b_sigma") cfg.priors.b_sigma = to_double(key, value);
    else if (key == "prior.a_nu") cfg.priors.a_nu = to_double(key, value);
    else if (key == "prior.b_nu") cfg.priors.b_nu = to_double(key, value);
    else if (key == "prior.b_phi") cfg.priors.b_phi = to_double(key, value);
    else if (key == "prior.beta0") cfg.priors.beta0 = to_double(key, value);
    else if (key == "prior.sigma_beta_scale") cfg.priors.sigma_beta_scale = to_double(key, value);
    else if (key == "weights.checkpoint_every")
      cfg.weights_checkpoint_every = to_int(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void ExperimentConfig::validate() const {
  if (benchmark.empty()) throw ConfigError("config: benchmark is required");
  const auto names = objective_names();
  if (std::find(names.begin(), names.end(), benchmark) == names.end())
    throw ConfigError("config: benchmark '" + benchmark + "' is not registered");
  if (dimension < 1) throw ConfigError("config: dimension must be >= 1");
  if (algorithms.empty()) throw ConfigError("config: algorithm list is empty");
  for (const auto& a : algorithms) algorithm_from_name(a);  // throws on unknown
  if (budget < 1) throw ConfigError("config: budget must be >= 1");
  if (replications < 1) throw ConfigError("config: replications must be >= 1");
  if (workers < 0) throw ConfigError("config: workers must be >= 0");
  if (gibbs_sweeps < 1) throw ConfigError("config: gibbs.B must be >= 1");
  if (l_max < 2) throw ConfigError("config: gibbs.L_max must be >= 2");
  if (weights_checkpoint_every < 1)
    throw ConfigError("config: weights.checkpoint_every must be >= 1");
  try {
    acq.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: acquisition settings invalid: ") + e.what());
  }
  // Benchmark/dimension compatibility (e.g. rosenbrock needs d >= 2).
  make_objective(benchmark, dimension);
}

OptimizeConfig ExperimentConfig::optimize_config(Algorithm algorithm) const {
  OptimizeConfig oc;
  oc.algorithm = algorithm;
  oc.budget = budget;
  oc.acq = acq;
  oc.gibbs_sweeps = gibbs_sweeps;
  oc.warm_start = warm_start;
  oc.phi_mode = phi_mode;
  oc.l_max = l_max;
  oc.kappa = kappa;
  oc.priors = priors;
  return oc;
}

}  // namespace infbo
