#include "weavemc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "weavemc/dynamics.hpp"
#include "weavemc/errors.hpp"
#include "weavemc/targets.hpp"
#include "weavemc/transforms.hpp"
#include "weavemc/tune.hpp"

namespace weavemc {

namespace {

constexpr const char* kVersion = "weavemc 0.1.0";

// Stream indices for seed_split; chains use index kernel * 2^20 + chain + 1.
constexpr std::uint64_t kPretuneStream = 1ull << 40;
constexpr std::uint64_t kTuneStream = 1ull << 41;
constexpr std::uint64_t kSimStream = 1ull << 42;

const std::vector<std::string> kAllKernels = {"rwm",     "pcn", "mpcn", "wm",
                                              "hwm",     "inf_hmc", "hug", "hmc"};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: bad numeric value '" + value + "' for key '" + key + "'");
  }
}

long parse_long(const std::string& value, const std::string& key) {
  const double v = parse_double(value, key);
  if (v != std::floor(v)) throw config_error("config: key '" + key + "' expects an integer");
  return static_cast<long>(v);
}

// name(k=v,k=v) -> {name, {k: v}}
std::pair<std::string, std::map<std::string, double>> parse_spec(const std::string& spec) {
  const auto open = spec.find('(');
  if (open == std::string::npos) return {trim(spec), {}};
  if (spec.back() != ')') throw config_error("config: malformed spec '" + spec + "'");
  std::map<std::string, double> params;
  std::stringstream args(spec.substr(open + 1, spec.size() - open - 2));
  std::string item;
  while (std::getline(args, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw config_error("config: expected key=value in spec '" + spec + "'");
    params[trim(item.substr(0, eq))] = parse_double(trim(item.substr(eq + 1)), item);
  }
  return {trim(spec.substr(0, open)), params};
}

double spec_param(const std::map<std::string, double>& params, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (fallback) return *fallback;
  throw config_error("config: target spec is missing parameter '" + key + "'");
}

int worker_cap() {
  if (const char* env = std::getenv("WEAVEMC_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  ExperimentConfig config;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config: expected key = value at " + path + ":" +
                         std::to_string(line_no));
    apply_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "target") {
    config.target_spec = value;
  } else if (key == "dataset") {
    config.dataset = value;
  } else if (key == "kernel") {
    config.kernels.clear();
    if (value == "all") {
      config.kernels = kAllKernels;
    } else {
      std::stringstream ss(value);
      std::string name;
      while (std::getline(ss, name, ',')) config.kernels.push_back(trim(name));
    }
  } else if (key == "h") {
    config.h = value == "auto" ? std::optional<double>() : parse_double(value, key);
  } else if (key == "s") {
    config.s = value == "auto" ? std::optional<double>() : parse_double(value, key);
  } else if (key == "L") {
    config.leaps = static_cast<int>(parse_long(value, key));
  } else if (key == "jitter") {
    config.jitter = parse_double(value, key);
  } else if (key == "iters") {
    config.iters = parse_long(value, key);
  } else if (key == "burnin") {
    config.burnin = parse_long(value, key);
  } else if (key == "chains") {
    config.chains = static_cast<int>(parse_long(value, key));
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_long(value, key));
  } else if (key == "pretune_iters") {
    config.pretune_iters = parse_long(value, key);
  } else if (key == "auto_ar") {
    config.auto_ar = parse_double(value, key);
  } else if (key == "out") {
    config.out = value;
  } else {
    throw config_error("config: unknown key '" + key + "'");
  }
}

TargetEntry build_target(const std::string& spec, const std::string& dataset_path,
                         std::uint64_t seed) {
  auto [name, params] = parse_spec(spec);
  TargetEntry entry;
  entry.name = name;
  entry.allowed_refs = {ReferenceKind::Lebesgue, ReferenceKind::Gaussian,
                        ReferenceKind::HaarMixture};
  if (name == "gaussian") {
    const Eigen::Index d = static_cast<Eigen::Index>(spec_param(params, "d"));
    const double rho = spec_param(params, "rho", 0.0);
    const double s = spec_param(params, "s", 1.0);
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        cov(i, j) = s * std::pow(rho, std::abs(static_cast<double>(i - j)));
    entry.model = gaussian_target(d, Eigen::VectorXd::Zero(d), std::move(cov));
  } else if (name == "student_t") {
    const Eigen::Index d = static_cast<Eigen::Index>(spec_param(params, "d"));
    const double nu = spec_param(params, "nu", 3.0);
    entry.model = student_t_target(d, nu, Eigen::VectorXd::Zero(d),
                                   Eigen::MatrixXd::Identity(d, d));
  } else if (name == "logistic") {
    if (dataset_path.empty())
      throw config_error("config: logistic target requires dataset=<csv path>");
    entry.model = logistic_target(load_dataset(dataset_path, "label"));
  } else if (name == "sv") {
    const int T = static_cast<int>(spec_param(params, "T", 100));
    const double phi = spec_param(params, "phi", 0.5);
    const double sigma = spec_param(params, "sigma", 10.0);
    entry.model = sv_target(sv_simulate(T, phi, sigma, seed_split(seed, kSimStream)));
  } else if (name == "sde") {
    const Eigen::Index d = static_cast<Eigen::Index>(spec_param(params, "d", 50));
    const int n = static_cast<int>(spec_param(params, "n", 100));
    const double horizon = spec_param(params, "horizon", 5.0);
    Eigen::MatrixXd scale_v = wishart_scale(d, 50, seed_split(seed, kSimStream + 1));
    Eigen::MatrixXd path = sde_simulate(d, n, horizon, Eigen::VectorXd::Ones(d), scale_v,
                                        seed_split(seed, kSimStream + 2));
    entry.model = sde_target(std::move(path), horizon / n, std::move(scale_v));
  } else {
    throw config_error("config: unknown target '" + name + "'");
  }
  return entry;
}

void validate_kernel_target(const std::string& kernel_name, const TargetEntry& target) {
  const ReferenceKind kind = kernel_reference_kind(kernel_name);
  if (target.allowed_refs.count(kind) == 0)
    throw config_error("config: kernel '" + kernel_name + "' needs a " +
                       std::string(to_string(kind)) + " reference, which target '" +
                       target.name + "' does not support");
}

void validate_config(const ExperimentConfig& config) {
  if (config.target_spec.empty()) throw config_error("config: target is required");
  if (config.kernels.empty()) throw config_error("config: kernel is required");
  for (const auto& k : config.kernels) kernel_reference_kind(k);  // throws on unknown
  if (config.iters <= config.effective_burnin() || config.effective_burnin() < 0)
    throw config_error("config: need iters > burnin >= 0");
  if (config.chains < 1) throw config_error("config: chains must be >= 1");
  if (config.jitter < 0.0 || config.jitter >= 1.0)
    throw config_error("config: jitter must lie in [0, 1)");
  if (config.leaps < 0) throw config_error("config: L must be >= 0");
  if (config.pretune_iters < 1) throw config_error("config: pretune_iters must be >= 1");
}

double default_acceptance_target(const std::string& kernel_name) {
  if (kernel_name == "rwm") return 0.25;
  if (kernel_name == "pcn" || kernel_name == "mpcn") return 0.40;
  if (kernel_name == "wm" || kernel_name == "hwm") return 0.60;
  return 0.65;  // inf_hmc, hug, hmc
}

namespace {

struct ChainTask {
  int kernel_index = 0;
  int chain_index = 0;
};

ChainResult run_single_chain(const Kernel& kernel, const ExperimentConfig& config,
                             const Preconditioner& pre, std::uint64_t chain_seed) {
  // The start point is a draw from the pretuned Gaussian, which keeps Haar
  // kernels away from their center singularity.
  Rng start_rng(seed_split(chain_seed, 0));
  Eigen::VectorXd x0 = pre.sample_gaussian(start_rng);
  KernelState state = kernel.init_state(x0, seed_split(chain_seed, 1));

  const long burn = config.effective_burnin();
  const long kept = config.iters - burn;
  ChainRecord record;
  record.draws.resize(kept, kernel.model().dim());
  record.log_like_leb.resize(kept);
  record.accept_flags.assign(static_cast<size_t>(kept), 0);

  const auto start = std::chrono::steady_clock::now();
  for (long it = 0; it < config.iters; ++it) {
    StepOutcome out = kernel.step(state);
    if (it >= burn) {
      record.draws.row(it - burn) = state.x.transpose();
      record.log_like_leb[it - burn] = out.log_like_leb;
      record.accept_flags[static_cast<size_t>(it - burn)] = out.accepted ? 1 : 0;
    }
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ChainResult result;
  result.summary = summarize(record, std::string(kernel.name()));
  result.seed = chain_seed;
  return result;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  TargetEntry target = build_target(config.target_spec, config.dataset, config.seed);
  for (const auto& name : config.kernels) validate_kernel_target(name, target);

  Rng pretune_rng(seed_split(config.seed, kPretuneStream));
  Preconditioner pre = adaptive_pretune(*target.model, config.pretune_iters, pretune_rng);

  ExperimentReport report;
  report.config = config;
  report.version = kVersion;

  // Resolve kernels, auto-tuning the step scale where none was given.
  std::vector<std::unique_ptr<Kernel>> kernels;
  for (size_t k = 0; k < config.kernels.size(); ++k) {
    const std::string& name = config.kernels[k];
    KernelSettings settings;
    settings.h = config.h;
    settings.s = config.s;
    settings.leaps = config.leaps;
    settings.jitter = config.jitter;
    const bool needs_tuning = name == "rwm" ? !config.s.has_value() : !config.h.has_value();
    auto kernel = make_kernel(name, *target.model, pre, settings);
    if (needs_tuning) {
      Rng tune_rng(seed_split(config.seed, kTuneStream + k));
      Eigen::VectorXd x0 = pre.sample_gaussian(tune_rng);
      const double ar = config.auto_ar.value_or(default_acceptance_target(name));
      TuneResult tuned = tune_acceptance(*kernel, x0, ar, 0.05, tune_rng);
      report.tuned_params[name] = tuned.param;
    }
    kernels.push_back(std::move(kernel));
  }

  // One task per (kernel, chain); execution order does not affect the report.
  std::vector<ChainTask> tasks;
  for (size_t k = 0; k < kernels.size(); ++k)
    for (int c = 0; c < config.chains; ++c)
      tasks.push_back({static_cast<int>(k), c});
  std::vector<ChainResult> results(tasks.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const ChainTask& task = tasks[i];
      const std::uint64_t chain_seed = seed_split(
          config.seed, static_cast<std::uint64_t>(task.kernel_index) * (1ull << 20) +
                           static_cast<std::uint64_t>(task.chain_index) + 1);
      results[i] = run_single_chain(*kernels[static_cast<size_t>(task.kernel_index)], config,
                                    pre, chain_seed);
      results[i].chain = task.chain_index;
    }
  };
  const int n_workers = std::min<int>(worker_cap(), static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  report.rows = std::move(results);
  std::sort(report.rows.begin(), report.rows.end(), [](const ChainResult& a, const ChainResult& b) {
    return a.summary.method != b.summary.method ? a.summary.method < b.summary.method
                                                : a.chain < b.chain;
  });
  for (auto& row : report.rows) row.kernel = row.summary.method;
  return report;
}

std::string ExperimentReport::csv() const {
  std::string out = run_summary_csv_header();
  out += '\n';
  for (const auto& row : rows) {
    out += to_csv_row(row.summary);
    out += '\n';
  }
  return out;
}

std::string ExperimentReport::json() const {
  nlohmann::json j;
  j["version"] = version;
  j["config"] = {{"target", config.target_spec},
                 {"dataset", config.dataset},
                 {"kernels", config.kernels},
                 {"L", config.leaps},
                 {"jitter", config.jitter},
                 {"iters", config.iters},
                 {"burnin", config.effective_burnin()},
                 {"chains", config.chains},
                 {"seed", config.seed},
                 {"pretune_iters", config.pretune_iters}};
  if (config.h) j["config"]["h"] = *config.h;
  if (config.s) j["config"]["s"] = *config.s;
  if (config.auto_ar) j["config"]["auto_ar"] = *config.auto_ar;
  j["tuned"] = tuned_params;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    j["rows"].push_back({{"method", row.summary.method},
                         {"chain", row.chain},
                         {"seed", row.seed},
                         {"essl", row.summary.essl},
                         {"ess_min", row.summary.ess_min},
                         {"msjd", row.summary.msjd},
                         {"essl_per_s", row.summary.essl_per_s},
                         {"ess_min_per_s", row.summary.ess_min_per_s},
                         {"msjd_per_s", row.summary.msjd_per_s},
                         {"time_s", row.summary.time_s},
                         {"ar", row.summary.ar}});
  }
  return j.dump(2);
}

void write_report(const ExperimentReport& report) {
  if (report.config.out.empty()) throw config_error("config: out path is required");
  std::ofstream csv(report.config.out);
  if (!csv) throw config_error("config: cannot write '" + report.config.out + "'");
  csv << report.csv();

  std::string json_path = report.config.out;
  const auto dot = json_path.find_last_of('.');
  json_path = (dot == std::string::npos ? json_path : json_path.substr(0, dot)) + ".json";
  std::ofstream js(json_path);
  if (!js) throw config_error("config: cannot write '" + json_path + "'");
  js << report.json() << '\n';
}

void run_trace(const TargetEntry& target, double h, int steps, std::uint64_t seed,
               std::ostream& out) {
  const Eigen::Index d = target.model->dim();
  Rng rng(seed);
  PhasePoint z(rng.normal_vector(d), rng.normal_vector(d));
  const Preconditioner identity = Preconditioner::identity(d);
  GradientFn grad = [&target](const Eigen::VectorXd& x) { return target.model->gradient(x); };

  out << "t";
  for (Eigen::Index i = 1; i <= d; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= d; ++i) out << ",v" << i;
  out << '\n';
  for (int t = 0; t <= steps; ++t) {
    out << t;
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(z.x[i]);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(z.v[i]);
    out << '\n';
    if (t < steps) z = weave_step(z, h, identity, grad);
  }
}

void run_limit_check(const TargetEntry& target, const std::vector<double>& h_grid, double T,
                     double dt, std::uint64_t seed, std::ostream& out) {
  if (h_grid.empty()) throw config_error("limit-check: h grid must not be empty");
  const Eigen::Index d = target.model->dim();
  Rng rng(seed);
  // Draw a start state away from the gradient-zero set.
  PhasePoint z0;
  for (int tries = 0; tries < 100; ++tries) {
    PhasePoint cand(rng.normal_vector(d), rng.normal_vector(d));
    if (target.model->gradient(cand.x).norm() > 0.3) {
      z0 = cand;
      break;
    }
  }
  if (z0.dim() == 0) throw numeric_error("limit-check: could not find a regular start point");

  out << "h,e_T,drift_max,tangency_max,order_estimate\n";
  double prev_error = 0.0;
  for (size_t i = 0; i < h_grid.size(); ++i) {
    OdeRunReport report = compare_limit(*target.model, z0, h_grid[i], T, dt);
    out << format_double(h_grid[i]) << ',' << format_double(report.sup_error) << ','
        << format_double(report.u_drift_max) << ',' << format_double(report.tangency_max) << ',';
    if (i > 0) out << format_double(std::log2(prev_error / report.sup_error));
    out << '\n';
    prev_error = report.sup_error;
  }
}

}  // namespace weavemc
