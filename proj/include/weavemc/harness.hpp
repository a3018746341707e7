#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "weavemc/diagnostics.hpp"
#include "weavemc/kernels.hpp"
#include "weavemc/target.hpp"

namespace weavemc {

// Flat key-value configuration; CLI flags override file entries. Keys:
// target, dataset, kernel, h, L, s, jitter, iters, burnin, chains, seed,
// pretune_iters, auto_ar, out.
struct ExperimentConfig {
  std::string target_spec;            // e.g. "student_t(d=20,nu=3)"
  std::string dataset;                // CSV path for logistic targets
  std::vector<std::string> kernels;   // kernel names, or all eight for "all"
  std::optional<double> h;            // absent => auto-tune by acceptance rate
  std::optional<double> s;
  int leaps = 1;
  double jitter = 0.0;
  long iters = 100000;
  long burnin = -1;                   // -1 => 10% of iters
  int chains = 1;
  std::uint64_t seed = 1;
  long pretune_iters = 100000;
  std::optional<double> auto_ar;      // override of the per-kernel AR targets
  std::string out;                    // CSV path; JSON is written next to it

  long effective_burnin() const { return burnin >= 0 ? burnin : iters / 10; }
};

ExperimentConfig parse_config_file(const std::string& path);
// Applies a single "key=value" override; unknown keys are config errors.
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);

// A registered target together with the reference measures it supports.
struct TargetEntry {
  std::shared_ptr<const TargetModel> model;
  std::set<ReferenceKind> allowed_refs;
  std::string name;
};

// Builds a target from its spec string. Known specs:
//   gaussian(d=<n>[,rho=<r>][,s=<v>])  centered, covariance s * rho^|i-j|
//   student_t(d=<n>,nu=<v>)            centered, identity scale
//   logistic                           requires dataset=<csv path>
//   sv(T=<n>,phi=<v>,sigma=<v>)        simulated observations
//   sde(d=<n>,n=<steps>,horizon=<v>)   simulated path, Wishart(50) scale
// Simulation seeds derive from the experiment seed.
TargetEntry build_target(const std::string& spec, const std::string& dataset_path,
                         std::uint64_t seed);

// Rejects kernel/reference incompatibilities before any computation.
void validate_kernel_target(const std::string& kernel_name, const TargetEntry& target);
void validate_config(const ExperimentConfig& config);

// Default acceptance-rate targets used when h (or s) is absent.
double default_acceptance_target(const std::string& kernel_name);

struct ChainResult {
  std::string kernel;
  int chain = 0;
  std::uint64_t seed = 0;
  RunSummary summary;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ChainResult> rows;  // sorted by (kernel, chain)
  std::map<std::string, double> tuned_params;
  std::string version;

  std::string csv() const;
  std::string json() const;
};

// Pretunes the preconditioner, resolves auto-tuned parameters, runs the
// chains concurrently (worker cap from WEAVEMC_WORKERS) and assembles the
// report. Deterministic for fixed config and seed, wall-clock fields aside.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Writes report.csv() to config.out and the JSON echo alongside it.
void write_report(const ExperimentReport& report);

// Weave trajectory dump: rows t,x1..xd,v1..vd for t = 0..steps.
void run_trace(const TargetEntry& target, double h, int steps, std::uint64_t seed,
               std::ostream& out);

// Convergence table of the limit dynamics over an h grid: columns
// h,e_T,drift_max,tangency_max,order_estimate.
void run_limit_check(const TargetEntry& target, const std::vector<double>& h_grid, double T,
                     double dt, std::uint64_t seed, std::ostream& out);

}  // namespace weavemc
