#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace weavemc {

// Post-burn-in trajectory of one chain.
struct ChainRecord {
  Eigen::MatrixXd draws;          // iterations x d
  Eigen::VectorXd log_like_leb;   // -U_lebesgue at each stored state
  std::vector<std::uint8_t> accept_flags;
  double wall_seconds = 0.0;
};

// One table row of efficiency statistics.
struct RunSummary {
  std::string method;
  double essl = 0.0;
  double ess_min = 0.0;
  double msjd = 0.0;
  double essl_per_s = 0.0;
  double ess_min_per_s = 0.0;
  double msjd_per_s = 0.0;
  double time_s = 0.0;
  double ar = 0.0;
};

// Batch-means effective sample size N * var / long_run_var with batch size
// floor(sqrt(N)); the tail remainder after the last full batch is dropped.
// Result is clipped to (0, N]. Series shorter than 100 or constant series
// are rejected.
double ess(const Eigen::VectorXd& series);

// Minimum of the coordinate-wise effective sample sizes.
double ess_min(const ChainRecord& record);

// Effective sample size of the stored log-likelihood trace.
double essl(const ChainRecord& record);

// Mean square jump distance, averaged over the N - 1 stored transitions.
double msjd(const ChainRecord& record);

// Batch-means Monte Carlo standard error of the series mean.
double mcse_mean(const Eigen::VectorXd& series);

RunSummary summarize(const ChainRecord& record, const std::string& method);

// Shortest round-trip decimal formatting; used for all deterministic output.
std::string format_double(double value);

std::string run_summary_csv_header();
std::string to_csv_row(const RunSummary& summary);

}  // namespace weavemc
