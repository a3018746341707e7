#include "weavemc/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "weavemc/errors.hpp"

namespace weavemc {

namespace {

// Batch-means long-run variance and series variance over the first
// batches * batch_size points.
struct BatchMeans {
  double variance;       // lambda^2
  double long_run;       // sigma^2
  Eigen::Index n_used;
};

BatchMeans batch_means(const Eigen::VectorXd& series) {
  const Eigen::Index n = series.size();
  if (n < 100) throw std::invalid_argument("ess: series needs at least 100 points");
  const Eigen::Index b = static_cast<Eigen::Index>(std::floor(std::sqrt(static_cast<double>(n))));
  const Eigen::Index a = n / b;
  const Eigen::Index used = a * b;

  const double mean = series.head(used).mean();
  const double lambda2 =
      (series.head(used).array() - mean).square().sum() / static_cast<double>(used - 1);
  if (lambda2 <= 0.0) throw numeric_error("ess: constant series has no variance");

  double ssq = 0.0;
  for (Eigen::Index k = 0; k < a; ++k) {
    const double bm = series.segment(k * b, b).mean();
    ssq += (bm - mean) * (bm - mean);
  }
  const double sigma2 = static_cast<double>(b) * ssq / static_cast<double>(a - 1);
  return {lambda2, sigma2, used};
}

}  // namespace

double ess(const Eigen::VectorXd& series) {
  const BatchMeans bm = batch_means(series);
  const double n = static_cast<double>(series.size());
  if (bm.long_run <= 0.0) return n;  // perfectly periodic batches; clip to N
  return std::min(n * bm.variance / bm.long_run, n);
}

double ess_min(const ChainRecord& record) {
  if (record.draws.cols() < 1) throw std::invalid_argument("ess_min: empty record");
  double out = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < record.draws.cols(); ++j)
    out = std::min(out, ess(record.draws.col(j)));
  return out;
}

double essl(const ChainRecord& record) { return ess(record.log_like_leb); }

double msjd(const ChainRecord& record) {
  const Eigen::Index n = record.draws.rows();
  if (n < 2) throw std::invalid_argument("msjd: needs at least two states");
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    acc += (record.draws.row(i + 1) - record.draws.row(i)).squaredNorm();
  return acc / static_cast<double>(n - 1);
}

double mcse_mean(const Eigen::VectorXd& series) {
  const BatchMeans bm = batch_means(series);
  return std::sqrt(bm.long_run / static_cast<double>(bm.n_used));
}

RunSummary summarize(const ChainRecord& record, const std::string& method) {
  RunSummary s;
  s.method = method;
  s.essl = essl(record);
  s.ess_min = ess_min(record);
  s.msjd = msjd(record);
  s.time_s = record.wall_seconds;
  s.essl_per_s = s.essl / s.time_s;
  s.ess_min_per_s = s.ess_min / s.time_s;
  s.msjd_per_s = s.msjd / s.time_s;
  double acc = 0.0;
  for (std::uint8_t f : record.accept_flags) acc += f;
  s.ar = record.accept_flags.empty() ? 0.0 : acc / static_cast<double>(record.accept_flags.size());
  return s;
}

std::string format_double(double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string run_summary_csv_header() {
  return "method,essl,ess_min,msjd,essl_per_s,ess_min_per_s,msjd_per_s,time_s,ar";
}

std::string to_csv_row(const RunSummary& s) {
  std::string row = s.method;
  for (double v : {s.essl, s.ess_min, s.msjd, s.essl_per_s, s.ess_min_per_s, s.msjd_per_s,
                   s.time_s, s.ar}) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

}  // namespace weavemc
