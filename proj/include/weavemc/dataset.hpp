#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace weavemc {

// Design matrix for the logistic-regression benchmarks. Binary columns
// (exactly two distinct values) are kept as-is; every other column is
// rescaled to mean 0 and standard deviation 0.5. Labels live in {0, 1}.
struct DatasetTable {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
  std::vector<std::string> feature_names;
  std::vector<bool> binary;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
};

// Applies binary detection, label mapping and column scaling to raw data.
// A non-binary constant column (zero standard deviation) is rejected.
DatasetTable build_dataset(Eigen::MatrixXd features, std::vector<std::string> raw_labels,
                           std::vector<std::string> feature_names = {});

// Reads a headered CSV file ('.' decimal, comma separated), takes
// label_column as the label and every remaining column as a feature.
// Missing values and labels with more than two distinct values are hard
// errors reported with their row index.
DatasetTable load_dataset(const std::string& path, const std::string& label_column);

}  // namespace weavemc
