#include "weavemc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "weavemc/errors.hpp"

namespace weavemc {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "?" || s == "NaN";
}

double parse_number(const std::string& s, Eigen::Index row, const std::string& col) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("dataset: non-numeric value '" + s + "' in column '" + col +
                       "' at data row " + std::to_string(row + 1));
  }
}

}  // namespace

DatasetTable build_dataset(Eigen::MatrixXd features, std::vector<std::string> raw_labels,
                           std::vector<std::string> feature_names) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (static_cast<Eigen::Index>(raw_labels.size()) != n)
    throw config_error("dataset: label count does not match row count");
  if (feature_names.empty())
    for (Eigen::Index j = 0; j < p; ++j) feature_names.push_back("x" + std::to_string(j));

  DatasetTable table;
  table.feature_names = std::move(feature_names);
  table.binary.assign(p, false);

  // Map the two distinct label values onto {0, 1} in lexicographic order.
  std::set<std::string> label_values(raw_labels.begin(), raw_labels.end());
  if (label_values.size() != 2)
    throw config_error("dataset: label column must take exactly two distinct values, got " +
                       std::to_string(label_values.size()));
  const std::string zero_label = *label_values.begin();
  table.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    table.labels[i] = raw_labels[static_cast<size_t>(i)] == zero_label ? 0.0 : 1.0;

  for (Eigen::Index j = 0; j < p; ++j) {
    std::set<double> distinct;
    for (Eigen::Index i = 0; i < n && distinct.size() <= 2; ++i) distinct.insert(features(i, j));
    if (distinct.size() == 2) {
      table.binary[static_cast<size_t>(j)] = true;
      continue;
    }
    const double mean = features.col(j).mean();
    const double sd = n > 1 ? std::sqrt((features.col(j).array() - mean).square().sum() /
                                        static_cast<double>(n - 1))
                            : 0.0;
    if (sd <= 0.0)
      throw config_error("dataset: column '" + table.feature_names[static_cast<size_t>(j)] +
                         "' has zero standard deviation");
    features.col(j) = (features.col(j).array() - mean) * (0.5 / sd);
  }
  table.features = std::move(features);
  return table;
}

DatasetTable load_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw config_error("dataset: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw config_error("dataset: empty file '" + path + "'");
  std::vector<std::string> header = split_csv_line(line);
  Eigen::Index label_idx = -1;
  for (size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_column) label_idx = static_cast<Eigen::Index>(j);
  if (label_idx < 0)
    throw config_error("dataset: label column '" + label_column + "' not found in '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw config_error("dataset: row " + std::to_string(row + 1) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(header.size()));
    std::vector<double> values;
    values.reserve(header.size() - 1);
    for (size_t j = 0; j < fields.size(); ++j) {
      if (is_missing(fields[j]))
        throw config_error("dataset: missing value in column '" + header[j] +
                           "' at data row " + std::to_string(row + 1));
      if (static_cast<Eigen::Index>(j) == label_idx) {
        raw_labels.push_back(fields[j]);
      } else {
        values.push_back(parse_number(fields[j], row, header[j]));
      }
    }
    rows.push_back(std::move(values));
    ++row;
  }
  if (rows.empty()) throw config_error("dataset: no data rows in '" + path + "'");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd features(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) features(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];

  std::vector<std::string> names;
  for (size_t j = 0; j < header.size(); ++j)
    if (static_cast<Eigen::Index>(j) != label_idx) names.push_back(header[j]);

  return build_dataset(std::move(features), std::move(raw_labels), std::move(names));
}

}  // namespace weavemc
