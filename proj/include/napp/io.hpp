#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "napp/budget.hpp"
#include "napp/glm.hpp"
#include "napp/solver.hpp"

namespace napp {

using json = nlohmann::json;

/// Dataset CSV: header row, column "y" is the outcome, every other column a
/// numeric feature. UTF-8, comma separated.
Dataset read_dataset_csv(const std::string& path, LossFamily family);
void write_dataset_csv(const std::string& path, const Dataset& data);

/// Flat key-value config: one `key = value` per line, '#' comments, values
/// are scalars or whitespace/comma-separated lists.
class FlatConfig {
 public:
  static FlatConfig parse_file(const std::string& path);
  static FlatConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

json to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

json fit_result_to_json(const FitResult& fit);
FitResult fit_result_from_json(const json& j);

json budget_to_json(const PrivacyBudget& b);
PrivacyBudget budget_from_json(const json& j);

json regularizer_to_json(const RegularizerTarget& r);
RegularizerTarget regularizer_from_json(const json& j);

json solver_config_to_json(const SolverConfig& c);
SolverConfig solver_config_from_json(const json& j);

json retrieval_report_to_json(const RetrievalReport& r);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

}  // namespace napp
