#pragma once

#include <map>
#include <string>
#include <vector>

#include "napp/budget.hpp"
#include "napp/glm.hpp"
#include "napp/io.hpp"
#include "napp/solver.hpp"

namespace napp {

/// Simulated-regression recipe: uniform features, fixed truth, outcome per
/// family (linear adds truncated-normal noise).
struct SimSpec {
  LossFamily family = LossFamily::linear;
  int n = 500;
  Eigen::VectorXd theta_true;
  double feat_lo = -0.25, feat_hi = 0.25;
  double noise_mean = 0, noise_sd = 0.25;  // linear only
  double noise_lo = -0.5, noise_hi = 0.5;

  int p() const { return static_cast<int>(theta_true.size()); }
};

/// The simulation settings used throughout the experiments: p = 16, 8
/// nonzero coefficients, family-specific feature ranges.
SimSpec table4_spec(LossFamily family, int n);

double truncated_normal(Rng& rng, double mean, double sd, double lo,
                        double hi);

Dataset simulate_dataset(const SimSpec& spec, Rng& rng);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
};

/// tpr/fpr of a single estimate against the true support (selected =
/// exactly nonzero). tpr is NaN when the truth has no support.
RocPoint selection_rates(const Eigen::VectorXd& theta_hat,
                         const std::vector<int>& true_support, int p);

/// One point per lambda, sorted by fpr.
std::vector<RocPoint> roc_curve(
    const std::vector<Eigen::VectorXd>& fits_over_lambda,
    const std::vector<int>& true_support, int p);

/// linear/poisson: mean squared error of the predicted mean response;
/// logistic: misclassification rate at threshold 1/2.
double prediction_error(LossFamily family, const Eigen::VectorXd& theta_hat,
                        const Dataset& test);

struct MethodSpec {
  std::string name;  // napp-erm, napp-vs, napp-vs+, legacy-dperm,
                     // nonprivate-lasso
  FitMode mode = FitMode::erm;
  bool moor = true;
  bool nonprivate_lasso = false;

  std::string label() const { return moor ? name : name + "/nomoor"; }
};

MethodSpec method_from_token(const std::string& token);

struct ExperimentConfig {
  LossFamily family = LossFamily::linear;
  SimSpec sim;                       // used when dataset_path empty
  std::string dataset_path;          // pre-simulated or ingested CSV
  int n_test = 2000;
  std::vector<double> lambda_grid;
  std::vector<double> lambda0_grid;  // empty = privacy floor only
  std::vector<double> epsilon_grid;  // inf = non-private
  double delta = 0;
  double r = 0.5;
  int n_e = 2000;
  std::vector<MethodSpec> methods;
  int repeats = 1;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = hardware concurrency
  std::string outdir = ".";
  OutcomeBounds declared;  // certification inputs for linear/poisson
  // lambda/lambda0/moor filled per cell; lasso by default
  RegularizerTarget reg_template{PenaltyKind::bridge, 1.0, 0.5, 0.0, 0.0,
                                 true};
  SolverConfig solver;
  bool write_gnuplot = false;

  static ExperimentConfig from_flat(const FlatConfig& flat);
};

struct MetricRow {
  std::string method;
  bool moor = true;
  double lambda0 = 0;
  double lambda = 0;
  double epsilon = 0;
  int repeat = 0;
  std::string metric;
  double value = 0;
  std::string status = "ok";
};

struct ExperimentResult {
  std::vector<MetricRow> rows;
  std::vector<std::string> files_written;
};

/// Runs the full (method x lambda0 x lambda x epsilon x repeat) grid with
/// per-cell deterministic seeds; writes metrics.csv, summary.json and the
/// per-figure CSVs into outdir. Fit failures become status rows, never
/// aborts.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct CsvSchema {
  std::string outcome;
  std::vector<std::string> categorical;
  std::vector<std::string> numeric;
  std::string positive_label;  // outcome level mapped to 1; empty = numeric
};

struct IngestReport {
  int n = 0, p = 0;
  long skipped = 0;
  std::map<double, long> class_counts;
};

/// One-hot encodes categoricals (first level dropped), min-max scales
/// numerics to [-1,1], drops rows with missing fields, then clips rows to
/// zeta1 = 1. Skipping more than 1% unparseable rows aborts.
Dataset ingest_csv(const std::string& path, const CsvSchema& schema,
                   LossFamily family, IngestReport* report = nullptr);

}  // namespace napp
