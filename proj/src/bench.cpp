#include "napp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "napp/bounds.hpp"
#include "napp/lasso.hpp"

namespace napp {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double idx = q * (v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(idx));
  const size_t hi = static_cast<size_t>(std::ceil(idx));
  const double w = idx - lo;
  return (1 - w) * v[lo] + w * v[hi];
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

SimSpec table4_spec(LossFamily family, int n) {
  SimSpec spec;
  spec.family = family;
  spec.n = n;
  spec.theta_true = Eigen::VectorXd::Zero(16);
  switch (family) {
    case LossFamily::linear:
      for (int k = 0; k < 8; ++k) spec.theta_true(k) = 1.0 - 0.8 * k / 7.0;
      spec.feat_lo = -0.25;
      spec.feat_hi = 0.25;
      break;
    case LossFamily::poisson:
      for (int k = 0; k < 8; ++k) spec.theta_true(k) = 4.0 - 0.5 * k / 7.0;
      spec.feat_lo = -0.25;
      spec.feat_hi = 0.25;
      break;
    case LossFamily::logistic:
      for (int k = 0; k < 8; ++k) spec.theta_true(k) = 4.0 - 0.5 * k / 7.0;
      spec.feat_lo = -0.5;
      spec.feat_hi = 0.5;
      break;
  }
  return spec;
}

double truncated_normal(Rng& rng, double mean, double sd, double lo,
                        double hi) {
  if (!(lo < hi))
    throw std::invalid_argument("truncation bounds need lo < hi");
  for (;;) {
    const double v = rng.normal(mean, sd);
    if (v >= lo && v <= hi) return v;
  }
}

Dataset simulate_dataset(const SimSpec& spec, Rng& rng) {
  const int n = spec.n, p = spec.p();
  Dataset out;
  out.family = spec.family;
  out.X.resize(n, p);
  out.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j)
      out.X(i, j) = rng.uniform(spec.feat_lo, spec.feat_hi);
    const double eta = out.X.row(i) * spec.theta_true;
    switch (spec.family) {
      case LossFamily::linear:
        out.y(i) = eta + truncated_normal(rng, spec.noise_mean, spec.noise_sd,
                                          spec.noise_lo, spec.noise_hi);
        break;
      case LossFamily::poisson:
        out.y(i) = static_cast<double>(rng.poisson(std::exp(eta)));
        break;
      case LossFamily::logistic:
        // P(y = 1) = (1 + exp(eta))^-1, decreasing in eta
        out.y(i) = rng.uniform() < 1.0 / (1.0 + std::exp(eta)) ? 1.0 : 0.0;
        break;
    }
  }
  return out;
}

RocPoint selection_rates(const Eigen::VectorXd& theta_hat,
                         const std::vector<int>& true_support, int p) {
  std::set<int> support(true_support.begin(), true_support.end());
  int tp = 0, fp = 0;
  for (int j = 0; j < p; ++j) {
    if (theta_hat(j) == 0.0) continue;
    (support.count(j) ? tp : fp)++;
  }
  RocPoint pt;
  const int pos = static_cast<int>(support.size());
  const int neg = p - pos;
  pt.tpr = pos > 0 ? static_cast<double>(tp) / pos
                   : std::numeric_limits<double>::quiet_NaN();
  pt.fpr = neg > 0 ? static_cast<double>(fp) / neg : 0.0;
  return pt;
}

std::vector<RocPoint> roc_curve(
    const std::vector<Eigen::VectorXd>& fits_over_lambda,
    const std::vector<int>& true_support, int p) {
  std::vector<RocPoint> pts;
  pts.reserve(fits_over_lambda.size());
  for (const auto& theta : fits_over_lambda)
    pts.push_back(selection_rates(theta, true_support, p));
  std::stable_sort(
      pts.begin(), pts.end(),
      [](const RocPoint& a, const RocPoint& b) { return a.fpr < b.fpr; });
  return pts;
}

double prediction_error(LossFamily family, const Eigen::VectorXd& theta_hat,
                        const Dataset& test) {
  if (test.family != family)
    throw std::invalid_argument("test family does not match fit family");
  const Eigen::VectorXd eta = test.X * theta_hat;
  double total = 0;
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    switch (family) {
      case LossFamily::linear: {
        const double d = test.y(i) - eta(i);
        total += d * d;
        break;
      }
      case LossFamily::poisson: {
        const double d = test.y(i) - std::exp(eta(i));
        total += d * d;
        break;
      }
      case LossFamily::logistic: {
        const double pred = eta(i) > 0 ? 1.0 : 0.0;
        total += pred != test.y(i) ? 1.0 : 0.0;
        break;
      }
    }
  }
  return total / static_cast<double>(test.n());
}

MethodSpec method_from_token(const std::string& token) {
  MethodSpec m;
  std::string base = token;
  const auto slash = token.find('/');
  if (slash != std::string::npos) {
    base = token.substr(0, slash);
    const std::string flag = token.substr(slash + 1);
    if (flag != "nomoor")
      throw std::invalid_argument("unknown method flag: " + flag);
    m.moor = false;
  }
  m.name = base;
  if (base == "napp-erm") {
    m.mode = FitMode::erm;
  } else if (base == "napp-vs") {
    m.mode = FitMode::vs;
  } else if (base == "napp-vs+") {
    m.mode = FitMode::vs_plus;
  } else if (base == "legacy-dperm") {
    m.mode = FitMode::erm;
    m.moor = false;
  } else if (base == "nonprivate-lasso") {
    m.nonprivate_lasso = true;
    m.moor = false;
  } else {
    throw std::invalid_argument("unknown method: " + base);
  }
  return m;
}

ExperimentConfig ExperimentConfig::from_flat(const FlatConfig& flat) {
  ExperimentConfig cfg;
  cfg.family = family_from_name(flat.get_string("family", "linear"));
  const int n = static_cast<int>(flat.get_int("n", 500));
  cfg.sim = table4_spec(cfg.family, n);
  if (flat.has("dataset")) cfg.dataset_path = flat.get_string("dataset");
  cfg.n_test = static_cast<int>(flat.get_int("n_test", 2000));
  cfg.lambda_grid = flat.get_doubles("lambda");
  if (flat.has("lambda0")) cfg.lambda0_grid = flat.get_doubles("lambda0");
  cfg.epsilon_grid = flat.get_doubles("epsilon");
  cfg.delta = flat.get_double("delta", 0.0);
  cfg.r = flat.get_double("r", 0.5);
  cfg.n_e = static_cast<int>(flat.get_int("ne", 2000));
  for (const auto& tok : flat.get_strings("methods"))
    cfg.methods.push_back(method_from_token(tok));
  cfg.repeats = static_cast<int>(flat.get_int("repeats", 1));
  cfg.seed = static_cast<std::uint64_t>(flat.get_int("seed", 1));
  cfg.jobs = static_cast<int>(flat.get_int("jobs", 0));
  cfg.outdir = flat.get_string("outdir", ".");
  if (flat.has("residual_bound"))
    cfg.declared.residual_bound = flat.get_double("residual_bound");
  if (flat.has("y_max")) cfg.declared.y_max = flat.get_double("y_max");
  if (flat.has("eta_max")) cfg.declared.eta_max = flat.get_double("eta_max");

  const std::string reg = flat.get_string("reg", "lasso");
  if (reg == "ridge") {
    cfg.reg_template.kind = PenaltyKind::ridge;
  } else if (reg == "lasso") {
    cfg.reg_template.kind = PenaltyKind::bridge;
    cfg.reg_template.gamma = 1.0;
  } else if (reg.rfind("bridge:", 0) == 0) {
    cfg.reg_template.kind = PenaltyKind::bridge;
    cfg.reg_template.gamma = std::stod(reg.substr(7));
  } else if (reg.rfind("enet:", 0) == 0) {
    cfg.reg_template.kind = PenaltyKind::elastic_net;
    cfg.reg_template.kappa = std::stod(reg.substr(5));
  } else {
    throw std::invalid_argument("unknown reg: " + reg);
  }

  cfg.solver.max_outer = static_cast<int>(flat.get_int("max_outer", 50));
  cfg.solver.outer_tol = flat.get_double("outer_tol", 1e-6);
  if (flat.has("trunc_c")) cfg.solver.trunc_c = flat.get_double("trunc_c");
  cfg.write_gnuplot = flat.get_bool("gnuplot", false);
  if (cfg.lambda_grid.empty() || cfg.epsilon_grid.empty() ||
      cfg.methods.empty() || cfg.repeats < 1)
    throw std::invalid_argument("experiment grids must be nonempty");
  return cfg;
}

namespace {

struct Cell {
  size_t method_i, lambda0_i, lambda_i, eps_i;
  int repeat;
};

// defaults for certification knobs the config left open, derived from the
// training outcomes and recorded in the summary
OutcomeBounds effective_bounds(const ExperimentConfig& cfg,
                               const Dataset& data) {
  OutcomeBounds b = cfg.declared;
  switch (cfg.family) {
    case LossFamily::linear:
      if (!b.residual_bound)
        b.residual_bound = std::max(1.0, data.y.cwiseAbs().maxCoeff());
      break;
    case LossFamily::poisson:
      if (!b.y_max) b.y_max = std::max(1.0, data.y.maxCoeff());
      if (!b.eta_max)
        b.eta_max = std::max(1.0, std::log(std::max(2.0, data.y.maxCoeff())));
      break;
    case LossFamily::logistic:
      break;
  }
  return b;
}

const char* kGnuplotStub = R"(set datafile separator ','
set key autotitle columnhead
set style data linespoints
# plot 'fig_prediction.csv' using 4:6 ...
)";

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.outdir);

  Rng master(config.seed);

  // one training set per repeat; a single shared test set
  std::vector<Dataset> train(config.repeats);
  Dataset test;
  std::vector<int> true_support;
  const bool simulated = config.dataset_path.empty();
  if (simulated) {
    for (int rep = 0; rep < config.repeats; ++rep) {
      Rng data_rng = master.substream(0xDA7A, rep);
      train[rep] = simulate_dataset(config.sim, data_rng);
    }
    SimSpec test_spec = config.sim;
    test_spec.n = config.n_test;
    Rng test_rng = master.substream(0x7E57);
    test = simulate_dataset(test_spec, test_rng);
    for (int j = 0; j < config.sim.p(); ++j)
      if (config.sim.theta_true(j) != 0.0) true_support.push_back(j);
  } else {
    Dataset full = read_dataset_csv(config.dataset_path, config.family);
    for (int rep = 0; rep < config.repeats; ++rep) train[rep] = full;
    test = full;
  }
  const int p = static_cast<int>(train[0].p());

  std::vector<double> lambda0_grid = config.lambda0_grid;
  if (lambda0_grid.empty()) lambda0_grid.push_back(0.0);

  std::vector<Cell> cells;
  for (size_t mi = 0; mi < config.methods.size(); ++mi)
    for (size_t l0 = 0; l0 < lambda0_grid.size(); ++l0)
      for (size_t li = 0; li < config.lambda_grid.size(); ++li)
        for (size_t ei = 0; ei < config.epsilon_grid.size(); ++ei)
          for (int rep = 0; rep < config.repeats; ++rep)
            cells.push_back({mi, l0, li, ei, rep});

  std::vector<std::vector<MetricRow>> outcomes(cells.size());

  // non-private lasso reference per (repeat, lambda), shared across methods;
  // the adaptive weighted-l2 fixed point realizes the l1 penalty at twice
  // the nominal tuning value, so the reference is taken there
  std::vector<Eigen::VectorXd> lasso_ref;
  const bool want_lasso_ref =
      config.reg_template.kind == PenaltyKind::bridge &&
      config.reg_template.gamma == 1.0;
  if (want_lasso_ref) {
    lasso_ref.resize(config.repeats * config.lambda_grid.size());
    std::atomic<size_t> next_ref{0};
    auto ref_worker = [&]() {
      for (;;) {
        const size_t k = next_ref.fetch_add(1);
        if (k >= lasso_ref.size()) return;
        const int rep = static_cast<int>(k / config.lambda_grid.size());
        const size_t li = k % config.lambda_grid.size();
        lasso_ref[k] = glm_lasso(train[rep], 2.0 * config.lambda_grid[li]);
      }
    };
    std::vector<std::thread> ref_pool;
    const int ref_jobs = std::max(
        1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                               static_cast<unsigned>(lasso_ref.size())));
    for (int w = 1; w < ref_jobs; ++w) ref_pool.emplace_back(ref_worker);
    ref_worker();
    for (auto& t : ref_pool) t.join();
  }

  auto run_cell = [&](size_t idx) {
    const Cell& cell = cells[idx];
    const MethodSpec& method = config.methods[cell.method_i];
    const double lambda = config.lambda_grid[cell.lambda_i];
    const double epsilon = config.epsilon_grid[cell.eps_i];
    const double lambda0_cell = lambda0_grid[cell.lambda0_i];
    const Dataset& data = train[cell.repeat];
    std::vector<MetricRow>& out = outcomes[idx];

    auto push = [&](const std::string& name, double value,
                    const std::string& status = "ok") {
      out.push_back({method.name, method.moor, lambda0_cell, lambda, epsilon,
                     cell.repeat, name, value, status});
    };

    PrivacyBudget budget;
    budget.epsilon = epsilon;
    budget.delta = config.delta;
    budget.r = config.r;

    try {
      Eigen::VectorXd theta_hat;
      FitResult fit;
      bool have_fit = false;
      double lambda0_eff = lambda0_cell;

      if (method.nonprivate_lasso) {
        theta_hat = glm_lasso(data, lambda);
      } else {
        const BoundsCerts certs =
            certify_bounds(data, effective_bounds(config, data));
        if (budget.is_private())
          lambda0_eff = std::max(lambda0_eff, lambda0_floor(certs, budget));
        RegularizerTarget reg = config.reg_template;
        reg.lambda = lambda;
        reg.lambda0 = lambda0_eff;
        reg.moor = method.moor;
        SolverConfig cfg = config.solver;
        cfg.mode = method.mode;

        // fit stream keyed by the grid cell but not the method, so paired
        // methods see common random numbers
        Rng fit_rng =
            master
                .substream(0xF17, (cell.lambda0_i * 4096 + cell.lambda_i) *
                                          4096 +
                                      cell.eps_i)
                .substream(0x5EED, static_cast<std::uint64_t>(cell.repeat));
        fit = napp_fit(data, certs, reg, budget, config.n_e, cfg, fit_rng);
        theta_hat = fit.theta_hat;
        have_fit = true;
        push("lambda0_eff", lambda0_eff);
      }

      if (simulated && !true_support.empty()) {
        const RocPoint pt = selection_rates(theta_hat, true_support, p);
        push("tpr", pt.tpr);
        push("fpr", pt.fpr);
      }

      push(config.family == LossFamily::logistic ? "misclass" : "mse",
           prediction_error(config.family, theta_hat, test));

      if (want_lasso_ref) {
        const size_t lk =
            cell.repeat * config.lambda_grid.size() + cell.lambda_i;
        push("l2_dist_to_lasso", (theta_hat - lasso_ref[lk]).norm());
      }

      if (have_fit && budget.is_private()) {
        const double d_eps =
            retrievable_budget(lambda0_eff, fit.v_min(), config.n_e, fit.lpp0,
                               budget.r, epsilon);
        push("retrieved_portion", d_eps / ((1.0 - budget.r) * epsilon));
      }
    } catch (const std::exception& err) {
      push("fit", std::numeric_limits<double>::quiet_NaN(), err.what());
    }
  };

  int jobs = config.jobs > 0
                 ? config.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      run_cell(idx);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ExperimentResult result;
  for (auto& out : outcomes)
    for (auto& row : out) result.rows.push_back(std::move(row));

  // ---- metrics.csv ----
  const std::string metrics_path =
      (fs::path(config.outdir) / "metrics.csv").string();
  {
    std::ofstream csv(metrics_path);
    csv << "method,moor,lambda0,lambda,epsilon,repeat,metric,value,status\r\n";
    for (const auto& row : result.rows) {
      csv << row.method << ',' << (row.moor ? "true" : "false") << ','
          << fmt(row.lambda0) << ',' << fmt(row.lambda) << ','
          << fmt(row.epsilon) << ',' << row.repeat << ',' << row.metric << ','
          << fmt(row.value) << ',' << row.status << "\r\n";
    }
  }
  result.files_written.push_back(metrics_path);

  // ---- aggregate per grid cell ----
  using Key = std::tuple<std::string, bool, double, double, double,
                         std::string>;  // method,moor,l0,lambda,eps,metric
  std::map<Key, std::vector<double>> agg;
  for (const auto& row : result.rows) {
    if (row.status != "ok" || std::isnan(row.value)) continue;
    agg[{row.method, row.moor, row.lambda0, row.lambda, row.epsilon,
         row.metric}]
        .push_back(row.value);
  }

  json summary;
  summary["config"] = {
      {"family", family_name(config.family)},
      {"n", static_cast<int>(train[0].n())},
      {"p", p},
      {"n_test", config.n_test},
      {"n_e", config.n_e},
      {"delta", config.delta},
      {"r", config.r},
      {"repeats", config.repeats},
      {"seed", config.seed},
      {"simulated", simulated}};
  json cells_json = json::array();
  for (const auto& [key, values] : agg) {
    const auto& [method, moor, l0, lam, eps, metric] = key;
    json c;
    c["method"] = method;
    c["moor"] = moor;
    c["lambda0"] = l0;
    c["lambda"] = lam;
    c["epsilon"] = std::isfinite(eps) ? json(eps) : json("inf");
    c["metric"] = metric;
    c["median"] = median_of(values);
    c["q25"] = quantile_of(values, 0.25);
    c["q75"] = quantile_of(values, 0.75);
    c["count"] = values.size();
    cells_json.push_back(std::move(c));
  }
  summary["cells"] = std::move(cells_json);
  const std::string summary_path =
      (fs::path(config.outdir) / "summary.json").string();
  write_json_file(summary_path, summary);
  result.files_written.push_back(summary_path);

  // ---- figure CSVs: exactly one row per grid cell ----
  auto cell_stat = [&](const MethodSpec& m, double l0, double lam, double eps,
                       const std::string& metric, bool use_mean) {
    const auto it = agg.find({m.name, m.moor, l0, lam, eps, metric});
    if (it == agg.end()) return std::numeric_limits<double>::quiet_NaN();
    return use_mean ? mean_of(it->second) : median_of(it->second);
  };

  auto figure_csv = [&](const std::string& fname,
                        const std::vector<std::string>& metrics,
                        bool use_mean) {
    const std::string path = (fs::path(config.outdir) / fname).string();
    std::ofstream csv(path);
    csv << "method,moor,lambda0,lambda,epsilon";
    for (const auto& m : metrics) csv << ',' << m;
    csv << "\r\n";
    for (const auto& method : config.methods)
      for (double l0 : lambda0_grid)
        for (double lam : config.lambda_grid)
          for (double eps : config.epsilon_grid) {
            csv << method.name << ',' << (method.moor ? "true" : "false")
                << ',' << fmt(l0) << ',' << fmt(lam) << ',' << fmt(eps);
            for (const auto& m : metrics)
              csv << ',' << fmt(cell_stat(method, l0, lam, eps, m, use_mean));
            csv << "\r\n";
          }
    result.files_written.push_back(path);
  };

  figure_csv("fig_roc.csv", {"fpr", "tpr"}, /*use_mean=*/true);
  figure_csv("fig_prediction.csv",
             {config.family == LossFamily::logistic ? "misclass" : "mse"},
             /*use_mean=*/false);
  if (want_lasso_ref)
    figure_csv("fig_l2_lasso.csv", {"l2_dist_to_lasso"}, /*use_mean=*/false);
  figure_csv("fig_retrieval.csv", {"retrieved_portion"}, /*use_mean=*/false);

  if (config.write_gnuplot) {
    const std::string path = (fs::path(config.outdir) / "plots.gp").string();
    std::ofstream gp(path);
    gp << kGnuplotStub;
    result.files_written.push_back(path);
  }
  return result;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool missing_field(const std::string& s) { return s.empty() || s == "?"; }

}  // namespace

Dataset ingest_csv(const std::string& path, const CsvSchema& schema,
                   LossFamily family, IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  const auto header = split_fields(line);
  std::map<std::string, int> col;
  for (size_t i = 0; i < header.size(); ++i)
    col[strip(header[i])] = static_cast<int>(i);

  auto require_col = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end())
      throw std::runtime_error("schema column not in file: " + name);
    return it->second;
  };
  const int y_col = require_col(schema.outcome);
  std::vector<int> cat_cols, num_cols;
  for (const auto& c : schema.categorical) cat_cols.push_back(require_col(c));
  for (const auto& c : schema.numeric) num_cols.push_back(require_col(c));

  // pass 1: collect rows, category levels and numeric ranges
  struct RawRow {
    std::vector<std::string> cats;
    std::vector<double> nums;
    double y;
  };
  std::vector<RawRow> rows;
  std::vector<std::set<std::string>> levels(cat_cols.size());
  std::vector<double> num_min(num_cols.size(),
                              std::numeric_limits<double>::infinity());
  std::vector<double> num_max(num_cols.size(),
                              -std::numeric_limits<double>::infinity());

  long parsed = 0, skipped = 0;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    ++parsed;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      ++skipped;
      continue;
    }
    RawRow row;
    bool bad = false, missing = false;
    const std::string y_raw = strip(fields[y_col]);
    if (missing_field(y_raw)) {
      missing = true;
    } else if (!schema.positive_label.empty()) {
      row.y = (y_raw == schema.positive_label) ? 1.0 : 0.0;
    } else {
      try {
        row.y = std::stod(y_raw);
      } catch (...) {
        bad = true;
      }
    }
    for (size_t k = 0; k < cat_cols.size() && !bad && !missing; ++k) {
      const std::string v = strip(fields[cat_cols[k]]);
      if (missing_field(v)) {
        missing = true;
        break;
      }
      row.cats.push_back(v);
    }
    for (size_t k = 0; k < num_cols.size() && !bad && !missing; ++k) {
      const std::string v = strip(fields[num_cols[k]]);
      if (missing_field(v)) {
        missing = true;
        break;
      }
      try {
        row.nums.push_back(std::stod(v));
      } catch (...) {
        bad = true;
      }
    }
    if (bad) {
      ++skipped;
      continue;
    }
    if (missing) continue;  // dropped, not counted as unparseable
    for (size_t k = 0; k < row.cats.size(); ++k) levels[k].insert(row.cats[k]);
    for (size_t k = 0; k < row.nums.size(); ++k) {
      num_min[k] = std::min(num_min[k], row.nums[k]);
      num_max[k] = std::max(num_max[k], row.nums[k]);
    }
    rows.push_back(std::move(row));
  }
  if (parsed > 0 && skipped > parsed / 100)
    throw std::runtime_error("more than 1% unparseable rows (" +
                             std::to_string(skipped) + "/" +
                             std::to_string(parsed) + ")");
  if (rows.empty()) throw std::runtime_error("no usable rows in " + path);

  // one-hot layout: per categorical column, levels sorted, first dropped
  std::vector<std::vector<std::string>> level_list(cat_cols.size());
  int p = static_cast<int>(num_cols.size());
  for (size_t k = 0; k < cat_cols.size(); ++k) {
    level_list[k].assign(levels[k].begin(), levels[k].end());
    p += std::max<int>(0, static_cast<int>(level_list[k].size()) - 1);
  }

  Dataset out;
  out.family = family;
  const int n = static_cast<int>(rows.size());
  out.X = Eigen::MatrixXd::Zero(n, p);
  out.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const RawRow& row = rows[i];
    out.y(i) = row.y;
    int j = 0;
    for (size_t k = 0; k < num_cols.size(); ++k) {
      const double range = num_max[k] - num_min[k];
      out.X(i, j++) =
          range > 0 ? 2.0 * (row.nums[k] - num_min[k]) / range - 1.0 : 0.0;
    }
    for (size_t k = 0; k < cat_cols.size(); ++k) {
      const auto& lv = level_list[k];
      const auto pos =
          std::find(lv.begin(), lv.end(), row.cats[k]) - lv.begin();
      for (size_t q = 1; q < lv.size(); ++q)
        out.X(i, j + static_cast<int>(q) - 1) =
            (static_cast<size_t>(pos) == q) ? 1.0 : 0.0;
      j += static_cast<int>(lv.size()) - 1;
    }
  }

  out = scale_features(out, 1.0).data;
  validate_outcomes(out);

  if (report) {
    report->n = n;
    report->p = p;
    report->skipped = skipped;
    for (int i = 0; i < n; ++i) ++report->class_counts[out.y(i)];
  }
  return out;
}

}  // namespace napp
