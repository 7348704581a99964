// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Budgeted for a few minutes on a 4-core machine.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "napp/bench.hpp"
#include "napp/bounds.hpp"
#include "napp/budget.hpp"
#include "napp/lasso.hpp"
#include "napp/solver.hpp"
#include "test_util.hpp"

using namespace napp;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int number, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", number,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

// run f(i) for i in [0, count) on a small pool
void parallel_for(int count, const std::function<void(int)>& f) {
  const int jobs = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(count)));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

Dataset linear_table4(int n, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_dataset(table4_spec(LossFamily::linear, n), rng);
}

// Table-4 linear: the residual bound comes from the truncated-normal noise
// support
BoundsCerts linear_certs(const Dataset& d) {
  OutcomeBounds ob;
  ob.residual_bound = 0.5;
  return certify_bounds(d, ob);
}

PrivacyBudget nonprivate() { return PrivacyBudget{}; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp_dir(const std::string& leaf) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "napp_acceptance" / leaf;
  fs::create_directories(dir);
  return dir.string();
}

// ---------------------------------------------------------------- criterion 1
void criterion1_ridge_oracle() {
  const auto start = Clock::now();
  const int seeds = 50;
  std::vector<double> dist(seeds);
  parallel_for(seeds, [&](int s) {
    Rng rng(1000 + s);
    Dataset d = simulate_dataset(table4_spec(LossFamily::linear, 200), rng);
    const auto certs = linear_certs(d);
    const auto reg = RegularizerTarget::ridge(0.1, 0.05);
    SolverConfig cfg;
    Rng fit_rng = rng.substream(9);
    const auto fit =
        napp_fit(d, certs, reg, nonprivate(), 10000, cfg, fit_rng);
    dist[s] = (fit.theta_hat - ridge_closed_form(d.X, d.y, 0.1)).norm();
  });
  int hits = 0;
  for (double v : dist) hits += v <= 1e-2;
  const double elapsed = seconds_since(start);
  criterion(1, hits >= 48 && elapsed < 30.0,
            fmt("ridge oracle equivalence: %d/50 seeds within 1e-2 "
                "(need >= 48), %.1f s (need < 30)",
                hits, elapsed));
}

// ---------------------------------------------------------------- criterion 2
void criterion2_lasso_oracle() {
  const int seeds = 50;
  std::vector<double> dist(seeds);
  parallel_for(seeds, [&](int s) {
    Rng rng(2000 + s);
    Dataset d = simulate_dataset(table4_spec(LossFamily::linear, 200), rng);
    const auto certs = linear_certs(d);
    const auto reg = RegularizerTarget::lasso(1.0, 0.05);
    SolverConfig cfg;
    Rng fit_rng = rng.substream(9);
    const auto fit =
        napp_fit(d, certs, reg, nonprivate(), 10000, cfg, fit_rng);
    // the adaptive weighted-l2 fixed point solves the l1 problem at twice
    // the nominal tuning value
    dist[s] = (fit.theta_hat - lasso_cd(d.X, d.y, 2.0 * reg.lambda)).norm();
  });
  int hits = 0;
  for (double v : dist) hits += v <= 5e-2;
  criterion(2, hits >= 45,
            fmt("lasso oracle equivalence: %d/50 seeds within 5e-2 "
                "(need >= 45)",
                hits));
}

// ---------------------------------------------------------------- criterion 3
void criterion3_gap_rate() {
  bool all_ok = true;
  std::string detail = "2nd-order gap SD ratio (1e2 vs 1e4):";
  for (LossFamily f :
       {LossFamily::linear, LossFamily::logistic, LossFamily::poisson}) {
    Rng rng(3000 + static_cast<int>(f));
    const int p = 8;
    Eigen::VectorXd theta(p);
    for (int j = 0; j < p; ++j) theta(j) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd b(p);
    for (int j = 0; j < p; ++j) b(j) = rng.normal();

    const double e_y = dp_pseudo_outcome(f);
    const auto [lp0, lpp0] = link_derivatives_at_zero(f, e_y, true);
    (void)lp0;
    const auto reg = RegularizerTarget::ridge(1.0, 0.5);

    auto gap_sd = [&](int n_e) {
      const auto v = regularization_variance(reg, nullptr, 1, lpp0, n_e, p);
      const auto e_star = build_dp_rows(b, n_e, f, e_y);
      const double r_quad =
          0.5 * n_e * lpp0 * (v.array() * theta.array().square()).sum();
      const double surrogate =
          n_e * loss_value(f, 0.0, e_y) + b.dot(theta) + r_quad;
      std::vector<double> gaps(200);
      parallel_for(200, [&](int rep) {
        Rng noise_rng = rng.substream(n_e, rep);
        const auto e_tilde = sample_regularization_noise(v, n_e, noise_rng);
        double aug = 0;
        const double eta_star = e_star.dot(theta);
        const Eigen::VectorXd eta = e_tilde * theta;
        for (int i = 0; i < n_e; ++i)
          aug += loss_value(f, eta(i) + eta_star, e_y);
        gaps[rep] = aug - surrogate;
      });
      return oracle::sd(gaps);
    };
    const double ratio = gap_sd(100) / gap_sd(10000);
    detail += fmt(" %s=%.1f", family_name(f).c_str(), ratio);
    all_ok = all_ok && ratio >= 5.0 && ratio <= 20.0;
  }
  criterion(3, all_ok, detail + " (need each in [5,20])");
}

// ---------------------------------------------------------------- criterion 4
void criterion4_mechanisms() {
  Rng rng(4000);
  bool ks_ok = true;
  std::string detail = "mechanisms: KS p-values";
  for (int p : {1, 4, 16}) {
    std::vector<double> radii(10000);
    for (auto& r : radii)
      r = sample_spherical_laplace(p, 1.0, 0.5, rng).b.norm();
    const double pval = oracle::ks_test(
        radii, [&](double x) { return oracle::gamma_cdf(x, p, 2.0); });
    detail += fmt(" p%d=%.3f", p, pval);
    ks_ok = ks_ok && pval > 0.01;
  }

  const double sigma = gaussian_dp_sigma(1.0, 0.5, 0.001);
  std::vector<double> draws(100000);
  for (auto& v : draws) v = sample_gaussian_dp(1, 1.0, 0.5, 0.001, rng).b(0);
  const double rel_var_err =
      std::abs(oracle::variance(draws) - sigma * sigma) / (sigma * sigma);
  const bool var_ok = rel_var_err < 0.03;

  bool bound_ok = true;
  for (double eps : {0.4, 0.6, 0.8, 1.0}) {
    const double s = gaussian_dp_sigma(1.0, 0.5 * eps, 0.001);
    bound_ok =
        bound_ok && s >= gaussian_sigma_lower_bound(eps, 0.001, 1.0).exact;
  }
  const double s1 = gaussian_dp_sigma(1.0, 0.5, 0.001);
  const double m1 = gaussian_sigma_lower_bound(1.0, 0.001, 1.0).exact;

  criterion(4, ks_ok && var_ok && bound_ok,
            detail + fmt(", var err %.3f%% (need < 3%%), sigma at eps=1: "
                         "%.3f >= %.3f, grid holds: %s",
                         100 * rel_var_err, s1, m1, bound_ok ? "yes" : "NO"));
}

// ---------------------------------------------------------------- criterion 5
void criterion5_vs_plus_zero_fpr() {
  const int seeds = 50;
  std::atomic<int> vsplus_zero{0};
  std::atomic<int> vs_nonzero{0}, erm_nonzero{0}, legacy_nonzero{0};
  std::atomic<bool> failed{false};

  for (LossFamily f : {LossFamily::linear, LossFamily::logistic}) {
    parallel_for(seeds, [&](int s) {
      try {
        Rng rng(5000 + s + 100000 * static_cast<int>(f));
        SimSpec spec = table4_spec(f, 200);
        spec.theta_true.setZero();
        Dataset d = simulate_dataset(spec, rng);
        const auto certs =
            f == LossFamily::linear ? linear_certs(d) : certify_bounds(d);
        // zero-FPR regime: a small budget and a tuning value large enough
        // to zero out the null signal
        PrivacyBudget budget;
        budget.epsilon = 0.1;
        auto reg = RegularizerTarget::lasso(2.0, 0.0);
        reg.lambda0 = lambda0_floor(certs, budget);

        const FitMode modes[4] = {FitMode::vs_plus, FitMode::vs, FitMode::erm,
                                  FitMode::erm};
        for (int m = 0; m < 4; ++m) {
          SolverConfig cfg;
          cfg.mode = modes[m];
          auto r = reg;
          r.moor = (m != 3);  // m = 3 is the legacy-sum combination
          Rng fit_rng = rng.substream(9, m);
          const auto fit = napp_fit(d, certs, r, budget, 2000, cfg, fit_rng);
          const bool any_nonzero = fit.theta_hat.cwiseAbs().maxCoeff() > 0.0;
          if (m == 0 && !any_nonzero) ++vsplus_zero;
          if (m == 1 && any_nonzero) ++vs_nonzero;
          if (m == 2 && any_nonzero) ++erm_nonzero;
          if (m == 3 && any_nonzero) ++legacy_nonzero;
        }
      } catch (const std::exception&) {
        failed = true;
      }
    });
  }
  const int total = 2 * seeds;
  const int need = static_cast<int>(0.8 * total);
  const bool pass = !failed && vsplus_zero == total && vs_nonzero >= need &&
                    erm_nonzero >= need && legacy_nonzero >= need;
  criterion(5, pass,
            fmt("vs+ zero-FPR on null data: %d/%d all-zero (need all); "
                "nonzero under vs/erm/legacy: %d/%d/%d (need >= %d)",
                vsplus_zero.load(), total, vs_nonzero.load(),
                erm_nonzero.load(), legacy_nonzero.load(), need));
}

// --------------------------------------------------------------- criterion 6
void criterion6_moor_benefit() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail = "MOOR benefit (median l2 to lasso oracle):";
  for (LossFamily f : {LossFamily::linear, LossFamily::logistic}) {
    ExperimentConfig cfg;
    cfg.family = f;
    cfg.sim = table4_spec(f, 500);
    cfg.n_test = 200;
    cfg.lambda_grid = {0.5, 1.0, 2.0, 4.0};
    cfg.lambda0_grid = {0.5, 1.0, 2.0};
    cfg.epsilon_grid = {std::numeric_limits<double>::infinity()};
    cfg.n_e = 2000;
    if (f == LossFamily::linear) cfg.declared.residual_bound = 0.5;
    cfg.methods = {method_from_token("napp-erm"),
                   method_from_token("napp-erm/nomoor")};
    cfg.repeats = 50;
    cfg.seed = 600 + static_cast<int>(f);
    cfg.outdir = tmp_dir("c6_" + family_name(f));
    const auto result = run_experiment(cfg);

    std::map<std::pair<double, double>, std::vector<double>> moor, legacy;
    for (const auto& row : result.rows) {
      if (row.metric != "l2_dist_to_lasso" || row.status != "ok") continue;
      auto& bucket = row.moor ? moor : legacy;
      bucket[{row.lambda0, row.lambda}].push_back(row.value);
    }
    int cells = 0, wins = 0;
    for (auto& [key, values] : moor) {
      ++cells;
      if (oracle::median(values) < oracle::median(legacy[key])) ++wins;
    }
    detail += fmt(" %s=%d/%d", family_name(f).c_str(), wins, cells);
    pass = pass && cells == 12 && wins >= static_cast<int>(0.9 * cells);
  }
  const double elapsed = seconds_since(start);
  detail += fmt(" cells favor MOOR (need >= 90%%), %.0f s (need < 300)",
                elapsed);
  criterion(6, pass && elapsed < 300.0, detail);
}

// --------------------------------------------------------------- criterion 7
void criterion7_budget_ledger() {
  const std::vector<double> lambda_grid = {0.5, 1.0, 2.0, 4.0};
  const int seeds = 20;
  bool range_ok = true, conserve_ok = true, shrink_ok = true;
  std::mutex mu;
  std::map<double, std::vector<double>> portion;
  std::atomic<bool> failed{false};

  parallel_for(seeds * static_cast<int>(lambda_grid.size()), [&](int idx) {
    const int s = idx / static_cast<int>(lambda_grid.size());
    const double lambda = lambda_grid[idx % lambda_grid.size()];
    try {
      Rng rng(7000 + s);
      Dataset d = simulate_dataset(table4_spec(LossFamily::linear, 500), rng);
      const auto certs = linear_certs(d);
      PrivacyBudget budget;
      budget.epsilon = 1.0;
      auto reg = RegularizerTarget::lasso(lambda, 0.0);
      reg.lambda0 = lambda0_floor(certs, budget);
      SolverConfig cfg;
      Rng fit_rng = rng.substream(9, static_cast<std::uint64_t>(lambda * 8));
      const auto fit = napp_fit(d, certs, reg, budget, 2000, cfg, fit_rng);
      if (!fit.converged) return;

      const double full = (1.0 - budget.r) * budget.epsilon;
      const double d_eps = retrievable_budget(
          reg.lambda0, fit.v_min(), 2000, fit.lpp0, budget.r, budget.epsilon);

      Rng rec_rng = rng.substream(10);
      const auto report = recycle(fit, d, certs, reg, budget, 2000, cfg,
                                  rec_rng, RecycleChoice::recycle);

      std::lock_guard<std::mutex> lock(mu);
      if (d_eps < 0.0 || d_eps > full + 1e-12) range_ok = false;
      portion[lambda].push_back(d_eps / full);
      double dcum = 0;
      double prev_norm = fit.noise.e_star_base.norm();
      for (const auto& round : report.rounds) {
        dcum += round.delta_eps;
        if (dcum < -1e-15 || dcum > full + 1e-12) range_ok = false;
        // conservation: budget now held by the density ratio plus what
        // remains allocated to the Jacobian ratio is the total
        const double total = (budget.r_eps() + dcum) + (full - dcum);
        if (std::abs(total - budget.epsilon) > 1e-12) conserve_ok = false;
        if (round.delta_eps > 0.0) {
          if (round.e_star_norm >= prev_norm) shrink_ok = false;
          prev_norm = round.e_star_norm;
        }
      }
    } catch (const std::exception&) {
      failed = true;
    }
  });

  bool monotone_ok = true;
  double prev = -1;
  std::string med = " medians:";
  for (double lambda : lambda_grid) {
    const double m = oracle::median(portion[lambda]);
    med += fmt(" %.3f", m);
    if (m < prev - 1e-9) monotone_ok = false;
    prev = m;
  }
  criterion(7, !failed && range_ok && conserve_ok && shrink_ok && monotone_ok,
            fmt("budget ledger: range %s, conservation %s, e* shrinkage %s, "
                "retrieved portion nondecreasing %s,",
                range_ok ? "ok" : "NO", conserve_ok ? "ok" : "NO",
                shrink_ok ? "ok" : "NO", monotone_ok ? "ok" : "NO") +
                med);
}

// --------------------------------------------------------------- criterion 8
void criterion8_bound_validity() {
  // (a) the empirical-risk bound across 100 private linear fits
  const int fits = 100;
  std::atomic<int> bound_holds{0};
  parallel_for(fits, [&](int s) {
    Rng rng(8000 + s);
    Dataset d = simulate_dataset(table4_spec(LossFamily::linear, 200), rng);
    const auto certs = linear_certs(d);
    PrivacyBudget budget;
    budget.epsilon = 1.0;
    auto reg = RegularizerTarget::lasso(1.0, 0.0);
    reg.lambda0 = lambda0_floor(certs, budget);
    SolverConfig cfg;
    Rng fit_rng = rng.substream(9);
    const auto fit = napp_fit(d, certs, reg, budget, 2000, cfg, fit_rng);

    // effective l1 level of the adaptive schedule is twice the tuning value
    const double lam_eff = 2.0 * reg.lambda;
    const auto theta_np = lasso_cd(d.X, d.y, lam_eff);
    auto J = [&](const Eigen::VectorXd& t) {
      return (evaluate_loss(d, t).value + lam_eff * t.lpNorm<1>()) / d.n();
    };
    const double diff = J(fit.theta_hat) - J(theta_np);

    const Eigen::VectorXd weights = 0.5 * fit.n_e * fit.lpp0 * fit.v_final;
    const double r_t_at_np =
        (weights.array() * theta_np.array().square()).sum();
    const double r_at_np = lam_eff * theta_np.lpNorm<1>();
    const double bound = empirical_risk_bound(
        fit.noise.b.norm(), static_cast<int>(d.n()), fit.n_e, fit.lpp0,
        fit.v_min(), r_t_at_np, r_at_np);
    if (diff <= bound) ++bound_holds;
  });

  // (b) excess-risk bounds vs the 0.95 quantile of 200 noise redraws on a
  // fixed dataset, both mechanisms
  Dataset d = linear_table4(200, 8800);
  const auto certs = linear_certs(d);
  bool b_ok[2] = {false, false};
  double q95[2] = {0, 0}, bval[2] = {0, 0};
  for (int mech = 0; mech < 2; ++mech) {
    PrivacyBudget budget;
    budget.epsilon = 1.0;
    budget.delta = mech == 0 ? 0.0 : 0.001;
    auto reg = RegularizerTarget::lasso(1.0, 0.0);
    reg.lambda0 = lambda0_floor(certs, budget);
    const double lam_eff = 2.0 * reg.lambda;
    const auto theta_np = lasso_cd(d.X, d.y, lam_eff);
    auto J = [&](const Eigen::VectorXd& t) {
      return (evaluate_loss(d, t).value + lam_eff * t.lpNorm<1>()) / d.n();
    };
    const double j_np = J(theta_np);

    std::vector<double> diffs(200), bounds(200);
    parallel_for(200, [&](int rep) {
      SolverConfig cfg;
      Rng fit_rng = Rng(8900 + rep + 1000 * mech).substream(9);
      const auto fit = napp_fit(d, certs, reg, budget, 2000, cfg, fit_rng);
      diffs[rep] = J(fit.theta_hat) - j_np;
      const Eigen::VectorXd weights = 0.5 * fit.n_e * fit.lpp0 * fit.v_final;
      const double gap =
          (weights.array() * theta_np.array().square()).sum() -
          lam_eff * theta_np.lpNorm<1>();
      bounds[rep] = excess_risk_bound(
          mech == 0 ? DpKind::pure_eps : DpKind::eps_delta, 16, certs.zeta1,
          certs.zeta2, budget.r, budget.epsilon, budget.delta,
          static_cast<int>(d.n()), fit.n_e, fit.lpp0, fit.v_min(), gap, 0.05);
    });
    std::sort(diffs.begin(), diffs.end());
    q95[mech] = diffs[189];  // 0.95 quantile of 200
    bval[mech] = oracle::median(bounds);
    b_ok[mech] = bval[mech] > q95[mech];
  }

  criterion(8, bound_holds == fits && b_ok[0] && b_ok[1],
            fmt("bound validity: empirical-risk bound held %d/%d; "
                "B1 %.3g > q95 %.3g: %s; B2 %.3g > q95 %.3g: %s",
                bound_holds.load(), fits, bval[0], q95[0],
                b_ok[0] ? "yes" : "NO", bval[1], q95[1],
                b_ok[1] ? "yes" : "NO"));
}

// --------------------------------------------------------------- criterion 9
void criterion9_gradients() {
  Rng rng(9000);
  int checked = 0, ok = 0;
  for (LossFamily f :
       {LossFamily::linear, LossFamily::logistic, LossFamily::poisson}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int p = 1 + static_cast<int>(rng.uniform() * 6);
      Dataset d;
      d.family = f;
      d.X.resize(1, p);
      for (int j = 0; j < p; ++j) d.X(0, j) = rng.uniform(-0.5, 0.5);
      d.y.resize(1);
      switch (f) {
        case LossFamily::linear: d.y(0) = rng.normal(); break;
        case LossFamily::logistic:
          d.y(0) = rng.uniform() < 0.5 ? 0.0 : 1.0;
          break;
        case LossFamily::poisson:
          d.y(0) = static_cast<double>(rng.poisson(2.0));
          break;
      }
      Eigen::VectorXd theta(p);
      for (int j = 0; j < p; ++j) theta(j) = 0.5 * rng.normal();
      const auto ev = evaluate_loss(d, theta);
      const auto fd = oracle::fd_gradient(
          [&](const Eigen::VectorXd& t) { return evaluate_loss(d, t).value; },
          theta);
      ++checked;
      if ((ev.grad - fd).norm() <= 1e-6 * std::max(1.0, ev.grad.norm())) ++ok;
    }
  }
  criterion(9, ok == checked,
            fmt("analytic vs finite-difference gradients: %d/%d within 1e-6",
                ok, checked));
}

// -------------------------------------------------------------- criterion 10
void criterion10_determinism() {
  ExperimentConfig cfg;
  cfg.family = LossFamily::linear;
  cfg.sim = table4_spec(LossFamily::linear, 120);
  cfg.n_test = 100;
  cfg.lambda_grid = {0.5, 2.0};
  cfg.epsilon_grid = {1.0};
  cfg.n_e = 400;
  cfg.declared.residual_bound = 0.5;
  cfg.methods = {method_from_token("napp-erm"), method_from_token("napp-vs+"),
                 method_from_token("legacy-dperm")};
  cfg.repeats = 3;
  cfg.seed = 1234;
  cfg.jobs = 4;

  cfg.outdir = tmp_dir("c10_a");
  run_experiment(cfg);
  const std::string a = slurp(cfg.outdir + "/metrics.csv");
  cfg.outdir = tmp_dir("c10_b");
  run_experiment(cfg);
  const std::string b = slurp(cfg.outdir + "/metrics.csv");
  criterion(10, !a.empty() && a == b,
            fmt("determinism: repeated bench runs byte-identical (%zu bytes)",
                a.size()));
}

// -------------------------------------------------------------- criterion 11
void criterion11_prediction_ordering() {
  const auto start = Clock::now();
  ExperimentConfig cfg;
  cfg.family = LossFamily::linear;
  cfg.sim = table4_spec(LossFamily::linear, 500);
  cfg.n_test = 2000;
  cfg.lambda_grid = {0.5, 1.0, 2.0, 4.0};
  cfg.epsilon_grid = {1.0};
  cfg.n_e = 2000;
  cfg.declared.residual_bound = 0.5;
  cfg.methods = {
      method_from_token("napp-erm"), method_from_token("napp-erm/nomoor"),
      method_from_token("napp-vs"), method_from_token("napp-vs/nomoor")};
  cfg.repeats = 50;
  cfg.seed = 1100;
  cfg.outdir = tmp_dir("c11");
  const auto result = run_experiment(cfg);

  std::map<std::string, std::map<double, std::vector<double>>> mse[2];
  for (const auto& row : result.rows) {
    if (row.metric != "mse" || row.status != "ok") continue;
    mse[row.moor ? 1 : 0][row.method][row.lambda].push_back(row.value);
  }
  bool pass = true;
  std::string detail = "prediction ordering (median test MSE, MOOR vs not):";
  for (const std::string method : {"napp-erm", "napp-vs"}) {
    for (double lam : cfg.lambda_grid) {
      const double with_moor = oracle::median(mse[1][method][lam]);
      const double without = oracle::median(mse[0][method][lam]);
      if (!(with_moor <= without + 1e-12)) pass = false;
    }
    const double w1 = oracle::median(mse[1][method][0.5]);
    const double w0 = oracle::median(mse[0][method][0.5]);
    detail += fmt(" %s@0.5: %.4f<=%.4f", method.c_str(), w1, w0);
  }
  const double elapsed = seconds_since(start);
  criterion(11, pass,
            detail + fmt(" across the grid: %s, %.0f s", pass ? "yes" : "NO",
                         elapsed));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion1_ridge_oracle();
  criterion2_lasso_oracle();
  criterion3_gap_rate();
  criterion4_mechanisms();
  criterion5_vs_plus_zero_fpr();
  criterion6_moor_benefit();
  criterion7_budget_ledger();
  criterion8_bound_validity();
  criterion9_gradients();
  criterion10_determinism();
  criterion11_prediction_ordering();
  const double total = seconds_since(start);
  std::printf("acceptance total: %.0f s, %d failure(s)\n", total, g_failures);
  return g_failures == 0 ? 0 : 1;
}
