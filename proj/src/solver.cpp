#include "napp/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace napp {

namespace {

// loss over the noise rows only; +inf instead of throwing so step halving
// can back off from a bad Poisson step
double block_loss(LossFamily f, const AugmentedBlock& block,
                  const Eigen::VectorXd& theta) {
  double total = 0;
  const Eigen::VectorXd eta_tilde = block.e_tilde * theta;
  const double eta_star = block.e_star.dot(theta);
  for (int i = 0; i < block.n_e; ++i) {
    const double eta = eta_tilde(i) + eta_star;
    if (f == LossFamily::poisson && eta > 690.0)
      return std::numeric_limits<double>::infinity();
    total += loss_value(f, eta, block.e_y(i));
  }
  return total;
}

double data_loss(const Dataset& data, const Eigen::VectorXd& theta) {
  double total = 0;
  const Eigen::VectorXd eta = data.X * theta;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.family == LossFamily::poisson && eta(i) > 690.0)
      return std::numeric_limits<double>::infinity();
    total += loss_value(data.family, eta(i), data.y(i));
  }
  return total;
}

void accumulate_derivatives(LossFamily f, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& eta,
                            const Eigen::VectorXd& y, Eigen::VectorXd& grad,
                            Eigen::MatrixXd& hess) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd g1(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g1(i) = loss_d1(f, eta(i), y(i));
    w(i) = loss_d2(f, eta(i), y(i));
  }
  grad.noalias() += X.transpose() * g1;
  hess.noalias() += X.transpose() * w.asDiagonal() * X;
}

// Stabilization detector for the stochastic loss trace. The smoothed value
// keeps a Monte-Carlo wobble of order n_e^{-1/2} that never decays with t,
// so the trend is compared against that noise level as well as against the
// deterministic tolerance.
struct TraceMonitor {
  std::vector<double> values;
  int window;
  double tol;
  int consecutive = 0;

  TraceMonitor(int w, double t) : window(w), tol(t) {}

  // average of the trailing window ending at index t (0-based)
  double smoothed(int t) const {
    const int lo = std::max(0, t - window + 1);
    double s = 0;
    for (int i = lo; i <= t; ++i) s += values[i];
    return s / (t - lo + 1);
  }

  bool push_and_check(double v) {
    values.push_back(v);
    const int t = static_cast<int>(values.size()) - 1;
    if (t < window) return false;

    const double ma_now = smoothed(t);
    const double ma_prev = smoothed(t - 1);

    // iterate-to-iterate noise over the trailing window
    double mean_diff = 0;
    for (int i = t - window + 1; i <= t; ++i)
      mean_diff += values[i] - values[i - 1];
    mean_diff /= window;
    double var_diff = 0;
    for (int i = t - window + 1; i <= t; ++i) {
      const double d = values[i] - values[i - 1] - mean_diff;
      var_diff += d * d;
    }
    const double sd_diff = std::sqrt(var_diff / std::max(1, window - 1));
    const double noise_floor = sd_diff * std::sqrt(2.0) / window;

    const double threshold =
        std::max(tol * std::max(std::abs(ma_now), 1e-300), noise_floor);
    if (std::abs(ma_now - ma_prev) <= threshold)
      ++consecutive;
    else
      consecutive = 0;
    return consecutive >= 2;
  }
};

}  // namespace

std::string fit_mode_name(FitMode m) {
  switch (m) {
    case FitMode::erm: return "erm";
    case FitMode::vs: return "vs";
    case FitMode::vs_plus: return "vs+";
  }
  return "?";
}

FitMode fit_mode_from_name(const std::string& name) {
  if (name == "erm") return FitMode::erm;
  if (name == "vs") return FitMode::vs;
  if (name == "vs+" || name == "vs_plus") return FitMode::vs_plus;
  throw std::invalid_argument("unknown fit mode: " + name);
}

double SolverConfig::effective_trunc_c() const {
  if (!std::isnan(trunc_c)) return trunc_c;
  return mode == FitMode::vs_plus
             ? 0.0
             : -std::numeric_limits<double>::infinity();
}

void SolverConfig::validate() const {
  if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
  if (!(inner_tol > 0) || !(outer_tol > 0))
    throw std::invalid_argument("tolerances must be > 0");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (inner_max < 1) throw std::invalid_argument("inner_max must be >= 1");
}

double lambda0_floor(const BoundsCerts& certs, const PrivacyBudget& budget) {
  if (!budget.is_private()) return 0.0;
  return certs.zeta3 / (2.0 * (1.0 - budget.r) * budget.epsilon);
}

double augmented_loss(const Dataset& data, const AugmentedBlock& block,
                      const Eigen::VectorXd& theta) {
  const double d = data_loss(data, theta);
  const double b = block_loss(data.family, block, theta);
  return (d + b) / static_cast<double>(data.n());
}

Eigen::VectorXd minimize_augmented(const Dataset& data,
                                   const AugmentedBlock& block,
                                   const Eigen::VectorXd& init,
                                   const SolverConfig& cfg,
                                   int* newton_iters) {
  const Eigen::Index n = data.n(), p = data.p();
  if (n + block.n_e <= p)
    throw std::invalid_argument("identifiability requires n + n_e > p");
  if (init.size() != p)
    throw std::invalid_argument("init has wrong dimension");
  if (block.e_y.size() != block.n_e || block.e_tilde.rows() != block.n_e ||
      block.e_tilde.cols() != p || block.e_star.size() != p)
    throw std::invalid_argument("augmented block dimensions inconsistent");

  const LossFamily f = data.family;
  Eigen::VectorXd theta = init;
  double loss = data_loss(data, theta) + block_loss(f, block, theta);
  if (!std::isfinite(loss))
    throw std::runtime_error("initial point outside admissible range");

  // noise rows materialized once per call; e_star is constant over rows
  const Eigen::MatrixXd noise_rows =
      block.e_tilde.rowwise() + block.e_star.transpose();

  int it = 0;
  for (it = 1; it <= cfg.inner_max; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p, p);
    accumulate_derivatives(f, data.X, data.X * theta, data.y, grad, hess);
    accumulate_derivatives(f, noise_rows, noise_rows * theta, block.e_y, grad,
                           hess);
    if (grad.norm() <= cfg.inner_tol * std::max(1.0, std::abs(loss))) break;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    const auto& pivots = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success ||
        pivots.minCoeff() <= 1e-14 * std::max(1.0, pivots.maxCoeff()))
      throw std::runtime_error(
          "augmented Hessian numerically singular: n_e too small or "
          "degenerate variances");
    const Eigen::VectorXd step = ldlt.solve(-grad);
    if (!step.allFinite())
      throw std::runtime_error(
          "augmented Hessian numerically singular: n_e too small or "
          "degenerate variances");

    const double float_floor = 1e-12 * std::max(1.0, std::abs(loss));
    const double slope = grad.dot(step);  // negative for a descent direction
    // trust cap: saturating losses make the quadratic model unreliable far
    // from the current iterate
    constexpr double kStepCap = 50.0;
    const double cap = std::min(1.0, kStepCap / std::max(1e-300, step.norm()));
    double alpha = cap;
    double new_loss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd cand;
    int halvings = 0;
    for (; halvings <= 30; ++halvings) {
      cand = theta + alpha * step;
      new_loss = data_loss(data, cand) + block_loss(f, block, cand);
      if (new_loss <= loss + 1e-4 * alpha * slope + float_floor) break;
      alpha *= 0.5;
    }
    if (halvings > 30) {
      // no descent direction left; accept convergence if the gradient is
      // already negligible, otherwise report divergence
      if (grad.norm() <= 1e-6 * std::max(1.0, theta.norm())) break;
      throw std::runtime_error("Newton failed to descend after 30 halvings");
    }

    const double drop = loss - new_loss;
    const bool stalled = alpha < cap && drop <= float_floor;
    theta = cand;
    loss = new_loss;
    // a tiny drop only signals a stationary point when the full step was
    // taken or progress has hit the floating-point floor
    if (stalled ||
        (alpha == 1.0 &&
         drop <= cfg.inner_tol * std::max(1.0, std::abs(loss))))
      break;
  }
  if (newton_iters) *newton_iters = std::min(it, cfg.inner_max);
  return theta;
}

Eigen::VectorXd sign_adjust(const Eigen::VectorXd& e_star_base,
                            const Eigen::VectorXd& theta_prev) {
  Eigen::VectorXd out = e_star_base;
  for (Eigen::Index j = 0; j < out.size(); ++j)
    if (theta_prev(j) < 0) out(j) = -out(j);
  return out;
}

Eigen::VectorXd zero_stabilize(const std::vector<IterationRecord>& trace,
                               double tau_zero, int window) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  const Eigen::Index p = trace.back().theta.size();
  const int t_end = static_cast<int>(trace.size());
  const int t_lo = std::max(0, t_end - window);

  Eigen::VectorXd out = trace.back().theta;
  for (Eigen::Index j = 0; j < p; ++j) {
    bool all_small = true;
    bool saw_pos = false, saw_neg = false;
    for (int t = t_lo; t < t_end; ++t) {
      const double v = trace[t].theta(j);
      if (std::abs(v) >= tau_zero) {
        all_small = false;
        (v > 0 ? saw_pos : saw_neg) = true;
      }
    }
    if (all_small || (saw_pos && saw_neg)) out(j) = 0.0;
  }
  return out;
}

namespace {

NoiseDraw draw_mechanism(const PrivacyBudget& budget, const BoundsCerts& certs,
                         const SolverConfig& cfg, int p, Rng& rng) {
  const double z12 = certs.zeta12();
  const double re = budget.r_eps();
  switch (cfg.mode) {
    case FitMode::erm:
      return budget.delta > 0
                 ? sample_gaussian_dp(p, z12, re, budget.delta, rng)
                 : sample_spherical_laplace(p, z12, re, rng);
    case FitMode::vs:
    case FitMode::vs_plus: {
      const Mechanism base = budget.delta > 0 ? Mechanism::gaussian
                                              : Mechanism::spherical_laplace;
      return sample_truncated(base, cfg.effective_trunc_c(), p, z12, re,
                              budget.delta, rng);
    }
  }
  throw std::logic_error("unreachable");
}

FitResult run_outer_loop(const Dataset& data, const BoundsCerts& certs,
                         const RegularizerTarget& reg,
                         const PrivacyBudget& budget, int n_e,
                         const SolverConfig& cfg,
                         const Eigen::VectorXd& e_star_base,
                         const NoiseRecord& noise, Eigen::VectorXd theta,
                         bool adaptive_from_start, double floor_extra,
                         Rng& rng) {
  const int p = static_cast<int>(data.p());
  const double e_y = dp_pseudo_outcome(data.family);
  const auto [lp0, lpp0] = link_derivatives_at_zero(data.family, e_y, true);

  FitResult res;
  res.budget = budget;
  res.noise = noise;
  res.lp0 = lp0;
  res.lpp0 = lpp0;
  res.e_y = e_y;
  res.n_e = n_e;
  res.mode = cfg.mode;

  AugmentedBlock block;
  block.n_e = n_e;
  block.e_y = Eigen::VectorXd::Constant(n_e, e_y);

  TraceMonitor monitor(cfg.window, cfg.outer_tol);
  // VS modes keep iterating after the trace settles so the zero-stabilization
  // rule judges post-convergence fluctuation only.
  const int stabilize_window = 2 * cfg.window;
  int converged_at = 0;
  for (int t = 1; t <= cfg.max_outer; ++t) {
    const int sched_t = (adaptive_from_start && t == 1) ? 2 : t;
    const Eigen::VectorXd* anchor =
        (sched_t >= 2) ? &theta : nullptr;
    block.variance = regularization_variance(reg, anchor, sched_t, lpp0, n_e,
                                             p, floor_extra);

    Rng iter_rng = rng.substream(0xE71DE, static_cast<std::uint64_t>(t));
    block.e_tilde = sample_regularization_noise(block.variance, n_e, iter_rng);

    block.e_star = (cfg.mode != FitMode::erm && t >= 2)
                       ? sign_adjust(e_star_base, theta)
                       : e_star_base;

    theta = minimize_augmented(data, block, theta, cfg);
    if (cfg.mode != FitMode::erm) {
      // sparsity semantics of the VS modes: coordinates under the weight
      // cap's theta floor are numerically zero
      for (int j = 0; j < p; ++j)
        if (std::abs(theta(j)) < kThetaFloor) theta(j) = 0.0;
    }

    IterationRecord rec;
    rec.loss = augmented_loss(data, block, theta);
    rec.theta = theta;
    res.trace.push_back(std::move(rec));
    res.v_final = block.variance;
    res.iterations_used = t;

    const bool stable = monitor.push_and_check(res.trace.back().loss);
    if (res.converged) {
      if (t - converged_at >= stabilize_window) break;
    } else if (stable) {
      res.converged = true;
      converged_at = t;
      if (cfg.mode == FitMode::erm) break;
    }
  }

  res.theta_hat =
      (cfg.mode == FitMode::erm)
          ? res.trace.back().theta
          : zero_stabilize(res.trace, cfg.tau_zero, stabilize_window);
  return res;
}

}  // namespace

FitResult napp_fit(const Dataset& data, const BoundsCerts& certs,
                   const RegularizerTarget& reg, const PrivacyBudget& budget,
                   int n_e, const SolverConfig& cfg, Rng& rng) {
  cfg.validate();
  reg.validate();
  budget.validate();
  validate_outcomes(data);
  if (n_e < 2 || n_e % 2 != 0)
    throw std::invalid_argument("n_e must be a positive even number");
  if (data.n() + n_e <= data.p())
    throw std::invalid_argument("identifiability requires n + n_e > p");

  const int p = static_cast<int>(data.p());
  NoiseRecord noise;
  Eigen::VectorXd e_star_base;

  if (budget.is_private()) {
    const double floor = lambda0_floor(certs, budget);
    if (reg.lambda0 < floor * (1.0 - 1e-12))
      throw std::invalid_argument(
          "lambda0 below the strong-convexity floor zeta3 / (2(1-r) eps)");
    Rng b_rng = rng.substream(0xB00);
    NoiseDraw draw = draw_mechanism(budget, certs, cfg, p, b_rng);
    noise.mechanism = draw.mechanism;
    noise.trunc_c = draw.trunc_c.value_or(
        std::numeric_limits<double>::quiet_NaN());
    noise.scale = draw.scale;
    noise.b = draw.b;
    e_star_base =
        build_dp_rows(draw.b, n_e, data.family, dp_pseudo_outcome(data.family));
  } else {
    noise.b = Eigen::VectorXd::Zero(p);
    noise.scale = 0.0;
    e_star_base = Eigen::VectorXd::Zero(p);
  }
  noise.e_star_base = e_star_base;

  return run_outer_loop(data, certs, reg, budget, n_e, cfg, e_star_base, noise,
                        Eigen::VectorXd::Zero(p),
                        /*adaptive_from_start=*/false, /*floor_extra=*/0.0,
                        rng);
}

FitResult napp_refit(const Dataset& data, const BoundsCerts& certs,
                     const RegularizerTarget& reg, const PrivacyBudget& budget,
                     int n_e, const SolverConfig& cfg,
                     const Eigen::VectorXd& e_star_base,
                     const NoiseRecord& noise, const Eigen::VectorXd& warm,
                     double floor_extra, Rng& rng) {
  cfg.validate();
  reg.validate();
  NoiseRecord rec = noise;
  rec.e_star_base = e_star_base;
  return run_outer_loop(data, certs, reg, budget, n_e, cfg, e_star_base, rec,
                        warm, /*adaptive_from_start=*/true, floor_extra, rng);
}

}  // namespace napp
