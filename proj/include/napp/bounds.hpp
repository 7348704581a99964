#pragma once

#include <optional>
#include <vector>

#include "napp/noise.hpp"
#include "napp/rng.hpp"

namespace napp {

enum class DpKind { pure_eps, eps_delta };

struct BoundParams {
  double pi = 0.05;        // excess-risk failure probability
  double pi_prime = 0.05;  // generalization failure probability
  double c_prime = 1.0;    // unspecified absolute constant, user-settable
  double varrho = 1.0;     // target excess risk
  void validate() const;
};

/// n^-1 (||b||^2 / (n_e lpp0 v_min) + (R_t(theta_hat) - R(theta_hat)))
double empirical_risk_bound(double b_norm, int n, int n_e, double lpp0,
                            double v_min, double r_t_at_thetahat,
                            double r_at_thetahat);

/// High-probability bound on the excess risk of the private estimate.
/// pure eps:  (p z1 z2 / (r eps) log(p/pi))^2 n^-1 [1/(n_e lpp0 v_min) + gap]
/// eps,delta: 4 p z1^2 z2^2 (r eps)^-2 (r eps + log(2/delta)) log(1/pi)
///            n^-1 [same bracket]
double excess_risk_bound(DpKind kind, int p, double zeta1, double zeta2,
                         double r, double epsilon, double delta, int n,
                         int n_e, double lpp0, double v_min, double reg_gap,
                         double pi);

/// The DP-noise constant C feeding the sample-complexity bound.
double dp_noise_constant(DpKind kind, int p, double zeta12, double r_eps,
                         double delta, double pi);

/// Training size ensuring the private estimator's expected loss is within
/// varrho of the population optimum. Throws when the denominator
/// varrho + C' log(pi') / (2 n_e lpp0 v_min) is not positive.
double sample_complexity(const BoundParams& params, double c, int n_e,
                         double lpp0, double v_min, double r_t_at_theta0);

struct RegCurvePoint {
  double theta = 0;
  double realized = 0;  // weight * theta^2 at the schedule's fixed point
  double modulus = 0;   // n_e lpp0 V
  double target = 0;    // lambda * penalty(theta)
  bool converged = true;
  std::optional<double> empirical;  // Monte-Carlo quadratic term, if requested
};

/// Scalar (p = 1) probe of the schedule: analytic realized regularizer and
/// strong-convexity modulus per grid point, with an optional noise-draw
/// overlay. moor overrides the flag carried by reg.
std::vector<RegCurvePoint> realized_regularizer(
    const RegularizerTarget& reg, const std::vector<double>& theta_grid,
    int n_e, double lpp0, bool moor, Rng* empirical_rng = nullptr);

double target_penalty_value(const RegularizerTarget& reg, double theta);

}  // namespace napp
