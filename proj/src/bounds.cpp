#include "napp/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace napp {

void BoundParams::validate() const {
  if (!(pi > 0 && pi < 1) || !(pi_prime > 0 && pi_prime < 1))
    throw std::invalid_argument("pi and pi_prime must be in (0,1)");
  if (!(varrho > 0)) throw std::invalid_argument("varrho must be > 0");
}

double empirical_risk_bound(double b_norm, int n, int n_e, double lpp0,
                            double v_min, double r_t_at_thetahat,
                            double r_at_thetahat) {
  if (n < 1 || n_e < 1 || !(lpp0 > 0) || !(v_min > 0) || b_norm < 0)
    throw std::invalid_argument("empirical_risk_bound: invalid inputs");
  const double modulus = static_cast<double>(n_e) * lpp0 * v_min;
  return (b_norm * b_norm / modulus + (r_t_at_thetahat - r_at_thetahat)) /
         static_cast<double>(n);
}

double excess_risk_bound(DpKind kind, int p, double zeta1, double zeta2,
                         double r, double epsilon, double delta, int n,
                         int n_e, double lpp0, double v_min, double reg_gap,
                         double pi) {
  if (!(pi > 0 && pi < 1)) throw std::invalid_argument("pi must be in (0,1)");
  if (n < 1 || n_e < 1 || !(lpp0 > 0) || !(v_min > 0))
    throw std::invalid_argument("excess_risk_bound: invalid inputs");
  const double re = r * epsilon;
  const double z12 = zeta1 * zeta2;
  const double bracket =
      1.0 / (static_cast<double>(n_e) * lpp0 * v_min) + reg_gap;
  switch (kind) {
    case DpKind::pure_eps: {
      const double a = p * z12 / re * std::log(p / pi);
      return a * a / n * bracket;
    }
    case DpKind::eps_delta: {
      if (!(delta > 0 && delta < 1))
        throw std::invalid_argument("eps-delta bound requires delta in (0,1)");
      return 4.0 * p * z12 * z12 / (re * re) * (re + std::log(2.0 / delta)) *
             std::log(1.0 / pi) / n * bracket;
    }
  }
  throw std::logic_error("unreachable");
}

double dp_noise_constant(DpKind kind, int p, double zeta12, double r_eps,
                         double delta, double pi) {
  switch (kind) {
    case DpKind::pure_eps: {
      const double a = p * zeta12 / r_eps * std::log(p / pi);
      return 2.0 * a * a;
    }
    case DpKind::eps_delta:
      if (!(delta > 0 && delta < 1))
        throw std::invalid_argument("eps-delta constant requires delta");
      return 4.0 * p * zeta12 * zeta12 / (r_eps * r_eps) *
             (r_eps + std::log(2.0 / delta)) * std::log(1.0 / pi);
  }
  throw std::logic_error("unreachable");
}

double sample_complexity(const BoundParams& params, double c, int n_e,
                         double lpp0, double v_min, double r_t_at_theta0) {
  params.validate();
  const double modulus = static_cast<double>(n_e) * lpp0 * v_min;
  const double denom =
      params.varrho + params.c_prime * std::log(params.pi_prime) /
                          (2.0 * modulus);
  if (!(denom > 0))
    throw std::invalid_argument(
        "varrho too small for the chosen pi'/C': nonpositive denominator");
  return (r_t_at_theta0 + c / modulus) / denom;
}

double target_penalty_value(const RegularizerTarget& reg, double theta) {
  const double a = std::abs(theta);
  switch (reg.kind) {
    case PenaltyKind::ridge: return reg.lambda * theta * theta;
    case PenaltyKind::bridge:
      return reg.lambda * std::pow(a, 2.0 - reg.gamma);
    case PenaltyKind::elastic_net:
      return reg.lambda * (a + reg.kappa * theta * theta);
  }
  return 0;
}

std::vector<RegCurvePoint> realized_regularizer(
    const RegularizerTarget& reg, const std::vector<double>& theta_grid,
    int n_e, double lpp0, bool moor, Rng* empirical_rng) {
  RegularizerTarget probe = reg;
  probe.moor = moor;
  probe.validate();

  std::vector<RegCurvePoint> curve;
  curve.reserve(theta_grid.size());

  for (double theta : theta_grid) {
    RegCurvePoint pt;
    pt.theta = theta;
    pt.target = target_penalty_value(probe, theta);

    // fixed point of the schedule at this theta
    Eigen::VectorXd prev = Eigen::VectorXd::Constant(1, theta);
    double v = regularization_variance(probe, &prev, 2, lpp0, n_e, 1)(0);
    pt.converged = false;
    for (int it = 0; it < 100; ++it) {
      const double v_next =
          regularization_variance(probe, &prev, 2, lpp0, n_e, 1)(0);
      if (std::abs(v_next - v) <= 1e-10 * std::max(1.0, std::abs(v))) {
        v = v_next;
        pt.converged = true;
        break;
      }
      v = v_next;
    }

    const double weight = 0.5 * n_e * lpp0 * v;
    pt.realized = weight * theta * theta;
    pt.modulus = n_e * lpp0 * v;

    if (empirical_rng) {
      const Eigen::VectorXd vv = Eigen::VectorXd::Constant(1, v);
      const Eigen::MatrixXd e =
          sample_regularization_noise(vv, n_e, *empirical_rng);
      pt.empirical = 0.5 * lpp0 * (e.col(0) * theta).squaredNorm();
    }
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace napp
