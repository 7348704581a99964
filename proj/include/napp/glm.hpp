#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>

namespace napp {

enum class LossFamily { linear, logistic, poisson };

std::string family_name(LossFamily f);
LossFamily family_from_name(const std::string& name);

/// Observed data: n x p design matrix, n outcomes, loss-family tag.
/// Outcomes are reals (linear), {0,1} (logistic) or nonnegative integers
/// (Poisson). Immutable by convention once built.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  LossFamily family = LossFamily::linear;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

/// Per-sample bounds: max feature norm, gradient norm bound, Hessian
/// eigenvalue bound.
struct BoundsCerts {
  double zeta1 = 0;
  double zeta2 = 0;
  double zeta3 = 0;
  double zeta12() const { return zeta1 * zeta2; }
};

/// Caller-declared outcome/predictor ranges needed to certify families whose
/// raw losses are not globally Lipschitz.
struct OutcomeBounds {
  std::optional<double> residual_bound;  // linear: |y - eta| <= rho
  std::optional<double> y_max;           // poisson: y <= y_max
  std::optional<double> eta_max;         // poisson: |eta| <= eta_max
};

struct LossEval {
  double value = 0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// per-row loss and derivatives in the linear predictor eta
double loss_value(LossFamily f, double eta, double y);
double loss_d1(LossFamily f, double eta, double y);
double loss_d2(LossFamily f, double eta, double y);

/// Sum of per-row losses with exact analytic gradient and Hessian.
/// Throws on dimension mismatch and on Poisson predictor overflow.
LossEval evaluate_loss(LossFamily f, const Eigen::VectorXd& theta,
                       const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
LossEval evaluate_loss(const Dataset& data, const Eigen::VectorXd& theta);

/// (l'(0; e_y), l''(0)); l''(0) does not depend on e_y for any family.
/// With for_dp_rows set, a zero l'(0) is rejected because the DP row
/// construction divides by it.
std::pair<double, double> link_derivatives_at_zero(LossFamily f, double e_y,
                                                   bool for_dp_rows = false);

/// Pseudo-outcome used for all noise rows: chosen so l'(0) != 0.
double dp_pseudo_outcome(LossFamily f);

/// Throws if outcomes are outside the family's domain.
void validate_outcomes(const Dataset& data);

/// zeta1 from the data; zeta2/zeta3 from family closed forms. linear and
/// Poisson need declared bounds or certification fails.
BoundsCerts certify_bounds(const Dataset& data,
                           const OutcomeBounds& declared = {});

struct ScaledDataset {
  Dataset data;
  Eigen::VectorXd row_scale;  // per-row clip factor applied, in [0, 1]
};

/// Per-row norm clipping to target_zeta1; rows already inside the bound are
/// left untouched.
ScaledDataset scale_features(const Dataset& data, double target_zeta1);

}  // namespace napp
