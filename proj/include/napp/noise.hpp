#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>

#include "napp/glm.hpp"
#include "napp/rng.hpp"

namespace napp {

enum class Mechanism {
  spherical_laplace,   // eps-DP
  gaussian,            // (eps,delta)-DP
  truncated_laplace,   // variable-selection variant of spherical_laplace
  truncated_gaussian,  // variable-selection variant of gaussian
};

std::string mechanism_name(Mechanism m);
Mechanism mechanism_from_name(const std::string& name);

/// Total budget epsilon, slack delta (0 = pure eps-DP), fraction r of epsilon
/// spent on the density ratio, and the running retrieved amount.
struct PrivacyBudget {
  double epsilon = std::numeric_limits<double>::infinity();
  double delta = 0.0;
  double r = 0.5;
  double delta_eps = 0.0;

  bool is_private() const { return std::isfinite(epsilon); }
  double r_eps() const { return r * epsilon; }
  void validate() const;
};

struct NoiseDraw {
  Eigen::VectorXd b;
  Mechanism mechanism = Mechanism::spherical_laplace;
  std::optional<double> trunc_c;
  double scale = 0.0;  // gamma radial scale (laplace) or per-coordinate sigma
};

enum class PenaltyKind { ridge, bridge, elastic_net };

std::string penalty_name(PenaltyKind k);

/// Target penalty: ridge, bridge l_{2-gamma} (lasso = gamma 1) or elastic
/// net with mix kappa. lambda0 is the strong-convexity floor; moor selects
/// the max combination over the legacy sum.
struct RegularizerTarget {
  PenaltyKind kind = PenaltyKind::ridge;
  double gamma = 1.0;  // bridge exponent, in [0, 2)
  double kappa = 0.5;  // elastic-net mix, in (0, 1)
  double lambda = 0.0;
  double lambda0 = 0.0;
  bool moor = true;

  void validate() const;
  static RegularizerTarget ridge(double lambda, double lambda0,
                                 bool moor = true);
  static RegularizerTarget lasso(double lambda, double lambda0,
                                 bool moor = true);
  static RegularizerTarget bridge(double gamma, double lambda, double lambda0,
                                  bool moor = true);
  static RegularizerTarget elastic_net(double kappa, double lambda,
                                       double lambda0, bool moor = true);
};

/// |theta| floor applied before the bridge/elastic-net weight |theta|^-gamma;
/// caps the noise variance and marks the coordinate as numerically zero.
constexpr double kThetaFloor = 1e-4;

/// Noise rows of one iteration: fixed DP component (identical across rows up
/// to VS sign flips), antithetic-paired regularization component, and the
/// pseudo-outcomes. Row i fed to the solver is e_tilde.row(i) + e_star.
struct AugmentedBlock {
  Eigen::VectorXd e_star;    // p
  Eigen::MatrixXd e_tilde;   // n_e x p, second half = -first half
  Eigen::VectorXd e_y;       // n_e
  Eigen::VectorXd variance;  // p, schedule V used this iteration
  int n_e = 0;
};

/// b with density proportional to exp(-(r eps / zeta1 zeta2) ||b||_2):
/// radius ~ Gamma(shape p, scale zeta12/r_eps), direction uniform on the
/// sphere.
NoiseDraw sample_spherical_laplace(int p, double zeta12, double r_eps,
                                   Rng& rng);

/// i.i.d. N(0, sigma^2) coordinates with
/// sigma^2 = 2 (r eps)^-2 zeta12^2 (r eps - log delta). Requires delta > 0.
NoiseDraw sample_gaussian_dp(int p, double zeta12, double r_eps, double delta,
                             Rng& rng);

double gaussian_dp_sigma(double zeta12, double r_eps, double delta);

struct SigmaBound {
  double exact;       // eps^-1 z12 (sqrt(-2 log d + eps) + sqrt(-2 log d))
  double simplified;  // 2 eps^-1 z12 sqrt(-2 log d + eps)
};
SigmaBound gaussian_sigma_lower_bound(double epsilon, double delta,
                                      double zeta12);

/// Base mechanism conditioned on every coordinate exceeding c (c <= 0).
/// c = 0 is the positive-orthant version; c = -inf recovers the base draw.
NoiseDraw sample_truncated(Mechanism mechanism, double c, int p, double zeta12,
                           double r_eps, double delta, Rng& rng);

/// e* = b / (n_e l'(0; e_y)); identical for every noise row.
Eigen::VectorXd build_dp_rows(const Eigen::VectorXd& b, int n_e, LossFamily f,
                              double e_y);

/// Schedule V(theta, Lambda) per penalty kind, iteration and mode.
/// theta_prev may be null only at t = 1 (ridge ignores it everywhere).
/// floor_extra joins lambda0 as max(lambda0, floor_extra); used by the budget
/// recycle protocol, 0 otherwise.
Eigen::VectorXd regularization_variance(const RegularizerTarget& reg,
                                        const Eigen::VectorXd* theta_prev,
                                        int t, double lpp0, int n_e, int p,
                                        double floor_extra = 0.0);

/// n_e x p rows; first half i.i.d. N(0, diag(V)), second half the exact
/// negation so column sums vanish. n_e must be even.
Eigen::MatrixXd sample_regularization_noise(const Eigen::VectorXd& variance,
                                            int n_e, Rng& rng);

}  // namespace napp
