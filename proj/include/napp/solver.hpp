#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "napp/glm.hpp"
#include "napp/noise.hpp"
#include "napp/rng.hpp"

namespace napp {

enum class FitMode { erm, vs, vs_plus };

std::string fit_mode_name(FitMode m);
FitMode fit_mode_from_name(const std::string& name);

struct SolverConfig {
  int max_outer = 50;       // T
  double inner_tol = 1e-8;  // relative loss tolerance for Newton
  int inner_max = 100;
  double outer_tol = 1e-6;  // relative change of window-smoothed trace
  int window = 5;
  FitMode mode = FitMode::erm;
  double tau_zero = 1e-4;
  // truncation point for VS mechanisms; NaN = mode default
  // (0 for vs_plus, -inf for vs)
  double trunc_c = std::numeric_limits<double>::quiet_NaN();

  double effective_trunc_c() const;
  void validate() const;
};

struct IterationRecord {
  double loss = 0;  // n^-1 (data loss + noise loss) at the iterate
  Eigen::VectorXd theta;
};

struct NoiseRecord {
  Mechanism mechanism = Mechanism::spherical_laplace;
  double trunc_c = std::numeric_limits<double>::quiet_NaN();
  double scale = 0;
  Eigen::VectorXd b;
  Eigen::VectorXd e_star_base;  // before any VS sign flips
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct FitResult {
  Eigen::VectorXd theta_hat;
  bool converged = false;
  int iterations_used = 0;
  std::vector<IterationRecord> trace;
  PrivacyBudget budget;
  NoiseRecord noise;
  Eigen::VectorXd v_final;  // schedule of the last iteration
  double lp0 = 0, lpp0 = 0, e_y = 0;
  int n_e = 0;
  FitMode mode = FitMode::erm;

  double v_min() const { return v_final.minCoeff(); }
};

double lambda0_floor(const BoundsCerts& certs, const PrivacyBudget& budget);

/// Loss of the augmented problem, n^-1 (sum_i l(theta|d_i) +
/// sum_i l(theta|e_i)); +inf when a predictor leaves the admissible range.
double augmented_loss(const Dataset& data, const AugmentedBlock& block,
                      const Eigen::VectorXd& theta);

/// Damped Newton (step halving until descent) on the augmented objective.
/// Requires n + n_e > p. Throws on a numerically singular Hessian or failure
/// to descend.
Eigen::VectorXd minimize_augmented(const Dataset& data,
                                   const AugmentedBlock& block,
                                   const Eigen::VectorXd& init,
                                   const SolverConfig& cfg,
                                   int* newton_iters = nullptr);

/// VS sign rule: flips each DP-row coordinate to the sign of the previous
/// estimate. Reads nothing but theta_prev. sgn(0) keeps the coordinate.
Eigen::VectorXd sign_adjust(const Eigen::VectorXd& e_star_base,
                            const Eigen::VectorXd& theta_prev);

/// Coordinates that flipped sign or stayed below tau_zero over the trailing
/// window are set to exactly zero; others keep the final iterate's value.
Eigen::VectorXd zero_stabilize(const std::vector<IterationRecord>& trace,
                               double tau_zero, int window);

/// The full outer loop: draw b once, then iterate adaptive noise
/// augmentation until the smoothed loss trace settles. epsilon = inf gives
/// the non-private noise-augmented estimator (b = 0).
FitResult napp_fit(const Dataset& data, const BoundsCerts& certs,
                   const RegularizerTarget& reg, const PrivacyBudget& budget,
                   int n_e, const SolverConfig& cfg, Rng& rng);

/// Re-run used by the budget recycle protocol: warm start, fixed e* base,
/// adaptive schedule from the first iteration, extra floor joined to
/// lambda0.
FitResult napp_refit(const Dataset& data, const BoundsCerts& certs,
                     const RegularizerTarget& reg, const PrivacyBudget& budget,
                     int n_e, const SolverConfig& cfg,
                     const Eigen::VectorXd& e_star_base,
                     const NoiseRecord& noise, const Eigen::VectorXd& warm,
                     double floor_extra, Rng& rng);

}  // namespace napp
