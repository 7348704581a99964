#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "napp/solver.hpp"

namespace napp {

enum class RecycleChoice { return_budget, recycle };

std::string recycle_choice_name(RecycleChoice c);
RecycleChoice recycle_choice_from_name(const std::string& name);

struct RetrievalRound {
  double delta_eps = 0;       // budget retrieved entering this round
  double lambda0_before = 0;  // floor while the round's re-run executed
  double lambda0_after = 0;   // floor implied by the re-run's schedule
  double e_star_norm = 0;     // ||e*||_2 used by the round's re-run
  int iterations = 0;         // re-run outer iterations (0 for round 1)
  bool converged = true;
};

struct RetrievalReport {
  std::vector<RetrievalRound> rounds;
  double delta_eps_cumulative = 0;
  RecycleChoice choice = RecycleChoice::return_budget;
  Eigen::VectorXd final_theta;
  bool warning_nonconverged = false;
};

/// max{0, (1-r) eps (1 - lambda0 / (n_e lpp0 v_min))}; the unspent portion of
/// the budget allocated to the Jacobian ratio.
double retrievable_budget(double lambda0, double v_min, int n_e, double lpp0,
                          double r, double epsilon);

/// The return/recycle protocol. "return" reports the retrievable amount and
/// leaves the estimate alone. "recycle" loops: rescale e* to the enlarged
/// budget (redraw for the Gaussian mechanism, whose variance is not a pure
/// scale), anchor the schedule floor at the previous run's weakest
/// coordinate, re-run to convergence, recompute the retrievable amount.
RetrievalReport recycle(const FitResult& fit, const Dataset& data,
                        const BoundsCerts& certs, const RegularizerTarget& reg,
                        const PrivacyBudget& budget, int n_e,
                        const SolverConfig& cfg, Rng& rng,
                        RecycleChoice choice);

}  // namespace napp
