#include "napp/budget.hpp"

#include <cmath>
#include <stdexcept>

namespace napp {

std::string recycle_choice_name(RecycleChoice c) {
  return c == RecycleChoice::return_budget ? "return" : "recycle";
}

RecycleChoice recycle_choice_from_name(const std::string& name) {
  if (name == "return") return RecycleChoice::return_budget;
  if (name == "recycle") return RecycleChoice::recycle;
  throw std::invalid_argument("choice must be return or recycle");
}

double retrievable_budget(double lambda0, double v_min, int n_e, double lpp0,
                          double r, double epsilon) {
  if (!(lambda0 > 0) || !(v_min > 0) || n_e < 1 || !(lpp0 > 0) ||
      !(r > 0 && r < 1) || !(epsilon > 0))
    throw std::invalid_argument("retrievable_budget: inputs must be positive");
  const double modulus = static_cast<double>(n_e) * lpp0 * v_min;
  return std::max(0.0, (1.0 - r) * epsilon * (1.0 - lambda0 / modulus));
}

namespace {

// the coordinate whose schedule weight anchors the new floor (Eq of the
// recycle update); lowest index wins ties
double anchor_floor(const RegularizerTarget& reg,
                    const Eigen::VectorXd& v_schedule,
                    const Eigen::VectorXd& theta) {
  Eigen::Index j_star = 0;
  v_schedule.minCoeff(&j_star);
  const double a = std::max(std::abs(theta(j_star)), kThetaFloor);
  switch (reg.kind) {
    case PenaltyKind::ridge: return 0.0;
    case PenaltyKind::bridge: return reg.lambda * std::pow(a, -reg.gamma);
    case PenaltyKind::elastic_net:
      return reg.lambda / a + reg.lambda * reg.kappa;
  }
  return 0.0;
}

Eigen::VectorXd rescaled_dp_rows(const FitResult& fit,
                                 const BoundsCerts& certs,
                                 const PrivacyBudget& budget, double dcum,
                                 int round, Rng& rng, NoiseRecord* rec) {
  const double re = budget.r_eps();
  const bool gaussian = (fit.noise.mechanism == Mechanism::gaussian ||
                         fit.noise.mechanism == Mechanism::truncated_gaussian);
  if (!gaussian) {
    // scale family: b (r eps) / (r eps + dcum) is distributed exactly as the
    // mechanism at budget r eps + dcum
    const double factor = re / (re + dcum);
    rec->b = fit.noise.b * factor;
    rec->scale = fit.noise.scale * factor;
    return fit.noise.e_star_base * factor;
  }
  // Gaussian variance is not a pure scale in r eps; redraw at the new budget
  Rng round_rng = rng.substream(0x1EC,
                                static_cast<std::uint64_t>(round));
  NoiseDraw draw;
  const bool truncated = fit.noise.mechanism == Mechanism::truncated_gaussian;
  if (truncated) {
    draw = sample_truncated(Mechanism::gaussian, fit.noise.trunc_c,
                            static_cast<int>(fit.noise.b.size()),
                            certs.zeta12(), re + dcum, budget.delta,
                            round_rng);
  } else {
    draw = sample_gaussian_dp(static_cast<int>(fit.noise.b.size()),
                              certs.zeta12(), re + dcum, budget.delta,
                              round_rng);
  }
  rec->b = draw.b;
  rec->scale = draw.scale;
  return draw.b / (static_cast<double>(fit.n_e) * fit.lp0);
}

}  // namespace

RetrievalReport recycle(const FitResult& fit, const Dataset& data,
                        const BoundsCerts& certs, const RegularizerTarget& reg,
                        const PrivacyBudget& budget, int n_e,
                        const SolverConfig& cfg, Rng& rng,
                        RecycleChoice choice) {
  if (!fit.converged)
    throw std::invalid_argument("budget retrieval requires a converged fit");
  if (!budget.is_private())
    throw std::invalid_argument("budget retrieval requires finite epsilon");

  RetrievalReport report;
  report.choice = choice;
  report.final_theta = fit.theta_hat;

  double lambda0 = reg.lambda0;
  double d_eps = retrievable_budget(lambda0, fit.v_min(), n_e, fit.lpp0,
                                    budget.r, budget.epsilon);

  const double base_norm = fit.noise.e_star_base.norm();

  if (choice == RecycleChoice::return_budget) {
    report.rounds.push_back({d_eps, lambda0, lambda0, base_norm, 0, true});
    report.delta_eps_cumulative = d_eps;
    return report;
  }

  if (d_eps <= 0.0) {
    report.rounds.push_back({0.0, lambda0, lambda0, base_norm, 0, true});
    return report;
  }

  constexpr int kMaxRounds = 16;
  double dcum = 0;
  FitResult current = fit;
  NoiseRecord noise = fit.noise;

  for (int round = 1; d_eps > 0.0 && round <= kMaxRounds; ++round) {
    dcum += d_eps;

    RetrievalRound round_rec;
    round_rec.delta_eps = d_eps;
    round_rec.lambda0_before = lambda0;

    const Eigen::VectorXd e_star =
        rescaled_dp_rows(fit, certs, budget, dcum, round, rng, &noise);
    round_rec.e_star_norm = e_star.norm();
    const double extra =
        anchor_floor(reg, current.v_final, current.theta_hat);

    PrivacyBudget updated = budget;
    updated.delta_eps = dcum;

    Rng refit_rng = rng.substream(0x1EF17, static_cast<std::uint64_t>(round));
    FitResult rerun =
        napp_refit(data, certs, reg, updated, n_e, cfg, e_star, noise,
                   current.theta_hat, extra, refit_rng);
    round_rec.iterations = rerun.iterations_used;
    round_rec.converged = rerun.converged;

    if (!rerun.converged) {
      round_rec.lambda0_after = lambda0;
      report.rounds.push_back(round_rec);
      report.warning_nonconverged = true;
      break;
    }

    current = rerun;
    const double modulus =
        static_cast<double>(n_e) * current.lpp0 * current.v_min();
    const double lambda0_old = lambda0;
    lambda0 = modulus;
    round_rec.lambda0_after = lambda0;
    report.rounds.push_back(round_rec);

    const double remaining = (1.0 - budget.r) * budget.epsilon - dcum;
    d_eps = std::max(
        0.0, remaining * (1.0 - std::max(lambda0_old, lambda0) / modulus));
  }

  report.delta_eps_cumulative = dcum;
  report.final_theta = current.theta_hat;
  return report;
}

}  // namespace napp
