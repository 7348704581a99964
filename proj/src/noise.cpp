#include "napp/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace napp {

namespace {

// Uniform direction on the (p-1)-sphere.
Eigen::VectorXd sphere_direction(int p, Rng& rng) {
  Eigen::VectorXd d(p);
  double norm2 = 0;
  do {
    for (int j = 0; j < p; ++j) d(j) = rng.normal();
    norm2 = d.squaredNorm();
  } while (norm2 == 0.0);
  return d / std::sqrt(norm2);
}

// one coordinate of N(0, sigma^2) conditioned on > c; c <= 0 so plain
// rejection accepts at least half the draws
double truncated_normal_coord(double sigma, double c, Rng& rng) {
  for (;;) {
    const double v = sigma * rng.normal();
    if (v > c) return v;
  }
}

constexpr std::uint64_t kMaxRejectionTries = 5'000'000;

}  // namespace

std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::spherical_laplace: return "eps-laplace";
    case Mechanism::gaussian: return "eps-delta-gaussian";
    case Mechanism::truncated_laplace: return "vs-truncated-laplace";
    case Mechanism::truncated_gaussian: return "vs-truncated-gaussian";
  }
  return "?";
}

Mechanism mechanism_from_name(const std::string& name) {
  if (name == "eps-laplace") return Mechanism::spherical_laplace;
  if (name == "eps-delta-gaussian") return Mechanism::gaussian;
  if (name == "vs-truncated-laplace") return Mechanism::truncated_laplace;
  if (name == "vs-truncated-gaussian") return Mechanism::truncated_gaussian;
  throw std::invalid_argument("unknown mechanism: " + name);
}

void PrivacyBudget::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(r > 0 && r < 1)) throw std::invalid_argument("r must be in (0,1)");
  if (delta < 0 || delta >= 1)
    throw std::invalid_argument("delta must be in [0,1)");
  if (delta_eps < 0 ||
      (is_private() && delta_eps > (1.0 - r) * epsilon + 1e-12))
    throw std::invalid_argument("delta_eps outside [0, (1-r) epsilon]");
}

std::string penalty_name(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::ridge: return "ridge";
    case PenaltyKind::bridge: return "bridge";
    case PenaltyKind::elastic_net: return "elastic_net";
  }
  return "?";
}

void RegularizerTarget::validate() const {
  if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (lambda0 < 0) throw std::invalid_argument("lambda0 must be >= 0");
  if (kind == PenaltyKind::bridge && !(gamma >= 0 && gamma < 2))
    throw std::invalid_argument("bridge gamma must be in [0,2)");
  if (kind == PenaltyKind::elastic_net && !(kappa > 0 && kappa < 1))
    throw std::invalid_argument("elastic net kappa must be in (0,1)");
}

RegularizerTarget RegularizerTarget::ridge(double lambda, double lambda0,
                                           bool moor) {
  return {PenaltyKind::ridge, 1.0, 0.5, lambda, lambda0, moor};
}
RegularizerTarget RegularizerTarget::lasso(double lambda, double lambda0,
                                           bool moor) {
  return {PenaltyKind::bridge, 1.0, 0.5, lambda, lambda0, moor};
}
RegularizerTarget RegularizerTarget::bridge(double gamma, double lambda,
                                            double lambda0, bool moor) {
  return {PenaltyKind::bridge, gamma, 0.5, lambda, lambda0, moor};
}
RegularizerTarget RegularizerTarget::elastic_net(double kappa, double lambda,
                                                 double lambda0, bool moor) {
  return {PenaltyKind::elastic_net, 1.0, kappa, lambda, lambda0, moor};
}

NoiseDraw sample_spherical_laplace(int p, double zeta12, double r_eps,
                                   Rng& rng) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (!(zeta12 > 0) || !(r_eps > 0))
    throw std::invalid_argument("zeta12 and r_eps must be > 0");
  NoiseDraw d;
  d.mechanism = Mechanism::spherical_laplace;
  d.scale = zeta12 / r_eps;
  const double radius = rng.gamma(static_cast<double>(p), d.scale);
  d.b = radius * sphere_direction(p, rng);
  return d;
}

double gaussian_dp_sigma(double zeta12, double r_eps, double delta) {
  return std::sqrt(2.0 * zeta12 * zeta12 * (r_eps - std::log(delta)) /
                   (r_eps * r_eps));
}

NoiseDraw sample_gaussian_dp(int p, double zeta12, double r_eps, double delta,
                             Rng& rng) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (!(zeta12 > 0) || !(r_eps > 0))
    throw std::invalid_argument("zeta12 and r_eps must be > 0");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("gaussian mechanism requires delta in (0,1)");
  NoiseDraw d;
  d.mechanism = Mechanism::gaussian;
  d.scale = gaussian_dp_sigma(zeta12, r_eps, delta);
  d.b.resize(p);
  for (int j = 0; j < p; ++j) d.b(j) = d.scale * rng.normal();
  return d;
}

SigmaBound gaussian_sigma_lower_bound(double epsilon, double delta,
                                      double zeta12) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("delta must be in (0,1)");
  const double m2ld = -2.0 * std::log(delta);
  SigmaBound out;
  out.exact =
      zeta12 / epsilon * (std::sqrt(m2ld + epsilon) + std::sqrt(m2ld));
  out.simplified = 2.0 * zeta12 / epsilon * std::sqrt(m2ld + epsilon);
  return out;
}

NoiseDraw sample_truncated(Mechanism mechanism, double c, int p, double zeta12,
                           double r_eps, double delta, Rng& rng) {
  if (c > 0) throw std::invalid_argument("truncation point must be <= 0");

  const bool gaussian = (mechanism == Mechanism::gaussian ||
                         mechanism == Mechanism::truncated_gaussian);
  const Mechanism out_mech =
      gaussian ? Mechanism::truncated_gaussian : Mechanism::truncated_laplace;

  if (std::isinf(c)) {  // untruncated limit
    NoiseDraw d = gaussian
                      ? sample_gaussian_dp(p, zeta12, r_eps, delta, rng)
                      : sample_spherical_laplace(p, zeta12, r_eps, rng);
    d.mechanism = out_mech;
    d.trunc_c = c;
    return d;
  }

  NoiseDraw d;
  d.mechanism = out_mech;
  d.trunc_c = c;

  if (gaussian) {
    // coordinates are independent, so the joint conditioning factorizes
    if (!(delta > 0 && delta < 1))
      throw std::invalid_argument(
          "gaussian mechanism requires delta in (0,1)");
    d.scale = gaussian_dp_sigma(zeta12, r_eps, delta);
    d.b.resize(p);
    for (int j = 0; j < p; ++j)
      d.b(j) = truncated_normal_coord(d.scale, c, rng);
    return d;
  }

  if (c == 0.0) {
    // the density is invariant under coordinate sign flips, so conditioning
    // on the positive orthant equals taking coordinate-wise absolute values
    d = sample_spherical_laplace(p, zeta12, r_eps, rng);
    d.b = d.b.cwiseAbs();
    d.mechanism = out_mech;
    d.trunc_c = 0.0;
    return d;
  }

  std::uint64_t tries = 0;
  for (;;) {
    NoiseDraw cand = sample_spherical_laplace(p, zeta12, r_eps, rng);
    if ((cand.b.array() > c).all()) {
      cand.mechanism = out_mech;
      cand.trunc_c = c;
      return cand;
    }
    if (++tries >= kMaxRejectionTries)
      throw std::runtime_error(
          "infeasible truncation for given p: acceptance rate below 1e-6");
  }
}

Eigen::VectorXd build_dp_rows(const Eigen::VectorXd& b, int n_e, LossFamily f,
                              double e_y) {
  if (n_e < 1) throw std::invalid_argument("n_e must be >= 1");
  const auto [lp0, lpp0] = link_derivatives_at_zero(f, e_y, true);
  (void)lpp0;
  return b / (static_cast<double>(n_e) * lp0);
}

Eigen::VectorXd regularization_variance(const RegularizerTarget& reg,
                                        const Eigen::VectorXd* theta_prev,
                                        int t, double lpp0, int n_e, int p,
                                        double floor_extra) {
  reg.validate();
  if (t < 1) throw std::invalid_argument("iteration index must be >= 1");
  if (!(lpp0 > 0)) throw std::invalid_argument("lpp0 must be > 0");
  if (n_e < 1) throw std::invalid_argument("n_e must be >= 1");
  if (t >= 2 && reg.kind != PenaltyKind::ridge && theta_prev == nullptr)
    throw std::invalid_argument(
        "theta_prev required at t >= 2 for bridge/elastic net");
  if (theta_prev && theta_prev->size() != p)
    throw std::invalid_argument("theta_prev has wrong dimension");

  const double pf = 2.0 / (static_cast<double>(n_e) * lpp0);
  const double floor = std::max(reg.lambda0, floor_extra);
  Eigen::VectorXd v(p);

  auto weight_at = [&](double theta_j) -> double {
    const double a = std::max(std::abs(theta_j), kThetaFloor);
    switch (reg.kind) {
      case PenaltyKind::ridge: return reg.lambda;
      case PenaltyKind::bridge: return reg.lambda * std::pow(a, -reg.gamma);
      case PenaltyKind::elastic_net:
        return reg.lambda / a + reg.lambda * reg.kappa;
    }
    return 0;
  };

  for (int j = 0; j < p; ++j) {
    double m = 0;
    switch (reg.kind) {
      case PenaltyKind::ridge:
        m = std::max(reg.lambda, floor);  // max in both modes (Claim 3)
        break;
      case PenaltyKind::bridge:
        if (t == 1) {
          m = floor;
        } else {
          const double w = weight_at((*theta_prev)(j));
          m = reg.moor ? std::max(w, floor) : w + floor;
        }
        break;
      case PenaltyKind::elastic_net:
        if (t == 1) {
          m = reg.moor ? std::max(reg.lambda * reg.kappa, floor)
                       : reg.lambda * reg.kappa + floor;
        } else {
          const double w = weight_at((*theta_prev)(j));
          m = reg.moor ? std::max(w, floor) : w + floor;
        }
        break;
    }
    v(j) = pf * m;
  }
  return v;
}

Eigen::MatrixXd sample_regularization_noise(const Eigen::VectorXd& variance,
                                            int n_e, Rng& rng) {
  if (n_e < 2 || n_e % 2 != 0)
    throw std::invalid_argument("n_e must be a positive even number");
  if ((variance.array() < 0).any())
    throw std::invalid_argument("variances must be nonnegative");

  const int p = static_cast<int>(variance.size());
  const int half = n_e / 2;
  const Eigen::VectorXd sd = variance.cwiseSqrt();

  Eigen::MatrixXd e(n_e, p);
  for (int i = 0; i < half; ++i)
    for (int j = 0; j < p; ++j) e(i, j) = sd(j) * rng.normal();
  e.bottomRows(half) = -e.topRows(half);
  return e;
}

}  // namespace napp
