#include "napp/glm.hpp"

#include <cmath>
#include <stdexcept>

namespace napp {

namespace {

constexpr double kEtaOverflow = 700.0;  // exp() overflows shortly after

// log(1 + exp(eta)) without overflow
double log1pexp(double eta) {
  if (eta > 0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

std::string family_name(LossFamily f) {
  switch (f) {
    case LossFamily::linear: return "linear";
    case LossFamily::logistic: return "logistic";
    case LossFamily::poisson: return "poisson";
  }
  return "?";
}

LossFamily family_from_name(const std::string& name) {
  if (name == "linear") return LossFamily::linear;
  if (name == "logistic") return LossFamily::logistic;
  if (name == "poisson") return LossFamily::poisson;
  throw std::invalid_argument("unknown loss family: " + name);
}

double loss_value(LossFamily f, double eta, double y) {
  switch (f) {
    case LossFamily::linear: {
      const double r = y - eta;
      return 0.5 * r * r;
    }
    case LossFamily::logistic:
      return log1pexp(eta) - y * eta;
    case LossFamily::poisson:
      if (eta > kEtaOverflow)
        throw std::domain_error(
            "poisson predictor out of certified range: exp(eta) overflows");
      return std::exp(eta) - y * eta;
  }
  return 0;
}

double loss_d1(LossFamily f, double eta, double y) {
  switch (f) {
    case LossFamily::linear: return eta - y;
    case LossFamily::logistic: return sigmoid(eta) - y;
    case LossFamily::poisson:
      if (eta > kEtaOverflow)
        throw std::domain_error(
            "poisson predictor out of certified range: exp(eta) overflows");
      return std::exp(eta) - y;
  }
  return 0;
}

double loss_d2(LossFamily f, double eta, double /*y*/) {
  switch (f) {
    case LossFamily::linear: return 1.0;
    case LossFamily::logistic: {
      const double s = sigmoid(eta);
      return s * (1.0 - s);
    }
    case LossFamily::poisson:
      if (eta > kEtaOverflow)
        throw std::domain_error(
            "poisson predictor out of certified range: exp(eta) overflows");
      return std::exp(eta);
  }
  return 0;
}

LossEval evaluate_loss(LossFamily f, const Eigen::VectorXd& theta,
                       const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.cols() != theta.size())
    throw std::invalid_argument("evaluate_loss: theta/X dimension mismatch");
  if (X.rows() != y.size())
    throw std::invalid_argument("evaluate_loss: X/y dimension mismatch");

  const Eigen::Index n = X.rows(), p = X.cols();
  const Eigen::VectorXd eta = X * theta;

  LossEval out;
  out.grad = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.value += loss_value(f, eta(i), y(i));
    w(i) = loss_d2(f, eta(i), y(i));
  }
  Eigen::VectorXd g1(n);
  for (Eigen::Index i = 0; i < n; ++i) g1(i) = loss_d1(f, eta(i), y(i));
  out.grad = X.transpose() * g1;
  out.hess = X.transpose() * w.asDiagonal() * X;
  return out;
}

LossEval evaluate_loss(const Dataset& data, const Eigen::VectorXd& theta) {
  return evaluate_loss(data.family, theta, data.X, data.y);
}

std::pair<double, double> link_derivatives_at_zero(LossFamily f, double e_y,
                                                   bool for_dp_rows) {
  double lp0 = 0, lpp0 = 0;
  switch (f) {
    case LossFamily::linear:
      lp0 = -e_y;
      lpp0 = 1.0;
      break;
    case LossFamily::logistic:
      lp0 = 0.5 - e_y;
      lpp0 = 0.25;
      break;
    case LossFamily::poisson:
      lp0 = 1.0 - e_y;
      lpp0 = 1.0;
      break;
  }
  if (for_dp_rows && lp0 == 0.0)
    throw std::invalid_argument(
        "pseudo-outcome incompatible with DP rows: l'(0) = 0");
  return {lp0, lpp0};
}

double dp_pseudo_outcome(LossFamily f) {
  switch (f) {
    case LossFamily::linear: return -1.0;   // l'(0) = 1
    case LossFamily::logistic: return 0.0;  // l'(0) = 1/2
    case LossFamily::poisson: return 0.0;   // l'(0) = 1
  }
  return 0;
}

void validate_outcomes(const Dataset& data) {
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    const double yi = data.y(i);
    if (!std::isfinite(yi))
      throw std::invalid_argument("outcome not finite at row " +
                                  std::to_string(i));
    switch (data.family) {
      case LossFamily::linear:
        break;
      case LossFamily::logistic:
        if (yi != 0.0 && yi != 1.0)
          throw std::invalid_argument("logistic outcome must be 0/1, row " +
                                      std::to_string(i));
        break;
      case LossFamily::poisson:
        if (yi < 0.0 || yi != std::floor(yi))
          throw std::invalid_argument(
              "poisson outcome must be a nonnegative integer, row " +
              std::to_string(i));
        break;
    }
  }
}

BoundsCerts certify_bounds(const Dataset& data, const OutcomeBounds& declared) {
  if (data.n() < 1 || data.p() < 1)
    throw std::invalid_argument("certify_bounds: empty dataset");
  validate_outcomes(data);

  BoundsCerts c;
  c.zeta1 = data.X.rowwise().norm().maxCoeff();
  if (c.zeta1 <= 0.0)
    throw std::invalid_argument("certify_bounds: all-zero design matrix");

  switch (data.family) {
    case LossFamily::logistic:
      // |sigma(eta) - y| <= 1, l'' <= 1/4
      c.zeta2 = c.zeta1;
      c.zeta3 = c.zeta1 * c.zeta1 / 4.0;
      break;
    case LossFamily::linear: {
      if (!declared.residual_bound)
        throw std::invalid_argument(
            "bounds not certifiable: linear family needs a declared "
            "|y - eta| bound");
      const double rho = *declared.residual_bound;
      if (rho <= 0) throw std::invalid_argument("residual bound must be > 0");
      c.zeta2 = c.zeta1 * rho;
      c.zeta3 = c.zeta1 * c.zeta1;
      break;
    }
    case LossFamily::poisson: {
      if (!declared.y_max || !declared.eta_max)
        throw std::invalid_argument(
            "bounds not certifiable: poisson family needs declared y_max and "
            "eta_max");
      const double ym = *declared.y_max, em = *declared.eta_max;
      if (ym <= 0 || em <= 0)
        throw std::invalid_argument("poisson bounds must be > 0");
      c.zeta2 = c.zeta1 * std::max(std::exp(em), ym);
      c.zeta3 = c.zeta1 * c.zeta1 * std::exp(em);
      break;
    }
  }
  return c;
}

ScaledDataset scale_features(const Dataset& data, double target_zeta1) {
  if (target_zeta1 <= 0)
    throw std::invalid_argument("scale_features: target_zeta1 must be > 0");
  ScaledDataset out;
  out.data = data;
  out.row_scale = Eigen::VectorXd::Ones(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double norm = data.X.row(i).norm();
    if (norm > target_zeta1) {
      const double f = target_zeta1 / norm;
      out.data.X.row(i) *= f;
      out.row_scale(i) = f;
    }
  }
  return out;
}

}  // namespace napp
