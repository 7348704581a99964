#include "napp/lasso.hpp"

#include <cmath>
#include <stdexcept>

namespace napp {

namespace {
double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}
}  // namespace

Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         double lambda, double tol, int max_sweeps) {
  if (X.rows() != y.size())
    throw std::invalid_argument("lasso_cd: X/y dimension mismatch");
  if (lambda < 0) throw std::invalid_argument("lasso_cd: lambda must be >= 0");

  const Eigen::Index p = X.cols();
  const Eigen::VectorXd col_sq = X.colwise().squaredNorm();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = y;  // y - X theta

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_delta = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double old = theta(j);
      const double rho = X.col(j).dot(resid) + col_sq(j) * old;
      const double next = soft_threshold(rho, lambda) / col_sq(j);
      if (next != old) {
        resid -= (next - old) * X.col(j);
        theta(j) = next;
        max_delta = std::max(max_delta, std::abs(next - old));
      }
    }
    if (max_delta < tol) break;
  }
  return theta;
}

Eigen::VectorXd ridge_closed_form(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index p = X.cols();
  const Eigen::MatrixXd A =
      X.transpose() * X + 2.0 * lambda * Eigen::MatrixXd::Identity(p, p);
  return A.ldlt().solve(X.transpose() * y);
}

namespace {

double smooth_loss(const Dataset& d, const Eigen::VectorXd& theta,
                   Eigen::VectorXd* grad) {
  const Eigen::VectorXd eta = d.X * theta;
  double total = 0;
  Eigen::VectorXd g1(d.n());
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    total += loss_value(d.family, eta(i), d.y(i));
    if (grad) g1(i) = loss_d1(d.family, eta(i), d.y(i));
  }
  if (grad) *grad = d.X.transpose() * g1;
  return total;
}

Eigen::VectorXd soft_threshold_vec(const Eigen::VectorXd& z, double t) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) out(j) = soft_threshold(z(j), t);
  return out;
}

}  // namespace

Eigen::VectorXd glm_lasso(const Dataset& data, double lambda, double tol,
                          int max_iters) {
  if (data.family == LossFamily::linear)
    return lasso_cd(data.X, data.y, lambda, tol);

  const Eigen::Index p = data.p();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd momentum = theta;
  double t_accel = 1.0;

  // initial Lipschitz guess from the Hessian bound at theta = 0
  double lip = 0.25 * data.X.squaredNorm();
  if (data.family == LossFamily::poisson) lip = data.X.squaredNorm();
  lip = std::max(lip, 1e-8);

  Eigen::VectorXd grad(p);
  for (int it = 0; it < max_iters; ++it) {
    const double f_mom = smooth_loss(data, momentum, &grad);
    Eigen::VectorXd next;
    // backtracking on the quadratic majorization
    for (int bt = 0; bt < 60; ++bt) {
      next = soft_threshold_vec(momentum - grad / lip, lambda / lip);
      const Eigen::VectorXd diff = next - momentum;
      const double quad =
          f_mom + grad.dot(diff) + 0.5 * lip * diff.squaredNorm();
      double f_next;
      try {
        f_next = smooth_loss(data, next, nullptr);
      } catch (const std::domain_error&) {
        f_next = std::numeric_limits<double>::infinity();
      }
      if (f_next <= quad + 1e-12 * std::abs(quad)) break;
      lip *= 2.0;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_accel * t_accel));
    momentum = next + ((t_accel - 1.0) / t_next) * (next - theta);
    const double delta = (next - theta).lpNorm<Eigen::Infinity>();
    theta = next;
    t_accel = t_next;
    if (delta < tol) break;
  }
  return theta;
}

}  // namespace napp
