#pragma once

#include <Eigen/Dense>

#include "napp/glm.hpp"

namespace napp {

/// Coordinate descent for 0.5 ||y - X theta||^2 + lambda ||theta||_1.
/// The penalty is unnormalized to match the ERM objective, where the tuning
/// parameter multiplies the raw regularizer inside n^-1 (...).
Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         double lambda, double tol = 1e-10,
                         int max_sweeps = 10000);

/// Closed-form minimizer of 0.5 ||y - X theta||^2 + lambda ||theta||_2^2.
Eigen::VectorXd ridge_closed_form(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, double lambda);

/// Proximal gradient (FISTA with backtracking) for
/// sum_i l(theta|d_i) + lambda ||theta||_1, any loss family. Dispatches to
/// lasso_cd for the linear family.
Eigen::VectorXd glm_lasso(const Dataset& data, double lambda,
                          double tol = 1e-9, int max_iters = 20000);

}  // namespace napp
