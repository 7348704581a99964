#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "napp/glm.hpp"

// Independent oracles and statistics used by the test suites. Nothing here
// shares code with the library paths under test.
namespace oracle {

// central finite differences of f at x
inline Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd hi = x, lo = x;
    hi(j) += h;
    lo(j) -= h;
    g(j) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// regularized lower incomplete gamma P(a, x), series + continued fraction
inline double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p domain");
  if (x == 0) return 0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

inline double gamma_cdf(double x, double shape, double scale) {
  if (x <= 0) return 0;
  return gamma_p(shape, x / scale);
}

inline double normal_cdf(double x, double mean = 0, double sd = 1) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// asymptotic Kolmogorov distribution tail Q(lambda)
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term =
        2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

// one-sample KS p-value against a fully specified CDF
inline double ks_test(std::vector<double> sample,
                      const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - (i + 1) / n));
    d = std::max(d, std::abs(f - i / n));
  }
  const double en = std::sqrt(n);
  return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

// two-sample KS p-value
inline double ks_test_two_sample(std::vector<double> a,
                                 std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

inline double sd(const std::vector<double>& v) { return std::sqrt(variance(v)); }

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// textbook IRLS for unpenalized GLM maximum likelihood
inline Eigen::VectorXd irls_fit(napp::LossFamily family,
                                const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y, int max_iter = 200,
                                double tol = 1e-12) {
  using napp::LossFamily;
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      switch (family) {
        case LossFamily::linear:
          mu(i) = eta(i);
          w(i) = 1.0;
          break;
        case LossFamily::logistic: {
          const double s = 1.0 / (1.0 + std::exp(-eta(i)));
          mu(i) = s;
          w(i) = std::max(s * (1.0 - s), 1e-12);
          break;
        }
        case LossFamily::poisson:
          mu(i) = std::exp(eta(i));
          w(i) = std::max(mu(i), 1e-12);
          break;
      }
    }
    const Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(w);
    const Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
    const Eigen::VectorXd beta_new =
        xtwx.ldlt().solve(X.transpose() * w.asDiagonal() * z);
    if ((beta_new - beta).norm() < tol) return beta_new;
    beta = beta_new;
  }
  return beta;
}

}  // namespace oracle
