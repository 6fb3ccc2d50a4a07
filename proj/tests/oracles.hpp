#pragma once

// Reference computations used by the unit and acceptance tests. None of
// these share code with the library.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

/// E_alpha(-x) by its Maclaurin series in 50-digit arithmetic. Only
/// trustworthy while x^(1/alpha) stays below ~60.
inline double ml_series(double alpha, double x) {
  const mp mx(x);
  const mp ma(alpha);
  mp sum = 0;
  mp power = 1;
  for (int n = 0; n < 20000; ++n) {
    const mp term = power / boost::math::tgamma(ma * n + 1);
    sum += (n % 2 == 0) ? term : mp(-term);
    if (n > 10 && term < mp(1e-30) && term * mx < mp(1e-30)) break;
    power *= mx;
  }
  return static_cast<double>(sum);
}

/// E_alpha(-lam t^alpha) for 0 < alpha < 1 from the Laplace representation
/// after substituting u = r^alpha:
///   (lam sin(alpha pi) / (alpha pi)) int_0^inf exp(-t u^(1/alpha)) /
///   (u^2 + 2 lam u cos(alpha pi) + lam^2) du.
inline double ml_quadrature(double alpha, double lam, double t) {
  const double pi = 3.14159265358979323846;
  const double c = std::cos(alpha * pi);
  auto f = [&](double u) {
    return std::exp(-t * std::pow(u, 1.0 / alpha)) / (u * u + 2.0 * lam * u * c + lam * lam);
  };
  double err = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-13, &err);
  return lam * std::sin(alpha * pi) / (alpha * pi) * integral;
}

/// Memory weights (k+1)^a - k^a.
inline std::vector<double> weights(double alpha, int n) {
  std::vector<double> b(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) b[k] = std::pow(k + 1.0, alpha) - std::pow(double(k), alpha);
  return b;
}

/// Scalar fractional Euler for D^alpha y = -lam y, y(0) = 1, over one segment
/// of `steps` steps. `implicit` evaluates the right-hand side at the new node.
inline double scalar_segment(double alpha, double lam, double h, int steps, bool implicit) {
  const double c = std::pow(h, alpha) / std::tgamma(alpha + 1.0);
  const auto b = weights(alpha, steps + 1);
  std::vector<double> y{1.0};
  for (int n = 0; n < steps; ++n) {
    double next;
    if (!implicit) {
      double s = 0.0;
      for (int j = 0; j <= n; ++j) s += b[n - j] * (-lam * y[j]);
      next = 1.0 + c * s;
    } else {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += b[n - j] * (-lam * y[j + 1]);
      next = (1.0 + c * s) / (1.0 + c * b[0] * lam);
    }
    y.push_back(next);
  }
  return y.back();
}

/// sum_{k=0}^{m} e^k: the amplification of a mode after m skip segments.
inline double geometric(double e, int m) {
  double s = 0.0, p = 1.0;
  for (int k = 0; k <= m; ++k) {
    s += p;
    p *= e;
  }
  return s;
}

/// Central-difference gradient of f at x (every entry perturbed).
inline Eigen::MatrixXd fd_gradient(const std::function<double(const Eigen::MatrixXd&)>& f,
                                   const Eigen::MatrixXd& x, double step) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  Eigen::MatrixXd y = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      y(i, j) = x(i, j) + step;
      const double up = f(y);
      y(i, j) = x(i, j) - step;
      const double down = f(y);
      y(i, j) = x(i, j);
      g(i, j) = (up - down) / (2.0 * step);
    }
  return g;
}

inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

/// Dense GCN normalization of an adjacency matrix: D^-1/2 (A + I) D^-1/2.
inline Eigen::MatrixXd gcn_normalize(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd at = a + Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::VectorXd d = at.rowwise().sum().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * at * d.asDiagonal();
}

}  // namespace oracle
