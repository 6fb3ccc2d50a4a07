#pragma once

namespace fdgcl::special {

/// Arguments of the one-parameter Mittag-Leffler relaxation e_alpha(lam, t)
/// = E_alpha(-lam * t^alpha).
struct MLParams {
  double alpha = 1.0;  // (0, 1]
  double lam = 0.0;    // >= 0
  double t = 0.0;      // >= 0
};

/// Gamma function for x > 0. Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula below 1/2. Throws DomainError for x <= 0.
double gamma(double x);

/// 1 / Gamma(x) for any real x; zero at the poles 0, -1, -2, ...
double reciprocal_gamma(double x);

/// e_alpha(lam, t) = sum_n (-1)^n lam^n t^(alpha n) / Gamma(alpha n + 1).
///
/// Three regimes keyed on s = (lam t^alpha)^(1/alpha), the exponent that
/// controls cancellation in the Maclaurin series:
///   s <= 12   compensated series in extended precision,
///   large s   optimally truncated (alternating) asymptotic expansion,
///   between   Laplace-type integral representation by double-exponential
///             quadrature.
/// The result is clamped to [0, 1]. Throws DomainError on invalid
/// parameters and ConvergenceError if no regime reaches 1e-9.
double mittag_leffler(const MLParams& p);

/// Positive-coefficient expansion sum_{j=1}^{n} t^(-j alpha) /
/// (lam^j Gamma(1 - j alpha)) used in the amplification estimates. Requires
/// lam > 0, t > 0 and n_terms * alpha < 1.
double ml_asymptotic(const MLParams& p, int n_terms);

/// The unique n >= 1 with n alpha < 1 <= (n + 1) alpha, for 0 < alpha < 1.
int order_index(double alpha);

}  // namespace fdgcl::special
