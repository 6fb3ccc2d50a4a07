#pragma once

#include <string>
#include <string_view>

#include "fdgcl/types.hpp"

namespace fdgcl::losses {

struct LossValueGrad {
  double value = 0.0;
  Matrix grad1;  // dL/dZ1
  Matrix grad2;  // dL/dZ2
  /// eta |<c1, c2>| for the regularized loss, 0 otherwise.
  double regularizer = 0.0;
};

struct DominantDirection {
  Vector direction;      // unit norm, largest-magnitude entry positive
  double rayleigh = 0.0; // variance explained along `direction`
  int iterations = 0;
  bool converged = false;
};

LossValueGrad euclidean(const Matrix& z1, const Matrix& z2);
/// 1 - mean rowwise cosine. Throws ZeroRowError naming the first zero row.
LossValueGrad cosmean(const Matrix& z1, const Matrix& z2);
/// Cross-correlation of column-standardized views (population variance).
/// Throws DegenerateColumnError on a zero-variance column.
LossValueGrad barlow_twins(const Matrix& z1, const Matrix& z2, double lambda_bt);
/// eta1 * invariance + eta2 * variance hinge + eta3 * covariance.
LossValueGrad vicreg(const Matrix& z1, const Matrix& z2, double eta1, double eta2, double eta3,
                     double eps);

/// Top principal axis of the column-centered covariance Zc^T Zc / N by power
/// iteration (at most 200 iterations, stop when successive directions differ
/// by less than 1e-8 rad). Throws DegenerateError on constant input.
DominantDirection dominant_direction(const Matrix& z);

enum class RegGradient {
  /// Differentiate through c1, c2 by first-order eigenvector perturbation.
  full,
  /// Treat c1, c2 as constants of the step; gradients equal cosmean's.
  stop,
};

/// cosmean + eta |<c1, c2>| with c_l the dominant directions of Z_l.
LossValueGrad regularized_cosmean(const Matrix& z1, const Matrix& z2, double eta,
                                  RegGradient mode = RegGradient::full);

/// |<c1, c2>| between the dominant directions of the two views.
double view_alignment(const Matrix& z1, const Matrix& z2);

enum class LossKind { euclidean, cosmean, barlow, vicreg, reg_cosmean };

LossKind parse_loss(std::string_view name);
std::string to_string(LossKind kind);
RegGradient parse_reg_gradient(std::string_view name);
std::string to_string(RegGradient mode);

struct LossOptions {
  double eta = 0.15;
  RegGradient reg_gradient = RegGradient::full;
  double lambda_bt = 0.0051;
  double vicreg_inv = 25.0;
  double vicreg_var = 25.0;
  double vicreg_cov = 1.0;
  double vicreg_eps = 1.0;
};

LossValueGrad compute(LossKind kind, const Matrix& z1, const Matrix& z2,
                      const LossOptions& options = {});

}  // namespace fdgcl::losses
