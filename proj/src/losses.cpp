#include "fdgcl/losses.hpp"

#include <cmath>
#include <sstream>

#include "fdgcl/errors.hpp"

namespace fdgcl::losses {
namespace {

constexpr int kPowerMaxIter = 200;
constexpr double kPowerAngleTol = 1e-8;

void require_same_shape(const Matrix& z1, const Matrix& z2) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    std::ostringstream os;
    os << "views have different shapes (" << z1.rows() << "x" << z1.cols() << " vs "
       << z2.rows() << "x" << z2.cols() << ")";
    throw ShapeError(os.str());
  }
  if (z1.rows() < 1) throw ShapeError("views must have at least one row");
}

Matrix centered(const Matrix& z) { return z.rowwise() - z.colwise().mean(); }

// Backprop through column standardization x_hat = (x - mu) / sigma.
Matrix standardize_backward(const Matrix& x_hat, const Vector& sigma, const Matrix& g_hat) {
  const Eigen::RowVectorXd mean_g = g_hat.colwise().mean();
  const Eigen::RowVectorXd mean_gx = (g_hat.array() * x_hat.array()).colwise().mean();
  Matrix g = g_hat.rowwise() - mean_g;
  g -= (x_hat.array().rowwise() * mean_gx.array()).matrix();
  return g.array().rowwise() / sigma.transpose().array();
}

struct Standardized {
  Matrix value;
  Vector sigma;
};

Standardized standardize(const Matrix& z, const char* view) {
  const Index n = z.rows();
  Standardized s;
  const Matrix zc = centered(z);
  s.sigma = (zc.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
  const Eigen::RowVectorXd mean = z.colwise().mean();
  for (Index j = 0; j < z.cols(); ++j) {
    const double scale = 1.0 + std::fabs(mean[j]);
    if (!(s.sigma[j] > 1e-12 * scale)) {
      std::ostringstream os;
      os << "column " << j << " of " << view << " has zero variance";
      throw DegenerateColumnError(os.str());
    }
  }
  s.value = zc.array().rowwise() / s.sigma.transpose().array();
  return s;
}

// Solves (lam I - S) w = b for w orthogonal to c, with S = zc^T zc / n applied
// implicitly. Conjugate gradients on the deflated (positive definite) system.
Vector deflated_solve(const Matrix& zc, const Vector& c, double lam, const Vector& b) {
  const double n = static_cast<double>(zc.rows());
  auto project = [&](Vector v) { return Vector(v - c.dot(v) * c); };
  auto apply = [&](const Vector& v) {
    Vector sv = zc.transpose() * (zc * v) / n;
    return project(lam * v - sv);
  };
  Vector rhs = project(b);
  Vector x = Vector::Zero(c.size());
  Vector r = rhs;
  Vector p = r;
  double rr = r.squaredNorm();
  const double stop = 1e-24 * std::max(rhs.squaredNorm(), 1e-300);
  const int max_iter = std::max<int>(50, 2 * static_cast<int>(c.size()));
  for (int it = 0; it < max_iter && rr > stop; ++it) {
    const Vector ap = apply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double step = rr / pap;
    x += step * p;
    r -= step * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return project(x);
}

// Gradient of <c, other> w.r.t. Z where c is the dominant direction of Z.
Matrix direction_inner_grad(const Matrix& z, const DominantDirection& dir, const Vector& other) {
  const Matrix zc = centered(z);
  const Vector w = deflated_solve(zc, dir.direction, dir.rayleigh, other);
  const double n = static_cast<double>(z.rows());
  // (2 / n) zc sym(w c^T)
  return ((zc * w) * dir.direction.transpose() + (zc * dir.direction) * w.transpose()) / n;
}

}  // namespace

LossValueGrad euclidean(const Matrix& z1, const Matrix& z2) {
  require_same_shape(z1, z2);
  const double n = static_cast<double>(z1.rows());
  const Matrix diff = z1 - z2;
  LossValueGrad out;
  out.value = diff.squaredNorm() / n;
  out.grad1 = 2.0 * diff / n;
  out.grad2 = -out.grad1;
  return out;
}

LossValueGrad cosmean(const Matrix& z1, const Matrix& z2) {
  require_same_shape(z1, z2);
  const Index n = z1.rows();
  LossValueGrad out;
  out.grad1.resize(z1.rows(), z1.cols());
  out.grad2.resize(z2.rows(), z2.cols());
  double cos_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double n1 = z1.row(i).norm();
    const double n2 = z2.row(i).norm();
    if (n1 == 0.0 || n2 == 0.0) {
      std::ostringstream os;
      os << "row " << i << " of view " << (n1 == 0.0 ? 1 : 2) << " is zero";
      throw ZeroRowError(os.str());
    }
    const double cosine = z1.row(i).dot(z2.row(i)) / (n1 * n2);
    cos_sum += cosine;
    out.grad1.row(i) = -(z2.row(i) / (n1 * n2) - cosine * z1.row(i) / (n1 * n1)) / n;
    out.grad2.row(i) = -(z1.row(i) / (n1 * n2) - cosine * z2.row(i) / (n2 * n2)) / n;
  }
  out.value = 1.0 - cos_sum / static_cast<double>(n);
  return out;
}

LossValueGrad barlow_twins(const Matrix& z1, const Matrix& z2, double lambda_bt) {
  require_same_shape(z1, z2);
  if (z1.rows() < 2) throw ShapeError("Barlow Twins needs at least two rows");
  if (lambda_bt < 0.0) throw ConfigError("lambda_bt must be non-negative");
  const double n = static_cast<double>(z1.rows());
  const Standardized s1 = standardize(z1, "view 1");
  const Standardized s2 = standardize(z2, "view 2");
  const Matrix c = s1.value.transpose() * s2.value / n;

  Matrix dc = 2.0 * lambda_bt * c;
  double value = 0.0;
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = 0; j < c.cols(); ++j) {
      if (i == j) {
        value += (1.0 - c(i, i)) * (1.0 - c(i, i));
        dc(i, i) = -2.0 * (1.0 - c(i, i));
      } else {
        value += lambda_bt * c(i, j) * c(i, j);
      }
    }
  }
  LossValueGrad out;
  out.value = value;
  out.grad1 = standardize_backward(s1.value, s1.sigma, s2.value * dc.transpose() / n);
  out.grad2 = standardize_backward(s2.value, s2.sigma, s1.value * dc / n);
  return out;
}

LossValueGrad vicreg(const Matrix& z1, const Matrix& z2, double eta1, double eta2, double eta3,
                     double eps) {
  require_same_shape(z1, z2);
  if (z1.rows() < 2) throw ShapeError("VICReg needs at least two rows");
  const double n = static_cast<double>(z1.rows());
  const double d = static_cast<double>(z1.cols());

  LossValueGrad out;
  const Matrix diff = z1 - z2;
  double value = eta1 * diff.squaredNorm() / n;
  out.grad1 = eta1 * 2.0 * diff / n;
  out.grad2 = -out.grad1;

  auto add_view_terms = [&](const Matrix& z, Matrix& grad) {
    const Matrix zc = centered(z);
    const Vector var = (zc.colwise().squaredNorm() / n).transpose();
    for (Index j = 0; j < z.cols(); ++j) {
      const double sd = std::sqrt(var[j]);
      const double hinge = eps - sd;
      if (hinge > 0.0) {
        value += eta2 * hinge / d;
        // d sd / dz_ij = (z_ij - mu_j) / (n sd); zero when the column is constant.
        if (sd > 0.0) grad.col(j) -= eta2 / d * zc.col(j) / (n * sd);
      }
    }
    Matrix cov = zc.transpose() * zc / n;
    cov.diagonal().setZero();
    value += eta3 * cov.squaredNorm() / d;
    grad += eta3 / d * 4.0 * zc * cov / n;
  };
  add_view_terms(z1, out.grad1);
  add_view_terms(z2, out.grad2);
  out.value = value;
  return out;
}

DominantDirection dominant_direction(const Matrix& z) {
  if (z.rows() < 2) throw DegenerateError("dominant direction needs at least two rows");
  const double n = static_cast<double>(z.rows());
  const Matrix zc = centered(z);
  const Vector variances = (zc.colwise().squaredNorm() / n).transpose();
  Index start = 0;
  const double top = variances.maxCoeff(&start);
  if (!(top > 0.0)) throw DegenerateError("all columns are constant");

  auto apply = [&](const Vector& v) { return Vector(zc.transpose() * (zc * v) / n); };

  DominantDirection out;
  Vector v = apply(Vector::Unit(z.cols(), start));
  v.normalize();
  for (int it = 1; it <= kPowerMaxIter; ++it) {
    Vector next = apply(v);
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    const double sign = next.dot(v) >= 0.0 ? 1.0 : -1.0;
    const double change = (next - sign * v).norm();
    v = sign * next;
    out.iterations = it;
    if (change < kPowerAngleTol) {
      out.converged = true;
      break;
    }
  }
  Index big = 0;
  v.cwiseAbs().maxCoeff(&big);
  if (v[big] < 0.0) v = -v;
  out.direction = v;
  out.rayleigh = std::max(0.0, v.dot(apply(v)));
  return out;
}

double view_alignment(const Matrix& z1, const Matrix& z2) {
  return std::fabs(dominant_direction(z1).direction.dot(dominant_direction(z2).direction));
}

LossValueGrad regularized_cosmean(const Matrix& z1, const Matrix& z2, double eta,
                                  RegGradient mode) {
  if (eta < 0.0) throw ConfigError("eta must be non-negative");
  LossValueGrad out = cosmean(z1, z2);
  const DominantDirection c1 = dominant_direction(z1);
  const DominantDirection c2 = dominant_direction(z2);
  const double inner = c1.direction.dot(c2.direction);
  out.regularizer = eta * std::fabs(inner);
  out.value += out.regularizer;
  if (mode == RegGradient::full && eta > 0.0 && inner != 0.0) {
    const double scale = eta * (inner > 0.0 ? 1.0 : -1.0);
    out.grad1 += scale * direction_inner_grad(z1, c1, c2.direction);
    out.grad2 += scale * direction_inner_grad(z2, c2, c1.direction);
  }
  return out;
}

LossKind parse_loss(std::string_view name) {
  if (name == "euclidean") return LossKind::euclidean;
  if (name == "cosmean") return LossKind::cosmean;
  if (name == "barlow") return LossKind::barlow;
  if (name == "vicreg") return LossKind::vicreg;
  if (name == "reg_cosmean") return LossKind::reg_cosmean;
  throw ConfigError("unknown loss `" + std::string(name) +
                    "` (expected euclidean|cosmean|barlow|vicreg|reg_cosmean)");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::euclidean: return "euclidean";
    case LossKind::cosmean: return "cosmean";
    case LossKind::barlow: return "barlow";
    case LossKind::vicreg: return "vicreg";
    case LossKind::reg_cosmean: return "reg_cosmean";
  }
  return "unknown";
}

RegGradient parse_reg_gradient(std::string_view name) {
  if (name == "full") return RegGradient::full;
  if (name == "stop") return RegGradient::stop;
  throw ConfigError("unknown reg_gradient `" + std::string(name) + "` (expected full|stop)");
}

std::string to_string(RegGradient mode) { return mode == RegGradient::full ? "full" : "stop"; }

LossValueGrad compute(LossKind kind, const Matrix& z1, const Matrix& z2,
                      const LossOptions& options) {
  switch (kind) {
    case LossKind::euclidean: return euclidean(z1, z2);
    case LossKind::cosmean: return cosmean(z1, z2);
    case LossKind::barlow: return barlow_twins(z1, z2, options.lambda_bt);
    case LossKind::vicreg:
      return vicreg(z1, z2, options.vicreg_inv, options.vicreg_var, options.vicreg_cov,
                    options.vicreg_eps);
    case LossKind::reg_cosmean:
      return regularized_cosmean(z1, z2, options.eta, options.reg_gradient);
  }
  throw ConfigError("unknown loss kind");
}

}  // namespace fdgcl::losses
