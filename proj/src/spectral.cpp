#include "fdgcl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "fdgcl/errors.hpp"

namespace fdgcl::spectral {
namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm2(const Matrix& a) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return s;
}

void fix_signs(Matrix& u) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index best = 0;
    u.col(j).cwiseAbs().maxCoeff(&best);
    if (u(best, j) < 0.0) u.col(j) = -u.col(j);
  }
}

struct Cluster {
  Index begin;
  Index end;
  double mean1;
  double mean2;
};

std::vector<Cluster> clusters(const Vector& lam, const Vector& g1, const Vector& g2, double gap) {
  std::vector<Cluster> out;
  Index i = 0;
  while (i < lam.size()) {
    Index j = i + 1;
    while (j < lam.size() && lam[j] - lam[j - 1] < gap) ++j;
    const double n = static_cast<double>(j - i);
    out.push_back({i, j, g1.segment(i, j - i).sum() / n, g2.segment(i, j - i).sum() / n});
    i = j;
  }
  return out;
}

}  // namespace

SpectralBasis eigh(const Matrix& m) {
  const Index n = m.rows();
  if (m.cols() != n) throw ShapeError("eigh requires a square matrix");
  if (n > kDenseCap) {
    std::ostringstream os;
    os << "dense eigendecomposition capped at " << kDenseCap << " (got " << n << ")";
    throw SizeError(os.str());
  }
  if (n > 0) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8) {
      std::ostringstream os;
      os << "matrix is not symmetric (max |M - M^T| = " << asym << ")";
      throw AsymmetryError(os.str());
    }
  }

  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.squaredNorm(), std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= 1e-26 * scale) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Entries below the rounding level of both diagonals are dropped.
        const double g = 100.0 * std::fabs(apq);
        if (sweep > 3 && std::fabs(app) + g == std::fabs(app) &&
            std::fabs(aqq) + g == std::fabs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        if (apq == 0.0) continue;
        // Symmetric Schur decomposition of the (p, q) block.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) < a(j, j); });
  SpectralBasis basis;
  basis.eigenvalues.resize(n);
  basis.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    basis.eigenvalues[k] = a(order[k], order[k]);
    basis.eigenvectors.col(k) = v.col(order[k]);
  }
  fix_signs(basis.eigenvectors);
  return basis;
}

Vector fourier(const SpectralBasis& basis, const Vector& x) {
  if (x.size() != basis.size()) throw ShapeError("signal length does not match the basis");
  return basis.eigenvectors.transpose() * x;
}

Vector synthesize(const SpectralBasis& basis, const Vector& c) {
  if (c.size() != basis.size()) throw ShapeError("coefficient count does not match the basis");
  return basis.eigenvectors * c;
}

double participation_ratio(const Vector& c) {
  const double s2 = c.squaredNorm();
  if (s2 == 0.0) throw ZeroVectorError("participation ratio of a zero vector");
  const double s4 = c.array().pow(4).sum();
  return s2 * s2 / s4;
}

Vector amplification_profile(const Graph& graph, const SpectralBasis& basis,
                             const DiffusionConfig& cfg) {
  if (cfg.variant != Variant::grand) {
    throw VariantError("amplification profile requires the linear GRAND variant");
  }
  const FractionalDiffusion solver(graph, cfg);
  // Columns are independent, so all eigenmodes are diffused in one pass.
  const Matrix out = solver.diffuse(basis.eigenvectors);
  return (basis.eigenvectors.array() * out.array()).colwise().sum().transpose();
}

Vector amplification_profile(const Graph& graph, const DiffusionConfig& cfg) {
  return amplification_profile(graph, eigh(graph.dense_laplacian()), cfg);
}

TheoremReport theorem_check(const Graph& graph, double alpha1, double alpha2, double tau,
                            double h, int m, const TheoremOptions& options) {
  if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 <= 1.0)) {
    std::ostringstream os;
    os << "theorem check requires 0 < alpha1 < alpha2 <= 1 (alpha1=" << alpha1
       << ", alpha2=" << alpha2 << ")";
    throw ConfigError(os.str());
  }
  const SpectralBasis basis = eigh(graph.dense_laplacian());
  auto config_for = [&](double alpha) {
    DiffusionConfig cfg;
    cfg.alpha = alpha;
    cfg.T = tau * m;
    cfg.h = h;
    cfg.m = m;
    cfg.scheme = options.scheme;
    return cfg;
  };

  TheoremReport r;
  r.alpha1 = alpha1;
  r.alpha2 = alpha2;
  r.tau = tau;
  r.h = h;
  r.m = m;
  r.eigenvalues = basis.eigenvalues;
  r.g1 = amplification_profile(graph, basis, config_for(alpha1));
  r.g2 = amplification_profile(graph, basis, config_for(alpha2));
  r.ratio1 = r.g1 / r.g1[0];
  r.ratio2 = r.g2 / r.g2[0];

  const Index n = basis.size();
  const auto cl = clusters(r.eigenvalues, r.g1, r.g2, options.degenerate_gap);
  r.monotone1_at.assign(n, true);
  r.monotone2_at.assign(n, true);
  r.ordered_at.assign(n, true);
  r.monotone_margin1 = std::numeric_limits<double>::infinity();
  r.monotone_margin2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < cl.size(); ++k) {
    const double d1 = cl[k - 1].mean1 - cl[k].mean1;
    const double d2 = cl[k - 1].mean2 - cl[k].mean2;
    r.monotone_margin1 = std::min(r.monotone_margin1, d1);
    r.monotone_margin2 = std::min(r.monotone_margin2, d2);
    for (Index i = cl[k].begin; i < cl[k].end; ++i) {
      r.monotone1_at[i] = d1 >= -options.tolerance;
      r.monotone2_at[i] = d2 >= -options.tolerance;
    }
  }
  r.monotone1 = std::all_of(r.monotone1_at.begin(), r.monotone1_at.end(), [](bool b) { return b; });
  r.monotone2 = std::all_of(r.monotone2_at.begin(), r.monotone2_at.end(), [](bool b) { return b; });

  r.ordering_margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    if (r.eigenvalues[i] <= options.zero_eigenvalue) continue;
    const double d = r.ratio1[i] - r.ratio2[i];
    r.ordering_margin = std::min(r.ordering_margin, d);
    r.ordered_at[i] = d >= -options.tolerance;
  }
  r.ordering = std::all_of(r.ordered_at.begin(), r.ordered_at.end(), [](bool b) { return b; });

  for (double delta : options.sweep_deltas) {
    const double a2 = std::min(1.0, alpha1 + delta);
    const Vector g = amplification_profile(graph, basis, config_for(a2));
    const Vector ratio = g / g[0];
    double sum = 0.0;
    int count = 0;
    for (Index i = 0; i < n; ++i) {
      if (r.eigenvalues[i] <= options.zero_eigenvalue) continue;
      sum += r.ratio1[i] - ratio[i];
      ++count;
    }
    r.sweep_alpha2.push_back(a2);
    r.sweep_gap.push_back(count > 0 ? sum / count : 0.0);
  }
  r.gap_growth = r.sweep_gap.size() >= 2;
  for (std::size_t k = 1; k < r.sweep_gap.size(); ++k) {
    if (!(r.sweep_gap[k] > r.sweep_gap[k - 1])) r.gap_growth = false;
  }
  return r;
}

std::string theorem_csv(const TheoremReport& report) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "i,lambda,g_alpha1,g_alpha2,normalized_ratio_1,normalized_ratio_2,pass_flags\n";
  for (Index i = 0; i < report.eigenvalues.size(); ++i) {
    os << i << ',' << report.eigenvalues[i] << ',' << report.g1[i] << ',' << report.g2[i] << ','
       << report.ratio1[i] << ',' << report.ratio2[i] << ',' << (report.monotone1_at[i] ? 1 : 0)
       << (report.monotone2_at[i] ? 1 : 0) << (report.ordered_at[i] ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace fdgcl::spectral
