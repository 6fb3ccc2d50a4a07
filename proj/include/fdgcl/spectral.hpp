#pragma once

#include <string>
#include <vector>

#include "fdgcl/fde_solver.hpp"
#include "fdgcl/graph.hpp"
#include "fdgcl/types.hpp"

namespace fdgcl::spectral {

inline constexpr Index kDenseCap = 3000;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, eigenvectors as
/// orthonormal columns with their largest-magnitude entry positive.
struct SpectralBasis {
  Vector eigenvalues;
  Matrix eigenvectors;

  Index size() const { return eigenvalues.size(); }
};

/// Cyclic Jacobi eigendecomposition. Throws SizeError above kDenseCap and
/// AsymmetryError if max|M - M^T| > 1e-8.
SpectralBasis eigh(const Matrix& m);

/// Graph Fourier coefficients c = U^T x.
Vector fourier(const SpectralBasis& basis, const Vector& x);
/// Inverse transform x = U c.
Vector synthesize(const SpectralBasis& basis, const Vector& c);

/// (sum c_i^2)^2 / sum c_i^4: the effective number of active modes.
double participation_ratio(const Vector& c);

/// Empirical per-mode amplification g(lambda_i) = <diffuse(u_i), u_i>.
/// GRAND only.
Vector amplification_profile(const Graph& graph, const SpectralBasis& basis,
                             const DiffusionConfig& cfg);
Vector amplification_profile(const Graph& graph, const DiffusionConfig& cfg);

struct TheoremOptions {
  Scheme scheme = Scheme::implicit_euler;
  /// alpha2 - alpha1 offsets for the gap-growth sweep (alpha2 capped at 1).
  std::vector<double> sweep_deltas{0.2, 0.5, 0.8};
  double zero_eigenvalue = 1e-8;
  double degenerate_gap = 1e-10;
  double tolerance = 1e-10;
};

struct TheoremReport {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double tau = 0.0;
  double h = 0.0;
  int m = 0;
  Vector eigenvalues;
  Vector g1;
  Vector g2;
  Vector ratio1;  // g1 / g1(lambda_1)
  Vector ratio2;
  std::vector<bool> monotone1_at;  // per index, g1 non-increasing into it
  std::vector<bool> monotone2_at;
  std::vector<bool> ordered_at;    // ratio1 >= ratio2 (true for lambda = 0)

  bool monotone1 = false;  // (i) for alpha1
  bool monotone2 = false;  // (i) for alpha2
  bool ordering = false;   // (ii)
  bool gap_growth = false; // (iii)
  double monotone_margin1 = 0.0;  // min over steps of g[i] - g[i+1] across clusters
  double monotone_margin2 = 0.0;
  double ordering_margin = 0.0;   // min over lambda > 0 of ratio1 - ratio2
  std::vector<double> sweep_alpha2;
  std::vector<double> sweep_gap;  // mean over lambda > 0 of ratio1 - ratio(alpha2')

  bool all_passed() const { return monotone1 && monotone2 && ordering && gap_growth; }
};

/// Numerical check of the amplification ordering between two fractional
/// orders. Throws ConfigError unless 0 < alpha1 < alpha2 <= 1.
TheoremReport theorem_check(const Graph& graph, double alpha1, double alpha2, double tau,
                            double h, int m, const TheoremOptions& options = {});

/// CSV rows (i, lambda, g_alpha1, g_alpha2, normalized_ratio_1,
/// normalized_ratio_2, pass_flags).
std::string theorem_csv(const TheoremReport& report);

}  // namespace fdgcl::spectral
