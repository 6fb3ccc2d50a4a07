#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCholesky>

#include "fdgcl/graph.hpp"
#include "fdgcl/types.hpp"

namespace fdgcl {

enum class Variant { grand, gread };

/// Product-rectangle discretizations of the Caputo integral form
///   Z(t) = Z0 + 1/Gamma(alpha) int_0^t (t - s)^(alpha-1) F(Z(s)) ds.
/// explicit_euler evaluates F at the left node of each step (fractional
/// forward Euler / Adams-Bashforth one-step); implicit_euler evaluates the
/// diffusion term at the right node and solves (I + c L_bar) Z = rhs each
/// step, which is unconditionally stable for the GRAND operator.
enum class Scheme { explicit_euler, implicit_euler };

Variant parse_variant(std::string_view name);
Scheme parse_scheme(std::string_view name);
std::string to_string(Variant v);
std::string to_string(Scheme s);

struct DiffusionConfig {
  double alpha = 1.0;  // (0, 1]
  double T = 1.0;      // total diffusion time, T = m * tau
  double h = 0.1;      // step size
  int m = 1;           // skip segments
  Variant variant = Variant::grand;
  Scheme scheme = Scheme::explicit_euler;
  double gread_gamma = 1.0;
  double gread_nu = 0.5;

  double tau() const { return T / m; }
  /// tau / h, validated to be a positive integer.
  int steps_per_segment() const;
  /// Throws ConfigError.
  void validate() const;
};

struct SolveStats {
  /// Number of N x d history matrices kept by the last segment.
  std::size_t history_matrices = 0;
  Index rows = 0;
  Index cols = 0;
  int segments = 0;
};

/// Memory weights b_k = (k + 1)^alpha - k^alpha, k = 0 .. steps - 1.
std::vector<double> memory_weights(double alpha, int steps);

/// F(Z): GRAND -L_bar Z, GREAD -gamma L_bar Z + nu (A_bar Z - Z .* (A_bar Z)).
Matrix rhs(Variant variant, const Graph& graph, const Matrix& z, double gread_gamma = 1.0,
           double gread_nu = 0.5);

/// Fractional diffusion on a fixed graph with precomputed memory weights
/// (and, for the implicit scheme, a sparse LDLt factorization). Reentrant:
/// all methods are const.
class FractionalDiffusion {
 public:
  FractionalDiffusion(const Graph& graph, const DiffusionConfig& cfg);

  const DiffusionConfig& config() const { return cfg_; }

  /// One segment of length tau started from z0; memory is local to the call.
  Matrix segment(const Matrix& z0, SolveStats* stats = nullptr) const;
  /// m segments with the original z0 re-added after each: Z_k = seg(Z_{k-1}) + Z0.
  Matrix diffuse(const Matrix& z0, SolveStats* stats = nullptr) const;
  /// Transpose of the GRAND propagator. The propagator is a rational function
  /// of the symmetric L_bar, so this is diffuse(g). Throws VariantError for GREAD.
  Matrix diffuse_adjoint(const Matrix& g) const;

 private:
  Matrix apply_rhs(const Matrix& z) const;
  Matrix diffusion_part(const Matrix& z) const;
  Matrix reaction_part(const Matrix& z) const;

  const Graph* graph_;
  DiffusionConfig cfg_;
  int steps_ = 0;
  double step_coeff_ = 0.0;  // h^alpha / Gamma(alpha + 1)
  std::vector<double> weights_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> implicit_solver_;
};

Matrix segment(Variant variant, const Graph& graph, const Matrix& z0, double alpha, double tau,
               double h, Scheme scheme = Scheme::explicit_euler);
Matrix diffuse(const Graph& graph, const Matrix& z0, const DiffusionConfig& cfg);
Matrix diffuse_adjoint(const Graph& graph, const Matrix& g, const DiffusionConfig& cfg);

}  // namespace fdgcl
