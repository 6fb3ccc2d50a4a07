#include "fdgcl/fde_solver.hpp"

#include <cmath>
#include <sstream>

#include "fdgcl/errors.hpp"
#include "fdgcl/special_functions.hpp"

namespace fdgcl {
namespace {

void check_finite(const Matrix& z, int step) {
  if (!z.allFinite()) {
    std::ostringstream os;
    os << "diffusion state became non-finite at step " << step;
    throw NonFiniteError(os.str());
  }
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "grand") return Variant::grand;
  if (name == "gread") return Variant::gread;
  throw ConfigError("unknown diffusion variant `" + std::string(name) + "`");
}

Scheme parse_scheme(std::string_view name) {
  if (name == "explicit") return Scheme::explicit_euler;
  if (name == "implicit") return Scheme::implicit_euler;
  throw ConfigError("unknown scheme `" + std::string(name) + "` (expected explicit|implicit)");
}

std::string to_string(Variant v) { return v == Variant::grand ? "grand" : "gread"; }
std::string to_string(Scheme s) {
  return s == Scheme::explicit_euler ? "explicit" : "implicit";
}

int DiffusionConfig::steps_per_segment() const {
  const double ratio = tau() / h;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "tau / h must be a positive integer (T=" << T << ", m=" << m << ", h=" << h
       << ", tau/h=" << ratio << ")";
    throw ConfigError(os.str());
  }
  return static_cast<int>(rounded);
}

void DiffusionConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 1], got " << alpha;
    throw ConfigError(os.str());
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("step size h must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("diffusion time T must be positive");
  if (m < 1) throw ConfigError("segment count m must be at least 1");
  (void)steps_per_segment();
}

std::vector<double> memory_weights(double alpha, int steps) {
  std::vector<double> b(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    b[k] = std::pow(k + 1.0, alpha) - std::pow(static_cast<double>(k), alpha);
  }
  return b;
}

Matrix rhs(Variant variant, const Graph& graph, const Matrix& z, double gread_gamma,
           double gread_nu) {
  if (z.rows() != graph.num_nodes()) {
    std::ostringstream os;
    os << "state has " << z.rows() << " rows, graph has " << graph.num_nodes() << " nodes";
    throw ShapeError(os.str());
  }
  if (variant == Variant::grand) return -(graph.laplacian() * z);
  const Matrix az = graph.norm_adjacency() * z;
  return -gread_gamma * (graph.laplacian() * z) + gread_nu * (az - z.cwiseProduct(az));
}

FractionalDiffusion::FractionalDiffusion(const Graph& graph, const DiffusionConfig& cfg)
    : graph_(&graph), cfg_(cfg) {
  cfg_.validate();
  steps_ = cfg_.steps_per_segment();
  step_coeff_ = std::pow(cfg_.h, cfg_.alpha) / special::gamma(cfg_.alpha + 1.0);
  weights_ = memory_weights(cfg_.alpha, steps_);
  if (cfg_.scheme == Scheme::implicit_euler) {
    const double gamma = cfg_.variant == Variant::grand ? 1.0 : cfg_.gread_gamma;
    Eigen::SparseMatrix<double> system(graph.num_nodes(), graph.num_nodes());
    system.setIdentity();
    system += (step_coeff_ * weights_[0] * gamma) * Eigen::SparseMatrix<double>(graph.laplacian());
    implicit_solver_.compute(system);
    if (implicit_solver_.info() != Eigen::Success) {
      throw NonFiniteError("implicit diffusion system could not be factorized");
    }
  }
}

Matrix FractionalDiffusion::diffusion_part(const Matrix& z) const {
  const double gamma = cfg_.variant == Variant::grand ? 1.0 : cfg_.gread_gamma;
  return -gamma * (graph_->laplacian() * z);
}

Matrix FractionalDiffusion::reaction_part(const Matrix& z) const {
  const Matrix az = graph_->norm_adjacency() * z;
  return cfg_.gread_nu * (az - z.cwiseProduct(az));
}

Matrix FractionalDiffusion::apply_rhs(const Matrix& z) const {
  return rhs(cfg_.variant, *graph_, z, cfg_.gread_gamma, cfg_.gread_nu);
}

Matrix FractionalDiffusion::segment(const Matrix& z0, SolveStats* stats) const {
  if (z0.rows() != graph_->num_nodes()) {
    std::ostringstream os;
    os << "state has " << z0.rows() << " rows, graph has " << graph_->num_nodes() << " nodes";
    throw ShapeError(os.str());
  }
  const bool reaction = cfg_.variant == Variant::gread;
  std::vector<Matrix> history;
  history.reserve(static_cast<std::size_t>(steps_));
  Matrix z = z0;

  if (cfg_.scheme == Scheme::explicit_euler) {
    // history[j] = F(Z_j); Z_{n+1} = Z0 + c sum_{j<=n} b_{n-j} F(Z_j).
    for (int n = 0; n < steps_; ++n) {
      history.push_back(apply_rhs(z));
      Matrix acc = Matrix::Zero(z0.rows(), z0.cols());
      for (int j = 0; j <= n; ++j) acc.noalias() += weights_[n - j] * history[j];
      z = z0 + step_coeff_ * acc;
      check_finite(z, n + 1);
    }
  } else {
    // history[j] = diffusion part at Z_{j+1} plus reaction part at Z_j; the
    // reaction term (GREAD only) stays explicit.
    for (int n = 0; n < steps_; ++n) {
      Matrix acc = Matrix::Zero(z0.rows(), z0.cols());
      for (int j = 0; j < n; ++j) acc.noalias() += weights_[n - j] * history[j];
      Matrix react;
      if (reaction) {
        react = reaction_part(z);
        acc.noalias() += weights_[0] * react;
      }
      const Matrix rhs_vec = z0 + step_coeff_ * acc;
      z = implicit_solver_.solve(rhs_vec);
      check_finite(z, n + 1);
      Matrix entry = diffusion_part(z);
      if (reaction) entry += react;
      history.push_back(std::move(entry));
    }
  }

  if (stats != nullptr) {
    stats->history_matrices = history.size();
    stats->rows = z0.rows();
    stats->cols = z0.cols();
  }
  return z;
}

Matrix FractionalDiffusion::diffuse(const Matrix& z0, SolveStats* stats) const {
  Matrix z = z0;
  for (int k = 0; k < cfg_.m; ++k) {
    z = segment(z, stats) + z0;
  }
  if (stats != nullptr) stats->segments = cfg_.m;
  return z;
}

Matrix FractionalDiffusion::diffuse_adjoint(const Matrix& g) const {
  if (cfg_.variant != Variant::grand) {
    throw VariantError("adjoint diffusion is only available for the linear GRAND variant");
  }
  return diffuse(g);
}

Matrix segment(Variant variant, const Graph& graph, const Matrix& z0, double alpha, double tau,
               double h, Scheme scheme) {
  DiffusionConfig cfg;
  cfg.alpha = alpha;
  cfg.T = tau;
  cfg.h = h;
  cfg.m = 1;
  cfg.variant = variant;
  cfg.scheme = scheme;
  return FractionalDiffusion(graph, cfg).segment(z0);
}

Matrix diffuse(const Graph& graph, const Matrix& z0, const DiffusionConfig& cfg) {
  return FractionalDiffusion(graph, cfg).diffuse(z0);
}

Matrix diffuse_adjoint(const Graph& graph, const Matrix& g, const DiffusionConfig& cfg) {
  return FractionalDiffusion(graph, cfg).diffuse_adjoint(g);
}

}  // namespace fdgcl
