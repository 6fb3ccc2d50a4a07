#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdgcl/datagen.hpp"
#include "fdgcl/errors.hpp"
#include "fdgcl/fde_solver.hpp"
#include "fdgcl/random.hpp"
#include "fdgcl/spectral.hpp"
#include "oracles.hpp"

using namespace fdgcl;

namespace {

Matrix random_matrix(Index r, Index c, std::uint64_t seed) {
  Rng rng(seed, 99);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Graph sbm_graph(Index n, std::uint64_t seed) {
  return datagen::generate_sbm({n, 2, 0.3, 0.1, 2, 1.0, seed}).graph;
}

// Graph whose Laplacian has eigenvalues {0, 1}; the (1, -1) signal is the lambda = 1 mode.
Graph two_node() {
  const std::vector<Edge> e{{0, 1}};
  return build_graph(e, 2);
}

// D^alpha z = -z, z(0) = 1, carried by the lambda = 1 mode of two_node().
double relax(double alpha, double tau, double h) {
  Matrix z0(2, 1);
  z0 << 1.0, -1.0;
  return segment(Variant::grand, two_node(), z0, alpha, tau, h)(0, 0);
}

DiffusionConfig make_cfg(double alpha, double T, double h, int m, Scheme s = Scheme::explicit_euler) {
  DiffusionConfig c;
  c.alpha = alpha;
  c.T = T;
  c.h = h;
  c.m = m;
  c.scheme = s;
  return c;
}

}  // namespace

TEST_CASE("memory weights") {
  const auto b = memory_weights(0.5, 4);
  REQUIRE(b.size() == 4);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK(b[3] == doctest::Approx(2.0 - std::sqrt(3.0)));
  for (double w : memory_weights(1.0, 10)) CHECK(w == 1.0);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(make_cfg(0.5, 2.0, 0.5, 2).validate());
  CHECK(make_cfg(0.5, 2.0, 0.5, 2).steps_per_segment() == 2);
  CHECK(make_cfg(0.01, 1.5, 0.15, 1).steps_per_segment() == 10);
  CHECK_THROWS_AS(make_cfg(0.5, 2.0, 0.3, 1).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(0.0, 2.0, 0.5, 1).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(1.2, 2.0, 0.5, 1).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(0.5, 2.0, 0.5, 0).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(0.5, 2.0, -0.5, 1).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(0.5, 1.0, 2.0, 1).validate(), ConfigError);
}

TEST_CASE("GRAND right-hand side") {
  const Graph g = sbm_graph(20, 1);
  const auto basis = spectral::eigh(g.dense_laplacian());
  // The null space of L_bar is spanned by D^1/2 1, not the constant vector.
  CHECK(rhs(Variant::grand, g, basis.eigenvectors.col(0)).cwiseAbs().maxCoeff() < 1e-12);
  for (Index i : {3, 11, 19}) {
    const Vector u = basis.eigenvectors.col(i);
    const Matrix r = rhs(Variant::grand, g, u);
    CHECK((r + basis.eigenvalues[i] * u).cwiseAbs().maxCoeff() < 1e-10);
  }
  const Matrix x = random_matrix(20, 3, 1), y = random_matrix(20, 3, 2);
  const Matrix lhs = rhs(Variant::grand, g, 2.0 * x - 0.5 * y);
  const Matrix rhs_sum = 2.0 * rhs(Variant::grand, g, x) - 0.5 * rhs(Variant::grand, g, y);
  CHECK((lhs - rhs_sum).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(rhs(Variant::grand, g, Matrix::Ones(19, 2)), ShapeError);
}

TEST_CASE("GREAD right-hand side adds the blurring-sharpening reaction") {
  const Graph g = sbm_graph(20, 2);
  const Matrix z = random_matrix(20, 2, 3);
  const Matrix a(g.norm_adjacency());
  const Matrix az = a * z;
  const Matrix expected = -0.7 * (z - az) + 0.3 * (az - z.cwiseProduct(az));
  CHECK((rhs(Variant::gread, g, z, 0.7, 0.3) - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("alpha = 1 is forward Euler") {
  const Graph g = sbm_graph(20, 3);
  const Matrix z0 = random_matrix(20, 4, 4);
  const double h = 0.05;
  Matrix ref = z0;
  const Matrix l(g.laplacian());
  for (int n = 0; n < 100; ++n) ref = ref - h * l * ref;
  const Matrix got = segment(Variant::grand, g, z0, 1.0, 100 * h, h);
  CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
}

TEST_CASE("scalar relaxation approaches the Mittag-Leffler function") {
  const double ref = oracle::ml_series(0.5, 1.0);
  CHECK(std::fabs(relax(0.5, 1.0, 1e-3) - ref) / ref < 1e-2);
}

TEST_CASE("empirical convergence order") {
  for (double alpha : {0.3, 0.5, 0.9}) {
    const double ref = oracle::ml_series(alpha, 1.0);
    const double e1 = std::fabs(relax(alpha, 1.0, 1.0 / 200) - ref);
    const double e2 = std::fabs(relax(alpha, 1.0, 1.0 / 400) - ref);
    CAPTURE(alpha);
    CHECK(e2 < e1);
    const double order = std::log2(e1 / e2);
    CHECK(order >= alpha - 0.25);
    CHECK(order <= 1.25);
  }
}

TEST_CASE("alpha continuity at 1") {
  const Graph g = sbm_graph(20, 5);
  const Matrix z0 = random_matrix(20, 3, 5);
  const Matrix a = diffuse(g, z0, make_cfg(0.999, 2.0, 0.1, 1));
  const Matrix b = diffuse(g, z0, make_cfg(1.0, 2.0, 0.1, 1));
  CHECK((a - b).norm() / b.norm() < 0.01);
}

TEST_CASE("solver matches the scalar recurrence per eigenmode") {
  const Graph g = sbm_graph(20, 6);
  const auto basis = spectral::eigh(g.dense_laplacian());
  for (Scheme s : {Scheme::explicit_euler, Scheme::implicit_euler}) {
    const Matrix out = segment(Variant::grand, g, basis.eigenvectors, 0.6, 2.0, 0.1, s);
    for (Index i = 0; i < basis.size(); ++i) {
      const double e = oracle::scalar_segment(0.6, basis.eigenvalues[i], 0.1, 20,
                                              s == Scheme::implicit_euler);
      CHECK((out.col(i) - e * basis.eigenvectors.col(i)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("single node graph leaves signals unchanged per segment") {
  const Graph g = build_graph({}, 1);
  Matrix z0(1, 2);
  z0 << 1.5, -2.0;
  CHECK(segment(Variant::grand, g, z0, 0.3, 1.0, 0.1) == z0);
  CHECK((diffuse(g, z0, make_cfg(0.3, 3.0, 0.1, 3)) - 4.0 * z0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("skip schedule re-adds the original input") {
  const Graph g = sbm_graph(15, 7);
  const Matrix z0 = random_matrix(15, 2, 7);
  const Matrix one = diffuse(g, z0, make_cfg(0.4, 1.0, 0.1, 1));
  CHECK((one - (segment(Variant::grand, g, z0, 0.4, 1.0, 0.1) + z0)).cwiseAbs().maxCoeff() < 1e-15);
  Matrix z = z0;
  for (int k = 0; k < 3; ++k) z = segment(Variant::grand, g, z, 0.4, 1.0, 0.1) + z0;
  CHECK((diffuse(g, z0, make_cfg(0.4, 3.0, 0.1, 3)) - z).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("eigenvector input is amplified by the geometric sum") {
  const Graph g = sbm_graph(20, 8);
  const auto basis = spectral::eigh(g.dense_laplacian());
  const Matrix out = diffuse(g, basis.eigenvectors, make_cfg(0.3, 3.0, 0.1, 3));
  for (Index i = 0; i < basis.size(); ++i) {
    const double e = oracle::scalar_segment(0.3, basis.eigenvalues[i], 0.1, 10, false);
    CHECK((out.col(i) - oracle::geometric(e, 3) * basis.eigenvectors.col(i)).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("linearity and adjoint identity") {
  const Graph g = sbm_graph(20, 9);
  for (Scheme s : {Scheme::explicit_euler, Scheme::implicit_euler}) {
    const auto cfg = make_cfg(0.35, 4.0, 0.5, 2, s);
    const Matrix x = random_matrix(20, 3, 10), y = random_matrix(20, 3, 11);
    const Matrix lin = diffuse(g, 1.5 * x + 0.25 * y, cfg) - 1.5 * diffuse(g, x, cfg) - 0.25 * diffuse(g, y, cfg);
    CHECK(lin.cwiseAbs().maxCoeff() < 1e-10);
    const double a = diffuse(g, x, cfg).cwiseProduct(y).sum();
    const double b = x.cwiseProduct(diffuse_adjoint(g, y, cfg)).sum();
    CHECK(std::fabs(a - b) < 1e-8 * std::max(1.0, std::fabs(a)));
    CHECK(diffuse_adjoint(g, Matrix::Zero(20, 2), cfg).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("materialized propagator is symmetric") {
  const Graph g = sbm_graph(15, 12);
  const Matrix p = diffuse(g, Matrix::Identity(15, 15), make_cfg(0.7, 2.0, 0.25, 2));
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("per-segment history holds E matrices") {
  const Graph g = sbm_graph(15, 13);
  const FractionalDiffusion solver(g, make_cfg(0.5, 3.0, 0.25, 3));
  SolveStats stats;
  solver.diffuse(random_matrix(15, 4, 1), &stats);
  CHECK(stats.history_matrices == 4);
  CHECK(stats.rows == 15);
  CHECK(stats.cols == 4);
  CHECK(stats.segments == 3);
}

TEST_CASE("GREAD has no adjoint shortcut") {
  const Graph g = sbm_graph(10, 14);
  auto cfg = make_cfg(0.5, 1.0, 0.1, 1);
  cfg.variant = Variant::gread;
  CHECK_NOTHROW(diffuse(g, random_matrix(10, 2, 1), cfg));
  CHECK_THROWS_AS(diffuse_adjoint(g, random_matrix(10, 2, 1), cfg), VariantError);
}

TEST_CASE("instability is reported, not clamped") {
  const Graph g = sbm_graph(20, 15);
  // Forward Euler with h = 5 amplifies the top mode by |1 - 5 lambda| > 1 at every step.
  CHECK_THROWS_AS(segment(Variant::grand, g, random_matrix(20, 2, 1), 1.0, 5000.0, 5.0), NonFiniteError);
}

TEST_CASE("variant and scheme names") {
  CHECK(parse_variant("grand") == Variant::grand);
  CHECK(parse_variant("gread") == Variant::gread);
  CHECK(parse_scheme("explicit") == Scheme::explicit_euler);
  CHECK(parse_scheme("implicit") == Scheme::implicit_euler);
  CHECK_THROWS_AS(parse_variant("cde"), ConfigError);
  CHECK(to_string(Scheme::implicit_euler) == "implicit");
}
