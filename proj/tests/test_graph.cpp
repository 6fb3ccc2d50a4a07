#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "fdgcl/datagen.hpp"
#include "fdgcl/errors.hpp"
#include "fdgcl/graph.hpp"
#include "fdgcl/spectral.hpp"
#include "oracles.hpp"

using namespace fdgcl;

TEST_CASE("single edge normalizes to the averaging matrix") {
  const std::vector<Edge> edges{{0, 1}};
  const Graph g = build_graph(edges, 2);
  const Matrix a(g.norm_adjacency());
  CHECK((a - Matrix::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff() < 1e-15);
  const Vector ev = spectral::eigh(g.dense_laplacian()).eigenvalues;
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("isolated node keeps its self-loop") {
  const Graph g = build_graph({}, 1);
  CHECK(Matrix(g.norm_adjacency())(0, 0) == 1.0);
  CHECK(Matrix(g.laplacian())(0, 0) == 0.0);
}

TEST_CASE("self-loops and duplicates in the input are dropped") {
  const std::vector<Edge> edges{{0, 1}, {1, 0}, {1, 1}, {0, 1}, {2, 1}};
  const Graph g = build_graph(edges, 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(1) == 2);
  const auto nb = g.neighbors(1);
  CHECK(std::vector<Index>(nb.begin(), nb.end()) == std::vector<Index>{0, 2});
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("out-of-range ids raise FormatError") {
  const std::vector<Edge> edges{{0, 5}};
  CHECK_THROWS_AS(build_graph(edges, 2), FormatError);
  const std::vector<Edge> negative{{-1, 0}};
  CHECK_THROWS_AS(build_graph(negative, 2), FormatError);
}

TEST_CASE("normalization matches a dense oracle") {
  const auto ds = datagen::generate_sbm({40, 2, 0.3, 0.05, 4, 1.0, 3});
  Matrix a = Matrix::Zero(40, 40);
  for (const auto& [u, v] : ds.graph.edges()) a(u, v) = a(v, u) = 1.0;
  const Matrix expected = oracle::gcn_normalize(a);
  CHECK((Matrix(ds.graph.norm_adjacency()) - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ds.graph.dense_laplacian() - (Matrix::Identity(40, 40) - expected)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("without self-loops the plain symmetric normalization is used") {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  const Graph g = build_graph(edges, 3, {.add_self_loops = false});
  const Matrix a(g.norm_adjacency());
  CHECK(a(0, 0) == 0.0);
  CHECK(a(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(!g.self_loops());
}

TEST_CASE("symmetry, spectrum bound and null space on random SBMs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = datagen::generate_sbm({60 + 40 * static_cast<Index>(seed), 3, 0.2, 0.05, 4, 1.0, seed});
    const Matrix a(ds.graph.norm_adjacency());
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Vector ev = spectral::eigh(ds.graph.dense_laplacian()).eigenvalues;
    CHECK(ev.minCoeff() > -1e-10);
    CHECK(ev.maxCoeff() < 2.0 + 1e-10);
    CHECK(ds.graph.is_connected());
    CHECK((ev.array() < 1e-8).count() == 1);
  }
}

TEST_CASE("connectivity") {
  const std::vector<Edge> two_parts{{0, 1}, {2, 3}};
  CHECK(!build_graph(two_parts, 4).is_connected());
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  CHECK(build_graph(path, 4).is_connected());
}

TEST_CASE("dataset validation") {
  Dataset ds;
  const std::vector<Edge> edges{{0, 1}};
  ds.graph = build_graph(edges, 2);
  ds.features = Matrix::Ones(2, 3);
  ds.labels = {0, 1};
  ds.split = {{0}, {}, {1}};
  CHECK_NOTHROW(ds.validate());
  CHECK(ds.num_classes() == 2);

  Dataset rows = ds;
  rows.features = Matrix::Ones(3, 3);
  CHECK_THROWS_AS(rows.validate(), ShapeError);
  Dataset labels = ds;
  labels.labels = {0};
  CHECK_THROWS_AS(labels.validate(), ShapeError);
  Dataset overlap = ds;
  overlap.split = {{0, 1}, {}, {1}};
  CHECK_THROWS_AS(overlap.validate(), FormatError);
  Dataset range = ds;
  range.split = {{0, 2}, {}, {}};
  CHECK_THROWS_AS(range.validate(), FormatError);
}
