#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fdgcl/types.hpp"

namespace fdgcl {

using Edge = std::pair<Index, Index>;

struct GraphOptions {
  /// Add I to the adjacency before symmetric normalization (GCN convention).
  bool add_self_loops = true;
};

/// Immutable undirected graph with its symmetric normalized adjacency
/// A_bar = D^-1/2 (A + I) D^-1/2 and Laplacian L_bar = I - A_bar.
class Graph {
 public:
  Graph() = default;

  Index num_nodes() const { return num_nodes_; }
  Index num_edges() const { return static_cast<Index>(col_idx_.size()) / 2; }

  /// CSR adjacency without self-loops; neighbors of u are
  /// col_idx()[row_ptr()[u] .. row_ptr()[u + 1]), sorted ascending.
  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const Index> neighbors(Index u) const;
  Index degree(Index u) const { return row_ptr_[u + 1] - row_ptr_[u]; }

  /// Unique edges with u < v, in CSR order.
  std::vector<Edge> edges() const;

  const SparseMatrix& norm_adjacency() const { return norm_adjacency_; }
  const SparseMatrix& laplacian() const { return laplacian_; }
  bool self_loops() const { return self_loops_; }

  /// Dense copy of the Laplacian for the spectral routines.
  Matrix dense_laplacian() const { return Matrix(laplacian_); }

  bool is_connected() const;

 private:
  friend Graph build_graph(std::span<const Edge> edges, Index num_nodes,
                           const GraphOptions& options);

  Index num_nodes_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  SparseMatrix norm_adjacency_;
  SparseMatrix laplacian_;
  bool self_loops_ = true;
};

/// Builds the symmetric CSR graph. Self-loops in the input are dropped and
/// duplicate (or reversed) edges collapsed. Throws FormatError on ids outside
/// [0, num_nodes).
Graph build_graph(std::span<const Edge> edges, Index num_nodes,
                  const GraphOptions& options = {});

struct Split {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;
};

struct Dataset {
  Graph graph;
  Matrix features;          // N x d_in
  std::vector<int> labels;  // N entries in [0, C)
  Split split;

  Index num_nodes() const { return graph.num_nodes(); }
  int num_classes() const;
  /// Throws ShapeError / FormatError when the invariants do not hold.
  void validate() const;
};

}  // namespace fdgcl
