#include "fdgcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "fdgcl/errors.hpp"

namespace fdgcl {

std::span<const Index> Graph::neighbors(Index u) const {
  return std::span<const Index>(col_idx_).subspan(row_ptr_[u], row_ptr_[u + 1] - row_ptr_[u]);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(col_idx_.size() / 2);
  for (Index u = 0; u < num_nodes_; ++u) {
    for (Index v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

bool Graph::is_connected() const {
  if (num_nodes_ <= 1) return true;
  std::vector<char> seen(num_nodes_, 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index count = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (Index v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == num_nodes_;
}

Graph build_graph(std::span<const Edge> edges, Index num_nodes, const GraphOptions& options) {
  if (num_nodes < 0) throw FormatError("negative node count");
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(num_nodes));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [u, v] = edges[k];
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      std::ostringstream os;
      os << "edge " << k << " (" << u << ", " << v << ") out of range for " << num_nodes
         << " nodes";
      throw FormatError(os.str());
    }
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  Graph g;
  g.num_nodes_ = num_nodes;
  g.self_loops_ = options.add_self_loops;
  g.row_ptr_.assign(1, 0);
  g.row_ptr_.reserve(num_nodes + 1);
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    g.col_idx_.insert(g.col_idx_.end(), nb.begin(), nb.end());
    g.row_ptr_.push_back(static_cast<Index>(g.col_idx_.size()));
  }

  const double loop = options.add_self_loops ? 1.0 : 0.0;
  std::vector<double> inv_sqrt_deg(num_nodes);
  for (Index u = 0; u < num_nodes; ++u) {
    const double d = static_cast<double>(g.degree(u)) + loop;
    inv_sqrt_deg[u] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }

  std::vector<Eigen::Triplet<double>> a_trip;
  std::vector<Eigen::Triplet<double>> l_trip;
  a_trip.reserve(g.col_idx_.size() + num_nodes);
  l_trip.reserve(g.col_idx_.size() + num_nodes);
  for (Index u = 0; u < num_nodes; ++u) {
    const double self = loop * inv_sqrt_deg[u] * inv_sqrt_deg[u];
    if (self != 0.0) a_trip.emplace_back(u, u, self);
    l_trip.emplace_back(u, u, 1.0 - self);
    for (Index v : g.neighbors(u)) {
      const double w = inv_sqrt_deg[u] * inv_sqrt_deg[v];
      a_trip.emplace_back(u, v, w);
      l_trip.emplace_back(u, v, -w);
    }
  }
  g.norm_adjacency_.resize(num_nodes, num_nodes);
  g.norm_adjacency_.setFromTriplets(a_trip.begin(), a_trip.end());
  g.laplacian_.resize(num_nodes, num_nodes);
  g.laplacian_.setFromTriplets(l_trip.begin(), l_trip.end());
  return g;
}

int Dataset::num_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

void Dataset::validate() const {
  const Index n = graph.num_nodes();
  if (features.rows() != n) {
    std::ostringstream os;
    os << "feature matrix has " << features.rows() << " rows, graph has " << n << " nodes";
    throw ShapeError(os.str());
  }
  if (static_cast<Index>(labels.size()) != n) {
    std::ostringstream os;
    os << "label file has " << labels.size() << " entries, graph has " << n << " nodes";
    throw ShapeError(os.str());
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      std::ostringstream os;
      os << "negative label at node " << i;
      throw FormatError(os.str());
    }
  }
  std::unordered_set<Index> seen;
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (Index i : *part) {
      if (i < 0 || i >= n) {
        std::ostringstream os;
        os << "split index " << i << " outside [0, " << n << ")";
        throw FormatError(os.str());
      }
      if (!seen.insert(i).second) {
        std::ostringstream os;
        os << "split index " << i << " appears in more than one split";
        throw FormatError(os.str());
      }
    }
  }
}

}  // namespace fdgcl
