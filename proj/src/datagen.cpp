#include "fdgcl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fdgcl/errors.hpp"
#include "fdgcl/random.hpp"

namespace fdgcl::datagen {
namespace {

constexpr int kMaxAttempts = 100;

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

void SbmSpec::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_in) || !prob(p_out)) throw ConfigError("edge probabilities must lie in [0, 1]");
  if (C < 2) throw ConfigError("SBM needs at least two classes");
  if (N < C) throw ConfigError("SBM needs N >= C");
  if (d_in < C) throw ConfigError("orthogonal class means need d_in >= C");
  if (!(noise >= 0.0)) throw ConfigError("noise must be non-negative");
}

SbmSpec homophilic_preset(std::uint64_t seed) {
  SbmSpec s;
  s.N = 100;
  s.C = 2;
  s.p_in = 0.3;
  s.p_out = 0.02;
  s.seed = seed;
  return s;
}

SbmSpec heterophilic_preset(std::uint64_t seed) {
  SbmSpec s;
  s.N = 300;
  s.C = 3;
  s.p_in = 0.02;
  s.p_out = 0.2;
  s.seed = seed;
  return s;
}

SbmSpec sbm_preset(std::string_view name, std::uint64_t seed) {
  if (name == "homo") return homophilic_preset(seed);
  if (name == "hetero") return heterophilic_preset(seed);
  throw ConfigError("unknown SBM preset `" + std::string(name) + "` (expected homo|hetero)");
}

Matrix class_means(const SbmSpec& spec) {
  spec.validate();
  Rng rng(spec.seed, streams::sbm_means);
  Matrix q(spec.C, spec.d_in);
  for (int c = 0; c < spec.C; ++c) {
    Vector v(spec.d_in);
    do {
      for (Index k = 0; k < spec.d_in; ++k) v[k] = rng.normal();
      // Two passes of classical Gram-Schmidt keep orthogonality at rounding level.
      for (int pass = 0; pass < 2; ++pass)
        for (int p = 0; p < c; ++p) v -= q.row(p).dot(v) * q.row(p).transpose();
    } while (v.norm() < 1e-6);
    q.row(c) = v.normalized().transpose();
  }
  return q;
}

Split random_split(Index n, std::uint64_t seed, double train, double val) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed, streams::split);
  shuffle(perm, rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(val * static_cast<double>(n)));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
               perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  return s;
}

Dataset generate_sbm(const SbmSpec& spec, const GraphOptions& options) {
  spec.validate();
  Dataset data;
  data.labels.resize(static_cast<std::size_t>(spec.N));
  for (Index i = 0; i < spec.N; ++i) data.labels[static_cast<std::size_t>(i)] = static_cast<int>(i % spec.C);
  Rng label_rng(spec.seed, streams::sbm_labels);
  shuffle(data.labels, label_rng);

  Rng edge_rng(spec.seed, streams::sbm_edges);
  bool connected = false;
  for (int attempt = 0; attempt < kMaxAttempts && !connected; ++attempt) {
    std::vector<Edge> edges;
    for (Index i = 0; i < spec.N; ++i)
      for (Index j = i + 1; j < spec.N; ++j) {
        const bool same = data.labels[static_cast<std::size_t>(i)] == data.labels[static_cast<std::size_t>(j)];
        if (edge_rng.uniform() < (same ? spec.p_in : spec.p_out)) edges.emplace_back(i, j);
      }
    data.graph = build_graph(edges, spec.N, options);
    connected = data.graph.is_connected();
  }
  if (!connected) {
    std::ostringstream os;
    os << "SBM graph (N=" << spec.N << ", p_in=" << spec.p_in << ", p_out=" << spec.p_out
       << ") still disconnected after " << kMaxAttempts << " attempts";
    throw ConnectivityError(os.str());
  }

  const Matrix means = class_means(spec);
  Rng noise_rng(spec.seed, streams::sbm_noise);
  data.features.resize(spec.N, spec.d_in);
  for (Index i = 0; i < spec.N; ++i) {
    data.features.row(i) = means.row(data.labels[static_cast<std::size_t>(i)]);
    for (Index k = 0; k < spec.d_in; ++k) data.features(i, k) += spec.noise * noise_rng.normal();
  }
  data.split = random_split(spec.N, spec.seed);
  return data;
}

double edge_homophily(const Graph& graph, std::span<const int> labels) {
  const auto edges = graph.edges();
  if (edges.empty()) return 0.0;
  std::size_t same = 0;
  for (const auto& [u, v] : edges) same += labels[u] == labels[v];
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

}  // namespace fdgcl::datagen
