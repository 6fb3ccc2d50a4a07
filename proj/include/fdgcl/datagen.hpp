#pragma once

#include <cstdint>
#include <string_view>

#include "fdgcl/graph.hpp"

namespace fdgcl::datagen {

struct SbmSpec {
  Index N = 300;
  int C = 3;
  double p_in = 0.02;
  double p_out = 0.2;
  Index d_in = 16;
  double noise = 1.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
};

/// N = 100, C = 2, p_in = 0.3, p_out = 0.02.
SbmSpec homophilic_preset(std::uint64_t seed = 0);
/// N = 300, C = 3, p_in = 0.02, p_out = 0.2.
SbmSpec heterophilic_preset(std::uint64_t seed = 0);
/// "homo" or "hetero"; throws ConfigError otherwise.
SbmSpec sbm_preset(std::string_view name, std::uint64_t seed = 0);

/// Balanced labels, orthonormal class means plus N(0, noise^2) features,
/// and a seeded 60/20/20 split. Resamples edges until the graph is
/// connected; throws ConnectivityError after 100 attempts.
Dataset generate_sbm(const SbmSpec& spec, const GraphOptions& options = {});

/// Class mean vectors (rows) used by generate_sbm for this spec.
Matrix class_means(const SbmSpec& spec);

/// Seeded shuffle into train / val / test with the given fractions.
Split random_split(Index n, std::uint64_t seed, double train = 0.6, double val = 0.2);

/// Fraction of edges whose endpoints share a label.
double edge_homophily(const Graph& graph, std::span<const int> labels);

}  // namespace fdgcl::datagen
