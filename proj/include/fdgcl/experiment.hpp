#pragma once

#include <string>
#include <utility>
#include <functional>
#include <vector>

#include "fdgcl/graph.hpp"
#include "fdgcl/model.hpp"

namespace fdgcl::experiment {

struct ProbeSettings {
  double lr = 0.01;
  int epochs = 300;
};

struct SeedResult {
  std::uint64_t seed = 0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  double alignment = 0.0;     // final |<c1, c2>|
  double participation1 = 0.0;  // PCA participation ratio of Z1
  double participation2 = 0.0;
  double final_loss = 0.0;
  std::vector<std::pair<int, double>> curve;  // (epoch, test accuracy)
  std::string error;  // non-empty when the run failed
  bool ok() const { return error.empty(); }
};

/// Train with `cfg`, then probe on split.train and score split.val / split.test.
/// `curve_every` > 0 also probes every that many epochs (and at the end).
/// Library errors are caught and reported through SeedResult::error.
SeedResult run_seed(const Dataset& data, const ModelConfig& cfg, int curve_every = 0,
                    const ProbeSettings& probe = {});

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  int count = 0;
};

/// Ignores NaN entries; mean is NaN when nothing remains.
Summary summarize(const std::vector<double>& values);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace fdgcl::experiment
