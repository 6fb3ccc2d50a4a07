#include "fdgcl/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "fdgcl/errors.hpp"
#include "fdgcl/eval.hpp"

namespace fdgcl::experiment {

SeedResult run_seed(const Dataset& data, const ModelConfig& cfg, int curve_every,
                    const ProbeSettings& probe) {
  SeedResult r;
  r.seed = cfg.seed;
  const int classes = data.num_classes();
  auto score = [&](const Matrix& emb, const std::vector<Index>& idx, const eval::ProbeModel& p) {
    return idx.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : eval::accuracy(p, emb, data.labels, idx);
  };
  auto fit = [&](const Matrix& emb) {
    return eval::train_probe(emb, data.labels, data.split.train, probe.lr, probe.epochs, cfg.seed,
                             classes);
  };
  try {
    EpochCallback on_epoch;
    if (curve_every > 0) {
      on_epoch = [&](int epoch, const Matrix& emb) {
        if (epoch % curve_every != 0 && epoch != cfg.epochs) return;
        r.curve.emplace_back(epoch, score(emb, data.split.test, fit(emb)));
      };
    }
    const TrainRun run = train(data, cfg, on_epoch);
    const eval::ProbeModel p = fit(run.embeddings);
    r.val_accuracy = score(run.embeddings, data.split.val, p);
    r.test_accuracy = score(run.embeddings, data.split.test, p);
    r.alignment = run.final_alignment;
    r.final_loss = run.loss_history.empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : run.loss_history.back();
    r.participation1 = eval::pca_participation_ratio(run.z1);
    r.participation2 = eval::pca_participation_ratio(run.z2);
  } catch (const Error& e) {
    r.error = e.what();
  }
  if (!r.ok()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.val_accuracy = r.test_accuracy = r.alignment = r.participation1 = r.participation2 = nan;
  }
  return r;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  double sum = 0.0;
  for (double v : values)
    if (!std::isnan(v)) {
      sum += v;
      ++s.count;
    }
  if (s.count == 0) {
    s.mean = s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = sum / s.count;
  double ss = 0.0;
  for (double v : values)
    if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / s.count);
  return s;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fdgcl::experiment
