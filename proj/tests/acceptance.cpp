// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// nonzero when any counted criterion fails. Criterion 10 needs Cora in the
// artifact file formats under $FDGCL_CORA_DIR and never affects the exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fdgcl/datagen.hpp"
#include "fdgcl/errors.hpp"
#include "fdgcl/experiment.hpp"
#include "fdgcl/fde_solver.hpp"
#include "fdgcl/io.hpp"
#include "fdgcl/model.hpp"
#include "fdgcl/presets.hpp"
#include "fdgcl/random.hpp"
#include "fdgcl/special_functions.hpp"
#include "fdgcl/spectral.hpp"
#include "oracles.hpp"

using namespace fdgcl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  bool counted;
  std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

Matrix random_matrix(Index r, Index c, std::uint64_t seed) {
  Rng rng(seed, 404);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Graph random_connected_graph(Index n, std::uint64_t seed, double p_in = 0.3, double p_out = 0.05) {
  datagen::SbmSpec spec;
  spec.N = n;
  spec.C = 3;
  spec.p_in = p_in;
  spec.p_out = p_out;
  spec.d_in = 3;
  spec.seed = seed;
  return datagen::generate_sbm(spec).graph;
}

ModelConfig preset_config(const std::string& name) { return model_config_from_json(presets::get(name)); }

// 1 --------------------------------------------------------------------------
Outcome solver_vs_mittag_leffler() {
  // On two nodes with self-loops, (1, -1) is the L_bar eigenvector with eigenvalue 1.
  const std::vector<Edge> edges = {{0, 1}};
  const Graph g = build_graph(edges, 2);
  Matrix z0(2, 1);
  z0 << 1.0, -1.0;
  Outcome out{true, ""};
  for (double alpha : {0.3, 0.5, 0.9}) {
    const double ref = oracle::ml_series(alpha, 1.0);
    const double e1 = std::fabs(segment(Variant::grand, g, z0, alpha, 1.0, 1e-3)(0, 0) - ref) / ref;
    const double e2 = std::fabs(segment(Variant::grand, g, z0, alpha, 1.0, 5e-4)(0, 0) - ref) / ref;
    out.pass = out.pass && e1 < 1e-2 && e2 < e1;
    out.detail += "a=" + fmt(alpha, 2) + " err " + fmt(e1, 3) + "->" + fmt(e2, 3) + "; ";
  }
  return out;
}

// 2 --------------------------------------------------------------------------
Outcome alpha_one_is_forward_euler() {
  const Graph g = random_connected_graph(20, 2);
  const Matrix lap = g.dense_laplacian();
  const Matrix z0 = random_matrix(20, 3, 3);
  const double h = 0.05;
  Matrix ref = z0;
  for (int k = 0; k < 100; ++k) ref = ref - h * lap * ref;
  const Matrix got = segment(Variant::grand, g, z0, 1.0, 100 * h, h);
  const double err = (got - ref).cwiseAbs().maxCoeff();
  return {err < 1e-12, "max |diff| " + fmt(err, 3)};
}

// 3 --------------------------------------------------------------------------
Outcome amplification_identity() {
  const Graph g = random_connected_graph(30, 4);
  const auto basis = spectral::eigh(g.dense_laplacian());
  double worst = 0.0;
  for (int m : {1, 3}) {
    DiffusionConfig cfg;
    cfg.alpha = 0.6;
    cfg.h = 0.25;
    cfg.m = m;
    cfg.T = 2.0 * m;
    const Vector profile = spectral::amplification_profile(g, basis, cfg);
    for (Index i = 0; i < basis.size(); ++i) {
      const double lam = std::max(basis.eigenvalues[i], 0.0);
      const double e = oracle::scalar_segment(cfg.alpha, lam, cfg.h, cfg.steps_per_segment(), false);
      worst = std::max(worst, std::fabs(profile[i] - oracle::geometric(e, m)));
    }
  }
  return {worst < 1e-8, "max |diff| " + fmt(worst, 3)};
}

// 4 --------------------------------------------------------------------------
Outcome ordering_direction() {
  int ordered = 0;
  int growing = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = random_connected_graph(30, 100 + seed);
    const auto report = spectral::theorem_check(g, 0.1, 0.9, 20.0, 0.1, 1);
    if (report.monotone1 && report.monotone2 && report.ordering) ++ordered;
    if (report.gap_growth) ++growing;
  }
  return {ordered == 10 && growing == 10,
          "(i)+(ii) " + std::to_string(ordered) + "/10, (iii) " + std::to_string(growing) + "/10"};
}

// 5 --------------------------------------------------------------------------
Outcome end_to_end_gradient() {
  double worst = 0.0;
  int checked = 0;
  for (double alpha : {0.3, 0.7, 1.0}) {
    int done = 0;
    for (std::uint64_t seed = 1; done < 3 && seed < 100; ++seed) {
      Dataset data;
      data.graph = random_connected_graph(10, seed, 0.6, 0.3);
      data.features = random_matrix(10, 3, seed).cwiseAbs();
      data.labels.assign(10, 0);
      ModelConfig cfg;
      cfg.alpha1 = alpha;
      cfg.alpha2 = std::min(1.0, alpha + 0.3);
      cfg.allow_equal_alpha = true;
      cfg.T = 3.0;
      cfg.h = 0.5;
      cfg.m = 2;
      cfg.d = 2;
      EncoderParams p = init_params(3, 2, seed + 7);
      p.W1.array() += 0.25;
      p.W2.array() += 0.25;
      const ForwardResult f = forward(data, p, cfg);
      if ((f.z1.rowwise().norm().array() == 0.0).any() || (f.z2.rowwise().norm().array() == 0.0).any())
        continue;
      ++done;
      auto objective = [&](const EncoderParams& q) {
        const ForwardResult r = forward(data, q, cfg);
        return losses::compute(cfg.loss, r.z1, r.z2, cfg.loss_options()).value +
               0.5 * cfg.weight_decay * (q.W1.squaredNorm() + q.W2.squaredNorm());
      };
      const auto g = losses::compute(cfg.loss, f.z1, f.z2, cfg.loss_options());
      const auto grads = backward(data, p, cfg, g.grad1, g.grad2, f);
      const Matrix fd1 = oracle::fd_gradient([&](const Matrix& w) { return objective({w, p.W2}); }, p.W1, 1e-6);
      const Matrix fd2 = oracle::fd_gradient([&](const Matrix& w) { return objective({p.W1, w}); }, p.W2, 1e-6);
      worst = std::max({worst, oracle::rel_error(grads.first, fd1), oracle::rel_error(grads.second, fd2)});
    }
    checked += done;
  }
  return {checked == 9 && worst < 1e-4, std::to_string(checked) + " instances, max rel err " + fmt(worst, 3)};
}

// 6 --------------------------------------------------------------------------
Outcome adjoint_identity() {
  const Graph g = random_connected_graph(20, 6);
  const Matrix x = random_matrix(20, 3, 7);
  const Matrix gr = random_matrix(20, 3, 8);
  double worst = 0.0;
  int configs = 0;
  for (const auto& name : presets::names()) {
    const ModelConfig cfg = preset_config(name);
    for (int branch : {1, 2}) {
      const DiffusionConfig dc = cfg.diffusion(branch);
      const double lhs = (diffuse(g, x, dc).array() * gr.array()).sum();
      const double rhs = (x.array() * diffuse_adjoint(g, gr, dc).array()).sum();
      worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs)));
      ++configs;
    }
  }
  return {worst < 1e-8, std::to_string(configs) + " orders, max rel diff " + fmt(worst, 3)};
}

// 7-9 share training runs on the SBM presets ----------------------------------
std::vector<experiment::SeedResult> run_seeds(const std::string& sbm, const ModelConfig& base,
                                              int curve_every = 0) {
  std::vector<experiment::SeedResult> out;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset data = datagen::generate_sbm(datagen::sbm_preset(sbm, seed));
    ModelConfig cfg = base;
    cfg.seed = seed;
    out.push_back(experiment::run_seed(data, cfg, curve_every));
  }
  return out;
}

// Runs with the preset orders (equal = false) or with alpha1 = alpha2 = 1.
const std::vector<experiment::SeedResult>& sbm_runs(const std::string& sbm, bool equal) {
  static std::map<std::pair<std::string, bool>, std::vector<experiment::SeedResult>> cache;
  const auto key = std::make_pair(sbm, equal);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  ModelConfig cfg = preset_config("sbm");
  if (equal) {
    cfg.alpha1 = 1.0;
    cfg.alpha2 = 1.0;
    cfg.allow_equal_alpha = true;
  }
  return cache.emplace(key, run_seeds(sbm, cfg)).first->second;
}

std::vector<double> field(const std::vector<experiment::SeedResult>& rs,
                          double experiment::SeedResult::*member) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.*member);
  return v;
}

Outcome distinct_orders() {
  const auto a = experiment::summarize(field(sbm_runs("hetero", false), &experiment::SeedResult::test_accuracy));
  const auto b = experiment::summarize(field(sbm_runs("hetero", true), &experiment::SeedResult::test_accuracy));
  const double gap = 100.0 * (a.mean - b.mean);
  return {a.count == 10 && b.count == 10 && gap > 2.0,
          "acc " + fmt(100 * a.mean) + " vs " + fmt(100 * b.mean) + " (gap " + fmt(gap, 3) + " points)"};
}

Outcome regularizer_effect() {
  ModelConfig reg = preset_config("sbm");
  reg.epochs = 200;
  ModelConfig plain = reg;
  plain.eta = 0.0;
  const auto with = run_seeds("hetero", reg, 200);
  const auto without = run_seeds("hetero", plain, 200);
  int smaller = 0;
  for (std::size_t i = 0; i < with.size(); ++i)
    if (with[i].ok() && without[i].ok() && with[i].alignment < without[i].alignment) ++smaller;
  const auto a = experiment::summarize(field(with, &experiment::SeedResult::test_accuracy));
  const auto b = experiment::summarize(field(without, &experiment::SeedResult::test_accuracy));
  return {smaller >= 8 && a.count == 10 && b.count == 10 && a.mean >= b.mean,
          "alignment lower in " + std::to_string(smaller) + "/10 seeds; epoch-200 acc " + fmt(100 * a.mean) +
              " (eta 0.15) vs " + fmt(100 * b.mean) + " (eta 0)"};
}

Outcome collapse_diagnostic() {
  Outcome out{false, ""};
  for (const std::string sbm : {"hetero", "homo"}) {
    int wins = 0;
    for (const auto& r : sbm_runs(sbm, false))
      if (r.ok() && r.participation1 > r.participation2) ++wins;
    out.pass = out.pass || wins >= 8;
    out.detail += sbm + " " + std::to_string(wins) + "/10; ";
  }
  return out;
}

// 10 -------------------------------------------------------------------------
Outcome cora_stretch() {
  const char* dir = std::getenv("FDGCL_CORA_DIR");
  if (dir == nullptr) return {false, "SKIP: set FDGCL_CORA_DIR to a directory with graph.tsv, features.csv, labels.csv, split.json"};
  const std::filesystem::path root(dir);
  const Dataset data = io::load_dataset(root / "graph.tsv", root / "features.csv", root / "labels.csv",
                                        root / "split.json");
  ModelConfig cfg = preset_config("cora");
  const auto result = experiment::run_seed(data, cfg);
  if (!result.ok()) return {false, result.error};
  return {result.test_accuracy >= 0.78, "test accuracy " + fmt(100 * result.test_accuracy)};
}

// 11 -------------------------------------------------------------------------
Outcome special_functions() {
  const double pi = 3.14159265358979323846;
  auto close = [](double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); };
  bool ok = close(special::gamma(1.0), 1.0, 1e-14) && close(special::gamma(4.0), 6.0, 1e-13) &&
            close(special::gamma(0.5), std::sqrt(pi), 1e-14);
  ok = ok && special::mittag_leffler({0.5, 0.0, 3.0}) == 1.0 && special::mittag_leffler({0.7, 2.0, 0.0}) == 1.0;
  ok = ok && close(special::mittag_leffler({1.0, 2.0, 1.0}), std::exp(-2.0), 1e-14);
  ok = ok && close(special::mittag_leffler({0.5, 1.0, 1.0}), std::exp(1.0) * std::erfc(1.0), 1e-13);
  ok = ok && special::order_index(0.75) == 1 && special::order_index(0.1) == 9 && special::order_index(0.5) == 1;
  bool improving = true;
  for (double alpha : {0.3, 0.5, 0.75})
    for (double lam : {0.5, 1.0, 2.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double tau : {1e2, 1e3, 1e4}) {
        const double ref = oracle::ml_quadrature(alpha, lam, tau);
        const double err =
            std::fabs(special::ml_asymptotic({alpha, lam, tau}, special::order_index(alpha)) - ref) / ref;
        improving = improving && err < prev;
        prev = err;
      }
    }
  return {ok && improving, std::string("identities ") + (ok ? "ok" : "broken") + ", asymptotic " +
                               (improving ? "improving" : "not improving")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "solver matches Mittag-Leffler", 1, true, solver_vs_mittag_leffler},
      {2, "alpha = 1 equals forward Euler", 1, true, alpha_one_is_forward_euler},
      {3, "amplification equals geometric sum", 5, true, amplification_identity},
      {4, "amplification ordering", 30, true, ordering_direction},
      {5, "end-to-end gradient", 10, true, end_to_end_gradient},
      {6, "adjoint identity", 2, true, adjoint_identity},
      {7, "distinct orders beat equal orders", 180, true, distinct_orders},
      {8, "regularizer effect", 300, true, regularizer_effect},
      {9, "dimension-collapse diagnostic", 180, true, collapse_diagnostic},
      {10, "Cora stretch", 600, false, cora_stretch},
      {11, "special functions", 1, true, special_functions},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = out.pass && in_time;
    std::string status = pass ? "PASS" : "FAIL";
    if (!c.counted) status += " (stretch, not counted)";
    std::cout << status << " " << c.id << " " << c.title << ": " << out.detail << " [" << fmt(seconds, 3)
              << " s, budget " << c.budget_seconds << " s" << (in_time ? "" : ", over budget") << "]"
              << std::endl;
    if (!pass && c.counted) ++failures;
  }
  std::cout << (failures == 0 ? "ALL COUNTED CRITERIA PASS" : std::to_string(failures) + " COUNTED CRITERIA FAIL")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
