#include "fdgcl/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdgcl/datagen.hpp"
#include "fdgcl/errors.hpp"
#include "fdgcl/eval.hpp"
#include "fdgcl/experiment.hpp"
#include "fdgcl/fde_solver.hpp"
#include "fdgcl/io.hpp"
#include "fdgcl/model.hpp"
#include "fdgcl/presets.hpp"
#include "fdgcl/special_functions.hpp"
#include "fdgcl/spectral.hpp"
#include "fdgcl/version.hpp"

namespace fdgcl::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_real(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot parse `" + s + "` as a number");
  }
}

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  int threads = 1;
  std::string preset;
};

/// Tracks written files and emits manifest.json at the end of the run.
class Run {
 public:
  Run(std::vector<std::string> argv, std::string command)
      : argv_(std::move(argv)), command_(std::move(command)), started_(utc_now()) {}

  void set_dir(fs::path dir) { dir_ = std::move(dir); }
  const fs::path& dir() const { return dir_; }
  json& config() { return config_; }
  void set_seed(std::uint64_t s) { seed_ = s; }

  fs::path file(const fs::path& path) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    outputs_.push_back(path.lexically_normal().string());
    return path;
  }

  void write_text(const fs::path& path, const std::string& content) {
    io::write_text_atomic(file(path), content);
  }

  void finish(const std::string& status, const std::string& error = {}) {
    json m = {{"command_line", argv_},
              {"subcommand", command_},
              {"config", config_},
              {"seed", seed_},
              {"artifact_version", kVersion},
              {"started_at", started_},
              {"finished_at", utc_now()},
              {"status", status},
              {"outputs", outputs_}};
    if (!error.empty()) m["error"] = error;
    fs::create_directories(dir_.empty() ? fs::path(".") : dir_);
    io::write_text_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  std::vector<std::string> argv_;
  std::string command_;
  std::string started_;
  fs::path dir_ = ".";
  json config_ = json::object();
  std::uint64_t seed_ = 0;
  std::vector<std::string> outputs_;
};

fs::path require_out(const Globals& g, const std::string& command) {
  if (g.out.empty()) throw UsageError("--out is required for `" + command + "`");
  return g.out;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

/// Defaults, then the named preset, then the config file, then --seed.
ModelConfig resolve_config(const Globals& g, const std::string& config_path) {
  ModelConfig cfg;
  if (!g.preset.empty()) cfg = model_config_from_json(presets::get(g.preset), cfg);
  if (!config_path.empty()) cfg = model_config_from_json(read_json_file(config_path), cfg);
  if (g.seed_given) cfg.seed = g.seed;
  return cfg;
}

struct DataPaths {
  std::string dir = ".";
  std::string graph, features, labels, split;

  void add_options(CLI::App* app) {
    app->add_option("--data", dir, "Directory holding graph.tsv, features.csv, labels.csv, split.json");
    app->add_option("--graph", graph, "Edge list (u<TAB>v)");
    app->add_option("--features", features, "Feature CSV, N rows");
    app->add_option("--labels", labels, "Labels, one integer per line");
    app->add_option("--split", split, "Split JSON with train/val/test arrays");
  }

  fs::path resolve(const std::string& given, const char* fallback) const {
    return given.empty() ? fs::path(dir) / fallback : fs::path(given);
  }

  /// The split file is optional when it was not named explicitly.
  Dataset load(const GraphOptions& options) const {
    const fs::path split_path = resolve(split, "split.json");
    Dataset ds;
    ds.features = io::read_matrix_csv(resolve(features, "features.csv"));
    const auto edges = io::read_edge_list(resolve(graph, "graph.tsv"));
    ds.graph = build_graph(edges.edges, ds.features.rows(), options);
    ds.labels = io::read_labels(resolve(labels, "labels.csv"));
    if (!split.empty() || fs::exists(split_path)) ds.split = io::read_split(split_path);
    ds.validate();
    return ds;
  }
};

std::vector<std::string> column_names(const char* prefix, Index n) {
  std::vector<std::string> names;
  for (Index i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

void write_matrix(Run& run, const fs::path& path, const Matrix& m, const char* prefix) {
  io::write_matrix_csv(run.file(path), m, column_names(prefix, m.cols()));
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  Index n = 0;
  int classes = 0;
  std::optional<double> p_in, p_out, noise;
  Index d_in = 0;
};

void run_synth(const Globals& g, const SynthArgs& a, Run& run) {
  const fs::path out = require_out(g, "synth");
  run.set_dir(out);
  datagen::SbmSpec spec = datagen::sbm_preset(g.preset.empty() ? "hetero" : g.preset, g.seed);
  if (a.n > 0) spec.N = a.n;
  if (a.classes > 0) spec.C = a.classes;
  if (a.d_in > 0) spec.d_in = a.d_in;
  if (a.p_in) spec.p_in = *a.p_in;
  if (a.p_out) spec.p_out = *a.p_out;
  if (a.noise) spec.noise = *a.noise;
  run.config() = {{"preset", g.preset.empty() ? "hetero" : g.preset},
                  {"N", spec.N},
                  {"C", spec.C},
                  {"p_in", spec.p_in},
                  {"p_out", spec.p_out},
                  {"d_in", spec.d_in},
                  {"noise", spec.noise}};
  run.set_seed(spec.seed);
  const Dataset ds = datagen::generate_sbm(spec);
  io::write_edge_list(run.file(out / "graph.tsv"), ds.graph);
  io::write_matrix_csv(run.file(out / "features.csv"), ds.features);
  io::write_labels(run.file(out / "labels.csv"), ds.labels);
  io::write_split(run.file(out / "split.json"), ds.split);
  std::cout << "nodes " << ds.num_nodes() << "\nedges " << ds.graph.num_edges() << "\nhomophily "
            << datagen::edge_homophily(ds.graph, ds.labels) << '\n';
}

// -------------------------------------------------------------- diffuse

struct DiffuseArgs {
  std::string graph, features;
  DiffusionConfig cfg;
  std::string variant = "grand";
  std::string scheme = "explicit";
  bool no_self_loops = false;
};

void run_diffuse(const Globals& g, DiffuseArgs a, Run& run) {
  const fs::path out = require_out(g, "diffuse");
  run.set_dir(out.parent_path().empty() ? fs::path(".") : out.parent_path());
  a.cfg.variant = parse_variant(a.variant);
  a.cfg.scheme = parse_scheme(a.scheme);
  a.cfg.validate();
  run.config() = {{"alpha", a.cfg.alpha}, {"T", a.cfg.T},          {"h", a.cfg.h},
                  {"m", a.cfg.m},         {"variant", a.variant}, {"scheme", a.scheme},
                  {"self_loops", !a.no_self_loops}};
  const Matrix x = io::read_matrix_csv(a.features);
  const auto edges = io::read_edge_list(a.graph);
  const Graph graph = build_graph(edges.edges, x.rows(), {.add_self_loops = !a.no_self_loops});
  write_matrix(run, out, diffuse(graph, x, a.cfg), "z");
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  DataPaths data;
  std::string config;
  bool allow_equal_alpha = false;
  bool no_self_loops = false;
};

void run_train(const Globals& g, const TrainArgs& a, Run& run) {
  const fs::path out = require_out(g, "train");
  run.set_dir(out);
  ModelConfig cfg = resolve_config(g, a.config);
  if (a.allow_equal_alpha) cfg.allow_equal_alpha = true;
  cfg.validate();
  run.config() = to_json(cfg);
  run.set_seed(cfg.seed);
  const Dataset ds = a.data.load({.add_self_loops = !a.no_self_loops});
  const TrainRun result = train(ds, cfg);

  write_matrix(run, out / "embeddings.csv", result.embeddings, "e");
  write_matrix(run, out / "z1.csv", result.z1, "z");
  write_matrix(run, out / "z2.csv", result.z2, "z");
  std::ostringstream hist;
  hist << "epoch,loss,regularizer,alignment\n";
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    hist << e << ',' << fmt(result.loss_history[e]) << ',' << fmt(result.reg_history[e]) << ','
         << fmt(result.alignment_history[e]) << '\n';
  }
  run.write_text(out / "loss_history.csv", hist.str());
  write_params(run.file(out / "params.bin"), result.params);
  run.write_text(out / "config.json", to_json(cfg).dump(2) + "\n");

  if (!result.loss_history.empty()) {
    std::cout << "initial_loss " << fmt(result.loss_history.front()) << "\nfinal_loss "
              << fmt(result.loss_history.back()) << '\n';
  }
  std::cout << "final_alignment " << fmt(result.final_alignment) << '\n';
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string embeddings, labels, split;
  std::vector<std::string> views;
  double probe_lr = 0.01;
  int probe_epochs = 300;
};

void run_eval(const Globals& g, const EvalArgs& a, Run& run) {
  const fs::path out = g.out.empty() ? fs::path(".") : fs::path(g.out);
  run.set_dir(out);
  run.set_seed(g.seed);
  run.config() = {{"probe_lr", a.probe_lr}, {"probe_epochs", a.probe_epochs}};
  const Matrix emb = io::read_matrix_csv(a.embeddings);
  const std::vector<int> labels = io::read_labels(a.labels);
  const Split split = io::read_split(a.split);
  const int classes = *std::max_element(labels.begin(), labels.end()) + 1;
  const eval::ProbeModel probe =
      eval::train_probe(emb, labels, split.train, a.probe_lr, a.probe_epochs, g.seed, classes);

  std::ostringstream acc;
  acc << "split,accuracy\n";
  for (const auto& [name, idx] :
       {std::pair{"train", &split.train}, {"val", &split.val}, {"test", &split.test}}) {
    if (idx->empty()) continue;
    const double v = eval::accuracy(probe, emb, labels, *idx);
    acc << name << ',' << fmt(v) << '\n';
    std::cout << name << "_accuracy " << fmt(v) << '\n';
  }
  run.write_text(out / "accuracy.csv", acc.str());
  run.write_text(out / "rc.csv", eval::clustering_csv(eval::clustering_ratio(emb, labels, g.seed)));

  Matrix z1 = emb, z2 = emb;
  if (!a.views.empty()) {
    if (a.views.size() != 2) throw UsageError("--views takes exactly two files");
    z1 = io::read_matrix_csv(a.views[0]);
    z2 = io::read_matrix_csv(a.views[1]);
  }
  const eval::CollapseReport report = eval::collapse_report(z1, z2);
  run.write_text(out / "collapse.csv", eval::collapse_csv(report));
  std::cout << "participation_z1 " << fmt(report.participation1) << "\nparticipation_z2 "
            << fmt(report.participation2) << "\nalignment " << fmt(report.alignment) << '\n';
}

// ------------------------------------------------------- spectral-check

struct SpectralArgs {
  std::string graph;
  double alpha1 = 0.1, alpha2 = 0.9, tau = 20.0, h = 0.1;
  int m = 1;
  std::string scheme = "implicit";
  bool no_self_loops = false;
};

void run_spectral(const Globals& g, const SpectralArgs& a, Run& run) {
  const fs::path out = require_out(g, "spectral-check");
  run.set_dir(out.parent_path().empty() ? fs::path(".") : out.parent_path());
  run.config() = {{"alpha1", a.alpha1}, {"alpha2", a.alpha2}, {"tau", a.tau}, {"h", a.h},
                  {"m", a.m},           {"scheme", a.scheme}, {"self_loops", !a.no_self_loops}};
  const Graph graph = io::load_graph(a.graph, {.add_self_loops = !a.no_self_loops});
  spectral::TheoremOptions opts;
  opts.scheme = parse_scheme(a.scheme);
  const auto report = spectral::theorem_check(graph, a.alpha1, a.alpha2, a.tau, a.h, a.m, opts);
  run.write_text(out, spectral::theorem_csv(report));
  auto yn = [](bool b) { return b ? "pass" : "fail"; };
  std::cout << "monotone_g " << yn(report.monotone1 && report.monotone2) << "\nratio_order "
            << yn(report.ordering) << "\nsweep_gap " << yn(report.gap_growth) << '\n';
}

// ------------------------------------------------------------------- ml

struct MlArgs {
  double alpha = 0.5, lam = 1.0, t = 1.0;
  int asymptotic = 0;
};

void run_ml(const Globals& g, const MlArgs& a, Run& run) {
  run.set_dir(g.out.empty() ? fs::path(".") : fs::path(g.out));
  run.config() = {{"alpha", a.alpha}, {"lam", a.lam}, {"t", a.t}, {"asymptotic", a.asymptotic}};
  const special::MLParams p{a.alpha, a.lam, a.t};
  const double v = a.asymptotic > 0 ? special::ml_asymptotic(p, a.asymptotic)
                                    : special::mittag_leffler(p);
  std::cout << fmt(v) << '\n';
}

// --------------------------------------------------------------- ablate

struct AblateArgs {
  DataPaths data;
  std::string synth;
  std::string config;
  std::string grid;
  std::string losses = "reg_cosmean";
  std::string etas;
  std::string reg_gradients;
  int seeds = 10;
  int epochs = -1;
  int curve_every = 10;
  bool allow_equal_alpha = false;
  bool no_self_loops = false;
};

struct Cell {
  double alpha1, alpha2;
  losses::LossKind loss;
  double eta;
  losses::RegGradient reg;
  std::string label() const {
    std::ostringstream os;
    os << alpha1 << '_' << alpha2 << '_' << losses::to_string(loss) << "_eta" << eta << '_'
       << losses::to_string(reg);
    return os.str();
  }
};

void run_ablate(const Globals& g, const AblateArgs& a, Run& run) {
  const fs::path out = require_out(g, "ablate");
  run.set_dir(out);
  ModelConfig base = resolve_config(g, a.config);
  if (a.epochs >= 0) base.epochs = a.epochs;
  if (a.allow_equal_alpha) base.allow_equal_alpha = true;

  std::vector<std::pair<double, double>> pairs;
  for (const auto& item : split_list(a.grid)) {
    const auto parts = split_list(item, ':');
    if (parts.size() != 2) throw UsageError("grid entries look like alpha1:alpha2, got `" + item + "`");
    pairs.emplace_back(parse_real(parts[0]), parse_real(parts[1]));
  }
  if (pairs.empty()) throw UsageError("--grid is empty");
  std::vector<losses::LossKind> loss_kinds;
  for (const auto& s : split_list(a.losses)) loss_kinds.push_back(losses::parse_loss(s));
  if (loss_kinds.empty()) throw UsageError("--losses is empty");
  std::vector<double> etas;
  for (const auto& s : split_list(a.etas)) etas.push_back(parse_real(s));
  if (etas.empty()) etas.push_back(base.eta);
  std::vector<losses::RegGradient> regs;
  for (const auto& s : split_list(a.reg_gradients)) regs.push_back(losses::parse_reg_gradient(s));
  if (regs.empty()) regs.push_back(base.reg_gradient);
  if (a.seeds < 1) throw UsageError("--seeds must be positive");

  std::vector<Cell> cells;
  for (const auto& [a1, a2] : pairs)
    for (auto loss : loss_kinds)
      for (double eta : etas)
        for (auto reg : regs) cells.push_back({a1, a2, loss, eta, reg});
  for (const auto& c : cells) {
    ModelConfig cfg = base;
    cfg.alpha1 = c.alpha1;
    cfg.alpha2 = c.alpha2;
    cfg.validate();
  }

  const GraphOptions gopts{.add_self_loops = !a.no_self_loops};
  std::vector<Dataset> datasets;
  if (!a.synth.empty()) {
    for (int s = 0; s < a.seeds; ++s)
      datasets.push_back(datagen::generate_sbm(datagen::sbm_preset(a.synth, g.seed + s), gopts));
  } else {
    datasets.push_back(a.data.load(gopts));
  }

  json cfg_json = to_json(base);
  cfg_json["grid"] = a.grid;
  cfg_json["losses"] = a.losses;
  cfg_json["etas"] = etas;
  cfg_json["seeds"] = a.seeds;
  cfg_json["synth"] = a.synth;
  cfg_json["curve_every"] = a.curve_every;
  run.config() = cfg_json;
  run.set_seed(g.seed);

  const int n_cells = static_cast<int>(cells.size());
  std::vector<experiment::SeedResult> results(static_cast<std::size_t>(n_cells * a.seeds));
  experiment::parallel_for(n_cells * a.seeds, g.threads, [&](int task) {
    const Cell& c = cells[static_cast<std::size_t>(task / a.seeds)];
    const int s = task % a.seeds;
    ModelConfig cfg = base;
    cfg.alpha1 = c.alpha1;
    cfg.alpha2 = c.alpha2;
    cfg.loss = c.loss;
    cfg.eta = c.eta;
    cfg.reg_gradient = c.reg;
    cfg.seed = g.seed + static_cast<std::uint64_t>(s);
    const Dataset& ds = datasets[datasets.size() == 1 ? 0 : static_cast<std::size_t>(s)];
    results[static_cast<std::size_t>(task)] = experiment::run_seed(ds, cfg, a.curve_every);
  });

  std::ostringstream table, failures;
  table << "alpha1,alpha2,loss,eta,reg_gradient,seeds,failures,mean_accuracy,std_accuracy,"
           "mean_val_accuracy,mean_alignment,std_alignment,mean_pr_z1,mean_pr_z2,pr_z1_gt_z2\n";
  std::map<std::string, std::ostringstream> curves;
  for (int ci = 0; ci < n_cells; ++ci) {
    const Cell& c = cells[static_cast<std::size_t>(ci)];
    std::vector<double> acc, val, align, pr1, pr2;
    int failed = 0, pr_wins = 0;
    std::ostringstream per_seed;
    per_seed << "seed,test_accuracy,val_accuracy,alignment,pr_z1,pr_z2,final_loss,error\n";
    for (int s = 0; s < a.seeds; ++s) {
      const auto& r = results[static_cast<std::size_t>(ci * a.seeds + s)];
      acc.push_back(r.test_accuracy);
      val.push_back(r.val_accuracy);
      align.push_back(r.alignment);
      pr1.push_back(r.participation1);
      pr2.push_back(r.participation2);
      if (!r.ok()) {
        ++failed;
        failures << c.label() << " seed " << r.seed << ": " << r.error << '\n';
      }
      pr_wins += r.ok() && r.participation1 > r.participation2;
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      per_seed << r.seed << ',' << fmt(r.test_accuracy) << ',' << fmt(r.val_accuracy) << ','
               << fmt(r.alignment) << ',' << fmt(r.participation1) << ','
               << fmt(r.participation2) << ',' << fmt(r.final_loss) << ',' << err << '\n';
    }
    run.write_text(out / "cells" / std::to_string(ci) / "seeds.csv", per_seed.str());
    const auto sa = experiment::summarize(acc);
    const auto sal = experiment::summarize(align);
    table << c.alpha1 << ',' << c.alpha2 << ',' << losses::to_string(c.loss) << ',' << c.eta << ','
          << losses::to_string(c.reg) << ',' << a.seeds << ',' << failed << ',' << fmt(sa.mean)
          << ',' << fmt(sa.stddev) << ',' << fmt(experiment::summarize(val).mean) << ','
          << fmt(sal.mean) << ',' << fmt(sal.stddev) << ','
          << fmt(experiment::summarize(pr1).mean) << ','
          << fmt(experiment::summarize(pr2).mean) << ',' << pr_wins << '\n';
    std::cout << c.label() << ": accuracy " << sa.mean << " +- " << sa.stddev << ", alignment "
              << sal.mean << ", pr_z1>pr_z2 " << pr_wins << '/' << a.seeds << '\n';

    if (a.curve_every > 0) {
      auto& curve = curves[losses::to_string(c.loss)];
      if (curve.tellp() == 0) curve << "cell,alpha1,alpha2,eta,reg_gradient,epoch,mean_accuracy,std_accuracy\n";
      std::map<int, std::vector<double>> by_epoch;
      for (int s = 0; s < a.seeds; ++s)
        for (const auto& [epoch, v] : results[static_cast<std::size_t>(ci * a.seeds + s)].curve)
          by_epoch[epoch].push_back(v);
      for (const auto& [epoch, vs] : by_epoch) {
        const auto sm = experiment::summarize(vs);
        curve << ci << ',' << c.alpha1 << ',' << c.alpha2 << ',' << c.eta << ','
              << losses::to_string(c.reg) << ',' << epoch << ',' << fmt(sm.mean) << ','
              << fmt(sm.stddev) << '\n';
      }
    }
  }
  run.write_text(out / "table.csv", table.str());
  for (const auto& [loss, text] : curves) run.write_text(out / ("curves_" + loss + ".csv"), text.str());
  run.write_text(out / "failures.log", failures.str());
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"fdgcl: contrastive learning with fractional-order graph diffusion encoders"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--out", g.out, "Output directory (or file for diffuse / spectral-check)");
  app.add_option("--threads", g.threads, "Worker threads for ablate")->check(CLI::PositiveNumber);
  app.add_option("--preset", g.preset,
                 "Config preset for train/ablate, SBM preset (homo|hetero) for synth");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a stochastic block model dataset");
  synth->add_option("--n", synth_args.n, "Number of nodes");
  synth->add_option("--classes", synth_args.classes, "Number of classes");
  synth->add_option("--d-in", synth_args.d_in, "Feature dimension");
  synth->add_option("--p-in", synth_args.p_in, "Intra-class edge probability");
  synth->add_option("--p-out", synth_args.p_out, "Inter-class edge probability");
  synth->add_option("--noise", synth_args.noise, "Feature noise standard deviation");

  DiffuseArgs diffuse_args;
  auto* diffuse_cmd = app.add_subcommand("diffuse", "Run fractional diffusion on node features");
  diffuse_cmd->set_help_flag("--help", "Print this help message and exit");
  diffuse_cmd->add_option("--graph", diffuse_args.graph, "Edge list")->required();
  diffuse_cmd->add_option("--features", diffuse_args.features, "Feature CSV")->required();
  diffuse_cmd->add_option("--alpha", diffuse_args.cfg.alpha, "Fractional order in (0, 1]");
  diffuse_cmd->add_option("--T", diffuse_args.cfg.T, "Total diffusion time");
  diffuse_cmd->add_option("--h", diffuse_args.cfg.h, "Step size");
  diffuse_cmd->add_option("--m", diffuse_args.cfg.m, "Skip segments");
  diffuse_cmd->add_option("--variant", diffuse_args.variant, "grand|gread");
  diffuse_cmd->add_option("--scheme", diffuse_args.scheme, "explicit|implicit");
  diffuse_cmd->add_option("--gread-gamma", diffuse_args.cfg.gread_gamma, "GREAD diffusion weight");
  diffuse_cmd->add_option("--gread-nu", diffuse_args.cfg.gread_nu, "GREAD reaction weight");
  diffuse_cmd->add_flag("--no-self-loops", diffuse_args.no_self_loops, "Normalize A without I");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train the two-branch encoder");
  train_args.data.add_options(train_cmd);
  train_cmd->add_option("--config", train_args.config, "JSON config (ModelConfig keys)");
  train_cmd->add_flag("--allow-equal-alpha", train_args.allow_equal_alpha, "Permit alpha1 == alpha2");
  train_cmd->add_flag("--no-self-loops", train_args.no_self_loops, "Normalize A without I");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Linear probe, clustering ratio and collapse report");
  eval_cmd->add_option("--embeddings", eval_args.embeddings, "Embedding CSV")->required();
  eval_cmd->add_option("--labels", eval_args.labels, "Labels file")->required();
  eval_cmd->add_option("--split", eval_args.split, "Split JSON")->required();
  eval_cmd->add_option("--views", eval_args.views, "Z1.csv Z2.csv for the collapse report")->expected(2);
  eval_cmd->add_option("--probe-lr", eval_args.probe_lr, "Probe learning rate");
  eval_cmd->add_option("--probe-epochs", eval_args.probe_epochs, "Probe epochs");

  SpectralArgs spectral_args;
  auto* spectral_cmd = app.add_subcommand("spectral-check", "Check eigenmode amplification ordering");
  spectral_cmd->set_help_flag("--help", "Print this help message and exit");
  spectral_cmd->add_option("--graph", spectral_args.graph, "Edge list")->required();
  spectral_cmd->add_option("--alpha1", spectral_args.alpha1, "Smaller order");
  spectral_cmd->add_option("--alpha2", spectral_args.alpha2, "Larger order");
  spectral_cmd->add_option("--tau", spectral_args.tau, "Segment length");
  spectral_cmd->add_option("--h", spectral_args.h, "Step size");
  spectral_cmd->add_option("--m", spectral_args.m, "Skip segments");
  spectral_cmd->add_option("--scheme", spectral_args.scheme, "explicit|implicit");
  spectral_cmd->add_flag("--no-self-loops", spectral_args.no_self_loops, "Normalize A without I");

  MlArgs ml_args;
  auto* ml_cmd = app.add_subcommand("ml", "Evaluate E_alpha(-lam t^alpha)");
  ml_cmd->add_option("--alpha", ml_args.alpha, "Order")->required();
  ml_cmd->add_option("--lam", ml_args.lam, "Rate")->required();
  ml_cmd->add_option("--t", ml_args.t, "Time")->required();
  ml_cmd->add_option("--asymptotic", ml_args.asymptotic, "Use N terms of the large-time expansion");

  AblateArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "Grid of train+eval runs over orders and losses");
  ablate_args.data.add_options(ablate_cmd);
  ablate_cmd->add_option("--synth", ablate_args.synth, "Generate an SBM per seed (homo|hetero)");
  ablate_cmd->add_option("--config", ablate_args.config, "JSON config (ModelConfig keys)");
  ablate_cmd->add_option("--grid", ablate_args.grid, "alpha1:alpha2 pairs, comma separated")->required();
  ablate_cmd->add_option("--losses", ablate_args.losses, "Comma separated loss names");
  ablate_cmd->add_option("--etas", ablate_args.etas, "Comma separated regularizer weights");
  ablate_cmd->add_option("--reg-gradients", ablate_args.reg_gradients, "full,stop");
  ablate_cmd->add_option("--seeds", ablate_args.seeds, "Seeds per cell");
  ablate_cmd->add_option("--epochs", ablate_args.epochs, "Override training epochs");
  ablate_cmd->add_option("--curve-every", ablate_args.curve_every, "Probe every K epochs (0: off)");
  ablate_cmd->add_flag("--allow-equal-alpha", ablate_args.allow_equal_alpha, "Permit alpha1 == alpha2");
  ablate_cmd->add_flag("--no-self-loops", ablate_args.no_self_loops, "Normalize A without I");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run(std::vector<std::string>(argv, argv + argc), sub->get_name());
  try {
    if (sub == synth) run_synth(g, synth_args, run);
    else if (sub == diffuse_cmd) run_diffuse(g, diffuse_args, run);
    else if (sub == train_cmd) run_train(g, train_args, run);
    else if (sub == eval_cmd) run_eval(g, eval_args, run);
    else if (sub == spectral_cmd) run_spectral(g, spectral_args, run);
    else if (sub == ml_cmd) run_ml(g, ml_args, run);
    else run_ablate(g, ablate_args, run);
    run.finish("ok");
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    try {
      run.finish("error", e.what());
    } catch (const std::exception& inner) {
      std::cerr << "error: could not write manifest: " << inner.what() << '\n';
    }
    return 2;
  }
}

}  // namespace fdgcl::cli
