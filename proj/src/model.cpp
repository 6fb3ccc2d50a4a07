#include "fdgcl/model.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fdgcl/errors.hpp"
#include "fdgcl/random.hpp"

namespace fdgcl {
namespace {

constexpr std::array<char, 8> kParamsMagic = {'F', 'D', 'G', 'C', 'L', 'P', 'R', 'M'};

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_mask(const Matrix& g, const Matrix& pre) {
  return (pre.array() > 0.0).select(g, 0.0);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::ostream& os, double x) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &x, sizeof bits);
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == EOF) throw FormatError("params file truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key `") + key + "`: " + e.what());
  }
}

}  // namespace

DiffusionConfig ModelConfig::diffusion(int branch) const {
  DiffusionConfig c;
  c.alpha = branch == 1 ? alpha1 : alpha2;
  c.T = T;
  c.h = h;
  c.m = m;
  c.variant = variant;
  c.scheme = scheme;
  c.gread_gamma = gread_gamma;
  c.gread_nu = gread_nu;
  return c;
}

losses::LossOptions ModelConfig::loss_options() const {
  losses::LossOptions o;
  o.eta = eta;
  o.reg_gradient = reg_gradient;
  o.lambda_bt = lambda_bt;
  return o;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(alpha1 > 0.0 && alpha1 <= 1.0)) fail("alpha1 must lie in (0, 1]");
  if (!(alpha2 > 0.0 && alpha2 <= 1.0)) fail("alpha2 must lie in (0, 1]");
  if (allow_equal_alpha ? alpha1 > alpha2 : alpha1 >= alpha2) {
    fail(allow_equal_alpha ? "alpha1 must not exceed alpha2"
                           : "alpha1 must be < alpha2 (pass --allow-equal-alpha for ablations)");
  }
  if (d < 1) fail("d must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) fail("beta must lie in [0, 1]");
  if (!(eta >= 0.0)) fail("eta must be non-negative");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (epochs < 0) fail("epochs must be non-negative");
  if (!(lambda_bt >= 0.0)) fail("lambda_bt must be non-negative");
  diffusion(1).validate();
  diffusion(2).validate();
}

ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig cfg) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* const known[] = {
      "alpha1", "alpha2", "T", "h", "m", "d", "beta", "eta", "lr", "weight_decay", "epochs",
      "seed", "loss", "reg_gradient", "lambda_bt", "variant", "scheme", "gread_gamma",
      "gread_nu", "allow_equal_alpha", "name", "description"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown config key `" + item.key() + "`");
  }
  read_key(j, "alpha1", cfg.alpha1);
  read_key(j, "alpha2", cfg.alpha2);
  read_key(j, "T", cfg.T);
  read_key(j, "h", cfg.h);
  read_key(j, "m", cfg.m);
  read_key(j, "d", cfg.d);
  read_key(j, "beta", cfg.beta);
  read_key(j, "eta", cfg.eta);
  read_key(j, "lr", cfg.lr);
  read_key(j, "weight_decay", cfg.weight_decay);
  read_key(j, "epochs", cfg.epochs);
  read_key(j, "seed", cfg.seed);
  read_key(j, "lambda_bt", cfg.lambda_bt);
  read_key(j, "gread_gamma", cfg.gread_gamma);
  read_key(j, "gread_nu", cfg.gread_nu);
  read_key(j, "allow_equal_alpha", cfg.allow_equal_alpha);
  if (j.contains("loss")) cfg.loss = losses::parse_loss(j.at("loss").get<std::string>());
  if (j.contains("reg_gradient"))
    cfg.reg_gradient = losses::parse_reg_gradient(j.at("reg_gradient").get<std::string>());
  if (j.contains("variant")) cfg.variant = parse_variant(j.at("variant").get<std::string>());
  if (j.contains("scheme")) cfg.scheme = parse_scheme(j.at("scheme").get<std::string>());
  return cfg;
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"alpha1", c.alpha1},
          {"alpha2", c.alpha2},
          {"T", c.T},
          {"h", c.h},
          {"m", c.m},
          {"d", c.d},
          {"beta", c.beta},
          {"eta", c.eta},
          {"lr", c.lr},
          {"weight_decay", c.weight_decay},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"loss", losses::to_string(c.loss)},
          {"reg_gradient", losses::to_string(c.reg_gradient)},
          {"lambda_bt", c.lambda_bt},
          {"variant", to_string(c.variant)},
          {"scheme", to_string(c.scheme)},
          {"gread_gamma", c.gread_gamma},
          {"gread_nu", c.gread_nu},
          {"allow_equal_alpha", c.allow_equal_alpha}};
}

EncoderParams init_params(Index d_in, Index d, std::uint64_t seed) {
  if (d_in < 1 || d < 1) throw ShapeError("encoder dimensions must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  auto draw = [&](std::uint64_t stream) {
    Rng rng(seed, stream);
    Matrix w(d_in, d);
    for (Index i = 0; i < d_in; ++i)
      for (Index j = 0; j < d; ++j) w(i, j) = rng.uniform(-bound, bound);
    return w;
  };
  return {draw(streams::encoder1), draw(streams::encoder2)};
}

Encoder::Encoder(const Graph& graph, const ModelConfig& cfg)
    : branch1_(graph, cfg.diffusion(1)),
      branch2_(graph, cfg.diffusion(2)),
      weight_decay_(cfg.weight_decay) {}

ForwardResult Encoder::forward(const Matrix& x, const EncoderParams& params) const {
  if (params.W1.rows() != x.cols() || params.W2.rows() != x.cols()) {
    throw ShapeError("encoder weights do not match the feature dimension");
  }
  ForwardResult r;
  r.pre1 = branch1_.diffuse(x * params.W1);
  r.pre2 = branch2_.diffuse(x * params.W2);
  r.z1 = relu(r.pre1);
  r.z2 = relu(r.pre2);
  return r;
}

std::pair<Matrix, Matrix> Encoder::backward(const Matrix& x, const EncoderParams& params,
                                            const Matrix& g1, const Matrix& g2,
                                            const ForwardResult& fwd) const {
  Matrix dw1 = x.transpose() * branch1_.diffuse_adjoint(relu_mask(g1, fwd.pre1));
  Matrix dw2 = x.transpose() * branch2_.diffuse_adjoint(relu_mask(g2, fwd.pre2));
  dw1 += weight_decay_ * params.W1;
  dw2 += weight_decay_ * params.W2;
  return {std::move(dw1), std::move(dw2)};
}

ForwardResult forward(const Dataset& data, const EncoderParams& params, const ModelConfig& cfg) {
  return Encoder(data.graph, cfg).forward(data.features, params);
}

std::pair<Matrix, Matrix> backward(const Dataset& data, const EncoderParams& params,
                                   const ModelConfig& cfg, const Matrix& g1, const Matrix& g2,
                                   const ForwardResult& fwd) {
  return Encoder(data.graph, cfg).backward(data.features, params, g1, g2, fwd);
}

void adam_step(EncoderParams& params, const std::pair<Matrix, Matrix>& grads, AdamState& state,
               double lr, int t) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (t < 1) throw ConfigError("Adam step index must be >= 1");
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  auto update = [&](Matrix& w, const Matrix& g, Matrix& m, Matrix& v) {
    if (m.size() == 0) {
      m = Matrix::Zero(w.rows(), w.cols());
      v = Matrix::Zero(w.rows(), w.cols());
    }
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
    w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  update(params.W1, grads.first, state.m1, state.v1);
  update(params.W2, grads.second, state.m2, state.v2);
}

TrainRun train(const Dataset& data, const ModelConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  data.validate();
  const Encoder encoder(data.graph, cfg);
  const losses::LossOptions loss_opts = cfg.loss_options();

  TrainRun run;
  run.seed = cfg.seed;
  run.params = init_params(data.features.cols(), cfg.d, cfg.seed);
  AdamState state;
  auto combine = [&](const ForwardResult& f) { return Matrix(cfg.beta * f.z1 + (1.0 - cfg.beta) * f.z2); };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const ForwardResult fwd = encoder.forward(data.features, run.params);
    if (on_epoch) on_epoch(epoch, combine(fwd));
    const losses::LossValueGrad loss = losses::compute(cfg.loss, fwd.z1, fwd.z2, loss_opts);
    if (!std::isfinite(loss.value)) {
      std::ostringstream os;
      os << "loss became non-finite at epoch " << epoch;
      throw NonFiniteError(os.str());
    }
    run.loss_history.push_back(loss.value);
    run.reg_history.push_back(loss.regularizer);
    run.alignment_history.push_back(losses::view_alignment(fwd.z1, fwd.z2));
    const auto grads = encoder.backward(data.features, run.params, loss.grad1, loss.grad2, fwd);
    adam_step(run.params, grads, state, cfg.lr, epoch + 1);
  }
  ForwardResult fwd = encoder.forward(data.features, run.params);
  run.embeddings = combine(fwd);
  if (on_epoch) on_epoch(cfg.epochs, run.embeddings);
  run.final_alignment = losses::view_alignment(fwd.z1, fwd.z2);
  run.z1 = std::move(fwd.z1);
  run.z2 = std::move(fwd.z2);
  return run;
}

void write_params(const std::filesystem::path& path, const EncoderParams& params) {
  std::ostringstream os(std::ios::binary);
  os.write(kParamsMagic.data(), kParamsMagic.size());
  put_u32(os, static_cast<std::uint32_t>(params.W1.rows()));
  put_u32(os, static_cast<std::uint32_t>(params.W1.cols()));
  for (const Matrix* w : {&params.W1, &params.W2})
    for (Index i = 0; i < w->rows(); ++i)
      for (Index j = 0; j < w->cols(); ++j) put_f64(os, (*w)(i, j));
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FileNotFoundError("cannot write " + path.string());
    const std::string bytes = os.str();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  std::filesystem::rename(tmp, path);
}

EncoderParams read_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("file not found: " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kParamsMagic) throw FormatError(path.string() + ": bad params magic");
  const auto d_in = static_cast<Index>(get_le(in, 4));
  const auto d = static_cast<Index>(get_le(in, 4));
  EncoderParams p{Matrix(d_in, d), Matrix(d_in, d)};
  for (Matrix* w : {&p.W1, &p.W2})
    for (Index i = 0; i < d_in; ++i)
      for (Index j = 0; j < d; ++j) {
        const std::uint64_t bits = get_le(in, 8);
        std::memcpy(&(*w)(i, j), &bits, sizeof bits);
      }
  return p;
}

}  // namespace fdgcl
