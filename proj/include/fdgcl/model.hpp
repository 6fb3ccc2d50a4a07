#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <json.hpp>

#include "fdgcl/fde_solver.hpp"
#include "fdgcl/graph.hpp"
#include "fdgcl/losses.hpp"
#include "fdgcl/types.hpp"

namespace fdgcl {

struct ModelConfig {
  double alpha1 = 0.01;
  double alpha2 = 1.0;
  double T = 20.0;
  double h = 1.0;
  int m = 4;
  int d = 256;
  double beta = 0.55;
  double eta = 0.15;
  double lr = 0.01;
  double weight_decay = 5e-4;
  int epochs = 30;
  std::uint64_t seed = 0;

  losses::LossKind loss = losses::LossKind::reg_cosmean;
  losses::RegGradient reg_gradient = losses::RegGradient::full;
  double lambda_bt = 0.0051;
  Variant variant = Variant::grand;
  Scheme scheme = Scheme::explicit_euler;
  double gread_gamma = 1.0;
  double gread_nu = 0.5;
  bool allow_equal_alpha = false;

  DiffusionConfig diffusion(int branch) const;
  losses::LossOptions loss_options() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Reads the keys present in `j` over `base`; unknown keys raise ConfigError.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});
nlohmann::json to_json(const ModelConfig& cfg);

struct EncoderParams {
  Matrix W1;  // d_in x d
  Matrix W2;
};

EncoderParams init_params(Index d_in, Index d, std::uint64_t seed);

struct ForwardResult {
  Matrix z1, z2;
  Matrix pre1, pre2;
};

/// Per-dataset solvers for both branches; building one factorizes the
/// implicit systems once.
class Encoder {
 public:
  Encoder(const Graph& graph, const ModelConfig& cfg);

  ForwardResult forward(const Matrix& x, const EncoderParams& params) const;
  /// dW_l = X^T adjoint(G_l .* 1[pre_l > 0]) + wd W_l. Throws VariantError for GREAD.
  std::pair<Matrix, Matrix> backward(const Matrix& x, const EncoderParams& params,
                                     const Matrix& g1, const Matrix& g2,
                                     const ForwardResult& fwd) const;

 private:
  FractionalDiffusion branch1_;
  FractionalDiffusion branch2_;
  double weight_decay_;
};

ForwardResult forward(const Dataset& data, const EncoderParams& params, const ModelConfig& cfg);
std::pair<Matrix, Matrix> backward(const Dataset& data, const EncoderParams& params,
                                   const ModelConfig& cfg, const Matrix& g1, const Matrix& g2,
                                   const ForwardResult& fwd);

struct AdamState {
  Matrix m1, v1, m2, v2;
};

/// One Adam update (beta1 0.9, beta2 0.999, eps 1e-8) with bias correction at step t >= 1.
void adam_step(EncoderParams& params, const std::pair<Matrix, Matrix>& grads, AdamState& state,
               double lr, int t);

struct TrainRun {
  EncoderParams params;
  std::vector<double> loss_history;       // objective before each update
  std::vector<double> reg_history;        // eta |<c1, c2>| (0 for other losses)
  std::vector<double> alignment_history;  // |<c1, c2>| before each update
  Matrix embeddings;  // beta Z1 + (1 - beta) Z2 after the last update
  Matrix z1, z2;
  double final_alignment = 0.0;
  std::uint64_t seed = 0;
};

/// Called with (epoch, embeddings) before update `epoch` and once more with
/// epoch == cfg.epochs for the final state.
using EpochCallback = std::function<void(int, const Matrix&)>;

TrainRun train(const Dataset& data, const ModelConfig& cfg, const EpochCallback& on_epoch = {});

/// 16-byte header (8-byte magic "FDGCLPRM", uint32 d_in, uint32 d) followed
/// by W1 then W2 as little-endian float64 in row-major order.
void write_params(const std::filesystem::path& path, const EncoderParams& params);
EncoderParams read_params(const std::filesystem::path& path);

}  // namespace fdgcl
