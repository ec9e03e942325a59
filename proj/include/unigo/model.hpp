#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unigo/graph.hpp"
#include "unigo/rng.hpp"
#include "unigo/tape.hpp"
#include "unigo/tensor.hpp"

namespace unigo {

enum class ModelMode { Full, AblationC };

ModelMode model_mode_from_name(const std::string& name);
std::string to_string(ModelMode m);

struct UniGoHyper {
  int t_l = 10;
  int t_h = 90;
  int feat = 0;    // encoder width F; 0 defaults to t_l
  int feat_c = 0;  // pooled width F'; 0 defaults to F
  int heads = 2;
  int clusters = 50;
  int enc_layers = 2;
  int evo_layers = 3;
  double tau = 1.0;
  double lambda = 0.5;
  double dropout = 0.0;
  ModelMode mode = ModelMode::Full;

  int F() const { return feat > 0 ? feat : t_l; }
  int Fc() const { return feat_c > 0 ? feat_c : F(); }
  void validate() const;
};

// All learnable tensors of the coarsen-evolve-refine pipeline. In
// ablation mode only the evolution stack (run on the original graph) and
// the temporal expansion are present.
struct UniGoParams {
  UniGoHyper hyper;
  std::vector<Tensor2> enc_self, enc_neigh;  // per encoder layer, F -> F
  std::vector<Tensor2> centers;              // per head, K x F
  Tensor2 head_w;                            // H x 1
  Tensor2 head_b;                            // 1 x 1
  Tensor2 pool_w;                            // F x F'
  std::vector<Tensor2> evo_self, evo_neigh;  // per layer; last maps to t_l
  Tensor2 expand_w;                          // t_l x t_h
  Tensor2 expand_b;                          // 1 x t_h
  Tensor2 refine_x;                          // t_l x t_l
  Tensor2 refine_z;                          // t_h x t_l
  Tensor2 refine_y;                          // 2*t_l x t_h

  std::vector<std::pair<std::string, Tensor2*>> named();
  std::vector<std::pair<std::string, const Tensor2*>> named() const;
};

// Uniform +-1/sqrt(fan_in) weights, centers +-1/sqrt(F), zero biases.
UniGoParams init_params(const UniGoHyper& hyper, std::uint64_t seed);

// Tape-based forward pass. Pushes every parameter as a leaf (handles
// aligned with params.named()) so callers can read gradients after
// backward(). Dropout masks are drawn from dropout_rng in training mode.
struct ForwardOptions {
  bool training = false;
  SplitMix64* dropout_rng = nullptr;
};

struct TapedForward {
  Tape::Var y = -1;
  std::optional<Tape::Var> s;
  std::vector<Tape::Var> param_vars;
  Tape::Var x = -1;
};

TapedForward model_forward(Tape& tape, const Graph& g, const Tensor2& X,
                           const UniGoParams& params, const ForwardOptions& opt = {});

// lambda * KL(P || S) + MSE(Y, Y_true) where P is the squared-and-
// renormalized sharpening of S's current value, treated as a constant.
// The KL term is dropped when S is absent or lambda == 0. kl_target, when
// given, replaces the freshly sharpened P (gradient checks freeze it so
// the loss stays differentiable as stated).
Tape::Var model_loss(Tape& tape, const TapedForward& fwd, const Tensor2& y_true,
                     double lambda, const Tensor2* kl_target = nullptr);

// Sharpened self-target of Eq-style cluster losses:
// P_ij = (S_ij^2 / f_j) / sum_k (S_ik^2 / f_k), f_j = column sums of S.
Tensor2 sharpen_assignment(const Tensor2& s);

// Evaluation-mode convenience wrappers (fresh scratch tape, no dropout).
struct Prediction {
  Tensor2 y;
  std::optional<Tensor2> s;
};
Prediction predict(const Graph& g, const Tensor2& X, const UniGoParams& params);

// Stage wrappers used by tests; each runs the same tape code as
// model_forward on a scratch tape.
Tensor2 encode(const Graph& g, const Tensor2& X, const UniGoParams& params);
struct PoolResult {
  Tensor2 s;
  Tensor2 hc;
};
PoolResult pool(const Tensor2& E, const UniGoParams& params);
Tensor2 evolve(const Tensor2& S, const Graph& g, const Tensor2& Hc, const UniGoParams& params);
Tensor2 expand_time(const Tensor2& Hk, const UniGoParams& params);
Tensor2 refine(const Tensor2& X, const Tensor2& S, const Tensor2& Z, const UniGoParams& params);

// Checkpoint I/O: JSON with a hyperparameter header and a name -> {shape,
// data} map; round-trips bit-exactly. extra, when non-null, carries
// additional header fields (e.g. the training split seed).
void save_params(const UniGoParams& params, const std::string& path,
                 const std::string& extra_json = "");
UniGoParams load_params(const std::string& path, std::string* extra_json = nullptr);

}  // namespace unigo
