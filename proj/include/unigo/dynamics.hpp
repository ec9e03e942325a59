#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unigo/graph.hpp"
#include "unigo/kernels.hpp"
#include "unigo/rng.hpp"

namespace unigo {

using kernels::NoiseMode;

// Per-node parameters and stepping controls of the unified dynamics.
// alpha_i in [0,1] is stubbornness toward the initial opinion, d_i in [0,1]
// the confidence threshold gating neighbor interaction, gamma_i >= 0 the
// additive noise gain. include_self puts node i into its own fusion
// neighborhood with weight 1.
struct DynamicsConfig {
  std::vector<double> alpha;
  std::vector<double> d;
  std::vector<double> gamma;
  NoiseMode noise_mode = NoiseMode::None;
  double sigma = 0.0;   // additive mode: eta ~ N(0, sigma^2) per (node, step)
  double jump_m = 0.0;  // jump mode: replace update with U[0, L) w.p. m
  double jump_L = 1.0;
  bool include_self = true;
  int max_steps = 200;
  int conv_window = 10;
  double conv_tol = 1e-4;
  std::uint64_t seed = 0;

  void validate(int n) const;  // throws ParamError on violated invariants
  friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;
};

struct Trajectory {
  int n = 0;
  int steps = 0;  // transitions; the matrix has steps+1 columns
  std::vector<double> values;  // node-major: values[node * (steps+1) + t]
  std::optional<int> convergence_step;
  bool clamped = false;

  double at(int node, int t) const { return values[static_cast<std::size_t>(node) * (steps + 1) + t]; }
  std::vector<double> column(int t) const;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// One synchronous update (Euler step of size 1). `noise_rng` supplies the
// per-step draws; pass the same generator across consecutive steps to
// reproduce a simulate() run.
std::vector<double> step(const Graph& g, const DynamicsConfig& cfg,
                         const std::vector<double>& x_t,
                         const std::vector<double>& x0, SplitMix64& noise_rng,
                         bool* clamped = nullptr);

// Runs cfg.max_steps updates from x0 and attaches the convergence step
// (window cfg.conv_window, tolerance cfg.conv_tol). Noise draws come from a
// stream derived from cfg.seed, so runs are reproducible bit-for-bit.
Trajectory simulate(const Graph& g, const DynamicsConfig& cfg,
                    const std::vector<double>& x0);

// Smallest t such that the mean absolute per-node change stays <= tol for
// `window` consecutive steps starting at t; nullopt when no such t exists.
std::optional<int> detect_convergence(const Trajectory& traj, int window, double tol);

enum class Equilibrium { Consensus, Polarization, Fragmentation };

// Sorts opinions and splits into clusters wherever consecutive values
// differ by more than `gap`: 1 cluster = consensus, 2 = polarization,
// 3+ = fragmentation.
Equilibrium classify_equilibrium(const std::vector<double>& x_final, double gap);
int count_opinion_clusters(const std::vector<double>& x_final, double gap);
std::string to_string(Equilibrium e);

// Closed-form fixed point x* = (I - (I-A)W)^{-1} A x0 of the ungated,
// noise-free dynamics without self-inclusion, where A = diag(alpha) and W
// is the row-normalized adjacency with zero diagonal (isolated nodes get
// W_ii = 1 so they hold their opinion, matching the simulation fallback).
// Requires alpha_i in (0,1]; alpha_i = 0 raises a singularity error.
std::vector<double> fj_equilibrium(const Graph& g, const std::vector<double>& alpha,
                                   const std::vector<double>& x0);

enum class Preset { DeGroot, FJ, HK, HKNoisy, CommunityFJHK, Unified };

Preset preset_from_name(const std::string& name);
std::string to_string(Preset p);

struct PresetOptions {
  std::optional<double> alpha;  // constant stubbornness
  std::optional<double> d;      // constant confidence threshold
  std::optional<double> sigma;  // enables additive Gaussian noise
  std::optional<double> jump_m;
  std::optional<double> jump_L;
  std::optional<std::vector<double>> alpha_per_node;
  std::optional<std::vector<double>> d_per_node;
  std::optional<std::vector<double>> alpha_per_community;  // community presets
  std::optional<std::vector<double>> d_per_community;
  int max_steps = 200;
  int conv_window = 10;
  double conv_tol = 1e-4;
  std::uint64_t seed = 0;
};

// Instantiates the classical models inside the unified rule:
//   degroot        alpha=0, d=1, self included
//   fj             d=1, self excluded, alpha from options
//   hk             alpha=0, d from options, self included
//   hk_noisy       hk plus jump noise (m, L)
//   community_fj_hk  alpha and d constant per community of g
//   unified        all fields free
DynamicsConfig make_preset(Preset p, const Graph& g, const PresetOptions& opt = {});

}  // namespace unigo
