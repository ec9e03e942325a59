#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unigo/dynamics.hpp"
#include "unigo/graph.hpp"
#include "unigo/model.hpp"
#include "unigo/tensor.hpp"

namespace unigo {

// One (history, horizon) pair on a fixed graph.
struct Sample {
  const Graph* g = nullptr;
  Tensor2 x;       // n x t_l observed opinions
  Tensor2 y_true;  // n x t_h target opinions
  std::string run_id;
};

// Window starts at offsets 0, stride, 2*stride, ... while a full t_l + t_h
// span fits. A too-short trajectory yields an empty list.
std::vector<std::pair<Tensor2, Tensor2>> sliding_windows(const Trajectory& traj, int t_l,
                                                         int t_h, int stride);

// Synthetic-protocol sample: X = columns [0, t_l), Y = columns [t_l, t_l+t_h).
std::pair<Tensor2, Tensor2> head_window(const Trajectory& traj, int t_l, int t_h);

// Seeded shuffle then contiguous partition into train/val/test index sets.
// The unit is whatever the caller indexes (whole runs for synthetic data,
// never individual windows).
struct SplitIndices {
  std::vector<int> train, val, test;
};
SplitIndices split(int count, std::array<double, 3> ratios, std::uint64_t seed);

double mse(const Tensor2& y, const Tensor2& y_true);
// Mean over predicted steps of the 1-Wasserstein distance between the
// column distributions, via the sorted-sample formula.
double mwd(const Tensor2& y, const Tensor2& y_true);

// Repeats the last observed column t_h times.
Tensor2 persistence_baseline(const Tensor2& x, int t_h);

struct TrainConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 100;
  int max_steps = 0;  // 0 = bounded by epochs only
  int batch_runs = 1;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int patience = 0;  // epochs without val improvement; 0 disables
  void validate() const;
};

struct HistoryRow {
  int step = 0;
  double train_loss = 0.0;
  std::optional<double> val_mse;  // present on epoch boundaries
};

struct TrainResult {
  UniGoParams params;  // best on validation when a val set exists, else last
  std::vector<HistoryRow> history;
  double best_val_mse = 0.0;
  int best_step = 0;
};

// Adam on the model loss. Per-step gradients are averaged over the batch
// in fixed sample order; identical (data, init, cfg) reproduce the history
// bit for bit. Divergence to a non-finite loss aborts with a NumericError
// naming the step and the last finite loss.
TrainResult train(const std::vector<Sample>& train_set, const std::vector<Sample>& val_set,
                  const UniGoParams& init, const TrainConfig& cfg);

void save_history_csv(const std::vector<HistoryRow>& history, const std::string& path);

struct RunEval {
  std::string run_id;
  double mse = 0.0;
  double mwd = 0.0;
  double baseline_mse = 0.0;
  double baseline_mwd = 0.0;
};

struct EvalReport {
  std::vector<RunEval> runs;
  // Aggregates are mean +- std over runs (population std).
  double mean_mse = 0.0, std_mse = 0.0;
  double mean_mwd = 0.0, std_mwd = 0.0;
  double mean_baseline_mse = 0.0, std_baseline_mse = 0.0;
  double mean_baseline_mwd = 0.0, std_baseline_mwd = 0.0;
  void recompute_aggregates();
};

EvalReport evaluate(const std::vector<Sample>& samples, const UniGoParams& params);
void save_report_json(const EvalReport& report, const std::string& path);
void save_report_csv(const EvalReport& report, const std::string& path);

}  // namespace unigo
