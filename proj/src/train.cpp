#include "unigo/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "unigo/errors.hpp"
#include "unigo/tape.hpp"

namespace unigo {

std::vector<std::pair<Tensor2, Tensor2>> sliding_windows(const Trajectory& traj, int t_l,
                                                         int t_h, int stride) {
  if (t_l < 1 || t_h < 1) throw ParamError("sliding_windows: t_l and t_h must be >= 1");
  if (stride < 1) throw ParamError("sliding_windows: stride must be >= 1");
  const int length = traj.steps + 1;
  std::vector<std::pair<Tensor2, Tensor2>> out;
  for (int offset = 0; offset + t_l + t_h <= length; offset += stride) {
    Tensor2 x(traj.n, t_l), y(traj.n, t_h);
    for (int i = 0; i < traj.n; ++i) {
      for (int t = 0; t < t_l; ++t) x.at(i, t) = traj.at(i, offset + t);
      for (int t = 0; t < t_h; ++t) y.at(i, t) = traj.at(i, offset + t_l + t);
    }
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

std::pair<Tensor2, Tensor2> head_window(const Trajectory& traj, int t_l, int t_h) {
  if (traj.steps + 1 < t_l + t_h)
    throw ParamError("head_window: trajectory has " + std::to_string(traj.steps + 1) +
                     " columns, need " + std::to_string(t_l + t_h));
  auto windows = sliding_windows(traj, t_l, t_h, traj.steps + 1);
  return windows.front();
}

SplitIndices split(int count, std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios)
    if (!(r > 0.0)) throw ParamError("split: ratios must be positive");
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::fabs(sum - 1.0) > 1e-9) throw ParamError("split: ratios must sum to 1");
  if (count < 3)
    throw ParamError("split: " + std::to_string(count) + " samples for 3 partitions");

  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng = derive_stream(seed, {0x73706C6974ULL});  // "split"
  for (int i = count - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  const int n_train = static_cast<int>(ratios[0] * count);
  const int n_val = static_cast<int>(ratios[1] * count);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  out.test.assign(order.begin() + n_train + n_val, order.end());
  return out;
}

double mse(const Tensor2& y, const Tensor2& y_true) {
  if (!y.same_shape(y_true))
    throw ShapeError("mse: " + y.shape_str() + " vs " + y_true.shape_str());
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y.data[i] - y_true.data[i];
    s += d * d;
  }
  return s / static_cast<double>(y.size());
}

double mwd(const Tensor2& y, const Tensor2& y_true) {
  if (!y.same_shape(y_true))
    throw ShapeError("mwd: " + y.shape_str() + " vs " + y_true.shape_str());
  const int n = y.rows;
  std::vector<double> a(n), b(n);
  double total = 0.0;
  for (int t = 0; t < y.cols; ++t) {
    for (int i = 0; i < n; ++i) {
      a[i] = y.at(i, t);
      b[i] = y_true.at(i, t);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double w1 = 0.0;
    for (int i = 0; i < n; ++i) w1 += std::fabs(a[i] - b[i]);
    total += w1 / n;
  }
  return total / y.cols;
}

Tensor2 persistence_baseline(const Tensor2& x, int t_h) {
  if (x.cols < 1) throw ParamError("persistence_baseline: empty history");
  if (t_h < 1) throw ParamError("persistence_baseline: t_h must be >= 1");
  Tensor2 y(x.rows, t_h);
  for (int i = 0; i < x.rows; ++i) {
    const double last = x.at(i, x.cols - 1);
    for (int t = 0; t < t_h; ++t) y.at(i, t) = last;
  }
  return y;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ParamError("train: learning rate must be > 0");
  if (epochs < 1 && max_steps < 1) throw ParamError("train: no training budget");
  if (batch_runs < 1) throw ParamError("train: batch_runs must be >= 1");
  if (lambda < 0.0) throw ParamError("train: lambda must be >= 0");
  if (patience < 0) throw ParamError("train: patience must be >= 0");
}

namespace {

double val_mse(const std::vector<Sample>& val_set, const UniGoParams& params) {
  double total = 0.0;
  for (const Sample& s : val_set) total += mse(predict(*s.g, s.x, params).y, s.y_true);
  return total / static_cast<double>(val_set.size());
}

struct AdamState {
  std::vector<std::vector<double>> m, v;
  int t = 0;
};

}  // namespace

TrainResult train(const std::vector<Sample>& train_set, const std::vector<Sample>& val_set,
                  const UniGoParams& init, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw ParamError("train: empty training set");

  UniGoParams params = init;
  auto named = params.named();

  AdamState adam;
  adam.m.resize(named.size());
  adam.v.resize(named.size());
  for (std::size_t k = 0; k < named.size(); ++k) {
    adam.m[k].assign(named[k].second->size(), 0.0);
    adam.v[k].assign(named[k].second->size(), 0.0);
  }

  SplitMix64 dropout_rng = derive_stream(cfg.seed, {0x64726F70ULL});  // "drop"
  SplitMix64 shuffle_rng = derive_stream(cfg.seed, {0x73687566ULL});  // "shuf"

  TrainResult result;
  result.best_val_mse = std::numeric_limits<double>::infinity();

  UniGoParams best = params;
  int best_step = 0;
  int stale_epochs = 0;
  int step = 0;
  double last_finite_loss = std::numeric_limits<double>::quiet_NaN();

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> grad_acc(named.size());

  bool done = false;
  for (int epoch = 0; epoch < cfg.epochs && !done; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    for (std::size_t pos = 0; pos < order.size() && !done;
         pos += static_cast<std::size_t>(cfg.batch_runs)) {
      const std::size_t end = std::min(order.size(), pos + cfg.batch_runs);
      for (std::size_t k = 0; k < named.size(); ++k)
        grad_acc[k].assign(named[k].second->size(), 0.0);

      double batch_loss = 0.0;
      for (std::size_t b = pos; b < end; ++b) {
        const Sample& s = train_set[order[b]];
        Tape tape;
        ForwardOptions opt;
        opt.training = true;
        opt.dropout_rng = &dropout_rng;
        const TapedForward fwd = model_forward(tape, *s.g, s.x, params, opt);
        const Tape::Var loss = model_loss(tape, fwd, s.y_true, cfg.lambda);
        tape.backward(loss);
        batch_loss += tape.val(loss).data[0];
        for (std::size_t k = 0; k < named.size(); ++k) {
          const auto& g = tape.grad(fwd.param_vars[k]);
          for (std::size_t i = 0; i < g.size(); ++i) grad_acc[k][i] += g[i];
        }
      }
      const double inv_batch = 1.0 / static_cast<double>(end - pos);
      batch_loss *= inv_batch;
      if (!std::isfinite(batch_loss))
        throw NumericError("train: loss diverged at step " + std::to_string(step) +
                           " (last finite loss " + std::to_string(last_finite_loss) + ")");
      last_finite_loss = batch_loss;

      ++adam.t;
      const double bc1 = 1.0 - std::pow(cfg.beta1, adam.t);
      const double bc2 = 1.0 - std::pow(cfg.beta2, adam.t);
      for (std::size_t k = 0; k < named.size(); ++k) {
        auto& theta = named[k].second->data;
        for (std::size_t i = 0; i < theta.size(); ++i) {
          const double g = grad_acc[k][i] * inv_batch;
          adam.m[k][i] = cfg.beta1 * adam.m[k][i] + (1.0 - cfg.beta1) * g;
          adam.v[k][i] = cfg.beta2 * adam.v[k][i] + (1.0 - cfg.beta2) * g * g;
          theta[i] -= cfg.lr * (adam.m[k][i] / bc1) /
                      (std::sqrt(adam.v[k][i] / bc2) + cfg.adam_eps);
        }
      }
      ++step;
      result.history.push_back({step, batch_loss, std::nullopt});
      if (cfg.max_steps > 0 && step >= cfg.max_steps) done = true;
    }

    if (!val_set.empty()) {
      const double vm = val_mse(val_set, params);
      if (!result.history.empty()) result.history.back().val_mse = vm;
      if (vm < result.best_val_mse) {
        result.best_val_mse = vm;
        best = params;
        best_step = step;
        stale_epochs = 0;
      } else if (cfg.patience > 0 && ++stale_epochs >= cfg.patience) {
        done = true;
      }
    }
  }

  result.params = val_set.empty() ? params : best;
  result.best_step = val_set.empty() ? step : best_step;
  if (val_set.empty()) result.best_val_mse = std::numeric_limits<double>::quiet_NaN();
  return result;
}

void save_history_csv(const std::vector<HistoryRow>& history, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_history_csv: cannot open " + path);
  f << "step,train_loss,val_mse\n";
  char buf[96];
  for (const HistoryRow& row : history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,", row.step, row.train_loss);
    f << buf;
    if (row.val_mse) {
      std::snprintf(buf, sizeof buf, "%.17g", *row.val_mse);
      f << buf;
    }
    f << "\n";
  }
  if (!f) throw IoError("save_history_csv: write failed for " + path);
}

void EvalReport::recompute_aggregates() {
  const double n = static_cast<double>(runs.size());
  auto agg = [&](auto field, double& mean, double& sd) {
    double s = 0.0;
    for (const RunEval& r : runs) s += field(r);
    mean = runs.empty() ? 0.0 : s / n;
    double var = 0.0;
    for (const RunEval& r : runs) {
      const double d = field(r) - mean;
      var += d * d;
    }
    sd = runs.empty() ? 0.0 : std::sqrt(var / n);
  };
  agg([](const RunEval& r) { return r.mse; }, mean_mse, std_mse);
  agg([](const RunEval& r) { return r.mwd; }, mean_mwd, std_mwd);
  agg([](const RunEval& r) { return r.baseline_mse; }, mean_baseline_mse, std_baseline_mse);
  agg([](const RunEval& r) { return r.baseline_mwd; }, mean_baseline_mwd, std_baseline_mwd);
}

EvalReport evaluate(const std::vector<Sample>& samples, const UniGoParams& params) {
  EvalReport report;
  for (const Sample& s : samples) {
    RunEval e;
    e.run_id = s.run_id;
    const Tensor2 y = predict(*s.g, s.x, params).y;
    e.mse = mse(y, s.y_true);
    e.mwd = mwd(y, s.y_true);
    const Tensor2 base = persistence_baseline(s.x, s.y_true.cols);
    e.baseline_mse = mse(base, s.y_true);
    e.baseline_mwd = mwd(base, s.y_true);
    report.runs.push_back(std::move(e));
  }
  report.recompute_aggregates();
  return report;
}

void save_report_json(const EvalReport& report, const std::string& path) {
  nlohmann::ordered_json j;
  j["aggregation"] = "mean +- std over runs";
  j["mean_mse"] = report.mean_mse;
  j["std_mse"] = report.std_mse;
  j["mean_mwd"] = report.mean_mwd;
  j["std_mwd"] = report.std_mwd;
  j["mean_baseline_mse"] = report.mean_baseline_mse;
  j["std_baseline_mse"] = report.std_baseline_mse;
  j["mean_baseline_mwd"] = report.mean_baseline_mwd;
  j["std_baseline_mwd"] = report.std_baseline_mwd;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const RunEval& r : report.runs) {
    nlohmann::ordered_json e;
    e["run_id"] = r.run_id;
    e["mse"] = r.mse;
    e["mwd"] = r.mwd;
    e["baseline_mse"] = r.baseline_mse;
    e["baseline_mwd"] = r.baseline_mwd;
    runs.push_back(e);
  }
  j["runs"] = runs;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_report_json: cannot open " + path);
  f << j.dump(1) << "\n";
}

void save_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_report_csv: cannot open " + path);
  f << "run_id,mse,mwd,baseline_mse,baseline_mwd\n";
  char buf[256];
  for (const RunEval& r : report.runs) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n", r.run_id.c_str(), r.mse,
                  r.mwd, r.baseline_mse, r.baseline_mwd);
    f << buf;
  }
  if (!f) throw IoError("save_report_csv: write failed for " + path);
}

}  // namespace unigo
