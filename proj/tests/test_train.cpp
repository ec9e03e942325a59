#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "unigo/dynamics.hpp"
#include "unigo/errors.hpp"
#include "unigo/graph.hpp"
#include "unigo/model.hpp"
#include "unigo/rng.hpp"
#include "unigo/train.hpp"

using namespace unigo;

namespace {

Trajectory toy_trajectory(int n, int steps, std::uint64_t seed) {
  Trajectory traj;
  traj.n = n;
  traj.steps = steps;
  traj.values.resize(static_cast<std::size_t>(n) * (steps + 1));
  SplitMix64 rng(seed);
  for (int i = 0; i < n; ++i) {
    double v = rng.next_double();
    const double drift = rng.uniform(-0.003, 0.003);
    for (int t = 0; t <= steps; ++t) {
      traj.values[static_cast<std::size_t>(i) * (steps + 1) + t] =
          std::clamp(v + drift * t, 0.0, 1.0);
    }
  }
  return traj;
}

Tensor2 random_tensor(int r, int c, std::uint64_t seed) {
  Tensor2 t(r, c);
  SplitMix64 rng(seed);
  for (auto& v : t.data) v = rng.next_double();
  return t;
}

}  // namespace

TEST_CASE("sliding window counts follow the offset formula") {
  const Trajectory t99 = toy_trajectory(3, 99, 1);    // 100 columns
  const Trajectory t100 = toy_trajectory(3, 100, 1);  // 101 columns
  const Trajectory t119 = toy_trajectory(3, 119, 1);  // 120 columns
  CHECK(sliding_windows(t99, 10, 90, 1).size() == 1);
  CHECK(sliding_windows(t100, 10, 90, 1).size() == 2);
  CHECK(sliding_windows(t119, 10, 90, 5).size() == 4);  // offsets 0,5,10,15,20 -> 20+100<=120
  CHECK(sliding_windows(t119, 10, 90, 5).size() ==
        static_cast<std::size_t>((120 - 100) / 5) + 1);
  CHECK(sliding_windows(t99, 50, 60, 1).empty());  // too short, not an error
}

TEST_CASE("sliding window contents match trajectory columns") {
  const Trajectory traj = toy_trajectory(4, 30, 2);
  const auto windows = sliding_windows(traj, 5, 10, 7);
  REQUIRE_FALSE(windows.empty());
  const auto& [x, y] = windows[1];  // offset 7
  for (int i = 0; i < 4; ++i) {
    for (int t = 0; t < 5; ++t) CHECK(x.at(i, t) == traj.at(i, 7 + t));
    for (int t = 0; t < 10; ++t) CHECK(y.at(i, t) == traj.at(i, 12 + t));
  }
}

TEST_CASE("split sizes, determinism and disjointness") {
  const SplitIndices s = split(10, {0.7, 0.1, 0.2}, 5);
  CHECK(s.train.size() == 7);
  CHECK(s.val.size() == 1);
  CHECK(s.test.size() == 2);

  const SplitIndices again = split(10, {0.7, 0.1, 0.2}, 5);
  CHECK(s.train == again.train);
  CHECK(s.val == again.val);
  CHECK(s.test == again.test);

  std::set<int> all;
  for (int i : s.train) all.insert(i);
  for (int i : s.val) all.insert(i);
  for (int i : s.test) all.insert(i);
  CHECK(all.size() == 10);

  CHECK_THROWS_AS(split(2, {0.7, 0.1, 0.2}, 1), ParamError);
  CHECK_THROWS_AS(split(10, {0.7, 0.1, 0.3}, 1), ParamError);
}

TEST_CASE("run-level splitting shares no trajectory columns across partitions") {
  // Each run contributes its windows as one unit; verify no window of a
  // test run appears among training windows.
  std::vector<Trajectory> runs;
  for (int r = 0; r < 10; ++r) runs.push_back(toy_trajectory(3, 40, 100 + r));
  const SplitIndices s = split(10, {0.7, 0.1, 0.2}, 9);
  std::set<int> train_runs(s.train.begin(), s.train.end());
  for (int t : s.test) CHECK_FALSE(train_runs.count(t));
}

TEST_CASE("mse and mwd basics") {
  const Tensor2 a = random_tensor(6, 4, 1);
  CHECK(mse(a, a) == 0.0);
  CHECK(mwd(a, a) == 0.0);

  Tensor2 zeros(5, 1), ones(5, 1);
  for (auto& v : ones.data) v = 1.0;
  CHECK(mse(zeros, ones) == doctest::Approx(1.0));
  CHECK(mwd(zeros, ones) == doctest::Approx(1.0));

  // predictions {0,1} vs truth {0.5,0.5}: sorted differences 0.5 each.
  Tensor2 pred(2, 1), truth(2, 1);
  pred.at(0, 0) = 0.0;
  pred.at(1, 0) = 1.0;
  truth.at(0, 0) = 0.5;
  truth.at(1, 0) = 0.5;
  CHECK(mwd(pred, truth) == doctest::Approx(0.5));

  CHECK_THROWS_AS(mse(Tensor2(2, 2), Tensor2(2, 3)), ShapeError);
  CHECK_THROWS_AS(mwd(Tensor2(2, 2), Tensor2(2, 3)), ShapeError);
}

TEST_CASE("mwd is permutation invariant and zero iff multisets match") {
  SplitMix64 rng(3);
  Tensor2 y(20, 5), yt(20, 5);
  for (auto& v : y.data) v = rng.next_double();
  for (auto& v : yt.data) v = rng.next_double();

  // Shuffle node order of both arguments independently.
  Tensor2 y_shuf = y, yt_shuf = yt;
  for (int i = 19; i > 0; --i) {
    const int j = static_cast<int>(rng.below(i + 1));
    for (int c = 0; c < 5; ++c) std::swap(y_shuf.at(i, c), y_shuf.at(j, c));
  }
  for (int i = 19; i > 0; --i) {
    const int j = static_cast<int>(rng.below(i + 1));
    for (int c = 0; c < 5; ++c) std::swap(yt_shuf.at(i, c), yt_shuf.at(j, c));
  }
  CHECK(mwd(y, yt) == doctest::Approx(mwd(y_shuf, yt_shuf)).epsilon(1e-12));

  // Any row permutation of the same matrix has distance zero per step.
  CHECK(mwd(y, y_shuf) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mwd(y, yt) > 0.0);
}

TEST_CASE("persistence baseline repeats the last observed column") {
  Tensor2 x(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < 4; ++t) x.at(i, t) = 0.1 * i + 0.01 * t;
  const Tensor2 y = persistence_baseline(x, 6);
  CHECK(y.rows == 3);
  CHECK(y.cols == 6);
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < 6; ++t) CHECK(y.at(i, t) == x.at(i, 3));

  // Converged tail: baseline is exact.
  Tensor2 flat(3, 4);
  for (auto& v : flat.data) v = 0.6;
  CHECK(mse(persistence_baseline(flat, 5), Tensor2(3, 5, std::vector<double>(15, 0.6))) == 0.0);

  // Drifting run: baseline error matches the direct definition.
  const Trajectory drift = toy_trajectory(5, 20, 4);
  auto [dx, dy] = head_window(drift, 4, 10);
  const Tensor2 base = persistence_baseline(dx, 10);
  double expect = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int t = 0; t < 10; ++t) {
      const double diff = dx.at(i, 3) - dy.at(i, t);
      expect += diff * diff;
    }
  expect /= 50.0;
  CHECK(mse(base, dy) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(mse(base, dy) > 0.0);
}

TEST_CASE("training on one run overfits and is reproducible") {
  const Graph g = generate_er(30, 0.2, 7);
  PresetOptions opt;
  opt.alpha = 0.3;
  opt.d = 0.4;
  DynamicsConfig cfg = make_preset(Preset::Unified, g, opt);
  cfg.seed = 11;
  SplitMix64 x0_rng(12);
  std::vector<double> x0(30);
  for (auto& v : x0) v = x0_rng.next_double();
  const Trajectory traj = simulate(g, cfg, x0);

  UniGoHyper hy;
  hy.t_l = 4;
  hy.t_h = 8;
  hy.clusters = 5;
  hy.heads = 2;
  hy.evo_layers = 2;
  auto [x, y] = head_window(traj, hy.t_l, hy.t_h);
  Sample s{&g, x, y, "overfit"};

  TrainConfig tc;
  tc.lr = 0.01;
  tc.epochs = 2000;
  tc.max_steps = 2000;
  tc.lambda = 0.0;
  tc.seed = 13;

  const UniGoParams init = init_params(hy, 14);
  const TrainResult r1 = train({s}, {}, init, tc);
  CHECK(r1.history.back().train_loss < 5e-3);

  // Bitwise reproducibility.
  const TrainResult r2 = train({s}, {}, init, tc);
  REQUIRE(r1.history.size() == r2.history.size());
  for (std::size_t i = 0; i < r1.history.size(); ++i)
    CHECK(r1.history[i].train_loss == r2.history[i].train_loss);

  // First steps strictly reduce the loss at a small rate.
  TrainConfig slope = tc;
  slope.lr = 1e-3;
  slope.max_steps = 10;
  slope.epochs = 10;
  const TrainResult r3 = train({s}, {}, init, slope);
  for (std::size_t i = 1; i < r3.history.size(); ++i)
    CHECK(r3.history[i].train_loss < r3.history[i - 1].train_loss);
}

TEST_CASE("zero-like learning rate keeps parameters still") {
  const Graph g = generate_er(10, 0.4, 17);
  const Trajectory traj = toy_trajectory(10, 30, 18);
  UniGoHyper hy;
  hy.t_l = 4;
  hy.t_h = 6;
  hy.clusters = 3;
  auto [x, y] = head_window(traj, hy.t_l, hy.t_h);
  Sample s{&g, x, y, "still"};

  TrainConfig tc;
  tc.lr = 1e-300;  // strictly positive per contract, numerically nil
  tc.epochs = 5;
  tc.seed = 19;
  const UniGoParams init = init_params(hy, 20);
  const TrainResult r = train({s}, {}, init, tc);
  double lo = 1e300, hi = -1e300;
  for (const auto& row : r.history) {
    lo = std::min(lo, row.train_loss);
    hi = std::max(hi, row.train_loss);
  }
  CHECK(hi - lo < 1e-12);
  const auto pn = init.named();
  const auto qn = r.params.named();
  for (std::size_t i = 0; i < pn.size(); ++i) {
    const auto& before = pn[i].second->data;
    const auto& after = qn[i].second->data;
    for (std::size_t j = 0; j < before.size(); ++j)
      CHECK(std::fabs(before[j] - after[j]) < 1e-280);
  }

  CHECK_THROWS_AS([&] {
    TrainConfig bad = tc;
    bad.lr = 0.0;
    train({s}, {}, init, bad);
  }(), ParamError);
  CHECK_THROWS_AS(train({}, {}, init, tc), ParamError);
}

TEST_CASE("evaluation report aggregates are recomputable") {
  const Graph g = generate_er(12, 0.4, 23);
  UniGoHyper hy;
  hy.t_l = 4;
  hy.t_h = 6;
  hy.clusters = 3;
  const UniGoParams p = init_params(hy, 24);

  std::vector<Sample> samples;
  for (int r = 0; r < 4; ++r) {
    const Trajectory traj = toy_trajectory(12, 30, 200 + r);
    auto [x, y] = head_window(traj, hy.t_l, hy.t_h);
    samples.push_back({&g, x, y, "run_" + std::to_string(r)});
  }
  const EvalReport report = evaluate(samples, p);
  REQUIRE(report.runs.size() == 4);
  double mean = 0.0;
  for (const RunEval& r : report.runs) mean += r.mse;
  mean /= 4.0;
  CHECK(report.mean_mse == doctest::Approx(mean).epsilon(1e-12));
  double var = 0.0;
  for (const RunEval& r : report.runs) var += (r.mse - mean) * (r.mse - mean);
  CHECK(report.std_mse == doctest::Approx(std::sqrt(var / 4.0)).epsilon(1e-12));
}
