#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "unigo/errors.hpp"
#include "unigo/graph.hpp"
#include "unigo/model.hpp"
#include "unigo/rng.hpp"
#include "unigo/tape.hpp"

using namespace unigo;

namespace {

Tensor2 random_tensor(int r, int c, SplitMix64& rng, double lo = 0.0, double hi = 1.0) {
  Tensor2 t(r, c);
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// Dense row-major helpers, independent of the tape kernels.
std::vector<double> dense_mm(const std::vector<double>& a, int ar, int ac,
                             const std::vector<double>& b, int bc) {
  std::vector<double> out(static_cast<std::size_t>(ar) * bc, 0.0);
  for (int i = 0; i < ar; ++i)
    for (int j = 0; j < bc; ++j) {
      double s = 0.0;
      for (int k = 0; k < ac; ++k) s += a[i * ac + k] * b[k * bc + j];
      out[i * bc + j] = s;
    }
  return out;
}

std::vector<double> dense_adjacency(const Graph& g) {
  const int n = g.n();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (const Edge& e : g.edges()) {
    a[static_cast<std::size_t>(e.u) * n + e.v] = e.w;
    a[static_cast<std::size_t>(e.v) * n + e.u] = e.w;
  }
  return a;
}

UniGoHyper small_hyper() {
  UniGoHyper hy;
  hy.t_l = 4;
  hy.t_h = 8;
  hy.clusters = 4;
  hy.heads = 2;
  hy.enc_layers = 2;
  hy.evo_layers = 3;
  hy.tau = 1.0;
  hy.dropout = 0.0;
  return hy;
}

}  // namespace

TEST_CASE("encode: isolated node uses its own state as the neighbor mean") {
  UniGoHyper hy = small_hyper();
  hy.enc_layers = 1;
  UniGoParams p = init_params(hy, 3);
  const Graph g = Graph::from_edges(1, {});
  SplitMix64 rng(4);
  const Tensor2 x = random_tensor(1, hy.t_l, rng);

  const Tensor2 e = encode(g, x, p);
  // Expected: x * (W_self + W_neigh).
  for (int j = 0; j < hy.F(); ++j) {
    double want = 0.0;
    for (int k = 0; k < hy.t_l; ++k)
      want += x.at(0, k) * (p.enc_self[0].at(k, j) + p.enc_neigh[0].at(k, j));
    CHECK(e.at(0, j) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("encode: identity layer with zero neighbor weight is the identity") {
  UniGoHyper hy = small_hyper();
  hy.enc_layers = 1;
  UniGoParams p = init_params(hy, 5);
  p.enc_self[0] = Tensor2(hy.t_l, hy.t_l);
  for (int i = 0; i < hy.t_l; ++i) p.enc_self[0].at(i, i) = 1.0;
  p.enc_neigh[0] = Tensor2(hy.t_l, hy.t_l);

  const Graph g = generate_er(6, 0.5, 2);
  SplitMix64 rng(6);
  const Tensor2 x = random_tensor(6, hy.t_l, rng);
  CHECK(encode(g, x, p) == x);
}

TEST_CASE("encode: path graph matches a dense computation") {
  UniGoHyper hy = small_hyper();
  UniGoParams p = init_params(hy, 7);
  const Graph g = Graph::from_edges(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}});
  SplitMix64 rng(8);
  const Tensor2 x = random_tensor(4, hy.t_l, rng);

  // Dense row-normalized adjacency.
  const int n = 4;
  std::vector<double> pmat = dense_adjacency(g);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += pmat[i * n + j];
    for (int j = 0; j < n; ++j) pmat[i * n + j] /= s;
  }
  std::vector<double> h = x.data;
  int width = hy.t_l;
  for (int l = 0; l < hy.enc_layers; ++l) {
    const auto own = dense_mm(h, n, width, p.enc_self[l].data, p.enc_self[l].cols);
    const auto nbr = dense_mm(dense_mm(pmat, n, n, h, width), n, width, p.enc_neigh[l].data,
                              p.enc_neigh[l].cols);
    width = p.enc_self[l].cols;
    h.assign(own.size(), 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = own[i] + nbr[i];
  }
  const Tensor2 e = encode(g, x, p);
  for (std::size_t i = 0; i < h.size(); ++i)
    CHECK(e.data[i] == doctest::Approx(h[i]).epsilon(1e-12));
}

TEST_CASE("pool: assignment rows are stochastic and the kernel peaks at distance zero") {
  UniGoHyper hy = small_hyper();
  UniGoParams p = init_params(hy, 9);
  SplitMix64 rng(10);
  const Tensor2 e = random_tensor(12, hy.F(), rng, -1.0, 1.0);
  const PoolResult res = pool(e, p);
  CHECK(res.s.rows == 12);
  CHECK(res.s.cols == hy.clusters);
  CHECK(res.hc.rows == hy.clusters);
  CHECK(res.hc.cols == hy.Fc());
  for (int i = 0; i < res.s.rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < res.s.cols; ++j) {
      sum += res.s.at(i, j);
      CHECK(res.s.at(i, j) >= 0.0);
      CHECK(res.s.at(i, j) <= 1.0);
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }

  // Student-style kernel: value 1 at distance zero, monotone decreasing.
  const double tau = hy.tau;
  const double expo = -(1.0 + tau) / 2.0;
  auto kernel = [&](double sqdist) { return std::pow(1.0 + sqdist / tau, expo); };
  CHECK(kernel(0.0) == doctest::Approx(1.0));
  double prev = kernel(0.0);
  for (double dist = 0.1; dist < 3.0; dist += 0.1) {
    const double cur = kernel(dist * dist);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("pool: distant centers matching the embeddings give the identity argmax") {
  UniGoHyper hy = small_hyper();
  hy.clusters = 5;
  hy.heads = 2;
  hy.tau = 0.1;
  UniGoParams p = init_params(hy, 11);
  // Mutually distant embeddings; centers of every head equal to them.
  Tensor2 e(5, hy.F());
  for (int i = 0; i < 5; ++i) e.at(i, i % hy.F()) = 10.0 * (i + 1);
  for (auto& c : p.centers) c = e;
  p.head_w.data = {1.0, 1.0};
  p.head_b.data = {0.0};

  const PoolResult res = pool(e, p);
  for (int i = 0; i < 5; ++i) {
    int argmax = 0;
    for (int j = 1; j < 5; ++j)
      if (res.s.at(i, j) > res.s.at(i, argmax)) argmax = j;
    CHECK(argmax == i);
  }
}

TEST_CASE("evolve: single supernode reduces to h (W1 + W2)") {
  UniGoHyper hy = small_hyper();
  hy.clusters = 1;
  hy.evo_layers = 1;
  UniGoParams p = init_params(hy, 13);
  const Graph g = generate_er(6, 0.5, 3);
  SplitMix64 rng(14);
  Tensor2 s(6, 1);
  for (auto& v : s.data) v = 1.0;
  const Tensor2 hc = random_tensor(1, hy.Fc(), rng, -1.0, 1.0);

  const Tensor2 out = evolve(s, g, hc, p);
  for (int j = 0; j < hy.t_l; ++j) {
    double want = 0.0;
    for (int k = 0; k < hy.Fc(); ++k)
      want += hc.at(0, k) * (p.evo_self[0].at(k, j) + p.evo_neigh[0].at(k, j));
    CHECK(out.at(0, j) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("evolve: zero neighbor weights remove the graph dependence") {
  UniGoHyper hy = small_hyper();
  UniGoParams p = init_params(hy, 15);
  for (auto& w : p.evo_neigh) w = Tensor2(w.rows, w.cols);
  SplitMix64 rng(16);
  Tensor2 s(8, hy.clusters);
  for (int i = 0; i < 8; ++i) s.at(i, i % hy.clusters) = 1.0;
  const Tensor2 hc = random_tensor(hy.clusters, hy.Fc(), rng, -1.0, 1.0);

  const Graph g1 = generate_er(8, 0.3, 1);
  const Graph g2 = generate_er(8, 0.8, 9);
  CHECK(evolve(s, g1, hc, p) == evolve(s, g2, hc, p));
}

TEST_CASE("evolve: random instance matches a dense brute-force computation") {
  UniGoHyper hy = small_hyper();
  hy.clusters = 5;
  UniGoParams p = init_params(hy, 17);
  const Graph g = generate_ws(10, 4, 0.3, 4);
  SplitMix64 rng(18);
  // Row-stochastic S.
  Tensor2 s = random_tensor(10, 5, rng, 0.01, 1.0);
  for (int i = 0; i < 10; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 5; ++j) sum += s.at(i, j);
    for (int j = 0; j < 5; ++j) s.at(i, j) /= sum;
  }
  const Tensor2 hc = random_tensor(5, hy.Fc(), rng, -1.0, 1.0);

  // Dense oracle: Ac = S^T A S, zero diagonal, row-normalize, layer stack.
  const int n = 10, k = 5;
  const auto a = dense_adjacency(g);
  std::vector<double> st(static_cast<std::size_t>(k) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) st[j * n + i] = s.at(i, j);
  auto ac = dense_mm(dense_mm(st, k, n, a, n), k, n, s.data, k);
  for (int i = 0; i < k; ++i) ac[i * k + i] = 0.0;
  for (int i = 0; i < k; ++i) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += ac[i * k + j];
    if (sum > 0.0)
      for (int j = 0; j < k; ++j) ac[i * k + j] /= sum;
    else
      ac[i * k + i] = 1.0;
  }
  std::vector<double> h = hc.data;
  int width = hy.Fc();
  for (int l = 0; l < hy.evo_layers; ++l) {
    const auto own = dense_mm(h, k, width, p.evo_self[l].data, p.evo_self[l].cols);
    const auto nbr = dense_mm(dense_mm(ac, k, k, h, width), k, width, p.evo_neigh[l].data,
                              p.evo_neigh[l].cols);
    width = p.evo_self[l].cols;
    h.assign(own.size(), 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = own[i] + nbr[i];
  }

  const Tensor2 out = evolve(s, g, hc, p);
  REQUIRE(out.data.size() == h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    CHECK(out.data[i] == doctest::Approx(h[i]).epsilon(1e-12));
}

TEST_CASE("expand_time trivial and random cases") {
  UniGoHyper hy = small_hyper();
  UniGoParams p = init_params(hy, 19);
  SplitMix64 rng(20);

  p.expand_w = Tensor2(hy.t_l, hy.t_h);
  p.expand_b = Tensor2(1, hy.t_h);
  for (auto& v : p.expand_b.data) v = 0.37;
  const Tensor2 hk = random_tensor(hy.clusters, hy.t_l, rng);
  const Tensor2 z = expand_time(hk, p);
  for (double v : z.data) CHECK(v == 0.37);

  // Square identity case.
  UniGoHyper hy2 = small_hyper();
  hy2.t_h = hy2.t_l;
  UniGoParams p2 = init_params(hy2, 21);
  p2.expand_w = Tensor2(hy2.t_l, hy2.t_l);
  for (int i = 0; i < hy2.t_l; ++i) p2.expand_w.at(i, i) = 1.0;
  p2.expand_b = Tensor2(1, hy2.t_l);
  const Tensor2 hk2 = random_tensor(hy2.clusters, hy2.t_l, rng);
  CHECK(expand_time(hk2, p2) == hk2);

  // Random 3x4 * 4x7 + bias against a dense computation.
  UniGoHyper hy3 = small_hyper();
  hy3.t_l = 4;
  hy3.t_h = 7;
  hy3.clusters = 3;
  UniGoParams p3 = init_params(hy3, 22);
  const Tensor2 hk3 = random_tensor(3, 4, rng, -1.0, 1.0);
  const auto want = dense_mm(hk3.data, 3, 4, p3.expand_w.data, 7);
  const Tensor2 z3 = expand_time(hk3, p3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(z3.at(i, j) ==
            doctest::Approx(want[i * 7 + j] + p3.expand_b.data[j]).epsilon(1e-12));
}

TEST_CASE("refine shapes and the all-zero-weights midpoint") {
  UniGoHyper hy = small_hyper();
  UniGoParams p = init_params(hy, 23);
  SplitMix64 rng(24);
  const int n = 9;
  const Tensor2 x = random_tensor(n, hy.t_l, rng);
  Tensor2 s(n, hy.clusters);
  for (int i = 0; i < n; ++i) s.at(i, i % hy.clusters) = 1.0;
  const Tensor2 z = random_tensor(hy.clusters, hy.t_h, rng);

  const Tensor2 y = refine(x, s, z, p);
  CHECK(y.rows == n);
  CHECK(y.cols == hy.t_h);
  for (double v : y.data) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }

  UniGoParams zero = p;
  zero.refine_x = Tensor2(zero.refine_x.rows, zero.refine_x.cols);
  zero.refine_z = Tensor2(zero.refine_z.rows, zero.refine_z.cols);
  zero.refine_y = Tensor2(zero.refine_y.rows, zero.refine_y.cols);
  for (double v : refine(x, s, z, zero).data) CHECK(v == 0.5);
}

TEST_CASE("refine matches an independent dense computation") {
  UniGoHyper hy = small_hyper();
  UniGoParams p = init_params(hy, 25);
  SplitMix64 rng(26);
  const int n = 6;
  const Tensor2 x = random_tensor(n, hy.t_l, rng);
  Tensor2 s = random_tensor(n, hy.clusters, rng, 0.01, 1.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < hy.clusters; ++j) sum += s.at(i, j);
    for (int j = 0; j < hy.clusters; ++j) s.at(i, j) /= sum;
  }
  const Tensor2 z = random_tensor(hy.clusters, hy.t_h, rng, -1.0, 1.0);

  const auto zp = dense_mm(s.data, n, hy.clusters, z.data, hy.t_h);
  const auto own = dense_mm(x.data, n, hy.t_l, p.refine_x.data, p.refine_x.cols);
  const auto coarse = dense_mm(zp, n, hy.t_h, p.refine_z.data, p.refine_z.cols);
  std::vector<double> cat(static_cast<std::size_t>(n) * (p.refine_x.cols + p.refine_z.cols));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p.refine_x.cols; ++j)
      cat[i * (p.refine_x.cols + p.refine_z.cols) + j] = own[i * p.refine_x.cols + j];
    for (int j = 0; j < p.refine_z.cols; ++j)
      cat[i * (p.refine_x.cols + p.refine_z.cols) + p.refine_x.cols + j] =
          coarse[i * p.refine_z.cols + j];
  }
  const auto logits = dense_mm(cat, n, p.refine_y.rows, p.refine_y.data, hy.t_h);

  const Tensor2 y = refine(x, s, z, p);
  for (std::size_t i = 0; i < logits.size(); ++i)
    CHECK(y.data[i] == doctest::Approx(1.0 / (1.0 + std::exp(-logits[i]))).epsilon(1e-12));
}

TEST_CASE("forward: shapes, determinism and the ablation path") {
  const Graph g = generate_ba(15, 2, 5);
  SplitMix64 rng(28);
  UniGoHyper hy = small_hyper();
  const Tensor2 x = random_tensor(15, hy.t_l, rng);

  UniGoParams full = init_params(hy, 29);
  const Prediction a = predict(g, x, full);
  const Prediction b = predict(g, x, full);
  CHECK(a.y.rows == 15);
  CHECK(a.y.cols == hy.t_h);
  REQUIRE(a.s.has_value());
  CHECK(a.y == b.y);  // evaluation is bitwise deterministic
  CHECK(*a.s == *b.s);
  for (double v : a.y.data) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }

  UniGoHyper hy_c = hy;
  hy_c.mode = ModelMode::AblationC;
  UniGoParams ablation = init_params(hy_c, 30);
  const Prediction c = predict(g, x, ablation);
  CHECK(c.y.rows == 15);
  CHECK(c.y.cols == hy.t_h);
  CHECK_FALSE(c.s.has_value());
}

TEST_CASE("forward: dropout only acts in training mode") {
  const Graph g = generate_er(10, 0.4, 31);
  SplitMix64 rng(32);
  UniGoHyper hy = small_hyper();
  hy.dropout = 0.5;
  const UniGoParams p = init_params(hy, 33);
  const Tensor2 x = random_tensor(10, hy.t_l, rng);

  const Tensor2 eval1 = predict(g, x, p).y;
  const Tensor2 eval2 = predict(g, x, p).y;
  CHECK(eval1 == eval2);

  SplitMix64 drop_rng(34);
  Tape tape;
  ForwardOptions opt;
  opt.training = true;
  opt.dropout_rng = &drop_rng;
  const TapedForward fwd = model_forward(tape, g, x, p, opt);
  CHECK_FALSE(tape.val(fwd.y) == eval1);
}

TEST_CASE("forward is permutation equivariant") {
  const int n = 12;
  const Graph g = generate_ws(n, 4, 0.2, 35);
  SplitMix64 rng(36);
  UniGoHyper hy = small_hyper();
  const UniGoParams p = init_params(hy, 37);
  const Tensor2 x = random_tensor(n, hy.t_l, rng);

  // Relabel nodes by a fixed permutation.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) edges.push_back({perm[e.u], perm[e.v], e.w});
  const Graph gp = Graph::from_edges(n, edges);
  Tensor2 xp(n, hy.t_l);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < hy.t_l; ++t) xp.at(perm[i], t) = x.at(i, t);

  const Tensor2 y = predict(g, x, p).y;
  const Tensor2 yp = predict(gp, xp, p).y;
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < hy.t_h; ++t)
      CHECK(yp.at(perm[i], t) == doctest::Approx(y.at(i, t)).epsilon(1e-12));
}

TEST_CASE("loss composition matches an independent computation") {
  const Graph g = generate_er(10, 0.4, 39);
  SplitMix64 rng(40);
  UniGoHyper hy = small_hyper();
  const UniGoParams p = init_params(hy, 41);
  const Tensor2 x = random_tensor(10, hy.t_l, rng);
  const Tensor2 y_true = random_tensor(10, hy.t_h, rng);

  Tape tape;
  const TapedForward fwd = model_forward(tape, g, x, p);
  const double lambda = 0.7;
  const Tape::Var loss = model_loss(tape, fwd, y_true, lambda);

  // Independent scalar computation.
  const Tensor2& y = tape.val(fwd.y);
  double mse_val = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y.data[i] - y_true.data[i];
    mse_val += d * d;
  }
  mse_val /= static_cast<double>(y.size());
  const Tensor2& s = tape.val(*fwd.s);
  const Tensor2 sharp = sharpen_assignment(s);
  double kl = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (sharp.data[i] > 0.0)
      kl += sharp.data[i] * (std::log(sharp.data[i]) - std::log(s.data[i]));

  CHECK(tape.val(loss).data[0] == doctest::Approx(lambda * kl + mse_val).epsilon(1e-12));
  CHECK(kl >= 0.0);

  // Perfect prediction with lambda = 0 gives zero loss.
  Tape tape2;
  const TapedForward fwd2 = model_forward(tape2, g, x, p);
  const Tape::Var zero = model_loss(tape2, fwd2, tape2.val(fwd2.y), 0.0);
  CHECK(tape2.val(zero).data[0] == 0.0);

  CHECK_THROWS_AS(model_loss(tape2, fwd2, y_true, -0.5), ParamError);
}

TEST_CASE("sharpened target is row-stochastic and sharper than S") {
  SplitMix64 rng(42);
  Tensor2 s = random_tensor(8, 4, rng, 0.05, 1.0);
  for (int i = 0; i < 8; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) sum += s.at(i, j);
    for (int j = 0; j < 4; ++j) s.at(i, j) /= sum;
  }
  const Tensor2 p = sharpen_assignment(s);
  for (int i = 0; i < 8; ++i) {
    double sum = 0.0;
    double smax = 0.0, pmax = 0.0;
    for (int j = 0; j < 4; ++j) {
      sum += p.at(i, j);
      smax = std::max(smax, s.at(i, j));
      pmax = std::max(pmax, p.at(i, j));
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("full-model gradient check on a 20-node instance") {
  const Graph g = generate_er(20, 0.3, derive_seed(1, {0x677261ULL}));
  SplitMix64 rng(44);
  UniGoHyper hy = small_hyper();  // K=4, H=2, t_l=4, t_h=8
  const UniGoParams proto = init_params(hy, 45);
  const Tensor2 x = random_tensor(20, hy.t_l, rng);
  const Tensor2 y_true = random_tensor(20, hy.t_h, rng);
  const double lambda = 0.5;

  std::vector<Tensor2> flat;
  for (const auto& [name, t] : proto.named()) flat.push_back(*t);
  UniGoParams scratch = proto;
  std::optional<Tensor2> frozen;
  auto loss_fn = [&](const std::vector<Tensor2>& params, std::vector<Tensor2>* grads) {
    auto named = scratch.named();
    for (std::size_t i = 0; i < named.size(); ++i) *named[i].second = params[i];
    Tape tape;
    const TapedForward fwd = model_forward(tape, g, x, scratch);
    if (!frozen && fwd.s) frozen = sharpen_assignment(tape.val(*fwd.s));
    const Tape::Var loss = model_loss(tape, fwd, y_true, lambda, frozen ? &*frozen : nullptr);
    if (grads) {
      tape.backward(loss);
      grads->clear();
      for (Tape::Var v : fwd.param_vars) grads->push_back(tape.grad_tensor(v));
    }
    return tape.val(loss).data[0];
  };
  CHECK(grad_check(loss_fn, flat, 1e-5, 46) < 1e-4);
}

TEST_CASE("checkpoint round-trip is exact") {
  UniGoHyper hy = small_hyper();
  hy.lambda = 0.25;
  hy.dropout = 0.1;
  const UniGoParams p = init_params(hy, 47);
  const std::string path = "/tmp/unigo_test_model.json";
  save_params(p, path, "{\"split_seed\": 99}");

  std::string extra;
  const UniGoParams q = load_params(path, &extra);
  CHECK(extra.find("99") != std::string::npos);
  const auto pn = p.named();
  const auto qn = q.named();
  REQUIRE(pn.size() == qn.size());
  for (std::size_t i = 0; i < pn.size(); ++i) {
    CHECK(pn[i].first == qn[i].first);
    CHECK(*pn[i].second == *qn[i].second);
  }
  CHECK(q.hyper.lambda == hy.lambda);
  CHECK(q.hyper.dropout == hy.dropout);
  CHECK(q.hyper.mode == hy.mode);

  const Graph g = generate_er(8, 0.4, 48);
  SplitMix64 rng(49);
  const Tensor2 x = random_tensor(8, hy.t_l, rng);
  CHECK(predict(g, x, p).y == predict(g, x, q).y);
  std::filesystem::remove(path);
}

TEST_CASE("model input validation") {
  UniGoHyper hy = small_hyper();
  const UniGoParams p = init_params(hy, 50);
  const Graph g = generate_er(5, 0.5, 51);
  Tape tape;
  CHECK_THROWS_AS(model_forward(tape, g, Tensor2(4, hy.t_l), p), ShapeError);
  CHECK_THROWS_AS(model_forward(tape, g, Tensor2(5, hy.t_l + 1), p), ShapeError);
  UniGoHyper bad = hy;
  bad.tau = 0.0;
  CHECK_THROWS_AS(init_params(bad, 1), ParamError);
}
