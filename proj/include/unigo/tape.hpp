#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "unigo/graph.hpp"
#include "unigo/tensor.hpp"

namespace unigo {

// Reverse-mode tape over Tensor2. Forward calls record one backward rule
// per operation; backward() replays them in reverse execution order, which
// visits every node exactly once and accumulates gradients additively.
// Primitives never mutate input values; gradient buffers are the only
// state written during backward. A tape is confined to one thread.
class Tape {
 public:
  using Var = int;

  Var leaf(Tensor2 value);

  const Tensor2& val(Var v) const { return slots_[v]; }
  const std::vector<double>& grad(Var v) const { return slots_[v].grad; }
  Tensor2 grad_tensor(Var v) const;

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var mul_scalar_var(Var a, Var s);   // s is 1x1
  Var add_scalar_var(Var a, Var s);   // s is 1x1, broadcast
  Var add_rowvec(Var a, Var b);       // b is 1 x cols, broadcast over rows
  Var hadamard_const(Var a, const Tensor2& mask);
  Var concat_cols(Var a, Var b);

  // 1x1 convolution across a stack of equally-shaped head matrices:
  // out = sum_h w[h] * heads[h] + b, with w of shape H x 1 and b 1x1.
  Var head_combine(const std::vector<Var>& heads, Var w, Var b);
  Var row_softmax(Var a);
  Var sigmoid(Var a);
  Var pow_const(Var a, double exponent);  // elementwise power
  Var row_mean(Var a);                    // rows x 1

  enum class RowFallback { Zero, SelfOneHot };
  // Divides each row by its sum. Zero rows either stay zero or, for square
  // inputs, become a one-hot self row (used for coarse adjacencies so an
  // unconnected supernode averages itself); fallback rows get no gradient.
  Var row_normalize(Var a, RowFallback fb = RowFallback::Zero);

  // sq distances between rows of e (n x f) and rows of centers (k x f).
  Var pairwise_sqdist(Var e, Var centers);

  // Weighted neighbor mean / adjacency product against a fixed graph.
  Var graph_mean(const Graph& g, Var x);
  Var adj_matmul(const Graph& g, Var x);

  // KL(target || s) summed over entries; target is a constant and rows of
  // both are expected to be distributions. 1x1 output.
  Var kl_div(const Tensor2& target, Var s);

  // Mean over all entries of squared error. 1x1 output.
  Var mse(Var y, Var y_true);

  // Seeds d(root)=1 (root must be 1x1) and runs all backward rules.
  void backward(Var root);

  int size() const { return static_cast<int>(slots_.size()); }

 private:
  Var push(Tensor2 value);
  std::deque<Tensor2> slots_;  // stable addresses; grad allocated on push
  std::vector<std::function<void()>> back_;
};

// Max relative gradient error of `loss_fn` over a random subset of at
// least 200 coordinates per parameter (all when fewer), comparing the
// analytic gradients against central differences with step eps. loss_fn
// must fill per-parameter gradients when the second argument is non-null.
using LossFn =
    std::function<double(const std::vector<Tensor2>& params, std::vector<Tensor2>* grads)>;

double grad_check(const LossFn& loss_fn, const std::vector<Tensor2>& params, double eps,
                  std::uint64_t seed = 0);

}  // namespace unigo
