#include "unigo/tape.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "unigo/kernels.hpp"
#include "unigo/rng.hpp"

namespace unigo {

namespace {

// Parallel kernels only pay off past a work threshold; below it the serial
// path avoids the fork/join overhead. Both give bit-identical results.
constexpr long kParallelWork = 1 << 15;

void mm(const double* a, int ar, int ac, const double* b, int bc, double* out) {
  if (static_cast<long>(ar) * ac * bc >= kParallelWork)
    kernels::matmul_omp(a, ar, ac, b, bc, out);
  else
    kernels::matmul_serial(a, ar, ac, b, bc, out);
}

// out(ar x br) += a(ar x k) * b(br x k)^T
void acc_mm_nt(const double* a, int ar, int k, const double* b, int br, double* out) {
  for (int i = 0; i < ar; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* orow = out + static_cast<std::size_t>(i) * br;
    for (int j = 0; j < br; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * k;
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += arow[t] * brow[t];
      orow[j] += s;
    }
  }
}

// out(ac x bc) += a(ar x ac)^T * b(ar x bc)
void acc_mm_tn(const double* a, int ar, int ac, const double* b, int bc, double* out) {
  for (int r = 0; r < ar; ++r) {
    const double* arow = a + static_cast<std::size_t>(r) * ac;
    const double* brow = b + static_cast<std::size_t>(r) * bc;
    for (int i = 0; i < ac; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* orow = out + static_cast<std::size_t>(i) * bc;
      for (int j = 0; j < bc; ++j) orow[j] += av * brow[j];
    }
  }
}

}  // namespace

Tensor2 Tape::grad_tensor(Var v) const {
  const Tensor2& s = slots_[v];
  Tensor2 g(s.rows, s.cols);
  g.data = s.grad;
  return g;
}

Tape::Var Tape::push(Tensor2 value) {
  value.ensure_grad();
  slots_.push_back(std::move(value));
  return static_cast<Var>(slots_.size()) - 1;
}

Tape::Var Tape::leaf(Tensor2 value) { return push(std::move(value)); }

Tape::Var Tape::matmul(Var a, Var b) {
  const Tensor2& A = slots_[a];
  const Tensor2& B = slots_[b];
  if (A.cols != B.rows)
    throw ShapeError("matmul: " + A.shape_str() + " x " + B.shape_str());
  Tensor2 out(A.rows, B.cols);
  mm(A.data.data(), A.rows, A.cols, B.data.data(), B.cols, out.data.data());
  const Var o = push(std::move(out));
  back_.push_back([this, a, b, o] {
    const Tensor2& At = slots_[a];
    const Tensor2& Bt = slots_[b];
    Tensor2& Ot = slots_[o];
    acc_mm_nt(Ot.grad.data(), Ot.rows, Ot.cols, Bt.data.data(), Bt.rows,
              slots_[a].grad.data());
    acc_mm_tn(At.data.data(), At.rows, At.cols, Ot.grad.data(), Ot.cols,
              slots_[b].grad.data());
  });
  return o;
}

Tape::Var Tape::transpose(Var a) {
  const Tensor2& A = slots_[a];
  Tensor2 out(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(j, i) = A.at(i, j);
  const Var o = push(std::move(out));
  back_.push_back([this, a, o] {
    Tensor2& At = slots_[a];
    const Tensor2& Ot = slots_[o];
    for (int i = 0; i < At.rows; ++i)
      for (int j = 0; j < At.cols; ++j)
        At.grad[static_cast<std::size_t>(i) * At.cols + j] +=
            Ot.grad[static_cast<std::size_t>(j) * Ot.cols + i];
  });
  return o;
}

Tape::Var Tape::add(Var a, Var b) {
  const Tensor2& A = slots_[a];
  const Tensor2& B = slots_[b];
  if (!A.same_shape(B)) throw ShapeError("add: " + A.shape_str() + " vs " + B.shape_str());
  Tensor2 out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = A.data[i] + B.data[i];
  const Var o = push(std::move(out));
  back_.push_back([this, a, b, o] {
    const auto& og = slots_[o].grad;
    auto& ag = slots_[a].grad;
    auto& bg = slots_[b].grad;
    for (std::size_t i = 0; i < og.size(); ++i) {
      ag[i] += og[i];
      bg[i] += og[i];
    }
  });
  return o;
}

Tape::Var Tape::scale(Var a, double c) {
  const Tensor2& A = slots_[a];
  Tensor2 out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = c * A.data[i];
  const Var o = push(std::move(out));
  back_.push_back([this, a, o, c] {
    const auto& og = slots_[o].grad;
    auto& ag = slots_[a].grad;
    for (std::size_t i = 0; i < og.size(); ++i) ag[i] += c * og[i];
  });
  return o;
}

Tape::Var Tape::add_scalar(Var a, double c) {
  const Tensor2& A = slots_[a];
  Tensor2 out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = A.data[i] + c;
  const Var o = push(std::move(out));
  back_.push_back([this, a, o] {
    const auto& og = slots_[o].grad;
    auto& ag = slots_[a].grad;
    for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i];
  });
  return o;
}

Tape::Var Tape::mul_scalar_var(Var a, Var s) {
  const Tensor2& A = slots_[a];
  const Tensor2& S = slots_[s];
  if (S.rows != 1 || S.cols != 1)
    throw ShapeError("mul_scalar_var: scalar operand is " + S.shape_str() + ", expected 1x1");
  const double sv = S.data[0];
  Tensor2 out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = sv * A.data[i];
  const Var o = push(std::move(out));
  back_.push_back([this, a, s, o, sv] {
    const auto& og = slots_[o].grad;
    const auto& av = slots_[a].data;
    auto& ag = slots_[a].grad;
    double ds = 0.0;
    for (std::size_t i = 0; i < og.size(); ++i) {
      ag[i] += sv * og[i];
      ds += og[i] * av[i];
    }
    slots_[s].grad[0] += ds;
  });
  return o;
}

Tape::Var Tape::add_scalar_var(Var a, Var s) {
  const Tensor2& A = slots_[a];
  const Tensor2& S = slots_[s];
  if (S.rows != 1 || S.cols != 1)
    throw ShapeError("add_scalar_var: scalar operand is " + S.shape_str() + ", expected 1x1");
  Tensor2 out(A.rows, A.cols);
  const double sv = S.data[0];
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = A.data[i] + sv;
  const Var o = push(std::move(out));
  back_.push_back([this, a, s, o] {
    const auto& og = slots_[o].grad;
    auto& ag = slots_[a].grad;
    double ds = 0.0;
    for (std::size_t i = 0; i < og.size(); ++i) {
      ag[i] += og[i];
      ds += og[i];
    }
    slots_[s].grad[0] += ds;
  });
  return o;
}

Tape::Var Tape::add_rowvec(Var a, Var b) {
  const Tensor2& A = slots_[a];
  const Tensor2& B = slots_[b];
  if (B.rows != 1 || B.cols != A.cols)
    throw ShapeError("add_rowvec: " + A.shape_str() + " vs row vector " + B.shape_str());
  Tensor2 out(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(i, j) = A.at(i, j) + B.data[j];
  const Var o = push(std::move(out));
  back_.push_back([this, a, b, o] {
    const Tensor2& Ot = slots_[o];
    auto& ag = slots_[a].grad;
    auto& bg = slots_[b].grad;
    for (int i = 0; i < Ot.rows; ++i)
      for (int j = 0; j < Ot.cols; ++j) {
        const double gv = Ot.grad[static_cast<std::size_t>(i) * Ot.cols + j];
        ag[static_cast<std::size_t>(i) * Ot.cols + j] += gv;
        bg[j] += gv;
      }
  });
  return o;
}

Tape::Var Tape::hadamard_const(Var a, const Tensor2& mask) {
  const Tensor2& A = slots_[a];
  if (!A.same_shape(mask))
    throw ShapeError("hadamard_const: " + A.shape_str() + " vs " + mask.shape_str());
  Tensor2 out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = A.data[i] * mask.data[i];
  const Var o = push(std::move(out));
  back_.push_back([this, a, o, m = mask.data] {
    const auto& og = slots_[o].grad;
    auto& ag = slots_[a].grad;
    for (std::size_t i = 0; i < og.size(); ++i) ag[i] += og[i] * m[i];
  });
  return o;
}

Tape::Var Tape::head_combine(const std::vector<Var>& heads, Var w, Var b) {
  if (heads.empty()) throw ShapeError("head_combine: no heads");
  const Tensor2& W = slots_[w];
  const Tensor2& B = slots_[b];
  if (W.rows != static_cast<int>(heads.size()) || W.cols != 1)
    throw ShapeError("head_combine: weights " + W.shape_str() + " for " +
                     std::to_string(heads.size()) + " heads, expected " +
                     std::to_string(heads.size()) + "x1");
  if (B.rows != 1 || B.cols != 1)
    throw ShapeError("head_combine: bias is " + B.shape_str() + ", expected 1x1");
  const Tensor2& first = slots_[heads[0]];
  for (Var h : heads)
    if (!slots_[h].same_shape(first))
      throw ShapeError("head_combine: head shapes differ, " + first.shape_str() + " vs " +
                       slots_[h].shape_str());
  Tensor2 out(first.rows, first.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = B.data[0];
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const double wh = W.data[h];
    const auto& hv = slots_[heads[h]].data;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += wh * hv[i];
  }
  const Var o = push(std::move(out));
  back_.push_back([this, heads, w, b, o] {
    const auto& og = slots_[o].grad;
    auto& wg = slots_[w].grad;
    const auto& wv = slots_[w].data;
    double db = 0.0;
    for (double gv : og) db += gv;
    slots_[b].grad[0] += db;
    for (std::size_t h = 0; h < heads.size(); ++h) {
      const auto& hv = slots_[heads[h]].data;
      auto& hg = slots_[heads[h]].grad;
      double dw = 0.0;
      for (std::size_t i = 0; i < og.size(); ++i) {
        hg[i] += wv[h] * og[i];
        dw += og[i] * hv[i];
      }
      wg[h] += dw;
    }
  });
  return o;
}

Tape::Var Tape::concat_cols(Var a, Var b) {
  const Tensor2& A = slots_[a];
  const Tensor2& B = slots_[b];
  if (A.rows != B.rows)
    throw ShapeError("concat_cols: " + A.shape_str() + " vs " + B.shape_str());
  Tensor2 out(A.rows, A.cols + B.cols);
  for (int i = 0; i < A.rows; ++i) {
    for (int j = 0; j < A.cols; ++j) out.at(i, j) = A.at(i, j);
    for (int j = 0; j < B.cols; ++j) out.at(i, A.cols + j) = B.at(i, j);
  }
  const Var o = push(std::move(out));
  back_.push_back([this, a, b, o] {
    Tensor2& At = slots_[a];
    Tensor2& Bt = slots_[b];
    const Tensor2& Ot = slots_[o];
    for (int i = 0; i < At.rows; ++i) {
      for (int j = 0; j < At.cols; ++j)
        At.grad[static_cast<std::size_t>(i) * At.cols + j] +=
            Ot.grad[static_cast<std::size_t>(i) * Ot.cols + j];
      for (int j = 0; j < Bt.cols; ++j)
        Bt.grad[static_cast<std::size_t>(i) * Bt.cols + j] +=
            Ot.grad[static_cast<std::size_t>(i) * Ot.cols + At.cols + j];
    }
  });
  return o;
}

Tape::Var Tape::row_softmax(Var a) {
  const Tensor2& A = slots_[a];
  Tensor2 out(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i) {
    double mx = A.at(i, 0);
    for (int j = 1; j < A.cols; ++j) mx = std::max(mx, A.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < A.cols; ++j) {
      const double e = std::exp(A.at(i, j) - mx);
      out.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < A.cols; ++j) out.at(i, j) /= sum;
  }
  const Var o = push(std::move(out));
  back_.push_back([this, a, o] {
    Tensor2& At = slots_[a];
    const Tensor2& Ot = slots_[o];
    for (int i = 0; i < Ot.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < Ot.cols; ++j)
        dot += Ot.grad[static_cast<std::size_t>(i) * Ot.cols + j] * Ot.at(i, j);
      for (int j = 0; j < Ot.cols; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * Ot.cols + j;
        At.grad[idx] += Ot.data[idx] * (Ot.grad[idx] - dot);
      }
    }
  });
  return o;
}

Tape::Var Tape::sigmoid(Var a) {
  const Tensor2& A = slots_[a];
  Tensor2 out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = 1.0 / (1.0 + std::exp(-A.data[i]));
  const Var o = push(std::move(out));
  back_.push_back([this, a, o] {
    const Tensor2& Ot = slots_[o];
    auto& ag = slots_[a].grad;
    for (std::size_t i = 0; i < Ot.size(); ++i)
      ag[i] += Ot.grad[i] * Ot.data[i] * (1.0 - Ot.data[i]);
  });
  return o;
}

Tape::Var Tape::pow_const(Var a, double exponent) {
  const Tensor2& A = slots_[a];
  Tensor2 out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = std::pow(A.data[i], exponent);
  const Var o = push(std::move(out));
  back_.push_back([this, a, o, exponent] {
    const Tensor2& Ot = slots_[o];
    const auto& av = slots_[a].data;
    auto& ag = slots_[a].grad;
    for (std::size_t i = 0; i < Ot.size(); ++i)
      ag[i] += Ot.grad[i] * exponent * std::pow(av[i], exponent - 1.0);
  });
  return o;
}

Tape::Var Tape::row_mean(Var a) {
  const Tensor2& A = slots_[a];
  Tensor2 out(A.rows, 1);
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) s += A.at(i, j);
    out.at(i, 0) = s / A.cols;
  }
  const Var o = push(std::move(out));
  back_.push_back([this, a, o] {
    Tensor2& At = slots_[a];
    const Tensor2& Ot = slots_[o];
    for (int i = 0; i < At.rows; ++i) {
      const double gv = Ot.grad[i] / At.cols;
      for (int j = 0; j < At.cols; ++j)
        At.grad[static_cast<std::size_t>(i) * At.cols + j] += gv;
    }
  });
  return o;
}

Tape::Var Tape::row_normalize(Var a, RowFallback fb) {
  const Tensor2& A = slots_[a];
  if (fb == RowFallback::SelfOneHot && A.rows != A.cols)
    throw ShapeError("row_normalize: self fallback needs a square matrix, got " + A.shape_str());
  Tensor2 out(A.rows, A.cols);
  std::vector<double> sums(A.rows, 0.0);
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) s += A.at(i, j);
    sums[i] = s;
    if (s != 0.0) {
      for (int j = 0; j < A.cols; ++j) out.at(i, j) = A.at(i, j) / s;
    } else if (fb == RowFallback::SelfOneHot) {
      out.at(i, i) = 1.0;
    }
  }
  const Var o = push(std::move(out));
  back_.push_back([this, a, o, sums = std::move(sums)] {
    Tensor2& At = slots_[a];
    const Tensor2& Ot = slots_[o];
    for (int i = 0; i < At.rows; ++i) {
      if (sums[i] == 0.0) continue;  // fallback rows are locally constant
      double dot = 0.0;
      for (int j = 0; j < At.cols; ++j)
        dot += Ot.grad[static_cast<std::size_t>(i) * Ot.cols + j] * Ot.at(i, j);
      for (int j = 0; j < At.cols; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * At.cols + j;
        At.grad[idx] += (Ot.grad[idx] - dot) / sums[i];
      }
    }
  });
  return o;
}

Tape::Var Tape::pairwise_sqdist(Var e, Var centers) {
  const Tensor2& E = slots_[e];
  const Tensor2& K = slots_[centers];
  if (E.cols != K.cols)
    throw ShapeError("pairwise_sqdist: " + E.shape_str() + " vs " + K.shape_str());
  Tensor2 out(E.rows, K.rows);
  if (static_cast<long>(E.rows) * K.rows * E.cols >= kParallelWork)
    kernels::pairwise_sqdist_omp(E.data.data(), E.rows, E.cols, K.data.data(), K.rows,
                                 out.data.data());
  else
    kernels::pairwise_sqdist_serial(E.data.data(), E.rows, E.cols, K.data.data(), K.rows,
                                    out.data.data());
  const Var o = push(std::move(out));
  back_.push_back([this, e, centers, o] {
    Tensor2& Et = slots_[e];
    Tensor2& Kt = slots_[centers];
    const Tensor2& Ot = slots_[o];
    const int f = Et.cols;
    for (int i = 0; i < Et.rows; ++i)
      for (int j = 0; j < Kt.rows; ++j) {
        const double gv = Ot.grad[static_cast<std::size_t>(i) * Kt.rows + j];
        if (gv == 0.0) continue;
        for (int t = 0; t < f; ++t) {
          const double diff = Et.at(i, t) - Kt.at(j, t);
          Et.grad[static_cast<std::size_t>(i) * f + t] += 2.0 * gv * diff;
          Kt.grad[static_cast<std::size_t>(j) * f + t] -= 2.0 * gv * diff;
        }
      }
  });
  return o;
}

Tape::Var Tape::graph_mean(const Graph& g, Var x) {
  const Tensor2& X = slots_[x];
  if (X.rows != g.n())
    throw ShapeError("graph_mean: features " + X.shape_str() + " vs graph with " +
                     std::to_string(g.n()) + " nodes");
  Tensor2 out(X.rows, X.cols);
  if (static_cast<long>(g.m()) * X.cols >= kParallelWork)
    kernels::graph_mean_omp(g, X.data.data(), X.cols, out.data.data());
  else
    kernels::graph_mean_serial(g, X.data.data(), X.cols, out.data.data());
  const Var o = push(std::move(out));
  back_.push_back([this, &g, x, o] {
    Tensor2& Xt = slots_[x];
    const Tensor2& Ot = slots_[o];
    const int c = Xt.cols;
    std::vector<double> wd(g.n());
    for (int i = 0; i < g.n(); ++i) wd[i] = g.weighted_degree(i);
    for (int j = 0; j < g.n(); ++j) {
      double* gj = Xt.grad.data() + static_cast<std::size_t>(j) * c;
      if (wd[j] == 0.0) {
        const double* oj = Ot.grad.data() + static_cast<std::size_t>(j) * c;
        for (int t = 0; t < c; ++t) gj[t] += oj[t];
        continue;
      }
      const double* w = g.nbr_w(j);
      int idx = 0;
      for (const int* i = g.nbr_begin(j); i != g.nbr_end(j); ++i, ++idx) {
        const double f = w[idx] / wd[*i];
        const double* oi = Ot.grad.data() + static_cast<std::size_t>(*i) * c;
        for (int t = 0; t < c; ++t) gj[t] += f * oi[t];
      }
    }
  });
  return o;
}

Tape::Var Tape::adj_matmul(const Graph& g, Var x) {
  const Tensor2& X = slots_[x];
  if (X.rows != g.n())
    throw ShapeError("adj_matmul: features " + X.shape_str() + " vs graph with " +
                     std::to_string(g.n()) + " nodes");
  Tensor2 out(X.rows, X.cols);
  if (static_cast<long>(g.m()) * X.cols >= kParallelWork)
    kernels::adj_matmul_omp(g, X.data.data(), X.cols, out.data.data());
  else
    kernels::adj_matmul_serial(g, X.data.data(), X.cols, out.data.data());
  const Var o = push(std::move(out));
  back_.push_back([this, &g, x, o] {
    Tensor2& Xt = slots_[x];
    const Tensor2& Ot = slots_[o];
    // A is symmetric: dX += A * dOut, accumulated row by row.
    std::vector<double> tmp(Xt.size());
    kernels::adj_matmul_serial(g, Ot.grad.data(), Xt.cols, tmp.data());
    for (std::size_t i = 0; i < tmp.size(); ++i) Xt.grad[i] += tmp[i];
  });
  return o;
}

Tape::Var Tape::kl_div(const Tensor2& target, Var s) {
  const Tensor2& S = slots_[s];
  if (!S.same_shape(target))
    throw ShapeError("kl_div: " + target.shape_str() + " vs " + S.shape_str());
  double total = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const double p = target.data[i];
    if (p == 0.0) continue;
    if (p < 0.0) throw DomainError("kl_div: negative target probability");
    if (S.data[i] <= 0.0)
      throw DomainError("kl_div: log of nonpositive assignment value");
    total += p * (std::log(p) - std::log(S.data[i]));
  }
  Tensor2 out(1, 1);
  out.data[0] = total;
  const Var o = push(std::move(out));
  back_.push_back([this, s, o, p = target.data] {
    const double gl = slots_[o].grad[0];
    const auto& sv = slots_[s].data;
    auto& sg = slots_[s].grad;
    for (std::size_t i = 0; i < sv.size(); ++i)
      if (p[i] != 0.0) sg[i] -= gl * p[i] / sv[i];
  });
  return o;
}

Tape::Var Tape::mse(Var y, Var y_true) {
  const Tensor2& Y = slots_[y];
  const Tensor2& T = slots_[y_true];
  if (!Y.same_shape(T)) throw ShapeError("mse: " + Y.shape_str() + " vs " + T.shape_str());
  double total = 0.0;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    const double d = Y.data[i] - T.data[i];
    total += d * d;
  }
  Tensor2 out(1, 1);
  out.data[0] = total / static_cast<double>(Y.size());
  const Var o = push(std::move(out));
  back_.push_back([this, y, y_true, o] {
    const double gl = slots_[o].grad[0];
    const auto& yv = slots_[y].data;
    const auto& tv = slots_[y_true].data;
    auto& yg = slots_[y].grad;
    auto& tg = slots_[y_true].grad;
    const double f = 2.0 * gl / static_cast<double>(yv.size());
    for (std::size_t i = 0; i < yv.size(); ++i) {
      const double d = yv[i] - tv[i];
      yg[i] += f * d;
      tg[i] -= f * d;
    }
  });
  return o;
}

void Tape::backward(Var root) {
  const Tensor2& R = slots_[root];
  if (R.rows != 1 || R.cols != 1)
    throw ShapeError("backward: root must be 1x1, got " + R.shape_str());
  slots_[root].grad[0] += 1.0;
  for (auto it = back_.rbegin(); it != back_.rend(); ++it) (*it)();
}

double grad_check(const LossFn& loss_fn, const std::vector<Tensor2>& params, double eps,
                  std::uint64_t seed) {
  if (!(eps > 0.0)) throw ParamError("grad_check: eps must be > 0");
  std::vector<Tensor2> grads;
  const double base = loss_fn(params, &grads);
  if (!std::isfinite(base)) throw NumericError("grad_check: non-finite loss");
  if (grads.size() != params.size())
    throw ShapeError("grad_check: loss_fn returned " + std::to_string(grads.size()) +
                     " gradients for " + std::to_string(params.size()) + " parameters");

  double max_rel = 0.0;
  std::vector<Tensor2> work = params;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const std::size_t total = params[k].size();
    std::vector<std::size_t> coords;
    if (total <= 200) {
      coords.resize(total);
      for (std::size_t i = 0; i < total; ++i) coords[i] = i;
    } else {
      SplitMix64 rng = derive_stream(seed, {0x6763ULL, static_cast<std::uint64_t>(k)});
      std::unordered_set<std::size_t> seen;
      while (seen.size() < 200) seen.insert(rng.below(total));
      coords.assign(seen.begin(), seen.end());
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t idx : coords) {
      const double orig = work[k].data[idx];
      work[k].data[idx] = orig + eps;
      const double up = loss_fn(work, nullptr);
      work[k].data[idx] = orig - eps;
      const double dn = loss_fn(work, nullptr);
      work[k].data[idx] = orig;
      if (!std::isfinite(up) || !std::isfinite(dn))
        throw NumericError("grad_check: non-finite loss during perturbation");
      const double numeric = (up - dn) / (2.0 * eps);
      const double analytic = grads[k].data[idx];
      const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::fabs(analytic - numeric) / denom);
    }
  }
  return max_rel;
}

}  // namespace unigo
