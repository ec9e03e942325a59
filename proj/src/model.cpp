#include "unigo/model.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "unigo/errors.hpp"

namespace unigo {

using json = nlohmann::ordered_json;

ModelMode model_mode_from_name(const std::string& name) {
  if (name == "full") return ModelMode::Full;
  if (name == "ablation_c") return ModelMode::AblationC;
  throw ParamError("unknown model mode `" + name + "`");
}

std::string to_string(ModelMode m) { return m == ModelMode::Full ? "full" : "ablation_c"; }

void UniGoHyper::validate() const {
  if (t_l < 1 || t_h < 1) throw ParamError("model: t_l and t_h must be >= 1");
  if (!(tau > 0.0)) throw ParamError("model: tau must be > 0");
  if (clusters < 1) throw ParamError("model: cluster count must be >= 1");
  if (heads < 1) throw ParamError("model: head count must be >= 1");
  if (enc_layers < 1 || evo_layers < 1) throw ParamError("model: layer counts must be >= 1");
  if (!(lambda >= 0.0)) throw ParamError("model: lambda must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ParamError("model: dropout must lie in [0,1)");
}

std::vector<std::pair<std::string, Tensor2*>> UniGoParams::named() {
  std::vector<std::pair<std::string, Tensor2*>> out;
  if (hyper.mode == ModelMode::Full) {
    for (std::size_t l = 0; l < enc_self.size(); ++l) {
      out.emplace_back("enc" + std::to_string(l) + ".self", &enc_self[l]);
      out.emplace_back("enc" + std::to_string(l) + ".neigh", &enc_neigh[l]);
    }
    for (std::size_t h = 0; h < centers.size(); ++h)
      out.emplace_back("centers" + std::to_string(h), &centers[h]);
    out.emplace_back("head.w", &head_w);
    out.emplace_back("head.b", &head_b);
    out.emplace_back("pool.w", &pool_w);
  }
  for (std::size_t l = 0; l < evo_self.size(); ++l) {
    out.emplace_back("evo" + std::to_string(l) + ".self", &evo_self[l]);
    out.emplace_back("evo" + std::to_string(l) + ".neigh", &evo_neigh[l]);
  }
  out.emplace_back("expand.w", &expand_w);
  out.emplace_back("expand.b", &expand_b);
  if (hyper.mode == ModelMode::Full) {
    out.emplace_back("refine.x", &refine_x);
    out.emplace_back("refine.z", &refine_z);
    out.emplace_back("refine.y", &refine_y);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor2*>> UniGoParams::named() const {
  auto mut = const_cast<UniGoParams*>(this)->named();
  std::vector<std::pair<std::string, const Tensor2*>> out;
  out.reserve(mut.size());
  for (auto& [n, t] : mut) out.emplace_back(n, t);
  return out;
}

namespace {

Tensor2 uniform_tensor(int rows, int cols, double range, SplitMix64& rng) {
  Tensor2 t(rows, cols);
  for (auto& v : t.data) v = rng.uniform(-range, range);
  return t;
}

}  // namespace

UniGoParams init_params(const UniGoHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  UniGoParams p;
  p.hyper = hyper;
  const int F = hyper.F();
  const int Fc = hyper.Fc();
  SplitMix64 rng = derive_stream(seed, {0x696E6974ULL});  // "init"

  if (hyper.mode == ModelMode::Full) {
    for (int l = 0; l < hyper.enc_layers; ++l) {
      const int in = l == 0 ? hyper.t_l : F;
      p.enc_self.push_back(uniform_tensor(in, F, 1.0 / std::sqrt(in), rng));
      p.enc_neigh.push_back(uniform_tensor(in, F, 1.0 / std::sqrt(in), rng));
    }
    for (int h = 0; h < hyper.heads; ++h)
      p.centers.push_back(uniform_tensor(hyper.clusters, F, 1.0 / std::sqrt(F), rng));
    p.head_w = uniform_tensor(hyper.heads, 1, 1.0 / std::sqrt(hyper.heads), rng);
    p.head_b = Tensor2(1, 1);
    p.pool_w = uniform_tensor(F, Fc, 1.0 / std::sqrt(F), rng);
    for (int l = 0; l < hyper.evo_layers; ++l) {
      const int in = Fc;  // only the last layer changes width
      const int out = l == hyper.evo_layers - 1 ? hyper.t_l : Fc;
      p.evo_self.push_back(uniform_tensor(in, out, 1.0 / std::sqrt(in), rng));
      p.evo_neigh.push_back(uniform_tensor(in, out, 1.0 / std::sqrt(in), rng));
    }
    p.refine_x = uniform_tensor(hyper.t_l, hyper.t_l, 1.0 / std::sqrt(hyper.t_l), rng);
    p.refine_z = uniform_tensor(hyper.t_h, hyper.t_l, 1.0 / std::sqrt(hyper.t_h), rng);
    p.refine_y = uniform_tensor(2 * hyper.t_l, hyper.t_h, 1.0 / std::sqrt(2.0 * hyper.t_l), rng);
  } else {
    // Mean-aggregation layers on the original graph, all t_l wide.
    for (int l = 0; l < hyper.evo_layers; ++l) {
      p.evo_self.push_back(uniform_tensor(hyper.t_l, hyper.t_l, 1.0 / std::sqrt(hyper.t_l), rng));
      p.evo_neigh.push_back(uniform_tensor(hyper.t_l, hyper.t_l, 1.0 / std::sqrt(hyper.t_l), rng));
    }
  }
  p.expand_w = uniform_tensor(hyper.t_l, hyper.t_h, 1.0 / std::sqrt(hyper.t_l), rng);
  p.expand_b = Tensor2(1, hyper.t_h);
  return p;
}

namespace {

// Handles of the pushed parameter leaves, aligned with named() order.
struct ParamVars {
  std::vector<Tape::Var> flat;
  std::vector<Tape::Var> enc_self, enc_neigh, centers, evo_self, evo_neigh;
  Tape::Var head_w = -1, head_b = -1, pool_w = -1;
  Tape::Var expand_w = -1, expand_b = -1;
  Tape::Var refine_x = -1, refine_z = -1, refine_y = -1;
};

ParamVars push_params(Tape& tape, const UniGoParams& p) {
  ParamVars v;
  auto take = [&](const Tensor2& t) {
    const Tape::Var var = tape.leaf(t);
    v.flat.push_back(var);
    return var;
  };
  if (p.hyper.mode == ModelMode::Full) {
    for (std::size_t l = 0; l < p.enc_self.size(); ++l) {
      v.enc_self.push_back(take(p.enc_self[l]));
      v.enc_neigh.push_back(take(p.enc_neigh[l]));
    }
    for (const auto& c : p.centers) v.centers.push_back(take(c));
    v.head_w = take(p.head_w);
    v.head_b = take(p.head_b);
    v.pool_w = take(p.pool_w);
  }
  for (std::size_t l = 0; l < p.evo_self.size(); ++l) {
    v.evo_self.push_back(take(p.evo_self[l]));
    v.evo_neigh.push_back(take(p.evo_neigh[l]));
  }
  v.expand_w = take(p.expand_w);
  v.expand_b = take(p.expand_b);
  if (p.hyper.mode == ModelMode::Full) {
    v.refine_x = take(p.refine_x);
    v.refine_z = take(p.refine_z);
    v.refine_y = take(p.refine_y);
  }
  return v;
}

Tensor2 dropout_mask(int rows, int cols, double p, SplitMix64& rng) {
  Tensor2 mask(rows, cols);
  const double keep = 1.0 - p;
  for (auto& v : mask.data) v = rng.next_double() < keep ? 1.0 / keep : 0.0;
  return mask;
}

Tape::Var maybe_dropout(Tape& tape, Tape::Var h, const UniGoHyper& hy,
                        const ForwardOptions& opt) {
  if (!opt.training || hy.dropout <= 0.0) return h;
  if (!opt.dropout_rng)
    throw ParamError("model: training-mode dropout needs a generator");
  const Tensor2& t = tape.val(h);
  return tape.hadamard_const(h, dropout_mask(t.rows, t.cols, hy.dropout, *opt.dropout_rng));
}

// One mean-aggregation layer stack: H <- H*W_self + mean_nbr(H)*W_neigh.
Tape::Var mean_agg_layers(Tape& tape, const Graph& g, Tape::Var h,
                          const std::vector<Tape::Var>& self_w,
                          const std::vector<Tape::Var>& neigh_w, const UniGoHyper& hy,
                          const ForwardOptions& opt) {
  for (std::size_t l = 0; l < self_w.size(); ++l) {
    const Tape::Var own = tape.matmul(h, self_w[l]);
    const Tape::Var nbr = tape.matmul(tape.graph_mean(g, h), neigh_w[l]);
    h = tape.add(own, nbr);
    h = maybe_dropout(tape, h, hy, opt);
  }
  return h;
}

struct PoolVars {
  Tape::Var s = -1;
  Tape::Var hc = -1;
};

PoolVars pool_stage(Tape& tape, Tape::Var e, const ParamVars& pv, const UniGoHyper& hy) {
  // Per head: Student-style kernel of the embedding-center distance,
  // normalized over clusters; heads fused by a learned 1x1 convolution and
  // sharpened into a row-stochastic assignment by softmax.
  std::vector<Tape::Var> head_s;
  const double expo = -(1.0 + hy.tau) / 2.0;
  for (Tape::Var c : pv.centers) {
    const Tape::Var d2 = tape.pairwise_sqdist(e, c);
    const Tape::Var base = tape.add_scalar(tape.scale(d2, 1.0 / hy.tau), 1.0);
    const Tape::Var kern = tape.pow_const(base, expo);
    head_s.push_back(tape.row_normalize(kern));
  }
  PoolVars out;
  out.s = tape.row_softmax(tape.head_combine(head_s, pv.head_w, pv.head_b));
  out.hc = tape.matmul(tape.matmul(tape.transpose(out.s), e), pv.pool_w);
  return out;
}

Tape::Var evolve_stage(Tape& tape, const Graph& g, Tape::Var s, Tape::Var hc,
                       const ParamVars& pv, const UniGoHyper& hy, const ForwardOptions& opt) {
  // Coarse skeleton S^T A S with zeroed diagonal, row-normalized so the
  // neighbor term is a weighted mean; an all-zero row falls back to self.
  const Tape::Var as = tape.adj_matmul(g, s);
  const Tape::Var ac = tape.matmul(tape.transpose(s), as);
  const int k = tape.val(ac).rows;
  Tensor2 offdiag(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) offdiag.at(i, j) = i == j ? 0.0 : 1.0;
  const Tape::Var masked = tape.hadamard_const(ac, offdiag);
  const Tape::Var coarse = tape.row_normalize(masked, Tape::RowFallback::SelfOneHot);

  Tape::Var h = hc;
  for (std::size_t l = 0; l < pv.evo_self.size(); ++l) {
    const Tape::Var own = tape.matmul(h, pv.evo_self[l]);
    const Tape::Var nbr = tape.matmul(tape.matmul(coarse, h), pv.evo_neigh[l]);
    h = tape.add(own, nbr);
    h = maybe_dropout(tape, h, hy, opt);
  }
  return h;
}

Tape::Var expand_stage(Tape& tape, Tape::Var hk, const ParamVars& pv) {
  return tape.add_rowvec(tape.matmul(hk, pv.expand_w), pv.expand_b);
}

Tape::Var refine_stage(Tape& tape, Tape::Var x, Tape::Var s, Tape::Var z,
                       const ParamVars& pv) {
  const Tape::Var restored = tape.matmul(s, z);
  const Tape::Var own = tape.matmul(x, pv.refine_x);
  const Tape::Var coarse = tape.matmul(restored, pv.refine_z);
  return tape.sigmoid(tape.matmul(tape.concat_cols(own, coarse), pv.refine_y));
}

void check_input(const Graph& g, const Tensor2& X, const UniGoHyper& hy) {
  if (X.rows != g.n())
    throw ShapeError("model: X is " + X.shape_str() + " but graph has " +
                     std::to_string(g.n()) + " nodes");
  if (X.cols != hy.t_l)
    throw ShapeError("model: X is " + X.shape_str() + " but t_l = " + std::to_string(hy.t_l));
}

}  // namespace

TapedForward model_forward(Tape& tape, const Graph& g, const Tensor2& X,
                           const UniGoParams& params, const ForwardOptions& opt) {
  params.hyper.validate();
  check_input(g, X, params.hyper);
  const ParamVars pv = push_params(tape, params);

  TapedForward fwd;
  fwd.param_vars = pv.flat;
  fwd.x = tape.leaf(X);

  if (params.hyper.mode == ModelMode::Full) {
    const Tape::Var e =
        mean_agg_layers(tape, g, fwd.x, pv.enc_self, pv.enc_neigh, params.hyper, opt);
    const PoolVars pool = pool_stage(tape, e, pv, params.hyper);
    const Tape::Var hk = evolve_stage(tape, g, pool.s, pool.hc, pv, params.hyper, opt);
    const Tape::Var z = expand_stage(tape, hk, pv);
    fwd.y = refine_stage(tape, fwd.x, pool.s, z, pv);
    fwd.s = pool.s;
  } else {
    const Tape::Var h =
        mean_agg_layers(tape, g, fwd.x, pv.evo_self, pv.evo_neigh, params.hyper, opt);
    fwd.y = tape.sigmoid(expand_stage(tape, h, pv));
  }
  return fwd;
}

Tensor2 sharpen_assignment(const Tensor2& s) {
  Tensor2 p(s.rows, s.cols);
  std::vector<double> f(s.cols, 0.0);
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j) f[j] += s.at(i, j);
  for (int i = 0; i < s.rows; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < s.cols; ++j) {
      const double v = f[j] > 0.0 ? s.at(i, j) * s.at(i, j) / f[j] : 0.0;
      p.at(i, j) = v;
      row_sum += v;
    }
    if (row_sum > 0.0)
      for (int j = 0; j < s.cols; ++j) p.at(i, j) /= row_sum;
  }
  return p;
}

Tape::Var model_loss(Tape& tape, const TapedForward& fwd, const Tensor2& y_true,
                     double lambda, const Tensor2* kl_target) {
  if (lambda < 0.0) throw ParamError("model_loss: lambda must be >= 0");
  const Tape::Var target = tape.leaf(y_true);
  const Tape::Var mse = tape.mse(fwd.y, target);
  if (!fwd.s || lambda == 0.0) return mse;
  const Tensor2 sharpened = kl_target ? *kl_target : sharpen_assignment(tape.val(*fwd.s));
  const Tape::Var kl = tape.kl_div(sharpened, *fwd.s);
  return tape.add(tape.scale(kl, lambda), mse);
}

Prediction predict(const Graph& g, const Tensor2& X, const UniGoParams& params) {
  Tape tape;
  const TapedForward fwd = model_forward(tape, g, X, params);
  Prediction out;
  out.y = tape.val(fwd.y);
  if (fwd.s) out.s = tape.val(*fwd.s);
  return out;
}

Tensor2 encode(const Graph& g, const Tensor2& X, const UniGoParams& params) {
  check_input(g, X, params.hyper);
  Tape tape;
  const ParamVars pv = push_params(tape, params);
  const Tape::Var x = tape.leaf(X);
  return tape.val(mean_agg_layers(tape, g, x, pv.enc_self, pv.enc_neigh, params.hyper, {}));
}

PoolResult pool(const Tensor2& E, const UniGoParams& params) {
  params.hyper.validate();
  Tape tape;
  const ParamVars pv = push_params(tape, params);
  const PoolVars v = pool_stage(tape, tape.leaf(E), pv, params.hyper);
  return {tape.val(v.s), tape.val(v.hc)};
}

Tensor2 evolve(const Tensor2& S, const Graph& g, const Tensor2& Hc, const UniGoParams& params) {
  Tape tape;
  const ParamVars pv = push_params(tape, params);
  return tape.val(
      evolve_stage(tape, g, tape.leaf(S), tape.leaf(Hc), pv, params.hyper, {}));
}

Tensor2 expand_time(const Tensor2& Hk, const UniGoParams& params) {
  Tape tape;
  const ParamVars pv = push_params(tape, params);
  return tape.val(expand_stage(tape, tape.leaf(Hk), pv));
}

Tensor2 refine(const Tensor2& X, const Tensor2& S, const Tensor2& Z, const UniGoParams& params) {
  Tape tape;
  const ParamVars pv = push_params(tape, params);
  return tape.val(refine_stage(tape, tape.leaf(X), tape.leaf(S), tape.leaf(Z), pv));
}

namespace {

json tensor_to_json(const Tensor2& t) {
  json j;
  j["shape"] = {t.rows, t.cols};
  j["data"] = t.data;
  return j;
}

Tensor2 tensor_from_json(const json& j, const std::string& name) {
  if (!j.contains("shape") || !j.contains("data"))
    throw ParseError("checkpoint: parameter `" + name + "` missing shape or data");
  const auto shape = j.at("shape");
  Tensor2 t(shape.at(0).get<int>(), shape.at(1).get<int>());
  t.data = j.at("data").get<std::vector<double>>();
  if (t.data.size() != static_cast<std::size_t>(t.rows) * t.cols)
    throw ParseError("checkpoint: parameter `" + name + "` has " +
                     std::to_string(t.data.size()) + " values for shape " + t.shape_str());
  return t;
}

}  // namespace

void save_params(const UniGoParams& params, const std::string& path,
                 const std::string& extra_json) {
  json j;
  j["schema_version"] = 1;
  json hy;
  hy["mode"] = to_string(params.hyper.mode);
  hy["t_l"] = params.hyper.t_l;
  hy["t_h"] = params.hyper.t_h;
  hy["F"] = params.hyper.F();
  hy["F_c"] = params.hyper.Fc();
  hy["heads"] = params.hyper.heads;
  hy["clusters"] = params.hyper.clusters;
  hy["enc_layers"] = params.hyper.enc_layers;
  hy["evo_layers"] = params.hyper.evo_layers;
  hy["tau"] = params.hyper.tau;
  hy["lambda"] = params.hyper.lambda;
  hy["dropout"] = params.hyper.dropout;
  j["hyper"] = hy;
  if (!extra_json.empty()) j["extra"] = json::parse(extra_json);
  json ps;
  for (const auto& [name, t] : params.named()) ps[name] = tensor_to_json(*t);
  j["params"] = ps;

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_params: cannot open " + path);
  f << j.dump(1) << "\n";
  if (!f) throw IoError("save_params: write failed for " + path);
}

UniGoParams load_params(const std::string& path, std::string* extra_json) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_params: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ParseError("load_params: " + path + ": " + e.what());
  }
  if (j.value("schema_version", 0) != 1)
    throw ParseError("load_params: unsupported schema_version in " + path);
  const json& hy = j.at("hyper");
  UniGoHyper hyper;
  hyper.mode = model_mode_from_name(hy.at("mode").get<std::string>());
  hyper.t_l = hy.at("t_l").get<int>();
  hyper.t_h = hy.at("t_h").get<int>();
  hyper.feat = hy.at("F").get<int>();
  hyper.feat_c = hy.at("F_c").get<int>();
  hyper.heads = hy.at("heads").get<int>();
  hyper.clusters = hy.at("clusters").get<int>();
  hyper.enc_layers = hy.at("enc_layers").get<int>();
  hyper.evo_layers = hy.at("evo_layers").get<int>();
  hyper.tau = hy.at("tau").get<double>();
  hyper.lambda = hy.at("lambda").get<double>();
  hyper.dropout = hy.at("dropout").get<double>();

  UniGoParams params = init_params(hyper, 0);
  const json& ps = j.at("params");
  for (auto& [name, t] : params.named()) {
    if (!ps.contains(name)) throw ParseError("load_params: missing parameter `" + name + "`");
    Tensor2 loaded = tensor_from_json(ps.at(name), name);
    if (!loaded.same_shape(*t))
      throw ParseError("load_params: parameter `" + name + "` has shape " + loaded.shape_str() +
                       ", expected " + t->shape_str());
    *t = std::move(loaded);
  }
  if (extra_json) *extra_json = j.contains("extra") ? j.at("extra").dump() : "";
  return params;
}

}  // namespace unigo
