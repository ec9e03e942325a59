#include "unigo/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "unigo/errors.hpp"

namespace unigo {

void DynamicsConfig::validate(int n) const {
  auto check_size = [n](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != n)
      throw ShapeError(std::string("dynamics: ") + name + " has " + std::to_string(v.size()) +
                       " entries, graph has " + std::to_string(n) + " nodes");
  };
  check_size(alpha, "alpha");
  check_size(d, "d");
  check_size(gamma, "gamma");
  for (int i = 0; i < n; ++i) {
    if (!(alpha[i] >= 0.0 && alpha[i] <= 1.0))
      throw ParamError("dynamics: alpha[" + std::to_string(i) + "] outside [0,1]");
    if (!(d[i] >= 0.0 && d[i] <= 1.0))
      throw ParamError("dynamics: d[" + std::to_string(i) + "] outside [0,1]");
    if (!(gamma[i] >= 0.0))
      throw ParamError("dynamics: gamma[" + std::to_string(i) + "] negative");
  }
  if (noise_mode == NoiseMode::Jump) {
    if (!(jump_m >= 0.0 && jump_m <= 1.0))
      throw ParamError("dynamics: jump probability m outside [0,1]");
    if (!(jump_L > 0.0 && jump_L <= 1.0))
      throw ParamError("dynamics: jump range L outside (0,1]");
  }
  if (noise_mode == NoiseMode::AdditiveGaussian && !(sigma >= 0.0))
    throw ParamError("dynamics: sigma negative");
  if (max_steps < 1) throw ParamError("dynamics: max_steps must be >= 1");
  if (conv_window < 1) throw ParamError("dynamics: conv_window must be >= 1");
  if (!(conv_tol > 0.0)) throw ParamError("dynamics: conv_tol must be > 0");
}

std::vector<double> Trajectory::column(int t) const {
  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) col[i] = at(i, t);
  return col;
}

namespace {

void draw_noise(const DynamicsConfig& cfg, int n, SplitMix64& rng, std::vector<double>& noise) {
  // Draws happen serially before the node loop so the update kernel is pure
  // and its parallelization cannot change the stream.
  switch (cfg.noise_mode) {
    case NoiseMode::None:
      break;
    case NoiseMode::AdditiveGaussian:
      noise.resize(n);
      for (int i = 0; i < n; ++i) noise[i] = rng.gaussian(1.0);
      break;
    case NoiseMode::Jump:
      noise.resize(2 * n);
      for (int i = 0; i < 2 * n; ++i) noise[i] = rng.next_double();
      break;
  }
}

kernels::StepSpec make_spec(const Graph& g, const DynamicsConfig& cfg) {
  kernels::StepSpec s;
  s.g = &g;
  s.alpha = cfg.alpha.data();
  s.d = cfg.d.data();
  s.gamma = cfg.gamma.data();
  s.mode = cfg.noise_mode;
  s.sigma = cfg.sigma;
  s.jump_m = cfg.jump_m;
  s.jump_L = cfg.jump_L;
  s.include_self = cfg.include_self;
  return s;
}

void check_opinions(const std::vector<double>& x, int n, const char* name) {
  if (static_cast<int>(x.size()) != n)
    throw ShapeError(std::string("dynamics: ") + name + " has " + std::to_string(x.size()) +
                     " entries, graph has " + std::to_string(n) + " nodes");
  for (double v : x)
    if (std::isnan(v)) throw NumericError(std::string("dynamics: NaN in ") + name);
}

}  // namespace

std::vector<double> step(const Graph& g, const DynamicsConfig& cfg,
                         const std::vector<double>& x_t, const std::vector<double>& x0,
                         SplitMix64& noise_rng, bool* clamped) {
  cfg.validate(g.n());
  check_opinions(x_t, g.n(), "x_t");
  check_opinions(x0, g.n(), "x0");
  std::vector<double> noise;
  draw_noise(cfg, g.n(), noise_rng, noise);
  std::vector<double> out(g.n());
  const bool c = kernels::step_omp(make_spec(g, cfg), x_t.data(), x0.data(), noise.data(),
                                   out.data());
  if (clamped) *clamped = c;
  return out;
}

Trajectory simulate(const Graph& g, const DynamicsConfig& cfg, const std::vector<double>& x0) {
  cfg.validate(g.n());
  check_opinions(x0, g.n(), "x0");
  const int n = g.n();
  const int T = cfg.max_steps;

  Trajectory traj;
  traj.n = n;
  traj.steps = T;
  traj.values.resize(static_cast<std::size_t>(n) * (T + 1));
  for (int i = 0; i < n; ++i) traj.values[static_cast<std::size_t>(i) * (T + 1)] = x0[i];

  SplitMix64 noise_rng = derive_stream(cfg.seed, {0x6E6F697365ULL});  // "noise"
  const kernels::StepSpec spec = make_spec(g, cfg);
  std::vector<double> cur = x0, next(n), noise;
  for (int t = 0; t < T; ++t) {
    draw_noise(cfg, n, noise_rng, noise);
    traj.clamped |= kernels::step_omp(spec, cur.data(), x0.data(), noise.data(), next.data());
    for (int i = 0; i < n; ++i)
      traj.values[static_cast<std::size_t>(i) * (T + 1) + t + 1] = next[i];
    cur.swap(next);
  }
  traj.convergence_step = detect_convergence(traj, cfg.conv_window, cfg.conv_tol);
  return traj;
}

std::optional<int> detect_convergence(const Trajectory& traj, int window, double tol) {
  if (window < 1) throw ParamError("detect_convergence: window must be >= 1");
  if (!(tol > 0.0)) throw ParamError("detect_convergence: tol must be > 0");
  if (window > traj.steps)
    throw ParamError("detect_convergence: window " + std::to_string(window) +
                     " longer than trajectory with " + std::to_string(traj.steps) + " steps");
  const int n = traj.n;
  // mean |x(s+1) - x(s)| per transition
  std::vector<double> change(traj.steps);
  for (int s = 0; s < traj.steps; ++s) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += std::fabs(traj.at(i, s + 1) - traj.at(i, s));
    change[s] = sum / n;
  }
  int run = 0;
  for (int s = 0; s < traj.steps; ++s) {
    run = change[s] <= tol ? run + 1 : 0;
    if (run == window) return s - window + 1;
  }
  return std::nullopt;
}

int count_opinion_clusters(const std::vector<double>& x, double gap) {
  if (x.empty()) throw ParamError("classify_equilibrium: empty opinion vector");
  if (!(gap > 0.0)) throw ParamError("classify_equilibrium: gap must be > 0");
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  int clusters = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] > gap) ++clusters;
  return clusters;
}

Equilibrium classify_equilibrium(const std::vector<double>& x, double gap) {
  const int c = count_opinion_clusters(x, gap);
  if (c == 1) return Equilibrium::Consensus;
  if (c == 2) return Equilibrium::Polarization;
  return Equilibrium::Fragmentation;
}

std::string to_string(Equilibrium e) {
  switch (e) {
    case Equilibrium::Consensus: return "consensus";
    case Equilibrium::Polarization: return "polarization";
    default: return "fragmentation";
  }
}

std::vector<double> fj_equilibrium(const Graph& g, const std::vector<double>& alpha,
                                   const std::vector<double>& x0) {
  const int n = g.n();
  if (static_cast<int>(alpha.size()) != n || static_cast<int>(x0.size()) != n)
    throw ShapeError("fj_equilibrium: alpha/x0 size does not match node count " +
                     std::to_string(n));
  for (int i = 0; i < n; ++i)
    if (!(alpha[i] > 0.0 && alpha[i] <= 1.0))
      throw ParamError("fj_equilibrium: singular system, alpha[" + std::to_string(i) +
                       "] must lie in (0,1]");

  // M = I - (I-A) W, rhs = A x0; dense Gaussian elimination with partial
  // pivoting. Desk-scale n keeps this cheap.
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    m[static_cast<std::size_t>(i) * n + i] = 1.0;
    rhs[i] = alpha[i] * x0[i];
    const double wd = g.weighted_degree(i);
    if (wd > 0.0) {
      const double* w = g.nbr_w(i);
      int idx = 0;
      for (const int* j = g.nbr_begin(i); j != g.nbr_end(i); ++j, ++idx)
        m[static_cast<std::size_t>(i) * n + *j] -= (1.0 - alpha[i]) * w[idx] / wd;
    } else {
      // Isolated node holds its opinion: W_ii = 1.
      m[static_cast<std::size_t>(i) * n + i] -= (1.0 - alpha[i]);
    }
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(m[static_cast<std::size_t>(r) * n + col]) >
          std::fabs(m[static_cast<std::size_t>(pivot) * n + col]))
        pivot = r;
    if (m[static_cast<std::size_t>(pivot) * n + col] == 0.0)
      throw NumericError("fj_equilibrium: singular system");
    if (pivot != col) {
      for (int c = 0; c < n; ++c)
        std::swap(m[static_cast<std::size_t>(pivot) * n + c],
                  m[static_cast<std::size_t>(col) * n + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    const double diag = m[static_cast<std::size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = m[static_cast<std::size_t>(r) * n + col] / diag;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c)
        m[static_cast<std::size_t>(r) * n + c] -= f * m[static_cast<std::size_t>(col) * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= m[static_cast<std::size_t>(r) * n + c] * x[c];
    x[r] = s / m[static_cast<std::size_t>(r) * n + r];
  }
  return x;
}

Preset preset_from_name(const std::string& name) {
  if (name == "degroot") return Preset::DeGroot;
  if (name == "fj") return Preset::FJ;
  if (name == "hk") return Preset::HK;
  if (name == "hk_noisy") return Preset::HKNoisy;
  if (name == "community_fj_hk") return Preset::CommunityFJHK;
  if (name == "unified") return Preset::Unified;
  throw ParamError("unknown preset `" + name + "`");
}

std::string to_string(Preset p) {
  switch (p) {
    case Preset::DeGroot: return "degroot";
    case Preset::FJ: return "fj";
    case Preset::HK: return "hk";
    case Preset::HKNoisy: return "hk_noisy";
    case Preset::CommunityFJHK: return "community_fj_hk";
    default: return "unified";
  }
}

DynamicsConfig make_preset(Preset p, const Graph& g, const PresetOptions& opt) {
  const int n = g.n();
  DynamicsConfig cfg;
  cfg.alpha.assign(n, 0.0);
  cfg.d.assign(n, 1.0);
  cfg.gamma.assign(n, 0.0);
  cfg.max_steps = opt.max_steps;
  cfg.conv_window = opt.conv_window;
  cfg.conv_tol = opt.conv_tol;
  cfg.seed = opt.seed;

  auto fill = [n](std::vector<double>& dst, std::optional<double> constant,
                  const std::optional<std::vector<double>>& per_node, double fallback) {
    if (per_node) {
      dst = *per_node;
    } else {
      dst.assign(n, constant.value_or(fallback));
    }
  };

  switch (p) {
    case Preset::DeGroot:
      cfg.include_self = true;
      break;
    case Preset::FJ:
      cfg.include_self = false;
      fill(cfg.alpha, opt.alpha, opt.alpha_per_node, 0.5);
      break;
    case Preset::HK:
      cfg.include_self = true;
      fill(cfg.d, opt.d, opt.d_per_node, 0.2);
      break;
    case Preset::HKNoisy:
      cfg.include_self = true;
      fill(cfg.d, opt.d, opt.d_per_node, 0.2);
      cfg.noise_mode = NoiseMode::Jump;
      cfg.jump_m = opt.jump_m.value_or(0.1);
      cfg.jump_L = opt.jump_L.value_or(1.0);
      break;
    case Preset::CommunityFJHK: {
      if (!g.has_communities())
        throw ParamError("community_fj_hk preset needs a graph with communities");
      const auto& labels = g.communities();
      const int c = g.community_count();
      std::vector<double> ac(c, opt.alpha.value_or(0.5));
      std::vector<double> dc(c, opt.d.value_or(0.2));
      if (opt.alpha_per_community) {
        if (static_cast<int>(opt.alpha_per_community->size()) != c)
          throw ParamError("community_fj_hk: alpha_per_community size != community count");
        ac = *opt.alpha_per_community;
      }
      if (opt.d_per_community) {
        if (static_cast<int>(opt.d_per_community->size()) != c)
          throw ParamError("community_fj_hk: d_per_community size != community count");
        dc = *opt.d_per_community;
      }
      cfg.include_self = true;
      for (int i = 0; i < n; ++i) {
        cfg.alpha[i] = ac[labels[i]];
        cfg.d[i] = dc[labels[i]];
      }
      break;
    }
    case Preset::Unified:
      cfg.include_self = true;
      fill(cfg.alpha, opt.alpha, opt.alpha_per_node, 0.0);
      fill(cfg.d, opt.d, opt.d_per_node, 1.0);
      break;
  }

  if (opt.sigma) {
    if (cfg.noise_mode == NoiseMode::Jump)
      throw ParamError("make_preset: jump and additive noise cannot be combined");
    cfg.noise_mode = NoiseMode::AdditiveGaussian;
    cfg.sigma = *opt.sigma;
    cfg.gamma.assign(n, 1.0);
  }
  if (p == Preset::Unified && opt.jump_m) {
    if (cfg.noise_mode == NoiseMode::AdditiveGaussian)
      throw ParamError("make_preset: jump and additive noise cannot be combined");
    cfg.noise_mode = NoiseMode::Jump;
    cfg.jump_m = *opt.jump_m;
    cfg.jump_L = opt.jump_L.value_or(1.0);
  }
  cfg.validate(n);
  return cfg;
}

}  // namespace unigo
