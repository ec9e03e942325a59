#include "unigo/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unigo/community.hpp"
#include "unigo/errors.hpp"

namespace unigo {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void GenerationSpec::validate() const {
  if (sizes.empty()) throw ParamError("spec: sizes grid is empty");
  if (graphs_per_combo < 1) throw ParamError("spec: graphs_per_combo must be >= 1");
  if (ba_k.empty() && er_p.empty() && (ws_k.empty() || ws_p.empty()))
    throw ParamError("spec: no graph type grid is populated");
  if (families.empty()) throw ParamError("spec: families list is empty");
  static const std::set<std::string> known = {
      "fj", "hk", "fj_hk", "fj_hk_noise", "hk_jump", "community_fj_hk", "random_fj_hk"};
  for (const auto& f : families) {
    if (!known.count(f)) throw ParamError("spec: unknown family `" + f + "`");
    if ((f == "fj" || f == "fj_hk" || f == "fj_hk_noise") && alpha.empty())
      throw ParamError("spec: family `" + f + "` needs the alpha grid");
    if ((f == "hk" || f == "fj_hk" || f == "fj_hk_noise" || f == "hk_jump") &&
        confidence.empty())
      throw ParamError("spec: family `" + f + "` needs the confidence grid");
    if (f == "fj_hk_noise" && sigma.empty())
      throw ParamError("spec: family `fj_hk_noise` needs the sigma grid");
    if (f == "hk_jump" && (jump_m.empty() || jump_L.empty()))
      throw ParamError("spec: family `hk_jump` needs jump_m and jump_L grids");
    if ((f == "community_fj_hk" || f == "random_fj_hk") && random_ranges.empty())
      throw ParamError("spec: family `" + f + "` needs random_ranges");
  }
  if (communities < 1) throw ParamError("spec: communities must be >= 1");
  if (max_steps < 1) throw ParamError("spec: max_steps must be >= 1");
  if (min_convergence_step < 0) throw ParamError("spec: min_convergence_step must be >= 0");
}

GenerationSpec paper_grid() {
  GenerationSpec s;
  s.graphs_per_combo = 5;
  s.sizes = {500, 1000, 2000, 3000};
  s.ba_k = {2, 3, 4, 5};
  s.er_p = {0.1, 0.2, 0.3};
  s.ws_k = {4, 6, 8};
  s.ws_p = {0.1, 0.2, 0.3};
  s.alpha = {0.3, 0.4, 0.5, 0.6, 0.7};
  s.confidence = {0.1, 0.2, 0.3, 0.4};
  s.sigma = {0.05, 0.1, 0.15, 0.2, 0.25};
  s.random_ranges = {{0.1, 0.3}, {0.2, 0.4}, {0.3, 0.5}};
  s.communities = 5;
  s.families = {"fj", "hk", "fj_hk", "fj_hk_noise", "community_fj_hk", "random_fj_hk"};
  return s;
}

GenerationSpec desk_grid() {
  GenerationSpec s;
  s.graphs_per_combo = 2;
  s.sizes = {50, 100};
  s.ba_k = {2, 3};
  s.er_p = {0.1, 0.2};
  s.ws_k = {4};
  s.ws_p = {0.1};
  s.alpha = {0.3, 0.5};
  s.confidence = {0.1, 0.3};
  s.sigma = {0.1, 0.2};
  s.random_ranges = {{0.1, 0.3}, {0.3, 0.5}};
  s.communities = 5;
  s.families = {"fj", "hk", "fj_hk", "fj_hk_noise", "community_fj_hk", "random_fj_hk"};
  return s;
}

namespace {

json spec_to_json_obj(const GenerationSpec& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["master_seed"] = s.master_seed;
  j["graphs_per_combo"] = s.graphs_per_combo;
  j["sizes"] = s.sizes;
  j["ba_k"] = s.ba_k;
  j["er_p"] = s.er_p;
  j["ws_k"] = s.ws_k;
  j["ws_p"] = s.ws_p;
  j["alpha"] = s.alpha;
  j["confidence"] = s.confidence;
  j["sigma"] = s.sigma;
  json rr = json::array();
  for (const auto& r : s.random_ranges) rr.push_back({r[0], r[1]});
  j["random_ranges"] = rr;
  j["jump_m"] = s.jump_m;
  j["jump_L"] = s.jump_L;
  j["communities"] = s.communities;
  j["families"] = s.families;
  j["max_steps"] = s.max_steps;
  j["conv_window"] = s.conv_window;
  j["conv_tol"] = s.conv_tol;
  j["min_convergence_step"] = s.min_convergence_step;
  return j;
}

GenerationSpec spec_from_json_obj(const json& j, const std::string& name) {
  static const std::set<std::string> known_keys = {
      "schema_version", "master_seed", "graphs_per_combo", "sizes", "ba_k", "er_p",
      "ws_k", "ws_p", "alpha", "confidence", "sigma", "random_ranges", "jump_m",
      "jump_L", "communities", "families", "max_steps", "conv_window", "conv_tol",
      "min_convergence_step"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known_keys.count(it.key()))
      throw ParseError(name + ": unknown key `" + it.key() + "`");
  GenerationSpec s;
  try {
    s.schema_version = j.value("schema_version", 1);
    s.master_seed = j.value("master_seed", std::uint64_t{0});
    s.graphs_per_combo = j.value("graphs_per_combo", 5);
    if (j.contains("sizes")) s.sizes = j.at("sizes").get<std::vector<int>>();
    if (j.contains("ba_k")) s.ba_k = j.at("ba_k").get<std::vector<int>>();
    if (j.contains("er_p")) s.er_p = j.at("er_p").get<std::vector<double>>();
    if (j.contains("ws_k")) s.ws_k = j.at("ws_k").get<std::vector<int>>();
    if (j.contains("ws_p")) s.ws_p = j.at("ws_p").get<std::vector<double>>();
    if (j.contains("alpha")) s.alpha = j.at("alpha").get<std::vector<double>>();
    if (j.contains("confidence")) s.confidence = j.at("confidence").get<std::vector<double>>();
    if (j.contains("sigma")) s.sigma = j.at("sigma").get<std::vector<double>>();
    if (j.contains("random_ranges"))
      for (const auto& r : j.at("random_ranges"))
        s.random_ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    if (j.contains("jump_m")) s.jump_m = j.at("jump_m").get<std::vector<double>>();
    if (j.contains("jump_L")) s.jump_L = j.at("jump_L").get<std::vector<double>>();
    s.communities = j.value("communities", 5);
    if (j.contains("families")) s.families = j.at("families").get<std::vector<std::string>>();
    s.max_steps = j.value("max_steps", 200);
    s.conv_window = j.value("conv_window", 10);
    s.conv_tol = j.value("conv_tol", 1e-4);
    s.min_convergence_step = j.value("min_convergence_step", 80);
  } catch (const json::exception& e) {
    throw ParseError(name + ": " + e.what());
  }
  return s;
}

}  // namespace

std::string spec_to_json(const GenerationSpec& spec) { return spec_to_json_obj(spec).dump(1); }

GenerationSpec spec_from_json(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(name + ": " + e.what());
  }
  return spec_from_json_obj(j, name);
}

GenerationSpec load_spec(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_spec: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return spec_from_json(ss.str(), path);
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_trajectory_csv: cannot open " + path);
  f << "node";
  for (int t = 0; t <= traj.steps; ++t) f << ",t" << t;
  f << "\n";
  char buf[32];
  for (int i = 0; i < traj.n; ++i) {
    f << i;
    for (int t = 0; t <= traj.steps; ++t) {
      std::snprintf(buf, sizeof buf, ",%.17g", traj.at(i, t));
      f << buf;
    }
    f << "\n";
  }
  if (!f) throw IoError("save_trajectory_csv: write failed for " + path);
}

Trajectory load_trajectory_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_trajectory_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": missing header row");
  int cols = 0;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) ++cols;
    if (cols < 2 || line.substr(0, 5) != "node,")
      throw ParseError(path + ": malformed header `" + line + "`");
    cols -= 1;  // drop the node column
  }
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> vals;
    bool first = true;
    while (std::getline(ss, field, ',')) {
      if (first) {
        first = false;
        continue;
      }
      try {
        vals.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ParseError(path + ": row " + std::to_string(line_no) + ": bad value `" + field +
                         "`");
      }
    }
    if (static_cast<int>(vals.size()) != cols)
      throw ParseError(path + ": row " + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " values, got " + std::to_string(vals.size()));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  Trajectory traj;
  traj.n = static_cast<int>(rows.size());
  traj.steps = cols - 1;
  traj.values.resize(static_cast<std::size_t>(traj.n) * cols);
  for (int i = 0; i < traj.n; ++i)
    for (int t = 0; t < cols; ++t)
      traj.values[static_cast<std::size_t>(i) * cols + t] = rows[i][t];
  return traj;
}

namespace {

const char* noise_mode_name(NoiseMode m) {
  switch (m) {
    case NoiseMode::None: return "none";
    case NoiseMode::AdditiveGaussian: return "additive_gaussian";
    default: return "jump";
  }
}

NoiseMode noise_mode_from(const std::string& s, const std::string& name) {
  if (s == "none") return NoiseMode::None;
  if (s == "additive_gaussian") return NoiseMode::AdditiveGaussian;
  if (s == "jump") return NoiseMode::Jump;
  throw ParseError(name + ": unknown noise mode `" + s + "`");
}

json dynamics_to_json_obj(const DynamicsConfig& cfg) {
  json j;
  j["alpha"] = cfg.alpha;
  j["d"] = cfg.d;
  j["gamma"] = cfg.gamma;
  j["noise_mode"] = noise_mode_name(cfg.noise_mode);
  j["sigma"] = cfg.sigma;
  j["jump_m"] = cfg.jump_m;
  j["jump_L"] = cfg.jump_L;
  j["include_self"] = cfg.include_self;
  j["max_steps"] = cfg.max_steps;
  j["conv_window"] = cfg.conv_window;
  j["conv_tol"] = cfg.conv_tol;
  j["seed"] = cfg.seed;
  return j;
}

DynamicsConfig dynamics_from_json_obj(const json& j, const std::string& name) {
  DynamicsConfig cfg;
  try {
    cfg.alpha = j.at("alpha").get<std::vector<double>>();
    cfg.d = j.at("d").get<std::vector<double>>();
    cfg.gamma = j.at("gamma").get<std::vector<double>>();
    cfg.noise_mode = noise_mode_from(j.at("noise_mode").get<std::string>(), name);
    cfg.sigma = j.at("sigma").get<double>();
    cfg.jump_m = j.at("jump_m").get<double>();
    cfg.jump_L = j.at("jump_L").get<double>();
    cfg.include_self = j.at("include_self").get<bool>();
    cfg.max_steps = j.at("max_steps").get<int>();
    cfg.conv_window = j.at("conv_window").get<int>();
    cfg.conv_tol = j.at("conv_tol").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(name + ": " + e.what());
  }
  return cfg;
}

json run_to_json(const RunRecord& r) {
  json j;
  j["schema_version"] = 1;
  j["run_id"] = r.run_id;
  j["graph_file"] = r.graph_file;
  j["trajectory_file"] = r.trajectory_file;
  json gp;
  gp["type"] = r.graph_params.type;
  gp["n"] = r.graph_params.n;
  if (r.graph_params.p) gp["p"] = *r.graph_params.p;
  if (r.graph_params.k) gp["k"] = *r.graph_params.k;
  gp["replicate"] = r.graph_params.replicate;
  gp["seed"] = r.graph_params.seed;
  j["graph_params"] = gp;
  j["family"] = r.family;
  j["descriptor"] = r.descriptor;
  j["dynamics_params"] = dynamics_to_json_obj(r.dynamics);
  j["seed"] = r.seed;
  if (r.convergence_step)
    j["convergence_step"] = *r.convergence_step;
  else
    j["convergence_step"] = nullptr;
  j["clamped"] = r.clamped;
  j["n"] = r.n;
  return j;
}

RunRecord run_from_json(const json& j, const std::string& name) {
  RunRecord r;
  try {
    r.run_id = j.at("run_id").get<std::string>();
    r.graph_file = j.at("graph_file").get<std::string>();
    r.trajectory_file = j.at("trajectory_file").get<std::string>();
    const json& gp = j.at("graph_params");
    r.graph_params.type = gp.at("type").get<std::string>();
    r.graph_params.n = gp.at("n").get<int>();
    if (gp.contains("p")) r.graph_params.p = gp.at("p").get<double>();
    if (gp.contains("k")) r.graph_params.k = gp.at("k").get<int>();
    r.graph_params.replicate = gp.at("replicate").get<int>();
    r.graph_params.seed = gp.at("seed").get<std::uint64_t>();
    r.family = j.at("family").get<std::string>();
    r.descriptor = j.at("descriptor").get<std::map<std::string, double>>();
    r.dynamics = dynamics_from_json_obj(j.at("dynamics_params"), name);
    r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("convergence_step").is_null())
      r.convergence_step = j.at("convergence_step").get<int>();
    r.clamped = j.at("clamped").get<bool>();
    r.n = j.at("n").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(name + ": " + e.what());
  }
  return r;
}

// One dynamics configuration to run on a graph, fully described by grid
// values so the exact config can be rebuilt from the run seed.
struct DynamicsJob {
  std::string family;
  std::map<std::string, double> descriptor;
};

std::vector<DynamicsJob> enumerate_jobs(const GenerationSpec& spec) {
  std::vector<DynamicsJob> jobs;
  for (const std::string& fam : spec.families) {
    if (fam == "fj") {
      for (double a : spec.alpha) jobs.push_back({fam, {{"alpha", a}}});
    } else if (fam == "hk") {
      for (double d : spec.confidence) jobs.push_back({fam, {{"d", d}}});
    } else if (fam == "fj_hk") {
      for (double a : spec.alpha)
        for (double d : spec.confidence) jobs.push_back({fam, {{"alpha", a}, {"d", d}}});
    } else if (fam == "fj_hk_noise") {
      for (double a : spec.alpha)
        for (double d : spec.confidence)
          for (double sg : spec.sigma)
            jobs.push_back({fam, {{"alpha", a}, {"d", d}, {"sigma", sg}}});
    } else if (fam == "hk_jump") {
      for (double d : spec.confidence)
        for (double m : spec.jump_m)
          for (double L : spec.jump_L)
            jobs.push_back({fam, {{"d", d}, {"jump_m", m}, {"jump_L", L}}});
    } else if (fam == "community_fj_hk" || fam == "random_fj_hk") {
      for (std::size_t lvl = 0; lvl < spec.random_ranges.size(); ++lvl)
        jobs.push_back({fam,
                        {{"range_lo", spec.random_ranges[lvl][0]},
                         {"range_hi", spec.random_ranges[lvl][1]}}});
    }
  }
  return jobs;
}

DynamicsConfig build_job_config(const DynamicsJob& job, const Graph& g,
                                const GenerationSpec& spec, std::uint64_t run_seed) {
  PresetOptions opt;
  opt.max_steps = spec.max_steps;
  opt.conv_window = spec.conv_window;
  opt.conv_tol = spec.conv_tol;
  opt.seed = derive_seed(run_seed, {2});  // noise stream
  auto getd = [&](const char* key) { return job.descriptor.at(key); };

  if (job.family == "fj") {
    opt.alpha = getd("alpha");
    return make_preset(Preset::FJ, g, opt);
  }
  if (job.family == "hk") {
    opt.d = getd("d");
    return make_preset(Preset::HK, g, opt);
  }
  if (job.family == "fj_hk") {
    opt.alpha = getd("alpha");
    opt.d = getd("d");
    return make_preset(Preset::Unified, g, opt);
  }
  if (job.family == "fj_hk_noise") {
    opt.alpha = getd("alpha");
    opt.d = getd("d");
    opt.sigma = getd("sigma");
    return make_preset(Preset::Unified, g, opt);
  }
  if (job.family == "hk_jump") {
    opt.d = getd("d");
    opt.jump_m = getd("jump_m");
    opt.jump_L = getd("jump_L");
    return make_preset(Preset::HKNoisy, g, opt);
  }
  SplitMix64 draw = derive_stream(run_seed, {3});  // parameter draws
  const double lo = getd("range_lo"), hi = getd("range_hi");
  if (job.family == "community_fj_hk") {
    const int c = g.community_count();
    std::vector<double> ac(c), dc(c);
    for (int i = 0; i < c; ++i) ac[i] = draw.uniform(lo, hi);
    for (int i = 0; i < c; ++i) dc[i] = draw.uniform(lo, hi);
    opt.alpha_per_community = ac;
    opt.d_per_community = dc;
    return make_preset(Preset::CommunityFJHK, g, opt);
  }
  if (job.family == "random_fj_hk") {
    std::vector<double> a(g.n()), d(g.n());
    for (int i = 0; i < g.n(); ++i) a[i] = draw.uniform(lo, hi);
    for (int i = 0; i < g.n(); ++i) d[i] = draw.uniform(lo, hi);
    opt.alpha_per_node = a;
    opt.d_per_node = d;
    return make_preset(Preset::Unified, g, opt);
  }
  throw ParamError("unknown dynamics family `" + job.family + "`");
}

struct GraphCombo {
  std::string type;  // "ER", "WS", "BA"
  int type_idx = 0;
  int combo_idx = 0;  // index within the type's parameter grid x sizes
  int n = 0;
  std::optional<double> p;
  std::optional<int> k;
  std::string stem;  // file name stem without replicate suffix
};

std::vector<GraphCombo> enumerate_combos(const GenerationSpec& spec) {
  std::vector<GraphCombo> combos;
  char buf[96];
  for (int n : spec.sizes) {
    int idx = 0;
    for (double p : spec.er_p) {
      GraphCombo c{"ER", 0, idx++, n, p, std::nullopt, ""};
      std::snprintf(buf, sizeof buf, "er_n%d_p%g", n, p);
      c.stem = buf;
      combos.push_back(c);
    }
  }
  for (int n : spec.sizes) {
    int idx = 0;
    for (int k : spec.ws_k)
      for (double p : spec.ws_p) {
        GraphCombo c{"WS", 1, idx++, n, p, k, ""};
        std::snprintf(buf, sizeof buf, "ws_n%d_k%d_p%g", n, k, p);
        c.stem = buf;
        combos.push_back(c);
      }
  }
  for (int n : spec.sizes) {
    int idx = 0;
    for (int k : spec.ba_k) {
      GraphCombo c{"BA", 2, idx++, n, std::nullopt, k, ""};
      std::snprintf(buf, sizeof buf, "ba_n%d_k%d", n, k);
      c.stem = buf;
      combos.push_back(c);
    }
  }
  return combos;
}

}  // namespace

std::string dynamics_to_json(const DynamicsConfig& cfg) {
  return dynamics_to_json_obj(cfg).dump(1);
}

DynamicsConfig dynamics_from_json(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(name + ": " + e.what());
  }
  return dynamics_from_json_obj(j, name);
}

DatasetManifest build_dataset(const GenerationSpec& spec, const std::string& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "graphs", ec);
  fs::create_directories(fs::path(out_dir) / "trajectories", ec);
  fs::create_directories(fs::path(out_dir) / "runs", ec);
  if (ec) throw IoError("build_dataset: cannot create output directories under " + out_dir);
  if (!fs::is_directory(fs::path(out_dir) / "runs"))
    throw IoError("build_dataset: output directory " + out_dir + " is not writable");

  const std::vector<GraphCombo> combos = enumerate_combos(spec);
  const std::vector<DynamicsJob> jobs = enumerate_jobs(spec);
  const bool needs_communities =
      std::count(spec.families.begin(), spec.families.end(), "community_fj_hk") > 0;

  DatasetManifest manifest;
  manifest.spec = spec;
  manifest.counts = {{"ER", 0}, {"WS", 0}, {"BA", 0}};

  int global_run = 0;
  for (const GraphCombo& combo : combos) {
    // Generate this combo's graph replicates, then run every dynamics job
    // on each replicate in parallel. Records keep enumeration order so the
    // manifest does not depend on scheduling.
    std::vector<Graph> graphs(spec.graphs_per_combo);
    std::vector<std::uint64_t> graph_seeds(spec.graphs_per_combo);
    for (int rep = 0; rep < spec.graphs_per_combo; ++rep) {
      const std::uint64_t gseed = derive_seed(
          spec.master_seed, {1, static_cast<std::uint64_t>(combo.type_idx),
                             static_cast<std::uint64_t>(combo.combo_idx),
                             static_cast<std::uint64_t>(combo.n),
                             static_cast<std::uint64_t>(rep)});
      graph_seeds[rep] = gseed;
      if (combo.type == "ER")
        graphs[rep] = generate_er(combo.n, *combo.p, gseed);
      else if (combo.type == "WS")
        graphs[rep] = generate_ws(combo.n, *combo.k, *combo.p, gseed);
      else
        graphs[rep] = generate_ba(combo.n, *combo.k, gseed);
      if (needs_communities)
        detect_communities(graphs[rep], std::min(spec.communities, combo.n));
    }

    const int total = spec.graphs_per_combo * static_cast<int>(jobs.size());
    const int run_base = global_run;  // run ids are enumeration indices
    std::vector<std::optional<RunRecord>> records(total);
    std::string worker_error;

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < total; ++t) {
      try {
        const int rep = t / static_cast<int>(jobs.size());
        const int jidx = t % static_cast<int>(jobs.size());
        const Graph& g = graphs[rep];
        const std::uint64_t run_seed = derive_seed(
            spec.master_seed, {5, static_cast<std::uint64_t>(combo.type_idx),
                               static_cast<std::uint64_t>(combo.combo_idx),
                               static_cast<std::uint64_t>(combo.n),
                               static_cast<std::uint64_t>(rep),
                               static_cast<std::uint64_t>(jidx)});
        const DynamicsConfig cfg = build_job_config(jobs[jidx], g, spec, run_seed);

        SplitMix64 x0_rng = derive_stream(run_seed, {1});
        std::vector<double> x0(g.n());
        for (double& v : x0) v = x0_rng.next_double();

        Trajectory traj = simulate(g, cfg, x0);
        const bool keep =
            !traj.convergence_step || *traj.convergence_step > spec.min_convergence_step;
        if (!keep) continue;

        RunRecord r;
        char idbuf[32];
        std::snprintf(idbuf, sizeof idbuf, "run_%06d", run_base + t);
        r.run_id = idbuf;
        r.graph_file = "graphs/" + combo.stem + "_r" + std::to_string(rep) + ".txt";
        r.trajectory_file = std::string("trajectories/") + idbuf + ".csv";
        r.graph_params = {combo.type, combo.n, combo.p, combo.k, rep, graph_seeds[rep]};
        r.family = jobs[jidx].family;
        r.descriptor = jobs[jidx].descriptor;
        r.dynamics = cfg;
        r.seed = run_seed;
        r.convergence_step = traj.convergence_step;
        r.clamped = traj.clamped;
        r.n = g.n();
        save_trajectory_csv(traj, (fs::path(out_dir) / r.trajectory_file).string());
        records[t] = std::move(r);
      } catch (const std::exception& e) {
#pragma omp critical
        worker_error = e.what();
      }
    }
    if (!worker_error.empty()) throw IoError("build_dataset: " + worker_error);
    global_run += total;

    // Serial write-out of graph files and run records in enumeration order.
    std::vector<bool> graph_written(spec.graphs_per_combo, false);
    for (int t = 0; t < total; ++t) {
      if (!records[t]) continue;
      RunRecord r = std::move(*records[t]);
      const int rep = t / static_cast<int>(jobs.size());
      if (!graph_written[rep]) {
        save_graph(graphs[rep], (fs::path(out_dir) / r.graph_file).string());
        graph_written[rep] = true;
      }
      std::ofstream rf(fs::path(out_dir) / "runs" / (r.run_id + ".json"), std::ios::binary);
      if (!rf) throw IoError("build_dataset: cannot write run record for " + r.run_id);
      rf << run_to_json(r).dump(1) << "\n";
      manifest.counts[r.graph_params.type] += 1;
      manifest.runs.push_back(std::move(r));
    }
  }

  save_manifest(manifest, out_dir);
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& dir) {
  json j;
  j["schema_version"] = manifest.schema_version;
  j["generation_spec"] = spec_to_json_obj(manifest.spec);
  j["counts"] = manifest.counts;
  json runs = json::array();
  for (const RunRecord& r : manifest.runs) runs.push_back("runs/" + r.run_id + ".json");
  j["runs"] = runs;
  std::ofstream f(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!f) throw IoError("save_manifest: cannot open manifest.json under " + dir);
  f << j.dump(1) << "\n";
}

DatasetManifest load_manifest(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream f(root / "manifest.json", std::ios::binary);
  if (!f) throw IoError("load_manifest: cannot open " + (root / "manifest.json").string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ParseError("manifest.json: " + std::string(e.what()));
  }
  DatasetManifest m;
  m.schema_version = j.value("schema_version", 0);
  if (m.schema_version != 1) throw ParseError("manifest.json: unsupported schema_version");
  m.spec = spec_from_json_obj(j.at("generation_spec"), "manifest.generation_spec");
  m.counts = j.at("counts").get<std::map<std::string, int>>();
  for (const auto& entry : j.at("runs")) {
    const std::string rel = entry.get<std::string>();
    const fs::path rp = root / rel;
    std::ifstream rf(rp, std::ios::binary);
    if (!rf) throw IntegrityError("manifest references missing file: " + rp.string());
    json rj;
    try {
      rf >> rj;
    } catch (const json::exception& e) {
      throw ParseError(rp.string() + ": " + e.what());
    }
    RunRecord r = run_from_json(rj, rp.string());
    for (const std::string& ref : {r.graph_file, r.trajectory_file})
      if (!fs::exists(root / ref))
        throw IntegrityError("run " + r.run_id + " references missing file: " +
                             (root / ref).string());
    m.runs.push_back(std::move(r));
  }
  int total = 0;
  for (const auto& [type, c] : m.counts) total += c;
  if (total != static_cast<int>(m.runs.size()))
    throw IntegrityError("manifest counts do not match run list length");
  return m;
}

LoadedRun load_run(const std::string& dir, const RunRecord& record) {
  LoadedRun out;
  out.graph = load_graph((fs::path(dir) / record.graph_file).string());
  out.dynamics = record.dynamics;
  out.trajectory = load_trajectory_csv((fs::path(dir) / record.trajectory_file).string());
  out.trajectory.convergence_step = record.convergence_step;
  out.trajectory.clamped = record.clamped;
  if (out.graph.n() != record.n)
    throw IntegrityError("run " + record.run_id + ": graph has " +
                         std::to_string(out.graph.n()) + " nodes, record says " +
                         std::to_string(record.n));
  return out;
}

}  // namespace unigo
