// unigo: opinion-dynamics lab CLI. Subcommands generate graphs, simulate
// the unified dynamics, build synthetic datasets, train and evaluate the
// coarsen-refine predictor, gradient-check the tape, and emit plots.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "unigo/community.hpp"
#include "unigo/dynamics.hpp"
#include "unigo/errors.hpp"
#include "unigo/graph.hpp"
#include "unigo/model.hpp"
#include "unigo/svg.hpp"
#include "unigo/synth.hpp"
#include "unigo/tape.hpp"
#include "unigo/train.hpp"

namespace {

using namespace unigo;

void set_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

struct GraphArgs {
  std::string source;  // er | ws | ba | <path>
  int n = 50;
  double p = 0.2;
  int k = 4;
};

Graph make_graph(const GraphArgs& a, std::uint64_t seed) {
  if (a.source == "er") return generate_er(a.n, a.p, seed);
  if (a.source == "ws") return generate_ws(a.n, a.k, a.p, seed);
  if (a.source == "ba") return generate_ba(a.n, a.k, seed);
  return load_graph(a.source);
}

struct DatasetSamples {
  std::deque<LoadedRun> runs;     // owns graphs/trajectories
  std::vector<Sample> samples;    // one head window per usable run
  std::vector<std::string> skipped;
};

DatasetSamples collect_samples(const std::string& dir, const DatasetManifest& manifest,
                               int t_l, int t_h) {
  DatasetSamples out;
  for (const RunRecord& rec : manifest.runs) {
    LoadedRun lr = load_run(dir, rec);
    if (lr.trajectory.steps + 1 < t_l + t_h) {
      out.skipped.push_back(rec.run_id);
      continue;
    }
    out.runs.push_back(std::move(lr));
    auto [x, y] = head_window(out.runs.back().trajectory, t_l, t_h);
    Sample s;
    s.g = &out.runs.back().graph;
    s.x = std::move(x);
    s.y_true = std::move(y);
    s.run_id = rec.run_id;
    out.samples.push_back(std::move(s));
  }
  return out;
}

std::vector<Sample> take(const std::vector<Sample>& all, const std::vector<int>& idx) {
  std::vector<Sample> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(all[i]);
  return out;
}

int cmd_gen_graph(const GraphArgs& ga, std::uint64_t seed, const std::string& out,
                  int communities) {
  Graph g = make_graph(ga, derive_seed(seed, {0x677261ULL}));
  if (communities > 0) {
    const CommunityResult res = detect_communities(g, communities);
    if (!res.reached_target)
      std::cerr << "note: found only " << res.count << " communities\n";
  }
  save_graph(g, out);
  std::printf("wrote %s: n=%d m=%d\n", out.c_str(), g.n(), g.m());
  return 0;
}

int cmd_simulate(const GraphArgs& ga, const std::string& preset_name, PresetOptions opt,
                 std::uint64_t seed, int communities, double gap, const std::string& out,
                 const std::string& meta_path) {
  Graph g = make_graph(ga, derive_seed(seed, {0x677261ULL}));
  const Preset preset = preset_from_name(preset_name);
  if (preset == Preset::CommunityFJHK && !g.has_communities())
    detect_communities(g, communities > 0 ? communities : 5);
  opt.seed = derive_seed(seed, {0x64796EULL});
  const DynamicsConfig cfg = make_preset(preset, g, opt);

  SplitMix64 x0_rng = derive_stream(seed, {0x7830ULL});
  std::vector<double> x0(g.n());
  for (double& v : x0) v = x0_rng.next_double();

  const Trajectory traj = simulate(g, cfg, x0);
  save_trajectory_csv(traj, out);

  const std::vector<double> final_col = traj.column(traj.steps);
  const auto [mn, mx] = std::minmax_element(final_col.begin(), final_col.end());
  const Equilibrium eq = classify_equilibrium(final_col, gap);
  if (!meta_path.empty()) {
    std::ofstream mf(meta_path, std::ios::binary);
    if (!mf) throw IoError("simulate: cannot open " + meta_path);
    mf << "{\n \"preset\": \"" << preset_name << "\",\n \"n\": " << g.n()
       << ",\n \"steps\": " << traj.steps << ",\n \"convergence_step\": ";
    if (traj.convergence_step)
      mf << *traj.convergence_step;
    else
      mf << "null";
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  ",\n \"clamped\": %s,\n \"final_range\": %.17g,\n \"classification\": "
                  "\"%s\"\n}\n",
                  traj.clamped ? "true" : "false", *mx - *mn, to_string(eq).c_str());
    mf << buf;
  }
  std::printf("simulated %d steps on n=%d: convergence_step=%s final_range=%.6g %s\n",
              traj.steps, g.n(),
              traj.convergence_step ? std::to_string(*traj.convergence_step).c_str() : "none",
              *mx - *mn, to_string(eq).c_str());
  return 0;
}

int cmd_build_dataset(const std::string& grid, const std::string& spec_path,
                      std::optional<std::uint64_t> seed, std::optional<int> graphs_per_combo,
                      const std::string& out_dir) {
  GenerationSpec spec = grid == "paper" ? paper_grid() : desk_grid();
  if (!spec_path.empty()) spec = load_spec(spec_path);
  if (seed) spec.master_seed = *seed;
  if (graphs_per_combo) spec.graphs_per_combo = *graphs_per_combo;
  const DatasetManifest manifest = build_dataset(spec, out_dir);
  std::printf("dataset at %s: %zu runs kept (ER %d, WS %d, BA %d)\n", out_dir.c_str(),
              manifest.runs.size(), manifest.counts.at("ER"), manifest.counts.at("WS"),
              manifest.counts.at("BA"));
  return 0;
}

int cmd_train(const std::string& dataset_dir, const std::string& out_model,
              const std::string& history_path, UniGoHyper hyper, TrainConfig cfg,
              std::uint64_t seed, std::uint64_t split_seed, std::uint64_t init_seed) {
  const DatasetManifest manifest = load_manifest(dataset_dir);
  DatasetSamples data = collect_samples(dataset_dir, manifest, hyper.t_l, hyper.t_h);
  for (const auto& id : data.skipped)
    std::cerr << "note: run " << id << " too short for t_l+t_h, skipped\n";
  if (data.samples.size() < 3)
    throw ParamError("train: need at least 3 usable runs, have " +
                     std::to_string(data.samples.size()));

  const SplitIndices idx = split(static_cast<int>(data.samples.size()), {0.7, 0.1, 0.2},
                                 split_seed);
  const std::vector<Sample> train_set = take(data.samples, idx.train);
  const std::vector<Sample> val_set = take(data.samples, idx.val);

  hyper.lambda = cfg.lambda;
  cfg.seed = seed;
  const UniGoParams init = init_params(hyper, init_seed);
  const TrainResult result = train(train_set, val_set, init, cfg);

  char extra[128];
  std::snprintf(extra, sizeof extra, "{\"split_seed\": %llu}",
                static_cast<unsigned long long>(split_seed));
  save_params(result.params, out_model, extra);
  if (!history_path.empty()) save_history_csv(result.history, history_path);
  std::printf("trained on %zu runs (val %zu): best val MSE %.6g at step %d, model -> %s\n",
              train_set.size(), val_set.size(), result.best_val_mse, result.best_step,
              out_model.c_str());
  return 0;
}

int cmd_evaluate(const std::string& dataset_dir, const std::string& model_path,
                 const std::string& split_name, std::optional<std::uint64_t> split_seed_arg,
                 const std::string& out_json, const std::string& out_csv) {
  std::string extra;
  const UniGoParams params = load_params(model_path, &extra);
  std::uint64_t split_seed = 0;
  if (split_seed_arg) {
    split_seed = *split_seed_arg;
  } else if (!extra.empty()) {
    const auto pos = extra.find("split_seed");
    if (pos != std::string::npos)
      split_seed = std::strtoull(extra.c_str() + extra.find(':', pos) + 1, nullptr, 10);
  }

  const DatasetManifest manifest = load_manifest(dataset_dir);
  DatasetSamples data =
      collect_samples(dataset_dir, manifest, params.hyper.t_l, params.hyper.t_h);
  std::vector<Sample> chosen;
  if (split_name == "all") {
    chosen = data.samples;
  } else {
    const SplitIndices idx = split(static_cast<int>(data.samples.size()), {0.7, 0.1, 0.2},
                                   split_seed);
    if (split_name == "train")
      chosen = take(data.samples, idx.train);
    else if (split_name == "val")
      chosen = take(data.samples, idx.val);
    else
      chosen = take(data.samples, idx.test);
  }
  if (chosen.empty()) throw ParamError("evaluate: empty `" + split_name + "` split");

  const EvalReport report = evaluate(chosen, params);
  if (!out_json.empty()) save_report_json(report, out_json);
  if (!out_csv.empty()) save_report_csv(report, out_csv);
  std::printf("%s split (%zu runs): MSE %.6g +- %.6g, MWD %.6g +- %.6g | baseline MSE %.6g "
              "+- %.6g, MWD %.6g +- %.6g\n",
              split_name.c_str(), report.runs.size(), report.mean_mse, report.std_mse,
              report.mean_mwd, report.std_mwd, report.mean_baseline_mse,
              report.std_baseline_mse, report.mean_baseline_mwd, report.std_baseline_mwd);
  return 0;
}

int cmd_gradcheck(int n, double p, UniGoHyper hyper, double lambda, double eps, double tol,
                  std::uint64_t seed) {
  const Graph g = generate_er(n, p, derive_seed(seed, {0x677261ULL}));
  SplitMix64 data_rng = derive_stream(seed, {0x64617461ULL});
  Tensor2 x(n, hyper.t_l), y_true(n, hyper.t_h);
  for (auto& v : x.data) v = data_rng.next_double();
  for (auto& v : y_true.data) v = data_rng.next_double();

  const UniGoParams proto = init_params(hyper, seed);
  std::vector<Tensor2> flat;
  for (const auto& [name, t] : proto.named()) flat.push_back(*t);

  // The sharpened KL target is frozen at the base point so the checked
  // loss is the one whose gradient the tape actually computes.
  std::optional<Tensor2> frozen_target;
  UniGoParams scratch = proto;
  auto loss_fn = [&](const std::vector<Tensor2>& params,
                     std::vector<Tensor2>* grads) -> double {
    auto named = scratch.named();
    for (std::size_t i = 0; i < named.size(); ++i) *named[i].second = params[i];
    Tape tape;
    const TapedForward fwd = model_forward(tape, g, x, scratch);
    if (lambda > 0.0 && fwd.s && !frozen_target)
      frozen_target = sharpen_assignment(tape.val(*fwd.s));
    const Tape::Var loss =
        model_loss(tape, fwd, y_true, lambda, frozen_target ? &*frozen_target : nullptr);
    if (grads) {
      tape.backward(loss);
      grads->clear();
      for (Tape::Var v : fwd.param_vars) grads->push_back(tape.grad_tensor(v));
    }
    return tape.val(loss).data[0];
  };

  const double err = grad_check(loss_fn, flat, eps, seed);
  std::printf("gradcheck: n=%d K=%d heads=%d t_l=%d t_h=%d lambda=%g -> max relative error "
              "%.3g (tol %g)\n",
              n, hyper.clusters, hyper.heads, hyper.t_l, hyper.t_h, lambda, err, tol);
  return err < tol ? 0 : 1;
}

int cmd_plot(const std::string& traj_path, const std::string& history_path,
             const std::string& out_svg, const std::string& out_csv,
             const std::string& title) {
  if (!traj_path.empty()) {
    const Trajectory traj = load_trajectory_csv(traj_path);
    save_trajectory_svg(traj, out_svg, title.empty() ? "opinion trajectories" : title);
    if (!out_csv.empty()) save_trajectory_csv(traj, out_csv);
    std::printf("plotted %d nodes x %d steps -> %s\n", traj.n, traj.steps, out_svg.c_str());
    return 0;
  }
  std::ifstream f(history_path, std::ios::binary);
  if (!f) throw IoError("plot: cannot open " + history_path);
  std::string line;
  if (!std::getline(f, line) || line != "step,train_loss,val_mse")
    throw ParseError(history_path + ": not a training history CSV");
  std::vector<HistoryRow> hist;
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    HistoryRow row;
    char valbuf[64] = {0};
    const int got = std::sscanf(line.c_str(), "%d,%lf,%63s", &row.step, &row.train_loss,
                                valbuf);
    if (got < 2)
      throw ParseError(history_path + ": row " + std::to_string(line_no) + " malformed");
    if (got == 3 && valbuf[0] != '\0') row.val_mse = std::stod(valbuf);
    hist.push_back(row);
  }
  save_history_svg(hist, out_svg, title.empty() ? "training history" : title);
  std::printf("plotted %zu history rows -> %s\n", hist.size(), out_svg.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unigo: opinion dynamics simulation and coarsen-refine prediction"};
  app.require_subcommand(1);

  // gen-graph ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen-graph", "Generate a seeded random graph file");
  GraphArgs gen_ga;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "graph.txt";
  int gen_comms = 0;
  gen->add_option("--type", gen_ga.source, "er, ws or ba")->required();
  gen->add_option("--n", gen_ga.n, "node count");
  gen->add_option("--p", gen_ga.p, "ER edge probability / WS rewiring probability");
  gen->add_option("--k", gen_ga.k, "WS even degree / BA attachment count");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output graph file");
  gen->add_option("--communities", gen_comms, "detect this many communities");

  // simulate ----------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Run the unified dynamics on a graph");
  GraphArgs sim_ga;
  std::string sim_preset = "unified";
  PresetOptions sim_opt;
  double sim_alpha = -1.0, sim_d = -1.0, sim_sigma = -1.0, sim_jm = -1.0, sim_jl = -1.0;
  std::uint64_t sim_seed = 0;
  int sim_comms = 0, sim_jobs = 1;
  double sim_gap = 0.05;
  std::string sim_out = "trajectory.csv", sim_meta;
  sim->add_option("--graph", sim_ga.source, "er, ws, ba or a graph file path")->required();
  sim->add_option("--n", sim_ga.n, "node count (generated graphs)");
  sim->add_option("--p", sim_ga.p, "edge/rewiring probability");
  sim->add_option("--k", sim_ga.k, "degree parameter");
  sim->add_option("--preset", sim_preset,
                  "degroot, fj, hk, hk_noisy, community_fj_hk or unified");
  sim->add_option("--alpha", sim_alpha, "stubbornness");
  sim->add_option("--d", sim_d, "confidence threshold");
  sim->add_option("--sigma", sim_sigma, "additive noise level");
  sim->add_option("--jump-m", sim_jm, "jump probability");
  sim->add_option("--jump-L", sim_jl, "jump range upper bound");
  sim->add_option("--steps", sim_opt.max_steps, "number of update steps");
  sim->add_option("--conv-window", sim_opt.conv_window, "convergence window");
  sim->add_option("--conv-tol", sim_opt.conv_tol, "convergence tolerance");
  sim->add_option("--communities", sim_comms, "communities for the community preset");
  sim->add_option("--gap", sim_gap, "cluster gap for equilibrium classification");
  sim->add_option("--seed", sim_seed, "controls graph, initial opinions and noise");
  sim->add_option("--out", sim_out, "trajectory CSV path");
  sim->add_option("--meta", sim_meta, "metadata JSON path");
  sim->add_option("--jobs", sim_jobs, "worker threads (1 = bitwise deterministic)");

  // build-dataset -------------------------------------------------------------
  auto* bld = app.add_subcommand("build-dataset", "Generate a UniSyn-style dataset");
  std::string bld_grid = "desk", bld_spec, bld_out;
  std::optional<std::uint64_t> bld_seed;
  std::optional<int> bld_gpc;
  int bld_jobs = 1;
  bld->add_option("--grid", bld_grid, "builtin grid: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  bld->add_option("--spec", bld_spec, "generation spec JSON (overrides --grid)");
  bld->add_option("--seed", bld_seed, "master seed override");
  bld->add_option("--graphs-per-combo", bld_gpc, "graph replicates per combination");
  bld->add_option("--out", bld_out, "output dataset directory")->required();
  bld->add_option("--jobs", bld_jobs, "worker threads (1 = bitwise deterministic)");

  // train ---------------------------------------------------------------------
  auto* trn = app.add_subcommand("train", "Train the predictor on a dataset");
  std::string trn_dataset, trn_out = "model.json", trn_history, trn_mode = "full";
  UniGoHyper trn_hyper;
  TrainConfig trn_cfg;
  std::uint64_t trn_seed = 0;
  std::optional<std::uint64_t> trn_split_seed;
  std::optional<std::uint64_t> trn_init_seed;
  int trn_jobs = 1;
  trn_hyper.clusters = 10;
  trn_cfg.lambda = 0.0;
  trn_cfg.epochs = 30;
  trn->add_option("--dataset", trn_dataset, "dataset directory")->required();
  trn->add_option("--out", trn_out, "model checkpoint path");
  trn->add_option("--history", trn_history, "training history CSV path");
  trn->add_option("--mode", trn_mode, "full or ablation_c")
      ->check(CLI::IsMember({"full", "ablation_c"}));
  trn->add_option("--tl", trn_hyper.t_l, "observed steps t_l");
  trn->add_option("--th", trn_hyper.t_h, "predicted steps t_h");
  trn->add_option("--K", trn_hyper.clusters, "supernode count");
  trn->add_option("--heads", trn_hyper.heads, "attention heads");
  trn->add_option("--enc-layers", trn_hyper.enc_layers, "encoder depth");
  trn->add_option("--layers", trn_hyper.evo_layers, "evolution depth");
  trn->add_option("--tau", trn_hyper.tau, "pooling temperature");
  trn->add_option("--dropout", trn_hyper.dropout, "dropout probability");
  trn->add_option("--lambda", trn_cfg.lambda, "KL weight");
  trn->add_option("--lr", trn_cfg.lr, "learning rate");
  trn->add_option("--epochs", trn_cfg.epochs, "training epochs");
  trn->add_option("--max-steps", trn_cfg.max_steps, "optimizer step cap (0 = none)");
  trn->add_option("--batch", trn_cfg.batch_runs, "runs per optimizer step");
  trn->add_option("--patience", trn_cfg.patience, "early-stop patience (epochs)");
  trn->add_option("--seed", trn_seed, "training seed");
  trn->add_option("--split-seed", trn_split_seed, "run-level split seed (default --seed)");
  trn->add_option("--init-seed", trn_init_seed, "parameter init seed (default --seed)");
  trn->add_option("--jobs", trn_jobs, "worker threads (1 = bitwise deterministic)");

  // evaluate --------------------------------------------------------------------
  auto* evl = app.add_subcommand("evaluate", "Evaluate a model against a dataset split");
  std::string evl_dataset, evl_model, evl_split = "test", evl_json, evl_csv;
  std::optional<std::uint64_t> evl_split_seed;
  evl->add_option("--dataset", evl_dataset, "dataset directory")->required();
  evl->add_option("--model", evl_model, "model checkpoint")->required();
  evl->add_option("--split", evl_split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  evl->add_option("--split-seed", evl_split_seed, "split seed (default: stored in model)");
  evl->add_option("--out-json", evl_json, "report JSON path");
  evl->add_option("--out-csv", evl_csv, "report CSV path");

  // gradcheck ---------------------------------------------------------------------
  auto* gck = app.add_subcommand("gradcheck", "Finite-difference check of the model gradient");
  int gck_n = 20;
  double gck_p = 0.3, gck_lambda = 0.5, gck_eps = 1e-5, gck_tol = 1e-4;
  UniGoHyper gck_hyper;
  gck_hyper.t_l = 4;
  gck_hyper.t_h = 8;
  gck_hyper.clusters = 4;
  gck_hyper.heads = 2;
  std::uint64_t gck_seed = 1;
  std::string gck_mode = "full";
  gck->add_option("--n", gck_n, "node count");
  gck->add_option("--p", gck_p, "ER edge probability");
  gck->add_option("--K", gck_hyper.clusters, "supernode count");
  gck->add_option("--heads", gck_hyper.heads, "attention heads");
  gck->add_option("--enc-layers", gck_hyper.enc_layers, "encoder depth");
  gck->add_option("--layers", gck_hyper.evo_layers, "evolution depth");
  gck->add_option("--tl", gck_hyper.t_l, "observed steps");
  gck->add_option("--th", gck_hyper.t_h, "predicted steps");
  gck->add_option("--tau", gck_hyper.tau, "pooling temperature");
  gck->add_option("--lambda", gck_lambda, "KL weight");
  gck->add_option("--eps", gck_eps, "finite-difference step");
  gck->add_option("--tol", gck_tol, "acceptance threshold");
  gck->add_option("--mode", gck_mode, "full or ablation_c")
      ->check(CLI::IsMember({"full", "ablation_c"}));
  gck->add_option("--seed", gck_seed, "seed for graph, data and init");

  // plot ----------------------------------------------------------------------------
  auto* plt = app.add_subcommand("plot", "Render a trajectory or training history as SVG");
  std::string plt_traj, plt_history, plt_out = "plot.svg", plt_csv, plt_title;
  plt->add_option("--traj", plt_traj, "trajectory CSV input");
  plt->add_option("--history", plt_history, "training history CSV input");
  plt->add_option("--out", plt_out, "output SVG path");
  plt->add_option("--csv-out", plt_csv, "re-emit the per-node trajectory CSV");
  plt->add_option("--title", plt_title, "chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(gen)) return cmd_gen_graph(gen_ga, gen_seed, gen_out, gen_comms);
    if (app.got_subcommand(sim)) {
      set_jobs(sim_jobs);
      if (sim_alpha >= 0.0) sim_opt.alpha = sim_alpha;
      if (sim_d >= 0.0) sim_opt.d = sim_d;
      if (sim_sigma >= 0.0) sim_opt.sigma = sim_sigma;
      if (sim_jm >= 0.0) sim_opt.jump_m = sim_jm;
      if (sim_jl >= 0.0) sim_opt.jump_L = sim_jl;
      return cmd_simulate(sim_ga, sim_preset, sim_opt, sim_seed, sim_comms, sim_gap, sim_out,
                          sim_meta);
    }
    if (app.got_subcommand(bld)) {
      set_jobs(bld_jobs);
      return cmd_build_dataset(bld_grid, bld_spec, bld_seed, bld_gpc, bld_out);
    }
    if (app.got_subcommand(trn)) {
      set_jobs(trn_jobs);
      trn_hyper.mode = model_mode_from_name(trn_mode);
      return cmd_train(trn_dataset, trn_out, trn_history, trn_hyper, trn_cfg, trn_seed,
                       trn_split_seed.value_or(trn_seed), trn_init_seed.value_or(trn_seed));
    }
    if (app.got_subcommand(evl))
      return cmd_evaluate(evl_dataset, evl_model, evl_split, evl_split_seed, evl_json,
                          evl_csv);
    if (app.got_subcommand(gck)) {
      gck_hyper.mode = model_mode_from_name(gck_mode);
      return cmd_gradcheck(gck_n, gck_p, gck_hyper, gck_lambda, gck_eps, gck_tol, gck_seed);
    }
    if (app.got_subcommand(plt)) {
      if (plt_traj.empty() == plt_history.empty())
        throw ParamError("plot: pass exactly one of --traj or --history");
      return cmd_plot(plt_traj, plt_history, plt_out, plt_csv, plt_title);
    }
  } catch (const ParamError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
