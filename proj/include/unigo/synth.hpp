#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unigo/dynamics.hpp"
#include "unigo/graph.hpp"
#include "unigo/train.hpp"

namespace unigo {

// Full description of a dataset generation job: graph grids, dynamics
// grids, family list and filtering controls. A dataset is a pure function
// of (spec, master_seed).
struct GenerationSpec {
  int schema_version = 1;
  std::uint64_t master_seed = 0;
  int graphs_per_combo = 5;
  std::vector<int> sizes;
  std::vector<int> ba_k;
  std::vector<double> er_p;
  std::vector<int> ws_k;
  std::vector<double> ws_p;
  std::vector<double> alpha;       // stubbornness grid
  std::vector<double> confidence;  // threshold grid
  std::vector<double> sigma;       // additive noise grid
  std::vector<std::array<double, 2>> random_ranges;  // per-node / per-community draws
  std::vector<double> jump_m;  // only used by the hk_jump family
  std::vector<double> jump_L;
  int communities = 5;
  // Enabled dynamics families: fj, hk, fj_hk, fj_hk_noise, hk_jump,
  // community_fj_hk, random_fj_hk. Conflicting parameter combinations are
  // never enumerated (jump and additive noise stay separate; community
  // coupling and global random draws stay separate).
  std::vector<std::string> families;
  int max_steps = 200;
  int conv_window = 10;
  double conv_tol = 1e-4;
  int min_convergence_step = 80;  // keep runs converging strictly later (or never)

  void validate() const;
};

// The exact grids of the published generation protocol.
GenerationSpec paper_grid();
// Structure-preserving scaled-down variant for desk-sized jobs.
GenerationSpec desk_grid();

std::string spec_to_json(const GenerationSpec& spec);
GenerationSpec spec_from_json(const std::string& text, const std::string& name = "<spec>");
GenerationSpec load_spec(const std::string& path);

struct GraphParams {
  std::string type;  // "ER", "WS", "BA"
  int n = 0;
  std::optional<double> p;
  std::optional<int> k;
  int replicate = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const GraphParams&, const GraphParams&) = default;
};

struct RunRecord {
  std::string run_id;
  std::string graph_file;       // relative to the dataset directory
  std::string trajectory_file;  // relative to the dataset directory
  GraphParams graph_params;
  std::string family;
  std::map<std::string, double> descriptor;  // grid values behind the config
  DynamicsConfig dynamics;
  std::uint64_t seed = 0;  // per-run seed, regenerable in isolation
  std::optional<int> convergence_step;
  bool clamped = false;
  int n = 0;
};

struct DatasetManifest {
  int schema_version = 1;
  GenerationSpec spec;
  std::vector<RunRecord> runs;
  std::map<std::string, int> counts;  // kept runs per graph type
};

// Generates every (graph, dynamics) combination of the spec, simulates
// max_steps updates from uniform random initial opinions, and keeps only
// runs whose convergence step exceeds min_convergence_step or is absent.
// Output layout under out_dir: manifest.json, graphs/*.txt,
// trajectories/*.csv, runs/*.json. Byte-identical on re-run and
// independent of worker count.
DatasetManifest build_dataset(const GenerationSpec& spec, const std::string& out_dir);

void save_manifest(const DatasetManifest& manifest, const std::string& dir);
// Reads manifest.json and all run records; verifies every referenced file
// exists (IntegrityError listing the missing path otherwise).
DatasetManifest load_manifest(const std::string& dir);

struct LoadedRun {
  Graph graph;
  DynamicsConfig dynamics;
  Trajectory trajectory;
};
LoadedRun load_run(const std::string& dir, const RunRecord& record);

// Trajectory CSV: header `node,t0,...,tT`, one row per node, round-trip
// exact values. Convergence metadata lives in the run record.
void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

std::string dynamics_to_json(const DynamicsConfig& cfg);
DynamicsConfig dynamics_from_json(const std::string& text, const std::string& name = "<dynamics>");

}  // namespace unigo
