#pragma once

#include "unigo/graph.hpp"

namespace unigo::kernels {

enum class NoiseMode { None, AdditiveGaussian, Jump };

// One synchronous update of the unified dynamics. Per node i the gated
// social term averages neighbor opinions j with |x_i - x_j| <= d_i,
// weighted by w_ij (self joins with weight 1 when include_self); the node
// then blends its initial opinion with stubbornness alpha_i and applies the
// configured noise. `noise` layout: AdditiveGaussian -> n draws of N(0,1);
// Jump -> 2n uniforms in [0,1) as (test, value) pairs; None -> ignored.
// Output is clamped to [0,1]; returns true if any clamp changed a value.
struct StepSpec {
  const Graph* g = nullptr;
  const double* alpha = nullptr;
  const double* d = nullptr;
  const double* gamma = nullptr;
  NoiseMode mode = NoiseMode::None;
  double sigma = 0.0;
  double jump_m = 0.0;
  double jump_L = 1.0;
  bool include_self = true;
};

bool step_serial(const StepSpec& s, const double* x, const double* x0,
                 const double* noise, double* out);

// OpenMP variant; every out[i] is computed by exactly one thread with the
// same per-node accumulation order as the serial kernel, so results are
// bit-identical for any thread count.
bool step_omp(const StepSpec& s, const double* x, const double* x0,
              const double* noise, double* out);

// Row-major dense matmul: out[ar x bc] = a[ar x ac] * b[ac x bc].
void matmul_serial(const double* a, int ar, int ac, const double* b, int bc, double* out);
void matmul_omp(const double* a, int ar, int ac, const double* b, int bc, double* out);

// out[n x c] = A * x where A is the graph's weighted adjacency.
void adj_matmul_serial(const Graph& g, const double* x, int c, double* out);
void adj_matmul_omp(const Graph& g, const double* x, int c, double* out);

// Weighted neighbor mean per row; rows with no neighbors copy themselves.
void graph_mean_serial(const Graph& g, const double* x, int c, double* out);
void graph_mean_omp(const Graph& g, const double* x, int c, double* out);

// sq[n x k]: squared Euclidean distances between rows of e[n x f] and rows
// of centers[k x f].
void pairwise_sqdist_serial(const double* e, int n, int f, const double* centers, int k, double* sq);
void pairwise_sqdist_omp(const double* e, int n, int f, const double* centers, int k, double* sq);

}  // namespace unigo::kernels
