// Times the OpenMP kernels against their serial reference implementations
// and verifies that both produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "unigo/dynamics.hpp"
#include "unigo/graph.hpp"
#include "unigo/kernels.hpp"
#include "unigo/rng.hpp"

using namespace unigo;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_s, double omp_s, bool identical) {
  std::printf("%-18s serial %8.4f s   omp %8.4f s   speedup %5.2fx   %s\n", name, serial_s,
              omp_s, serial_s / omp_s, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif

  // Unified dynamics step on a dense ER graph.
  {
    const Graph g = generate_er(3000, 0.3, 42);
    const int n = g.n();
    DynamicsConfig cfg;
    cfg.alpha.assign(n, 0.5);
    cfg.d.assign(n, 0.4);
    cfg.gamma.assign(n, 0.0);
    kernels::StepSpec spec;
    spec.g = &g;
    spec.alpha = cfg.alpha.data();
    spec.d = cfg.d.data();
    spec.gamma = cfg.gamma.data();
    spec.include_self = true;

    SplitMix64 rng(7);
    std::vector<double> x(n), x0(n), out_a(n), out_b(n);
    for (int i = 0; i < n; ++i) x[i] = x0[i] = rng.next_double();

    const int steps = 20;
    const double ts = time_best_of(3, [&] {
      for (int s = 0; s < steps; ++s) kernels::step_serial(spec, x.data(), x0.data(), nullptr, out_a.data());
    });
    const double tp = time_best_of(3, [&] {
      for (int s = 0; s < steps; ++s) kernels::step_omp(spec, x.data(), x0.data(), nullptr, out_b.data());
    });
    report("dynamics step", ts, tp,
           std::memcmp(out_a.data(), out_b.data(), n * sizeof(double)) == 0);
  }

  // Dense matmul.
  {
    const int n = 512;
    SplitMix64 rng(11);
    std::vector<double> a(n * n), b(n * n), out_a(n * n), out_b(n * n);
    for (auto& v : a) v = rng.uniform(-1, 1);
    for (auto& v : b) v = rng.uniform(-1, 1);
    const double ts =
        time_best_of(3, [&] { kernels::matmul_serial(a.data(), n, n, b.data(), n, out_a.data()); });
    const double tp =
        time_best_of(3, [&] { kernels::matmul_omp(a.data(), n, n, b.data(), n, out_b.data()); });
    report("matmul 512^3", ts, tp,
           std::memcmp(out_a.data(), out_b.data(), out_a.size() * sizeof(double)) == 0);
  }

  // Graph aggregation kernels.
  {
    const Graph g = generate_ba(20000, 5, 3);
    const int c = 16;
    SplitMix64 rng(13);
    std::vector<double> x(static_cast<std::size_t>(g.n()) * c), out_a(x.size()), out_b(x.size());
    for (auto& v : x) v = rng.next_double();
    double ts = time_best_of(3, [&] { kernels::graph_mean_serial(g, x.data(), c, out_a.data()); });
    double tp = time_best_of(3, [&] { kernels::graph_mean_omp(g, x.data(), c, out_b.data()); });
    report("graph mean", ts, tp,
           std::memcmp(out_a.data(), out_b.data(), out_a.size() * sizeof(double)) == 0);

    ts = time_best_of(3, [&] { kernels::adj_matmul_serial(g, x.data(), c, out_a.data()); });
    tp = time_best_of(3, [&] { kernels::adj_matmul_omp(g, x.data(), c, out_b.data()); });
    report("adjacency matmul", ts, tp,
           std::memcmp(out_a.data(), out_b.data(), out_a.size() * sizeof(double)) == 0);
  }

  // Pairwise squared distances (pooling kernel).
  {
    const int n = 5000, f = 32, k = 64;
    SplitMix64 rng(17);
    std::vector<double> e(static_cast<std::size_t>(n) * f), centers(static_cast<std::size_t>(k) * f);
    std::vector<double> out_a(static_cast<std::size_t>(n) * k), out_b(out_a.size());
    for (auto& v : e) v = rng.uniform(-1, 1);
    for (auto& v : centers) v = rng.uniform(-1, 1);
    const double ts = time_best_of(
        3, [&] { kernels::pairwise_sqdist_serial(e.data(), n, f, centers.data(), k, out_a.data()); });
    const double tp = time_best_of(
        3, [&] { kernels::pairwise_sqdist_omp(e.data(), n, f, centers.data(), k, out_b.data()); });
    report("pairwise sqdist", ts, tp,
           std::memcmp(out_a.data(), out_b.data(), out_a.size() * sizeof(double)) == 0);
  }

  return 0;
}
