#include "unigo/kernels.hpp"

#include <cmath>

namespace unigo::kernels {

namespace {

inline double step_node(const StepSpec& s, int i, const double* x, const double* x0,
                        const double* noise, bool* clamped) {
  const Graph& g = *s.g;
  const double xi = x[i];
  const double di = s.d[i];

  double num = 0.0, den = 0.0;
  if (s.include_self) {
    num += xi;  // self weight 1, gate trivially open
    den += 1.0;
  }
  const double* w = g.nbr_w(i);
  int idx = 0;
  for (const int* j = g.nbr_begin(i); j != g.nbr_end(i); ++j, ++idx) {
    const double xj = x[*j];
    if (std::fabs(xi - xj) <= di) {
      num += w[idx] * xj;
      den += w[idx];
    }
  }
  const double social = den > 0.0 ? num / den : xi;
  double v = s.alpha[i] * x0[i] + (1.0 - s.alpha[i]) * social;

  switch (s.mode) {
    case NoiseMode::None:
      break;
    case NoiseMode::AdditiveGaussian:
      v += s.gamma[i] * s.sigma * noise[i];
      break;
    case NoiseMode::Jump:
      if (noise[2 * i] < s.jump_m) v = noise[2 * i + 1] * s.jump_L;
      break;
  }
  if (v < 0.0) {
    v = 0.0;
    *clamped = true;
  } else if (v > 1.0) {
    v = 1.0;
    *clamped = true;
  }
  return v;
}

}  // namespace

bool step_serial(const StepSpec& s, const double* x, const double* x0,
                 const double* noise, double* out) {
  bool clamped = false;
  const int n = s.g->n();
  for (int i = 0; i < n; ++i) out[i] = step_node(s, i, x, x0, noise, &clamped);
  return clamped;
}

bool step_omp(const StepSpec& s, const double* x, const double* x0,
              const double* noise, double* out) {
  int clamped = 0;
  const int n = s.g->n();
#pragma omp parallel for schedule(static) reduction(| : clamped)
  for (int i = 0; i < n; ++i) {
    bool c = false;
    out[i] = step_node(s, i, x, x0, noise, &c);
    clamped |= c ? 1 : 0;
  }
  return clamped != 0;
}

void matmul_serial(const double* a, int ar, int ac, const double* b, int bc, double* out) {
  for (int i = 0; i < ar; ++i) {
    double* row = out + static_cast<std::size_t>(i) * bc;
    for (int j = 0; j < bc; ++j) row[j] = 0.0;
    const double* arow = a + static_cast<std::size_t>(i) * ac;
    for (int k = 0; k < ac; ++k) {
      const double av = arow[k];
      const double* brow = b + static_cast<std::size_t>(k) * bc;
      for (int j = 0; j < bc; ++j) row[j] += av * brow[j];
    }
  }
}

void matmul_omp(const double* a, int ar, int ac, const double* b, int bc, double* out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < ar; ++i) {
    double* row = out + static_cast<std::size_t>(i) * bc;
    for (int j = 0; j < bc; ++j) row[j] = 0.0;
    const double* arow = a + static_cast<std::size_t>(i) * ac;
    for (int k = 0; k < ac; ++k) {
      const double av = arow[k];
      const double* brow = b + static_cast<std::size_t>(k) * bc;
      for (int j = 0; j < bc; ++j) row[j] += av * brow[j];
    }
  }
}

void adj_matmul_serial(const Graph& g, const double* x, int c, double* out) {
  for (int i = 0; i < g.n(); ++i) {
    double* row = out + static_cast<std::size_t>(i) * c;
    for (int j = 0; j < c; ++j) row[j] = 0.0;
    const double* w = g.nbr_w(i);
    int idx = 0;
    for (const int* nb = g.nbr_begin(i); nb != g.nbr_end(i); ++nb, ++idx) {
      const double* xr = x + static_cast<std::size_t>(*nb) * c;
      for (int j = 0; j < c; ++j) row[j] += w[idx] * xr[j];
    }
  }
}

void adj_matmul_omp(const Graph& g, const double* x, int c, double* out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.n(); ++i) {
    double* row = out + static_cast<std::size_t>(i) * c;
    for (int j = 0; j < c; ++j) row[j] = 0.0;
    const double* w = g.nbr_w(i);
    int idx = 0;
    for (const int* nb = g.nbr_begin(i); nb != g.nbr_end(i); ++nb, ++idx) {
      const double* xr = x + static_cast<std::size_t>(*nb) * c;
      for (int j = 0; j < c; ++j) row[j] += w[idx] * xr[j];
    }
  }
}

namespace {
inline void graph_mean_row(const Graph& g, const double* x, int c, int i, double* row) {
  const double* w = g.nbr_w(i);
  double wsum = 0.0;
  for (int j = 0; j < c; ++j) row[j] = 0.0;
  int idx = 0;
  for (const int* nb = g.nbr_begin(i); nb != g.nbr_end(i); ++nb, ++idx) {
    const double* xr = x + static_cast<std::size_t>(*nb) * c;
    for (int j = 0; j < c; ++j) row[j] += w[idx] * xr[j];
    wsum += w[idx];
  }
  if (wsum > 0.0) {
    for (int j = 0; j < c; ++j) row[j] /= wsum;
  } else {
    const double* xr = x + static_cast<std::size_t>(i) * c;
    for (int j = 0; j < c; ++j) row[j] = xr[j];
  }
}
}  // namespace

void graph_mean_serial(const Graph& g, const double* x, int c, double* out) {
  for (int i = 0; i < g.n(); ++i)
    graph_mean_row(g, x, c, i, out + static_cast<std::size_t>(i) * c);
}

void graph_mean_omp(const Graph& g, const double* x, int c, double* out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.n(); ++i)
    graph_mean_row(g, x, c, i, out + static_cast<std::size_t>(i) * c);
}

void pairwise_sqdist_serial(const double* e, int n, int f, const double* centers, int k,
                            double* sq) {
  for (int i = 0; i < n; ++i) {
    const double* ei = e + static_cast<std::size_t>(i) * f;
    double* row = sq + static_cast<std::size_t>(i) * k;
    for (int j = 0; j < k; ++j) {
      const double* kj = centers + static_cast<std::size_t>(j) * f;
      double s = 0.0;
      for (int t = 0; t < f; ++t) {
        const double diff = ei[t] - kj[t];
        s += diff * diff;
      }
      row[j] = s;
    }
  }
}

void pairwise_sqdist_omp(const double* e, int n, int f, const double* centers, int k,
                         double* sq) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* ei = e + static_cast<std::size_t>(i) * f;
    double* row = sq + static_cast<std::size_t>(i) * k;
    for (int j = 0; j < k; ++j) {
      const double* kj = centers + static_cast<std::size_t>(j) * f;
      double s = 0.0;
      for (int t = 0; t < f; ++t) {
        const double diff = ei[t] - kj[t];
        s += diff * diff;
      }
      row[j] = s;
    }
  }
}

}  // namespace unigo::kernels
