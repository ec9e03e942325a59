#pragma once

#include <string>
#include <vector>

#include "unigo/errors.hpp"

namespace unigo {

// Dense row-major matrix of 64-bit reals with an optional gradient buffer
// of identical shape (empty vector = absent).
struct Tensor2 {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;
  std::vector<double> grad;

  Tensor2() = default;
  Tensor2(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  Tensor2(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != static_cast<std::size_t>(r) * c)
      throw ShapeError("Tensor2: " + std::to_string(data.size()) + " values for shape " +
                       std::to_string(r) + "x" + std::to_string(c));
  }

  std::size_t size() const { return data.size(); }
  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
  std::string shape_str() const { return std::to_string(rows) + "x" + std::to_string(cols); }

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
  void zero_grad() { grad.assign(data.size(), 0.0); }

  friend bool operator==(const Tensor2& a, const Tensor2& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
  }
};

}  // namespace unigo
