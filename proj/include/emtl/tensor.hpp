#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace emtl {

inline int shape_size(const std::vector<int>& s) {
  int n = 1;
  for (int d : s) n *= d;
  return n;
}

inline std::string shape_str(const std::vector<int>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// Dense row-major tensor of 64-bit floats. Everything at desk scale is
// value-semantic; copies are cheap enough and keep the autodiff tape simple.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<double> data) : shape(std::move(s)), v(std::move(data)) {
    if (shape_size(shape) != static_cast<int>(v.size()))
      throw std::invalid_argument("Tensor: value count " + std::to_string(v.size()) +
                                  " does not match shape " + shape_str(shape));
  }

  static Tensor zeros(std::vector<int> s) {
    Tensor t;
    t.v.assign(static_cast<std::size_t>(shape_size(s)), 0.0);
    t.shape = std::move(s);
    return t;
  }
  static Tensor full(std::vector<int> s, double x) {
    Tensor t = zeros(std::move(s));
    for (double& e : t.v) e = x;
    return t;
  }
  static Tensor scalar(double x) { return Tensor({1}, {x}); }

  int size() const { return static_cast<int>(v.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }

  double* data() { return v.data(); }
  const double* data() const { return v.data(); }

  // Row-major accessors for the common ranks.
  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * dim(1) + j]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * dim(1) + j]; }
  double& at(int i, int j, int k) {
    return v[(static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k];
  }
  double at(int i, int j, int k) const {
    return v[(static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double e : v)
      if (!std::isfinite(e)) return false;
    return true;
  }
};

}  // namespace emtl
