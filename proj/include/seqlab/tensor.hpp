#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "seqlab/common.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t e : s) n *= e;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// Dense row-major tensor. Rank 0 is a scalar, rank 1 a vector, rank 2 a
// matrix; nothing in the tagger needs more.
template <class Real>
struct Tensor {
  Shape shape;
  std::vector<Real> data;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(std::move(s)), data(shape_numel(shape), Real(0)) {}
  Tensor(Shape s, std::vector<Real> values) : shape(std::move(s)), data(std::move(values)) {
    require(data.size() == shape_numel(shape), "tensor: ", data.size(),
            " values for shape ", shape_str(shape));
  }

  static Tensor scalar(Real v) {
    Tensor t{Shape{}};
    t.data[0] = v;
    return t;
  }
  static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
  static Tensor full(Shape s, Real v) {
    Tensor t(std::move(s));
    for (Real& x : t.data) x = v;
    return t;
  }
  static Tensor uniform(Shape s, Real lo, Real hi, Rng& rng) {
    Tensor t(std::move(s));
    for (Real& x : t.data) x = static_cast<Real>(rng.uniform(lo, hi));
    return t;
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const {
    require(rank() == 2, "tensor: cols() on rank-", rank());
    return shape[1];
  }

  Real& at(std::size_t i) { return data[i]; }
  Real at(std::size_t i) const { return data[i]; }
  Real& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  Real at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  Real value() const {
    require(numel() == 1, "tensor: value() on shape ", shape_str(shape));
    return data[0];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool finite() const {
    for (Real x : data)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }

  void fill(Real v) {
    for (Real& x : data) x = v;
  }

  Real sum() const {
    Real s = 0;
    for (Real x : data) s += x;
    return s;
  }
};

template <class Real>
Real l2_norm_squared(const Tensor<Real>& t) {
  Real s = 0;
  for (Real x : t.data) s += x * x;
  return s;
}

}  // namespace seqlab
