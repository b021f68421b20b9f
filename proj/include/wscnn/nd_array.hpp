// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "wscnn/common.hpp"

namespace wscnn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t e : s) n *= e;
  return n;
}

std::string shape_to_string(const Shape& s);

// Dense row-major n-dimensional array of `real`. Rank 0 is a scalar with one
// element.
class NdArray {
public:
  NdArray() = default;

  explicit NdArray(Shape shape, real fill = real(0))
      : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {
    validate_shape();
  }

  NdArray(Shape shape, std::vector<real> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape();
    if (data_.size() != shape_numel(shape_))
      throw DataError("NdArray: data size " + std::to_string(data_.size()) +
                      " does not match shape " + shape_to_string(shape_));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size(std::size_t dim) const { return shape_.at(dim); }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  real* data() { return data_.data(); }
  const real* data() const { return data_.data(); }
  std::vector<real>& vec() { return data_; }
  const std::vector<real>& vec() const { return data_; }

  real& operator[](std::size_t i) { return data_[i]; }
  real operator[](std::size_t i) const { return data_[i]; }

  // rank-4 accessors (the network works on N,C,H,W throughout)
  real& at4(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  real at4(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }

  void fill(real v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const NdArray& o) const { return shape_ == o.shape_; }

  bool all_finite() const;

  static NdArray zeros_like(const NdArray& o) { return NdArray(o.shape()); }

private:
  void validate_shape() const {
    for (std::size_t e : shape_)
      if (e == 0) throw DataError("NdArray: zero extent in shape " + shape_to_string(shape_));
  }

  Shape shape_;
  std::vector<real> data_;
};

}  // namespace wscnn
