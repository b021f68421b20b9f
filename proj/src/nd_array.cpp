// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/nd_array.hpp"

#include <cmath>
#include <sstream>

namespace wscnn {

std::string shape_to_string(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << "x";
    os << s[i];
  }
  os << "]";
  return os.str();
}

bool NdArray::all_finite() const {
  for (real v : data_)
    if (!std::isfinite(static_cast<double>(v))) return false;
  return true;
}

}  // namespace wscnn
