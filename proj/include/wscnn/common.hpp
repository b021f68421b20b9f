// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace wscnn {

// Training scalar type. Release builds train in float32; the gradient-check
// build (WSCNN_REAL_DOUBLE) switches the network stack to float64 so that
// central finite differences resolve at 1e-4 relative tolerance.
#ifdef WSCNN_REAL_DOUBLE
using real = double;
#else
using real = float;
#endif

// In-memory raster scalar. Rasters are held in double so analysis paths
// (tensor fits, metrics) are not limited by storage quantization; the on-disk
// container always serializes float32.
using pix = double;

// Exit-code-mapped error categories (config=2, data=3, numerical=4).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Global worker count for parallel_for. 0 = use hardware concurrency.
void set_thread_count(int n);
int thread_count();

namespace detail {
void parallel_for_impl(std::size_t begin, std::size_t end,
                       const std::function<void(std::size_t, std::size_t)>& range_body);
}

// Runs body(i) for i in [begin, end). Work is split into contiguous index
// ranges, one per worker; every index is processed by exactly one worker, so
// results are identical to a serial run as long as bodies write to disjoint
// outputs (the contract all callers in this codebase follow).
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, Body&& body) {
  detail::parallel_for_impl(begin, end, [&body](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) body(i);
  });
}

}  // namespace wscnn
