// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace wscnn {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  int n = g_threads.load();
  if (n == 0) {
    unsigned hc = std::thread::hardware_concurrency();
    n = hc == 0 ? 1 : static_cast<int>(hc);
  }
  return n;
}

namespace detail {

void parallel_for_impl(std::size_t begin, std::size_t end,
                       const std::function<void(std::size_t, std::size_t)>& range_body) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  std::size_t workers = static_cast<std::size_t>(thread_count());
  workers = std::min(workers, total);
  if (workers <= 1) {
    range_body(begin, end);
    return;
  }
  const std::size_t chunk = (total + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t lo = begin + t * chunk;
    if (lo >= end) break;
    const std::size_t hi = std::min(end, lo + chunk);
    pool.emplace_back([&range_body, lo, hi] { range_body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

}  // namespace wscnn
