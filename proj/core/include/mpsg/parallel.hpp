#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <thread>
#include <vector>

namespace mpsg {

/// max over i in [0, count) of fn(i), spread over hardware threads. The
/// reduction is a plain max, so the result does not depend on scheduling.
template <class Fn>
double parallel_max(std::size_t count, Fn&& fn, double init = 0.0) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, count);
  if (workers <= 1) {
    double acc = init;
    for (std::size_t i = 0; i < count; ++i) acc = std::max(acc, fn(i));
    return acc;
  }
  std::vector<std::future<double>> parts;
  parts.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    parts.push_back(std::async(std::launch::async, [&, w] {
      double acc = init;
      for (std::size_t i = w; i < count; i += workers) acc = std::max(acc, fn(i));
      return acc;
    }));
  }
  double acc = init;
  for (auto& p : parts) acc = std::max(acc, p.get());
  return acc;
}

}  // namespace mpsg
