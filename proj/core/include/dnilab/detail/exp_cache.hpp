#pragma once

#include <map>
#include <mutex>

#include "dnilab/qmath.hpp"

namespace dnilab::models::detail {

/// Memoizes dt -> propagator for engines whose propagator needs a matrix
/// exponential. Bounded; cleared wholesale when full.
template <class Make>
qmath::ComplexMatrix cached_propagator(std::mutex& mutex,
                                       std::map<double, qmath::ComplexMatrix>& cache, double dt,
                                       Make&& make) {
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(dt); it != cache.end()) return it->second;
  }
  qmath::ComplexMatrix value = make(dt);
  std::lock_guard lock(mutex);
  if (cache.size() >= 64) cache.clear();
  cache.emplace(dt, value);
  return value;
}

}  // namespace dnilab::models::detail
