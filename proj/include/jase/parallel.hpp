#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace jase {

/// Worker count: requested if positive, else the JASE_WORKERS environment
/// variable, else hardware concurrency.
int resolve_workers(int requested);

/// Run fn(i) for i in [0, n) on `workers` threads. Tasks own disjoint
/// output slots, so scheduling order never affects results. Exceptions
/// are captured and rethrown on the calling thread.
void parallel_for(Eigen::Index n, int workers,
                  const std::function<void(Eigen::Index)>& fn);

}  // namespace jase
