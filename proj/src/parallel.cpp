#include "jase/parallel.hpp"

#include <cstdlib>
#include <exception>

namespace jase {

int resolve_workers(int requested) {
  if (requested > 0) {
    return requested;
  }
  if (const char* env = std::getenv("JASE_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(Eigen::Index n, int workers,
                  const std::function<void(Eigen::Index)>& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n <= 1) {
    for (Eigen::Index i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<Eigen::Index> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};

  auto work = [&]() {
    while (true) {
      const Eigen::Index i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) {
          error = std::current_exception();
        }
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<Eigen::Index>(workers, n));
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  if (failed.load() && error) {
    std::rethrow_exception(error);
  }
}

}  // namespace jase
