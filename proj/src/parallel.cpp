#include "egcnet/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace egcnet {

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = hw > 0 ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("EGC_THREADS")) {
    int requested = std::atoi(env);
    if (requested >= 1 && requested < cap) cap = requested;
  }
  return cap;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = thread_cap();
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t used = std::min<std::size_t>(workers, n);
  std::vector<std::thread> threads;
  threads.reserve(used);
  for (std::size_t w = 0; w < used; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += used) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace egcnet
