#include "metaviz/parallel.hpp"

#include <exception>
#include <thread>
#include <vector>

namespace metaviz {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (requested < 0) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_rows(int count, int threads,
                       const std::function<void(int, int)>& body) {
  if (count <= 0) return;
  threads = resolve_thread_count(threads);
  if (threads > count) threads = count;
  if (threads == 1) {
    body(0, count);
    return;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  pool.reserve(static_cast<size_t>(threads));

  const int base = count / threads;
  const int extra = count % threads;
  int begin = 0;
  for (int t = 0; t < threads; ++t) {
    const int len = base + (t < extra ? 1 : 0);
    const int end = begin + len;
    pool.emplace_back([&, t, begin, end]() {
      try {
        body(begin, end);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace metaviz
