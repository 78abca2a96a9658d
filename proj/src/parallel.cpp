#include "exactls/parallel.hpp"

#include <atomic>

namespace exactls {

namespace {
std::atomic<unsigned> g_limit{0};
}

void set_thread_limit(unsigned threads) noexcept { g_limit.store(threads); }

unsigned thread_limit() noexcept {
  const unsigned limit = g_limit.load();
  if (limit != 0) return limit;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace exactls
