#include "torusdyn/parallel.hpp"

#include <atomic>

namespace torusdyn {

namespace {
std::atomic<unsigned> g_threads{1};
}

unsigned worker_threads() { return g_threads.load(); }

void set_worker_threads(unsigned n) { g_threads.store(n == 0 ? 1u : n); }

}  // namespace torusdyn
