#include "sparse_ergodic/common.hpp"

#include <atomic>

namespace sparse_ergodic {

namespace {
std::atomic<unsigned> g_workers{1};
}

const char* version() { return SPARSE_ERGODIC_VERSION; }

void set_worker_threads(unsigned n) { g_workers.store(n == 0 ? 1 : n); }

unsigned worker_threads() { return g_workers.load(); }

}  // namespace sparse_ergodic
