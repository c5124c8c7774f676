#include "dgc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dgc {

namespace {

int initial_threads() {
    if (const char* env = std::getenv("DGC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::atomic<int> g_threads{0};

}  // namespace

int num_threads() {
    int n = g_threads.load(std::memory_order_relaxed);
    if (n == 0) {
        n = initial_threads();
        g_threads.store(n, std::memory_order_relaxed);
    }
    return n;
}

void set_num_threads(int n) { g_threads.store(n >= 1 ? n : 1, std::memory_order_relaxed); }

}  // namespace dgc
