#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace dgc {

// Worker count for parallel_for. Reads DGC_THREADS on first use; defaults to
// hardware_concurrency. set_num_threads overrides for the process.
int num_threads();
void set_num_threads(int n);

// Static contiguous partition of [begin, end); f(i) is invoked exactly once
// per index and must write only to slots owned by i, so results do not depend
// on the worker count.
template <typename F>
void parallel_for(std::size_t begin, std::size_t end, F&& f) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    std::size_t nt = static_cast<std::size_t>(num_threads());
    if (nt > count) nt = count;
    if (nt <= 1) {
        for (std::size_t i = begin; i < end; ++i) f(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(nt);
    const std::size_t chunk = (count + nt - 1) / nt;
    for (std::size_t w = 0; w < nt; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = lo + chunk < end ? lo + chunk : end;
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi]() {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dgc
