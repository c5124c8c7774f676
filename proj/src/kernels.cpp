#include "dgc/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace dgc::kernels {

namespace {

using SqDistFn = double (*)(const double*, const double*, std::size_t);
using WSqDistFn = double (*)(const double*, const double*, const double*, std::size_t);

std::atomic<SqDistFn> g_sqdist{nullptr};
std::atomic<WSqDistFn> g_wsqdist{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

bool apply_backend(Backend b) {
    if (b == Backend::avx2) {
#if defined(__x86_64__) || defined(_M_X64)
        if (!cpu_has_avx2()) return false;
        g_sqdist.store(&detail::squared_distance_avx2);
        g_wsqdist.store(&detail::weighted_squared_distance_avx2);
        g_backend.store(Backend::avx2);
        return true;
#else
        return false;
#endif
    }
    g_sqdist.store(&detail::squared_distance_scalar);
    g_wsqdist.store(&detail::weighted_squared_distance_scalar);
    g_backend.store(Backend::scalar);
    return true;
}

struct Init {
    Init() {
        Backend wanted = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
        if (const char* env = std::getenv("DGC_KERNEL_BACKEND")) {
            if (std::strcmp(env, "scalar") == 0) wanted = Backend::scalar;
        }
        apply_backend(wanted);
    }
};
const Init g_init;

}  // namespace

bool avx2_supported() { return cpu_has_avx2(); }

Backend active_backend() { return g_backend.load(); }

bool set_backend(Backend b) { return apply_backend(b); }

double squared_distance(const double* a, const double* b, std::size_t n) {
    return g_sqdist.load()(a, b, n);
}

double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n) {
    return g_wsqdist.load()(a, b, w, n);
}

}  // namespace dgc::kernels
