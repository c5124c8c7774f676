#include "dgc/kernels.hpp"

namespace dgc::kernels::detail {

// Reference kernels. The lane layout mirrors the AVX2 variants exactly:
// main loop over blocks of 4, lane j accumulates elements 4*i+j, lanes
// combined as (l0+l1)+(l2+l3), remainder added sequentially.

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    const std::size_t blocks = n / 4;
    for (std::size_t i = 0; i < blocks; ++i) {
        const std::size_t base = 4 * i;
        const double d0 = a[base + 0] - b[base + 0];
        const double d1 = a[base + 1] - b[base + 1];
        const double d2 = a[base + 2] - b[base + 2];
        const double d3 = a[base + 3] - b[base + 3];
        l0 += d0 * d0;
        l1 += d1 * d1;
        l2 += d2 * d2;
        l3 += d3 * d3;
    }
    double sum = (l0 + l1) + (l2 + l3);
    for (std::size_t i = 4 * blocks; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double weighted_squared_distance_scalar(const double* a, const double* b, const double* w,
                                        std::size_t n) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    const std::size_t blocks = n / 4;
    for (std::size_t i = 0; i < blocks; ++i) {
        const std::size_t base = 4 * i;
        const double d0 = a[base + 0] - b[base + 0];
        const double d1 = a[base + 1] - b[base + 1];
        const double d2 = a[base + 2] - b[base + 2];
        const double d3 = a[base + 3] - b[base + 3];
        l0 += (d0 * d0) * w[base + 0];
        l1 += (d1 * d1) * w[base + 1];
        l2 += (d2 * d2) * w[base + 2];
        l3 += (d3 * d3) * w[base + 3];
    }
    double sum = (l0 + l1) + (l2 + l3);
    for (std::size_t i = 4 * blocks; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += (d * d) * w[i];
    }
    return sum;
}

}  // namespace dgc::kernels::detail
