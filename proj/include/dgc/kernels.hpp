#pragma once

#include <cstddef>

// Arithmetic inner loops shared by the neighbor search, density estimator and
// mode analysis. Each kernel has a scalar reference implementation and an
// AVX2 variant selected at runtime; both accumulate in four independent lanes
// (element i goes to lane i mod 4) combined as (l0+l1)+(l2+l3), followed by a
// sequential tail, so the two variants return bit-identical doubles.

namespace dgc::kernels {

enum class Backend { scalar, avx2 };

bool avx2_supported();

// Active backend for the dispatched entry points. Defaults to the widest
// supported variant; DGC_KERNEL_BACKEND=scalar in the environment forces the
// reference path. set_backend returns false if the request is unsupported.
Backend active_backend();
bool set_backend(Backend b);

// sum_i (a[i] - b[i])^2
double squared_distance(const double* a, const double* b, std::size_t n);

// sum_i w[i] * (a[i] - b[i])^2
double weighted_squared_distance(const double* a, const double* b, const double* w, std::size_t n);

namespace detail {
double squared_distance_scalar(const double* a, const double* b, std::size_t n);
double weighted_squared_distance_scalar(const double* a, const double* b, const double* w,
                                        std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
double weighted_squared_distance_avx2(const double* a, const double* b, const double* w,
                                      std::size_t n);
#endif
}  // namespace detail

}  // namespace dgc::kernels
