#include <doctest.h>

#include <cmath>
#include <vector>

#include "dgc/kernels.hpp"
#include "dgc/rng.hpp"

using namespace dgc;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-scale, scale);
    return v;
}

}  // namespace

TEST_CASE("squared_distance matches a plain sum on small inputs") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{0.0, 0.0, 7.0};
    CHECK(kernels::detail::squared_distance_scalar(a.data(), b.data(), 3) ==
          doctest::Approx(1.0 + 4.0 + 16.0));
    CHECK(kernels::detail::squared_distance_scalar(a.data(), a.data(), 3) == 0.0);
}

TEST_CASE("weighted_squared_distance matches a plain sum") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b{0.0, 0.0, 0.0, 0.0, 0.0};
    const std::vector<double> w{2.0, 1.0, 0.5, 0.0, 3.0};
    double expect = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) expect += w[i] * a[i] * a[i];
    CHECK(kernels::detail::weighted_squared_distance_scalar(a.data(), b.data(), w.data(), 5) ==
          doctest::Approx(expect));
}

TEST_CASE("avx2 variants are bit-identical to the scalar reference") {
    if (!kernels::avx2_supported()) return;
    Rng rng(42);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 63u, 224u, 1001u}) {
        for (int rep = 0; rep < 8; ++rep) {
            const auto a = random_vec(rng, n, 1e3);
            const auto b = random_vec(rng, n, 1e3);
            const auto w = random_vec(rng, n, 10.0);
            const double s = kernels::detail::squared_distance_scalar(a.data(), b.data(), n);
            const double v = kernels::detail::squared_distance_avx2(a.data(), b.data(), n);
            CHECK(s == v);  // bitwise, not approximate
            const double ws =
                kernels::detail::weighted_squared_distance_scalar(a.data(), b.data(), w.data(), n);
            const double wv =
                kernels::detail::weighted_squared_distance_avx2(a.data(), b.data(), w.data(), n);
            CHECK(ws == wv);
        }
    }
}

TEST_CASE("backend switching routes the dispatched entry points") {
    const std::vector<double> a{1.5, -2.0, 0.25, 9.0, -1.0};
    const std::vector<double> b{0.5, 2.0, 0.25, -3.0, 4.0};
    const kernels::Backend before = kernels::active_backend();

    REQUIRE(kernels::set_backend(kernels::Backend::scalar));
    const double scalar_result = kernels::squared_distance(a.data(), b.data(), a.size());
    CHECK(scalar_result ==
          kernels::detail::squared_distance_scalar(a.data(), b.data(), a.size()));

    if (kernels::avx2_supported()) {
        REQUIRE(kernels::set_backend(kernels::Backend::avx2));
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
        CHECK(kernels::squared_distance(a.data(), b.data(), a.size()) == scalar_result);
    }
    kernels::set_backend(before);
}
