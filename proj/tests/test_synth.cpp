#include <doctest.h>

#include <cmath>
#include <set>

#include "dgc/synth.hpp"

using namespace dgc;

TEST_CASE("toy generator: counts, labels, determinism") {
    ToySpec spec;
    const Dataset a = generate_toy(spec);
    CHECK(a.n() == 1000);
    CHECK(a.dim() == 2);
    CHECK_FALSE(a.has_grid());
    REQUIRE(a.has_gt());
    std::set<int32_t> labels(a.gt.begin(), a.gt.end());
    CHECK(labels == std::set<int32_t>{1, 2});

    const Dataset b = generate_toy(spec);
    CHECK(a.points == b.points);
    CHECK(a.gt == b.gt);

    ToySpec other = spec;
    other.seed = 2;
    const Dataset c = generate_toy(other);
    CHECK(a.points != c.points);
}

TEST_CASE("toy generator: class-1 structure covers both gaussians and bridge") {
    ToySpec spec;
    const Dataset ds = generate_toy(spec);
    // First 600 points are class 1 (two blobs + bridge), next 300 class 2.
    for (int i = 0; i < 600; ++i) CHECK(ds.gt[static_cast<std::size_t>(i)] == 1);
    for (int i = 600; i < 900; ++i) CHECK(ds.gt[static_cast<std::size_t>(i)] == 2);

    // Bridge points hug the parabola y = (1-x)^2.
    for (int i = 400; i < 600; ++i) {
        const double x = ds.points(i, 0);
        const double y = ds.points(i, 1);
        CHECK(std::abs(y - (1 - x) * (1 - x)) <= 0.12);
    }
}

TEST_CASE("toy generator: zero bridge and noise gives pure blobs") {
    ToySpec spec;
    spec.n_bridge = 0;
    spec.n_noise = 0;
    const Dataset ds = generate_toy(spec);
    CHECK(ds.n() == 700);
    for (Index i = 0; i < ds.n(); ++i) {
        const int32_t g = ds.gt[static_cast<std::size_t>(i)];
        CHECK((g == 1 || g == 2));
    }
}

TEST_CASE("blob generator: separation, labels, determinism") {
    const Dataset a = generate_blobs(3, 40, 5, 12.0, 7);
    CHECK(a.n() == 120);
    CHECK(a.dim() == 5);
    for (Index i = 0; i < a.n(); ++i)
        CHECK(a.gt[static_cast<std::size_t>(i)] == 1 + static_cast<int32_t>(i / 40));

    const Dataset b = generate_blobs(3, 40, 5, 12.0, 7);
    CHECK(a.points == b.points);

    const Dataset one = generate_blobs(1, 10, 2, 5.0, 1);
    for (int32_t g : one.gt) CHECK(g == 1);
}

TEST_CASE("strip image carries grid, gt, and the requested shape") {
    const Dataset ds = generate_strip_image(6, 9, 3, 4, 5.0, 0.2, 11);
    CHECK(ds.n() == 54);
    CHECK(ds.dim() == 4);
    CHECK(ds.grid_rows == 6);
    CHECK(ds.grid_cols == 9);
    REQUIRE(ds.has_grid());
    std::set<int32_t> labels(ds.gt.begin(), ds.gt.end());
    CHECK(labels == std::set<int32_t>{1, 2, 3});
    // Strips are vertical: same column, same class.
    for (int r = 1; r < 6; ++r)
        for (int c = 0; c < 9; ++c)
            CHECK(ds.gt[static_cast<std::size_t>(r * 9 + c)] == ds.gt[static_cast<std::size_t>(c)]);
}
