#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dgc/density.hpp"
#include "dgc/rng.hpp"

using namespace dgc;

namespace {

Dataset random_points(int n, int d, uint64_t seed) {
    Dataset ds;
    ds.points.resize(n, d);
    Rng rng(seed);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) ds.points(i, j) = rng.uniform(-1.0, 1.0);
    return ds;
}

}  // namespace

TEST_CASE("two identical points share the density mass equally") {
    Dataset ds;
    ds.points.resize(2, 2);
    ds.points << 3.0, 4.0, 3.0, 4.0;
    const NeighborLists nl = knn(ds, 1);
    DensityOptions opts;
    opts.sigma1 = 1.0;  // the bandwidth rule needs a nonzero distance scale
    const DensityProfile dp = estimate_density(ds, nl, 1, opts);
    CHECK(dp.p(0) == doctest::Approx(0.5));
    CHECK(dp.p(1) == doctest::Approx(0.5));
    // Ties resolve by ascending index.
    CHECK(dp.order[0] == 0);
    CHECK(dp.order[1] == 1);
}

TEST_CASE("density normalizes to one and the order is consistent") {
    const Dataset ds = random_points(300, 4, 17);
    const NeighborLists nl = knn(ds, 25);
    const DensityProfile dp = estimate_density(ds, nl, 20);
    CHECK(std::abs(dp.p.sum() - 1.0) <= 1e-12);
    CHECK((dp.p.array() >= 0).all());
    for (std::size_t r = 0; r + 1 < dp.order.size(); ++r) {
        const double a = dp.p(dp.order[r]);
        const double b = dp.p(dp.order[r + 1]);
        CHECK(a >= b);
        if (a == b) CHECK(dp.order[r] < dp.order[r + 1]);
    }
    for (std::size_t i = 0; i < dp.order.size(); ++i)
        CHECK(dp.order[static_cast<std::size_t>(dp.rank[static_cast<std::size_t>(
                  dp.order[i])])] == dp.order[i]);
}

TEST_CASE("permutation equivariance") {
    const Dataset ds = random_points(50, 3, 21);
    Dataset rev;
    rev.points.resize(ds.n(), ds.dim());
    for (Index i = 0; i < ds.n(); ++i) rev.points.row(i) = ds.points.row(ds.n() - 1 - i);

    DensityOptions opts;
    opts.sigma1 = 0.5;
    const DensityProfile a = estimate_density(ds, knn(ds, 5), 5, opts);
    const DensityProfile b = estimate_density(rev, knn(rev, 5), 5, opts);
    for (Index i = 0; i < ds.n(); ++i)
        CHECK(a.p(i) == doctest::Approx(b.p(ds.n() - 1 - i)).epsilon(1e-14));
}

TEST_CASE("sampled bandwidth tracks the exact mean and preserves rank order") {
    const Dataset ds = random_points(200, 5, 33);
    const std::size_t all_pairs = 200 * 199 / 2;
    const double exact = pairwise_distance_scale(ds.points, all_pairs, 1);
    const double sampled = pairwise_distance_scale(ds.points, 4000, 1);
    CHECK(std::abs(sampled - exact) / exact <= 0.02);

    const NeighborLists nl = knn(ds, 20);
    DensityOptions oe, os;
    oe.sigma1 = exact / 20.0;
    os.sigma1 = sampled / 20.0;
    const DensityProfile de = estimate_density(ds, nl, 20, oe);
    const DensityProfile dsamp = estimate_density(ds, nl, 20, os);
    CHECK(de.order == dsamp.order);
}

TEST_CASE("a replicated point dominates a singleton at the same radius") {
    // Five copies at the origin vs one isolated point with the same k-NN
    // spacing to its neighbors.
    Dataset ds;
    ds.points.resize(8, 1);
    ds.points << 0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 11.0, 12.0;
    const NeighborLists nl = knn(ds, 3);
    DensityOptions opts;
    opts.sigma1 = 1.0;
    const DensityProfile dp = estimate_density(ds, nl, 3, opts);
    CHECK(dp.p(0) > dp.p(6));
}

TEST_CASE("density rejects bad arguments") {
    const Dataset ds = random_points(20, 2, 3);
    const NeighborLists nl = knn(ds, 4);
    CHECK_THROWS_AS(estimate_density(ds, nl, 5), Error);  // k_density > nl.k
    DensityOptions opts;
    opts.sigma1 = -1.0;
    CHECK_THROWS_AS(estimate_density(ds, nl, 3, opts), Error);
}

TEST_CASE("median bandwidth switch") {
    const Dataset ds = random_points(64, 2, 8);
    const double mean_scale = pairwise_distance_scale(ds.points, 1u << 20, 1, BandwidthCenter::mean);
    const double med_scale =
        pairwise_distance_scale(ds.points, 1u << 20, 1, BandwidthCenter::median);
    CHECK(mean_scale > 0);
    CHECK(med_scale > 0);
    CHECK(mean_scale != med_scale);
}
