#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "dgc/kernels.hpp"
#include "dgc/modes.hpp"
#include "dgc/rng.hpp"
#include "dgc/synth.hpp"

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

struct Fixture {
    MarkovGraph g;
    DiffusionModel dm;
    DensityProfile dp;
};

Fixture make_fixture(const Dataset& ds, int k_graph, int k_density, double sigma) {
    Fixture f;
    const NeighborLists nl = knn(ds, k_graph);
    f.g = build_graph(ds, nl, sigma);
    f.dm = decompose(f.g, std::min<int>(20, static_cast<int>(ds.n())));
    f.dp = estimate_density(ds, nl, k_density);
    return f;
}

// Independent O(N^2) parent/rho recomputation straight from the definition.
void oracle_parents(const RowMatrixXd& coords, const DensityProfile& dp,
                    Eigen::VectorXd* rho_tilde, std::vector<int32_t>* parent) {
    const Index n = coords.rows();
    rho_tilde->resize(n);
    parent->assign(static_cast<std::size_t>(n), -1);
    const auto dim = static_cast<std::size_t>(coords.cols());
    for (Index i = 0; i < n; ++i) {
        const bool is_argmax = dp.rank[static_cast<std::size_t>(i)] == 0;
        double best = is_argmax ? 0.0 : std::numeric_limits<double>::infinity();
        int32_t arg = -1;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = std::sqrt(kernels::squared_distance(
                coords.row(i).data(), coords.row(j).data(), dim));
            if (is_argmax) {
                best = std::max(best, d);
            } else if (dp.rank[static_cast<std::size_t>(j)] <
                       dp.rank[static_cast<std::size_t>(i)]) {
                if (d < best || (d == best && j < arg)) {
                    best = d;
                    arg = static_cast<int32_t>(j);
                }
            }
        }
        (*rho_tilde)(i) = best;
        (*parent)[static_cast<std::size_t>(i)] = arg;
    }
}

}  // namespace

TEST_CASE("three collinear points with forced density order") {
    Dataset ds;
    ds.points.resize(3, 1);
    ds.points << 0.0, 0.4, 1.0;
    const NeighborLists nl = knn(ds, 2);
    const MarkovGraph g = build_graph(ds, nl, 1.0);
    DecomposeOptions opts;
    opts.fixed_m = 3;
    const DiffusionModel dm = decompose(g, 3, opts);

    // Hand-pick densities p0 > p1 > p2 by index.
    DensityProfile dp;
    dp.p.resize(3);
    dp.p << 0.5, 0.3, 0.2;
    dp.order = {0, 1, 2};
    dp.rank = {0, 1, 2};
    dp.sigma1 = 1.0;

    const ModeAnalysis ma = analyze_modes(dm, dp, 2.0, 1);
    CHECK(ma.parent[0] == -1);
    CHECK(ma.parent[1] == 0);
    // Point 2's parent is whichever of {0, 1} is nearer in diffusion
    // distance (ties resolve to the lower index).
    const double d20 = pair_distance(dm, 2.0, 2, 0);
    const double d21 = pair_distance(dm, 2.0, 2, 1);
    CHECK(ma.parent[2] == (d21 < d20 ? 1 : 0));
    CHECK(ma.rho.maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("parent and rho match the quadratic oracle exactly") {
    const Dataset ds = random_points(100, 3, 31);
    const Fixture f = make_fixture(ds, 8, 8, 0.8);
    const ModeAnalysis ma = analyze_modes(f.dm, f.dp, 7.0, 3);

    Eigen::VectorXd rho_oracle;
    std::vector<int32_t> parent_oracle;
    oracle_parents(ma.coords, f.dp, &rho_oracle, &parent_oracle);
    CHECK(ma.parent == parent_oracle);
    for (Index i = 0; i < ds.n(); ++i) CHECK(ma.rho_tilde(i) == rho_oracle(i));
}

TEST_CASE("scaling densities uniformly leaves the analysis invariant") {
    const Dataset ds = random_points(60, 2, 32);
    const Fixture f = make_fixture(ds, 6, 6, 0.8);
    const ModeAnalysis base = analyze_modes(f.dm, f.dp, 5.0, 3);

    DensityProfile scaled = f.dp;
    scaled.p *= 7.5;  // no longer normalized, same order
    const ModeAnalysis alt = analyze_modes(f.dm, scaled, 5.0, 3);
    CHECK(alt.parent == base.parent);
    CHECK(alt.modes == base.modes);
    CHECK(alt.rho == base.rho);
}

TEST_CASE("parent chains ascend density and terminate at the argmax") {
    const Dataset ds = random_points(120, 3, 33);
    const Fixture f = make_fixture(ds, 8, 8, 0.8);
    const ModeAnalysis ma = analyze_modes(f.dm, f.dp, 10.0, 2);
    const int32_t argmax = f.dp.order[0];
    for (Index i = 0; i < ds.n(); ++i) {
        int32_t cur = static_cast<int32_t>(i);
        int hops = 0;
        while (ma.parent[static_cast<std::size_t>(cur)] >= 0) {
            const int32_t up = ma.parent[static_cast<std::size_t>(cur)];
            CHECK(f.dp.rank[static_cast<std::size_t>(up)] <
                  f.dp.rank[static_cast<std::size_t>(cur)]);
            cur = up;
            REQUIRE(++hops <= ds.n());
        }
        CHECK(cur == argmax);
    }
}

TEST_CASE("two well-separated blobs yield one mode per blob across seeds") {
    int hits = 0;
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        const Dataset ds = generate_blobs(2, 60, 3, 10.0, seed);
        const Fixture f = make_fixture(ds, 10, 10, 3.0);
        const ModeAnalysis ma = analyze_modes(f.dm, f.dp, 30.0, 2);
        std::set<int32_t> classes;
        for (int32_t m : ma.modes) classes.insert(ds.gt[static_cast<std::size_t>(m)]);
        if (classes.size() == 2) ++hits;
    }
    CHECK(hits == 50);
}

TEST_CASE("estimate_k finds a planted score cliff (first order)") {
    // Synthesize a ModeAnalysis whose sorted score has a sharp kink at 4.
    ModeAnalysis ma;
    const int n = 50;
    ma.score.resize(n);
    for (int i = 0; i < n; ++i) {
        if (i < 4)
            ma.score(i) = 1.0 - 0.01 * i;  // four big scores
        else
            ma.score(i) = 0.1 - 0.001 * i;  // long flat tail
    }
    const KEstimate est = estimate_k(ma, 20);
    CHECK(est.k_hat == 4);
    CHECK(est.method == KEstimate::Method::first_order);
}

TEST_CASE("estimate_k falls back to second order on a smooth curve") {
    // Geometric decay has no prominent first-order peak; the largest
    // difference ratio sits where the curve flattens fastest.
    ModeAnalysis ma;
    const int n = 60;
    ma.score.resize(n);
    for (int i = 0; i < n; ++i) {
        if (i < 6)
            ma.score(i) = 1.0 - 0.1 * i;
        else
            ma.score(i) = 0.4 * std::pow(0.5, i - 5);
    }
    const KEstimate est = estimate_k(ma, 20);
    CHECK(est.method == KEstimate::Method::second_order);
    CHECK(est.k_hat == 6);
}

TEST_CASE("estimate_k rejects degenerate flat curves") {
    ModeAnalysis ma;
    ma.score = Eigen::VectorXd::Constant(40, 0.025);
    CHECK_THROWS_WITH_AS(estimate_k(ma, 20), doctest::Contains("inconclusive"), Error);
}

TEST_CASE("analyze_modes rejects K out of range") {
    const Dataset ds = random_points(10, 2, 1);
    const Fixture f = make_fixture(ds, 3, 3, 1.0);
    CHECK_THROWS_AS(analyze_modes(f.dm, f.dp, 1.0, 11), Error);
    CHECK_THROWS_AS(analyze_modes(f.dm, f.dp, 1.0, 0), Error);
}
