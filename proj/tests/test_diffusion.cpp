#include <doctest.h>

#include <cmath>

#include "dgc/diffusion.hpp"
#include "dgc/kernels.hpp"
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

MarkovGraph random_graph(int n, uint64_t seed, int k = 5) {
    const Dataset ds = random_points(n, 3, seed);
    return build_graph(ds, knn(ds, k), 0.8);
}

DiffusionModel full_model(const MarkovGraph& g) {
    DecomposeOptions opts;
    opts.fixed_m = static_cast<int>(g.w.rows());
    return decompose(g, static_cast<int>(g.w.rows()), opts);
}

}  // namespace

TEST_CASE("two-point graph: lambda = {1, -1} and a constant first eigenvector") {
    Dataset ds;
    ds.points.resize(2, 1);
    ds.points << 0.0, 1.0;
    const MarkovGraph g = build_graph(ds, knn(ds, 1), 1.0);
    const DiffusionModel dm = full_model(g);
    REQUIRE(dm.m() == 2);
    CHECK(dm.lambdas(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dm.lambdas(1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(dm.phis(0, 0) - dm.phis(1, 0)) < 1e-10);
}

TEST_CASE("lambda_1 = 1 and phi_1 constant on any connected graph") {
    for (uint64_t seed : {4ull, 5ull}) {
        const MarkovGraph g = random_graph(60, seed);
        const DiffusionModel dm = decompose(g, 10);
        CHECK(std::abs(dm.lambdas(0) - 1.0) <= 1e-8);
        const double mean = dm.phis.col(0).mean();
        CHECK((dm.phis.col(0).array() - mean).abs().maxCoeff() <= 1e-6);
        for (Index m = 0; m < dm.m(); ++m) CHECK(std::abs(dm.lambdas(m)) <= 1.0);
    }
}

TEST_CASE("pi-weighted Gram matrix of phi is the identity") {
    const MarkovGraph g = random_graph(50, 7);
    const DiffusionModel dm = full_model(g);
    Eigen::MatrixXd gram =
        dm.phis.transpose() * g.pi.asDiagonal() * dm.phis;
    CHECK((gram - Eigen::MatrixXd::Identity(dm.m(), dm.m())).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("coords at t=0 equal phi unscaled") {
    const MarkovGraph g = random_graph(40, 8);
    const DiffusionModel dm = decompose(g, 8);
    const RowMatrixXd c = diffusion_coords(dm, 0.0);
    CHECK(c == dm.phis);
}

TEST_CASE("embedding row distances equal pair_distance exactly") {
    const MarkovGraph g = random_graph(40, 9);
    const DiffusionModel dm = decompose(g, 8);
    const RowMatrixXd c = diffusion_coords(dm, 30.0);
    for (Index i : {0, 3, 17}) {
        for (Index j : {1, 5, 39}) {
            double s = 0.0;
            Eigen::VectorXd ci = c.row(i), cj = c.row(j);
            s = std::sqrt(kernels::squared_distance(ci.data(), cj.data(),
                                                    static_cast<std::size_t>(c.cols())));
            CHECK(pair_distance(dm, 30.0, i, j) == s);
        }
    }
}

TEST_CASE("pair_distance is symmetric with zero diagonal") {
    const MarkovGraph g = random_graph(30, 10);
    const DiffusionModel dm = decompose(g, 6);
    CHECK(pair_distance(dm, 5.0, 4, 4) == 0.0);
    CHECK(pair_distance(dm, 5.0, 2, 9) == pair_distance(dm, 5.0, 9, 2));
}

TEST_CASE("oracle_distance at t=0 gives sqrt(1/pi_i + 1/pi_j)") {
    const MarkovGraph g = random_graph(25, 11);
    const double expect = std::sqrt(1.0 / g.pi(3) + 1.0 / g.pi(7));
    CHECK(oracle_distance(g, 0, 3, 7) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(oracle_distance(g, 0, 5, 5) == 0.0);
}

TEST_CASE("full-truncation pair_distance matches the dense oracle") {
    for (uint64_t seed : {21ull, 22ull, 23ull}) {
        const MarkovGraph g = random_graph(50, seed);
        const DiffusionModel dm = full_model(g);
        for (int t : {1, 2, 5}) {
            const RowMatrixXd pt = dense_transition_power(g, t);
            for (Index i : {0, 7, 13}) {
                for (Index j : {3, 24, 49}) {
                    const double od = oracle_distance(pt, g.pi, i, j);
                    const double pd = pair_distance(dm, t, i, j);
                    CHECK(std::abs(pd - od) <= 1e-8 * std::max(1.0, od));
                }
            }
        }
    }
}

TEST_CASE("sign flips of phi columns leave pair_distance unchanged") {
    const MarkovGraph g = random_graph(30, 12);
    DiffusionModel dm = decompose(g, 6);
    const double before = pair_distance(dm, 3.0, 2, 11);
    dm.phis.col(2) = -dm.phis.col(2);
    CHECK(pair_distance(dm, 3.0, 2, 11) == doctest::Approx(before).epsilon(1e-14));
}

TEST_CASE("metric axioms on sampled triples") {
    const MarkovGraph g = random_graph(40, 13);
    const DiffusionModel dm = decompose(g, 8);
    Rng rng(99);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = static_cast<Index>(rng.uniform_int(40));
        const auto b = static_cast<Index>(rng.uniform_int(40));
        const auto c = static_cast<Index>(rng.uniform_int(40));
        const double ab = pair_distance(dm, 10.0, a, b);
        const double bc = pair_distance(dm, 10.0, b, c);
        const double ac = pair_distance(dm, 10.0, a, c);
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("truncation monotonicity: larger M never shrinks distances") {
    const MarkovGraph g = random_graph(40, 14);
    DecomposeOptions o4, o8;
    o4.fixed_m = 4;
    o8.fixed_m = 8;
    const DiffusionModel dm4 = decompose(g, 8, o4);
    const DiffusionModel dm8 = decompose(g, 8, o8);
    for (Index i : {0, 5}) {
        for (Index j : {9, 21}) {
            CHECK(pair_distance(dm8, 2.0, i, j) >= pair_distance(dm4, 2.0, i, j) - 1e-12);
        }
    }
}

TEST_CASE("long-time distances decay to zero") {
    const MarkovGraph g = random_graph(30, 15);
    const DiffusionModel dm = decompose(g, 6);
    const double early = pair_distance(dm, 5.0, 1, 17);
    const double late = pair_distance(dm, 1000.0, 1, 17);
    CHECK(late < early);
    CHECK(late <= 1e-6);
}

TEST_CASE("decompose rejects disconnected graphs with a repair hint") {
    // Hand-build a two-component graph.
    MarkovGraph g;
    g.w.resize(4, 4);
    std::vector<Eigen::Triplet<double>> trips{{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}};
    g.w.setFromTriplets(trips.begin(), trips.end());
    g.deg = Eigen::VectorXd::Ones(4);
    g.p = g.w;
    g.pi = g.deg / 4.0;
    CHECK_THROWS_WITH_AS(decompose(g, 3), doctest::Contains("disconnected"), Error);
}

TEST_CASE("non-integer time with negative eigenvalues is an error") {
    Dataset ds;
    ds.points.resize(2, 1);
    ds.points << 0.0, 1.0;
    const MarkovGraph g = build_graph(ds, knn(ds, 1), 1.0);
    const DiffusionModel dm = full_model(g);  // contains lambda = -1
    CHECK_THROWS_AS(diffusion_coords(dm, 1.5), Error);
    CHECK_NOTHROW(diffusion_coords(dm, 3.0));
}

TEST_CASE("oracle_distance guards against large N") {
    MarkovGraph g;
    g.w.resize(2001, 2001);
    g.p = g.w;
    g.pi = Eigen::VectorXd::Ones(2001);
    CHECK_THROWS_AS(oracle_distance(g, 1, 0, 1), Error);
}
