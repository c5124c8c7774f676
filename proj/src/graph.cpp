#include "dgc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dgc/kernels.hpp"
#include "dgc/parallel.hpp"

namespace dgc {

namespace {

struct UnionFind {
    std::vector<int32_t> parent;
    explicit UnionFind(int32_t n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int32_t find(int32_t x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int32_t a, int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

}  // namespace

MarkovGraph build_graph(const Dataset& ds, const NeighborLists& nl, double sigma) {
    if (!(sigma > 0)) throw Error("graph sigma must be positive");
    const Index n = ds.n();
    if (nl.idx.rows() != n) throw Error("neighbor lists do not match dataset");

    MarkovGraph g;
    g.sigma = sigma;
    g.k = nl.k;
    const double inv_s2 = 1.0 / (sigma * sigma);

    // One triplet per directed neighbor pair plus its mirror; duplicates
    // collapse under max since the kernel weight of (i, j) is symmetric.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(nl.k) * 2);
    for (Index i = 0; i < n; ++i) {
        for (int j = 0; j < nl.k; ++j) {
            const int32_t nb = nl.idx(i, j);
            if (nb == static_cast<int32_t>(i)) continue;
            const double d = nl.dist(i, j);
            const double wgt = std::exp(-(d * d) * inv_s2);
            triplets.emplace_back(static_cast<int>(i), nb, wgt);
            triplets.emplace_back(nb, static_cast<int>(i), wgt);
        }
    }

    UnionFind uf(static_cast<int32_t>(n));
    for (const auto& t : triplets) uf.unite(static_cast<int32_t>(t.row()), static_cast<int32_t>(t.col()));

    // Count components and bridge the closest inter-component pair until one
    // remains. Each bridge merges two components, so at most n-1 scans.
    auto component_count = [&]() {
        int32_t count = 0;
        for (int32_t i = 0; i < static_cast<int32_t>(n); ++i)
            if (uf.find(i) == i) ++count;
        return count;
    };
    const auto dim = static_cast<std::size_t>(ds.dim());
    while (component_count() > 1) {
        double best_d2 = std::numeric_limits<double>::infinity();
        int32_t best_i = -1, best_j = -1;
        for (Index i = 0; i < n; ++i) {
            const int32_t ci = uf.find(static_cast<int32_t>(i));
            const double* pi_row = ds.points.row(i).data();
            for (Index j = i + 1; j < n; ++j) {
                if (uf.find(static_cast<int32_t>(j)) == ci) continue;
                const double d2 =
                    kernels::squared_distance(pi_row, ds.points.row(j).data(), dim);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best_i = static_cast<int32_t>(i);
                    best_j = static_cast<int32_t>(j);
                }
            }
        }
        const double wgt = std::exp(-best_d2 * inv_s2);
        triplets.emplace_back(best_i, best_j, wgt);
        triplets.emplace_back(best_j, best_i, wgt);
        uf.unite(best_i, best_j);
        g.bridges.emplace_back(best_i, best_j);
    }

    g.w.resize(n, n);
    g.w.setFromTriplets(triplets.begin(), triplets.end(),
                        [](const double& a, const double& b) { return std::max(a, b); });
    g.w.prune([](Index r, Index c, double) { return r != c; });  // force zero diagonal
    g.w.makeCompressed();

    g.deg.resize(n);
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (SparseRowMatrix::InnerIterator it(g.w, i); it; ++it) s += it.value();
        if (!(s > 0)) throw Error("graph row " + std::to_string(i) + " has zero degree");
        g.deg(i) = s;
    }

    g.p = g.w;
    for (Index i = 0; i < n; ++i) {
        const double inv = 1.0 / g.deg(i);
        for (SparseRowMatrix::InnerIterator it(g.p, i); it; ++it) it.valueRef() *= inv;
    }
    g.pi = g.deg / g.deg.sum();
    return g;
}

}  // namespace dgc
