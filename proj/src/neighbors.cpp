#include "dgc/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dgc/kernels.hpp"
#include "dgc/parallel.hpp"

namespace dgc {

namespace {

struct Candidate {
    double d2;
    int32_t idx;
};

// Lexicographic (distance, index) order; the max-heap top under this order is
// the entry a better candidate would evict.
inline bool cand_less(const Candidate& a, const Candidate& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    return a.idx < b.idx;
}

class KBest {
public:
    explicit KBest(int k) : k_(static_cast<std::size_t>(k)) { heap_.reserve(k_); }

    void consider(double d2, int32_t idx) {
        if (heap_.size() < k_) {
            heap_.push_back({d2, idx});
            std::push_heap(heap_.begin(), heap_.end(), cand_less);
            return;
        }
        const Candidate& top = heap_.front();
        if (d2 < top.d2 || (d2 == top.d2 && idx < top.idx)) {
            std::pop_heap(heap_.begin(), heap_.end(), cand_less);
            heap_.back() = {d2, idx};
            std::push_heap(heap_.begin(), heap_.end(), cand_less);
        }
    }

    bool full() const { return heap_.size() == k_; }
    double worst_d2() const { return heap_.front().d2; }

    // Ascending by (distance, index).
    void extract_sorted(std::vector<Candidate>* out) {
        out->assign(heap_.begin(), heap_.end());
        std::sort(out->begin(), out->end(), [](const Candidate& a, const Candidate& b) {
            if (a.d2 != b.d2) return a.d2 < b.d2;
            return a.idx < b.idx;
        });
    }

private:
    std::size_t k_;
    std::vector<Candidate> heap_;
};

constexpr int kLeafSize = 12;
constexpr int kBruteForceCutoff = 256;

// Slack on the pruning radius absorbs the rounding of the distance kernel
// (relative error O(D * eps)), keeping the tree search exact in practice.
constexpr double kPruneSlack = 1.0 + 1e-12;

class VpTree {
public:
    explicit VpTree(const RowMatrixXd& points) : points_(points) {
        const auto n = static_cast<int32_t>(points.rows());
        items_.resize(static_cast<std::size_t>(n));
        for (int32_t i = 0; i < n; ++i) items_[static_cast<std::size_t>(i)] = i;
        nodes_.reserve(static_cast<std::size_t>(2 * n / kLeafSize + 8));
        root_ = build(0, n);
    }

    void query(const double* q, int32_t self, KBest* best) const {
        search(root_, q, self, best);
    }

private:
    struct Node {
        int32_t vantage = -1;
        double radius = 0.0;
        int32_t inside = -1;   // child with d(vantage, x) <= radius
        int32_t outside = -1;  // child with d(vantage, x) >= radius
        int32_t leaf_begin = -1;
        int32_t leaf_count = 0;
    };

    double dist(int32_t a, const double* q) const {
        return std::sqrt(kernels::squared_distance(points_.row(a).data(), q,
                                                   static_cast<std::size_t>(points_.cols())));
    }

    int32_t build(int32_t lo, int32_t hi) {
        Node node;
        const int32_t id = static_cast<int32_t>(nodes_.size());
        nodes_.push_back(node);
        if (hi - lo <= kLeafSize) {
            nodes_[static_cast<std::size_t>(id)].leaf_begin = lo;
            nodes_[static_cast<std::size_t>(id)].leaf_count = hi - lo;
            return id;
        }
        // Deterministic vantage: smallest point index in the range.
        int32_t vpos = lo;
        for (int32_t i = lo + 1; i < hi; ++i)
            if (items_[static_cast<std::size_t>(i)] < items_[static_cast<std::size_t>(vpos)])
                vpos = i;
        std::swap(items_[static_cast<std::size_t>(lo)], items_[static_cast<std::size_t>(vpos)]);
        const int32_t vantage = items_[static_cast<std::size_t>(lo)];
        const double* vrow = points_.row(vantage).data();

        const int32_t mid = lo + 1 + (hi - lo - 1) / 2;
        auto cmp = [&](int32_t a, int32_t b) {
            const double da = dist(a, vrow);
            const double db = dist(b, vrow);
            if (da != db) return da < db;
            return a < b;
        };
        std::nth_element(items_.begin() + lo + 1, items_.begin() + mid, items_.begin() + hi, cmp);

        nodes_[static_cast<std::size_t>(id)].vantage = vantage;
        nodes_[static_cast<std::size_t>(id)].radius =
            dist(items_[static_cast<std::size_t>(mid)], vrow);
        const int32_t inside = build(lo + 1, mid);
        const int32_t outside = build(mid, hi);
        nodes_[static_cast<std::size_t>(id)].inside = inside;
        nodes_[static_cast<std::size_t>(id)].outside = outside;
        return id;
    }

    void search(int32_t id, const double* q, int32_t self, KBest* best) const {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        const auto dim = static_cast<std::size_t>(points_.cols());
        if (node.leaf_begin >= 0) {
            for (int32_t i = 0; i < node.leaf_count; ++i) {
                const int32_t p = items_[static_cast<std::size_t>(node.leaf_begin + i)];
                if (p == self) continue;
                best->consider(kernels::squared_distance(points_.row(p).data(), q, dim), p);
            }
            return;
        }
        const double dv2 = kernels::squared_distance(points_.row(node.vantage).data(), q, dim);
        if (node.vantage != self) best->consider(dv2, node.vantage);
        const double dv = std::sqrt(dv2);

        const bool inside_first = dv < node.radius;
        for (int pass = 0; pass < 2; ++pass) {
            const bool visit_inside = (pass == 0) == inside_first;
            const double tau =
                best->full() ? std::sqrt(best->worst_d2()) * kPruneSlack
                             : std::numeric_limits<double>::infinity();
            if (visit_inside) {
                if (dv - tau <= node.radius) search(node.inside, q, self, best);
            } else {
                if (dv + tau >= node.radius) search(node.outside, q, self, best);
            }
        }
    }

    const RowMatrixXd& points_;
    std::vector<int32_t> items_;
    std::vector<Node> nodes_;
    int32_t root_ = 0;
};

NeighborLists collect(const Dataset& ds, int k,
                      const std::function<void(Index, KBest*)>& fill) {
    const Index n = ds.n();
    NeighborLists nl;
    nl.k = k;
    nl.idx.resize(n, k);
    nl.dist.resize(n, k);
    parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t i) {
        KBest best(k);
        fill(static_cast<Index>(i), &best);
        std::vector<Candidate> sorted;
        best.extract_sorted(&sorted);
        for (int j = 0; j < k; ++j) {
            nl.idx(static_cast<Index>(i), j) = sorted[static_cast<std::size_t>(j)].idx;
            nl.dist(static_cast<Index>(i), j) = std::sqrt(sorted[static_cast<std::size_t>(j)].d2);
        }
    });
    return nl;
}

}  // namespace

NeighborLists knn_brute_force(const Dataset& ds, int k) {
    const Index n = ds.n();
    if (k < 1 || k >= n) throw Error("knn requires 1 <= k < N");
    const auto dim = static_cast<std::size_t>(ds.dim());
    return collect(ds, k, [&](Index i, KBest* best) {
        const double* q = ds.points.row(i).data();
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            best->consider(kernels::squared_distance(ds.points.row(j).data(), q, dim),
                           static_cast<int32_t>(j));
        }
    });
}

NeighborLists knn(const Dataset& ds, int k) {
    const Index n = ds.n();
    if (k < 1 || k >= n) throw Error("knn requires 1 <= k < N");
    if (n <= kBruteForceCutoff) return knn_brute_force(ds, k);
    VpTree tree(ds.points);
    return collect(ds, k, [&](Index i, KBest* best) {
        tree.query(ds.points.row(i).data(), static_cast<int32_t>(i), best);
    });
}

}  // namespace dgc
