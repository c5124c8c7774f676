#include "dgc/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "dgc/kernels.hpp"

namespace dgc {

SpatialIndex build_spatial_index(const Dataset& ds, double r_s) {
    if (!ds.has_grid()) throw Error("spatial index requires a gridded dataset");
    if (r_s < 0) throw Error("spatial radius must be nonnegative");

    SpatialIndex si;
    si.radius = r_s;
    const Index n = ds.n();
    si.neighbors.resize(static_cast<std::size_t>(n));

    std::unordered_map<int64_t, int32_t> by_cell;
    by_cell.reserve(static_cast<std::size_t>(n) * 2);
    int64_t max_col = 0;
    for (const auto& g : ds.grid) max_col = std::max<int64_t>(max_col, g.col);
    const int64_t stride = max_col + 1;
    for (Index i = 0; i < n; ++i) {
        const auto& g = ds.grid[static_cast<std::size_t>(i)];
        by_cell[static_cast<int64_t>(g.row) * stride + g.col] = static_cast<int32_t>(i);
    }

    // Offsets within the disc, ordered by (dr, dc) for reproducible lists.
    const auto r_int = static_cast<int32_t>(std::floor(r_s));
    const double r2 = r_s * r_s;
    std::vector<std::pair<int32_t, int32_t>> offsets;
    for (int32_t dr = -r_int; dr <= r_int; ++dr)
        for (int32_t dc = -r_int; dc <= r_int; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (static_cast<double>(dr) * dr + static_cast<double>(dc) * dc <= r2)
                offsets.emplace_back(dr, dc);
        }

    for (Index i = 0; i < n; ++i) {
        const auto& g = ds.grid[static_cast<std::size_t>(i)];
        auto& out = si.neighbors[static_cast<std::size_t>(i)];
        for (const auto& [dr, dc] : offsets) {
            const int64_t rr = static_cast<int64_t>(g.row) + dr;
            const int64_t cc = static_cast<int64_t>(g.col) + dc;
            if (rr < 0 || cc < 0 || cc > max_col) continue;
            const auto it = by_cell.find(rr * stride + cc);
            if (it != by_cell.end()) out.push_back(it->second);
        }
    }
    return si;
}

int32_t consensus(const SpatialIndex& si, const std::vector<int32_t>& labels, Index n) {
    const auto& nbrs = si.neighbors[static_cast<std::size_t>(n)];
    if (nbrs.empty()) return 0;
    // The denominator counts every spatial neighbor, labeled or not.
    std::unordered_map<int32_t, std::size_t> counts;
    for (int32_t m : nbrs) {
        const int32_t lbl = labels[static_cast<std::size_t>(m)];
        if (lbl != 0) ++counts[lbl];
    }
    const std::size_t total = nbrs.size();
    for (const auto& [lbl, cnt] : counts) {
        if (2 * cnt > total) return lbl;
    }
    return 0;
}

namespace {

struct SweepState {
    Labeling out;
    std::vector<int32_t> sweep_order;  // density-descending point indices
};

// Mode and seed initialization shared by both sweeps. Modes get labels
// 1..K in mode order; seeds keep their given labels and may extend K.
// If the global density argmax ends up unlabeled it has no parent, so it
// is assigned its nearest mode in the embedding before any sweep runs.
SweepState init_sweep(const ModeAnalysis& ma, const DensityProfile& dp, const SeedList& seeds) {
    const auto n = static_cast<std::size_t>(ma.score.size());
    SweepState st;
    st.out.labels.assign(n, 0);
    st.out.provenance.assign(n, Provenance::none);
    st.out.k = static_cast<int32_t>(ma.modes.size());

    for (std::size_t i = 0; i < ma.modes.size(); ++i) {
        const auto m = static_cast<std::size_t>(ma.modes[i]);
        st.out.labels[m] = static_cast<int32_t>(i + 1);
        st.out.provenance[m] = Provenance::mode;
    }
    for (const auto& [idx, lbl] : seeds) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n) throw Error("seed index out of range");
        if (lbl < 1) throw Error("seed labels must be positive");
        st.out.labels[static_cast<std::size_t>(idx)] = lbl;
        st.out.provenance[static_cast<std::size_t>(idx)] = Provenance::queried;
        st.out.k = std::max(st.out.k, lbl);
    }

    const auto argmax = static_cast<std::size_t>(dp.order[0]);
    if (st.out.labels[argmax] == 0) {
        const double* row = ma.coords.row(static_cast<Index>(argmax)).data();
        const auto dim = static_cast<std::size_t>(ma.coords.cols());
        double best_d2 = std::numeric_limits<double>::infinity();
        int32_t best_mode = ma.modes[0];
        for (int32_t m : ma.modes) {
            const double d2 =
                kernels::squared_distance(row, ma.coords.row(m).data(), dim);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_mode = m;
            }
        }
        st.out.labels[argmax] = st.out.labels[static_cast<std::size_t>(best_mode)];
        st.out.provenance[argmax] = Provenance::stage1_spectral;
    }

    st.sweep_order.reserve(n);
    for (int32_t idx : dp.order) {
        if (st.out.labels[static_cast<std::size_t>(idx)] == 0) st.sweep_order.push_back(idx);
    }
    return st;
}

int32_t chain_label(const std::vector<int32_t>& labels, const std::vector<int32_t>& parent,
                    int32_t start) {
    int32_t cur = start;
    std::size_t hops = 0;
    while (labels[static_cast<std::size_t>(cur)] == 0) {
        const int32_t up = parent[static_cast<std::size_t>(cur)];
        if (up < 0 || ++hops > labels.size())
            throw Error("parent chain failed to reach a labeled point");
        cur = up;
    }
    return labels[static_cast<std::size_t>(cur)];
}

}  // namespace

Labeling run_dl(const ModeAnalysis& ma, const DensityProfile& dp, const SeedList& seeds) {
    SweepState st = init_sweep(ma, dp, seeds);
    for (int32_t idx : st.sweep_order) {
        const int32_t lbl = chain_label(st.out.labels, ma.parent,
                                        ma.parent[static_cast<std::size_t>(idx)]);
        st.out.labels[static_cast<std::size_t>(idx)] = lbl;
        st.out.provenance[static_cast<std::size_t>(idx)] = Provenance::stage1_spectral;
    }
    return st.out;
}

Labeling run_dlss(const ModeAnalysis& ma, const DensityProfile& dp, const SpatialIndex& si,
                  const SeedList& seeds) {
    if (si.neighbors.size() != static_cast<std::size_t>(ma.score.size()))
        throw Error("spatial index does not match the dataset");
    SweepState st = init_sweep(ma, dp, seeds);
    auto& labels = st.out.labels;

    // Stage 1: spectral labels vetoed by a disagreeing spatial consensus;
    // points whose parent is still unlabeled wait for stage 2.
    std::vector<int32_t> pending;
    for (int32_t idx : st.sweep_order) {
        const int32_t spectral =
            labels[static_cast<std::size_t>(ma.parent[static_cast<std::size_t>(idx)])];
        const int32_t c = consensus(si, labels, idx);
        if (spectral != 0 && (c == 0 || c == spectral)) {
            labels[static_cast<std::size_t>(idx)] = spectral;
            st.out.provenance[static_cast<std::size_t>(idx)] = Provenance::stage1_spectral;
            st.out.stage1_log.push_back({idx, spectral, c});
        } else {
            pending.push_back(idx);
        }
    }
    st.out.stage1_unlabeled = static_cast<int32_t>(pending.size());

    // Stage 2: consensus against the evolving labeling, parent chain as the
    // fallback.
    for (int32_t idx : pending) {
        const int32_t c = consensus(si, labels, idx);
        if (c != 0) {
            labels[static_cast<std::size_t>(idx)] = c;
            st.out.provenance[static_cast<std::size_t>(idx)] = Provenance::stage2_consensus;
        } else {
            labels[static_cast<std::size_t>(idx)] = chain_label(
                labels, ma.parent, ma.parent[static_cast<std::size_t>(idx)]);
            st.out.provenance[static_cast<std::size_t>(idx)] = Provenance::stage2_spectral;
        }
    }
    return st.out;
}

}  // namespace dgc
