#include "dgc/active.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dgc/eval.hpp"
#include "dgc/kernels.hpp"
#include "dgc/parallel.hpp"
#include "dgc/rng.hpp"

namespace dgc {

QueryPlan plan_queries(const DiffusionModel& dm, const ModeAnalysis& ma, double t, int budget,
                       const std::vector<uint8_t>* eligible) {
    const Index n = dm.n();
    const auto k = static_cast<int>(ma.modes.size());
    if (k < 2) throw Error("query planning needs at least two modes");
    if (budget < 0 || budget > n - k) throw Error("query budget must satisfy 0 <= L <= N - K");
    if (eligible && static_cast<Index>(eligible->size()) != n)
        throw Error("eligibility mask does not match dataset");

    const RowMatrixXd coords = diffusion_coords(dm, t);
    const auto dim = static_cast<std::size_t>(coords.cols());

    QueryPlan qp;
    qp.budget = budget;
    qp.alpha = static_cast<double>(budget) / static_cast<double>(n);
    qp.ambiguity.resize(n);

    parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t i) {
        const double* row = coords.row(static_cast<Index>(i)).data();
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        for (int32_t m : ma.modes) {
            const double d =
                std::sqrt(kernels::squared_distance(row, coords.row(m).data(), dim));
            if (d < d1) {
                d2 = d1;
                d1 = d;
            } else if (d < d2) {
                d2 = d;
            }
        }
        qp.ambiguity(static_cast<Index>(i)) = std::abs(d1 - d2);
    });

    std::vector<char> is_mode(static_cast<std::size_t>(n), 0);
    for (int32_t m : ma.modes) is_mode[static_cast<std::size_t>(m)] = 1;

    std::vector<int32_t> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        if (is_mode[static_cast<std::size_t>(i)]) continue;
        if (eligible && !(*eligible)[static_cast<std::size_t>(i)]) continue;
        pool.push_back(static_cast<int32_t>(i));
    }
    if (static_cast<int>(pool.size()) < budget)
        throw Error("eligible pool smaller than the query budget");

    std::partial_sort(pool.begin(), pool.begin() + budget, pool.end(),
                      [&](int32_t a, int32_t b) {
                          const double fa = qp.ambiguity(a), fb = qp.ambiguity(b);
                          if (fa != fb) return fa < fb;
                          return a < b;
                      });
    qp.queries.assign(pool.begin(), pool.begin() + budget);
    return qp;
}

namespace {

Labeling seeded_rerun(const std::vector<int32_t>& queries, const LabelVector& gt,
                      const ModeAnalysis& ma, const DensityProfile& dp, const SpatialIndex& si) {
    std::vector<int32_t> missing;
    for (int32_t q : queries)
        if (gt.labels[static_cast<std::size_t>(q)] == 0) missing.push_back(q);
    if (!missing.empty()) {
        std::string msg = "queried points lack ground truth:";
        for (int32_t q : missing) msg += " " + std::to_string(q);
        throw Error(msg);
    }

    // Bridge the oracle's label space to the mode labels via the alignment
    // of the unseeded labeling.
    const Labeling base = run_dlss(ma, dp, si);
    const auto perm = align(LabelVector{base.labels, base.k}, gt);
    std::vector<int32_t> gt_to_label(static_cast<std::size_t>(gt.k) + 1, 0);
    for (std::size_t c = 0; c < perm.size(); ++c) {
        if (perm[c] != 0) gt_to_label[static_cast<std::size_t>(perm[c])] = static_cast<int32_t>(c) + 1;
    }
    int32_t next_label = base.k;
    for (int32_t g = 1; g <= gt.k; ++g) {
        if (gt_to_label[static_cast<std::size_t>(g)] == 0)
            gt_to_label[static_cast<std::size_t>(g)] = ++next_label;
    }

    SeedList seeds;
    seeds.reserve(queries.size());
    for (int32_t q : queries)
        seeds.emplace_back(q, gt_to_label[static_cast<std::size_t>(
                                  gt.labels[static_cast<std::size_t>(q)])]);
    return run_dlss(ma, dp, si, seeds);
}

}  // namespace

Labeling run_active(const QueryPlan& qp, const LabelVector& gt, const ModeAnalysis& ma,
                    const DensityProfile& dp, const SpatialIndex& si) {
    if (gt.labels.size() != static_cast<std::size_t>(ma.score.size()))
        throw Error("ground truth does not match the dataset");
    return seeded_rerun(qp.queries, gt, ma, dp, si);
}

Labeling random_baseline(uint64_t seed, int budget, const LabelVector& gt,
                         const ModeAnalysis& ma, const DensityProfile& dp,
                         const SpatialIndex& si) {
    const auto n = static_cast<Index>(gt.labels.size());
    std::vector<char> is_mode(static_cast<std::size_t>(n), 0);
    for (int32_t m : ma.modes) is_mode[static_cast<std::size_t>(m)] = 1;

    std::vector<int32_t> pool;
    for (Index i = 0; i < n; ++i) {
        if (is_mode[static_cast<std::size_t>(i)]) continue;
        if (gt.labels[static_cast<std::size_t>(i)] == 0) continue;
        pool.push_back(static_cast<int32_t>(i));
    }
    if (budget < 0 || budget > static_cast<int>(pool.size()))
        throw Error("random baseline budget exceeds the labeled non-mode pool");

    Rng rng(seed);
    const auto picks =
        rng.sample_without_replacement(static_cast<int32_t>(pool.size()), budget);
    std::vector<int32_t> queries;
    queries.reserve(picks.size());
    for (int32_t p : picks) queries.push_back(pool[static_cast<std::size_t>(p)]);
    std::sort(queries.begin(), queries.end());
    return seeded_rerun(queries, gt, ma, dp, si);
}

}  // namespace dgc
