#include "dgc/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dgc/kernels.hpp"
#include "dgc/parallel.hpp"
#include "dgc/rng.hpp"

namespace dgc {

double pairwise_distance_scale(const RowMatrixXd& points, std::size_t max_pairs, uint64_t seed,
                               BandwidthCenter center) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (n < 2) throw Error("pairwise distance scale needs at least two points");
    const auto dim = static_cast<std::size_t>(points.cols());
    const std::size_t total = n * (n - 1) / 2;

    std::vector<double> dists;
    if (total <= max_pairs) {
        dists.reserve(total);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double* ri = points.row(static_cast<Index>(i)).data();
            for (std::size_t j = i + 1; j < n; ++j) {
                dists.push_back(std::sqrt(kernels::squared_distance(
                    ri, points.row(static_cast<Index>(j)).data(), dim)));
            }
        }
    } else {
        // Uniform draws over the pair set, decoded from a flat pair id.
        Rng rng(seed);
        dists.reserve(max_pairs);
        for (std::size_t s = 0; s < max_pairs; ++s) {
            std::size_t i = static_cast<std::size_t>(rng.uniform_int(n));
            std::size_t j = static_cast<std::size_t>(rng.uniform_int(n - 1));
            if (j >= i) ++j;
            dists.push_back(std::sqrt(kernels::squared_distance(
                points.row(static_cast<Index>(i)).data(),
                points.row(static_cast<Index>(j)).data(), dim)));
        }
    }

    if (center == BandwidthCenter::median) {
        const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
        std::nth_element(dists.begin(), mid, dists.end());
        return *mid;
    }
    return std::accumulate(dists.begin(), dists.end(), 0.0) / static_cast<double>(dists.size());
}

DensityProfile estimate_density(const Dataset& ds, const NeighborLists& nl, int k_density,
                                const DensityOptions& opts) {
    if (k_density < 1 || k_density > nl.k)
        throw Error("k_density must satisfy 1 <= k_density <= neighbor list k");
    const Index n = ds.n();

    double sigma1;
    if (opts.sigma1) {
        sigma1 = *opts.sigma1;
        if (!(sigma1 > 0)) throw Error("density bandwidth must be positive");
    } else {
        const std::size_t total = static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) - 1) / 2;
        const std::size_t exact_pairs =
            static_cast<std::size_t>(opts.exact_limit) * (opts.exact_limit - 1) / 2;
        const std::size_t budget = total <= exact_pairs ? total : opts.max_pairs;
        sigma1 = pairwise_distance_scale(ds.points, budget, opts.seed, opts.center) / 20.0;
        if (!(sigma1 > 0)) throw Error("degenerate dataset: zero pairwise distance scale");
    }

    DensityProfile dp;
    dp.sigma1 = sigma1;
    dp.p.resize(n);
    const double inv_s2 = 1.0 / (sigma1 * sigma1);
    parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t i) {
        double p0 = 0.0;
        for (int j = 0; j < k_density; ++j) {
            const double d = nl.dist(static_cast<Index>(i), j);
            p0 += std::exp(-(d * d) * inv_s2);
        }
        dp.p(static_cast<Index>(i)) = p0;
    });
    const double sum = dp.p.sum();
    if (!(sum > 0)) throw Error("density estimate collapsed to zero");
    dp.p /= sum;

    dp.order.resize(static_cast<std::size_t>(n));
    std::iota(dp.order.begin(), dp.order.end(), 0);
    std::sort(dp.order.begin(), dp.order.end(), [&](int32_t a, int32_t b) {
        const double pa = dp.p(a), pb = dp.p(b);
        if (pa != pb) return pa > pb;
        return a < b;
    });
    dp.rank.resize(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < dp.order.size(); ++r)
        dp.rank[static_cast<std::size_t>(dp.order[r])] = static_cast<int32_t>(r);
    return dp;
}

}  // namespace dgc
