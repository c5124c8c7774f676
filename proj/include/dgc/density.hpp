#pragma once

#include <cstdint>
#include <optional>

#include "dgc/common.hpp"
#include "dgc/dataset.hpp"
#include "dgc/neighbors.hpp"

namespace dgc {

// Normalized kernel density values plus the strict total order they induce
// (descending density, ties by ascending index). rank is the inverse of
// order; "m has higher density than n" means rank[m] < rank[n].
struct DensityProfile {
    Eigen::VectorXd p;            // sums to 1
    std::vector<int32_t> order;   // order[r] = index of the r-th densest point
    std::vector<int32_t> rank;    // rank[order[r]] = r
    double sigma1 = 0.0;          // bandwidth actually used
};

enum class BandwidthCenter { mean, median };

struct DensityOptions {
    std::optional<double> sigma1;       // overrides the bandwidth rule
    uint64_t seed = 1;                  // pair sampling seed
    BandwidthCenter center = BandwidthCenter::mean;
    std::size_t max_pairs = 1000000;    // sample size above the exact limit
    std::size_t exact_limit = 1500;     // N at or below which all pairs are used
};

// Mean (or median) Euclidean distance over all point pairs, estimated from
// at most max_pairs uniformly sampled distinct pairs when the full pair
// count exceeds max_pairs. Deterministic per seed.
double pairwise_distance_scale(const RowMatrixXd& points, std::size_t max_pairs, uint64_t seed,
                               BandwidthCenter center = BandwidthCenter::mean);

// p0(x) = sum over the k_density nearest neighbors of exp(-d^2 / sigma1^2),
// normalized to sum to one. sigma1 defaults to one twentieth of the mean
// pairwise distance (exact when N <= exact_limit, sampled otherwise).
DensityProfile estimate_density(const Dataset& ds, const NeighborLists& nl, int k_density,
                                const DensityOptions& opts = {});

}  // namespace dgc
