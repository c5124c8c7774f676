#pragma once

#include <cstdint>
#include <vector>

#include "dgc/common.hpp"
#include "dgc/density.hpp"
#include "dgc/diffusion.hpp"

namespace dgc {

// Per-point mode geometry at a fixed diffusion time: the distance to the
// nearest strictly-higher-density point (rho_tilde; for the density argmax,
// the max distance to any point), its normalization rho, the product score
// p * rho, the higher-density parent links, and the top-K score maximizers.
struct ModeAnalysis {
    Eigen::VectorXd rho_tilde;
    Eigen::VectorXd rho;          // rho_tilde / max(rho_tilde)
    Eigen::VectorXd score;        // p .* rho
    std::vector<int32_t> parent;  // nearest higher-density point; -1 for the argmax
    std::vector<int32_t> modes;   // K score maximizers, ties by ascending index
    RowMatrixXd coords;           // diffusion embedding the scan ran in
    double t = 0.0;
    int k = 0;
};

// Exhaustive scan over the density order in truncated diffusion coordinates;
// parallel over points, deterministic tie-breaking (distance, then index).
ModeAnalysis analyze_modes(const DiffusionModel& dm, const DensityProfile& dp, double t, int k);

// Re-selects the top-k score maximizers without redoing the scan; used when
// the cluster count is estimated after the analysis.
void select_modes(ModeAnalysis* ma, int k);

struct KEstimate {
    Eigen::VectorXd sorted_score;  // descending
    Eigen::VectorXd first_order;   // |s_{i+1} - s_i| magnitudes, 1-based gap i at [i-1]
    Eigen::VectorXd second_order;  // raw-difference ratios delta_i / delta_{i+1}
    int k_hat = 0;
    enum class Method { first_order, second_order } method = Method::first_order;
};

// Cluster-count estimate from the kink of the sorted score curve. The
// first-order rule looks for a prominent gap (local max of |delta|, more
// than double its predecessor, at least half the global max); if none
// exists, the largest second-order ratio wins.
KEstimate estimate_k(const ModeAnalysis& ma, int search_limit = 20);

}  // namespace dgc
