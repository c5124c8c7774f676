#pragma once

#include <cstdint>
#include <vector>

#include "dgc/common.hpp"
#include "dgc/dataset.hpp"
#include "dgc/labeling.hpp"
#include "dgc/modes.hpp"

namespace dgc {

struct QueryPlan {
    Eigen::VectorXd ambiguity;     // F per point: |d(x, m1) - d(x, m2)|
    std::vector<int32_t> queries;  // L smallest-F non-mode points
    int budget = 0;
    double alpha = 0.0;            // budget / N
};

// Ambiguity of each point as the absolute difference of the diffusion
// distances to its two nearest modes; queries are the budget smallest
// values among non-mode points (ties by ascending index). An eligibility
// mask restricts the candidate pool (e.g. to pixels with ground truth);
// modes are never eligible.
QueryPlan plan_queries(const DiffusionModel& dm, const ModeAnalysis& ma, double t, int budget,
                       const std::vector<uint8_t>* eligible = nullptr);

// Ground-truth labels for the queried points are translated into the
// labeling's own label space through the evaluation alignment of the
// unseeded run, then the spectral-spatial sweep reruns with modes plus
// queries as seeds. GT classes with no matched label receive fresh ids.
Labeling run_active(const QueryPlan& qp, const LabelVector& gt, const ModeAnalysis& ma,
                    const DensityProfile& dp, const SpatialIndex& si);

// Same relabeling but with the budget drawn uniformly without replacement
// from non-mode points that have ground truth.
Labeling random_baseline(uint64_t seed, int budget, const LabelVector& gt,
                         const ModeAnalysis& ma, const DensityProfile& dp,
                         const SpatialIndex& si);

}  // namespace dgc
