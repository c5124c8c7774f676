#pragma once

#include <cstdint>
#include <vector>

#include "dgc/common.hpp"
#include "dgc/dataset.hpp"

namespace dgc {

struct MetricsReport {
    // rows = GT classes 1..K_GT, cols = aligned predictions 1..K_GT,
    // restricted to gt != 0 pixels. Predictions whose label matched no GT
    // class (possible only when pred has more labels than GT) are tallied in
    // unmatched and are never correct.
    Eigen::MatrixXi confusion;
    int64_t unmatched = 0;
    double oa = 0.0;
    double aa = 0.0;
    double kappa = 0.0;
    std::vector<int32_t> permutation;       // pred label -> GT label, 0 = none
    std::vector<int32_t> empty_gt_classes;  // ids in 1..K_GT with no pixels
};

// Maps predicted labels onto GT labels by maximum-weight bipartite matching
// on the overlap matrix (restricted to gt != 0); equivalent to the best
// permutation when the label counts agree. Entry [c-1] is the GT label
// assigned to predicted label c, or 0 for labels matched to a dummy.
std::vector<int32_t> align(const LabelVector& pred, const LabelVector& gt);

// Overall accuracy, mean per-class recall, and Cohen's kappa with the
// standard marginal-product chance term, computed after alignment.
MetricsReport metrics(const LabelVector& pred, const LabelVector& gt);

struct PatchStats {
    std::vector<double> oa_a;  // per-patch overall accuracy, method A
    std::vector<double> oa_b;  // method B
    double delta_mean = 0.0;
    double delta_std = 0.0;    // sample standard deviation of the deltas
    double t_stat = 0.0;       // delta_mean / (delta_std / sqrt(df))
    int df = 0;                // patches - 1
    double critical_value = 0.0;
    bool significant = false;
    bool degenerate = false;   // all deltas equal (zero variance)
};

// Paired t statistic over per-patch OA differences (method A minus B).
PatchStats paired_patch_stats(const std::vector<double>& oa_a, const std::vector<double>& oa_b,
                              double critical_value);

}  // namespace dgc
