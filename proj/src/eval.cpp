#include "dgc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgc {

namespace {

// Hungarian algorithm (potentials form), minimizing cost on a square matrix.
// Returns match[row] = col. O(n^3); label counts here are tiny.
std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match_col(static_cast<std::size_t>(n) + 1, 0);  // col -> row
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match_col[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1,
                                 std::numeric_limits<double>::infinity());
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = match_col[static_cast<std::size_t>(j0)];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match_col[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match_col[static_cast<std::size_t>(j0)] = match_col[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> match_row(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        const int i = match_col[static_cast<std::size_t>(j)];
        if (i >= 1) match_row[static_cast<std::size_t>(i) - 1] = j - 1;
    }
    return match_row;
}

}  // namespace

std::vector<int32_t> align(const LabelVector& pred, const LabelVector& gt) {
    if (pred.labels.size() != gt.labels.size())
        throw Error("prediction and ground truth differ in length");
    const int32_t kp = pred.k;
    const int32_t kg = gt.k;
    if (kp < 1) throw Error("prediction has no labels");

    // Overlap counts over evaluable pixels.
    Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(kp, kg);
    int64_t evaluable = 0;
    for (std::size_t n = 0; n < gt.labels.size(); ++n) {
        const int32_t g = gt.labels[n];
        if (g == 0) continue;
        ++evaluable;
        const int32_t c = pred.labels[n];
        if (c < 1 || c > kp) throw Error("prediction label out of range at index " + std::to_string(n));
        if (g > kg) throw Error("gt label out of range at index " + std::to_string(n));
        overlap(c - 1, g - 1) += 1.0;
    }
    if (evaluable == 0) throw Error("ground truth has no labeled pixels");

    // Pad to square and minimize negated overlap.
    const int side = std::max(kp, kg);
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(side, side);
    cost.topLeftCorner(kp, kg) = -overlap;
    const auto match = hungarian_min(cost);

    std::vector<int32_t> perm(static_cast<std::size_t>(kp), 0);
    for (int32_t c = 0; c < kp; ++c) {
        const int g = match[static_cast<std::size_t>(c)];
        if (g >= 0 && g < kg) perm[static_cast<std::size_t>(c)] = g + 1;
    }
    return perm;
}

MetricsReport metrics(const LabelVector& pred, const LabelVector& gt) {
    MetricsReport rep;
    rep.permutation = align(pred, gt);
    const int32_t kg = gt.k;

    rep.confusion = Eigen::MatrixXi::Zero(kg, kg);
    int64_t total = 0;
    for (std::size_t n = 0; n < gt.labels.size(); ++n) {
        const int32_t g = gt.labels[n];
        if (g == 0) continue;
        ++total;
        const int32_t aligned = rep.permutation[static_cast<std::size_t>(pred.labels[n]) - 1];
        if (aligned == 0) {
            ++rep.unmatched;
        } else {
            rep.confusion(g - 1, aligned - 1) += 1;
        }
    }

    int64_t trace = 0;
    for (int32_t g = 0; g < kg; ++g) trace += rep.confusion(g, g);
    rep.oa = static_cast<double>(trace) / static_cast<double>(total);

    double recall_sum = 0.0;
    int classes = 0;
    for (int32_t g = 0; g < kg; ++g) {
        const int64_t row = rep.confusion.row(g).sum();
        if (row == 0) {
            rep.empty_gt_classes.push_back(g + 1);
            continue;
        }
        recall_sum += static_cast<double>(rep.confusion(g, g)) / static_cast<double>(row);
        ++classes;
    }
    if (classes == 0) throw Error("all ground-truth classes are empty");
    rep.aa = recall_sum / classes;

    // Chance agreement from the marginals; unmatched predictions contribute
    // to neither marginal and are simply never correct.
    double a_e = 0.0;
    const double t2 = static_cast<double>(total) * static_cast<double>(total);
    for (int32_t g = 0; g < kg; ++g) {
        const double row = rep.confusion.row(g).sum();
        const double col = rep.confusion.col(g).sum();
        a_e += row * col / t2;
    }
    if (std::abs(1.0 - a_e) < 1e-15) {
        rep.kappa = rep.oa == 1.0 ? 1.0 : 0.0;
    } else {
        rep.kappa = (rep.oa - a_e) / (1.0 - a_e);
    }
    return rep;
}

PatchStats paired_patch_stats(const std::vector<double>& oa_a, const std::vector<double>& oa_b,
                              double critical_value) {
    if (oa_a.size() != oa_b.size() || oa_a.size() < 2)
        throw Error("paired patch stats need two equal-length series of length >= 2");
    PatchStats ps;
    ps.oa_a = oa_a;
    ps.oa_b = oa_b;
    ps.critical_value = critical_value;
    const std::size_t n = oa_a.size();
    ps.df = static_cast<int>(n) - 1;

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += oa_a[i] - oa_b[i];
    mean /= static_cast<double>(n);
    ps.delta_mean = mean;

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (oa_a[i] - oa_b[i]) - mean;
        ss += d * d;
    }
    ps.delta_std = std::sqrt(ss / static_cast<double>(n - 1));

    if (ps.delta_std == 0.0) {
        ps.degenerate = true;
        ps.t_stat = 0.0;
        ps.significant = false;
        return ps;
    }
    ps.t_stat = ps.delta_mean / (ps.delta_std / std::sqrt(static_cast<double>(ps.df)));
    ps.significant = std::abs(ps.t_stat) > critical_value;
    return ps;
}

}  // namespace dgc
