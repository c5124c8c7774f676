#include "dgc/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dgc/kernels.hpp"
#include "dgc/parallel.hpp"

namespace dgc {

ModeAnalysis analyze_modes(const DiffusionModel& dm, const DensityProfile& dp, double t, int k) {
    const Index n = dm.n();
    if (k < 1 || k > n) throw Error("analyze_modes requires 1 <= K <= N");
    if (static_cast<Index>(dp.order.size()) != n)
        throw Error("density profile does not match the diffusion model");

    ModeAnalysis ma;
    ma.t = t;
    ma.k = k;
    ma.coords = diffusion_coords(dm, t);
    ma.rho_tilde.resize(n);
    ma.parent.assign(static_cast<std::size_t>(n), -1);

    const auto dim = static_cast<std::size_t>(ma.coords.cols());

    // Each point scans every point preceding it in the density order; the
    // density argmax instead takes its max distance over all points.
    parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t pos) {
        const int32_t self = dp.order[pos];
        const double* row = ma.coords.row(self).data();
        if (pos == 0) {
            double worst = 0.0;
            for (Index m = 0; m < n; ++m) {
                if (m == self) continue;
                const double d2 =
                    kernels::squared_distance(row, ma.coords.row(m).data(), dim);
                worst = std::max(worst, d2);
            }
            ma.rho_tilde(self) = std::sqrt(worst);
            return;
        }
        double best_d2 = std::numeric_limits<double>::infinity();
        int32_t best_m = -1;
        for (std::size_t q = 0; q < pos; ++q) {
            const int32_t m = dp.order[q];
            const double d2 = kernels::squared_distance(row, ma.coords.row(m).data(), dim);
            if (d2 < best_d2 || (d2 == best_d2 && m < best_m)) {
                best_d2 = d2;
                best_m = m;
            }
        }
        ma.rho_tilde(self) = std::sqrt(best_d2);
        ma.parent[static_cast<std::size_t>(self)] = best_m;
    });

    const double max_rho = ma.rho_tilde.maxCoeff();
    if (!(max_rho > 0)) throw Error("degenerate geometry: all diffusion distances are zero");
    ma.rho = ma.rho_tilde / max_rho;
    ma.score = dp.p.cwiseProduct(ma.rho);

    select_modes(&ma, k);
    return ma;
}

void select_modes(ModeAnalysis* ma, int k) {
    const Index n = ma->score.size();
    if (k < 1 || k > n) throw Error("mode count must satisfy 1 <= K <= N");
    std::vector<int32_t> by_score(static_cast<std::size_t>(n));
    std::iota(by_score.begin(), by_score.end(), 0);
    std::sort(by_score.begin(), by_score.end(), [&](int32_t a, int32_t b) {
        const double sa = ma->score(a), sb = ma->score(b);
        if (sa != sb) return sa > sb;
        return a < b;
    });
    ma->modes.assign(by_score.begin(), by_score.begin() + k);
    ma->k = k;
}

KEstimate estimate_k(const ModeAnalysis& ma, int search_limit) {
    const Index n = ma.score.size();
    if (search_limit < 2) throw Error("estimate_k search limit must be at least 2");
    if (n <= search_limit + 2)
        throw Error("estimate_k needs N > search_limit + 2");

    KEstimate est;
    est.sorted_score.resize(n);
    {
        std::vector<double> s(ma.score.data(), ma.score.data() + n);
        std::sort(s.begin(), s.end(), std::greater<double>());
        for (Index i = 0; i < n; ++i) est.sorted_score(i) = s[static_cast<std::size_t>(i)];
    }

    // delta_i = s_{i+1} - s_i for 1-based i; one extra gap so gap
    // search_limit still has a right neighbor for the local-max test.
    const int ngaps = search_limit + 1;
    Eigen::VectorXd delta(ngaps);
    for (int i = 0; i < ngaps; ++i) delta(i) = est.sorted_score(i + 1) - est.sorted_score(i);
    est.first_order = delta.cwiseAbs();

    double global_max = 0.0;
    for (int i = 0; i < search_limit; ++i) global_max = std::max(global_max, est.first_order(i));

    if (!(global_max > 0)) throw Error("score curve is flat; cluster count is inconclusive");

    // First-order rule: smallest gap index i >= 2 whose magnitude is a local
    // maximum, more than double its predecessor, and at least half the
    // global maximum.
    for (int i = 2; i <= search_limit; ++i) {
        const double cur = est.first_order(i - 1);
        const double prev = est.first_order(i - 2);
        const double next = est.first_order(i);  // gap i+1, available by construction
        const bool local_max = cur > prev && cur > next;
        if (local_max && cur > 2.0 * prev && cur >= 0.5 * global_max) {
            est.k_hat = i;
            est.method = KEstimate::Method::first_order;
            return est;
        }
    }

    // Second-order rule: largest ratio of consecutive raw differences.
    est.second_order.resize(search_limit);
    est.second_order.setZero();
    double best_ratio = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 2; i <= search_limit; ++i) {
        const double num = delta(i - 1);
        const double den = delta(i);
        if (std::abs(den) < 1e-15) continue;
        const double ratio = num / den;
        est.second_order(i - 1) = ratio;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_i = i;
        }
    }
    if (best_i == 0) throw Error("second-order ratios are all degenerate; cluster count is inconclusive");
    est.k_hat = best_i;
    est.method = KEstimate::Method::second_order;
    return est;
}

}  // namespace dgc
