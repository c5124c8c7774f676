#include "dgc/synth.hpp"

#include <cmath>
#include <limits>

#include "dgc/kernels.hpp"
#include "dgc/rng.hpp"

namespace dgc {

Dataset generate_toy(const ToySpec& spec) {
    if (!(spec.sigma_blob > 0)) throw Error("toy blob sigma must be positive");
    const int n_core = spec.n_gauss1a + spec.n_gauss1b + spec.n_bridge + spec.n_gauss2;
    const int n = n_core + spec.n_noise;
    if (n_core < 1) throw Error("toy spec has no core points");

    Dataset ds;
    ds.name = "toy";
    ds.points.resize(n, 2);
    ds.gt.resize(static_cast<std::size_t>(n));
    Rng rng(spec.seed);

    Index row = 0;
    auto gaussian = [&](double mx, double my, int count, int32_t label) {
        for (int i = 0; i < count; ++i, ++row) {
            ds.points(row, 0) = rng.normal(mx, spec.sigma_blob);
            ds.points(row, 1) = rng.normal(my, spec.sigma_blob);
            ds.gt[static_cast<std::size_t>(row)] = label;
        }
    };
    gaussian(0.0, 1.0, spec.n_gauss1a, 1);
    gaussian(1.0, 0.0, spec.n_gauss1b, 1);

    // Band along y = (1-x)^2, jittered along the curve normal.
    for (int i = 0; i < spec.n_bridge; ++i, ++row) {
        const double x = rng.uniform();
        const double y = (1.0 - x) * (1.0 - x);
        const double slope = -2.0 * (1.0 - x);
        const double inv_norm = 1.0 / std::sqrt(1.0 + slope * slope);
        const double off = rng.uniform(-spec.bridge_width, spec.bridge_width);
        ds.points(row, 0) = x - off * slope * inv_norm;
        ds.points(row, 1) = y + off * inv_norm;
        ds.gt[static_cast<std::size_t>(row)] = 1;
    }

    gaussian(0.0, 0.0, spec.n_gauss2, 2);

    const Index noise_begin = row;
    for (int i = 0; i < spec.n_noise; ++i, ++row) {
        ds.points(row, 0) = rng.uniform(spec.noise_box[0], spec.noise_box[1]);
        ds.points(row, 1) = rng.uniform(spec.noise_box[2], spec.noise_box[3]);
    }
    for (Index i = noise_begin; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int32_t label = 1;
        for (Index j = 0; j < noise_begin; ++j) {
            const double d2 = kernels::squared_distance(ds.points.row(i).data(),
                                                        ds.points.row(j).data(), 2);
            if (d2 < best) {
                best = d2;
                label = ds.gt[static_cast<std::size_t>(j)];
            }
        }
        ds.gt[static_cast<std::size_t>(i)] = label;
    }

    ds.validate();
    return ds;
}

Dataset generate_blobs(int k, int n_per, int dim, double separation, uint64_t seed) {
    if (k < 1 || n_per < 1 || dim < 1) throw Error("blob counts must be positive");
    if (!(separation > 0)) throw Error("blob separation must be positive");

    Dataset ds;
    ds.name = "blobs";
    const Index n = static_cast<Index>(k) * n_per;
    ds.points.resize(n, dim);
    ds.gt.resize(static_cast<std::size_t>(n));
    Rng rng(seed);

    Index row = 0;
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < n_per; ++i, ++row) {
            for (int d = 0; d < dim; ++d) {
                const double mean = d == 0 ? separation * c : 0.0;
                ds.points(row, d) = rng.normal(mean, 1.0);
            }
            ds.gt[static_cast<std::size_t>(row)] = c + 1;
        }
    }
    ds.validate();
    return ds;
}

Dataset generate_strip_image(int rows, int cols, int k, int bands, double separation,
                             double noise_sigma, uint64_t seed) {
    if (rows < 1 || cols < 1 || bands < 1 || k < 1) throw Error("strip image dims must be positive");
    if (k > cols) throw Error("strip image needs cols >= k");

    Dataset ds;
    ds.name = "strips";
    ds.grid_rows = rows;
    ds.grid_cols = cols;
    const Index n = static_cast<Index>(rows) * cols;
    ds.points.resize(n, bands);
    ds.gt.resize(static_cast<std::size_t>(n));
    ds.grid.resize(static_cast<std::size_t>(n));
    Rng rng(seed);

    // One signature per class, spaced on the first axis like the blobs.
    RowMatrixXd signatures(k, bands);
    for (int c = 0; c < k; ++c)
        for (int b = 0; b < bands; ++b)
            signatures(c, b) = (b == 0 ? separation * c : 0.0) + rng.normal(0.0, 0.25);

    for (Index i = 0; i < n; ++i) {
        const int32_t r = static_cast<int32_t>(i / cols);
        const int32_t c = static_cast<int32_t>(i % cols);
        ds.grid[static_cast<std::size_t>(i)] = {r, c};
        const int cls = std::min(k - 1, c * k / cols);
        for (int b = 0; b < bands; ++b)
            ds.points(i, b) = signatures(cls, b) + rng.normal(0.0, noise_sigma);
        ds.gt[static_cast<std::size_t>(i)] = cls + 1;
    }
    ds.validate();
    return ds;
}

}  // namespace dgc
