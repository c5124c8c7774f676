#pragma once

#include <array>
#include <cstdint>

#include "dgc/common.hpp"
#include "dgc/dataset.hpp"

namespace dgc {

// Two-class 2-D testbed: one class is a pair of isotropic Gaussians at
// (0,1) and (1,0) joined by a thin band along the parabola y = (1-x)^2,
// the other an isotropic Gaussian at the origin; uniform box noise is
// labeled by its nearest non-noise point. Deterministic per seed.
struct ToySpec {
    int n_gauss1a = 200;
    int n_gauss1b = 200;
    int n_bridge = 200;
    int n_gauss2 = 300;
    int n_noise = 100;
    double sigma_blob = 0.1;
    double bridge_width = 0.03;
    std::array<double, 4> noise_box{-1.0, 2.0, -1.0, 2.0};  // xmin xmax ymin ymax
    uint64_t seed = 1;
};

Dataset generate_toy(const ToySpec& spec);

// K isotropic unit-variance Gaussians with means spaced `separation` apart
// along the first axis; gt is the generating component.
Dataset generate_blobs(int k, int n_per, int dim, double separation, uint64_t seed);

// Gridded analogue for exercising the spatial machinery: a rows x cols
// image of k vertical strips whose pixels are Gaussian draws around one
// signature per strip, `separation` apart in feature space.
Dataset generate_strip_image(int rows, int cols, int k, int bands, double separation,
                             double noise_sigma, uint64_t seed);

}  // namespace dgc
