#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <utility>
#include <vector>

#include "dgc/common.hpp"
#include "dgc/dataset.hpp"
#include "dgc/neighbors.hpp"

namespace dgc {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct MarkovGraph {
    SparseRowMatrix w;        // symmetric affinities, zero diagonal
    SparseRowMatrix p;        // row-stochastic transition matrix
    Eigen::VectorXd deg;      // row sums of w
    Eigen::VectorXd pi;       // stationary distribution deg / sum(deg)
    double sigma = 0.0;
    int k = 0;
    // Edges added to connect the graph, as (i, j) point pairs.
    std::vector<std::pair<int32_t, int32_t>> bridges;
};

// W(x,y) = exp(-||x-y||^2 / sigma^2) when either point is among the other's
// k nearest neighbors (symmetrization by maximum), diagonal zero. If the
// resulting graph is disconnected, the closest inter-component pair is
// bridged with its kernel weight until connected; added bridges are recorded.
MarkovGraph build_graph(const Dataset& ds, const NeighborLists& nl, double sigma);

}  // namespace dgc
