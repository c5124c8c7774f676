#pragma once

#include <cstdint>

#include "dgc/common.hpp"
#include "dgc/dataset.hpp"

namespace dgc {

struct NeighborLists {
    RowMatrixXi idx;   // N x k neighbor indices, self excluded
    RowMatrixXd dist;  // N x k Euclidean distances, ascending per row
    int k = 0;
};

// Exact k nearest Euclidean neighbors per point, ties broken by lower index.
// Uses a vantage-point tree (triangle-inequality pruning, effective when the
// intrinsic dimension is low) above a brute-force cutoff. Queries are
// parallel over points; output is independent of the worker count.
NeighborLists knn(const Dataset& ds, int k);

// O(N^2 D) reference used for tests and as the small-N path.
NeighborLists knn_brute_force(const Dataset& ds, int k);

}  // namespace dgc
