#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dgc/common.hpp"
#include "dgc/dataset.hpp"
#include "dgc/density.hpp"
#include "dgc/modes.hpp"

namespace dgc {

// Pixel neighborhoods within Euclidean distance r_s on the image grid,
// self excluded. Empty neighborhoods (r_s = 0 or isolated pixels) make the
// consensus vote always fail, which reduces the spatial-spectral sweep to
// the spectral-only one.
struct SpatialIndex {
    std::vector<std::vector<int32_t>> neighbors;
    double radius = 0.0;
};

SpatialIndex build_spatial_index(const Dataset& ds, double r_s);

enum class Provenance : int32_t {
    none = 0,
    mode = 1,
    queried = 2,
    stage1_spectral = 3,
    stage2_consensus = 4,
    stage2_spectral = 5,
};

struct Stage1Event {
    int32_t index;
    int32_t label;
    int32_t consensus;  // consensus value at the moment of assignment
};

struct Labeling {
    std::vector<int32_t> labels;          // in {0..k}; 0 only transiently
    std::vector<Provenance> provenance;
    int32_t k = 0;
    int32_t stage1_unlabeled = 0;         // points left for the second sweep
    std::vector<Stage1Event> stage1_log;  // audit trail of stage-1 assignments
};

// Strict-majority label among n's spatial neighbors, counting unlabeled
// neighbors as label 0; returns 0 when no label exceeds half.
int32_t consensus(const SpatialIndex& si, const std::vector<int32_t>& labels, Index n);

// (point index, label) seed assignments; labels may exceed the mode count.
using SeedList = std::vector<std::pair<int32_t, int32_t>>;

// Two-stage spectral-spatial sweep: stage 1 propagates each point's
// higher-density parent label unless the spatial consensus exists and
// disagrees (or the parent is still unlabeled); stage 2 assigns the evolving
// consensus when it exists and otherwise walks the parent chain to the first
// labeled point. Every point is labeled on exit.
Labeling run_dlss(const ModeAnalysis& ma, const DensityProfile& dp, const SpatialIndex& si,
                  const SeedList& seeds = {});

// Spectral-only sweep: parent-chain label propagation in density order.
Labeling run_dl(const ModeAnalysis& ma, const DensityProfile& dp, const SeedList& seeds = {});

}  // namespace dgc
