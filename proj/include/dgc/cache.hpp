#pragma once

#include <cstdint>
#include <string>

#include "dgc/dataset.hpp"
#include "dgc/diffusion.hpp"
#include "dgc/graph.hpp"
#include "dgc/neighbors.hpp"

namespace dgc {

// FNV-1a over the point payload, grid and gt; keys the stage cache.
uint64_t dataset_fingerprint(const Dataset& ds);

// Optional on-disk cache for the expensive pipeline stages, keyed by
// (dataset fingerprint, construction parameters). Files are little-endian
// binary with an 8-byte magic; layout documented in the README. A default
// constructed cache is disabled and all loads miss.
class StageCache {
public:
    StageCache() = default;
    explicit StageCache(std::string dir);

    bool enabled() const { return !dir_.empty(); }

    bool load_neighbors(uint64_t fp, int k, NeighborLists* out) const;
    void store_neighbors(uint64_t fp, int k, const NeighborLists& nl) const;

    bool load_graph(uint64_t fp, int k, double sigma, MarkovGraph* out) const;
    void store_graph(uint64_t fp, int k, double sigma, const MarkovGraph& g) const;

    bool load_model(uint64_t fp, int k, double sigma, int m_max, int fixed_m,
                    DiffusionModel* out) const;
    void store_model(uint64_t fp, int k, double sigma, int m_max, int fixed_m,
                     const DiffusionModel& dm) const;

private:
    std::string path_for(uint64_t fp, const std::string& tag) const;
    std::string dir_;
};

}  // namespace dgc
