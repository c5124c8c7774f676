#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgc/common.hpp"

namespace dgc {

struct GridCoord {
    int32_t row = 0;
    int32_t col = 0;
};

// A point cloud or flattened image cube. Immutable after construction by
// convention; safe to share across threads.
struct Dataset {
    RowMatrixXd points;            // N x D
    std::vector<GridCoord> grid;   // empty when the data has no pixel layout
    std::vector<int32_t> gt;       // empty when no ground truth; 0 = unlabeled
    std::string name;
    int32_t grid_rows = 0;         // set when loaded from / written as a cube
    int32_t grid_cols = 0;

    Index n() const { return points.rows(); }
    Index dim() const { return points.cols(); }
    bool has_grid() const { return !grid.empty(); }
    bool has_gt() const { return !gt.empty(); }

    // Throws Error on any structural invariant violation (empty data,
    // non-finite entries, duplicate or negative grid coordinates,
    // out-of-range gt values).
    void validate() const;
};

struct LabelVector {
    std::vector<int32_t> labels;  // values in {0..k}
    int32_t k = 0;
};

enum class CubeDtype { f32, f64 };
enum class CubeOrder { bip, bsq };  // band-interleaved-by-pixel / band-sequential

// JSON sidecar header naming a raw binary payload:
//   {rows, cols, bands, dtype:"f32"|"f64", order:"bip"|"bsq", data_path, gt_path?}
// gt rasters are int32, row-major, rows x cols. Relative paths resolve
// against the header's directory.
Dataset load_cube(const std::string& header_path);
void save_cube(const Dataset& ds, const std::string& header_path,
               CubeDtype dtype = CubeDtype::f64, CubeOrder order = CubeOrder::bip);

// Flattens a gridded dataset back into the raw payload bytes; the inverse of
// the load_cube payload read.
std::vector<unsigned char> cube_payload(const Dataset& ds, CubeDtype dtype, CubeOrder order);

// Rectangular numeric CSV, one point per row, optional header row. When
// gt_column names a header column it is stripped into gt.
Dataset load_csv(const std::string& path, const std::optional<std::string>& gt_column = {});
void save_csv(const Dataset& ds, const std::string& path, bool include_gt = false);

// Adds i.i.d. zero-mean Gaussian noise of the given variance to every
// coordinate; deterministic per seed.
Dataset perturb_duplicates(const Dataset& ds, double variance, uint64_t seed);

// int32 row-major raster I/O (labels, provenance).
void save_raster(const std::string& path, const std::vector<int32_t>& values);
std::vector<int32_t> load_raster(const std::string& path, std::size_t expected_count);

}  // namespace dgc
