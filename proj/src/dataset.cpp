#include "dgc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dgc/rng.hpp"

namespace dgc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(size);
    if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
    if (!in) throw Error("failed reading file: " + path);
    return buf;
}

void write_file(const std::string& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw Error("failed writing file: " + path);
}

std::string resolve(const std::string& header_path, const std::string& rel) {
    fs::path p(rel);
    if (p.is_absolute()) return rel;
    return (fs::path(header_path).parent_path() / p).string();
}

}  // namespace

void Dataset::validate() const {
    if (points.rows() < 1 || points.cols() < 1) throw Error("dataset must have N >= 1, D >= 1");
    if (!points.allFinite()) throw Error("dataset contains non-finite values");
    if (has_grid()) {
        if (static_cast<Index>(grid.size()) != n())
            throw Error("grid size does not match point count");
        std::set<std::pair<int32_t, int32_t>> seen;
        for (const auto& g : grid) {
            if (g.row < 0 || g.col < 0) throw Error("negative grid coordinate");
            if (!seen.insert({g.row, g.col}).second) throw Error("duplicate grid coordinate");
        }
    }
    if (has_gt()) {
        if (static_cast<Index>(gt.size()) != n()) throw Error("gt size does not match point count");
        for (int32_t v : gt) {
            if (v < 0) throw Error("negative gt label");
        }
    }
}

Dataset load_cube(const std::string& header_path) {
    json hdr;
    {
        std::ifstream in(header_path);
        if (!in) throw Error("cannot open cube header: " + header_path);
        try {
            in >> hdr;
        } catch (const json::exception& e) {
            throw Error("invalid cube header " + header_path + ": " + e.what());
        }
    }
    for (const char* field : {"rows", "cols", "bands", "dtype", "order", "data_path"}) {
        if (!hdr.contains(field)) throw Error(std::string("cube header missing field: ") + field);
    }
    const auto rows = hdr["rows"].get<int64_t>();
    const auto cols = hdr["cols"].get<int64_t>();
    const auto bands = hdr["bands"].get<int64_t>();
    if (rows < 1 || cols < 1 || bands < 1) throw Error("cube header has non-positive dimensions");
    const std::string dtype = hdr["dtype"].get<std::string>();
    const std::string order = hdr["order"].get<std::string>();
    if (dtype != "f32" && dtype != "f64") throw Error("cube dtype must be f32 or f64");
    if (order != "bip" && order != "bsq") throw Error("cube order must be bip or bsq");

    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    const std::size_t count = n * static_cast<std::size_t>(bands);
    const std::size_t elem = dtype == "f32" ? 4 : 8;

    const auto payload = read_file(resolve(header_path, hdr["data_path"].get<std::string>()));
    if (payload.size() != count * elem) {
        throw Error("cube payload size mismatch: header implies " + std::to_string(count * elem) +
                    " bytes, file has " + std::to_string(payload.size()));
    }

    Dataset ds;
    ds.name = hdr.value("name", fs::path(header_path).stem().string());
    ds.grid_rows = static_cast<int32_t>(rows);
    ds.grid_cols = static_cast<int32_t>(cols);
    ds.points.resize(static_cast<Index>(n), static_cast<Index>(bands));

    auto value_at = [&](std::size_t flat) -> double {
        if (elem == 4) {
            float f;
            std::memcpy(&f, payload.data() + flat * 4, 4);
            return static_cast<double>(f);
        }
        double d;
        std::memcpy(&d, payload.data() + flat * 8, 8);
        return d;
    };
    for (std::size_t pix = 0; pix < n; ++pix) {
        for (std::size_t b = 0; b < static_cast<std::size_t>(bands); ++b) {
            const std::size_t flat =
                (order == "bip") ? pix * static_cast<std::size_t>(bands) + b : b * n + pix;
            ds.points(static_cast<Index>(pix), static_cast<Index>(b)) = value_at(flat);
        }
    }

    ds.grid.resize(n);
    for (std::size_t pix = 0; pix < n; ++pix) {
        ds.grid[pix] = {static_cast<int32_t>(pix / static_cast<std::size_t>(cols)),
                        static_cast<int32_t>(pix % static_cast<std::size_t>(cols))};
    }

    if (hdr.contains("gt_path")) {
        const auto raw = read_file(resolve(header_path, hdr["gt_path"].get<std::string>()));
        if (raw.size() != n * 4)
            throw Error("gt raster size mismatch: expected " + std::to_string(n * 4) +
                        " bytes, file has " + std::to_string(raw.size()));
        ds.gt.resize(n);
        std::memcpy(ds.gt.data(), raw.data(), raw.size());
    }

    ds.validate();
    return ds;
}

std::vector<unsigned char> cube_payload(const Dataset& ds, CubeDtype dtype, CubeOrder order) {
    if (!ds.has_grid()) throw Error("cube_payload requires a gridded dataset");
    const std::size_t n = static_cast<std::size_t>(ds.n());
    const std::size_t bands = static_cast<std::size_t>(ds.dim());
    const std::size_t elem = dtype == CubeDtype::f32 ? 4 : 8;
    std::vector<unsigned char> payload(n * bands * elem);
    for (std::size_t pix = 0; pix < n; ++pix) {
        for (std::size_t b = 0; b < bands; ++b) {
            const std::size_t flat = (order == CubeOrder::bip) ? pix * bands + b : b * n + pix;
            const double v = ds.points(static_cast<Index>(pix), static_cast<Index>(b));
            if (dtype == CubeDtype::f32) {
                const float f = static_cast<float>(v);
                std::memcpy(payload.data() + flat * 4, &f, 4);
            } else {
                std::memcpy(payload.data() + flat * 8, &v, 8);
            }
        }
    }
    return payload;
}

void save_cube(const Dataset& ds, const std::string& header_path, CubeDtype dtype,
               CubeOrder order) {
    if (!ds.has_grid()) throw Error("save_cube requires a gridded dataset");
    if (ds.grid_rows < 1 || ds.grid_cols < 1 ||
        static_cast<std::size_t>(ds.grid_rows) * static_cast<std::size_t>(ds.grid_cols) !=
            static_cast<std::size_t>(ds.n()))
        throw Error("save_cube requires grid_rows * grid_cols == N");

    const fs::path header(header_path);
    const std::string stem = header.stem().string();
    const fs::path dir = header.parent_path();
    const std::string data_name = stem + ".raw";
    const std::string gt_name = stem + "_gt.i32";

    const auto payload = cube_payload(ds, dtype, order);
    write_file((dir / data_name).string(), payload.data(), payload.size());

    json hdr = {
        {"rows", ds.grid_rows},
        {"cols", ds.grid_cols},
        {"bands", ds.dim()},
        {"dtype", dtype == CubeDtype::f32 ? "f32" : "f64"},
        {"order", order == CubeOrder::bip ? "bip" : "bsq"},
        {"data_path", data_name},
        {"name", ds.name},
    };
    if (ds.has_gt()) {
        write_file((dir / gt_name).string(), ds.gt.data(), ds.gt.size() * 4);
        hdr["gt_path"] = gt_name;
    }
    std::ofstream out(header_path, std::ios::trunc);
    if (!out) throw Error("cannot open cube header for writing: " + header_path);
    out << hdr.dump(2) << "\n";
}

namespace {

bool parse_double(const std::string& cell, double* out) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') return false;
    *out = v;
    return true;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::optional<std::string>& gt_column) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open csv: " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw Error("csv is empty: " + path);

    // A first line with any non-numeric cell is a header row.
    bool has_header = false;
    for (const auto& cell : rows.front()) {
        double v;
        if (!parse_double(cell, &v)) {
            has_header = true;
            break;
        }
    }
    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (has_header) {
        header = rows.front();
        first_data = 1;
        if (rows.size() == 1) throw Error("csv has a header but no data rows: " + path);
    }

    const std::size_t width = rows[first_data].size();
    Index gt_idx = -1;
    if (gt_column) {
        if (!has_header) throw Error("gt column requested but csv has no header row");
        const auto it = std::find(header.begin(), header.end(), *gt_column);
        if (it == header.end()) throw Error("gt column not found in csv header: " + *gt_column);
        gt_idx = static_cast<Index>(it - header.begin());
    }
    const std::size_t dim = gt_idx >= 0 ? width - 1 : width;
    if (dim < 1) throw Error("csv has no feature columns");

    Dataset ds;
    ds.name = fs::path(path).stem().string();
    const std::size_t n = rows.size() - first_data;
    ds.points.resize(static_cast<Index>(n), static_cast<Index>(dim));
    if (gt_idx >= 0) ds.gt.resize(n);

    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != width)
            throw Error("ragged csv row " + std::to_string(r + 1) + " in " + path);
        Index col = 0;
        for (std::size_t c = 0; c < width; ++c) {
            double v;
            if (!parse_double(cells[c], &v))
                throw Error("non-numeric csv cell '" + cells[c] + "' at row " +
                            std::to_string(r + 1));
            if (static_cast<Index>(c) == gt_idx) {
                ds.gt[r - first_data] = static_cast<int32_t>(std::llround(v));
            } else {
                ds.points(static_cast<Index>(r - first_data), col++) = v;
            }
        }
    }
    ds.validate();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path, bool include_gt) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open csv for writing: " + path);
    out.precision(17);
    for (Index c = 0; c < ds.dim(); ++c) out << "x" << c << ",";
    out << (include_gt && ds.has_gt() ? "gt" : "ignored") << "\n";
    for (Index r = 0; r < ds.n(); ++r) {
        for (Index c = 0; c < ds.dim(); ++c) out << ds.points(r, c) << ",";
        if (include_gt && ds.has_gt())
            out << ds.gt[static_cast<std::size_t>(r)] << "\n";
        else
            out << 0 << "\n";
    }
}

Dataset perturb_duplicates(const Dataset& ds, double variance, uint64_t seed) {
    if (!(variance > 0)) throw Error("perturbation variance must be positive");
    Dataset out = ds;
    Rng rng(seed);
    const double stddev = std::sqrt(variance);
    for (Index r = 0; r < out.points.rows(); ++r)
        for (Index c = 0; c < out.points.cols(); ++c) out.points(r, c) += rng.normal(0.0, stddev);
    return out;
}

void save_raster(const std::string& path, const std::vector<int32_t>& values) {
    write_file(path, values.data(), values.size() * 4);
}

std::vector<int32_t> load_raster(const std::string& path, std::size_t expected_count) {
    const auto raw = read_file(path);
    if (raw.size() != expected_count * 4)
        throw Error("raster size mismatch: expected " + std::to_string(expected_count * 4) +
                    " bytes, file has " + std::to_string(raw.size()));
    std::vector<int32_t> values(expected_count);
    std::memcpy(values.data(), raw.data(), raw.size());
    return values;
}

}  // namespace dgc
