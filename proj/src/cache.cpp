#include "dgc/cache.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dgc {

namespace fs = std::filesystem;

namespace {

constexpr char kMagicNeighbors[8] = {'D', 'G', 'C', 'N', 'B', 'R', '0', '1'};
constexpr char kMagicGraph[8] = {'D', 'G', 'C', 'G', 'R', 'F', '0', '1'};
constexpr char kMagicModel[8] = {'D', 'G', 'C', 'E', 'I', 'G', '0', '1'};

void fnv_bytes(uint64_t* h, const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        *h ^= p[i];
        *h *= 0x100000001B3ull;
    }
}

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string& path) : out(path, std::ios::binary | std::ios::trunc) {
        if (!out) throw Error("cannot open cache file for writing: " + path);
    }
    void bytes(const void* data, std::size_t size) {
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    }
    template <typename T>
    void pod(const T& v) {
        bytes(&v, sizeof(T));
    }
};

struct Reader {
    std::ifstream in;
    bool ok = false;
    explicit Reader(const std::string& path) : in(path, std::ios::binary) { ok = in.good(); }
    bool bytes(void* data, std::size_t size) {
        in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
        return in.good();
    }
    template <typename T>
    bool pod(T* v) {
        return bytes(v, sizeof(T));
    }
    bool expect_magic(const char (&magic)[8]) {
        char got[8];
        return bytes(got, 8) && std::memcmp(got, magic, 8) == 0;
    }
};

std::string hex_bits(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    std::ostringstream os;
    os << std::hex << bits;
    return os.str();
}

}  // namespace

uint64_t dataset_fingerprint(const Dataset& ds) {
    uint64_t h = 0xCBF29CE484222325ull;
    const int64_t n = ds.n(), d = ds.dim();
    fnv_bytes(&h, &n, sizeof(n));
    fnv_bytes(&h, &d, sizeof(d));
    fnv_bytes(&h, ds.points.data(), static_cast<std::size_t>(n * d) * sizeof(double));
    if (ds.has_grid()) fnv_bytes(&h, ds.grid.data(), ds.grid.size() * sizeof(GridCoord));
    if (ds.has_gt()) fnv_bytes(&h, ds.gt.data(), ds.gt.size() * sizeof(int32_t));
    return h;
}

StageCache::StageCache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
}

std::string StageCache::path_for(uint64_t fp, const std::string& tag) const {
    std::ostringstream os;
    os << std::hex << fp;
    return (fs::path(dir_) / (os.str() + "." + tag)).string();
}

bool StageCache::load_neighbors(uint64_t fp, int k, NeighborLists* out) const {
    if (!enabled()) return false;
    Reader r(path_for(fp, "k" + std::to_string(k) + ".nn"));
    if (!r.ok || !r.expect_magic(kMagicNeighbors)) return false;
    int64_t n;
    int32_t kk;
    if (!r.pod(&n) || !r.pod(&kk) || kk != k) return false;
    out->k = k;
    out->idx.resize(n, k);
    out->dist.resize(n, k);
    return r.bytes(out->idx.data(), static_cast<std::size_t>(n * k) * 4) &&
           r.bytes(out->dist.data(), static_cast<std::size_t>(n * k) * 8);
}

void StageCache::store_neighbors(uint64_t fp, int k, const NeighborLists& nl) const {
    if (!enabled()) return;
    Writer w(path_for(fp, "k" + std::to_string(k) + ".nn"));
    w.bytes(kMagicNeighbors, 8);
    const int64_t n = nl.idx.rows();
    w.pod(n);
    w.pod(static_cast<int32_t>(k));
    w.bytes(nl.idx.data(), static_cast<std::size_t>(n * k) * 4);
    w.bytes(nl.dist.data(), static_cast<std::size_t>(n * k) * 8);
}

bool StageCache::load_graph(uint64_t fp, int k, double sigma, MarkovGraph* out) const {
    if (!enabled()) return false;
    Reader r(path_for(fp, "k" + std::to_string(k) + ".s" + hex_bits(sigma) + ".graph"));
    if (!r.ok || !r.expect_magic(kMagicGraph)) return false;
    int64_t n, nnz, nbridges;
    if (!r.pod(&n) || !r.pod(&nnz) || !r.pod(&nbridges)) return false;

    std::vector<int64_t> outer(static_cast<std::size_t>(n) + 1);
    std::vector<int32_t> inner(static_cast<std::size_t>(nnz));
    std::vector<double> values(static_cast<std::size_t>(nnz));
    if (!r.bytes(outer.data(), outer.size() * 8) || !r.bytes(inner.data(), inner.size() * 4) ||
        !r.bytes(values.data(), values.size() * 8))
        return false;
    out->bridges.resize(static_cast<std::size_t>(nbridges));
    if (nbridges > 0 && !r.bytes(out->bridges.data(), out->bridges.size() * 8)) return false;

    out->sigma = sigma;
    out->k = k;
    out->w.resize(n, n);
    out->w.reserve(nnz);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nnz));
    for (int64_t i = 0; i < n; ++i)
        for (int64_t p = outer[static_cast<std::size_t>(i)]; p < outer[static_cast<std::size_t>(i) + 1]; ++p)
            trips.emplace_back(static_cast<int>(i), inner[static_cast<std::size_t>(p)],
                               values[static_cast<std::size_t>(p)]);
    out->w.setFromTriplets(trips.begin(), trips.end());
    out->w.makeCompressed();

    out->deg.resize(n);
    for (int64_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (SparseRowMatrix::InnerIterator it(out->w, i); it; ++it) s += it.value();
        out->deg(i) = s;
    }
    out->p = out->w;
    for (int64_t i = 0; i < n; ++i) {
        const double inv = 1.0 / out->deg(i);
        for (SparseRowMatrix::InnerIterator it(out->p, i); it; ++it) it.valueRef() *= inv;
    }
    out->pi = out->deg / out->deg.sum();
    return true;
}

void StageCache::store_graph(uint64_t fp, int k, double sigma, const MarkovGraph& g) const {
    if (!enabled()) return;
    Writer w(path_for(fp, "k" + std::to_string(k) + ".s" + hex_bits(sigma) + ".graph"));
    w.bytes(kMagicGraph, 8);
    const int64_t n = g.w.rows();
    const int64_t nnz = g.w.nonZeros();
    const auto nbridges = static_cast<int64_t>(g.bridges.size());
    w.pod(n);
    w.pod(nnz);
    w.pod(nbridges);
    std::vector<int64_t> outer(static_cast<std::size_t>(n) + 1);
    for (int64_t i = 0; i <= n; ++i) outer[static_cast<std::size_t>(i)] = g.w.outerIndexPtr()[i];
    w.bytes(outer.data(), outer.size() * 8);
    w.bytes(g.w.innerIndexPtr(), static_cast<std::size_t>(nnz) * 4);
    w.bytes(g.w.valuePtr(), static_cast<std::size_t>(nnz) * 8);
    if (nbridges > 0) w.bytes(g.bridges.data(), g.bridges.size() * 8);
}

bool StageCache::load_model(uint64_t fp, int k, double sigma, int m_max, int fixed_m,
                            DiffusionModel* out) const {
    if (!enabled()) return false;
    Reader r(path_for(fp, "k" + std::to_string(k) + ".s" + hex_bits(sigma) + ".m" +
                              std::to_string(m_max) + "f" + std::to_string(fixed_m) + ".eig"));
    if (!r.ok || !r.expect_magic(kMagicModel)) return false;
    int64_t n, m;
    if (!r.pod(&n) || !r.pod(&m)) return false;
    out->lambdas.resize(m);
    out->phis.resize(n, m);
    return r.bytes(out->lambdas.data(), static_cast<std::size_t>(m) * 8) &&
           r.bytes(out->phis.data(), static_cast<std::size_t>(n * m) * 8);
}

void StageCache::store_model(uint64_t fp, int k, double sigma, int m_max, int fixed_m,
                             const DiffusionModel& dm) const {
    if (!enabled()) return;
    Writer w(path_for(fp, "k" + std::to_string(k) + ".s" + hex_bits(sigma) + ".m" +
                              std::to_string(m_max) + "f" + std::to_string(fixed_m) + ".eig"));
    w.bytes(kMagicModel, 8);
    w.pod(static_cast<int64_t>(dm.n()));
    w.pod(static_cast<int64_t>(dm.m()));
    w.bytes(dm.lambdas.data(), static_cast<std::size_t>(dm.m()) * 8);
    w.bytes(dm.phis.data(), static_cast<std::size_t>(dm.n() * dm.m()) * 8);
}

}  // namespace dgc
