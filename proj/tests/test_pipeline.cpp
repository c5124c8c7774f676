#include <doctest.h>

#include <chrono>
#include <filesystem>

#include "dgc/parallel.hpp"
#include "dgc/pipeline.hpp"
#include "dgc/synth.hpp"

using namespace dgc;
namespace fs = std::filesystem;

namespace {

RunConfig strip_config() {
    RunConfig cfg;
    cfg.k_graph = 10;
    cfg.k_density = 8;
    cfg.sigma_graph = 4.0;
    cfg.m_max = 12;
    cfg.t = 8.0;
    cfg.r_s = 2.0;
    cfg.k_clusters = 3;
    return cfg;
}

}  // namespace

TEST_CASE("full pipeline clusters a clean strip image almost perfectly") {
    const Dataset ds = generate_strip_image(10, 15, 3, 5, 8.0, 0.3, 4);
    const RunResult rr = run_pipeline(ds, strip_config());
    REQUIRE(rr.metrics.has_value());
    CHECK(rr.metrics->oa >= 0.95);
    CHECK(rr.k_used == 3);
    CHECK(rr.stage_ms.count("knn") == 1);
    CHECK(rr.stage_ms.count("labeling") == 1);
}

TEST_CASE("estimated K matches the planted cluster count on strips") {
    const Dataset ds = generate_strip_image(10, 15, 3, 5, 8.0, 0.3, 4);
    RunConfig cfg = strip_config();
    cfg.k_clusters = 0;  // estimate
    const RunResult rr = run_pipeline(ds, cfg);
    REQUIRE(rr.kest.has_value());
    CHECK(rr.kest->k_hat == 3);
    CHECK(rr.k_used == 3);
}

TEST_CASE("dl works without a grid; dlss demands one") {
    const Dataset ds = generate_blobs(2, 80, 4, 10.0, 3);
    RunConfig cfg = strip_config();
    cfg.k_clusters = 2;
    cfg.sigma_graph = 3.0;
    cfg.method = Method::dl;
    const RunResult rr = run_pipeline(ds, cfg);
    CHECK(rr.metrics->oa == 1.0);

    cfg.method = Method::dlss;
    CHECK_THROWS_WITH_AS(run_pipeline(ds, cfg), doctest::Contains("grid"), Error);
}

TEST_CASE("separable blobs reach OA 1 with DL after alignment") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const Dataset ds = generate_blobs(2, 60, 3, 10.0, seed);
        RunConfig cfg = strip_config();
        cfg.method = Method::dl;
        cfg.k_clusters = 2;
        cfg.sigma_graph = 3.0;
        const RunResult rr = run_pipeline(ds, cfg);
        CHECK(rr.metrics->oa == 1.0);
    }
}

TEST_CASE("pipeline output is byte-identical across runs and worker counts") {
    const Dataset ds = generate_strip_image(9, 12, 3, 4, 7.0, 0.3, 6);
    const RunConfig cfg = strip_config();

    const int before = num_threads();
    set_num_threads(1);
    const RunResult one = run_pipeline(ds, cfg);
    set_num_threads(4);
    const RunResult four = run_pipeline(ds, cfg);
    set_num_threads(before);

    CHECK(one.labeling.labels == four.labeling.labels);
    CHECK(one.labeling.provenance == four.labeling.provenance);
    CHECK(one.ma.modes == four.ma.modes);
}

TEST_CASE("the stage cache round-trips and reproduces results") {
    const Dataset ds = generate_strip_image(8, 12, 2, 4, 7.0, 0.3, 8);
    RunConfig cfg = strip_config();
    cfg.k_clusters = 2;
    const auto dir = fs::temp_directory_path() / "dgc_cache_test";
    fs::remove_all(dir);
    cfg.cache_dir = dir.string();

    const RunResult cold = run_pipeline(ds, cfg);
    const PipelineStages warm_stages = build_stages(ds, cfg);
    CHECK(warm_stages.cache_hits.at("knn"));
    CHECK(warm_stages.cache_hits.at("graph"));
    CHECK(warm_stages.cache_hits.at("eigen"));
    const RunResult warm = run_on_stages(warm_stages, cfg);
    CHECK(warm.labeling.labels == cold.labeling.labels);
    fs::remove_all(dir);
}

TEST_CASE("crop_grid extracts a consistent window") {
    const Dataset ds = generate_strip_image(10, 10, 2, 3, 6.0, 0.2, 5);
    const Dataset patch = crop_grid(ds, 2, 6, 3, 9);
    CHECK(patch.n() == 24);
    CHECK(patch.grid_rows == 4);
    CHECK(patch.grid_cols == 6);
    for (const auto& g : patch.grid) {
        CHECK(g.row < 4);
        CHECK(g.col < 6);
    }
}

TEST_CASE("patch experiment: 1x1 grid equals the whole-image run") {
    const Dataset ds = generate_strip_image(10, 16, 2, 4, 7.0, 0.3, 9);
    RunConfig cfg = strip_config();
    cfg.k_clusters = 2;
    const PatchExperiment ex1 =
        patch_experiment(ds, 1, 2, Method::dlss, Method::dl, cfg);
    CHECK(ex1.patches.size() == 2);
    CHECK(ex1.stats.df == 1);

    // A self-comparison over any grid is degenerate.
    const PatchExperiment self = patch_experiment(ds, 2, 2, Method::dl, Method::dl, cfg);
    CHECK(self.stats.degenerate);
}

TEST_CASE("graph construction scales near-linearly on blob data") {
    // Doubling N at fixed k and D should not double per-point work. The
    // contract allows generous slack to absorb machine noise.
    RunConfig cfg = strip_config();
    cfg.k_clusters = 2;
    const Dataset small = generate_blobs(4, 1500, 8, 20.0, 11);
    const Dataset large = generate_blobs(4, 3000, 8, 20.0, 11);

    auto time_knn = [&](const Dataset& d) {
        const auto start = std::chrono::steady_clock::now();
        const NeighborLists nl = knn(d, 10);
        const auto end = std::chrono::steady_clock::now();
        return std::chrono::duration<double>(end - start).count() + nl.dist(0, 0) * 0.0;
    };
    time_knn(small);  // warm-up
    const double t_small = time_knn(small);
    const double t_large = time_knn(large);
    CHECK(t_large / t_small <= 3.5);
}
