#include <doctest.h>

#include <algorithm>
#include <map>

#include "dgc/labeling.hpp"
#include "dgc/pipeline.hpp"
#include "dgc/synth.hpp"

using namespace dgc;

namespace {

// A tiny dataset on a 1 x n grid so spatial neighborhoods are easy to pin.
Dataset strip_dataset(int n) {
    Dataset ds;
    ds.points.resize(n, 1);
    for (Index i = 0; i < n; ++i) ds.points(i, 0) = static_cast<double>(i);
    ds.grid_rows = 1;
    ds.grid_cols = n;
    for (int i = 0; i < n; ++i) ds.grid.push_back({0, i});
    return ds;
}

}  // namespace

TEST_CASE("consensus follows the strict-majority rule") {
    const Dataset ds = strip_dataset(5);
    SpatialIndex si;
    si.radius = 4;
    si.neighbors.resize(5);
    si.neighbors[0] = {1, 2, 3, 4};

    SUBCASE("3 of 4 neighbors agree") {
        const std::vector<int32_t> labels{0, 2, 2, 2, 1};
        CHECK(consensus(si, labels, 0) == 2);
    }
    SUBCASE("a 2-2 split has no strict majority") {
        const std::vector<int32_t> labels{0, 1, 1, 2, 2};
        CHECK(consensus(si, labels, 0) == 0);
    }
    SUBCASE("an unlabeled majority blocks consensus") {
        si.neighbors[0] = {1, 2, 3, 4};
        std::vector<int32_t> labels{0, 0, 0, 1, 1};
        // Neighbors {0,0,1,1}: label 1 holds 2 of 4, not a strict majority.
        CHECK(consensus(si, labels, 0) == 0);
    }
    SUBCASE("empty neighborhoods never reach consensus") {
        si.neighbors[0] = {};
        const std::vector<int32_t> labels{0, 1, 1, 1, 1};
        CHECK(consensus(si, labels, 0) == 0);
    }
}

TEST_CASE("unlabeled-majority example from a 5-neighbor disc") {
    const Dataset ds = strip_dataset(6);
    SpatialIndex si;
    si.neighbors.resize(6);
    si.neighbors[0] = {1, 2, 3, 4, 5};
    const std::vector<int32_t> labels{0, 0, 0, 0, 1, 1};
    CHECK(consensus(si, labels, 0) == 0);
}

namespace {

struct LabelFixture {
    PipelineStages st;
    ModeAnalysis ma;
    SpatialIndex si;
};

LabelFixture strip_fixture(int k, uint64_t seed = 3, double r_s = 2.0) {
    RunConfig cfg;
    cfg.k_graph = 8;
    cfg.k_density = 6;
    cfg.sigma_graph = 4.0;
    cfg.m_max = 10;
    cfg.t = 8.0;
    LabelFixture f;
    f.st = build_stages(generate_strip_image(8, 12, k, 4, 6.0, 0.3, seed), cfg);
    f.ma = analyze_modes(f.st.dm, f.st.dp, cfg.t, k);
    f.si = build_spatial_index(f.st.data, r_s);
    return f;
}

}  // namespace

TEST_CASE("K=1 labels every point with the single mode's label") {
    LabelFixture f = strip_fixture(1);
    const Labeling dl = run_dl(f.ma, f.st.dp);
    const Labeling dlss = run_dlss(f.ma, f.st.dp, f.si);
    for (int32_t l : dl.labels) CHECK(l == 1);
    for (int32_t l : dlss.labels) CHECK(l == 1);
}

TEST_CASE("both sweeps label everything in 1..K") {
    LabelFixture f = strip_fixture(3);
    for (const Labeling& out : {run_dl(f.ma, f.st.dp), run_dlss(f.ma, f.st.dp, f.si)}) {
        CHECK(out.k == 3);
        for (int32_t l : out.labels) {
            CHECK(l >= 1);
            CHECK(l <= 3);
        }
    }
}

TEST_CASE("exactly K mode-tagged points, none in stage logs") {
    LabelFixture f = strip_fixture(3);
    const Labeling out = run_dlss(f.ma, f.st.dp, f.si);
    int mode_count = 0;
    for (Provenance p : out.provenance)
        if (p == Provenance::mode) ++mode_count;
    CHECK(mode_count == 3);
}

TEST_CASE("stage-1 safety: consensus at assignment matched or abstained") {
    LabelFixture f = strip_fixture(3);
    const Labeling out = run_dlss(f.ma, f.st.dp, f.si);
    for (const Stage1Event& ev : out.stage1_log) {
        CHECK((ev.consensus == 0 || ev.consensus == ev.label));
    }
    CHECK(out.stage1_unlabeled >= 0);
}

TEST_CASE("r_s = 0 reduces the two-stage sweep to the spectral one") {
    LabelFixture f = strip_fixture(3, 5, 0.0);
    const Labeling dl = run_dl(f.ma, f.st.dp);
    const Labeling dlss = run_dlss(f.ma, f.st.dp, f.si);
    CHECK(dl.labels == dlss.labels);
}

TEST_CASE("single chain: everything inherits the mode label") {
    ModeAnalysis ma;
    ma.score.resize(3);
    ma.score << 3.0, 2.0, 1.0;
    ma.parent = {-1, 0, 1};
    ma.modes = {0};
    ma.k = 1;
    ma.coords.resize(3, 1);
    ma.coords << 0.0, 1.0, 2.0;
    DensityProfile dp;
    dp.p.resize(3);
    dp.p << 0.5, 0.3, 0.2;
    dp.order = {0, 1, 2};
    dp.rank = {0, 1, 2};
    const Labeling out = run_dl(ma, dp);
    CHECK(out.labels == std::vector<int32_t>{1, 1, 1});
    CHECK(out.provenance[0] == Provenance::mode);
    CHECK(out.provenance[2] == Provenance::stage1_spectral);
}

TEST_CASE("relabeling equivariance of the spectral sweep") {
    LabelFixture f = strip_fixture(3);
    const Labeling base = run_dl(f.ma, f.st.dp);

    // Swap the first two modes; output labels must swap identically.
    ModeAnalysis swapped = f.ma;
    std::swap(swapped.modes[0], swapped.modes[1]);
    const Labeling alt = run_dl(swapped, f.st.dp);
    std::map<int32_t, int32_t> expect{{1, 2}, {2, 1}, {3, 3}};
    for (std::size_t i = 0; i < base.labels.size(); ++i)
        CHECK(alt.labels[i] == expect[base.labels[i]]);
}

TEST_CASE("seeds keep their labels and can extend K") {
    LabelFixture f = strip_fixture(2);
    const SeedList seeds{{5, 4}};
    const Labeling out = run_dlss(f.ma, f.st.dp, f.si, seeds);
    CHECK(out.labels[5] == 4);
    CHECK(out.provenance[5] == Provenance::queried);
    CHECK(out.k == 4);
}

TEST_CASE("stage-2 consensus relabeling happens near boundaries") {
    // On a clean strip image the two-stage output still labels everything;
    // points filled by stage 2 must carry stage-2 provenance.
    LabelFixture f = strip_fixture(3);
    const Labeling out = run_dlss(f.ma, f.st.dp, f.si);
    int stage2 = 0;
    for (Provenance p : out.provenance)
        if (p == Provenance::stage2_consensus || p == Provenance::stage2_spectral) ++stage2;
    CHECK(stage2 == out.stage1_unlabeled);
}

TEST_CASE("dlss requires a grid") {
    Dataset ds = generate_blobs(2, 30, 2, 8.0, 1);
    CHECK_THROWS_WITH_AS(build_spatial_index(ds, 2.0), doctest::Contains("grid"), Error);
}
