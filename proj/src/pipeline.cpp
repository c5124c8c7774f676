#include "dgc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dgc {

namespace {

class StageTimer {
public:
    explicit StageTimer(std::map<std::string, double>* sink) : sink_(sink) {}
    template <typename F>
    auto time(const std::string& name, F&& f) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            record(name, start);
        } else {
            auto result = f();
            record(name, start);
            return result;
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point start) {
        const auto end = std::chrono::steady_clock::now();
        (*sink_)[name] = std::chrono::duration<double, std::milli>(end - start).count();
    }
    std::map<std::string, double>* sink_;
};

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::dl: return "dl";
        case Method::dlss: return "dlss";
        case Method::active: return "active";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "dl") return Method::dl;
    if (name == "dlss") return Method::dlss;
    if (name == "active") return Method::active;
    throw Error("unknown method: " + name + " (expected dl, dlss or active)");
}

LabelVector gt_vector(const Dataset& ds) {
    if (!ds.has_gt()) throw Error("dataset has no ground truth");
    LabelVector gt;
    gt.labels = ds.gt;
    gt.k = *std::max_element(ds.gt.begin(), ds.gt.end());
    if (gt.k < 1) throw Error("ground truth has no labeled pixels");
    return gt;
}

PipelineStages build_stages(const Dataset& ds, const RunConfig& cfg) {
    PipelineStages st;
    st.data = cfg.perturb_variance > 0 ? perturb_duplicates(ds, cfg.perturb_variance, cfg.seed)
                                       : ds;
    st.fingerprint = dataset_fingerprint(st.data);

    const StageCache cache =
        cfg.cache_dir.empty() ? StageCache() : StageCache(cfg.cache_dir);

    const int k_needed = std::max(cfg.k_graph, cfg.k_density);
    if (k_needed >= st.data.n())
        throw Error("neighbor count " + std::to_string(k_needed) + " requires N > k");

    StageTimer timer(&st.stage_ms);

    timer.time("knn", [&] {
        st.cache_hits["knn"] = cache.load_neighbors(st.fingerprint, k_needed, &st.nl);
        if (!st.cache_hits["knn"]) {
            st.nl = knn(st.data, k_needed);
            cache.store_neighbors(st.fingerprint, k_needed, st.nl);
        }
    });
    timer.time("graph", [&] {
        st.cache_hits["graph"] = cache.load_graph(st.fingerprint, cfg.k_graph, cfg.sigma_graph, &st.g);
        if (!st.cache_hits["graph"]) {
            // Graph edges use the k_graph strongest neighbors; the shared
            // index is built at max(k_graph, k_density) and sliced here.
            NeighborLists graph_nl;
            if (cfg.k_graph == k_needed) {
                graph_nl = st.nl;
            } else {
                graph_nl.k = cfg.k_graph;
                graph_nl.idx = st.nl.idx.leftCols(cfg.k_graph);
                graph_nl.dist = st.nl.dist.leftCols(cfg.k_graph);
            }
            st.g = build_graph(st.data, graph_nl, cfg.sigma_graph);
            cache.store_graph(st.fingerprint, cfg.k_graph, cfg.sigma_graph, st.g);
        }
    });
    timer.time("eigen", [&] {
        st.cache_hits["eigen"] = cache.load_model(st.fingerprint, cfg.k_graph, cfg.sigma_graph,
                                                  cfg.m_max, cfg.fixed_m, &st.dm);
        if (!st.cache_hits["eigen"]) {
            DecomposeOptions opts;
            opts.fixed_m = cfg.fixed_m;
            st.dm = decompose(st.g, std::min<int>(cfg.m_max, static_cast<int>(st.data.n())), opts);
            cache.store_model(st.fingerprint, cfg.k_graph, cfg.sigma_graph, cfg.m_max, cfg.fixed_m,
                              st.dm);
        }
    });
    timer.time("density", [&] {
        DensityOptions dopts;
        dopts.sigma1 = cfg.density_sigma;
        dopts.seed = cfg.seed;
        dopts.center = cfg.density_center;
        st.dp = estimate_density(st.data, st.nl, cfg.k_density, dopts);
    });
    return st;
}

RunResult run_on_stages(const PipelineStages& st, const RunConfig& cfg) {
    RunResult rr;
    StageTimer timer(&rr.stage_ms);

    const int initial_k = cfg.k_clusters > 0 ? cfg.k_clusters : 1;
    rr.ma = timer.time("modes", [&] { return analyze_modes(st.dm, st.dp, cfg.t, initial_k); });

    if (cfg.k_clusters <= 0) {
        rr.kest = estimate_k(rr.ma, cfg.search_limit);
        select_modes(&rr.ma, rr.kest->k_hat);
    }
    rr.k_used = rr.ma.k;

    timer.time("labeling", [&] {
        switch (cfg.method) {
            case Method::dl:
                rr.labeling = run_dl(rr.ma, st.dp);
                break;
            case Method::dlss: {
                const SpatialIndex si = build_spatial_index(st.data, cfg.r_s);
                rr.labeling = run_dlss(rr.ma, st.dp, si);
                break;
            }
            case Method::active: {
                const LabelVector gt = gt_vector(st.data);
                const SpatialIndex si = build_spatial_index(st.data, cfg.r_s);
                int budget = cfg.active_budget;
                if (budget == 0 && cfg.active_alpha > 0)
                    budget = static_cast<int>(
                        std::lround(cfg.active_alpha * static_cast<double>(st.data.n())));
                if (cfg.random_queries) {
                    rr.labeling = random_baseline(cfg.seed, budget, gt, rr.ma, st.dp, si);
                } else {
                    std::vector<uint8_t> eligible(st.data.gt.size());
                    for (std::size_t i = 0; i < eligible.size(); ++i)
                        eligible[i] = st.data.gt[i] != 0;
                    QueryPlan qp = plan_queries(st.dm, rr.ma, cfg.t, budget, &eligible);
                    rr.labeling = run_active(qp, gt, rr.ma, st.dp, si);
                    rr.plan = std::move(qp);
                }
                break;
            }
        }
    });

    if (st.data.has_gt()) {
        const LabelVector gt = gt_vector(st.data);
        rr.metrics = metrics(LabelVector{rr.labeling.labels, rr.labeling.k}, gt);
    }
    return rr;
}

RunResult run_pipeline(const Dataset& ds, const RunConfig& cfg) {
    const PipelineStages st = build_stages(ds, cfg);
    RunResult rr = run_on_stages(st, cfg);
    rr.stage_ms.insert(st.stage_ms.begin(), st.stage_ms.end());
    double total = 0.0;
    for (const auto& [name, ms] : rr.stage_ms) total += ms;
    rr.stage_ms["total"] = total;
    return rr;
}

Dataset crop_grid(const Dataset& ds, int row0, int row1, int col0, int col1) {
    if (!ds.has_grid()) throw Error("crop requires a gridded dataset");
    if (row0 >= row1 || col0 >= col1) throw Error("empty crop window");
    std::vector<Index> keep;
    for (Index i = 0; i < ds.n(); ++i) {
        const auto& g = ds.grid[static_cast<std::size_t>(i)];
        if (g.row >= row0 && g.row < row1 && g.col >= col0 && g.col < col1)
            keep.push_back(i);
    }
    if (keep.empty()) throw Error("crop window contains no pixels");

    Dataset out;
    out.name = ds.name + "_crop";
    out.grid_rows = row1 - row0;
    out.grid_cols = col1 - col0;
    out.points.resize(static_cast<Index>(keep.size()), ds.dim());
    out.grid.resize(keep.size());
    if (ds.has_gt()) out.gt.resize(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        const Index i = keep[j];
        out.points.row(static_cast<Index>(j)) = ds.points.row(i);
        const auto& g = ds.grid[static_cast<std::size_t>(i)];
        out.grid[j] = {g.row - row0, g.col - col0};
        if (ds.has_gt()) out.gt[j] = ds.gt[static_cast<std::size_t>(i)];
    }
    return out;
}

namespace {

double patch_oa(const Dataset& patch, Method method, const RunConfig& base,
                std::vector<int32_t>* labels_out) {
    RunConfig cfg = base;
    cfg.method = method;
    cfg.cache_dir.clear();  // patches are small; skip cache churn

    // K per patch: the number of GT classes present.
    std::vector<char> present(static_cast<std::size_t>(gt_vector(patch).k) + 1, 0);
    int classes = 0;
    for (int32_t g : patch.gt) {
        if (g != 0 && !present[static_cast<std::size_t>(g)]) {
            present[static_cast<std::size_t>(g)] = 1;
            ++classes;
        }
    }
    cfg.k_clusters = std::max(1, classes);
    cfg.k_graph = std::min<int>(cfg.k_graph, static_cast<int>(patch.n()) - 1);
    cfg.k_density = std::min<int>(cfg.k_density, cfg.k_graph);
    cfg.m_max = std::min<int>(cfg.m_max, static_cast<int>(patch.n()));

    const RunResult rr = run_pipeline(patch, cfg);
    if (labels_out) *labels_out = rr.labeling.labels;
    if (!rr.metrics) throw Error("patch run produced no metrics");
    return rr.metrics->oa;
}

}  // namespace

PatchExperiment patch_experiment(const Dataset& ds, int grid_rows, int grid_cols, Method method_a,
                                 Method method_b, const RunConfig& cfg, double critical_value) {
    if (!ds.has_grid()) throw Error("patch experiment requires a gridded dataset");
    if (grid_rows < 1 || grid_cols < 1) throw Error("patch grid must be positive");

    PatchExperiment ex;
    const int rows = ds.grid_rows, cols = ds.grid_cols;
    const int rstep = rows / grid_rows, cstep = cols / grid_cols;
    if (rstep < 1 || cstep < 1) throw Error("patch grid is finer than the image");

    std::vector<double> oa_a, oa_b;
    for (int pr = 0; pr < grid_rows; ++pr) {
        for (int pc = 0; pc < grid_cols; ++pc) {
            PatchRun run;
            run.patch_row = pr;
            run.patch_col = pc;
            run.row0 = pr * rstep;
            run.row1 = pr + 1 == grid_rows ? rows : (pr + 1) * rstep;  // remainder to last
            run.col0 = pc * cstep;
            run.col1 = pc + 1 == grid_cols ? cols : (pc + 1) * cstep;
            Dataset patch = crop_grid(ds, run.row0, run.row1, run.col0, run.col1);
            const bool has_labels =
                patch.has_gt() && std::any_of(patch.gt.begin(), patch.gt.end(),
                                              [](int32_t g) { return g != 0; });
            if (!has_labels || patch.n() < 8) {
                ++ex.skipped;
                continue;
            }
            run.oa_a = patch_oa(patch, method_a, cfg, &run.labels_a);
            run.oa_b = patch_oa(patch, method_b, cfg, &run.labels_b);
            oa_a.push_back(run.oa_a);
            oa_b.push_back(run.oa_b);
            ex.patches.push_back(std::move(run));
        }
    }
    if (oa_a.size() < 2) throw Error("patch experiment needs at least two patches with ground truth");
    ex.stats = paired_patch_stats(oa_a, oa_b, critical_value);
    return ex;
}

}  // namespace dgc
