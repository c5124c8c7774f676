// Command-line front end for the diffusion-geometry clustering library.
//
// Subcommands: cluster, sweep, patches, synth, estimate-k, eval. All outputs
// land under --out-dir with a manifest; failures print a machine-readable
// error JSON and exit nonzero.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dgc/parallel.hpp"
#include "dgc/pipeline.hpp"
#include "dgc/synth.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
    dgc::RunConfig cfg;
    std::string method = "dlss";
    std::string gt_column;
    std::string out_dir = "dgc_out";
    bool estimate = false;
    int threads = 0;
};

dgc::Dataset load_dataset(const CliOptions& opt) {
    const std::string& path = opt.cfg.dataset_path;
    if (path.empty()) throw dgc::Error("no dataset given (--dataset)");
    dgc::Dataset ds;
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        ds = opt.gt_column.empty() ? dgc::load_csv(path)
                                   : dgc::load_csv(path, opt.gt_column);
    } else {
        ds = dgc::load_cube(path);
    }
    return ds;
}

json timings_json(const std::map<std::string, double>& ms) {
    json j = json::object();
    for (const auto& [name, value] : ms) j[name] = value;
    return j;
}

json metrics_json(const dgc::MetricsReport& rep) {
    json confusion = json::array();
    for (Eigen::Index r = 0; r < rep.confusion.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < rep.confusion.cols(); ++c) row.push_back(rep.confusion(r, c));
        confusion.push_back(row);
    }
    return json{{"oa", rep.oa},
                {"aa", rep.aa},
                {"kappa", rep.kappa},
                {"confusion", confusion},
                {"permutation", rep.permutation},
                {"unmatched", rep.unmatched},
                {"empty_gt_classes", rep.empty_gt_classes}};
}

json params_json(const dgc::RunConfig& cfg) {
    return json{{"k_graph", cfg.k_graph},
                {"sigma_graph", cfg.sigma_graph},
                {"k_density", cfg.k_density},
                {"t", cfg.t},
                {"r_s", cfg.r_s},
                {"k", cfg.k_clusters},
                {"m_max", cfg.m_max},
                {"fixed_m", cfg.fixed_m},
                {"seed", cfg.seed},
                {"perturb_variance", cfg.perturb_variance},
                {"active_budget", cfg.active_budget},
                {"active_alpha", cfg.active_alpha},
                {"random_queries", cfg.random_queries}};
}

void write_json(const fs::path& path, const json& j, std::vector<std::string>* manifest) {
    std::ofstream out(path);
    if (!out) throw dgc::Error("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (manifest) manifest->push_back(path.filename().string());
}

void write_manifest(const fs::path& dir, std::vector<std::string> files) {
    files.push_back("manifest.json");
    write_json(dir / "manifest.json", json{{"files", files}}, nullptr);
}

json run_report(const dgc::Dataset& ds, const dgc::RunConfig& cfg, const dgc::RunResult& rr) {
    json report{{"dataset", ds.name},
                {"n", ds.n()},
                {"d", ds.dim()},
                {"method", dgc::method_name(cfg.method)},
                {"params", params_json(cfg)},
                {"k", rr.k_used},
                {"modes", rr.ma.modes},
                {"stage1_unlabeled", rr.labeling.stage1_unlabeled},
                {"runtime_ms", timings_json(rr.stage_ms)}};
    if (rr.kest) {
        report["estimated_k"] = {
            {"k_hat", rr.kest->k_hat},
            {"method",
             rr.kest->method == dgc::KEstimate::Method::first_order ? "first-order"
                                                                    : "second-order"}};
    }
    if (rr.plan) {
        report["queries"] = rr.plan->queries;
        report["active_alpha"] = rr.plan->alpha;
    }
    if (rr.metrics) report["metrics"] = metrics_json(*rr.metrics);

    // Prefix of the sorted score curve, enough to read off the kink.
    const Eigen::Index n_curve = std::min<Eigen::Index>(50, rr.ma.score.size());
    std::vector<double> curve(rr.ma.score.data(), rr.ma.score.data() + rr.ma.score.size());
    std::sort(curve.begin(), curve.end(), std::greater<double>());
    curve.resize(static_cast<std::size_t>(n_curve));
    report["score_curve"] = curve;
    return report;
}

void write_label_outputs(const fs::path& dir, const dgc::Labeling& lab,
                         std::vector<std::string>* manifest) {
    dgc::save_raster((dir / "labels.bin").string(), lab.labels);
    manifest->push_back("labels.bin");
    std::vector<int32_t> prov(lab.provenance.size());
    for (std::size_t i = 0; i < prov.size(); ++i) prov[i] = static_cast<int32_t>(lab.provenance[i]);
    dgc::save_raster((dir / "provenance.bin").string(), prov);
    manifest->push_back("provenance.bin");
}

void apply_common(CLI::App* sub, CliOptions* opt) {
    sub->add_option("--dataset", opt->cfg.dataset_path, "cube header (.json) or .csv");
    sub->add_option("--gt-column", opt->gt_column, "gt column name for csv datasets");
    sub->add_option("--method", opt->method, "dl | dlss | active");
    sub->add_option("--k", opt->cfg.k_clusters, "cluster count (0 = estimate)");
    sub->add_flag("--estimate-k", opt->estimate, "estimate the cluster count");
    sub->add_option("--graph-k", opt->cfg.k_graph, "graph neighbor count");
    sub->add_option("--sigma", opt->cfg.sigma_graph, "graph kernel bandwidth");
    sub->add_option("--density-k", opt->cfg.k_density, "density neighbor count");
    sub->add_option("--density-sigma",
                    [opt](const std::vector<std::string>& vals) {
                        opt->cfg.density_sigma = std::stod(vals.front());
                        return true;
                    },
                    "density bandwidth override");
    sub->add_option("--time", opt->cfg.t, "diffusion time");
    sub->add_option("--spatial-radius", opt->cfg.r_s, "consensus radius in pixels");
    sub->add_option("--embed-dim", opt->cfg.fixed_m, "fixed truncation order");
    sub->add_option("--max-eigs", opt->cfg.m_max, "eigenpair budget");
    sub->add_option("--seed", opt->cfg.seed, "rng seed");
    sub->add_option("--perturb-variance", opt->cfg.perturb_variance,
                    "pre-noise variance for duplicate points");
    sub->add_option("--active-budget", opt->cfg.active_budget, "query count");
    sub->add_option("--active-alpha", opt->cfg.active_alpha, "query fraction of N");
    sub->add_flag("--random-queries", opt->cfg.random_queries, "random query baseline");
    sub->add_option("--cache-dir", opt->cfg.cache_dir, "stage cache directory");
    sub->add_option("--out-dir", opt->out_dir, "output directory");
    sub->add_option("--threads", opt->threads, "worker threads (0 = auto)");
}

void finish_options(CliOptions* opt) {
    opt->cfg.method = dgc::parse_method(opt->method);
    if (opt->estimate) opt->cfg.k_clusters = 0;
    if (opt->cfg.cache_dir.empty()) {
        if (const char* env = std::getenv("DGC_CACHE_DIR")) opt->cfg.cache_dir = env;
    }
    if (opt->threads > 0) dgc::set_num_threads(opt->threads);
}

// --config file.json provides defaults that explicit flags override; it is
// applied by rewriting argv defaults before CLI11 parses.
void load_config_defaults(int argc, char** argv, CliOptions* opt) {
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw dgc::Error("cannot open config: " + config_path);
    json j;
    in >> j;
    auto& cfg = opt->cfg;
    cfg.dataset_path = j.value("dataset", cfg.dataset_path);
    opt->method = j.value("method", opt->method);
    cfg.k_clusters = j.value("k", cfg.k_clusters);
    cfg.k_graph = j.value("graph_k", cfg.k_graph);
    cfg.sigma_graph = j.value("sigma", cfg.sigma_graph);
    cfg.k_density = j.value("density_k", cfg.k_density);
    if (j.contains("density_sigma")) cfg.density_sigma = j["density_sigma"].get<double>();
    cfg.t = j.value("time", cfg.t);
    cfg.r_s = j.value("spatial_radius", cfg.r_s);
    cfg.fixed_m = j.value("embed_dim", cfg.fixed_m);
    cfg.m_max = j.value("max_eigs", cfg.m_max);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.perturb_variance = j.value("perturb_variance", cfg.perturb_variance);
    cfg.active_budget = j.value("active_budget", cfg.active_budget);
    cfg.active_alpha = j.value("active_alpha", cfg.active_alpha);
    cfg.random_queries = j.value("random_queries", cfg.random_queries);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    opt->out_dir = j.value("out_dir", opt->out_dir);
    opt->gt_column = j.value("gt_column", opt->gt_column);
}

int cmd_cluster(CliOptions& opt) {
    finish_options(&opt);
    const dgc::Dataset ds = load_dataset(opt);
    const dgc::RunResult rr = dgc::run_pipeline(ds, opt.cfg);

    fs::create_directories(opt.out_dir);
    std::vector<std::string> manifest;
    write_label_outputs(opt.out_dir, rr.labeling, &manifest);
    write_json(fs::path(opt.out_dir) / "report.json", run_report(ds, opt.cfg, rr), &manifest);
    write_manifest(opt.out_dir, manifest);

    std::cout << run_report(ds, opt.cfg, rr).dump(2) << "\n";
    return 0;
}

int cmd_estimate_k(CliOptions& opt) {
    finish_options(&opt);
    opt.cfg.k_clusters = 0;
    const dgc::Dataset ds = load_dataset(opt);
    const dgc::PipelineStages st = dgc::build_stages(ds, opt.cfg);
    dgc::ModeAnalysis ma = dgc::analyze_modes(st.dm, st.dp, opt.cfg.t, 1);
    const dgc::KEstimate est = dgc::estimate_k(ma, opt.cfg.search_limit);

    const auto n_curve = std::min<Eigen::Index>(50, est.sorted_score.size());
    json report{{"dataset", ds.name},
                {"k_hat", est.k_hat},
                {"method",
                 est.method == dgc::KEstimate::Method::first_order ? "first-order"
                                                                   : "second-order"},
                {"sorted_score",
                 std::vector<double>(est.sorted_score.data(), est.sorted_score.data() + n_curve)},
                {"first_order",
                 std::vector<double>(est.first_order.data(),
                                     est.first_order.data() + est.first_order.size())}};
    if (est.second_order.size() > 0)
        report["second_order"] = std::vector<double>(
            est.second_order.data(), est.second_order.data() + est.second_order.size());

    fs::create_directories(opt.out_dir);
    std::vector<std::string> manifest;
    write_json(fs::path(opt.out_dir) / "estimate_k.json", report, &manifest);
    write_manifest(opt.out_dir, manifest);
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_sweep(CliOptions& opt, const std::string& param, const std::vector<double>& values) {
    finish_options(&opt);
    if (values.empty()) throw dgc::Error("sweep needs --values");
    if (param != "t" && param != "rs") throw dgc::Error("sweep --param must be t or rs");

    const dgc::Dataset ds = load_dataset(opt);
    if (!ds.has_gt()) throw dgc::Error("sweep requires ground truth");

    // Graph and eigenpairs are shared across the sweep; only the analysis
    // downstream of them reruns per value.
    const dgc::PipelineStages st = dgc::build_stages(ds, opt.cfg);
    json table = json::array();
    for (double v : values) {
        dgc::RunConfig cfg = opt.cfg;
        if (param == "t")
            cfg.t = v;
        else
            cfg.r_s = v;
        const dgc::RunResult rr = dgc::run_on_stages(st, cfg);
        json row{{"value", v},
                 {"oa", rr.metrics->oa},
                 {"aa", rr.metrics->aa},
                 {"kappa", rr.metrics->kappa},
                 {"stage1_unlabeled", rr.labeling.stage1_unlabeled}};
        table.push_back(row);
    }
    json report{{"dataset", ds.name},
                {"param", param},
                {"method", dgc::method_name(opt.cfg.method)},
                {"rows", table}};

    fs::create_directories(opt.out_dir);
    std::vector<std::string> manifest;
    write_json(fs::path(opt.out_dir) / "sweep.json", report, &manifest);
    write_manifest(opt.out_dir, manifest);
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_patches(CliOptions& opt, int grid_rows, int grid_cols, const std::string& method_a,
                const std::string& method_b, double critical_value) {
    finish_options(&opt);
    const dgc::Dataset ds = load_dataset(opt);
    const dgc::PatchExperiment ex =
        dgc::patch_experiment(ds, grid_rows, grid_cols, dgc::parse_method(method_a),
                              dgc::parse_method(method_b), opt.cfg, critical_value);

    fs::create_directories(opt.out_dir);
    std::vector<std::string> manifest;
    json patches = json::array();
    for (const auto& p : ex.patches) {
        const std::string stem =
            "patch_" + std::to_string(p.patch_row) + "_" + std::to_string(p.patch_col);
        dgc::save_raster((fs::path(opt.out_dir) / (stem + "_a.bin")).string(), p.labels_a);
        dgc::save_raster((fs::path(opt.out_dir) / (stem + "_b.bin")).string(), p.labels_b);
        manifest.push_back(stem + "_a.bin");
        manifest.push_back(stem + "_b.bin");
        patches.push_back(json{{"row", p.patch_row},
                               {"col", p.patch_col},
                               {"window", {p.row0, p.row1, p.col0, p.col1}},
                               {"oa_a", p.oa_a},
                               {"oa_b", p.oa_b}});
    }
    json report{{"dataset", ds.name},
                {"method_a", method_a},
                {"method_b", method_b},
                {"patches", patches},
                {"skipped", ex.skipped},
                {"stats",
                 {{"delta_mean", ex.stats.delta_mean},
                  {"delta_std", ex.stats.delta_std},
                  {"t_stat", ex.stats.t_stat},
                  {"df", ex.stats.df},
                  {"critical_value", ex.stats.critical_value},
                  {"significant", ex.stats.significant},
                  {"degenerate", ex.stats.degenerate}}}};
    write_json(fs::path(opt.out_dir) / "patches.json", report, &manifest);
    write_manifest(opt.out_dir, manifest);
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_eval(CliOptions& opt, const std::string& labels_path, int k_override) {
    finish_options(&opt);
    const dgc::Dataset ds = load_dataset(opt);
    if (!ds.has_gt()) throw dgc::Error("eval requires a dataset with ground truth");
    const auto labels =
        dgc::load_raster(labels_path, static_cast<std::size_t>(ds.n()));
    dgc::LabelVector pred;
    pred.labels = labels;
    pred.k = k_override > 0 ? k_override
                            : *std::max_element(labels.begin(), labels.end());
    const dgc::MetricsReport rep = dgc::metrics(pred, dgc::gt_vector(ds));
    std::cout << metrics_json(rep).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion-geometry clustering for point clouds and image cubes"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string config_path;
    app.add_option("--config", config_path, "JSON config with flag defaults");

    try {
        load_config_defaults(argc, argv, &opt);
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }

    auto* cluster = app.add_subcommand("cluster", "run the full pipeline");
    apply_common(cluster, &opt);

    auto* estimate = app.add_subcommand("estimate-k", "estimate the cluster count");
    apply_common(estimate, &opt);

    auto* sweep = app.add_subcommand("sweep", "sweep t or the spatial radius");
    apply_common(sweep, &opt);
    std::string sweep_param = "t";
    std::vector<double> sweep_values;
    sweep->add_option("--param", sweep_param, "t | rs");
    sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',');

    auto* patches = app.add_subcommand("patches", "patch-grid experiment");
    apply_common(patches, &opt);
    int grid_rows = 1, grid_cols = 1;
    std::string method_a = "dlss", method_b = "dl";
    double critical_value = 1.9934;
    patches->add_option("--grid-rows", grid_rows, "patch rows")->required();
    patches->add_option("--grid-cols", grid_cols, "patch cols")->required();
    patches->add_option("--method-a", method_a, "first method");
    patches->add_option("--method-b", method_b, "second method");
    patches->add_option("--critical-value", critical_value, "two-sided t threshold");

    auto* synth = app.add_subcommand("synth", "generate synthetic datasets");
    std::string synth_kind = "toy", synth_out = "synth.json";
    uint64_t synth_seed = 1;
    int blobs_k = 2, blobs_n = 100, blobs_dim = 3;
    double blobs_sep = 10.0;
    int strips_rows = 32, strips_cols = 48, strips_k = 3, strips_bands = 8;
    synth->add_option("kind", synth_kind, "toy | blobs | strips")->required();
    synth->add_option("--out", synth_out, ".json cube header or .csv")->required();
    synth->add_option("--seed", synth_seed, "rng seed");
    synth->add_option("--blobs-k", blobs_k, "blob count");
    synth->add_option("--n-per", blobs_n, "points per blob");
    synth->add_option("--dim", blobs_dim, "blob dimension");
    synth->add_option("--separation", blobs_sep, "blob mean spacing");
    synth->add_option("--rows", strips_rows, "strip image rows");
    synth->add_option("--cols", strips_cols, "strip image cols");
    synth->add_option("--strips-k", strips_k, "strip class count");
    synth->add_option("--bands", strips_bands, "strip image bands");

    auto* eval = app.add_subcommand("eval", "score a label raster against gt");
    apply_common(eval, &opt);
    std::string eval_labels;
    int eval_k = 0;
    eval->add_option("--labels", eval_labels, "int32 label raster")->required();
    eval->add_option("--pred-k", eval_k, "label count override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cluster->parsed()) return cmd_cluster(opt);
        if (estimate->parsed()) return cmd_estimate_k(opt);
        if (sweep->parsed()) return cmd_sweep(opt, sweep_param, sweep_values);
        if (patches->parsed())
            return cmd_patches(opt, grid_rows, grid_cols, method_a, method_b, critical_value);
        if (eval->parsed()) return cmd_eval(opt, eval_labels, eval_k);
        if (synth->parsed()) {
            dgc::Dataset ds;
            if (synth_kind == "toy") {
                dgc::ToySpec spec;
                spec.seed = synth_seed;
                ds = dgc::generate_toy(spec);
            } else if (synth_kind == "blobs") {
                ds = dgc::generate_blobs(blobs_k, blobs_n, blobs_dim, blobs_sep, synth_seed);
            } else if (synth_kind == "strips") {
                ds = dgc::generate_strip_image(strips_rows, strips_cols, strips_k, strips_bands,
                                               6.0, 0.3, synth_seed);
            } else {
                throw dgc::Error("unknown synth kind: " + synth_kind);
            }
            const bool csv = synth_out.size() > 4 &&
                             synth_out.substr(synth_out.size() - 4) == ".csv";
            if (csv) {
                dgc::save_csv(ds, synth_out, true);
            } else {
                if (!ds.has_grid()) {
                    // Point clouds are stored as a 1 x N cube; the synthetic
                    // grid is a single pixel row.
                    ds.grid_rows = 1;
                    ds.grid_cols = static_cast<int32_t>(ds.n());
                    ds.grid.clear();
                    for (Eigen::Index i = 0; i < ds.n(); ++i)
                        ds.grid.push_back({0, static_cast<int32_t>(i)});
                }
                dgc::save_cube(ds, synth_out);
            }
            std::cout << json{{"written", synth_out}, {"n", ds.n()}, {"d", ds.dim()}}.dump(2)
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
