#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fswml/dataset.hpp"
#include "fswml/error.hpp"
#include "fswml/eval.hpp"
#include "fswml/model.hpp"
#include "fswml/model_io.hpp"
#include "fswml/optimizer.hpp"
#include "fswml/svg.hpp"

// Command-line orchestration of the pipeline: ingest -> audit -> encode ->
// split -> train -> evaluate -> report, plus seed sweeps, importances, grid
// recommendation and tree rendering.
//
// Exit codes: 0 success, 1 runtime/data error, 2 usage error.

namespace fswml {

struct RunConfig {
    std::string command;
    std::string dataset = "embedded"; // path or "embedded"
    ModelKind model_kind = ModelKind::forest;
    bool include_tool = false;
    double test_ratio = 0.2;
    std::uint64_t seed = 42;
    std::size_t n_seeds = 50;
    ModelConfig model;
    std::string out_path;
    std::string svg_path;  // importance
    std::string in_path;   // render
    std::size_t tree_index = 0;
    double base_uts_mpa = 310.0;
    std::size_t top_k = 5;
    std::size_t dense_steps = 0; // 0 = experimental levels
};

namespace cli_detail {

using nlohmann::json;

inline Dataset load_dataset(const std::string& spec) {
    if (spec == "embedded") {
        return embedded_fsw_dataset();
    }
    std::ifstream in(spec, std::ios::binary);
    if (!in) {
        throw Error("cannot open dataset '" + spec + "'");
    }
    return load_csv(in, spec);
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

inline void write_json_report(const std::string& path, const json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

inline std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

struct Pipeline {
    Dataset dataset;
    FeatureMatrix matrix;
    SplitPair split;
    std::string dataset_hash;
};

/// load -> missing check -> encode -> split, shared by the model commands.
inline Pipeline prepare_pipeline(const RunConfig& cfg) {
    Dataset dataset = load_dataset(cfg.dataset);
    const MissingReport missing = check_missing(dataset);
    if (missing.missing_cells != 0) {
        throw Error("dataset '" + dataset.source() + "' has missing cells");
    }
    FeatureMatrix matrix = encode(dataset, cfg.include_tool);
    SplitPair split = train_test_split(matrix, cfg.test_ratio, cfg.seed);
    std::string hash = fnv1a_hex(to_csv(dataset));
    return Pipeline{std::move(dataset), std::move(matrix), std::move(split),
                    std::move(hash)};
}

inline json config_json(const RunConfig& cfg) {
    json j;
    j["model_kind"] = std::string(to_string(cfg.model_kind));
    j["include_tool"] = cfg.include_tool;
    j["test_ratio"] = cfg.test_ratio;
    j["seed"] = cfg.seed;
    switch (cfg.model_kind) {
    case ModelKind::tree:
        j["max_depth"] = cfg.model.tree_hp.max_depth ? json(*cfg.model.tree_hp.max_depth)
                                                     : json(nullptr);
        j["min_samples_split"] = cfg.model.tree_hp.min_samples_split;
        j["min_gain"] = cfg.model.tree_hp.min_gain;
        break;
    case ModelKind::forest:
        j["n_trees"] = cfg.model.n_trees;
        j["max_features"] = cfg.model.max_features;
        j["bootstrap"] = cfg.model.bootstrap;
        j["max_depth"] = cfg.model.tree_hp.max_depth ? json(*cfg.model.tree_hp.max_depth)
                                                     : json(nullptr);
        j["min_samples_split"] = cfg.model.tree_hp.min_samples_split;
        j["min_gain"] = cfg.model.tree_hp.min_gain;
        break;
    case ModelKind::gbm:
        j["n_stages"] = cfg.model.n_stages;
        j["learning_rate"] = cfg.model.learning_rate;
        j["max_depth"] = cfg.model.stage_hp.max_depth ? json(*cfg.model.stage_hp.max_depth)
                                                      : json(nullptr);
        j["min_samples_split"] = cfg.model.stage_hp.min_samples_split;
        j["min_gain"] = cfg.model.stage_hp.min_gain;
        break;
    }
    return j;
}

inline json dataset_json(const Dataset& dataset, const std::string& hash) {
    return json{{"source", dataset.source()},
                {"n_records", dataset.size()},
                {"hash", hash}};
}

// --- subcommand bodies ------------------------------------------------------

inline int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
    const Dataset dataset = load_dataset(cfg.dataset);
    const SummaryStats stats = summarize(dataset);
    out << "loaded " << dataset.size() << " records from " << dataset.source() << "\n";
    out << "hash: " << fnv1a_hex(to_csv(dataset)) << "\n\n";
    out << "column                   min        max       mean     stddev\n";
    for (const ColumnStats& c : stats.columns) {
        char line[128];
        std::snprintf(line, sizeof line, "%-20s %9.3f %10.3f %10.3f %10.3f\n",
                      c.name.c_str(), c.min, c.max, c.mean, c.stddev);
        out << line;
    }
    out << "\ncorrelation with uts_mpa:\n";
    for (const auto& [name, r] : stats.uts_correlations) {
        char line[96];
        std::snprintf(line, sizeof line, "%-20s %9.3f\n", name.c_str(), r);
        out << line;
    }
    if (!cfg.out_path.empty()) {
        write_text_file(cfg.out_path, to_csv(dataset));
        out << "\nwrote canonical csv to " << cfg.out_path << "\n";
    }
    return 0;
}

inline int cmd_audit(const RunConfig& cfg, std::ostream& out) {
    MissingReport report;
    std::string source;
    if (cfg.dataset == "embedded") {
        const Dataset dataset = embedded_fsw_dataset();
        source = dataset.source();
        std::istringstream in(to_csv(dataset));
        report = check_missing_csv(in, source);
    } else {
        source = cfg.dataset;
        std::ifstream in(cfg.dataset, std::ios::binary);
        if (!in) {
            throw Error("cannot open dataset '" + cfg.dataset + "'");
        }
        report = check_missing_csv(in, source);
    }
    out << "audit of " << source << "\n";
    out << "total cells:   " << report.total_cells << "\n";
    out << "missing cells: " << report.missing_cells << "\n";
    for (const auto& [row, column] : report.locations) {
        out << "  row " << row << ", column " << column << "\n";
    }
    if (!cfg.out_path.empty()) {
        json doc;
        doc["format_version"] = 1;
        doc["command"] = "audit";
        doc["source"] = source;
        doc["total_cells"] = report.total_cells;
        doc["missing_cells"] = report.missing_cells;
        doc["locations"] = json::array();
        for (const auto& [row, column] : report.locations) {
            doc["locations"].push_back(json{{"row", row}, {"column", column}});
        }
        write_json_report(cfg.out_path, doc);
    }
    return 0;
}

inline int cmd_train(const RunConfig& cfg, std::ostream& out) {
    const Pipeline p = prepare_pipeline(cfg);
    const FittedModel model =
        train_model(cfg.model_kind, p.matrix, p.split.train_indices, cfg.model, cfg.seed);

    std::vector<double> y, yhat;
    for (const std::size_t r : p.split.train_indices) {
        y.push_back(p.matrix.targets[r]);
        yhat.push_back(model.predict(p.matrix.row(r)));
    }
    out << "trained " << to_string(cfg.model_kind) << " on " << p.split.train_indices.size()
        << " rows (" << p.split.test_indices.size() << " held out, seed " << cfg.seed
        << ")\n";
    out << "training mse: " << fmt("%.6f", mse(y, yhat)) << "\n";
    if (!cfg.out_path.empty()) {
        TrainingFingerprint fp;
        fp.dataset_hash = p.dataset_hash;
        fp.seed = cfg.seed;
        fp.test_ratio = cfg.test_ratio;
        fp.train_indices = p.split.train_indices;
        fp.test_indices = p.split.test_indices;
        save_model(model, fp, cfg.out_path);
        out << "wrote model to " << cfg.out_path << "\n";
    }
    return 0;
}

inline int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const Pipeline p = prepare_pipeline(cfg);
    const MetricsReport report =
        evaluate(cfg.model_kind, p.matrix, p.split, cfg.model, cfg.seed);
    out << "model    mse        mae       r2       n_test  seed\n";
    char line[128];
    std::snprintf(line, sizeof line, "%-8s %-10.3f %-9.3f %-8.3f %-7zu %llu\n",
                  std::string(to_string(report.model_kind)).c_str(), report.mse, report.mae,
                  report.r2, report.n_test,
                  static_cast<unsigned long long>(report.seed));
    out << line;
    if (!cfg.out_path.empty()) {
        json doc;
        doc["format_version"] = 1;
        doc["command"] = "evaluate";
        doc["dataset"] = dataset_json(p.dataset, p.dataset_hash);
        doc["config"] = config_json(cfg);
        doc["metrics"] = json{{"mse", report.mse},
                              {"mae", report.mae},
                              {"r2", report.r2},
                              {"n_test", report.n_test}};
        write_json_report(cfg.out_path, doc);
    }
    return 0;
}

inline json band_json(const MetricBand& band) {
    return json{{"p05", band.p05},
                {"median", band.median},
                {"p95", band.p95},
                {"mean", band.mean}};
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const Dataset dataset = load_dataset(cfg.dataset);
    const FeatureMatrix matrix = encode(dataset, cfg.include_tool);
    const SweepSummary summary = run_sweep(cfg.model_kind, matrix, cfg.test_ratio,
                                           cfg.seed, cfg.n_seeds, cfg.model);
    out << to_string(cfg.model_kind) << " over " << summary.n_seeds << " seeds (base "
        << summary.base_seed << ")\n";
    out << "metric   p05        median     p95        mean\n";
    const auto print_band = [&out](const char* name, const MetricBand& b) {
        char line[128];
        std::snprintf(line, sizeof line, "%-8s %-10.3f %-10.3f %-10.3f %-10.3f\n", name,
                      b.p05, b.median, b.p95, b.mean);
        out << line;
    };
    print_band("mse", summary.mse);
    print_band("mae", summary.mae);
    print_band("r2", summary.r2);
    if (!cfg.out_path.empty()) {
        json doc;
        doc["format_version"] = 1;
        doc["command"] = "sweep";
        doc["dataset"] = dataset_json(dataset, fnv1a_hex(to_csv(dataset)));
        doc["config"] = config_json(cfg);
        doc["n_seeds"] = summary.n_seeds;
        doc["base_seed"] = summary.base_seed;
        doc["metrics"] = json{{"mse", band_json(summary.mse)},
                              {"mae", band_json(summary.mae)},
                              {"r2", band_json(summary.r2)}};
        json per_seed = json::array();
        for (const MetricsReport& r : summary.per_seed) {
            per_seed.push_back(json{{"seed", r.seed},
                                    {"mse", r.mse},
                                    {"mae", r.mae},
                                    {"r2", r.r2}});
        }
        doc["per_seed"] = std::move(per_seed);
        write_json_report(cfg.out_path, doc);
    }
    return 0;
}

inline int cmd_importance(const RunConfig& cfg, std::ostream& out) {
    const Dataset dataset = load_dataset(cfg.dataset);
    const FeatureMatrix matrix = encode(dataset, cfg.include_tool);
    std::vector<std::size_t> all_rows(matrix.n_rows);
    for (std::size_t i = 0; i < all_rows.size(); ++i) {
        all_rows[i] = i;
    }
    // Importance analysis uses every record; no rows are held out.
    const FittedModel model =
        train_model(cfg.model_kind, matrix, all_rows, cfg.model, cfg.seed);
    const ImportanceReport report =
        rank_features(model.importances(), matrix.feature_names, cfg.model_kind);
    out << "feature importances (" << to_string(cfg.model_kind) << ", seed " << cfg.seed
        << ")\n";
    out << "rank  feature               importance\n";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        char line[96];
        std::snprintf(line, sizeof line, "%-5zu %-21s %8.3f\n", i + 1,
                      report.entries[i].first.c_str(), report.entries[i].second);
        out << line;
    }
    if (!cfg.out_path.empty()) {
        json doc;
        doc["format_version"] = 1;
        doc["command"] = "importance";
        doc["dataset"] = dataset_json(dataset, fnv1a_hex(to_csv(dataset)));
        doc["config"] = config_json(cfg);
        doc["importances"] = json::array();
        for (const auto& [name, value] : report.entries) {
            doc["importances"].push_back(json{{"feature", name}, {"importance", value}});
        }
        write_json_report(cfg.out_path, doc);
    }
    if (!cfg.svg_path.empty()) {
        render_importance_svg(report, cfg.svg_path);
        out << "wrote svg to " << cfg.svg_path << "\n";
    }
    return 0;
}

inline int cmd_recommend(const RunConfig& cfg, std::ostream& out) {
    const Pipeline p = prepare_pipeline(cfg);
    const FittedModel model =
        train_model(cfg.model_kind, p.matrix, p.split.train_indices, cfg.model, cfg.seed);
    ParameterGrid grid;
    if (cfg.dense_steps > 0) {
        grid = dense_grid(grid, cfg.dense_steps);
    }
    const BaseMetal base{"AA6061", cfg.base_uts_mpa};
    const Recommendation rec = recommend(model, grid, base, cfg.top_k);

    const auto setting_line = [](const GridSetting& s) {
        std::string text = "rpm " + detail::format_double(s.rotational_speed_rpm) +
                           ", weld " + detail::format_double(s.welding_speed_mm_min) +
                           " mm/min, force " + detail::format_double(s.axial_force_kn) +
                           " kN";
        if (s.tool) {
            text += ", tool " + std::string(to_string(*s.tool));
        }
        return text;
    };
    out << "recommended setting (" << to_string(cfg.model_kind) << ", seed " << cfg.seed
        << "):\n";
    out << "  " << setting_line(rec.setting) << "\n";
    out << "  predicted uts:    " << fmt("%.1f", rec.predicted_uts_mpa) << " MPa\n";
    out << "  joint efficiency: " << format_percent(rec.joint_efficiency) << " of "
        << base.name << " (" << detail::format_double(base.tensile_strength_mpa)
        << " MPa)\n";
    if (!rec.runner_ups.empty()) {
        out << "runner-ups:\n";
        for (const auto& [setting, uts] : rec.runner_ups) {
            out << "  " << fmt("%.1f", uts) << " MPa  " << setting_line(setting) << "\n";
        }
    }
    if (!cfg.out_path.empty()) {
        const auto setting_json = [](const GridSetting& s) {
            json j{{"rotational_speed_rpm", s.rotational_speed_rpm},
                   {"welding_speed_mm_min", s.welding_speed_mm_min},
                   {"axial_force_kn", s.axial_force_kn}};
            if (s.tool) {
                j["tool_material"] = std::string(to_string(*s.tool));
            }
            return j;
        };
        json doc;
        doc["format_version"] = 1;
        doc["command"] = "recommend";
        doc["dataset"] = dataset_json(p.dataset, p.dataset_hash);
        doc["config"] = config_json(cfg);
        doc["base_metal"] = json{{"name", base.name},
                                 {"tensile_strength_mpa", base.tensile_strength_mpa}};
        doc["recommendation"] = json{{"setting", setting_json(rec.setting)},
                                     {"predicted_uts_mpa", rec.predicted_uts_mpa},
                                     {"joint_efficiency", rec.joint_efficiency}};
        doc["runner_ups"] = json::array();
        for (const auto& [setting, uts] : rec.runner_ups) {
            doc["runner_ups"].push_back(
                json{{"setting", setting_json(setting)}, {"predicted_uts_mpa", uts}});
        }
        write_json_report(cfg.out_path, doc);
    }
    return 0;
}

inline int cmd_render(const RunConfig& cfg, std::ostream& out) {
    const FittedModel model = load_model(cfg.in_path);
    const RegressionTree* tree = nullptr;
    switch (model.kind()) {
    case ModelKind::tree:
        tree = &model.as_tree();
        break;
    case ModelKind::forest: {
        const ForestModel& forest = model.as_forest();
        if (cfg.tree_index >= forest.trees.size()) {
            throw Error("render: tree index " + std::to_string(cfg.tree_index) +
                        " out of range (forest has " + std::to_string(forest.n_trees()) +
                        " trees)");
        }
        tree = &forest.trees[cfg.tree_index];
        break;
    }
    case ModelKind::gbm: {
        const GbmModel& gbm = model.as_gbm();
        if (cfg.tree_index >= gbm.stages.size()) {
            throw Error("render: stage index " + std::to_string(cfg.tree_index) +
                        " out of range (gbm has " + std::to_string(gbm.n_stages()) +
                        " stages)");
        }
        tree = &gbm.stages[cfg.tree_index];
        break;
    }
    }
    if (cfg.out_path.empty()) {
        render_tree_text(*tree, out);
    } else {
        std::ostringstream text;
        render_tree_text(*tree, text);
        write_text_file(cfg.out_path, text.str());
        out << "wrote tree text to " << cfg.out_path << "\n";
    }
    return 0;
}

} // namespace cli_detail

/// Builds the CLI11 command tree, parses argv, and fills cfg. Returns an
/// exit code when parsing already settled the outcome (help or usage error),
/// nullopt when a command should run.
inline std::optional<int> parse_args(const std::vector<std::string>& args, RunConfig& cfg,
                                     std::ostream& out, std::ostream& err) {
    CLI::App app{"tree-ensemble regression toolkit for friction-stir-welding strength"};
    app.require_subcommand(1);

    std::string model_str = "forest";
    std::string max_depth_str; // empty = per-model default
    long long trees = 100, stages = 100, min_samples_split = 2, max_features = 0;
    long long n_seeds = 50, tree_index = 0, top_k = 5, dense = 0;
    bool no_bootstrap = false;

    const auto add_dataset = [&](CLI::App* sub) {
        sub->add_option("--dataset", cfg.dataset, "csv path or 'embedded'")
            ->capture_default_str();
    };
    const auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", model_str, "model kind")
            ->check(CLI::IsMember({"tree", "forest", "gbm"}))
            ->capture_default_str();
        sub->add_flag("--include-tool", cfg.include_tool,
                      "one-hot encode the tool material as features");
        sub->add_option("--seed", cfg.seed, "base PRNG seed")->capture_default_str();
        sub->add_option("--trees", trees, "forest size")->capture_default_str();
        sub->add_option("--stages", stages, "boosting stages")->capture_default_str();
        sub->add_option("--learning-rate", cfg.model.learning_rate, "boosting shrinkage")
            ->capture_default_str();
        sub->add_option("--max-depth", max_depth_str,
                        "tree depth limit, integer or 'none'");
        sub->add_option("--min-samples-split", min_samples_split,
                        "minimum samples to split a node")
            ->capture_default_str();
        sub->add_option("--min-gain", cfg.model.tree_hp.min_gain,
                        "minimum information gain to split")
            ->capture_default_str();
        sub->add_option("--max-features", max_features,
                        "candidate features per node (0 = all)")
            ->capture_default_str();
        sub->add_flag("--no-bootstrap", no_bootstrap,
                      "fit every forest tree on the full training set");
    };
    const auto add_split = [&](CLI::App* sub) {
        sub->add_option("--test-ratio", cfg.test_ratio, "held-out fraction")
            ->capture_default_str();
    };
    const auto add_out = [&](CLI::App* sub, const char* what) {
        sub->add_option("--out", cfg.out_path, what);
    };

    CLI::App* ingest = app.add_subcommand("ingest", "load a dataset and summarize it");
    add_dataset(ingest);
    add_out(ingest, "write the canonical csv here");

    CLI::App* audit = app.add_subcommand("audit", "report blank or unparseable cells");
    add_dataset(audit);
    add_out(audit, "write the audit report (json) here");

    CLI::App* train = app.add_subcommand("train", "fit a model on the training split");
    add_dataset(train);
    add_model(train);
    add_split(train);
    add_out(train, "write the fitted model (json) here");

    CLI::App* evaluate = app.add_subcommand("evaluate", "train and score on the test split");
    add_dataset(evaluate);
    add_model(evaluate);
    add_split(evaluate);
    add_out(evaluate, "write the metrics report (json) here");

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate across many seeds");
    add_dataset(sweep);
    add_model(sweep);
    add_split(sweep);
    sweep->add_option("--seeds", n_seeds, "number of consecutive seeds")
        ->capture_default_str();
    add_out(sweep, "write the sweep report (json) here");

    CLI::App* importance = app.add_subcommand("importance", "rank feature importances");
    add_dataset(importance);
    add_model(importance);
    add_out(importance, "write the importance report (json) here");
    importance->add_option("--svg", cfg.svg_path, "write a bar chart svg here");

    CLI::App* recommend = app.add_subcommand("recommend",
                                             "grid-search the parameter space");
    add_dataset(recommend);
    add_model(recommend);
    add_split(recommend);
    recommend->add_option("--base-uts", cfg.base_uts_mpa, "base metal strength (MPa)")
        ->capture_default_str();
    recommend->add_option("--top-k", top_k, "number of runner-ups")->capture_default_str();
    recommend->add_option("--dense", dense, "subdivide numeric ranges into this many steps");
    add_out(recommend, "write the recommendation (json) here");

    CLI::App* render = app.add_subcommand("render", "print a fitted tree as text");
    render->add_option("--in", cfg.in_path, "model file to read")->required();
    render->add_option("--tree", tree_index, "tree/stage index for ensembles")
        ->capture_default_str();
    add_out(render, "write the text here instead of stdout");

    if (args.empty()) {
        out << app.help();
        return 2;
    }

    std::vector<const char*> argv;
    argv.push_back("fswml");
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    const auto usage_error = [&err](const std::string& message) -> std::optional<int> {
        err << "error: " << message << "\n";
        return 2;
    };
    if (!(cfg.test_ratio > 0.0 && cfg.test_ratio < 1.0)) {
        return usage_error("--test-ratio must be in (0, 1)");
    }
    if (!(cfg.model.learning_rate > 0.0 && cfg.model.learning_rate <= 1.0)) {
        return usage_error("--learning-rate must be in (0, 1]");
    }
    if (trees < 1) {
        return usage_error("--trees must be >= 1");
    }
    if (stages < 0) {
        return usage_error("--stages must be >= 0");
    }
    if (n_seeds < 1) {
        return usage_error("--seeds must be >= 1");
    }
    if (min_samples_split < 2) {
        return usage_error("--min-samples-split must be >= 2");
    }
    if (max_features < 0) {
        return usage_error("--max-features must be >= 0");
    }
    if (!(cfg.model.tree_hp.min_gain >= 0.0)) {
        return usage_error("--min-gain must be >= 0");
    }
    if (tree_index < 0 || top_k < 0) {
        return usage_error("--tree and --top-k must be >= 0");
    }
    if (dense != 0 && dense < 2) {
        return usage_error("--dense must be 0 or >= 2");
    }
    if (!(cfg.base_uts_mpa > 0.0)) {
        return usage_error("--base-uts must be positive");
    }

    cfg.model_kind = parse_model_kind(model_str);
    cfg.model.n_trees = static_cast<std::size_t>(trees);
    cfg.model.n_stages = static_cast<std::size_t>(stages);
    cfg.model.max_features = static_cast<std::size_t>(max_features);
    cfg.model.bootstrap = !no_bootstrap;
    cfg.model.tree_hp.min_samples_split = static_cast<std::size_t>(min_samples_split);
    cfg.model.stage_hp.min_samples_split = static_cast<std::size_t>(min_samples_split);
    cfg.model.stage_hp.min_gain = cfg.model.tree_hp.min_gain;
    cfg.n_seeds = static_cast<std::size_t>(n_seeds);
    cfg.tree_index = static_cast<std::size_t>(tree_index);
    cfg.top_k = static_cast<std::size_t>(top_k);
    cfg.dense_steps = static_cast<std::size_t>(dense);

    // --max-depth applies to the boosting stages for gbm, to the tree
    // otherwise; the defaults differ (gbm stages stay shallow).
    if (!max_depth_str.empty()) {
        std::optional<std::size_t> depth;
        if (max_depth_str != "none") {
            try {
                std::size_t pos = 0;
                const long long value = std::stoll(max_depth_str, &pos);
                if (pos != max_depth_str.size() || value < 0) {
                    throw std::invalid_argument{""};
                }
                depth = static_cast<std::size_t>(value);
            } catch (const std::exception&) {
                return usage_error("--max-depth must be a non-negative integer or 'none'");
            }
        }
        if (cfg.model_kind == ModelKind::gbm) {
            cfg.model.stage_hp.max_depth = depth;
        } else {
            cfg.model.tree_hp.max_depth = depth;
        }
    }

    cfg.command = app.get_subcommands().front()->get_name();
    return std::nullopt;
}

inline int run_command(const RunConfig& cfg, std::ostream& out) {
    using namespace cli_detail;
    if (cfg.command == "ingest") return cmd_ingest(cfg, out);
    if (cfg.command == "audit") return cmd_audit(cfg, out);
    if (cfg.command == "train") return cmd_train(cfg, out);
    if (cfg.command == "evaluate") return cmd_evaluate(cfg, out);
    if (cfg.command == "sweep") return cmd_sweep(cfg, out);
    if (cfg.command == "importance") return cmd_importance(cfg, out);
    if (cfg.command == "recommend") return cmd_recommend(cfg, out);
    if (cfg.command == "render") return cmd_render(cfg, out);
    throw Error("unknown command '" + cfg.command + "'");
}

/// Entry point shared by main() and the integration tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
    RunConfig cfg;
    if (const auto early = parse_args(args, cfg, out, err)) {
        return *early;
    }
    try {
        return run_command(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace fswml
