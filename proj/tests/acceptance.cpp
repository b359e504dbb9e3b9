// Acceptance gate for the toolkit. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits non-zero if any criterion fails. Run via
// ctest (test name "acceptance") or directly from the build tree.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fswml/cart.hpp>
#include <fswml/cli.hpp>
#include <fswml/dataset.hpp>
#include <fswml/ensemble.hpp>
#include <fswml/eval.hpp>
#include <fswml/model.hpp>
#include <fswml/model_io.hpp>
#include <fswml/optimizer.hpp>

#include "helpers.hpp"
#include "oracle.hpp"

namespace {

using namespace fswml;

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& message) {
        if (!condition) {
            ok = false;
            if (!detail.str().empty()) {
                detail << "; ";
            }
            detail << message;
        }
    }
};

std::string format_ms(double ms) {
    char buf[32];
    if (ms >= 1000.0) {
        std::snprintf(buf, sizeof buf, "%.1f s", ms / 1000.0);
    } else {
        std::snprintf(buf, sizeof buf, "%.1f ms", ms);
    }
    return buf;
}

bool within(double value, double lo, double hi) { return value >= lo && value <= hi; }

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// --- criterion bodies -------------------------------------------------------

void criterion_dataset_fidelity(Check& c) {
    const Dataset d = embedded_fsw_dataset();
    c.require(d.size() == 52, "expected 52 records, got " + std::to_string(d.size()));

    const auto& rs = d.records();
    const auto best = std::max_element(rs.begin(), rs.end(), [](auto& a, auto& b) {
        return a.uts_mpa < b.uts_mpa;
    });
    c.require(best->uts_mpa == 292.0 && best->tool_material == ToolMaterial::HSS &&
                  best->rotational_speed_rpm == 1500.0 &&
                  best->welding_speed_mm_min == 25.0 && best->axial_force_kn == 3.0,
              "strongest record is not (HSS, 1500, 25, 3, 292)");

    const auto worst = std::min_element(rs.begin(), rs.end(), [](auto& a, auto& b) {
        return a.uts_mpa < b.uts_mpa;
    });
    c.require(worst->uts_mpa == 231.0 && worst->tool_material == ToolMaterial::C40 &&
                  worst->rotational_speed_rpm == 900.0 &&
                  worst->welding_speed_mm_min == 45.0 && worst->axial_force_kn == 3.0,
              "weakest record is not (C40, 900, 45, 3, 231)");
}

void criterion_joint_efficiency(Check& c) {
    const BaseMetal base;
    const double eff = joint_efficiency(292.0, base);
    c.require(within(eff, 0.9415, 0.9425),
              "efficiency " + fmt3(eff) + " outside [0.9415, 0.9425]");
    const std::string rendered = format_percent(eff);
    c.require(rendered == "94.2%", "rendered as '" + rendered + "', expected '94.2%'");
}

void criterion_metric_bands(Check& c) {
    const FeatureMatrix m = encode(embedded_fsw_dataset(), false);
    const ModelConfig config; // library defaults
    constexpr std::size_t kSeeds = 200;
    constexpr std::uint64_t kBase = 42;

    struct Reference {
        ModelKind kind;
        const char* label;
        double r2;
        double mse;
    };
    const std::vector<Reference> references{
        {ModelKind::tree, "tree", 0.894, 19.684},
        {ModelKind::gbm, "gbm", 0.893, 19.939},
        {ModelKind::forest, "forest", 0.926, 19.079},
    };

    double median_tree_r2 = 0.0, median_forest_r2 = 0.0;
    for (const Reference& ref : references) {
        const SweepSummary s = run_sweep(ref.kind, m, 0.2, kBase, kSeeds, config);
        c.require(within(ref.r2, s.r2.p05, s.r2.p95),
                  std::string(ref.label) + " reference R2 " + fmt3(ref.r2) +
                      " outside [" + fmt3(s.r2.p05) + ", " + fmt3(s.r2.p95) + "]");
        c.require(within(ref.mse, s.mse.p05, s.mse.p95),
                  std::string(ref.label) + " reference MSE " + fmt3(ref.mse) +
                      " outside [" + fmt3(s.mse.p05) + ", " + fmt3(s.mse.p95) + "]");
        if (ref.kind == ModelKind::tree) {
            median_tree_r2 = s.r2.median;
        }
        if (ref.kind == ModelKind::forest) {
            median_forest_r2 = s.r2.median;
        }
    }
    c.require(median_forest_r2 >= median_tree_r2 - 0.02,
              "median forest R2 " + fmt3(median_forest_r2) +
                  " trails median tree R2 " + fmt3(median_tree_r2) + " by over 0.02");
}

void criterion_importance_order(Check& c) {
    const FeatureMatrix m = encode(embedded_fsw_dataset(), true);
    const auto rows = testutil::iota_rows(m.n_rows);
    const ModelConfig config;

    std::vector<double> rotational, tool, welding, force;
    for (std::uint64_t seed = 42; seed < 92; ++seed) {
        const FittedModel model = train_model(ModelKind::forest, m, rows, config, seed);
        const ImportanceReport report =
            rank_features(model.importances(), m.feature_names, ModelKind::forest);
        for (const auto& [name, value] : report.entries) {
            if (name == "rotational_speed_rpm") rotational.push_back(value);
            if (name == "tool_material") tool.push_back(value);
            if (name == "welding_speed_mm_min") welding.push_back(value);
            if (name == "axial_force_kn") force.push_back(value);
        }
    }
    const double med_rot = percentile(rotational, 0.5);
    const double med_tool = percentile(tool, 0.5);
    const double med_weld = percentile(welding, 0.5);
    const double med_force = percentile(force, 0.5);
    c.require(med_rot >= 0.5,
              "median rotational-speed importance " + fmt3(med_rot) + " below 0.5");
    c.require(med_rot > med_weld && med_rot > med_force && med_rot > med_tool,
              "rotational speed is not ranked first by median importance");
    c.require(med_tool <= 0.10,
              "median summed tool importance " + fmt3(med_tool) + " above 0.10");
}

void criterion_recommendation(Check& c) {
    const FeatureMatrix m = encode(embedded_fsw_dataset(), false);
    const ModelConfig config;
    const ParameterGrid grid;
    const BaseMetal base;

    std::size_t hits = 0;
    double pred_lo = 1e300, pred_hi = -1e300;
    constexpr std::uint64_t kFirst = 42, kLast = 92;
    for (std::uint64_t seed = kFirst; seed < kLast; ++seed) {
        const SplitPair split = train_test_split(m, 0.2, seed);
        const FittedModel model =
            train_model(ModelKind::forest, m, split.train_indices, config, seed);
        const Recommendation rec = recommend(model, grid, base, 0);
        if (rec.setting.rotational_speed_rpm == 1500.0 &&
            rec.setting.welding_speed_mm_min == 25.0) {
            ++hits;
        }
        pred_lo = std::min(pred_lo, rec.predicted_uts_mpa);
        pred_hi = std::max(pred_hi, rec.predicted_uts_mpa);
    }
    const std::size_t total = kLast - kFirst;
    c.require(hits * 10 >= total * 9, "(1500 rpm, 25 mm/min) recommended in only " +
                                          std::to_string(hits) + "/" +
                                          std::to_string(total) + " seeds");
    c.require(pred_lo >= 281.0 && pred_hi <= 295.0,
              "predicted UTS range [" + fmt3(pred_lo) + ", " + fmt3(pred_hi) +
                  "] outside [281, 295]");
}

void criterion_split_oracle(Check& c) {
    const splitoracle::GridResult exhaustive = splitoracle::run_exhaustive_grid();
    c.require(exhaustive.cases > 600000,
              "exhaustive sweep covered only " + std::to_string(exhaustive.cases) +
                  " cases");
    c.require(exhaustive.failures == 0,
              std::to_string(exhaustive.failures) + "/" +
                  std::to_string(exhaustive.cases) + " exhaustive disagreements, first: " +
                  exhaustive.first_failure);

    const splitoracle::GridResult randomized = splitoracle::run_randomized_grid(20000, 99);
    c.require(randomized.failures == 0,
              std::to_string(randomized.failures) + "/" +
                  std::to_string(randomized.cases) +
                  " randomized disagreements, first: " + randomized.first_failure);
}

void criterion_numerical_identities(Check& c) {
    c.require(impurity(std::vector<double>{5, 5, 5}) == 0.0, "impurity([5,5,5]) != 0");
    c.require(impurity(std::vector<double>{0, 0, 10, 10}) == 25.0,
              "impurity([0,0,10,10]) != 25");
    c.require(impurity(std::vector<double>{7}) == 0.0, "impurity([7]) != 0");

    const std::vector<double> step{0, 0, 10, 10};
    c.require(information_gain(step, std::vector<double>{0, 0},
                               std::vector<double>{10, 10}) == 25.0,
              "IG of the clean step split != 25");
    c.require(information_gain(std::vector<double>{1, 2, 3, 4},
                               std::vector<double>{1, 2},
                               std::vector<double>{3, 4}) == 1.0,
              "IG of the ramp split != 1");

    const FeatureMatrix toy = testutil::make_matrix_1d({1, 2, 3, 4}, {0, 0, 10, 10});
    const auto split = best_split(toy, testutil::iota_rows(4), std::vector<std::size_t>{0});
    c.require(split && split->feature_index == 0 && split->threshold == 2.5 &&
                  split->gain == 25.0,
              "best_split on the step dataset is not (feature 0, 2.5, gain 25)");

    const std::vector<double> y{0, 10};
    c.require(mse(y, y) == 0.0 && mse(y, std::vector<double>{5, 5}) == 25.0,
              "mse examples failed");
    c.require(mae(y, std::vector<double>{5, 5}) == 5.0, "mae example failed");
    c.require(r_squared(y, y) == 1.0 &&
                  r_squared(y, std::vector<double>{5, 5}) == 0.0 &&
                  r_squared(y, std::vector<double>{10, 0}) == -3.0,
              "r_squared examples failed");

    const FeatureMatrix pair = testutil::make_matrix_1d({1, 2}, {0, 10});
    const GbmModel gbm = fit_gbm(pair, testutil::iota_rows(2), 1, 1.0, TreeHyperparams{});
    const std::vector<double> yhat{predict_gbm(gbm, std::vector<double>{1}),
                                   predict_gbm(gbm, std::vector<double>{2})};
    c.require(mse(y, yhat) == 0.0, "one-stage full-strength boosting left nonzero MSE");

    const FeatureMatrix m = encode(embedded_fsw_dataset(), false);
    const ForestModel forest =
        fit_forest(m, testutil::iota_rows(m.n_rows), 10, {}, m.n_cols, 42);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        double sum = 0.0;
        for (const RegressionTree& tree : forest.trees) {
            sum += predict_tree(tree, m.row(r));
        }
        const double mean = sum / static_cast<double>(forest.trees.size());
        if (std::fabs(predict_forest(forest, m.row(r)) - mean) > 1e-12) {
            c.require(false, "forest prediction deviates from the tree mean at row " +
                                 std::to_string(r));
            break;
        }
    }
}

void criterion_determinism(Check& c) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fswml_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    const auto run = [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        return run_cli(args, out, err);
    };

    const fs::path rep_a = dir / "rep_a.json", rep_b = dir / "rep_b.json";
    const std::vector<std::string> eval_args{"evaluate", "--model", "forest",
                                             "--trees", "40", "--seed", "42"};
    for (const auto* p : {&rep_a, &rep_b}) {
        auto args = eval_args;
        args.insert(args.end(), {"--out", p->string()});
        c.require(run(args) == 0, "evaluate run failed");
    }
    c.require(!slurp(rep_a).empty() && slurp(rep_a) == slurp(rep_b),
              "evaluate reports are not byte-identical");

    const fs::path mod_a = dir / "mod_a.json", mod_b = dir / "mod_b.json";
    for (const auto* p : {&mod_a, &mod_b}) {
        c.require(run({"train", "--model", "forest", "--trees", "40", "--seed", "42",
                       "--out", p->string()}) == 0,
                  "train run failed");
    }
    c.require(!slurp(mod_a).empty() && slurp(mod_a) == slurp(mod_b),
              "model files are not byte-identical");

    // Save/load prediction identity across every embedded row.
    const FeatureMatrix m = encode(embedded_fsw_dataset(), false);
    const SplitPair split = train_test_split(m, 0.2, 42);
    ModelConfig config;
    config.n_trees = 40;
    const FittedModel direct =
        train_model(ModelKind::forest, m, split.train_indices, config, 42);
    const FittedModel loaded = load_model(mod_a.string());
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        if (loaded.predict(m.row(r)) != direct.predict(m.row(r))) {
            c.require(false,
                      "loaded model prediction differs at row " + std::to_string(r));
            break;
        }
    }
    fs::remove_all(dir);
}

struct Criterion {
    int id;
    std::string title;
    double budget_ms;
    std::function<void(Check&)> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "dataset fidelity (52 runs, strongest and weakest settings)", 1.0,
         criterion_dataset_fidelity},
        {2, "joint efficiency 292/310 renders as 94.2%", 1.0, criterion_joint_efficiency},
        {3, "reference metrics sit inside 200-seed percentile bands", 60000.0,
         criterion_metric_bands},
        {4, "rotational speed dominates importances, tool is negligible", 10000.0,
         criterion_importance_order},
        {5, "recommended setting is 1500 rpm at 25 mm/min", 10000.0,
         criterion_recommendation},
        {6, "best_split matches the exact-arithmetic oracle", 5000.0,
         criterion_split_oracle},
        {7, "numerical identities hold exactly", 1000.0, criterion_numerical_identities},
        {8, "byte-identical artifacts and save/load identity", 5000.0,
         criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("unexpected exception: ") + e.what());
        }
        const auto stop = std::chrono::steady_clock::now();
        const double ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        check.require(ms <= criterion.budget_ms,
                      "took " + format_ms(ms) + ", budget " +
                          format_ms(criterion.budget_ms));

        std::cout << (check.ok ? "PASS" : "FAIL") << "  criterion " << criterion.id
                  << ": " << criterion.title << " [" << format_ms(ms) << "]";
        if (!check.ok) {
            std::cout << " - " << check.detail.str();
            ++failures;
        }
        std::cout << "\n";
    }
    std::cout << "acceptance: " << (criteria.size() - failures) << "/" << criteria.size()
              << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
