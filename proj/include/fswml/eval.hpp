#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fswml/dataset.hpp"
#include "fswml/error.hpp"
#include "fswml/model.hpp"

// Regression metrics (MSE / MAE / R^2), the train-then-measure loop, summary
// statistics, ranked feature importances and the multi-seed sweep.

namespace fswml {

// ---------------------------------------------------------------------------
// Metrics

namespace detail {

inline void check_metric_inputs(std::span<const double> y, std::span<const double> yhat,
                                const char* op) {
    if (y.size() != yhat.size()) {
        throw Error(std::string(op) + ": length mismatch (" + std::to_string(y.size()) +
                    " vs " + std::to_string(yhat.size()) + ")");
    }
    if (y.empty()) {
        throw Error(std::string(op) + ": empty input");
    }
}

} // namespace detail

inline double mse(std::span<const double> y, std::span<const double> yhat) {
    detail::check_metric_inputs(y, yhat, "mse");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - yhat[i];
        sum += e * e;
    }
    return sum / static_cast<double>(y.size());
}

inline double mae(std::span<const double> y, std::span<const double> yhat) {
    detail::check_metric_inputs(y, yhat, "mae");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sum += std::abs(y[i] - yhat[i]);
    }
    return sum / static_cast<double>(y.size());
}

/// 1 - SS_res/SS_tot with SS_tot about the mean of y itself (so the
/// evaluation set, not the training set, defines the baseline).
inline double r_squared(std::span<const double> y, std::span<const double> yhat) {
    detail::check_metric_inputs(y, yhat, "r_squared");
    if (y.size() < 2) {
        throw Error("r_squared: need at least 2 observations");
    }
    double mean = 0.0;
    for (const double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - yhat[i];
        const double d = y[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) {
        throw Error("r_squared: undefined for constant y (SS_tot = 0)");
    }
    return 1.0 - ss_res / ss_tot;
}

// ---------------------------------------------------------------------------
// Train-then-measure

/// One model's scores on one data split (the shape of the result tables).
struct MetricsReport {
    double mse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
    std::size_t n_test = 0;
    ModelKind model_kind = ModelKind::tree;
    std::uint64_t seed = 0;
};

/// Trains on the split's train rows, predicts its test rows and scores the
/// predictions. Pure in (matrix, split, config, seed).
inline MetricsReport evaluate(ModelKind kind, const FeatureMatrix& matrix,
                              const SplitPair& split, const ModelConfig& config,
                              std::uint64_t seed) {
    const FittedModel model = train_model(kind, matrix, split.train_indices, config, seed);
    std::vector<double> y, yhat;
    y.reserve(split.test_indices.size());
    yhat.reserve(split.test_indices.size());
    for (const std::size_t r : split.test_indices) {
        y.push_back(matrix.targets[r]);
        yhat.push_back(model.predict(matrix.row(r)));
    }
    MetricsReport report;
    report.mse = mse(y, yhat);
    report.mae = mae(y, yhat);
    report.r2 = r_squared(y, yhat);
    report.n_test = y.size();
    report.model_kind = kind;
    report.seed = seed;
    return report;
}

// ---------------------------------------------------------------------------
// Summary statistics

struct ColumnStats {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0; // population
};

struct SummaryStats {
    std::vector<ColumnStats> columns; // rotational, welding, force, uts
    /// Pearson correlation of each numeric feature with UTS, feature order.
    std::vector<std::pair<std::string, double>> uts_correlations;
};

namespace detail {

inline ColumnStats column_stats(const std::string& name, std::span<const double> v) {
    ColumnStats s;
    s.name = name;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (const double x : v) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(v.size());
    double sq = 0.0;
    for (const double x : v) {
        const double d = x - s.mean;
        sq += d * d;
    }
    s.stddev = std::sqrt(sq / static_cast<double>(v.size()));
    return s;
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) {
        return 0.0;
    }
    return cov / std::sqrt(va * vb);
}

} // namespace detail

inline SummaryStats summarize(const Dataset& dataset) {
    std::vector<double> rpm, weld, force, uts;
    for (const ProcessRecord& r : dataset.records()) {
        rpm.push_back(r.rotational_speed_rpm);
        weld.push_back(r.welding_speed_mm_min);
        force.push_back(r.axial_force_kn);
        uts.push_back(r.uts_mpa);
    }
    SummaryStats stats;
    stats.columns.push_back(detail::column_stats("rotational_speed_rpm", rpm));
    stats.columns.push_back(detail::column_stats("welding_speed_mm_min", weld));
    stats.columns.push_back(detail::column_stats("axial_force_kn", force));
    stats.columns.push_back(detail::column_stats("uts_mpa", uts));
    stats.uts_correlations = {
        {"rotational_speed_rpm", detail::pearson(rpm, uts)},
        {"welding_speed_mm_min", detail::pearson(weld, uts)},
        {"axial_force_kn", detail::pearson(force, uts)},
    };
    return stats;
}

// ---------------------------------------------------------------------------
// Importance report

struct ImportanceReport {
    std::vector<std::pair<std::string, double>> entries; // descending importance
    ModelKind model_kind = ModelKind::forest;
};

/// Sorts (name, importance) pairs descending. One-hot tool columns (named
/// "tool=...") are first summed into a single "tool_material" entry, so the
/// report has one row per physical input. Ties keep the lower feature index
/// first.
inline ImportanceReport rank_features(std::span<const double> importances,
                                      std::span<const std::string> names,
                                      ModelKind kind = ModelKind::forest) {
    if (importances.size() != names.size()) {
        throw Error("rank_features: got " + std::to_string(importances.size()) +
                    " importances for " + std::to_string(names.size()) + " names");
    }
    struct Entry {
        std::string name;
        double importance;
        std::size_t first_index;
    };
    std::vector<Entry> entries;
    bool tool_seen = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].starts_with("tool=")) {
            if (!tool_seen) {
                entries.push_back(Entry{"tool_material", importances[i], i});
                tool_seen = true;
            } else {
                for (Entry& e : entries) {
                    if (e.name == "tool_material") {
                        e.importance += importances[i];
                    }
                }
            }
        } else {
            entries.push_back(Entry{names[i], importances[i], i});
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.importance != b.importance) {
            return a.importance > b.importance;
        }
        return a.first_index < b.first_index;
    });
    ImportanceReport report;
    report.model_kind = kind;
    for (const Entry& e : entries) {
        report.entries.emplace_back(e.name, e.importance);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Seed sweep

/// Percentile by linear interpolation between order statistics
/// (h = q * (n - 1)), the common spreadsheet/NumPy definition.
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw Error("percentile: empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error("percentile: q must be in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= values.size()) {
        return values.back();
    }
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

struct MetricBand {
    double p05 = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    double mean = 0.0;
};

struct SweepSummary {
    ModelKind model_kind = ModelKind::tree;
    std::uint64_t base_seed = 0;
    std::size_t n_seeds = 0;
    MetricBand mse;
    MetricBand mae;
    MetricBand r2;
    std::vector<MetricsReport> per_seed;
};

namespace detail {

inline MetricBand band_of(std::vector<double> values) {
    MetricBand band;
    band.p05 = percentile(values, 0.05);
    band.median = percentile(values, 0.50);
    band.p95 = percentile(values, 0.95);
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    band.mean = sum / static_cast<double>(values.size());
    return band;
}

} // namespace detail

/// Re-runs split+train+evaluate for seeds base_seed .. base_seed+n_seeds-1
/// and summarizes each metric's distribution. The per-seed reports come back
/// in seed order, so aggregation does not depend on evaluation order.
inline SweepSummary run_sweep(ModelKind kind, const FeatureMatrix& matrix,
                              double test_ratio, std::uint64_t base_seed,
                              std::size_t n_seeds, const ModelConfig& config) {
    if (n_seeds == 0) {
        throw Error("run_sweep: need at least one seed");
    }
    SweepSummary summary;
    summary.model_kind = kind;
    summary.base_seed = base_seed;
    summary.n_seeds = n_seeds;
    summary.per_seed.resize(n_seeds);
    for (std::size_t i = 0; i < n_seeds; ++i) {
        const std::uint64_t seed = base_seed + i;
        const SplitPair split = split_indices(matrix.n_rows, test_ratio, seed);
        summary.per_seed[i] = evaluate(kind, matrix, split, config, seed);
    }
    std::vector<double> mses, maes, r2s;
    for (const MetricsReport& r : summary.per_seed) {
        mses.push_back(r.mse);
        maes.push_back(r.mae);
        r2s.push_back(r.r2);
    }
    summary.mse = detail::band_of(std::move(mses));
    summary.mae = detail::band_of(std::move(maes));
    summary.r2 = detail::band_of(std::move(r2s));
    return summary;
}

} // namespace fswml
