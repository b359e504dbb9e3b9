#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fswml/dataset.hpp"
#include "fswml/error.hpp"
#include "fswml/model.hpp"

// Grid search over the process-parameter space: predict every setting with a
// trained model and recommend the one with maximum predicted UTS, reported
// against the base metal's strength.

namespace fswml {

/// Candidate levels per parameter; defaults are the experimental levels.
struct ParameterGrid {
    std::vector<double> rotational_levels{900, 1200, 1500};
    std::vector<double> welding_levels{25, 35, 45};
    std::vector<double> force_levels{2, 3, 4};
    std::vector<ToolMaterial> tool_levels{ToolMaterial::H13, ToolMaterial::C40,
                                          ToolMaterial::HSS};

    void validate() const {
        if (rotational_levels.empty() || welding_levels.empty() || force_levels.empty() ||
            tool_levels.empty()) {
            throw Error("parameter grid: every level list must be non-empty");
        }
        for (const auto& levels : {rotational_levels, welding_levels, force_levels}) {
            for (const double v : levels) {
                if (!(v > 0)) {
                    throw Error("parameter grid: levels must be positive");
                }
            }
        }
    }
};

/// Evenly subdivides each numeric range of `base` into `steps` levels, for
/// exploring between the experimental settings. Tree models are piecewise
/// constant, so this only refines where thresholds actually fall.
inline ParameterGrid dense_grid(const ParameterGrid& base, std::size_t steps) {
    base.validate();
    if (steps < 2) {
        throw Error("dense_grid: need at least 2 steps");
    }
    const auto subdivide = [steps](const std::vector<double>& levels) {
        const double lo = *std::min_element(levels.begin(), levels.end());
        const double hi = *std::max_element(levels.begin(), levels.end());
        std::vector<double> out;
        for (std::size_t i = 0; i < steps; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
            out.push_back(lo + t * (hi - lo));
        }
        return out;
    };
    ParameterGrid grid = base;
    grid.rotational_levels = subdivide(base.rotational_levels);
    grid.welding_levels = subdivide(base.welding_levels);
    grid.force_levels = subdivide(base.force_levels);
    return grid;
}

struct GridSetting {
    double rotational_speed_rpm = 0.0;
    double welding_speed_mm_min = 0.0;
    double axial_force_kn = 0.0;
    std::optional<ToolMaterial> tool;

    bool operator==(const GridSetting&) const = default;

    /// Feature vector in the training column order.
    std::vector<double> to_features() const {
        std::vector<double> x{rotational_speed_rpm, welding_speed_mm_min, axial_force_kn};
        if (tool) {
            for (std::size_t t = 0; t < kToolMaterialNames.size(); ++t) {
                x.push_back(*tool == static_cast<ToolMaterial>(t) ? 1.0 : 0.0);
            }
        }
        return x;
    }
};

/// Full Cartesian product in lexicographic order of the field lists
/// (rotational speed slowest, tool fastest when included).
inline std::vector<GridSetting> enumerate_grid(const ParameterGrid& grid, bool include_tool) {
    grid.validate();
    std::vector<GridSetting> settings;
    for (const double r : grid.rotational_levels) {
        for (const double w : grid.welding_levels) {
            for (const double f : grid.force_levels) {
                if (include_tool) {
                    for (const ToolMaterial t : grid.tool_levels) {
                        settings.push_back(GridSetting{r, w, f, t});
                    }
                } else {
                    settings.push_back(GridSetting{r, w, f, std::nullopt});
                }
            }
        }
    }
    return settings;
}

struct BaseMetal {
    std::string name = "AA6061";
    double tensile_strength_mpa = 310.0;
};

inline double joint_efficiency(double uts_mpa, const BaseMetal& base) {
    if (!(uts_mpa > 0)) {
        throw Error("joint_efficiency: uts must be positive");
    }
    if (!(base.tensile_strength_mpa > 0)) {
        throw Error("joint_efficiency: base tensile strength must be positive");
    }
    return uts_mpa / base.tensile_strength_mpa;
}

/// Fraction as a percentage with one decimal, e.g. 0.9419 -> "94.2%".
inline std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
    return buf;
}

struct Recommendation {
    GridSetting setting;
    double predicted_uts_mpa = 0.0;
    double joint_efficiency = 0.0;
    /// Next-best settings sorted by predicted UTS descending.
    std::vector<std::pair<GridSetting, double>> runner_ups;
};

/// Predicts every grid setting and returns the argmax plus the top-k
/// runner-ups. Ties keep the earlier setting in enumeration order. Whether
/// the tool enters the feature vector is taken from the model itself.
inline Recommendation recommend(const FittedModel& model, const ParameterGrid& grid,
                                const BaseMetal& base, std::size_t top_k = 5) {
    const std::size_t p = model.feature_names().size();
    bool include_tool = false;
    if (p == 3 + kToolMaterialNames.size()) {
        include_tool = true;
    } else if (p != 3) {
        throw Error("recommend: model has " + std::to_string(p) +
                    " features, expected 3 or " +
                    std::to_string(3 + kToolMaterialNames.size()));
    }

    const std::vector<GridSetting> settings = enumerate_grid(grid, include_tool);
    std::vector<double> predictions;
    predictions.reserve(settings.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < settings.size(); ++i) {
        predictions.push_back(model.predict(settings[i].to_features()));
        if (predictions[i] > predictions[best]) {
            best = i;
        }
    }

    Recommendation rec;
    rec.setting = settings[best];
    rec.predicted_uts_mpa = predictions[best];
    rec.joint_efficiency = joint_efficiency(predictions[best], base);

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < settings.size(); ++i) {
        if (i != best) {
            order.push_back(i);
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return predictions[a] > predictions[b];
    });
    const std::size_t k = std::min(top_k, order.size());
    for (std::size_t i = 0; i < k; ++i) {
        rec.runner_ups.emplace_back(settings[order[i]], predictions[order[i]]);
    }
    return rec;
}

} // namespace fswml
