#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fswml/cart.hpp"
#include "fswml/ensemble.hpp"
#include "fswml/error.hpp"

// Uniform handle over the three regressors so evaluation, grid search and
// serialization do not care which one they hold.

namespace fswml {

enum class ModelKind { tree, forest, gbm };

inline std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::tree: return "tree";
    case ModelKind::forest: return "forest";
    case ModelKind::gbm: return "gbm";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view name) {
    if (name == "tree") return ModelKind::tree;
    if (name == "forest") return ModelKind::forest;
    if (name == "gbm") return ModelKind::gbm;
    throw Error("unknown model kind '" + std::string(name) + "' (expected tree|forest|gbm)");
}

/// Hyperparameters for all model kinds; each trainer reads its own slice.
struct ModelConfig {
    TreeHyperparams tree_hp{};                     // tree + forest members
    std::size_t n_trees = 100;
    std::size_t max_features = 0;                  // 0 = all features
    bool bootstrap = true;
    std::size_t n_stages = 100;
    double learning_rate = 0.1;
    TreeHyperparams stage_hp{std::size_t{3}, 2, 0.0}; // boosting stages stay shallow
};

class FittedModel {
public:
    explicit FittedModel(RegressionTree tree) : model_(std::move(tree)) {}
    explicit FittedModel(ForestModel forest) : model_(std::move(forest)) {}
    explicit FittedModel(GbmModel gbm) : model_(std::move(gbm)) {}

    ModelKind kind() const {
        if (std::holds_alternative<RegressionTree>(model_)) return ModelKind::tree;
        if (std::holds_alternative<ForestModel>(model_)) return ModelKind::forest;
        return ModelKind::gbm;
    }

    double predict(std::span<const double> x) const {
        if (const auto* tree = std::get_if<RegressionTree>(&model_)) {
            return predict_tree(*tree, x);
        }
        if (const auto* forest = std::get_if<ForestModel>(&model_)) {
            return predict_forest(*forest, x);
        }
        return predict_gbm(std::get<GbmModel>(model_), x);
    }

    std::vector<double> importances() const {
        if (const auto* tree = std::get_if<RegressionTree>(&model_)) {
            return tree_importances(*tree);
        }
        if (const auto* forest = std::get_if<ForestModel>(&model_)) {
            return forest_importances(*forest);
        }
        return gbm_importances(std::get<GbmModel>(model_));
    }

    const std::vector<std::string>& feature_names() const {
        if (const auto* tree = std::get_if<RegressionTree>(&model_)) {
            return tree->feature_names;
        }
        if (const auto* forest = std::get_if<ForestModel>(&model_)) {
            return forest->trees.front().feature_names;
        }
        return std::get<GbmModel>(model_).feature_names;
    }

    const RegressionTree& as_tree() const { return std::get<RegressionTree>(model_); }
    const ForestModel& as_forest() const { return std::get<ForestModel>(model_); }
    const GbmModel& as_gbm() const { return std::get<GbmModel>(model_); }

private:
    std::variant<RegressionTree, ForestModel, GbmModel> model_;
};

/// Trains the requested model on the given rows. The seed only feeds the
/// forest; trees and boosting are deterministic on their own.
inline FittedModel train_model(ModelKind kind, const FeatureMatrix& matrix,
                               std::span<const std::size_t> train_indices,
                               const ModelConfig& config, std::uint64_t seed) {
    switch (kind) {
    case ModelKind::tree:
        return FittedModel(fit_tree(matrix, train_indices, config.tree_hp));
    case ModelKind::forest: {
        const std::size_t max_features =
            config.max_features == 0 ? matrix.n_cols : config.max_features;
        return FittedModel(fit_forest(matrix, train_indices, config.n_trees,
                                      config.tree_hp, max_features, seed,
                                      config.bootstrap));
    }
    case ModelKind::gbm:
        return FittedModel(fit_gbm(matrix, train_indices, config.n_stages,
                                   config.learning_rate, config.stage_hp));
    }
    throw Error("train_model: invalid model kind");
}

} // namespace fswml
