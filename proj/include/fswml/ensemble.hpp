#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fswml/cart.hpp"
#include "fswml/dataset.hpp"
#include "fswml/error.hpp"
#include "fswml/prng.hpp"

// Ensembles on top of the regression tree: bootstrap-aggregated forests with
// mean prediction, and stagewise gradient boosting under squared loss.

namespace fswml {

// ---------------------------------------------------------------------------
// Random forest

/// Size-n sample of training rows drawn with replacement.
struct BootstrapSample {
    std::vector<std::size_t> indices;
    std::uint64_t seed = 0;
};

inline BootstrapSample draw_bootstrap(std::span<const std::size_t> train_indices,
                                      std::uint64_t seed, Xoshiro256StarStar& rng) {
    BootstrapSample sample;
    sample.seed = seed;
    const std::size_t n = train_indices.size();
    sample.indices.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        sample.indices.push_back(train_indices[rng.next_below(n)]);
    }
    return sample;
}

struct ForestModel {
    std::vector<RegressionTree> trees;
    std::vector<std::uint64_t> tree_seeds;
    std::size_t max_features = 0;
    std::uint64_t master_seed = 0;
    bool bootstrap = true;

    std::size_t n_trees() const { return trees.size(); }
};

/// Fits n_trees bagged trees. Per-tree seeds come from a splitmix64 chain on
/// master_seed; each tree's xoshiro stream first draws its bootstrap sample,
/// then one candidate-feature subset per node (build order: root, left
/// subtree, right subtree). Trees are therefore independent given their
/// seeds and the model is a pure function of its inputs.
///
/// bootstrap=false replaces every sample with the identity training set,
/// which makes a 1-tree, all-features forest coincide with a single fitted
/// tree.
inline ForestModel fit_forest(const FeatureMatrix& matrix,
                              std::span<const std::size_t> train_indices,
                              std::size_t n_trees, const TreeHyperparams& hyperparams,
                              std::size_t max_features, std::uint64_t master_seed,
                              bool bootstrap = true) {
    hyperparams.validate();
    if (train_indices.empty()) {
        throw Error("fit_forest: empty training set");
    }
    if (n_trees == 0) {
        throw Error("fit_forest: need at least one tree");
    }
    if (max_features < 1 || max_features > matrix.n_cols) {
        throw Error("fit_forest: max_features must be in [1, " +
                    std::to_string(matrix.n_cols) + "], got " +
                    std::to_string(max_features));
    }

    ForestModel model;
    model.max_features = max_features;
    model.master_seed = master_seed;
    model.bootstrap = bootstrap;
    SplitMix64 seed_chain(master_seed);
    model.tree_seeds.reserve(n_trees);
    for (std::size_t i = 0; i < n_trees; ++i) {
        model.tree_seeds.push_back(seed_chain.next());
    }

    model.trees.reserve(n_trees);
    for (std::size_t i = 0; i < n_trees; ++i) {
        Xoshiro256StarStar rng(model.tree_seeds[i]);
        std::vector<std::size_t> rows;
        if (bootstrap) {
            rows = draw_bootstrap(train_indices, model.tree_seeds[i], rng).indices;
        } else {
            rows.assign(train_indices.begin(), train_indices.end());
        }
        FeatureSampler sampler;
        if (max_features < matrix.n_cols) {
            sampler = [&rng, max_features](std::size_t n_features) {
                return sample_without_replacement(n_features, max_features, rng);
            };
        }
        model.trees.push_back(fit_tree(matrix, rows, hyperparams, sampler));
    }
    return model;
}

/// Arithmetic mean of the per-tree predictions.
inline double predict_forest(const ForestModel& model, std::span<const double> x) {
    if (model.trees.empty()) {
        throw Error("predict_forest: model has no trees");
    }
    double sum = 0.0;
    for (const RegressionTree& tree : model.trees) {
        sum += predict_tree(tree, x);
    }
    return sum / static_cast<double>(model.trees.size());
}

/// Mean of the per-tree normalized importance vectors, renormalized.
inline std::vector<double> forest_importances(const ForestModel& model) {
    if (model.trees.empty()) {
        return {};
    }
    std::vector<double> acc(model.trees.front().feature_names.size(), 0.0);
    for (const RegressionTree& tree : model.trees) {
        const std::vector<double> imp = tree_importances(tree);
        for (std::size_t f = 0; f < acc.size(); ++f) {
            acc[f] += imp[f];
        }
    }
    detail::normalize_importances(acc);
    return acc;
}

// ---------------------------------------------------------------------------
// Gradient boosting

struct GbmModel {
    double initial = 0.0; // training-target mean
    std::vector<RegressionTree> stages;
    double learning_rate = 0.1;
    std::vector<std::string> feature_names;

    std::size_t n_stages() const { return stages.size(); }
};

/// Stagewise boosting under squared loss: the first prediction is the
/// training mean, and each stage fits a tree to the current residuals
/// (the negative gradient), contributing learning_rate times its output.
inline GbmModel fit_gbm(const FeatureMatrix& matrix,
                        std::span<const std::size_t> train_indices, std::size_t n_stages,
                        double learning_rate, const TreeHyperparams& stage_hyperparams) {
    stage_hyperparams.validate();
    if (train_indices.empty()) {
        throw Error("fit_gbm: empty training set");
    }
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw Error("fit_gbm: learning_rate must be in (0, 1]");
    }

    GbmModel model;
    model.learning_rate = learning_rate;
    model.feature_names = matrix.feature_names;
    {
        double sum = 0.0;
        for (const std::size_t r : train_indices) {
            sum += matrix.targets[r];
        }
        model.initial = sum / static_cast<double>(train_indices.size());
    }

    // Current model value per training row, updated stage by stage.
    std::vector<double> fit_values(matrix.n_rows, 0.0);
    for (const std::size_t r : train_indices) {
        fit_values[r] = model.initial;
    }
    std::vector<double> residuals(matrix.n_rows, 0.0);

    model.stages.reserve(n_stages);
    for (std::size_t m = 0; m < n_stages; ++m) {
        for (const std::size_t r : train_indices) {
            residuals[r] = matrix.targets[r] - fit_values[r];
        }
        RegressionTree stage = fit_tree(matrix, train_indices, stage_hyperparams, {},
                                        residuals);
        for (const std::size_t r : train_indices) {
            fit_values[r] += learning_rate * predict_tree(stage, matrix.row(r));
        }
        model.stages.push_back(std::move(stage));
    }
    return model;
}

/// initial + learning_rate * (sum of stage outputs).
inline double predict_gbm(const GbmModel& model, std::span<const double> x) {
    if (x.size() != model.feature_names.size()) {
        throw Error("predict_gbm: expected " + std::to_string(model.feature_names.size()) +
                    " features, got " + std::to_string(x.size()));
    }
    double stage_sum = 0.0;
    for (const RegressionTree& stage : model.stages) {
        stage_sum += predict_tree(stage, x);
    }
    return model.initial + model.learning_rate * stage_sum;
}

inline std::vector<double> gbm_importances(const GbmModel& model) {
    if (model.stages.empty()) {
        return {};
    }
    std::vector<double> acc(model.stages.front().feature_names.size(), 0.0);
    for (const RegressionTree& stage : model.stages) {
        const std::vector<double> imp = tree_importances(stage);
        for (std::size_t f = 0; f < acc.size(); ++f) {
            acc[f] += imp[f];
        }
    }
    detail::normalize_importances(acc);
    return acc;
}

} // namespace fswml
