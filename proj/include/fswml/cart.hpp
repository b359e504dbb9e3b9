#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fswml/dataset.hpp"
#include "fswml/error.hpp"

// Regression decision tree: variance impurity, information-gain split search,
// recursive partitioning, prediction and impurity-decrease importances.

namespace fswml {

struct TreeHyperparams {
    std::optional<std::size_t> max_depth; // nullopt = unlimited
    std::size_t min_samples_split = 2;
    double min_gain = 0.0;

    void validate() const {
        if (min_samples_split < 2) {
            throw Error("tree hyperparams: min_samples_split must be >= 2");
        }
        if (!(min_gain >= 0.0)) {
            throw Error("tree hyperparams: min_gain must be >= 0");
        }
    }
};

struct SplitCandidate {
    std::size_t feature_index = 0;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
    std::size_t right_count = 0;
};

/// Binary tree node. Internal nodes carry the split and both children;
/// leaves carry the mean target of their training rows.
struct TreeNode {
    std::size_t n = 0;
    double prediction = 0.0;     // leaves
    std::size_t feature_index = 0; // internal
    double threshold = 0.0;
    double gain = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;

    bool is_leaf() const { return left == nullptr; }

    static std::unique_ptr<TreeNode> make_leaf(double prediction, std::size_t n) {
        auto node = std::make_unique<TreeNode>();
        node->prediction = prediction;
        node->n = n;
        return node;
    }

    static std::unique_ptr<TreeNode> make_internal(std::size_t feature, double threshold,
                                                   double gain, std::size_t n,
                                                   std::unique_ptr<TreeNode> left,
                                                   std::unique_ptr<TreeNode> right) {
        auto node = std::make_unique<TreeNode>();
        node->feature_index = feature;
        node->threshold = threshold;
        node->gain = gain;
        node->n = n;
        node->left = std::move(left);
        node->right = std::move(right);
        return node;
    }

    std::unique_ptr<TreeNode> clone() const {
        auto node = std::make_unique<TreeNode>(TreeNode{
            n, prediction, feature_index, threshold, gain, nullptr, nullptr});
        if (!is_leaf()) {
            node->left = left->clone();
            node->right = right->clone();
        }
        return node;
    }
};

struct RegressionTree {
    std::unique_ptr<TreeNode> root;
    std::vector<std::string> feature_names;
    TreeHyperparams hyperparams;

    RegressionTree clone() const {
        return RegressionTree{root ? root->clone() : nullptr, feature_names, hyperparams};
    }
};

// ---------------------------------------------------------------------------
// Impurity and gain

/// Population variance: mean squared deviation from the mean. Zero iff all
/// targets are equal (the all-equal case is detected exactly, so constant
/// nodes never produce spurious round-off gain).
inline double impurity(std::span<const double> targets) {
    if (targets.empty()) {
        throw Error("impurity: empty target vector");
    }
    const double first = targets.front();
    bool all_equal = true;
    double sum = 0.0;
    for (const double y : targets) {
        sum += y;
        all_equal = all_equal && y == first;
    }
    if (all_equal) {
        return 0.0;
    }
    const double mean = sum / static_cast<double>(targets.size());
    double sq = 0.0;
    for (const double y : targets) {
        const double d = y - mean;
        sq += d * d;
    }
    return sq / static_cast<double>(targets.size());
}

/// Information gain of a split: parent impurity minus the sample-weighted
/// child impurities. Non-negative for any true partition of the parent.
inline double information_gain(std::span<const double> parent, std::span<const double> left,
                               std::span<const double> right) {
    if (left.empty() || right.empty()) {
        throw Error("information_gain: empty child");
    }
    if (left.size() + right.size() != parent.size()) {
        throw Error("information_gain: child sizes do not sum to parent size");
    }
    const double n = static_cast<double>(parent.size());
    const double w_left = static_cast<double>(left.size()) / n;
    const double w_right = static_cast<double>(right.size()) / n;
    return impurity(parent) - (w_left * impurity(left) + w_right * impurity(right));
}

// ---------------------------------------------------------------------------
// Split search

namespace detail {

inline std::vector<double> gather_targets(const FeatureMatrix& matrix,
                                          std::span<const std::size_t> rows,
                                          std::span<const double> target_override) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const std::size_t r : rows) {
        out.push_back(target_override.empty() ? matrix.targets[r] : target_override[r]);
    }
    return out;
}

inline double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

} // namespace detail

// Targets may be overridden per row so boosting can fit residuals on the
// same matrix; an empty override means "use matrix.targets".

/// Exhaustive best split over the candidate features. Thresholds are the
/// midpoints between consecutive distinct sorted values of each feature;
/// rows with value <= threshold go left. Returns the candidate with maximum
/// gain subject to gain > min_gain, or nullopt when no such candidate
/// exists. Ties are broken toward the lowest feature index, then the
/// smallest threshold, which makes fitted trees bit-reproducible.
inline std::optional<SplitCandidate> best_split(const FeatureMatrix& matrix,
                                                std::span<const std::size_t> rows,
                                                std::span<const std::size_t> candidate_features,
                                                double min_gain = 0.0,
                                                std::span<const double> target_override = {}) {
    if (rows.size() < 2) {
        throw Error("best_split: need at least 2 samples");
    }
    const std::vector<double> parent = detail::gather_targets(matrix, rows, target_override);
    const double n = static_cast<double>(rows.size());

    std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
    std::sort(features.begin(), features.end());

    std::optional<SplitCandidate> best;
    std::vector<double> values;
    for (const std::size_t f : features) {
        values.clear();
        for (const std::size_t r : rows) {
            values.push_back(matrix.at(r, f));
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());

        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double a = values[i];
            const double b = values[i + 1];
            double threshold = a + (b - a) / 2.0;
            // Adjacent doubles can make the midpoint collapse onto b; any
            // value in [a, b) keeps the partition valid.
            if (!(threshold < b)) {
                threshold = a;
            }
            double left_sum = 0.0, right_sum = 0.0;
            std::size_t left_count = 0, right_count = 0;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (matrix.at(rows[k], f) <= threshold) {
                    left_sum += parent[k];
                    ++left_count;
                } else {
                    right_sum += parent[k];
                    ++right_count;
                }
            }
            // Variance reduction in its between-groups form
            // (n_l*n_r/n^2)*(mean_l - mean_r)^2. Algebraically identical to
            // parent impurity minus weighted child impurities, but it yields
            // an exact 0.0 whenever the child means coincide, so a useless
            // split can never clear min_gain on round-off alone.
            const double delta = left_sum / static_cast<double>(left_count) -
                                 right_sum / static_cast<double>(right_count);
            const double gain = static_cast<double>(left_count) *
                                static_cast<double>(right_count) / (n * n) * delta * delta;
            if (gain > min_gain && (!best || gain > best->gain)) {
                best = SplitCandidate{f, threshold, gain, left_count, right_count};
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Fitting and prediction

/// Per-node candidate-feature policy; called once per node in build order
/// (root first, then the left subtree, then the right). An empty policy
/// means "all features".
using FeatureSampler = std::function<std::vector<std::size_t>(std::size_t n_features)>;

namespace detail {

inline std::unique_ptr<TreeNode> build_node(const FeatureMatrix& matrix,
                                            std::span<const std::size_t> rows,
                                            const TreeHyperparams& hp,
                                            const FeatureSampler& sampler,
                                            std::span<const double> target_override,
                                            std::size_t depth) {
    const std::vector<double> targets = gather_targets(matrix, rows, target_override);
    const double prediction = mean_of(targets);

    const bool at_depth_limit = hp.max_depth && depth >= *hp.max_depth;
    if (at_depth_limit || rows.size() < hp.min_samples_split) {
        return TreeNode::make_leaf(prediction, rows.size());
    }

    std::vector<std::size_t> features;
    if (sampler) {
        features = sampler(matrix.n_cols);
    } else {
        features.resize(matrix.n_cols);
        for (std::size_t f = 0; f < matrix.n_cols; ++f) {
            features[f] = f;
        }
    }

    const auto split = best_split(matrix, rows, features, hp.min_gain, target_override);
    if (!split) {
        return TreeNode::make_leaf(prediction, rows.size());
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (const std::size_t r : rows) {
        if (matrix.at(r, split->feature_index) <= split->threshold) {
            left_rows.push_back(r);
        } else {
            right_rows.push_back(r);
        }
    }
    auto left = build_node(matrix, left_rows, hp, sampler, target_override, depth + 1);
    auto right = build_node(matrix, right_rows, hp, sampler, target_override, depth + 1);
    return TreeNode::make_internal(split->feature_index, split->threshold, split->gain,
                                   rows.size(), std::move(left), std::move(right));
}

} // namespace detail

inline RegressionTree fit_tree(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                               const TreeHyperparams& hyperparams = {},
                               const FeatureSampler& sampler = {},
                               std::span<const double> target_override = {}) {
    hyperparams.validate();
    if (rows.empty()) {
        throw Error("fit_tree: empty row set");
    }
    RegressionTree tree;
    tree.feature_names = matrix.feature_names;
    tree.hyperparams = hyperparams;
    tree.root = detail::build_node(matrix, rows, hyperparams, sampler, target_override, 0);
    return tree;
}

inline double predict_node(const TreeNode& node, std::span<const double> x) {
    const TreeNode* cur = &node;
    while (!cur->is_leaf()) {
        cur = x[cur->feature_index] <= cur->threshold ? cur->left.get() : cur->right.get();
    }
    return cur->prediction;
}

inline double predict_tree(const RegressionTree& tree, std::span<const double> x) {
    if (x.size() != tree.feature_names.size()) {
        throw Error("predict_tree: expected " + std::to_string(tree.feature_names.size()) +
                    " features, got " + std::to_string(x.size()));
    }
    return predict_node(*tree.root, x);
}

// ---------------------------------------------------------------------------
// Importances

namespace detail {

inline void accumulate_importances(const TreeNode& node, double root_n,
                                   std::vector<double>& acc) {
    if (node.is_leaf()) {
        return;
    }
    acc[node.feature_index] += (static_cast<double>(node.n) / root_n) * node.gain;
    accumulate_importances(*node.left, root_n, acc);
    accumulate_importances(*node.right, root_n, acc);
}

/// Normalizes to sum 1; an all-zero vector is left untouched.
inline void normalize_importances(std::vector<double>& v) {
    double total = 0.0;
    for (const double x : v) {
        total += x;
    }
    if (total > 0.0) {
        for (double& x : v) {
            x /= total;
        }
    }
}

} // namespace detail

/// Mean-decrease-in-impurity importances: per feature, the sum over internal
/// nodes of (node.n / root.n) * gain, normalized to sum 1.
inline std::vector<double> tree_importances(const RegressionTree& tree) {
    std::vector<double> acc(tree.feature_names.size(), 0.0);
    if (tree.root) {
        detail::accumulate_importances(*tree.root, static_cast<double>(tree.root->n), acc);
    }
    detail::normalize_importances(acc);
    return acc;
}

// ---------------------------------------------------------------------------
// Text rendering

namespace detail {

inline void render_node(const TreeNode& node, const std::vector<std::string>& names,
                        std::ostream& out, std::size_t depth) {
    for (std::size_t i = 0; i < depth; ++i) {
        out << "  ";
    }
    if (node.is_leaf()) {
        out << "-> " << format_double(node.prediction) << " MPa (n=" << node.n << ")\n";
        return;
    }
    out << "if " << names[node.feature_index] << " <= " << format_double(node.threshold)
        << " (gain=" << format_double(node.gain) << ", n=" << node.n << ")\n";
    render_node(*node.left, names, out, depth + 1);
    render_node(*node.right, names, out, depth + 1);
}

} // namespace detail

/// Indented text form: internal nodes as `if <feature> <= <threshold>
/// (gain=<g>, n=<n>)`, the true branch first, leaves as `-> <prediction> MPa
/// (n=<n>)`.
inline void render_tree_text(const RegressionTree& tree, std::ostream& out) {
    if (tree.root) {
        detail::render_node(*tree.root, tree.feature_names, out, 0);
    }
}

} // namespace fswml
