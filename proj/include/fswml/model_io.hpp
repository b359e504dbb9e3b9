#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fswml/error.hpp"
#include "fswml/model.hpp"

// JSON persistence for fitted models.
//
// Layout (format_version 1):
//   {
//     "format_version": 1,
//     "model_kind": "tree" | "forest" | "gbm",
//     "feature_names": [...],
//     "hyperparameters": { ... },
//     "model": { ... },                  // kind-specific structure
//     "training_fingerprint": {
//       "dataset_hash": "<fnv1a64 of the canonical csv>",
//       "seed": u64, "test_ratio": f,
//       "train_indices": [...], "test_indices": [...]
//     }
//   }
// Trees are nested node objects: internal nodes {feature, threshold, gain,
// n, left, right}, leaves {prediction, n}. Doubles are written in their
// shortest round-trip form, so load(save(m)) predicts bit-identically to m.

namespace fswml {

inline constexpr int kModelFormatVersion = 1;

struct TrainingFingerprint {
    std::string dataset_hash;
    std::uint64_t seed = 0;
    double test_ratio = 0.0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// FNV-1a 64-bit over arbitrary bytes, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace detail {

using nlohmann::json;

inline json node_to_json(const TreeNode& node) {
    if (node.is_leaf()) {
        return json{{"prediction", node.prediction}, {"n", node.n}};
    }
    return json{{"feature", node.feature_index}, {"threshold", node.threshold},
                {"gain", node.gain},             {"n", node.n},
                {"left", node_to_json(*node.left)}, {"right", node_to_json(*node.right)}};
}

inline std::unique_ptr<TreeNode> node_from_json(const json& j) {
    if (j.contains("prediction")) {
        return TreeNode::make_leaf(j.at("prediction").get<double>(),
                                   j.at("n").get<std::size_t>());
    }
    return TreeNode::make_internal(
        j.at("feature").get<std::size_t>(), j.at("threshold").get<double>(),
        j.at("gain").get<double>(), j.at("n").get<std::size_t>(),
        node_from_json(j.at("left")), node_from_json(j.at("right")));
}

inline json hyperparams_to_json(const TreeHyperparams& hp) {
    json j;
    j["max_depth"] = hp.max_depth ? json(*hp.max_depth) : json(nullptr);
    j["min_samples_split"] = hp.min_samples_split;
    j["min_gain"] = hp.min_gain;
    return j;
}

inline TreeHyperparams hyperparams_from_json(const json& j) {
    TreeHyperparams hp;
    if (!j.at("max_depth").is_null()) {
        hp.max_depth = j.at("max_depth").get<std::size_t>();
    }
    hp.min_samples_split = j.at("min_samples_split").get<std::size_t>();
    hp.min_gain = j.at("min_gain").get<double>();
    return hp;
}

inline json tree_to_json(const RegressionTree& tree) {
    return json{{"root", node_to_json(*tree.root)}};
}

inline RegressionTree tree_from_json(const json& j, std::vector<std::string> names,
                                     const TreeHyperparams& hp) {
    RegressionTree tree;
    tree.feature_names = std::move(names);
    tree.hyperparams = hp;
    tree.root = node_from_json(j.at("root"));
    return tree;
}

} // namespace detail

inline nlohmann::json model_to_json(const FittedModel& model,
                                    const TrainingFingerprint& fingerprint) {
    using nlohmann::json;
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["model_kind"] = std::string(to_string(model.kind()));
    doc["feature_names"] = model.feature_names();
    doc["training_fingerprint"] = json{{"dataset_hash", fingerprint.dataset_hash},
                                       {"seed", fingerprint.seed},
                                       {"test_ratio", fingerprint.test_ratio},
                                       {"train_indices", fingerprint.train_indices},
                                       {"test_indices", fingerprint.test_indices}};
    switch (model.kind()) {
    case ModelKind::tree: {
        const RegressionTree& tree = model.as_tree();
        doc["hyperparameters"] = detail::hyperparams_to_json(tree.hyperparams);
        doc["model"] = detail::tree_to_json(tree);
        break;
    }
    case ModelKind::forest: {
        const ForestModel& forest = model.as_forest();
        doc["hyperparameters"] =
            detail::hyperparams_to_json(forest.trees.front().hyperparams);
        doc["hyperparameters"]["n_trees"] = forest.n_trees();
        doc["hyperparameters"]["max_features"] = forest.max_features;
        doc["hyperparameters"]["bootstrap"] = forest.bootstrap;
        json trees = json::array();
        for (const RegressionTree& tree : forest.trees) {
            trees.push_back(detail::tree_to_json(tree));
        }
        doc["model"] = json{{"master_seed", forest.master_seed},
                            {"tree_seeds", forest.tree_seeds},
                            {"trees", std::move(trees)}};
        break;
    }
    case ModelKind::gbm: {
        const GbmModel& gbm = model.as_gbm();
        doc["hyperparameters"] =
            gbm.stages.empty() ? detail::hyperparams_to_json(TreeHyperparams{})
                               : detail::hyperparams_to_json(gbm.stages.front().hyperparams);
        doc["hyperparameters"]["n_stages"] = gbm.n_stages();
        doc["hyperparameters"]["learning_rate"] = gbm.learning_rate;
        json stages = json::array();
        for (const RegressionTree& stage : gbm.stages) {
            stages.push_back(detail::tree_to_json(stage));
        }
        doc["model"] = json{{"initial", gbm.initial},
                            {"learning_rate", gbm.learning_rate},
                            {"stages", std::move(stages)}};
        break;
    }
    }
    return doc;
}

inline FittedModel model_from_json(const nlohmann::json& doc,
                                   TrainingFingerprint* fingerprint_out = nullptr) {
    using nlohmann::json;
    const auto require = [&doc](const char* key) -> const json& {
        if (!doc.contains(key)) {
            throw Error(std::string("model file: missing '") + key + "' section");
        }
        return doc.at(key);
    };
    const int version = require("format_version").get<int>();
    if (version != kModelFormatVersion) {
        throw Error("model file: unsupported format_version " + std::to_string(version) +
                    " (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    const ModelKind kind = parse_model_kind(require("model_kind").get<std::string>());
    auto names = require("feature_names").get<std::vector<std::string>>();
    const json& hp_json = require("hyperparameters");
    const json& body = require("model");

    if (fingerprint_out && doc.contains("training_fingerprint")) {
        const json& fp = doc.at("training_fingerprint");
        fingerprint_out->dataset_hash = fp.at("dataset_hash").get<std::string>();
        fingerprint_out->seed = fp.at("seed").get<std::uint64_t>();
        fingerprint_out->test_ratio = fp.at("test_ratio").get<double>();
        fingerprint_out->train_indices = fp.at("train_indices").get<std::vector<std::size_t>>();
        fingerprint_out->test_indices = fp.at("test_indices").get<std::vector<std::size_t>>();
    }

    const TreeHyperparams hp = detail::hyperparams_from_json(hp_json);
    switch (kind) {
    case ModelKind::tree:
        return FittedModel(detail::tree_from_json(body, std::move(names), hp));
    case ModelKind::forest: {
        ForestModel forest;
        forest.master_seed = body.at("master_seed").get<std::uint64_t>();
        forest.tree_seeds = body.at("tree_seeds").get<std::vector<std::uint64_t>>();
        forest.max_features = hp_json.at("max_features").get<std::size_t>();
        forest.bootstrap = hp_json.at("bootstrap").get<bool>();
        for (const json& t : body.at("trees")) {
            forest.trees.push_back(detail::tree_from_json(t, names, hp));
        }
        if (forest.trees.empty()) {
            throw Error("model file: forest has no trees");
        }
        return FittedModel(std::move(forest));
    }
    case ModelKind::gbm: {
        GbmModel gbm;
        gbm.initial = body.at("initial").get<double>();
        gbm.learning_rate = body.at("learning_rate").get<double>();
        gbm.feature_names = names;
        for (const json& t : body.at("stages")) {
            gbm.stages.push_back(detail::tree_from_json(t, names, hp));
        }
        return FittedModel(std::move(gbm));
    }
    }
    throw Error("model file: invalid model kind");
}

/// Writes the model document with 2-space indentation and a trailing
/// newline; the byte stream is deterministic for identical models.
inline void save_model(const FittedModel& model, const TrainingFingerprint& fingerprint,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("save_model: cannot open '" + path + "' for writing");
    }
    out << model_to_json(model, fingerprint).dump(2) << '\n';
    if (!out) {
        throw Error("save_model: write to '" + path + "' failed");
    }
}

inline FittedModel load_model(const std::string& path,
                              TrainingFingerprint* fingerprint_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("load_model: cannot open '" + path + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("model file '" + path + "': truncated or malformed JSON (" +
                    std::string(e.what()) + ")");
    }
    try {
        return model_from_json(doc, fingerprint_out);
    } catch (const nlohmann::json::exception& e) {
        throw Error("model file '" + path + "': schema violation (" +
                    std::string(e.what()) + ")");
    }
}

} // namespace fswml
