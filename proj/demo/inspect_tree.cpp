// Fits one shallow decision tree on every weld record and prints the split
// structure plus per-feature importances. Useful for eyeballing which process
// knobs the tree latches onto.

#include <cstdio>
#include <iostream>
#include <numeric>
#include <vector>

#include <fswml/cart.hpp>
#include <fswml/dataset.hpp>
#include <fswml/eval.hpp>

int main() {
    using namespace fswml;

    const FeatureMatrix matrix = encode(embedded_fsw_dataset(), /*include_tool=*/true);
    std::vector<std::size_t> rows(matrix.n_rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    TreeHyperparams hp;
    hp.max_depth = 3;
    const RegressionTree tree = fit_tree(matrix, rows, hp);

    render_tree_text(tree, std::cout);

    const ImportanceReport report =
        rank_features(tree_importances(tree), matrix.feature_names, ModelKind::tree);
    std::printf("\nimportances (tool columns folded)\n");
    for (const auto& [name, value] : report.entries) {
        std::printf("  %-21s %.3f\n", name.c_str(), value);
    }
    return 0;
}
