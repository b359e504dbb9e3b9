// End-to-end walkthrough: train a random forest on the bundled weld log,
// report held-out accuracy, and search the parameter grid for the setting
// with the highest predicted tensile strength.

#include <cstdio>

#include <fswml/dataset.hpp>
#include <fswml/eval.hpp>
#include <fswml/model.hpp>
#include <fswml/optimizer.hpp>

int main() {
    using namespace fswml;

    const Dataset dataset = embedded_fsw_dataset();
    const FeatureMatrix matrix = encode(dataset, /*include_tool=*/false);
    const SplitPair split = train_test_split(matrix, 0.2, 42);

    ModelConfig config;
    config.n_trees = 100;
    const MetricsReport metrics =
        evaluate(ModelKind::forest, matrix, split, config, 42);
    const FittedModel model =
        train_model(ModelKind::forest, matrix, split.train_indices, config, 42);
    std::printf("held-out metrics over %zu welds (seed 42)\n", metrics.n_test);
    std::printf("  mse %.3f   mae %.3f   r2 %.3f\n", metrics.mse, metrics.mae,
                metrics.r2);

    const Recommendation rec = recommend(model, ParameterGrid{}, BaseMetal{}, 3);
    std::printf("best predicted setting: %.0f rpm, %.0f mm/min, %.0f kN\n",
                rec.setting.rotational_speed_rpm, rec.setting.welding_speed_mm_min,
                rec.setting.axial_force_kn);
    std::printf("  predicted uts %.1f MPa (%s of the base alloy)\n",
                rec.predicted_uts_mpa, format_percent(rec.joint_efficiency).c_str());
    for (const auto& [setting, uts] : rec.runner_ups) {
        std::printf("  runner-up %.1f MPa at %.0f rpm, %.0f mm/min, %.0f kN\n", uts,
                    setting.rotational_speed_rpm, setting.welding_speed_mm_min,
                    setting.axial_force_kn);
    }
    return 0;
}
