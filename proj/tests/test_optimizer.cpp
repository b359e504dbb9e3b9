#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <fswml/optimizer.hpp>

#include "helpers.hpp"

using namespace fswml;
using testutil::iota_rows;

TEST_CASE("default grid enumerates the experimental levels", "[optimizer]") {
    const ParameterGrid grid;
    const auto plain = enumerate_grid(grid, false);
    CHECK(plain.size() == 27);
    CHECK(plain.front() == GridSetting{900, 25, 2, std::nullopt});
    CHECK(plain.back() == GridSetting{1500, 45, 4, std::nullopt});
    // Axial force is the innermost numeric loop.
    CHECK(plain[1] == GridSetting{900, 25, 3, std::nullopt});

    const auto with_tool = enumerate_grid(grid, true);
    CHECK(with_tool.size() == 81);
    CHECK(with_tool.front() == GridSetting{900, 25, 2, ToolMaterial::H13});
    CHECK(with_tool[1] == GridSetting{900, 25, 2, ToolMaterial::C40});
}

TEST_CASE("singleton level lists give a single setting", "[optimizer]") {
    ParameterGrid grid;
    grid.rotational_levels = {1200};
    grid.welding_levels = {35};
    grid.force_levels = {3};
    const auto settings = enumerate_grid(grid, false);
    REQUIRE(settings.size() == 1);
    CHECK(settings[0] == GridSetting{1200, 35, 3, std::nullopt});
}

TEST_CASE("grid validation rejects empty and non-positive levels", "[optimizer]") {
    ParameterGrid grid;
    grid.welding_levels.clear();
    CHECK_THROWS(enumerate_grid(grid, false));

    ParameterGrid negative;
    negative.force_levels = {2, -1};
    CHECK_THROWS(negative.validate());
}

TEST_CASE("dense_grid subdivides each numeric range evenly", "[optimizer]") {
    const ParameterGrid dense = dense_grid(ParameterGrid{}, 5);
    REQUIRE(dense.rotational_levels.size() == 5);
    CHECK(dense.rotational_levels.front() == 900.0);
    CHECK(dense.rotational_levels.back() == 1500.0);
    CHECK(dense.rotational_levels[2] == 1200.0);
    CHECK(dense.welding_levels == std::vector<double>{25, 30, 35, 40, 45});
    CHECK(enumerate_grid(dense, false).size() == 125);

    CHECK_THROWS(dense_grid(ParameterGrid{}, 1));
}

TEST_CASE("grid settings encode to feature vectors in training order", "[optimizer]") {
    const GridSetting plain{1200, 35, 3, std::nullopt};
    CHECK(plain.to_features() == std::vector<double>{1200, 35, 3});

    const GridSetting with_tool{1200, 35, 3, ToolMaterial::C40};
    CHECK(with_tool.to_features() == std::vector<double>{1200, 35, 3, 0, 1, 0});
}

TEST_CASE("joint efficiency against the base metal", "[optimizer]") {
    const BaseMetal base; // AA6061 at 310 MPa
    CHECK(base.tensile_strength_mpa == 310.0);

    const double eff = joint_efficiency(292.0, base);
    CHECK(eff > 0.9415);
    CHECK(eff < 0.9425);
    CHECK(format_percent(eff) == "94.2%");

    CHECK(joint_efficiency(310.0, base) == 1.0);
    CHECK(format_percent(1.0) == "100.0%");
    CHECK(joint_efficiency(155.0, base) == 0.5);
    CHECK(format_percent(0.5) == "50.0%");

    CHECK_THROWS(joint_efficiency(0.0, base));
    CHECK_THROWS(joint_efficiency(250.0, BaseMetal{"x", 0.0}));
}

TEST_CASE("a constant model recommends the first enumerated setting", "[optimizer]") {
    // Single-leaf tree: every grid point predicts the same value, so the
    // tie-break must pick the first setting in enumeration order.
    const FeatureMatrix m3 = testutil::make_matrix(
        {"rotational_speed_rpm", "welding_speed_mm_min", "axial_force_kn"},
        {{900, 25, 2}, {1500, 45, 4}}, {250, 250});
    const FittedModel model = train_model(ModelKind::tree, m3, iota_rows(2), {}, 0);

    const Recommendation rec = recommend(model, ParameterGrid{}, BaseMetal{}, 3);
    CHECK(rec.setting == GridSetting{900, 25, 2, std::nullopt});
    CHECK(rec.predicted_uts_mpa == 250.0);
    CHECK(std::fabs(rec.joint_efficiency - 250.0 / 310.0) < 1e-12);
    REQUIRE(rec.runner_ups.size() == 3);
    CHECK(rec.runner_ups[0].first == GridSetting{900, 25, 3, std::nullopt});
}

TEST_CASE("recommend matches an independent grid argmax", "[optimizer]") {
    const FeatureMatrix m = encode(embedded_fsw_dataset(), false);
    ModelConfig config;
    config.n_trees = 15;
    const FittedModel model =
        train_model(ModelKind::forest, m, iota_rows(m.n_rows), config, 42);

    const ParameterGrid grid;
    const Recommendation rec = recommend(model, grid, BaseMetal{}, 5);

    // Re-derive the winner without recommend(): first strictly-best setting.
    const auto settings = enumerate_grid(grid, false);
    std::size_t best = 0;
    double best_pred = model.predict(settings[0].to_features());
    for (std::size_t i = 1; i < settings.size(); ++i) {
        const double pred = model.predict(settings[i].to_features());
        if (pred > best_pred) {
            best = i;
            best_pred = pred;
        }
    }
    CHECK(rec.setting == settings[best]);
    CHECK(rec.predicted_uts_mpa == best_pred);
    CHECK(std::fabs(rec.joint_efficiency - best_pred / 310.0) < 1e-12);

    REQUIRE(rec.runner_ups.size() == 5);
    for (std::size_t i = 0; i + 1 < rec.runner_ups.size(); ++i) {
        CHECK(rec.runner_ups[i].second >= rec.runner_ups[i + 1].second);
    }
    CHECK(rec.runner_ups[0].second <= rec.predicted_uts_mpa);
    for (const auto& [setting, pred] : rec.runner_ups) {
        CHECK_FALSE(setting == rec.setting);
    }
}

TEST_CASE("recommend uses the tool axis when the model was trained with it",
          "[optimizer]") {
    const FeatureMatrix m = encode(embedded_fsw_dataset(), true);
    ModelConfig config;
    config.n_trees = 10;
    const FittedModel model =
        train_model(ModelKind::forest, m, iota_rows(m.n_rows), config, 42);
    const Recommendation rec = recommend(model, ParameterGrid{}, BaseMetal{}, 2);
    CHECK(rec.setting.tool.has_value());
}

TEST_CASE("recommend with top_k 0 returns no runner-ups", "[optimizer]") {
    const FeatureMatrix m = encode(embedded_fsw_dataset(), false);
    const FittedModel model = train_model(ModelKind::tree, m, iota_rows(m.n_rows), {}, 0);
    const Recommendation rec = recommend(model, ParameterGrid{}, BaseMetal{}, 0);
    CHECK(rec.runner_ups.empty());
}
