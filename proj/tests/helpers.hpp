#pragma once

#include <string>
#include <vector>

#include <fswml/dataset.hpp>
#include <fswml/error.hpp>

namespace testutil {

/// Builds a FeatureMatrix directly from row vectors, bypassing CSV ingestion.
inline fswml::FeatureMatrix make_matrix(std::vector<std::string> names,
                                        const std::vector<std::vector<double>>& rows,
                                        std::vector<double> targets) {
    fswml::FeatureMatrix m;
    m.feature_names = std::move(names);
    m.n_cols = m.feature_names.size();
    m.n_rows = rows.size();
    m.targets = std::move(targets);
    for (const auto& row : rows) {
        if (row.size() != m.n_cols) {
            throw fswml::Error("make_matrix: ragged row");
        }
        m.values.insert(m.values.end(), row.begin(), row.end());
    }
    return m;
}

/// Single-feature convenience wrapper.
inline fswml::FeatureMatrix make_matrix_1d(const std::vector<double>& x,
                                           std::vector<double> targets) {
    std::vector<std::vector<double>> rows;
    rows.reserve(x.size());
    for (const double v : x) {
        rows.push_back({v});
    }
    return make_matrix({"x0"}, rows, std::move(targets));
}

inline std::vector<std::size_t> iota_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = i;
    }
    return rows;
}

} // namespace testutil
