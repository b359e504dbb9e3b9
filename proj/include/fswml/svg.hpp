#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "fswml/error.hpp"
#include "fswml/eval.hpp"

// Standalone SVG bar chart for an importance report. One horizontal bar per
// feature, length proportional to importance, value labeled to 3 decimals.

namespace fswml {

inline void render_importance_svg(const ImportanceReport& report, std::ostream& out) {
    if (report.entries.empty()) {
        throw Error("render_importance_svg: empty report");
    }
    constexpr int kWidth = 640;
    constexpr int kBarHeight = 24;
    constexpr int kRowHeight = 34;
    constexpr int kLabelWidth = 190;
    constexpr int kValueWidth = 60;
    constexpr int kMargin = 12;
    const int plot_width = kWidth - kLabelWidth - kValueWidth - 2 * kMargin;
    const int height = kMargin * 2 + kRowHeight * static_cast<int>(report.entries.size());

    double max_importance = 0.0;
    for (const auto& [name, value] : report.entries) {
        max_importance = std::max(max_importance, value);
    }

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << kWidth << " " << height
        << "\">\n";
    out << "  <style>text{font:13px sans-serif;fill:#222}.bar{fill:#4878a8}</style>\n";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& [name, value] = report.entries[i];
        const int y = kMargin + static_cast<int>(i) * kRowHeight;
        const int bar_width =
            max_importance > 0.0
                ? static_cast<int>(std::lround(value / max_importance * plot_width))
                : 0;
        char value_label[32];
        std::snprintf(value_label, sizeof value_label, "%.3f", value);
        out << "  <text x=\"" << kMargin << "\" y=\"" << y + kBarHeight - 7 << "\">" << name
            << "</text>\n";
        out << "  <rect class=\"bar\" x=\"" << kMargin + kLabelWidth << "\" y=\"" << y
            << "\" width=\"" << bar_width << "\" height=\"" << kBarHeight << "\"/>\n";
        out << "  <text x=\"" << kMargin + kLabelWidth + bar_width + 6 << "\" y=\""
            << y + kBarHeight - 7 << "\">" << value_label << "</text>\n";
    }
    out << "</svg>\n";
}

inline void render_importance_svg(const ImportanceReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("render_importance_svg: cannot open '" + path + "' for writing");
    }
    render_importance_svg(report, static_cast<std::ostream&>(out));
    if (!out) {
        throw Error("render_importance_svg: write to '" + path + "' failed");
    }
}

} // namespace fswml
