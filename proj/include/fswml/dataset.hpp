#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fswml/error.hpp"
#include "fswml/prng.hpp"

// Experimental data model for the friction-stir-welding runs: CSV ingestion,
// missing-value audit, one-hot encoding and the seeded train/test split.

namespace fswml {

// ---------------------------------------------------------------------------
// Records

enum class ToolMaterial { H13, C40, HSS };

inline constexpr std::array<std::string_view, 3> kToolMaterialNames{"H13", "C40", "HSS"};

inline std::string_view to_string(ToolMaterial tool) {
    return kToolMaterialNames[static_cast<std::size_t>(tool)];
}

inline std::optional<ToolMaterial> parse_tool_material(std::string_view label) {
    for (std::size_t i = 0; i < kToolMaterialNames.size(); ++i) {
        if (label == kToolMaterialNames[i]) {
            return static_cast<ToolMaterial>(i);
        }
    }
    return std::nullopt;
}

/// One weld experiment. All numeric fields are strictly positive.
struct ProcessRecord {
    ToolMaterial tool_material;
    double rotational_speed_rpm;
    double welding_speed_mm_min;
    double axial_force_kn;
    double uts_mpa;

    bool operator==(const ProcessRecord&) const = default;
};

/// Ordered, immutable collection of records. Row order is the load order and
/// is meaningful: row indices identify experiments throughout the toolkit.
class Dataset {
public:
    Dataset(std::vector<ProcessRecord> records, std::string source)
        : records_(std::move(records)), source_(std::move(source)) {
        if (records_.empty()) {
            throw Error("dataset '" + source_ + "': empty dataset");
        }
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const ProcessRecord& r = records_[i];
            if (!(r.rotational_speed_rpm > 0 && r.welding_speed_mm_min > 0 &&
                  r.axial_force_kn > 0 && r.uts_mpa > 0)) {
                throw Error("dataset '" + source_ + "': record " + std::to_string(i) +
                            " has a non-positive field");
            }
        }
    }

    std::size_t size() const { return records_.size(); }
    const ProcessRecord& operator[](std::size_t i) const { return records_[i]; }
    std::span<const ProcessRecord> records() const { return records_; }
    const std::string& source() const { return source_; }

    bool operator==(const Dataset&) const = default;

private:
    std::vector<ProcessRecord> records_;
    std::string source_;
};

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader =
    "tool_material,rotational_speed_rpm,welding_speed_mm_min,axial_force_kn,uts_mpa";

inline constexpr std::array<std::string_view, 5> kColumnNames{
    "tool_material", "rotational_speed_rpm", "welding_speed_mm_min", "axial_force_kn",
    "uts_mpa"};

namespace detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double_field(std::string_view field) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

/// Reads a line, accepting LF and CRLF endings.
inline bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

} // namespace detail

/// Parses the canonical CSV stream into a Dataset. Rows are kept in file
/// order. Errors carry the 1-based file line number (header is line 1).
inline Dataset load_csv(std::istream& in, std::string source = "<stream>") {
    std::string line;
    if (!detail::read_line(in, line)) {
        throw Error("csv '" + source + "': empty file");
    }
    if (line != kCsvHeader) {
        throw Error("csv '" + source + "': malformed header, expected '" +
                    std::string(kCsvHeader) + "', got '" + line + "'");
    }

    std::vector<ProcessRecord> records;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != kColumnNames.size()) {
            throw Error("csv '" + source + "' line " + std::to_string(line_no) +
                        ": expected " + std::to_string(kColumnNames.size()) +
                        " fields, got " + std::to_string(fields.size()));
        }
        const auto tool = parse_tool_material(fields[0]);
        if (!tool) {
            throw Error("csv '" + source + "' line " + std::to_string(line_no) +
                        ": unknown tool material '" + std::string(fields[0]) + "'");
        }
        std::array<double, 4> numeric{};
        for (std::size_t c = 0; c < 4; ++c) {
            const auto value = detail::parse_double_field(fields[c + 1]);
            if (!value) {
                throw Error("csv '" + source + "' line " + std::to_string(line_no) +
                            ": non-numeric value '" + std::string(fields[c + 1]) +
                            "' in column '" + std::string(kColumnNames[c + 1]) + "'");
            }
            if (!(*value > 0)) {
                throw Error("csv '" + source + "' line " + std::to_string(line_no) +
                            ": non-positive value in column '" +
                            std::string(kColumnNames[c + 1]) + "'");
            }
            numeric[c] = *value;
        }
        records.push_back(
            ProcessRecord{*tool, numeric[0], numeric[1], numeric[2], numeric[3]});
    }
    if (records.empty()) {
        throw Error("csv '" + source + "': empty dataset");
    }
    return Dataset(std::move(records), std::move(source));
}

inline Dataset load_csv_text(std::string_view text, std::string source = "<string>") {
    std::istringstream in{std::string(text)};
    return load_csv(in, std::move(source));
}

/// Canonical CSV rendering; load_csv(to_csv(d)) reproduces d exactly.
inline std::string to_csv(const Dataset& dataset) {
    std::string out;
    out += kCsvHeader;
    out += '\n';
    for (const ProcessRecord& r : dataset.records()) {
        out += to_string(r.tool_material);
        out += ',';
        out += detail::format_double(r.rotational_speed_rpm);
        out += ',';
        out += detail::format_double(r.welding_speed_mm_min);
        out += ',';
        out += detail::format_double(r.axial_force_kn);
        out += ',';
        out += detail::format_double(r.uts_mpa);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Missing-value audit

struct MissingReport {
    std::size_t total_cells = 0;
    std::size_t missing_cells = 0;
    /// (0-based data-row index, column name) per blank or unparseable cell.
    std::vector<std::pair<std::size_t, std::string>> locations;
};

/// A dataset that passed load_csv has, by construction, no missing cells.
inline MissingReport check_missing(const Dataset& dataset) {
    MissingReport report;
    report.total_cells = dataset.size() * kColumnNames.size();
    return report;
}

/// Audits raw CSV text without rejecting it: blank cells, short rows,
/// unparseable numerics and unknown tool labels all count as missing.
inline MissingReport check_missing_csv(std::istream& in, const std::string& source = "<stream>") {
    std::string line;
    if (!detail::read_line(in, line)) {
        return MissingReport{};
    }
    if (line != kCsvHeader) {
        throw Error("csv '" + source + "': malformed header, expected '" +
                    std::string(kCsvHeader) + "', got '" + line + "'");
    }
    MissingReport report;
    std::size_t row = 0;
    while (detail::read_line(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = detail::split_fields(line);
        for (std::size_t c = 0; c < kColumnNames.size(); ++c) {
            ++report.total_cells;
            const std::string_view field = c < fields.size() ? fields[c] : std::string_view{};
            const bool ok = c == 0 ? parse_tool_material(field).has_value()
                                   : detail::parse_double_field(field).has_value();
            if (!ok) {
                ++report.missing_cells;
                report.locations.emplace_back(row, std::string(kColumnNames[c]));
            }
        }
        ++row;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Embedded fixture: the 52-run AA6061 experiment log

namespace detail {

struct RawRecord {
    ToolMaterial tool;
    double rpm, weld, force, uts;
};

// clang-format off
inline constexpr std::array<RawRecord, 52> kFswTable{{
    {ToolMaterial::H13,  900, 25, 2, 251}, {ToolMaterial::H13,  900, 25, 2, 254},
    {ToolMaterial::H13,  900, 25, 2, 257}, {ToolMaterial::H13, 1200, 35, 3, 264},
    {ToolMaterial::H13, 1200, 35, 3, 260}, {ToolMaterial::H13, 1200, 35, 3, 268},
    {ToolMaterial::H13, 1500, 45, 4, 284}, {ToolMaterial::H13, 1500, 45, 4, 284},
    {ToolMaterial::H13, 1500, 45, 4, 281}, {ToolMaterial::H13,  900, 35, 4, 242},
    {ToolMaterial::H13,  900, 35, 4, 244}, {ToolMaterial::H13,  900, 35, 4, 241},
    {ToolMaterial::H13, 1200, 45, 2, 264}, {ToolMaterial::H13, 1200, 45, 2, 264},
    {ToolMaterial::H13, 1200, 45, 2, 260}, {ToolMaterial::H13, 1500, 25, 3, 288},
    {ToolMaterial::H13, 1500, 25, 3, 288}, {ToolMaterial::C40, 1500, 25, 3, 286},
    {ToolMaterial::C40,  900, 45, 3, 238}, {ToolMaterial::C40,  900, 45, 3, 231},
    {ToolMaterial::C40,  900, 45, 3, 236}, {ToolMaterial::C40, 1200, 25, 4, 271},
    {ToolMaterial::C40, 1200, 25, 4, 268}, {ToolMaterial::C40, 1200, 25, 4, 273},
    {ToolMaterial::C40, 1500, 35, 2, 281}, {ToolMaterial::C40, 1500, 35, 2, 278},
    {ToolMaterial::C40, 1500, 35, 2, 280}, {ToolMaterial::C40,  900, 25, 2, 248},
    {ToolMaterial::C40,  900, 25, 2, 248}, {ToolMaterial::C40,  900, 25, 2, 245},
    {ToolMaterial::C40, 1200, 35, 3, 258}, {ToolMaterial::C40, 1200, 35, 3, 257},
    {ToolMaterial::C40, 1200, 35, 3, 254}, {ToolMaterial::C40, 1500, 45, 4, 281},
    {ToolMaterial::HSS, 1500, 45, 4, 286}, {ToolMaterial::HSS, 1500, 45, 4, 285},
    {ToolMaterial::HSS,  900, 35, 4, 248}, {ToolMaterial::HSS,  900, 35, 4, 246},
    {ToolMaterial::HSS,  900, 35, 4, 247}, {ToolMaterial::HSS, 1200, 45, 2, 266},
    {ToolMaterial::HSS, 1200, 45, 2, 264}, {ToolMaterial::HSS, 1200, 45, 2, 269},
    {ToolMaterial::HSS, 1500, 25, 3, 291}, {ToolMaterial::HSS, 1500, 25, 3, 292},
    {ToolMaterial::HSS, 1500, 25, 3, 291}, {ToolMaterial::HSS,  900, 45, 3, 239},
    {ToolMaterial::HSS,  900, 45, 3, 242}, {ToolMaterial::HSS, 1200, 25, 4, 276},
    {ToolMaterial::HSS, 1200, 25, 4, 274}, {ToolMaterial::HSS, 1500, 35, 2, 286},
    {ToolMaterial::HSS, 1500, 35, 2, 285}, {ToolMaterial::HSS, 1500, 35, 2, 285},
}};
// clang-format on

} // namespace detail

inline constexpr std::string_view kEmbeddedSource = "embedded:fsw_aa6061";

/// The 52 welding runs on 5 mm AA6061 sheet that every default pipeline uses.
/// Also shipped as data/fsw_aa6061.csv in the repository.
inline Dataset embedded_fsw_dataset() {
    std::vector<ProcessRecord> records;
    records.reserve(detail::kFswTable.size());
    for (const auto& raw : detail::kFswTable) {
        records.push_back(ProcessRecord{raw.tool, raw.rpm, raw.weld, raw.force, raw.uts});
    }
    return Dataset(std::move(records), std::string(kEmbeddedSource));
}

// ---------------------------------------------------------------------------
// Feature matrix

/// Numeric design matrix. Column order is fixed: rotational speed, welding
/// speed, axial force, then (optionally) one-hot tool columns in H13/C40/HSS
/// order. Row i corresponds to dataset record i.
struct FeatureMatrix {
    std::vector<std::string> feature_names;
    std::vector<double> values; // row-major, n_rows x n_cols
    std::vector<double> targets;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    bool includes_tool = false;

    double at(std::size_t row, std::size_t col) const {
        return values[row * n_cols + col];
    }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values).subspan(r * n_cols, n_cols);
    }
};

inline FeatureMatrix encode(const Dataset& dataset, bool include_tool) {
    FeatureMatrix m;
    m.includes_tool = include_tool;
    m.feature_names = {"rotational_speed_rpm", "welding_speed_mm_min", "axial_force_kn"};
    if (include_tool) {
        for (const auto name : kToolMaterialNames) {
            m.feature_names.push_back("tool=" + std::string(name));
        }
    }
    m.n_rows = dataset.size();
    m.n_cols = m.feature_names.size();
    m.values.reserve(m.n_rows * m.n_cols);
    m.targets.reserve(m.n_rows);
    for (const ProcessRecord& r : dataset.records()) {
        m.values.push_back(r.rotational_speed_rpm);
        m.values.push_back(r.welding_speed_mm_min);
        m.values.push_back(r.axial_force_kn);
        if (include_tool) {
            for (std::size_t t = 0; t < kToolMaterialNames.size(); ++t) {
                m.values.push_back(r.tool_material == static_cast<ToolMaterial>(t) ? 1.0
                                                                                   : 0.0);
            }
        }
        m.targets.push_back(r.uts_mpa);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Train/test split

/// Disjoint index sets covering {0..n-1}; |test| = floor(n * test_ratio).
struct SplitPair {
    std::vector<std::size_t> train_indices; // ascending
    std::vector<std::size_t> test_indices;  // ascending
    std::uint64_t seed = 0;
    double test_ratio = 0.0;
};

/// Seeded shuffle split: indices are permuted by Fisher-Yates under
/// xoshiro256**(seed), the first floor(n * test_ratio) go to the test set,
/// and both sides are then sorted ascending. Bit-identical for equal inputs.
inline SplitPair split_indices(std::size_t n, double test_ratio, std::uint64_t seed) {
    if (!(test_ratio > 0.0 && test_ratio < 1.0)) {
        throw Error("train_test_split: test_ratio must be in (0, 1), got " +
                    detail::format_double(test_ratio));
    }
    if (n < 2) {
        throw Error("train_test_split: need at least 2 rows, got " + std::to_string(n));
    }
    const auto n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * test_ratio));
    if (n_test == 0) {
        throw Error("train_test_split: " + std::to_string(n) + " rows at ratio " +
                    detail::format_double(test_ratio) + " yield an empty test set");
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    Xoshiro256StarStar rng(seed);
    fisher_yates_shuffle(std::span<std::size_t>(order), rng);

    SplitPair split;
    split.seed = seed;
    split.test_ratio = test_ratio;
    split.test_indices.assign(order.begin(), order.begin() + n_test);
    split.train_indices.assign(order.begin() + n_test, order.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    std::sort(split.train_indices.begin(), split.train_indices.end());
    return split;
}

inline SplitPair train_test_split(const FeatureMatrix& matrix, double test_ratio,
                                  std::uint64_t seed) {
    return split_indices(matrix.n_rows, test_ratio, seed);
}

} // namespace fswml
