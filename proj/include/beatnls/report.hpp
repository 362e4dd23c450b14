#pragma once

/// @file report.hpp
/// @brief Tables and their CSV/JSON renderings.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "beatnls/numeric.hpp"

namespace beatnls::cli {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw ComputationError("table " + name + ": row width mismatch");
        rows.push_back(std::move(row));
    }
};

inline std::string cell_text(const Cell& c) {
    struct V {
        std::string operator()(double x) const { return format_17(x); }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(bool x) const { return x ? "1" : "0"; }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

inline nlohmann::json cell_json(const Cell& c) {
    struct V {
        nlohmann::json operator()(double x) const { return x; }
        nlohmann::json operator()(std::int64_t x) const { return x; }
        nlohmann::json operator()(bool x) const { return x; }
        nlohmann::json operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
        os << '\n';
    }
}

inline nlohmann::json table_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (auto& r : t.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (auto& c : r) row.push_back(cell_json(c));
        rows.push_back(std::move(row));
    }
    return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

/// Applies BEATNLS_OUT_DIR, which replaces only the directory of `out`.
/// "-" (stdout) is left alone.
inline std::string resolve_out_path(const std::string& out) {
    if (out.empty() || out == "-") return "-";
    const char* dir = std::getenv("BEATNLS_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return out;
    return (std::filesystem::path(dir) / std::filesystem::path(out).filename()).string();
}

/// Path of a companion file: "run.csv" + "events" gives "run_events.csv".
inline std::string sidecar_path(const std::string& main, const std::string& tag) {
    const std::filesystem::path p(main);
    const std::string name = p.stem().string() + "_" + tag + p.extension().string();
    return (p.parent_path() / name).string();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ComputationError("cannot open output file '" + path + "'");
    os << text;
    if (!os) throw ComputationError("failed writing output file '" + path + "'");
}

}  // namespace beatnls::cli
