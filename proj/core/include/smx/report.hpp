#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace smx {

// One metric from one experiment run. Rows are self-describing: `params`
// echoes every input that produced the value as `key=value` pairs joined
// by ';' (list values joined by '|', never ',').
struct ResultRecord {
    std::string command;
    std::string metric;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<double> bound;
    std::optional<bool> pass;
    std::string params;
    double wall_time_ms = 0.0;
};

// CSV schema (fixed column order):
//   command,metric,value,std_error,bound,pass,params,wall_time_ms
// Numbers use 17 significant digits so values round-trip exactly. Header
// always present; the final line is newline-terminated. wall_time_ms is
// the only column outside the determinism contract.
void write_csv(std::span<const ResultRecord> records, const std::filesystem::path& path);

std::string to_csv(std::span<const ResultRecord> records);

// One labeled curve.
struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

// Standalone SVG with axes, tick labels, a legend entry per series in input
// order, and one polyline per series. Requires >= 1 series, >= 2 points
// each, and a non-degenerate x range.
void emit_svg(std::span<const Series> series, const std::filesystem::path& path,
              const std::string& x_label = "", const std::string& y_label = "");

std::string to_svg(std::span<const Series> series, const std::string& x_label = "",
                   const std::string& y_label = "");

}  // namespace smx
