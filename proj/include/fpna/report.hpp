#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpna/stats.hpp"

namespace fpna {

inline constexpr const char* kReportSchema = "fpna-report/1";
inline constexpr const char* kArtifactVersion = "0.1.0";

// Shortest round-trip decimal representation of a binary64 value.
std::string format_double(double v);

enum class ReportFormat { Json, Csv, Svg };

// Serializable experiment record: one JSON document (the full record), flat
// CSV tables (one row per run/cell), and self-contained SVG charts. Emission
// is byte-stable for identical content.
struct ExperimentReport {
    std::string kind;
    nlohmann::json doc;  // schema fpna-report/1; includes the spec echo

    struct Table {
        std::string name;  // file stem, e.g. "runs" -> <kind>_runs.csv
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> rows;
    };
    struct Chart {
        std::string name;  // file stem
        std::string svg;
    };
    std::vector<Table> tables;
    std::vector<Chart> charts;
};

// Base JSON document with schema/version/environment fields filled in.
nlohmann::json report_skeleton(const std::string& kind);

void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                 const std::set<ReportFormat>& formats = {ReportFormat::Json,
                                                          ReportFormat::Csv,
                                                          ReportFormat::Svg});

// SVG chart builders (hand-generated, no plotting dependency).
std::string svg_histogram(const Histogram& h, const std::string& title);

struct LineSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};
// log10-log10 line chart.
std::string svg_loglog(const std::vector<LineSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

// Row-major value grid; cell color scales linearly from min to max.
std::string svg_heatmap(const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<double>>& values,
                        const std::string& title);

}  // namespace fpna
