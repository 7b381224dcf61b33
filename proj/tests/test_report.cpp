#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fpna/fp_array.hpp"
#include "fpna/report.hpp"
#include "fpna/rng.hpp"

using namespace fpna;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

ExperimentReport sample_report() {
    ExperimentReport r;
    r.kind = "unit";
    r.doc = report_skeleton("unit");
    r.doc["payload"] = {{"answer", 42}};
    r.tables.push_back({"runs",
                        {"run", "value"},
                        {{"0", format_double(0.1)}, {"1", format_double(-3.5)}}});
    Histogram h;
    h.bin_edges = {0.0, 1.0, 2.0};
    h.counts = {3, 1};
    h.total = 4;
    r.charts.push_back({"hist", svg_histogram(h, "unit histogram")});
    return r;
}

}  // namespace

TEST_CASE("format_double round-trips bit patterns through decimal") {
    Rng gen({RngAlgorithm::Mt19937_64, 100});
    for (int i = 0; i < 1000; ++i) {
        double v = (gen.next_unit() - 0.5) * std::pow(10.0, double(gen.next_below(40)) - 20.0);
        std::string s = format_double(v);
        double back = std::strtod(s.c_str(), nullptr);
        REQUIRE(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("emit_report writes every requested format, byte-stably") {
    fs::path dir = fs::temp_directory_path() / "fpna_report_test";
    fs::remove_all(dir);
    ExperimentReport r = sample_report();
    emit_report(r, dir);

    fs::path json_path = dir / "unit_report.json";
    fs::path csv_path = dir / "unit_runs.csv";
    fs::path svg_path = dir / "unit_hist.svg";
    REQUIRE(fs::exists(json_path));
    REQUIRE(fs::exists(csv_path));
    REQUIRE(fs::exists(svg_path));

    std::string j1 = slurp(json_path), c1 = slurp(csv_path), s1 = slurp(svg_path);
    emit_report(r, dir);
    CHECK(slurp(json_path) == j1);
    CHECK(slurp(csv_path) == c1);
    CHECK(slurp(svg_path) == s1);

    auto doc = nlohmann::json::parse(j1);
    CHECK(doc["schema"] == kReportSchema);
    CHECK(doc["artifact_version"] == kArtifactVersion);
    CHECK(doc["kind"] == "unit");
    CHECK(doc["payload"]["answer"] == 42);
    CHECK(s1.find("<svg") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("CSV values survive an independent parse") {
    fs::path dir = fs::temp_directory_path() / "fpna_csv_test";
    fs::remove_all(dir);
    ExperimentReport r;
    r.kind = "csv";
    r.doc = report_skeleton("csv");
    std::vector<double> values{0.1, -1e-17, 3.141592653589793, 1e300};
    ExperimentReport::Table t{"vals", {"i", "v"}, {}};
    for (std::size_t i = 0; i < values.size(); ++i)
        t.rows.push_back({std::to_string(i), format_double(values[i])});
    r.tables.push_back(t);
    emit_report(r, dir, {ReportFormat::Csv});

    std::string csv = slurp(dir / "csv_vals.csv");
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "i,v");
    std::size_t i = 0;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        double v = std::strtod(line.c_str() + comma + 1, nullptr);
        REQUIRE(std::bit_cast<std::uint64_t>(v) ==
                std::bit_cast<std::uint64_t>(values.at(i)));
        ++i;
    }
    CHECK(i == values.size());
    fs::remove_all(dir);
}

TEST_CASE("report with no tables or charts still emits valid JSON") {
    fs::path dir = fs::temp_directory_path() / "fpna_empty_report_test";
    fs::remove_all(dir);
    ExperimentReport r;
    r.kind = "empty";
    r.doc = report_skeleton("empty");
    emit_report(r, dir);
    auto doc = nlohmann::json::parse(slurp(dir / "empty_report.json"));
    CHECK(doc["kind"] == "empty");
    fs::remove_all(dir);
}

TEST_CASE("svg builders handle edge shapes") {
    Histogram h;
    h.bin_edges = {0.0, 1.0};
    h.counts = {5};
    h.total = 5;
    CHECK(svg_histogram(h, "one bin").find("<rect") != std::string::npos);

    std::vector<LineSeries> series{{"a", {{1.0, 2.0}, {10.0, 20.0}}}};
    CHECK(svg_loglog(series, "t", "n", "y").find("<polyline") != std::string::npos);

    std::vector<std::vector<double>> grid{{0.0, 0.5}, {1.0, 1.0}};
    std::string hm = svg_heatmap({"r0", "r1"}, {"c0", "c1"}, grid, "hm");
    CHECK(hm.find("<rect") != std::string::npos);
}
