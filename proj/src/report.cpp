#include "fpna/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fpna {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

nlohmann::json report_skeleton(const std::string& kind) {
    nlohmann::json doc;
    doc["schema"] = kReportSchema;
    doc["artifact_version"] = kArtifactVersion;
    doc["kind"] = kind;
    doc["environment"] = {
        {"compiler", __VERSION__},
        {"pointer_bits", sizeof(void*) * 8},
    };
    return doc;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                 const std::set<ReportFormat>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + out_dir.string() +
                                 ": " + ec.message());

    if (formats.count(ReportFormat::Json))
        write_file(out_dir / (report.kind + "_report.json"), report.doc.dump(2) + "\n");

    if (formats.count(ReportFormat::Csv)) {
        for (const auto& table : report.tables) {
            std::ostringstream csv;
            for (std::size_t c = 0; c < table.columns.size(); ++c)
                csv << (c ? "," : "") << csv_escape(table.columns[c]);
            csv << '\n';
            for (const auto& row : table.rows) {
                if (row.size() != table.columns.size())
                    throw std::runtime_error("CSV row width mismatch in table " +
                                             table.name);
                for (std::size_t c = 0; c < row.size(); ++c)
                    csv << (c ? "," : "") << csv_escape(row[c]);
                csv << '\n';
            }
            write_file(out_dir / (report.kind + "_" + table.name + ".csv"), csv.str());
        }
    }

    if (formats.count(ReportFormat::Svg)) {
        for (const auto& chart : report.charts)
            write_file(out_dir / (report.kind + "_" + chart.name + ".svg"), chart.svg);
    }
}

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

std::string svg_open(const std::string& title) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"14\">"
      << title << "</text>\n";
    return s.str();
}

std::string axis_label(const std::string& x_label, const std::string& y_label) {
    std::ostringstream s;
    s << "<text x=\"" << (kMarginLeft + (kWidth - kMarginLeft - kMarginRight) / 2)
      << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
      << x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << (kMarginTop + (kHeight - kMarginTop - kMarginBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << (kMarginTop + (kHeight - kMarginTop - kMarginBottom) / 2) << ")\">" << y_label
      << "</text>\n";
    return s.str();
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

}  // namespace

std::string svg_histogram(const Histogram& h, const std::string& title) {
    std::ostringstream s;
    s << svg_open(title);
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    std::uint64_t max_count = 1;
    for (auto c : h.counts) max_count = std::max(max_count, c);

    const double bar_w = plot_w / static_cast<double>(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        double frac = static_cast<double>(h.counts[i]) / static_cast<double>(max_count);
        double bh = frac * plot_h;
        s << "<rect x=\"" << format_double(kMarginLeft + bar_w * static_cast<double>(i))
          << "\" y=\"" << format_double(kMarginTop + plot_h - bh) << "\" width=\""
          << format_double(bar_w) << "\" height=\"" << format_double(bh)
          << "\" fill=\"#1f77b4\"/>\n";
    }
    s << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
      << kWidth - kMarginRight << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";
    // Edge annotations: left, middle, right.
    double mid = 0.5 * (h.bin_edges.front() + h.bin_edges.back());
    const std::pair<double, double> ticks[] = {
        {0.0, h.bin_edges.front()}, {0.5, mid}, {1.0, h.bin_edges.back()}};
    for (auto [t, v] : ticks)
        s << "<text x=\"" << format_double(kMarginLeft + t * plot_w) << "\" y=\""
          << kMarginTop + plot_h + 18
          << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">"
          << format_double(v) << "</text>\n";
    s << axis_label("value", "count") << "</svg>\n";
    return s.str();
}

std::string svg_loglog(const std::vector<LineSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
    double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!(x > 0.0) || !(y > 0.0))
                throw std::invalid_argument("svg_loglog: positive data required");
            lx_min = std::min(lx_min, std::log10(x));
            lx_max = std::max(lx_max, std::log10(x));
            ly_min = std::min(ly_min, std::log10(y));
            ly_max = std::max(ly_max, std::log10(y));
        }
    if (lx_max <= lx_min) lx_max = lx_min + 1.0;
    if (ly_max <= ly_min) ly_max = ly_min + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) {
        return kMarginLeft + (std::log10(x) - lx_min) / (lx_max - lx_min) * plot_w;
    };
    auto py = [&](double y) {
        return kMarginTop + plot_h - (std::log10(y) - ly_min) / (ly_max - ly_min) * plot_h;
    };

    std::ostringstream s;
    s << svg_open(title);
    s << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
      << kWidth - kMarginRight << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
      << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kSeriesColors[i % std::size(kSeriesColors)];
        std::ostringstream pts;
        for (auto [x, y] : series[i].points)
            pts << format_double(px(x)) << ',' << format_double(py(y)) << ' ';
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" "
          << "points=\"" << pts.str() << "\"/>\n";
        s << "<text x=\"" << kWidth - kMarginRight - 8 << "\" y=\""
          << kMarginTop + 16 * (static_cast<int>(i) + 1)
          << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\""
          << color << "\">" << series[i].name << "</text>\n";
    }
    s << axis_label("log10 " + x_label, "log10 " + y_label) << "</svg>\n";
    return s.str();
}

std::string svg_heatmap(const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<double>>& values,
                        const std::string& title) {
    if (values.size() != row_labels.size())
        throw std::invalid_argument("svg_heatmap: row label/value mismatch");
    double v_min = 1e300, v_max = -1e300;
    for (const auto& row : values) {
        if (row.size() != col_labels.size())
            throw std::invalid_argument("svg_heatmap: ragged value grid");
        for (double v : row) {
            v_min = std::min(v_min, v);
            v_max = std::max(v_max, v);
        }
    }
    if (v_max <= v_min) v_max = v_min + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double cell_w = plot_w / static_cast<double>(col_labels.size());
    const double cell_h = plot_h / static_cast<double>(row_labels.size());

    std::ostringstream s;
    s << svg_open(title);
    for (std::size_t r = 0; r < values.size(); ++r) {
        for (std::size_t c = 0; c < values[r].size(); ++c) {
            double t = (values[r][c] - v_min) / (v_max - v_min);
            // white -> red ramp
            int g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
            s << "<rect x=\"" << format_double(kMarginLeft + cell_w * static_cast<double>(c))
              << "\" y=\"" << format_double(kMarginTop + cell_h * static_cast<double>(r))
              << "\" width=\"" << format_double(cell_w) << "\" height=\""
              << format_double(cell_h) << "\" fill=\"rgb(255," << g << ',' << g
              << ")\" stroke=\"#cccccc\"/>\n";
        }
        s << "<text x=\"" << kMarginLeft - 6 << "\" y=\""
          << format_double(kMarginTop + cell_h * (static_cast<double>(r) + 0.65))
          << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">"
          << row_labels[r] << "</text>\n";
    }
    for (std::size_t c = 0; c < col_labels.size(); ++c)
        s << "<text x=\""
          << format_double(kMarginLeft + cell_w * (static_cast<double>(c) + 0.5))
          << "\" y=\"" << kMarginTop + plot_h + 16
          << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">"
          << col_labels[c] << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace fpna
