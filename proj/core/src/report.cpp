#include "smx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace smx {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Standard CSV quoting, applied only when the field needs it (commas can
// reach the params column through file paths).
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string to_csv(std::span<const ResultRecord> records) {
    std::ostringstream out;
    out << "command,metric,value,std_error,bound,pass,params,wall_time_ms\n";
    for (const ResultRecord& r : records) {
        out << r.command << ',' << r.metric << ',' << fmt_double(r.value) << ',';
        if (r.std_error) out << fmt_double(*r.std_error);
        out << ',';
        if (r.bound) out << fmt_double(*r.bound);
        out << ',';
        if (r.pass) out << (*r.pass ? "true" : "false");
        out << ',' << csv_field(r.params) << ',' << fmt_double(r.wall_time_ms) << '\n';
    }
    return out.str();
}

void write_csv(std::span<const ResultRecord> records, const std::filesystem::path& path) {
    write_text(to_csv(records), path);
}

std::string to_svg(std::span<const Series> series, const std::string& x_label,
                   const std::string& y_label) {
    if (series.empty()) throw std::invalid_argument("need at least one series");
    for (const Series& s : series)
        if (s.points.size() < 2)
            throw std::invalid_argument("series '" + s.label + "' needs at least 2 points");

    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const Series& s : series) {
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y))
                throw std::invalid_argument("series points must be finite");
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax <= xmin) throw std::invalid_argument("degenerate x range (all x equal)");
    if (ymax <= ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    }

    constexpr int kWidth = 720;
    constexpr int kHeight = 480;
    constexpr double kLeft = 70.0;
    constexpr double kRight = 20.0;
    constexpr double kTop = 20.0;
    constexpr double kBottom = 50.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return kHeight - kBottom - (y - ymin) / (ymax - ymin) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    svg << "  <rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / kTicks;
        const double gx = px(fx);
        svg << "  <line x1=\"" << gx << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << gx
            << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
        svg << "  <text x=\"" << gx << "\" y=\"" << kHeight - kBottom + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_short(fx) << "</text>\n";
        const double fy = ymin + (ymax - ymin) * i / kTicks;
        const double gy = py(fy);
        svg << "  <line x1=\"" << kLeft - 5 << "\" y1=\"" << gy << "\" x2=\"" << kLeft
            << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
        svg << "  <text x=\"" << kLeft - 8 << "\" y=\"" << gy + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_short(fy) << "</text>\n";
    }
    if (!x_label.empty())
        svg << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
            << "\" font-size=\"13\" text-anchor=\"middle\">" << escape_xml(x_label)
            << "</text>\n";
    if (!y_label.empty())
        svg << "  <text x=\"16\" y=\"" << kTop + plot_h / 2
            << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
            << kTop + plot_h / 2 << ")\">" << escape_xml(y_label) << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < series[i].points.size(); ++j) {
            if (j) svg << ' ';
            svg << fmt_short(px(series[i].points[j].first)) << ','
                << fmt_short(py(series[i].points[j].second));
        }
        svg << "\"/>\n";
    }

    // Legend: one swatch + label per series, input order.
    const double lx = kLeft + plot_w - 150.0;
    double ly = kTop + 12.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "  <line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "  <text x=\"" << lx + 28 << "\" y=\"" << ly
            << "\" font-size=\"12\">" << escape_xml(series[i].label) << "</text>\n";
        ly += 16.0;
    }

    svg << "</svg>\n";
    return svg.str();
}

void emit_svg(std::span<const Series> series, const std::filesystem::path& path,
              const std::string& x_label, const std::string& y_label) {
    write_text(to_svg(series, x_label, y_label), path);
}

}  // namespace smx
