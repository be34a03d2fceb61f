#include "abcage/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace abcage {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 40, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void absorb(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
    double frac(double v) const { return (v - lo) / (hi - lo); }
};

void open_svg(std::ofstream& out, const std::string& path, const std::string& title) {
    out.open(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
}

void draw_axes(std::ofstream& out, const Range& xr, const Range& yr, const std::string& x_label,
               const std::string& y_label) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
        << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = k / 4.0;
        const double px = x0 + fx * (x1 - x0);
        const double py = y0 - fx * (y0 - y1);
        out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 5
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << y0 + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << num(xr.lo + fx * (xr.hi - xr.lo)) << "</text>\n"
            << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << num(yr.lo + fx * (yr.hi - yr.lo)) << "</text>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n"
        << "<text x=\"18\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
}

// five-stop blue-to-yellow colormap
std::string colormap(double f) {
    static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                       {94, 201, 98}, {253, 231, 37}};
    f = std::clamp(f, 0.0, 1.0);
    const double pos = f * 4.0;
    const int i = std::min(3, static_cast<int>(pos));
    const double t = pos - i;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(stops[i][0] + t * (stops[i + 1][0] - stops[i][0])),
                  static_cast<int>(stops[i][1] + t * (stops[i + 1][1] - stops[i][1])),
                  static_cast<int>(stops[i][2] + t * (stops[i + 1][2] - stops[i][2])));
    return buf;
}

} // namespace

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
    Range xr, yr;
    for (const auto& s : series) {
        for (const double v : s.x) xr.absorb(v);
        for (const double v : s.y) yr.absorb(v);
    }
    xr.finish();
    yr.finish();

    std::ofstream out;
    open_svg(out, path, title);
    draw_axes(out, xr, yr, x_label, y_label);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            out << num(x0 + xr.frac(s.x[i]) * (x1 - x0)) << ","
                << num(y0 - yr.frac(s.y[i]) * (y0 - y1)) << " ";
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = y1 + 16 + 16 * double(si);
            out << "<line x1=\"" << x1 - 120 << "\" y1=\"" << ly << "\" x2=\"" << x1 - 100
                << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
                << "<text x=\"" << x1 - 94 << "\" y=\"" << ly + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
        }
    }
    out << "</svg>\n";
}

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<std::vector<double>>& values) {
    if (values.size() != y.size()) throw std::invalid_argument("heatmap rows must match y grid");
    Range xr, yr, zr;
    for (const double v : x) xr.absorb(v);
    for (const double v : y) yr.absorb(v);
    for (const auto& row : values) {
        if (row.size() != x.size()) throw std::invalid_argument("heatmap columns must match x grid");
        for (const double v : row) zr.absorb(v);
    }
    xr.finish();
    yr.finish();
    zr.finish();

    std::ofstream out;
    open_svg(out, path, title);
    const double x0 = kLeft, x1 = kWidth - kRight - 60, y0 = kHeight - kBottom, y1 = kTop;
    const double cw = (x1 - x0) / double(x.size());
    const double ch = (y0 - y1) / double(y.size());
    for (std::size_t iy = 0; iy < y.size(); ++iy) {
        for (std::size_t ix = 0; ix < x.size(); ++ix) {
            out << "<rect x=\"" << num(x0 + cw * double(ix)) << "\" y=\""
                << num(y0 - ch * double(iy + 1)) << "\" width=\"" << num(cw + 0.5)
                << "\" height=\"" << num(ch + 0.5) << "\" fill=\""
                << colormap(zr.frac(values[iy][ix])) << "\"/>\n";
        }
    }
    {
        const double bx0 = kLeft, bx1 = x1;
        out << "<rect x=\"" << bx0 << "\" y=\"" << y1 << "\" width=\"" << bx1 - bx0
            << "\" height=\"" << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double f = k / 4.0;
            out << "<text x=\"" << bx0 + f * (bx1 - bx0) << "\" y=\"" << y0 + 20
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << num(xr.lo + f * (xr.hi - xr.lo)) << "</text>\n"
                << "<text x=\"" << bx0 - 8 << "\" y=\"" << y0 - f * (y0 - y1) + 4
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                << num(yr.lo + f * (yr.hi - yr.lo)) << "</text>\n";
        }
        out << "<text x=\"" << (bx0 + bx1) / 2 << "\" y=\"" << kHeight - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
            << "</text>\n"
            << "<text x=\"18\" y=\"" << (y0 + y1) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 18 " << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
    }
    // colorbar
    for (int k = 0; k < 64; ++k) {
        const double f = k / 63.0;
        out << "<rect x=\"" << x1 + 20 << "\" y=\"" << num(y0 - (y0 - y1) * (k + 1) / 64.0)
            << "\" width=\"16\" height=\"" << num((y0 - y1) / 64.0 + 0.5) << "\" fill=\""
            << colormap(f) << "\"/>\n";
    }
    out << "<text x=\"" << x1 + 42 << "\" y=\"" << y0 + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(zr.lo) << "</text>\n"
        << "<text x=\"" << x1 + 42 << "\" y=\"" << y1 + 10
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(zr.hi) << "</text>\n"
        << "</svg>\n";
}

} // namespace abcage
