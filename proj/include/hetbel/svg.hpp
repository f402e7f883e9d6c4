#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace hetbel {

struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line chart: axes box, min/max tick labels, one polyline per series and a legend.
inline std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                  const std::vector<SvgSeries>& series) {
    constexpr double W = 640, H = 420, L = 70, R = 150, Tm = 40, B = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pw = W - L - R, ph = H - Tm - B;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return Tm + (y1 - y) / (y1 - y0) * ph; };
    auto num = [](double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.4g", v);
        return std::string(b);
    };
    auto esc = [](const std::string& s) {
        std::string o;
        for (char c : s) {
            if (c == '<') o += "&lt;";
            else if (c == '>') o += "&gt;";
            else if (c == '&') o += "&amp;";
            else o += c;
        }
        return o;
    };

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + esc(title) + "</text>\n";
    o += "<rect x=\"" + num(L) + "\" y=\"" + num(Tm) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    o += "<text x=\"" + num(L) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"middle\">" + num(x0) + "</text>\n";
    o += "<text x=\"" + num(L + pw) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"middle\">" + num(x1) + "</text>\n";
    o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(Tm + ph) + "\" text-anchor=\"end\">" + num(y0) + "</text>\n";
    o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(Tm + 4) + "\" text-anchor=\"end\">" + num(y1) + "</text>\n";
    o += "<text x=\"" + num(L + pw / 2) + "\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\">" + esc(xlabel) +
         "</text>\n";
    o += "<text transform=\"translate(16," + num(Tm + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         esc(ylabel) + "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = colors[k % (sizeof colors / sizeof colors[0])];
        o += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(col) + "\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            o += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        }
        o += "\"/>\n";
        const double ly = Tm + 14 + 18 * static_cast<double>(k);
        o += "<line x1=\"" + num(W - R + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(W - R + 30) + "\" y2=\"" +
             num(ly - 4) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
        o += "<text x=\"" + num(W - R + 36) + "\" y=\"" + num(ly) + "\">" + esc(s.name) + "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

inline void write_svg(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

}  // namespace hetbel
