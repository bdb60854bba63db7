#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace chainform::svg {

struct Series {
    std::string name;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool step = false;
};

struct Chart {
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
    std::vector<std::pair<std::string, double>> hlines; // labelled horizontal reference lines
    int width = 720, height = 440;
};

namespace detail {

inline std::string num(double v)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return b;
}

inline std::string tick(double v)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

inline std::string esc(const std::string& s)
{
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

inline std::vector<double> nice_ticks(double lo, double hi, int target = 6)
{
    double span = hi - lo;
    if (!(span > 0)) return {lo};
    double raw = span / target, mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return t;
}

} // namespace detail

inline std::string render(const Chart& c)
{
    using namespace detail;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : c.series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    for (const auto& h : c.hlines) {
        y0 = std::min(y0, h.second);
        y1 = std::max(y1, h.second);
    }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double L = 80, R = 170, T = 40, B = 60;
    double pw = c.width - L - R, ph = c.height - T - B;
    auto X = [&](double v) { return L + (v - x0) / (x1 - x0) * pw; };
    auto Y = [&](double v) { return T + (y1 - v) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width << "\" height=\"" << c.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(L + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(c.title)
      << "</text>\n";
    o << "<rect x=\"" << num(L) << "\" y=\"" << num(T) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : nice_ticks(x0, x1)) {
        o << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(T + ph) << "\" x2=\"" << num(X(t)) << "\" y2=\""
          << num(T + ph + 5) << "\" stroke=\"#333\"/>";
        o << "<text x=\"" << num(X(t)) << "\" y=\"" << num(T + ph + 18) << "\" text-anchor=\"middle\">" << tick(t)
          << "</text>\n";
    }
    for (double t : nice_ticks(y0, y1)) {
        o << "<line x1=\"" << num(L - 5) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(L) << "\" y2=\"" << num(Y(t))
          << "\" stroke=\"#333\"/>";
        o << "<line x1=\"" << num(L) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(L + pw) << "\" y2=\"" << num(Y(t))
          << "\" stroke=\"#eee\"/>";
        o << "<text x=\"" << num(L - 8) << "\" y=\"" << num(Y(t) + 4) << "\" text-anchor=\"end\">" << tick(t)
          << "</text>\n";
    }
    o << "<text x=\"" << num(L + pw / 2) << "\" y=\"" << num(c.height - 15) << "\" text-anchor=\"middle\">"
      << esc(c.xlabel) << "</text>\n";
    o << "<text x=\"18\" y=\"" << num(T + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num(T + ph / 2) << ")\">" << esc(c.ylabel) << "</text>\n";
    for (const auto& h : c.hlines) {
        o << "<line x1=\"" << num(L) << "\" y1=\"" << num(Y(h.second)) << "\" x2=\"" << num(L + pw) << "\" y2=\""
          << num(Y(h.second)) << "\" stroke=\"#888\" stroke-dasharray=\"2,3\"/>";
        o << "<text x=\"" << num(L + pw + 6) << "\" y=\"" << num(Y(h.second) + 4) << "\" fill=\"#555\">"
          << esc(h.first) << "</text>\n";
    }
    int k = 0;
    for (const auto& s : c.series) {
        std::ostringstream d;
        bool pen = false;
        double prev_y = 0;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                pen = false;
                continue;
            }
            if (pen && s.step) d << " L" << num(X(s.x[i])) << "," << num(Y(prev_y));
            d << (pen ? " L" : " M") << num(X(s.x[i])) << "," << num(Y(s.y[i]));
            prev_y = s.y[i];
            pen = true;
        }
        o << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        double ly = T + 14 + 18 * k++;
        o << "<line x1=\"" << num(L + pw + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(L + pw + 30)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>";
        o << "<text x=\"" << num(L + pw + 35) << "\" y=\"" << num(ly + 4) << "\">" << esc(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

struct Histogram {
    std::string title, xlabel;
    std::vector<double> edges; // bins+1
    std::vector<long> counts;
    int width = 720, height = 440;
};

inline std::string render(const Histogram& h)
{
    using namespace detail;
    long cmax = 1;
    for (long c : h.counts) cmax = std::max(cmax, c);
    double x0 = h.edges.front(), x1 = h.edges.back();
    if (!(x1 > x0)) x1 = x0 + 1;
    const double L = 80, R = 30, T = 40, B = 60;
    double pw = h.width - L - R, ph = h.height - T - B;
    auto X = [&](double v) { return L + (v - x0) / (x1 - x0) * pw; };
    auto Y = [&](double v) { return T + (1.0 - v / double(cmax)) * ph; };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << h.width << "\" height=\"" << h.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(L + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(h.title)
      << "</text>\n";
    for (size_t b = 0; b < h.counts.size(); ++b) {
        if (h.counts[b] == 0) continue;
        double xa = X(h.edges[b]), xb = X(h.edges[b + 1]), y = Y(double(h.counts[b]));
        o << "<rect x=\"" << num(xa) << "\" y=\"" << num(y) << "\" width=\"" << num(std::max(0.5, xb - xa - 1))
          << "\" height=\"" << num(T + ph - y) << "\" fill=\"#4c72b0\"/>\n";
    }
    o << "<rect x=\"" << num(L) << "\" y=\"" << num(T) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : nice_ticks(x0, x1))
        o << "<text x=\"" << num(X(t)) << "\" y=\"" << num(T + ph + 18) << "\" text-anchor=\"middle\">" << tick(t)
          << "</text>\n";
    for (double t : nice_ticks(0.0, double(cmax)))
        o << "<text x=\"" << num(L - 8) << "\" y=\"" << num(Y(t) + 4) << "\" text-anchor=\"end\">" << tick(t)
          << "</text>\n";
    o << "<text x=\"" << num(L + pw / 2) << "\" y=\"" << num(h.height - 15) << "\" text-anchor=\"middle\">"
      << esc(h.xlabel) << "</text>\n";
    o << "<text x=\"18\" y=\"" << num(T + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num(T + ph / 2) << ")\">cells</text>\n";
    o << "</svg>\n";
    return o.str();
}

} // namespace chainform::svg
