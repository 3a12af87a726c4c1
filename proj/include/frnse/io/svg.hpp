#pragma once

// Minimal deterministic SVG line charts. Coordinates are printed with two
// fixed decimals so output bytes depend only on the input data.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/io/csv.hpp"
#include "frnse/io/format.hpp"

namespace frnse::io {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartOptions {
    std::string title;
    std::string x_label = "t";
    bool log_y = false;
    int width = 640;
    int height = 400;
};

namespace detail {

inline std::string px(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    std::string s(buf, r.ptr);
    return s == "-0.00" ? "0.00" : s;
}

inline std::string tick(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
    return std::string(buf, r.ptr);
}

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

inline const char* palette(std::size_t i)
{
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    return colors[i % 8];
}

} // namespace detail

inline std::string render_svg(const std::vector<Series>& series, const ChartOptions& opt)
{
    const double left = 70, right = 150, top = 40, bottom = 50;
    const double pw = opt.width - left - right, ph = opt.height - top - bottom;
    auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!opt.log_y || y > 0); };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i])) {
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, ty(s.y[i]));
                y1 = std::max(y1, ty(s.y[i]));
            }
    if (!(x0 <= x1)) {
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    }
    if (x1 == x0)
        x1 = x0 + 1;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (1 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        o << "<text x=\"" << detail::px(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
          << "font-family=\"sans-serif\" font-size=\"15\">" << detail::xml_escape(opt.title) << "</text>\n";
    o << "<rect x=\"" << detail::px(left) << "\" y=\"" << detail::px(top) << "\" width=\"" << detail::px(pw)
      << "\" height=\"" << detail::px(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Five ticks per axis, labelled in data units (decades on a log axis).
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4, fy = y0 + (y1 - y0) * i / 4;
        const double X = left + pw * i / 4, Y = top + ph * (1 - i / 4.0);
        o << "<text x=\"" << detail::px(X) << "\" y=\"" << detail::px(top + ph + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << detail::tick(fx) << "</text>\n";
        const std::string label = opt.log_y ? "1e" + detail::tick(fy) : detail::tick(fy);
        o << "<text x=\"" << detail::px(left - 6) << "\" y=\"" << detail::px(Y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
          << detail::xml_escape(label) << "</text>\n";
    }
    o << "<text x=\"" << detail::px(left + pw / 2) << "\" y=\"" << detail::px(opt.height - 12.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << detail::xml_escape(opt.x_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i]))
                continue;
            if (!pts.empty())
                pts += ' ';
            pts += detail::px(sx(s.x[i])) + ',' + detail::px(sy(s.y[i]));
        }
        o << "<polyline fill=\"none\" stroke=\"" << detail::palette(k) << "\" stroke-width=\"1.5\" points=\""
          << pts << "\"/>\n";
        const double ly = top + 14 + 18.0 * k;
        o << "<line x1=\"" << detail::px(left + pw + 10) << "\" y1=\"" << detail::px(ly - 4) << "\" x2=\""
          << detail::px(left + pw + 30) << "\" y2=\"" << detail::px(ly - 4) << "\" stroke=\""
          << detail::palette(k) << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << detail::px(left + pw + 34) << "\" y=\"" << detail::px(ly)
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Series from the first table of a CSV: the abscissa column (default "t",
/// else the first column) against every other fully numeric column.
inline std::vector<Series> series_from_csv(const std::string& text, std::string x_column = "t")
{
    const auto rows = parse_csv(text);
    if (rows.empty())
        throw InvalidArgument("CSV input is empty");
    const auto& header = rows[0];
    std::size_t xc = 0;
    if (auto it = std::find(header.begin(), header.end(), x_column); it != header.end())
        xc = static_cast<std::size_t>(it - header.begin());
    // The first table ends where the row width changes.
    std::size_t end = 1;
    while (end < rows.size() && rows[end].size() == header.size())
        ++end;
    std::vector<Series> out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == xc)
            continue;
        Series s{header[c], {}, {}};
        bool numeric = end > 1;
        for (std::size_t r = 1; r < end && numeric; ++r) {
            const auto x = parse_double(rows[r][xc]);
            const auto y = parse_double(rows[r][c]);
            numeric = x && y;
            if (numeric) {
                s.x.push_back(*x);
                s.y.push_back(*y);
            }
        }
        if (numeric)
            out.push_back(std::move(s));
    }
    if (out.empty())
        throw InvalidArgument("CSV has no numeric series against column '" + header[xc] + "'");
    return out;
}

} // namespace frnse::io
