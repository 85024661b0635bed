#include "svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gfm::cli {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target_count) {
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    const double raw = (hi - lo) / std::max(1, target_count);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) {
            break;
        }
    }
    std::vector<double> ticks;
    const double first = std::floor(lo / step + 1e-9) * step;
    for (double v = first; v <= hi + step * (1.0 - 1e-9); v += step) {
        ticks.push_back(std::round(v / step) * step);
        if (ticks.back() >= hi - 1e-9 * step) {
            break;
        }
    }
    return ticks;
}

std::string render_svg(const Trace& trace, const std::vector<std::string>& columns, const PlotOptions& options) {
    for (const auto& c : columns) {
        if (std::find(kTraceColumns.begin(), kTraceColumns.end(), c) == kTraceColumns.end()) {
            throw std::out_of_range("unknown trace column '" + c + "'");
        }
    }
    const auto& xs = trace.samples;
    double t0 = xs.empty() ? 0.0 : xs.front().t;
    double t1 = xs.empty() ? 1.0 : xs.back().t;
    if (!(t1 > t0)) {
        t1 = t0 + 1.0;
    }
    double y_lo = 0.0;
    double y_hi = 0.0;
    for (const auto& c : columns) {
        for (const auto& s : xs) {
            const double v = trace_column(s, c);
            if (std::isfinite(v)) {
                y_lo = std::min(y_lo, v);
                y_hi = std::max(y_hi, v);
            }
        }
    }
    for (double v : options.hlines) {
        if (std::isfinite(v)) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    const std::vector<double> yt = nice_ticks(y_lo, y_hi);
    const std::vector<double> xt = nice_ticks(t0, t1, 8);
    y_lo = std::min(y_lo, yt.front());
    y_hi = std::max(y_hi, yt.back());
    if (!(y_hi > y_lo)) {
        y_hi = y_lo + 1.0;
    }

    const double left = 70.0, right = 20.0, top = options.title.empty() ? 20.0 : 40.0, bottom = 50.0;
    const double w = options.width - left - right;
    const double h = options.height - top - bottom;
    auto sx = [&](double t) { return left + (t - t0) / (t1 - t0) * w; };
    auto sy = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * h; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        o << "<text x=\"" << px(left + w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
          << escape(options.title) << "</text>\n";
    }

    o << "<g class=\"y-axis\" data-min=\"" << fmt(y_lo) << "\" data-max=\"" << fmt(y_hi) << "\">\n";
    for (double v : yt) {
        if (v < y_lo - 1e-12 || v > y_hi + 1e-12) continue;
        o << "<line class=\"grid\" data-value=\"" << fmt(v) << "\" x1=\"" << px(left) << "\" y1=\"" << px(sy(v))
          << "\" x2=\"" << px(left + w) << "\" y2=\"" << px(sy(v)) << "\" stroke=\"#dddddd\"/>\n";
        o << "<text x=\"" << px(left - 6) << "\" y=\"" << px(sy(v) + 4) << "\" text-anchor=\"end\">" << fmt(v)
          << "</text>\n";
    }
    o << "</g>\n<g class=\"x-axis\" data-min=\"" << fmt(t0) << "\" data-max=\"" << fmt(t1) << "\">\n";
    for (double t : xt) {
        if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
        o << "<line class=\"grid\" data-value=\"" << fmt(t) << "\" x1=\"" << px(sx(t)) << "\" y1=\"" << px(top)
          << "\" x2=\"" << px(sx(t)) << "\" y2=\"" << px(top + h) << "\" stroke=\"#eeeeee\"/>\n";
        o << "<text x=\"" << px(sx(t)) << "\" y=\"" << px(top + h + 16) << "\" text-anchor=\"middle\">" << fmt(t)
          << "</text>\n";
    }
    o << "</g>\n";
    o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(w) << "\" height=\"" << px(h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : options.hlines) {
        if (!std::isfinite(v)) continue;
        o << "<line class=\"reference\" data-value=\"" << fmt(v) << "\" x1=\"" << px(left) << "\" y1=\"" << px(sy(v))
          << "\" x2=\"" << px(left + w) << "\" y2=\"" << px(sy(v)) << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n";
    }
    o << "<text x=\"" << px(left + w / 2) << "\" y=\"" << px(top + h + 38)
      << "\" text-anchor=\"middle\">time_s</text>\n";
    std::string ylabel;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        ylabel += (k ? ", " : "") + columns[k];
    }
    o << "<text transform=\"translate(16," << px(top + h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(ylabel) << "</text>\n";

    for (std::size_t k = 0; k < columns.size(); ++k) {
        const char* color = kPalette[k % kPalette.size()];
        o << "<polyline class=\"series\" data-column=\"" << columns[k] << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.2\" points=\"";
        bool first = true;
        for (const auto& s : xs) {
            const double v = trace_column(s, columns[k]);
            if (!std::isfinite(v)) continue;
            o << (first ? "" : " ") << px(sx(s.t)) << ',' << px(sy(v));
            first = false;
        }
        o << "\"/>\n";
        const double ly = top + 14.0 + 16.0 * static_cast<double>(k);
        o << "<g class=\"legend\"><line x1=\"" << px(left + w - 150) << "\" y1=\"" << px(ly - 4) << "\" x2=\""
          << px(left + w - 126) << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/><text x=\"" << px(left + w - 120) << "\" y=\"" << px(ly) << "\">" << columns[k]
          << "</text></g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace gfm::cli
