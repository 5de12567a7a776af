#include "frtsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "frtsim/error.hpp"

namespace frtsim {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
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

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

bool starts_with(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

}  // namespace

std::vector<PlotPanel> default_panels(const Trace& trace) {
    PlotPanel v{"Voltage magnitude (pu)", {}};
    PlotPanel p{"Active power (pu)", {}};
    PlotPanel q{"Reactive power (pu)", {}};
    PlotPanel f{"Island frequency (Hz)", {}};
    for (const auto& c : trace.columns) {
        if (starts_with(c, "V_")) v.columns.push_back(c);
        if (starts_with(c, "P_")) p.columns.push_back(c);
        if (starts_with(c, "Q_")) q.columns.push_back(c);
        if (c == "f_island") f.columns.push_back(c);
    }
    std::vector<PlotPanel> out;
    for (auto* panel : {&v, &p, &q, &f}) {
        if (!panel->columns.empty()) out.push_back(*panel);
    }
    return out;
}

void write_svg(std::ostream& os, const Trace& trace, std::span<const PlotPanel> panels, const PlotOptions& opt) {
    if (panels.empty()) throw ArgumentError("plot needs at least one panel");
    for (const auto& panel : panels) {
        if (panel.columns.empty()) throw ArgumentError("plot panel '" + panel.title + "' has no columns");
        for (const auto& c : panel.columns) (void)trace.column(c);
    }
    const double t0 = opt.t_begin >= 0.0 ? opt.t_begin : (trace.rows.empty() ? 0.0 : trace.rows.front()[0]);
    double t1 = opt.t_end >= 0.0 ? opt.t_end : trace.end_time();
    if (!(t1 > t0)) t1 = t0 + 1.0;

    const double left = 70.0, right = 170.0, top = opt.title.empty() ? 20.0 : 44.0, gap = 40.0, bottom = 40.0;
    const double plot_w = opt.width - left - right;
    const double ph = opt.panel_height;
    const double height = top + static_cast<double>(panels.size()) * (ph + gap) - gap + bottom;

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(opt.width) << "\" height=\"" << fmt(height)
       << "\" viewBox=\"0 0 " << fmt(opt.width) << ' ' << fmt(height)
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty()) {
        os << "<text x=\"" << fmt(opt.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
           << xml_escape(opt.title) << "</text>\n";
    }

    const double t_step = nice_step(t1 - t0, 10);
    const int buckets = std::max(1, static_cast<int>(plot_w));

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const double y_top = top + static_cast<double>(pi) * (ph + gap);
        auto xpos = [&](double t) { return left + (t - t0) / (t1 - t0) * plot_w; };

        // y range over the visible window
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        std::vector<std::size_t> cols;
        for (const auto& c : panel.columns) cols.push_back(trace.column(c));
        for (const auto& r : trace.rows) {
            if (r[0] < t0 || r[0] > t1) continue;
            for (auto c : cols) {
                lo = std::min(lo, r[c]);
                hi = std::max(hi, r[c]);
            }
        }
        if (!std::isfinite(lo)) lo = hi = 0.0;
        if (hi - lo < 1e-9 * std::max(1.0, std::abs(hi))) {
            const double pad = std::max(0.05 * std::abs(hi), 0.05);
            lo -= pad;
            hi += pad;
        } else {
            const double pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        auto ypos = [&](double v) { return y_top + ph - (v - lo) / (hi - lo) * ph; };

        os << "<g>\n<text x=\"" << fmt(left) << "\" y=\"" << fmt(y_top - 6) << "\" font-size=\"12\">"
           << xml_escape(panel.title) << "</text>\n";
        os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(y_top) << "\" width=\"" << fmt(plot_w) << "\" height=\""
           << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

        const double y_step = nice_step(hi - lo, 5);
        for (double v = std::ceil(lo / y_step) * y_step; v <= hi; v += y_step) {
            const double y = ypos(v);
            os << "<line x1=\"" << fmt(left) << "\" x2=\"" << fmt(left + plot_w) << "\" y1=\"" << fmt(y) << "\" y2=\""
               << fmt(y) << "\" stroke=\"#ddd\"/>\n";
            os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
               << fmt(std::abs(v) < 1e-12 * y_step ? 0.0 : v) << "</text>\n";
        }
        for (double t = std::ceil(t0 / t_step) * t_step; t <= t1 + 1e-12; t += t_step) {
            const double x = xpos(t);
            os << "<line x1=\"" << fmt(x) << "\" x2=\"" << fmt(x) << "\" y1=\"" << fmt(y_top) << "\" y2=\""
               << fmt(y_top + ph) << "\" stroke=\"#eee\"/>\n";
            if (pi + 1 == panels.size()) {
                os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y_top + ph + 16) << "\" text-anchor=\"middle\">"
                   << fmt(t) << "</text>\n";
            }
        }
        for (const auto& m : opt.markers) {
            if (m.t < t0 || m.t > t1) continue;
            const double x = xpos(m.t);
            os << "<line x1=\"" << fmt(x) << "\" x2=\"" << fmt(x) << "\" y1=\"" << fmt(y_top) << "\" y2=\""
               << fmt(y_top + ph) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
        }

        for (std::size_t k = 0; k < cols.size(); ++k) {
            const char* colour = kPalette[k % std::size(kPalette)];
            // min/max per horizontal pixel keeps fast transients visible
            std::vector<std::pair<double, double>> pts;
            int bucket = -1;
            double bmin = 0, bmax = 0, tmin = 0, tmax = 0;
            auto flush = [&] {
                if (bucket < 0) return;
                if (tmin <= tmax) {
                    pts.emplace_back(tmin, bmin);
                    if (tmax != tmin) pts.emplace_back(tmax, bmax);
                } else {
                    pts.emplace_back(tmax, bmax);
                    pts.emplace_back(tmin, bmin);
                }
            };
            for (const auto& r : trace.rows) {
                if (r[0] < t0 || r[0] > t1) continue;
                const int b = std::min(buckets - 1, static_cast<int>((r[0] - t0) / (t1 - t0) * buckets));
                const double v = r[cols[k]];
                if (b != bucket) {
                    flush();
                    bucket = b;
                    bmin = bmax = v;
                    tmin = tmax = r[0];
                } else {
                    if (v < bmin) { bmin = v; tmin = r[0]; }
                    if (v > bmax) { bmax = v; tmax = r[0]; }
                }
            }
            flush();
            os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) {
                os << (i ? " " : "") << fmt(xpos(pts[i].first)) << ',' << fmt(ypos(pts[i].second));
            }
            os << "\"/>\n";
            const double ly = y_top + 14.0 + 16.0 * static_cast<double>(k);
            os << "<line x1=\"" << fmt(left + plot_w + 10) << "\" x2=\"" << fmt(left + plot_w + 30) << "\" y1=\""
               << fmt(ly - 4) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << fmt(left + plot_w + 34) << "\" y=\"" << fmt(ly) << "\">"
               << xml_escape(panel.columns[k]) << "</text>\n";
        }
        os << "</g>\n";
    }
    os << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 6)
       << "\" text-anchor=\"middle\">time (s)</text>\n";
    os << "</svg>\n";
}

}  // namespace frtsim
