#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "semspec/common.hpp"
#include "semspec/io.hpp"
#include "semspec/sweep.hpp"

namespace semspec {

enum class SweepPlot {
    EnergyVsTemperature,
    EnergyVsTime,
    DistortionVsTemperature,
};

inline SweepPlot parse_plot(const std::string& s) {
    if (s == "energy_vs_T") return SweepPlot::EnergyVsTemperature;
    if (s == "energy_vs_t") return SweepPlot::EnergyVsTime;
    if (s == "distortion_vs_T") return SweepPlot::DistortionVsTemperature;
    throw error("unknown plot kind '" + s +
                "' (expected energy_vs_T, energy_vs_t, or distortion_vs_T)");
}

inline std::string to_string(SweepPlot p) {
    switch (p) {
        case SweepPlot::EnergyVsTemperature: return "energy_vs_T";
        case SweepPlot::EnergyVsTime: return "energy_vs_t";
        case SweepPlot::DistortionVsTemperature: return "distortion_vs_T";
    }
    throw error("invalid plot kind");
}

namespace detail {

struct PlotStep {
    double x = 0.0;
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

inline std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace detail

/// Renders one summary curve per schedule step: mean over pairs (solid line
/// with point markers), the pairwise min–max range (translucent band), and the
/// report-wide eigenvalue-derived bounds (dashed horizontal lines).
inline std::string render_svg(const SweepReport& report, SweepPlot plot) {
    require(!report.rows.empty(), "svg: report has no rows");

    const bool x_is_time = (plot == SweepPlot::EnergyVsTime);
    const bool y_is_energy = (plot != SweepPlot::DistortionVsTemperature);

    // rows arrive sorted by step, then pair; collapse each step in place
    std::vector<detail::PlotStep> steps;
    double bound_lo = report.rows.front().bound_lower;
    double bound_hi = report.rows.front().bound_upper;
    {
        detail::PlotStep cur;
        double cur_t = report.rows.front().t;
        double sum = 0.0;
        int count = 0;
        auto flush = [&]() {
            cur.mean = sum / count;
            steps.push_back(cur);
        };
        for (const SweepRow& r : report.rows) {
            const double y = y_is_energy ? r.e_hall_rayleigh : r.d_sem_closed;
            if (count > 0 && r.t != cur_t) {
                flush();
                count = 0;
            }
            if (count == 0) {
                cur_t = r.t;
                cur.x = x_is_time ? r.t : r.temperature;
                cur.lo = cur.hi = y;
                sum = 0.0;
            }
            sum += y;
            ++count;
            cur.lo = std::min(cur.lo, y);
            cur.hi = std::max(cur.hi, y);
            bound_lo = std::min(bound_lo, r.bound_lower);
            bound_hi = std::max(bound_hi, r.bound_upper);
        }
        flush();
    }
    std::sort(steps.begin(), steps.end(),
              [](const detail::PlotStep& a, const detail::PlotStep& b) { return a.x < b.x; });

    double x_min = steps.front().x, x_max = steps.back().x;
    double y_min = steps.front().lo, y_max = steps.front().hi;
    for (const auto& s : steps) {
        y_min = std::min(y_min, s.lo);
        y_max = std::max(y_max, s.hi);
    }
    if (y_is_energy) {
        y_min = std::min(y_min, bound_lo);
        y_max = std::max(y_max, bound_hi);
    }
    auto widen = [](double& lo, double& hi) {
        if (hi - lo < 1e-12) {
            const double pad = std::max(1.0, std::abs(hi)) * 0.5;
            lo -= pad;
            hi += pad;
        } else {
            const double pad = (hi - lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
    };
    widen(x_min, x_max);
    widen(y_min, y_max);

    const double width = 720.0, height = 480.0;
    const double ml = 72.0, mr = 24.0, mt = 36.0, mb = 56.0;
    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto py = [&](double y) {
        return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
    };

    const std::string x_label = x_is_time ? "annealing step t" : "temperature";
    const std::string y_label = y_is_energy ? "hallucination energy" : "semantic distortion";
    const std::string title = y_label + " vs " + x_label;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"360\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + title + "</text>\n";

    // axes
    s += "<line x1=\"" + detail::fmt2(ml) + "\" y1=\"" + detail::fmt2(height - mb) +
         "\" x2=\"" + detail::fmt2(width - mr) + "\" y2=\"" + detail::fmt2(height - mb) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + detail::fmt2(ml) + "\" y1=\"" + detail::fmt2(mt) + "\" x2=\"" +
         detail::fmt2(ml) + "\" y2=\"" + detail::fmt2(height - mb) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / ticks;
        const double fy = y_min + (y_max - y_min) * i / ticks;
        s += "<line x1=\"" + detail::fmt2(px(fx)) + "\" y1=\"" + detail::fmt2(height - mb) +
             "\" x2=\"" + detail::fmt2(px(fx)) + "\" y2=\"" +
             detail::fmt2(height - mb + 5) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + detail::fmt2(px(fx)) + "\" y=\"" +
             detail::fmt2(height - mb + 20) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
             detail::fmt_tick(fx) + "</text>\n";
        s += "<line x1=\"" + detail::fmt2(ml - 5) + "\" y1=\"" + detail::fmt2(py(fy)) +
             "\" x2=\"" + detail::fmt2(ml) + "\" y2=\"" + detail::fmt2(py(fy)) +
             "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + detail::fmt2(ml - 8) + "\" y=\"" + detail::fmt2(py(fy) + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
             detail::fmt_tick(fy) + "</text>\n";
    }
    s += "<text x=\"" + detail::fmt2((ml + width - mr) / 2) + "\" y=\"" +
         detail::fmt2(height - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label +
         "</text>\n";
    s += "<text x=\"18\" y=\"" + detail::fmt2((mt + height - mb) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " + detail::fmt2((mt + height - mb) / 2) + ")\">" +
         y_label + "</text>\n";

    // min–max band across pairs
    if (steps.size() >= 2) {
        s += "<polygon fill=\"#4878cf\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
        for (const auto& st : steps)
            s += detail::fmt2(px(st.x)) + "," + detail::fmt2(py(st.hi)) + " ";
        for (auto it = steps.rbegin(); it != steps.rend(); ++it)
            s += detail::fmt2(px(it->x)) + "," + detail::fmt2(py(it->lo)) + " ";
        if (!s.empty() && s.back() == ' ') s.pop_back();
        s += "\"/>\n";
    }

    // dashed horizontal lines at the eigenvalue-derived bounds
    if (y_is_energy) {
        for (double b : {bound_lo, bound_hi}) {
            s += "<line x1=\"" + detail::fmt2(ml) + "\" y1=\"" + detail::fmt2(py(b)) +
                 "\" x2=\"" + detail::fmt2(width - mr) + "\" y2=\"" + detail::fmt2(py(b)) +
                 "\" stroke=\"#c44e52\" stroke-width=\"1.5\" stroke-dasharray=\"7,4\"/>\n";
        }
        s += "<text x=\"" + detail::fmt2(width - mr) + "\" y=\"" +
             detail::fmt2(py(bound_hi) - 5) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
             "fill=\"#c44e52\">upper bound</text>\n";
        s += "<text x=\"" + detail::fmt2(width - mr) + "\" y=\"" +
             detail::fmt2(py(bound_lo) + 14) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
             "fill=\"#c44e52\">lower bound</text>\n";
    }

    // mean curve with point markers
    if (steps.size() >= 2) {
        s += "<polyline fill=\"none\" stroke=\"#4878cf\" stroke-width=\"2\" points=\"";
        for (const auto& st : steps)
            s += detail::fmt2(px(st.x)) + "," + detail::fmt2(py(st.mean)) + " ";
        if (!s.empty() && s.back() == ' ') s.pop_back();
        s += "\"/>\n";
    }
    for (const auto& st : steps) {
        s += "<circle cx=\"" + detail::fmt2(px(st.x)) + "\" cy=\"" +
             detail::fmt2(py(st.mean)) + "\" r=\"2.5\" fill=\"#4878cf\"/>\n";
    }

    s += "</svg>\n";
    return s;
}

inline void emit_svg(const SweepReport& report, const std::string& path, SweepPlot plot) {
    write_text_file(path, render_svg(report, plot));
}

} // namespace semspec
