#pragma once

// Static SVG rendering of grid-search scatters and law curves: log-log axes,
// one polyline per curve variant, run records as dots colored by final loss,
// ring markers on the per-batch-size optimal learning rate, and a vertical
// marker at B_noise.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "surge/harness.hpp"
#include "surge/io.hpp"
#include "surge/laws.hpp"

namespace surge {

struct PlotOptions {
    int width = 960;
    int height = 600;
    std::string title = "optimal learning rate vs batch size";
    std::optional<double> b_noise_marker;
};

namespace detail {

struct AxisRange {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (!(v > 0.0) || !std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo < hi || (lo == hi && std::isfinite(lo)); }
    void pad() {
        if (!valid()) return;
        if (lo == hi) {
            lo *= 0.5;
            hi *= 2.0;
        }
        lo /= 1.15;
        hi *= 1.15;
    }
};

inline std::string color_for_variant(const std::string& label) {
    static const std::map<std::string, std::string> palette = {
        {"exact", "#1f77b4"},        {"surge", "#d62728"},
        {"sgd_alpha_0.5", "#2ca02c"}, {"sgd_alpha_1", "#9467bd"},
        {"linear", "#8c564b"},       {"sqrt", "#e377c2"},
        {"large_batch", "#ff7f0e"},  {"loss_improvement", "#17becf"}};
    const auto it = palette.find(label);
    return it != palette.end() ? it->second : "#7f7f7f";
}

/// blue -> yellow ramp over t in [0, 1]
inline std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(40 + 215 * t);
    const int g = static_cast<int>(60 + 160 * t);
    const int b = static_cast<int>(180 - 140 * t);
    std::ostringstream s;
    s << "rgb(" << r << ',' << g << ',' << b << ')';
    return s.str();
}

}  // namespace detail

/// Renders curves and/or run records into a self-contained SVG document.
inline std::string render_svg_plot(std::span<const LawCurve> curves,
                                   std::span<const RunRecord> runs, const PlotOptions& opt = {}) {
    const double ml = 70, mr = 160, mt = 40, mb = 50;
    const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;

    detail::AxisRange xr, yr;
    for (const LawCurve& c : curves)
        for (const auto& [b, v] : c.points) {
            xr.include(b);
            yr.include(v);
        }
    double loss_lo = std::numeric_limits<double>::infinity(), loss_hi = 0.0;
    for (const RunRecord& r : runs) {
        xr.include(static_cast<double>(r.batch_size));
        yr.include(r.lr);
        if (r.converged && std::isfinite(r.final_loss) && r.final_loss > 0.0) {
            loss_lo = std::min(loss_lo, r.final_loss);
            loss_hi = std::max(loss_hi, r.final_loss);
        }
    }
    if (opt.b_noise_marker) xr.include(*opt.b_noise_marker);
    if (!xr.valid() || !yr.valid())
        throw std::invalid_argument("render_svg_plot: no positive finite data to plot");
    xr.pad();
    yr.pad();

    const auto x_of = [&](double b) {
        return ml + pw * (std::log10(b) - std::log10(xr.lo)) / (std::log10(xr.hi) - std::log10(xr.lo));
    };
    const auto y_of = [&](double v) {
        return mt + ph * (1.0 - (std::log10(v) - std::log10(yr.lo)) /
                                    (std::log10(yr.hi) - std::log10(yr.lo)));
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << opt.title << "</text>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // decade ticks
    for (int e = static_cast<int>(std::floor(std::log10(xr.lo)));
         e <= static_cast<int>(std::ceil(std::log10(xr.hi))); ++e) {
        const double b = std::pow(10.0, e);
        if (b < xr.lo || b > xr.hi) continue;
        const double x = x_of(b);
        s << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << mt + ph
          << "\" stroke=\"#ddd\"/>\n"
          << "<text x=\"" << x << "\" y=\"" << mt + ph + 18
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e" << e
          << "</text>\n";
    }
    for (int e = static_cast<int>(std::floor(std::log10(yr.lo)));
         e <= static_cast<int>(std::ceil(std::log10(yr.hi))); ++e) {
        const double v = std::pow(10.0, e);
        if (v < yr.lo || v > yr.hi) continue;
        const double y = y_of(v);
        s << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + pw << "\" y2=\"" << y
          << "\" stroke=\"#ddd\"/>\n"
          << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" << e
          << "</text>\n";
    }
    s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opt.height - 10
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">batch size</text>\n";

    // scatter: converged runs colored by final loss, diverged as gray crosses
    const bool have_loss_range = loss_hi > loss_lo;
    for (const RunRecord& r : runs) {
        const double x = x_of(static_cast<double>(r.batch_size));
        const double y = y_of(r.lr);
        if (!r.converged) {
            s << "<text x=\"" << x << "\" y=\"" << y + 3
              << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"#999\">x</text>\n";
            continue;
        }
        const double t = have_loss_range
                             ? (std::log(r.final_loss) - std::log(loss_lo)) /
                                   (std::log(loss_hi) - std::log(loss_lo))
                             : 0.5;
        s << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\""
          << detail::heat_color(1.0 - t) << "\" fill-opacity=\"0.8\"/>\n";
    }

    // highlight the per-B empirical optimal lr
    if (!runs.empty()) {
        std::vector<std::int64_t> batches;
        for (const RunRecord& r : runs)
            if (std::find(batches.begin(), batches.end(), r.batch_size) == batches.end())
                batches.push_back(r.batch_size);
        for (std::int64_t b : batches) {
            try {
                const auto [lr, mean_final] = empirical_optimal_lr(runs, b);
                (void)mean_final;
                s << "<circle cx=\"" << x_of(static_cast<double>(b)) << "\" cy=\"" << y_of(lr)
                  << "\" r=\"6\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
            } catch (const not_found_error&) {
                // batch size with no converged runs: nothing to highlight
            }
        }
    }

    // law curves
    double legend_y = mt + 14;
    for (const LawCurve& c : curves) {
        const std::string label = curve_label(c);
        const std::string color = detail::color_for_variant(label);
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [b, v] : c.points)
            if (v > 0.0 && std::isfinite(v)) s << x_of(b) << ',' << y_of(v) << ' ';
        s << "\"/>\n";
        s << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << legend_y - 4 << "\" x2=\""
          << ml + pw + 34 << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << ml + pw + 40 << "\" y=\"" << legend_y
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
        legend_y += 16;
    }

    if (opt.b_noise_marker && *opt.b_noise_marker > 0.0) {
        const double x = x_of(*opt.b_noise_marker);
        s << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << mt + ph
          << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n"
          << "<text x=\"" << x + 4 << "\" y=\"" << mt + 14
          << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">B_noise</text>\n";
    }

    s << "</svg>\n";
    return s.str();
}

}  // namespace surge
