#include "tcellsim/plot.hpp"

#include "tcellsim/data_io.hpp"
#include "tcellsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace tcellsim {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string escape(const std::string& text)
{
    std::string out;
    for (char ch : text) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

// Round step of roughly span/5 from {1, 2, 5} x 10^k.
double nice_step(double span)
{
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    return (frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    void pad()
    {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo <= 0.0) {
            const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= d;
            hi += d;
        }
    }
};

std::string marker(MarkerStyle style, double x, double y, const char* color)
{
    switch (style) {
    case MarkerStyle::Circle:
        return fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"none\" stroke=\"{}\"/>", x, y, color);
    case MarkerStyle::Square:
        return fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"{}\"/>",
                           x - 4, y - 4, color);
    case MarkerStyle::Diamond:
        return fmt::format("<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" "
                           "fill=\"none\" stroke=\"{}\"/>",
                           x, y - 5, x + 5, y, x, y + 5, x - 5, y, color);
    case MarkerStyle::Line: break;
    }
    return {};
}

} // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt)
{
    if (series.empty())
        throw InvalidArgument("nothing to plot: empty series list");
    Range xr;
    Range yr;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw InvalidArgument(fmt::format("series '{}' has mismatched or empty x/y", s.label));
        for (double v : s.x)
            xr.include(v);
        for (double v : s.y)
            yr.include(v);
    }
    xr.pad();
    yr.pad();
    if (yr.lo > 0.0 && yr.lo < 0.5 * yr.hi)
        yr.lo = 0.0;

    const double left = 80, right = 190, top = 40, bottom = 60;
    const double pw = opt.width - left - right;
    const double ph = opt.height - top - bottom;
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string svg = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        opt.width, opt.height);
    if (!opt.title.empty())
        svg += fmt::format("<text class=\"title\" x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                           left + pw / 2, escape(opt.title));

    // Axes and ticks.
    svg += fmt::format("<g class=\"axes\" stroke=\"black\" fill=\"none\">"
                       "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\"/>"
                       "<line x1=\"{0:.1f}\" y1=\"{3:.1f}\" x2=\"{0:.1f}\" y2=\"{1:.1f}\"/></g>\n",
                       left, top + ph, left + pw, top);
    const double xs = nice_step(xr.hi - xr.lo);
    for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>"
                           "<text x=\"{0:.1f}\" y=\"{3:.1f}\" text-anchor=\"middle\">{4}</text>\n",
                           px(v), top + ph, top + ph + 5, top + ph + 20, format_number(std::round(v / xs) * xs));
    }
    const double ys = nice_step(yr.hi - yr.lo);
    for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>"
                           "<text x=\"{3:.1f}\" y=\"{4:.1f}\" text-anchor=\"end\">{5}</text>\n",
                           left - 5, py(v), left, left - 8, py(v) + 4, format_number(std::round(v / ys) * ys));
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                       top + ph + 45, escape(opt.x_label));
    svg += fmt::format("<text x=\"20\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.1f})\">{1}</text>\n",
                       top + ph / 2, escape(opt.y_label));

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        svg += fmt::format("<g class=\"series\" data-label=\"{}\">", escape(s.label));
        if (s.style == MarkerStyle::Line) {
            svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", color);
            for (std::size_t k = 0; k < s.x.size(); ++k)
                svg += fmt::format("{}{:.2f},{:.2f}", k ? " " : "", px(s.x[k]), py(s.y[k]));
            svg += "\"/>";
        } else {
            for (std::size_t k = 0; k < s.x.size(); ++k)
                svg += marker(s.style, px(s.x[k]), py(s.y[k]), color);
        }
        svg += "</g>\n";

        // Legend entry.
        const double ly = top + 10 + 20 * static_cast<double>(i);
        const double lx = left + pw + 15;
        if (s.style == MarkerStyle::Line)
            svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"1.5\"/>",
                               lx, ly, lx + 20, ly, color);
        else
            svg += marker(s.style, lx + 10, ly, color);
        svg += fmt::format("<text class=\"legend\" x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", lx + 26, ly + 4,
                           escape(s.label));
    }
    svg += "</svg>\n";
    return svg;
}

void render_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path, const PlotOptions& options)
{
    write_file(path, render_svg(series, options));
}

} // namespace tcellsim
