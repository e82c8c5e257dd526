#include "fhn/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s)
    {
        switch (ch)
        {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

struct Axis
{
    double lo;
    double hi;
    bool log;

    [[nodiscard]] bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
    [[nodiscard]] double map(double v) const { return log ? std::log10(v) : v; }
};

Axis make_axis(const std::vector<PlotSeries>& series, bool use_x, const PlotSpec& spec)
{
    const double inf = std::numeric_limits<double>::infinity();
    const Axis xs{0.0, 0.0, spec.log_x};
    const Axis ys{0.0, 0.0, spec.log_y};
    Axis ax{inf, -inf, use_x ? spec.log_x : spec.log_y};
    for (const PlotSeries& s : series)
    {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i)
        {
            if (!xs.usable(s.x[i]) || !ys.usable(s.y[i]))
                continue;
            const double v = use_x ? s.x[i] : s.y[i];
            ax.lo = std::min(ax.lo, ax.map(v));
            ax.hi = std::max(ax.hi, ax.map(v));
        }
    }
    if (!std::isfinite(ax.lo))
    {
        ax.lo = 0.0;
        ax.hi = 1.0;
    }
    if (ax.hi - ax.lo < 1e-300)
    {
        const double pad = std::max(std::abs(ax.lo) * 0.05, 0.5);
        ax.lo -= pad;
        ax.hi += pad;
    }
    return ax;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec)
{
    const double left = 70.0;
    const double right = 20.0;
    const double top = 36.0;
    const double bottom = 50.0;
    const double w = spec.width;
    const double h = spec.height;
    const double pw = w - left - right;
    const double ph = h - top - bottom;

    const Axis ax = make_axis(series, true, spec);
    const Axis ay = make_axis(series, false, spec);
    auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return top + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
       << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(spec.title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Five evenly spaced ticks per axis, in mapped coordinates.
    for (int k = 0; k <= 4; ++k)
    {
        const double fx = ax.lo + (ax.hi - ax.lo) * k / 4.0;
        const double fy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
        const double xv = ax.log ? std::pow(10.0, fx) : fx;
        const double yv = ay.log ? std::pow(10.0, fy) : fy;
        const double X = left + pw * k / 4.0;
        const double Y = top + ph - ph * k / 4.0;
        os << "<line x1=\"" << X << "\" y1=\"" << top + ph << "\" x2=\"" << X << "\" y2=\""
           << top + ph + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << X << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
           << fmt(xv) << "</text>\n";
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << Y << "\" x2=\"" << left << "\" y2=\"" << Y
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">" << fmt(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << top + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si)
    {
        const PlotSeries& s = series[si];
        const char* color = kColors[si % kColors.size()];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        std::ostringstream pts;
        pts.precision(6);
        auto flush = [&]() {
            const std::string str = pts.str();
            if (!str.empty())
                os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
                   << str << "\"/>\n";
            pts.str("");
        };
        for (std::size_t i = 0; i < n; ++i)
        {
            if (!ax.usable(s.x[i]) || !ay.usable(s.y[i]))
            {
                flush();
                continue;
            }
            pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        flush();
        const double ly = top + 14.0 + 16.0 * static_cast<double>(si);
        os << "<line x1=\"" << left + pw - 130 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw - 110
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw - 105 << "\" y=\"" << ly << "\">" << escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_svg(const std::string& path, const std::vector<PlotSeries>& series, const PlotSpec& spec)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << render_svg(series, spec);
    if (!out)
        throw IoError("failed writing " + path);
}

}  // namespace fhn
