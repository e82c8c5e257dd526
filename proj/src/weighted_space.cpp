#include "fhn/weighted_space.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fhn/errors.hpp"

namespace fhn {

//---------------------------------------------------------------------------//
// Grid
//---------------------------------------------------------------------------//

Grid::Grid(double x_lo, double x_hi, std::size_t n) : x_lo_{x_lo}, x_hi_{x_hi}, n_{n}, h_{0.0}
{
    if (!std::isfinite(x_lo) || !std::isfinite(x_hi) || !(x_lo < x_hi))
        throw InvalidParameter("grid needs finite x_lo < x_hi");
    if (n < 3)
        throw InvalidParameter("grid needs at least 3 points");
    h_ = (x_hi - x_lo) / static_cast<double>(n - 1);
}

Grid Grid::with_spacing(double lo, double hi, double h)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidParameter("grid spacing must be positive");
    if (!(lo < hi))
        throw InvalidParameter("grid needs lo < hi");
    const auto i_lo = static_cast<long long>(std::floor(lo / h + 1e-9));
    const auto i_hi = static_cast<long long>(std::ceil(hi / h - 1e-9));
    const auto n = static_cast<std::size_t>(std::max<long long>(i_hi - i_lo + 1, 3));
    const double x_lo = static_cast<double>(i_lo) * h;
    return Grid(x_lo, x_lo + static_cast<double>(n - 1) * h, n);
}

Grid Grid::truncated_for(double b_max, double h, double right_margin)
{
    // e^{x_lo} <= 1e-14 e^{b_max}
    const double lo = b_max + std::log(1e-14);
    return with_spacing(lo, b_max + right_margin, h);
}

std::vector<double> Grid::exp_weights() const
{
    std::vector<double> w(n_);
    for (std::size_t i = 0; i < n_; ++i)
        w[i] = std::exp(x(i)) * h_;
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

std::vector<double> Grid::exp_cell_weights() const
{
    std::vector<double> w(n_ - 1);
    const double factor = -std::expm1(-h_);
    for (std::size_t i = 0; i + 1 < n_; ++i)
        w[i] = std::exp(x(i + 1)) * factor;
    return w;
}

bool Grid::same_as(const Grid& other) const noexcept
{
    return n_ == other.n_ && std::abs(x_lo_ - other.x_lo_) <= 1e-12 * std::max(1.0, std::abs(x_lo_))
           && std::abs(x_hi_ - other.x_hi_) <= 1e-12 * std::max(1.0, std::abs(x_hi_));
}

//---------------------------------------------------------------------------//
// SampledFunction and norms
//---------------------------------------------------------------------------//

SampledFunction::SampledFunction(Grid g, std::vector<double> v) : grid{g}, values{std::move(v)}
{
    if (values.size() != grid.size())
        throw InvalidParameter("sample count does not match grid size");
    for (double x : values)
        if (!std::isfinite(x))
            throw InvalidParameter("sampled function has non-finite values");
}

WeightedNorms weighted_norms(const SampledFunction& f)
{
    const auto w = f.grid.exp_weights();
    WeightedNorms out;
    double l2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
    {
        out.l1e += w[i] * std::abs(f[i]);
        l2 += w[i] * f[i] * f[i];
    }
    out.l2e = std::sqrt(l2);
    return out;
}

double weighted_inner(const SampledFunction& f, const SampledFunction& g)
{
    if (!f.grid.same_as(g.grid))
        throw InvalidParameter("weighted_inner: grids differ");
    const auto w = f.grid.exp_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += w[i] * f[i] * g[i];
    return s;
}

double total_variation_e_sampled(const SampledFunction& f)
{
    const Grid& g = f.grid;
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        tv += std::exp(g.x(i) + 0.5 * g.h()) * std::abs(f[i + 1] - f[i]);
    return tv;
}

ShiftResult shift(const SampledFunction& f, double s)
{
    const Grid& g = f.grid;
    const std::size_t n = f.size();

    // Support check: nonzero samples must still overlap the grid.
    auto first = std::find_if(f.values.begin(), f.values.end(), [](double v) { return v != 0.0; });
    if (first != f.values.end())
    {
        auto last = std::find_if(f.values.rbegin(), f.values.rend(), [](double v) { return v != 0.0; });
        const double lo = g.x(static_cast<std::size_t>(first - f.values.begin())) - s;
        const double hi = g.x(n - 1 - static_cast<std::size_t>(last - f.values.rbegin())) - s;
        if (hi < g.x_lo() || lo > g.x_hi())
            throw DomainError("shift moves the whole support outside the grid");
    }

    const double steps = s / g.h();
    const double k = std::round(steps);
    std::vector<double> out(n);
    if (std::abs(steps - k) <= 1e-9 * std::max(1.0, std::abs(steps)))
    {
        const auto ki = static_cast<long long>(k);
        for (std::size_t i = 0; i < n; ++i)
        {
            const long long j = std::clamp<long long>(static_cast<long long>(i) + ki, 0,
                                                      static_cast<long long>(n) - 1);
            out[i] = f[static_cast<std::size_t>(j)];
        }
        return {SampledFunction(g, std::move(out)), false};
    }

    for (std::size_t i = 0; i < n; ++i)
    {
        const double pos = static_cast<double>(i) + steps;
        if (pos <= 0.0)
            out[i] = f[0];
        else if (pos >= static_cast<double>(n - 1))
            out[i] = f[n - 1];
        else
        {
            const auto j = static_cast<std::size_t>(std::floor(pos));
            const double t = pos - static_cast<double>(j);
            out[i] = (1.0 - t) * f[j] + t * f[j + 1];
        }
    }
    return {SampledFunction(g, std::move(out)), true};
}

//---------------------------------------------------------------------------//
// IntervalUnion
//---------------------------------------------------------------------------//

IntervalUnion::IntervalUnion(std::vector<Interval> intervals, std::size_t max_intervals)
    : intervals_{std::move(intervals)}
{
    if (intervals_.size() > max_intervals)
        throw InvalidParameter("interval union exceeds the configured maximum count");
    for (std::size_t i = 0; i < intervals_.size(); ++i)
    {
        const auto& iv = intervals_[i];
        if (!std::isfinite(iv.b) || std::isnan(iv.a) || !(iv.a < iv.b))
            throw InvalidParameter("each interval needs a < b with finite b");
        if (std::isinf(iv.a) && (iv.a > 0.0 || i + 1 != intervals_.size()))
            throw InvalidParameter("only the last interval may start at -inf");
        if (i > 0 && !(iv.b < intervals_[i - 1].a))
            throw InvalidParameter("intervals must be disjoint and sorted by decreasing right end");
    }
}

double IntervalUnion::measure_e() const
{
    double m = 0.0;
    for (const auto& iv : intervals_)
        m += std::exp(iv.b) - std::exp(iv.a);
    return m;
}

bool IntervalUnion::contains(double x) const noexcept
{
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [x](const Interval& iv) { return iv.a <= x && x <= iv.b; });
}

double IntervalUnion::max_right() const
{
    if (intervals_.empty())
        throw DomainError("empty interval union has no right end");
    return intervals_.front().b;
}

IntervalUnion IntervalUnion::translated(double s) const
{
    std::vector<Interval> out = intervals_;
    for (auto& iv : out)
    {
        iv.a += s;
        iv.b += s;
    }
    const std::size_t cap = std::max(out.size(), kDefaultMaxIntervals);
    return IntervalUnion(std::move(out), cap);
}

IntervalUnion IntervalUnion::normalized() const
{
    const double m = measure_e();
    if (!(m > 0.0) || !std::isfinite(m))
        throw DomainError("cannot normalize a set with zero or infinite weighted measure");
    return translated(-std::log(m));
}

std::vector<double> IntervalUnion::jumps() const
{
    std::vector<double> out;
    for (const auto& iv : intervals_)
    {
        out.push_back(iv.b);
        if (std::isfinite(iv.a))
            out.push_back(iv.a);
    }
    return out;
}

double total_variation_e(const IntervalUnion& e)
{
    double tv = 0.0;
    for (const auto& iv : e.intervals())
        tv += std::exp(iv.a) + std::exp(iv.b);
    return tv;
}

SampledFunction sample_indicator(const IntervalUnion& e, const Grid& g)
{
    std::vector<double> v(g.size(), 0.0);
    const double half = 0.5 * g.h();
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        const double lo = g.x(i) - half;
        const double hi = g.x(i) + half;
        double covered = 0.0;
        for (const auto& iv : e.intervals())
            covered += std::max(0.0, std::min(hi, iv.b) - std::max(lo, iv.a));
        v[i] = std::min(1.0, covered / g.h());
    }
    return {g, std::move(v)};
}

IntervalUnion threshold_set(const SampledFunction& f, double level, std::size_t max_intervals)
{
    const Grid& g = f.grid;
    const std::size_t n = f.size();
    auto crossing = [&](std::size_t i) {
        const double d = f[i + 1] - f[i];
        return g.x(i) + g.h() * (level - f[i]) / d;
    };
    std::vector<Interval> out;
    bool inside = f[n - 1] > level;
    double right = g.x_hi();
    for (std::size_t k = n - 1; k-- > 0;)
    {
        const bool here = f[k] > level;
        if (here == inside)
            continue;
        const double x = crossing(k);
        if (inside)
            out.push_back({x, right});
        else
            right = x;
        inside = here;
    }
    if (inside)
        out.push_back({IntervalUnion::kNegInf, right});
    return IntervalUnion(std::move(out), max_intervals);
}

//---------------------------------------------------------------------------//
// Serialization
//---------------------------------------------------------------------------//

void write_csv(std::ostream& os, const SampledFunction& f)
{
    os << "x,value\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < f.size(); ++i)
        os << f.grid.x(i) << ',' << f[i] << '\n';
}

SampledFunction read_csv(std::istream& is)
{
    std::string line;
    std::vector<double> xs;
    std::vector<double> vs;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw IoError("csv line " + std::to_string(lineno) + ": expected two columns");
        try
        {
            const double x = std::stod(line.substr(0, comma));
            const double v = std::stod(line.substr(comma + 1));
            xs.push_back(x);
            vs.push_back(v);
        }
        catch (const std::invalid_argument&)
        {
            if (xs.empty())
                continue;  // header
            throw IoError("csv line " + std::to_string(lineno) + ": not numeric");
        }
    }
    if (xs.size() < 3)
        throw IoError("csv needs at least 3 rows");
    Grid g(xs.front(), xs.back(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - g.x(i)) > 1e-9 * std::max(1.0, std::abs(xs[i])))
            throw IoError("csv x column is not uniformly spaced");
    return {g, std::move(vs)};
}

std::string to_json(const IntervalUnion& e)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& iv : e.intervals())
    {
        nlohmann::json a = std::isinf(iv.a) ? nlohmann::json("-inf") : nlohmann::json(iv.a);
        arr.push_back({a, iv.b});
    }
    return arr.dump();
}

IntervalUnion interval_union_from_json(const std::string& text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& ex)
    {
        throw IoError(std::string("interval json: ") + ex.what());
    }
    if (!j.is_array())
        throw IoError("interval json must be a list of [a, b] pairs");
    std::vector<Interval> out;
    for (const auto& pair : j)
    {
        if (!pair.is_array() || pair.size() != 2 || !pair[1].is_number())
            throw IoError("interval json must be a list of [a, b] pairs");
        double a = 0.0;
        if (pair[0].is_string())
        {
            if (pair[0].get<std::string>() != "-inf")
                throw IoError("only the token \"-inf\" is accepted as a string endpoint");
            a = IntervalUnion::kNegInf;
        }
        else if (pair[0].is_number())
            a = pair[0].get<double>();
        else
            throw IoError("interval endpoint must be a number or \"-inf\"");
        out.push_back({a, pair[1].get<double>()});
    }
    const std::size_t cap = std::max(out.size(), IntervalUnion::kDefaultMaxIntervals);
    return IntervalUnion(std::move(out), cap);
}

}  // namespace fhn
