#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fhn {

/// Uniform truncation of the real line, x_i = x_lo + i h for i < n.
class Grid
{
  public:
    Grid(double x_lo, double x_hi, std::size_t n);

    /// Nodes at integer multiples of h covering [lo, hi]; every multiple of
    /// h in range (in particular 0) is a node.
    static Grid with_spacing(double lo, double hi, double h);

    /// Default truncation for profiles whose support ends at b_max: the left
    /// end sits where e^x has dropped below 1e-14 relative to e^{b_max}.
    static Grid truncated_for(double b_max, double h, double right_margin = 10.0);

    [[nodiscard]] double x_lo() const noexcept { return x_lo_; }
    [[nodiscard]] double x_hi() const noexcept { return x_hi_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double x(std::size_t i) const noexcept { return x_lo_ + static_cast<double>(i) * h_; }

    /// Trapezoid weights of int e^x (.) dx at the nodes.
    [[nodiscard]] std::vector<double> exp_weights() const;
    /// Exact cell integrals int_{x_i}^{x_{i+1}} e^x dx, size n - 1.
    [[nodiscard]] std::vector<double> exp_cell_weights() const;

    [[nodiscard]] bool same_as(const Grid& other) const noexcept;

  private:
    double x_lo_;
    double x_hi_;
    std::size_t n_;
    double h_;
};

struct SampledFunction
{
    Grid grid;
    std::vector<double> values;

    SampledFunction(Grid g, std::vector<double> v);

    template<class F>
    static SampledFunction from(const Grid& g, F&& f)
    {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = f(g.x(i));
        return {g, std::move(v)};
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values[i]; }
};

struct WeightedNorms
{
    double l1e = 0.0;  // int e^x |f|
    double l2e = 0.0;  // (int e^x f^2)^{1/2}
};

[[nodiscard]] WeightedNorms weighted_norms(const SampledFunction& f);

/// Trapezoid approximation of int e^x f g dx.
[[nodiscard]] double weighted_inner(const SampledFunction& f, const SampledFunction& g);

/// Discrete weighted total variation sum_i e^{x_{i+1/2}} |f_{i+1} - f_i|.
[[nodiscard]] double total_variation_e_sampled(const SampledFunction& f);

struct ShiftResult
{
    SampledFunction f;
    // Set when the shift was not a multiple of h and values were linearly
    // interpolated.
    bool interpolated = false;
};

/// Samples of u(. + s), padded with the edge value beyond the grid.
/// Throws DomainError when the shift moves the whole support off the grid.
[[nodiscard]] ShiftResult shift(const SampledFunction& f, double s);

struct Interval
{
    double a;
    double b;
};

/// Finite union of disjoint closed intervals, ordered b_1 > a_1 > b_2 > ...
/// Only the last interval may have a = -infinity.
class IntervalUnion
{
  public:
    static constexpr std::size_t kDefaultMaxIntervals = 16;
    static constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    IntervalUnion() = default;
    explicit IntervalUnion(std::vector<Interval> intervals,
                           std::size_t max_intervals = kDefaultMaxIntervals);

    [[nodiscard]] std::span<const Interval> intervals() const noexcept { return intervals_; }
    [[nodiscard]] std::size_t size() const noexcept { return intervals_.size(); }
    [[nodiscard]] bool empty() const noexcept { return intervals_.empty(); }

    /// ||chi_E||_{L^1_e} = sum_i (e^{b_i} - e^{a_i}).
    [[nodiscard]] double measure_e() const;
    [[nodiscard]] bool contains(double x) const noexcept;
    [[nodiscard]] double max_right() const;
    [[nodiscard]] IntervalUnion translated(double s) const;
    /// Translate so that measure_e() == 1.
    [[nodiscard]] IntervalUnion normalized() const;

    /// Jump points in decreasing order (b_1, a_1, b_2, ...), finite only.
    [[nodiscard]] std::vector<double> jumps() const;

  private:
    std::vector<Interval> intervals_;
};

/// ||D chi_E||_e = sum_i (e^{a_i} + e^{b_i}), with e^{-inf} = 0.
[[nodiscard]] double total_variation_e(const IntervalUnion& e);

/// Node value = fraction of the dual cell [x_i - h/2, x_i + h/2] covered by
/// E, so a jump that lands on a node gets the value 1/2.
[[nodiscard]] SampledFunction sample_indicator(const IntervalUnion& e, const Grid& g);

/// Threshold a profile at `level` into a union of intervals; jump locations
/// are found by linear interpolation between nodes.
[[nodiscard]] IntervalUnion threshold_set(const SampledFunction& f, double level = 0.5,
                                          std::size_t max_intervals = 64);

// Two-column CSV "x,value".
void write_csv(std::ostream& os, const SampledFunction& f);
[[nodiscard]] SampledFunction read_csv(std::istream& is);

// JSON list of [a, b] pairs; an infinite left end is written as "-inf".
[[nodiscard]] std::string to_json(const IntervalUnion& e);
[[nodiscard]] IntervalUnion interval_union_from_json(const std::string& text);

}  // namespace fhn
