#include <doctest.h>

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fhn/errors.hpp"
#include "fhn/weighted_space.hpp"
#include "oracles.hpp"

using namespace fhn;

namespace {

SampledFunction indicator(const Grid& g, double a, double b)
{
    return sample_indicator(IntervalUnion({{a, b}}), g);
}

// Discrete int e^x f'^2 with exact cell weights.
double weighted_dirichlet(const SampledFunction& f)
{
    const std::vector<double> kappa = f.grid.exp_cell_weights();
    const double h = f.grid.h();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
    {
        const double d = (f[i + 1] - f[i]) / h;
        s += kappa[i] * d * d;
    }
    return s;
}

}  // namespace

TEST_CASE("grid construction")
{
    const Grid g(-2.0, 3.0, 501);
    CHECK(g.h() == doctest::Approx(0.01));
    CHECK(g.x(500) == doctest::Approx(3.0));
    CHECK_THROWS((void)Grid(1.0, 0.0, 10));
    CHECK_THROWS((void)Grid(0.0, 1.0, 1));

    const Grid s = Grid::with_spacing(-1.03, 2.0, 0.01);
    bool has_zero = false;
    for (std::size_t i = 0; i < s.size(); ++i)
        has_zero = has_zero || s.x(i) == 0.0 || std::abs(s.x(i)) < 1e-14;
    CHECK(has_zero);
    CHECK(s.x_lo() <= -1.03);
    CHECK(s.x_hi() >= 2.0);

    const Grid t = Grid::truncated_for(0.5, 0.01);
    CHECK(std::exp(t.x_lo() - 0.5) <= 1e-14);
    CHECK(t.x_hi() >= 10.5 - 1e-12);

    // Weights integrate e^x exactly on cells and by trapezoid at nodes.
    double cells = 0.0;
    for (double k : g.exp_cell_weights())
        cells += k;
    CHECK(cells == doctest::Approx(std::exp(3.0) - std::exp(-2.0)).epsilon(1e-13));
    double nodes = 0.0;
    for (double w : g.exp_weights())
        nodes += w;
    CHECK(nodes == doctest::Approx(std::exp(3.0) - std::exp(-2.0)).epsilon(1e-4));
}

TEST_CASE("weighted norms of indicators")
{
    for (double h : {0.01, 0.005})
    {
        const Grid g = Grid::with_spacing(-40.0, 5.0, h);
        const WeightedNorms half_line = weighted_norms(indicator(g, IntervalUnion::kNegInf, 0.0));
        CHECK(half_line.l1e == doctest::Approx(1.0).epsilon(h * h));
        // The half-valued jump node costs O(h) in the squared norm.
        CHECK(half_line.l2e == doctest::Approx(1.0).epsilon(h / 4.0));
    }
    // log 2 is not a node: the dual-cell sampling still gives O(h^2).
    const Grid g = Grid::with_spacing(-40.0, 5.0, 0.001);
    CHECK(weighted_norms(indicator(g, 0.0, std::log(2.0))).l1e == doctest::Approx(1.0).epsilon(1e-5));

    const SampledFunction zero(g, std::vector<double>(g.size(), 0.0));
    CHECK(weighted_norms(zero).l1e == 0.0);
    CHECK(weighted_norms(zero).l2e == 0.0);
}

TEST_CASE("weighted total variation of interval unions")
{
    const double e = std::exp(1.0);
    CHECK(total_variation_e(IntervalUnion({{0.0, 1.0}})) == 1.0 + e);
    CHECK(total_variation_e(IntervalUnion({{IntervalUnion::kNegInf, 0.0}})) == 1.0);
    CHECK(total_variation_e(IntervalUnion({{0.0, 1.0}, {-3.0, -2.0}}))
          == doctest::Approx(1.0 + e + std::exp(-3.0) + std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("sampled total variation")
{
    using boost::math::quadrature::gauss_kronrod;
    const Grid g = Grid::with_spacing(-10.0, 3.0, 1e-3);
    auto ramp = [](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : x * x * (3.0 - 2.0 * x); };
    const double ref = gauss_kronrod<double, 61>::integrate(
        [](double x) { return std::exp(x) * 6.0 * x * (1.0 - x); }, 0.0, 1.0);
    CHECK(total_variation_e_sampled(SampledFunction::from(g, ramp)) == doctest::Approx(ref).epsilon(1e-6));
    CHECK(total_variation_e_sampled(SampledFunction::from(g, [](double) { return 0.7; })) == 0.0);

    // Sharp indicator: first-order convergence to 1 + e.
    const double exact = 1.0 + std::exp(1.0);
    double prev = INFINITY;
    for (double h : {0.04, 0.02, 0.01, 0.005})
    {
        const Grid gh = Grid::with_spacing(-10.0, 3.0, h);
        const double err = std::abs(total_variation_e_sampled(indicator(gh, 0.0, 1.0)) - exact);
        CHECK(err < 2.0 * h);
        CHECK(err <= prev);
        prev = err;
    }
}

TEST_CASE("shift laws")
{
    oracle::ProfileGen gen(21);
    const Grid g = Grid::with_spacing(-40.0, 8.0, 0.01);
    for (int k = 0; k < 20; ++k)
    {
        const SampledFunction f = SampledFunction::from(g, gen.bumps(-3.0, 2.0));
        const int steps = static_cast<int>(gen.uniform(-150.0, 150.0));
        const double s = steps * g.h();
        const ShiftResult r = shift(f, s);
        CHECK_FALSE(r.interpolated);
        const WeightedNorms a = weighted_norms(f);
        const WeightedNorms b = weighted_norms(r.f);
        CHECK(b.l1e == doctest::Approx(std::exp(-s) * a.l1e).epsilon(1e-12));
        CHECK(total_variation_e_sampled(r.f)
              == doctest::Approx(std::exp(-s) * total_variation_e_sampled(f)).epsilon(1e-12));
    }
    const SampledFunction f = SampledFunction::from(g, gen.bumps(-1.0, 1.0));
    const ShiftResult same = shift(f, 0.0);
    CHECK(same.f.values == f.values);

    const ShiftResult frac = shift(f, 0.0137);
    CHECK(frac.interpolated);
    CHECK(weighted_norms(frac.f).l1e == doctest::Approx(std::exp(-0.0137) * weighted_norms(f).l1e).epsilon(1e-4));

    CHECK_THROWS_AS((void)shift(f, 60.0), DomainError);
    CHECK_THROWS_AS((void)shift(f, -60.0), DomainError);
}

TEST_CASE("norm bounds by weighted total variation")
{
    oracle::ProfileGen gen(22);
    const Grid g = Grid::with_spacing(-40.0, 6.0, 0.005);
    for (int k = 0; k < 100; ++k)
    {
        const SampledFunction f = SampledFunction::from(g, gen.bumps(gen.uniform(-8.0, -2.0), gen.uniform(-1.0, 3.0)));
        const double tv = total_variation_e_sampled(f);
        CHECK(weighted_norms(f).l1e <= tv);
        double sup = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            sup = std::max(sup, std::abs(f[i]) * std::exp(g.x(i)));
        CHECK(sup <= 2.0 * tv * (1.0 + g.h()));
    }
}

TEST_CASE("weighted Poincare inequality")
{
    oracle::ProfileGen gen(23);
    const Grid g = Grid::with_spacing(-30.0, 6.0, 0.005);
    for (int k = 0; k < 100; ++k)
    {
        const SampledFunction f = SampledFunction::from(g, gen.bumps(gen.uniform(-10.0, -1.0), gen.uniform(0.0, 4.0)));
        const double l2 = weighted_norms(f).l2e;
        CHECK(weighted_dirichlet(f) >= 0.25 * l2 * l2);
    }
}

TEST_CASE("interval unions")
{
    CHECK_THROWS_AS((void)IntervalUnion({{1.0, 0.0}}), InvalidParameter);
    CHECK_THROWS_AS((void)IntervalUnion({{-1.0, 0.0}, {-0.5, 2.0}}), InvalidParameter);
    CHECK_THROWS_AS((void)IntervalUnion({{IntervalUnion::kNegInf, -3.0}, {-1.0, 0.0}}), InvalidParameter);
    CHECK_THROWS_AS((void)IntervalUnion({{0.0, 1.0}, {-2.0, -1.0}}, 1), InvalidParameter);

    const IntervalUnion u({{0.0, 1.0}, {-3.0, -2.0}});
    CHECK(u.contains(0.5));
    CHECK_FALSE(u.contains(-1.0));
    CHECK(u.max_right() == 1.0);
    CHECK(u.jumps() == std::vector<double>{1.0, 0.0, -2.0, -3.0});
    CHECK(u.translated(2.0).measure_e() == doctest::Approx(std::exp(2.0) * u.measure_e()));
    CHECK(u.normalized().measure_e() == doctest::Approx(1.0).epsilon(1e-14));

    const IntervalUnion back = interval_union_from_json(to_json(IntervalUnion({{-1.0, 2.0}, {IntervalUnion::kNegInf, -4.0}})));
    REQUIRE(back.size() == 2);
    CHECK(back.intervals()[0].b == 2.0);
    CHECK(std::isinf(back.intervals()[1].a));
    CHECK_THROWS((void)interval_union_from_json("not json"));
}

TEST_CASE("threshold set recovers jump locations")
{
    const Grid g = Grid::with_spacing(-20.0, 5.0, 0.01);
    const SampledFunction f = SampledFunction::from(g, [](double x) {
        return 0.5 * (std::tanh((x + 2.0) / 0.1) - std::tanh((x - 0.3) / 0.1));
    });
    const IntervalUnion e = threshold_set(f);
    REQUIRE(e.size() == 1);
    CHECK(e.intervals()[0].a == doctest::Approx(-2.0).epsilon(1e-4));
    CHECK(e.intervals()[0].b == doctest::Approx(0.3).epsilon(1e-4));

    const SampledFunction step = SampledFunction::from(g, [](double x) { return x < 1.0 ? 1.0 : 0.0; });
    const IntervalUnion half = threshold_set(step);
    REQUIRE(half.size() == 1);
    CHECK(std::isinf(half.intervals()[0].a));
}

TEST_CASE("CSV round trip is exact")
{
    oracle::ProfileGen gen(24);
    const Grid g(-3.0, 2.0, 257);
    const SampledFunction f = SampledFunction::from(g, gen.bumps(-2.0, 1.0));
    std::stringstream ss;
    write_csv(ss, f);
    const SampledFunction back = read_csv(ss);
    CHECK(back.grid.same_as(g));
    CHECK(back.values == f.values);

    std::stringstream bad("x,value\n0,1\n0.5,abc\n");
    CHECK_THROWS((void)read_csv(bad));
}
