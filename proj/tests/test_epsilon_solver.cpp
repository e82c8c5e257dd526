#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fhn/epsilon_solver.hpp"
#include "fhn/errors.hpp"
#include "fhn/limit_energy.hpp"
#include "fhn/wave_speeds.hpp"
#include "oracles.hpp"

using namespace fhn;

namespace {

const IntervalUnion kHalfLine({{IntervalUnion::kNegInf, 0.0}});

IntervalUnion pulse_set(const Params& p)
{
    const PulseResult r = pulse_speed(p);
    return IntervalUnion({{r.a, r.b}});
}

}  // namespace

TEST_CASE("transition layer")
{
    using boost::math::quadrature::gauss_kronrod;
    oracle::ProfileGen gen(61);
    for (double eps : {0.04, 0.01, 0.0025})
    {
        const RecoveryProfile layer(eps);
        CHECK(layer.rho() > 0.0);
        CHECK(layer.rho() <= std::sqrt(eps));
        CHECK(layer.U(layer.rho()) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(layer.U(0.0) == 0.0);
        CHECK(layer.U(-1.0) == 0.0);
        CHECK(layer.U(layer.rho() + 1.0) == 1.0);

        double worst = 0.0;
        double prev = -1.0;
        for (int k = 0; k < 20000; ++k)
        {
            const double x = gen.uniform(0.0, layer.rho());
            const double u = layer.U(x);
            const double du = layer.dU(x);
            worst = std::max(worst, std::abs(0.5 * eps * eps * du * du - F0(u) - 0.5 * eps));
            CHECK(layer.U_tilde(layer.rho() - x) == doctest::Approx(u).epsilon(1e-15));
        }
        CHECK(worst < 1e-8);
        for (int k = 0; k <= 1000; ++k)
        {
            const double u = layer.U(layer.rho() * k / 1000.0);
            CHECK(u >= prev);
            prev = u;
        }
        // Inverse map against direct quadrature.
        for (double u : {0.1, 0.5, 0.93})
        {
            const double x = gauss_kronrod<double, 61>::integrate(
                [eps](double s) { return eps / std::sqrt(eps + 2.0 * F0(s)); }, 0.0, u, 10, 1e-14);
            CHECK(layer.U(x) == doctest::Approx(u).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS((void)RecoveryProfile(0.0), DomainError);
}

TEST_CASE("recovery profile of the half line at the front speed")
{
    const Params p = make_params(5.0, 1.0, 1.0, 0.01);
    const Grid g = solver_grid(kHalfLine, p.epsilon);
    const AdmissibleProfile w = build_recovery(kHalfLine, p, g);
    CHECK(weighted_norms(w.w).l2e == doctest::Approx(1.0).epsilon(1e-10));
    for (double v : w.w.values)
    {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const double cf = front_speed(make_params(5.0, 1.0, 1.0)).c_f;
    const EnergyReport e = energy_I(w, cf, p);
    CHECK(std::abs(e.total) <= 0.05);
}

TEST_CASE("recovery construction preconditions")
{
    const Params p = make_params(2.0, 1.0, 1.0, 0.01);
    const Grid g = Grid::with_spacing(-40.0, 10.0, 0.00125);
    CHECK_THROWS_AS((void)build_recovery(IntervalUnion({{0.0, 1.0}}), p, g), DomainError);
    const IntervalUnion close = IntervalUnion({{0.0, 0.5}, {-0.6, -0.55}}).normalized();
    CHECK_THROWS_AS((void)build_recovery(close, p, g), DomainError);
    const SampledFunction off(g, std::vector<double>(g.size(), 0.5));
    CHECK_THROWS_AS((void)make_admissible(off, box_constraint(p)), DomainError);
}

TEST_CASE("energy functional basics")
{
    const Params p = make_params(2.0, 1.0, 1.0, 0.04);
    const Grid g = solver_grid(pulse_set(p), p.epsilon);
    const SampledFunction zero(g, std::vector<double>(g.size(), 0.0));
    const EnergyReport z = energy_I(zero, 1.0, p);
    CHECK(z.total == 0.0);

    const AdmissibleProfile w = build_recovery(pulse_set(p), p, g);
    const EnergyReport e = energy_I(w, 2.0, p);
    CHECK(e.total == doctest::Approx(e.gradient + e.potential_F0_over_eps + e.G_term + e.nonlocal).epsilon(1e-14));
    CHECK(e.nonlocal >= 0.0);
    CHECK(e.gradient > 0.0);

    // I(shift(w, -a)) = e^a I(w) for grid-aligned a.
    for (int steps : {-400, -80, 120})
    {
        const double a = steps * g.h();
        const SampledFunction moved = shift(w.w, -a).f;
        CHECK(energy_I(moved, 2.0, p).total == doctest::Approx(std::exp(a) * e.total).epsilon(1e-6));
    }
}

TEST_CASE("minimizer descends, stays admissible and respects the lower bound")
{
    const Params p = make_params(2.0, 1.0, 1.0, 0.04);
    const IntervalUnion set = pulse_set(p);
    const Grid g = solver_grid(set, p.epsilon);
    const AdmissibleProfile init = build_recovery(set, p, g);
    const double c = pulse_speed(make_params(2.0, 1.0, 1.0)).c_p;
    const double start = energy_I(init, c, p).total;

    double prev = start;
    for (int k : {1, 2, 3, 5, 8, 13, 21, 34})
    {
        MinimizeOptions opt;
        opt.max_iter = k;
        const MinimizeResult r = minimize_I(c, p, init, opt);
        CHECK(r.value <= prev + 1e-12);
        prev = r.value;
    }

    const MinimizeResult r = minimize_I(c, p, init);
    CHECK(r.converged);
    CHECK(r.stationarity < 1e-6);
    CHECK(r.value <= start + 1e-12);
    CHECK(r.value == doctest::Approx(energy_I(r.w_min, c, p).total).epsilon(1e-12));
    CHECK(weighted_norms(r.w_min.w).l2e == doctest::Approx(1.0).epsilon(1e-10));
    const BoxConstraint box = box_constraint(p);
    for (double v : r.w_min.w.values)
    {
        CHECK(v >= box.lower());
        CHECK(v <= box.upper());
    }
    const double m2 = quadratic_lower_bound(p, box);
    CHECK(r.value >= -m2 / p.epsilon);
    CHECK(r.report.nonlocal >= 0.0);
}

TEST_CASE("front minimizer near the limit speed and the liminf sandwich")
{
    const Params p = make_params(5.0, 1.0, 1.0, 0.01);
    const double cf = front_speed(make_params(5.0, 1.0, 1.0)).c_f;
    const Grid g = solver_grid(kHalfLine, p.epsilon);
    const MinimizeResult r = minimize_I(cf, p, build_recovery(kHalfLine, p, g));
    CHECK(std::abs(r.value) < 0.05);

    const IntervalUnion rounded = threshold_set(r.w_min.w);
    REQUIRE_FALSE(rounded.empty());
    CHECK(jstar(rounded, cf, make_params(5.0, 1.0, 1.0)).total <= r.value + 0.1);
}

TEST_CASE("speed search argument checks")
{
    const Params p = make_params(5.0, 1.0, 1.0, 0.04);
    CHECK_THROWS_AS((void)speed_eps(p, 0.1, 0.1), InvalidParameter);
    CHECK_THROWS_AS((void)speed_eps(p, 0.0, 0.1), DomainError);
    // At this eps the minimum stays negative for every positive speed.
    CHECK_THROWS_AS((void)speed_eps(p, 0.0115, 0.229), ConvergenceError);
    CHECK_THROWS_AS((void)speed_eps(make_params(5.0, 1.0, 1.0), 0.05, 0.2), DomainError);
}

TEST_CASE("limit prediction")
{
    const LimitPrediction f = limit_prediction(make_params(5.0, 1.0, 1.0, 0.01));
    CHECK(f.regime == RegimeKind::Front);
    CHECK(std::isinf(f.set.intervals()[0].a));
    const LimitPrediction q = limit_prediction(make_params(2.0, 1.0, 1.0, 0.01));
    CHECK(q.regime == RegimeKind::Pulse);
    CHECK(q.set.measure_e() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)limit_prediction(make_params(0.5, 1.0, 1.0, 0.01)), RegimeError);
}

TEST_CASE("single-row convergence study")
{
    const Params p = make_params(2.0, 1.0, 1.0);
    const std::vector<StudyRow> rows = convergence_study({0.04}, p);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].flag.empty());
    CHECK(rows[0].err_c < 0.1);
    CHECK(rows[0].err_u_l2e < 0.5);
    CHECK(std::abs(rows[0].energy.total) < 5e-4);

    std::ostringstream os;
    write_study_csv(os, rows);
    std::istringstream is(os.str());
    std::string header;
    std::string line;
    std::getline(is, header);
    std::getline(is, line);
    CHECK(header == "eps,c_eps,err_c,err_u_l2e,E_grad,E_F0,E_G,E_nonlocal,total,iters,flag");
    CHECK(std::stod(line.substr(line.find(',') + 1)) == rows[0].c_eps);

    CHECK_THROWS_AS((void)convergence_study({0.04}, make_params(0.5, 1.0, 1.0)), RegimeError);
    CHECK_THROWS_AS((void)convergence_study({}, p), InvalidParameter);
}

TEST_CASE("worker count")
{
    CHECK(worker_count(4, 2) == 2);
    CHECK(worker_count(1, 10) == 1);
    CHECK(worker_count(0, 0) >= 1);
    setenv("FHN_GAMMA_THREADS", "2", 1);
    CHECK(worker_count(8, 10) == 2);
    setenv("FHN_GAMMA_THREADS", "junk", 1);
    CHECK(worker_count(8, 10) == 8);
    unsetenv("FHN_GAMMA_THREADS");
}
