// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fhn/epsilon_solver.hpp"
#include "fhn/limit_energy.hpp"
#include "fhn/model.hpp"
#include "fhn/nonlocal_operator.hpp"
#include "fhn/wave_speeds.hpp"
#include "fhn/weighted_space.hpp"
#include "oracles.hpp"

using namespace fhn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Median wall time of `reps` calls, in seconds.
double median_time(int reps, const std::function<void()>& f)
{
    std::vector<double> t;
    for (int i = 0; i < reps; ++i)
    {
        const auto t0 = Clock::now();
        f();
        t.push_back(seconds_since(t0));
    }
    std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
    return t[reps / 2];
}

class Report
{
  public:
    void detail(const char* fmt, ...) __attribute__((format(printf, 2, 3)))
    {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        lines_.push_back(std::string("    ") + buf);
    }

    void check(bool ok, const char* what)
    {
        if (!ok)
        {
            ok_ = false;
            lines_.push_back(std::string("    failed: ") + what);
        }
    }

    bool finish(int id, const char* title)
    {
        std::printf("%s criterion %d: %s\n", ok_ ? "PASS" : "FAIL", id, title);
        for (const std::string& l : lines_)
            std::printf("%s\n", l.c_str());
        std::fflush(stdout);
        return ok_;
    }

  private:
    bool ok_ = true;
    std::vector<std::string> lines_;
};

// 1 ------------------------------------------------------------------------
bool front_speed_closed_form()
{
    Report r;
    const Params p = make_params(5.0, 1.0, 1.0);
    const FrontResult f = front_speed(p);
    const double F = F_of_c(f.c_f, p).value;
    const oracle::Plain pl{5.0, 1.0, 1.0};
    const double root = oracle::bisect([&](double c) { return pl.F(c); }, 1e-6, 10.0);
    const double t = median_time(1001, [&] { (void)front_speed(p); });
    r.detail("c_f = %.15g, |F(c_f)| = %.3g, bisection root = %.15g (diff %.3g)", f.c_f, std::abs(F), root,
             std::abs(f.c_f - root));
    r.detail("reference 0.114569, median runtime %.3g ms", t * 1e3);
    r.check(std::abs(F) < 1e-12, "|F(c_f)| < 1e-12");
    r.check(std::abs(f.c_f - root) < 1e-10, "agreement with bisection to 1e-10");
    r.check(std::abs(f.c_f - 0.114569) < 5e-7, "matches the reference value 0.114569");
    r.check(t < 1e-3, "runtime < 1 ms");
    return r.finish(1, "front speed closed form");
}

// 2 ------------------------------------------------------------------------
bool pulse_oracle_equivalence()
{
    Report r;
    const Params p = make_params(2.0, 1.0, 1.0);
    const PulseResult pr = pulse_speed(p);
    const oracle::Plain pl{2.0, 1.0, 1.0};
    int converged = 0;
    double worst_c = 0.0;
    double worst_l = 0.0;
    for (double c0 : {0.5, 1.0, 2.0, 3.0, 4.0})
        for (double l0 : {1.5, 2.5, 4.0, 6.0})
        {
            const oracle::NewtonResult n = oracle::newton_pulse(pl, c0, l0);
            if (!n.converged)
                continue;
            ++converged;
            worst_c = std::max(worst_c, std::abs(n.c - pr.c_p));
            worst_l = std::max(worst_l, std::abs(n.ell - pr.ell_p));
        }
    const double t = median_time(21, [&] { (void)pulse_speed(p); });
    r.detail("c_p = %.12g, ell_p = %.12g, d2J/dl2 = %.4g", pr.c_p, pr.ell_p, pr.d_ell2);
    r.detail("Newton multistart: %d/20 starts converged, max |dc| = %.3g, max |dl| = %.3g", converged, worst_c,
             worst_l);
    r.detail("median runtime %.3g ms", t * 1e3);
    r.check(converged > 0, "at least one Newton start converges");
    r.check(worst_c < 1e-8 && worst_l < 1e-8, "nested bisection and Newton agree to 1e-8");
    r.check(pr.ell_p > std::log(3.0), "ell_p > log 3");
    r.check(pr.d_ell2 > 0.0, "second ell-derivative positive");
    r.check(t < 1e-2, "runtime < 10 ms");
    return r.finish(2, "pulse solver oracle equivalence");
}

// 3 ------------------------------------------------------------------------
bool monotonicity_suite()
{
    Report r;
    oracle::ProfileGen gen(3);
    const double slack = 1e-12;
    const int n = 10000;
    int bad_k = 0, bad_jc = 0, bad_ql = 0, bad_qc = 0, bad_L = 0, bad_F = 0;
    for (int i = 0; i < n; ++i)
    {
        // Pulse-regime parameters: 3 sqrt2 sigma/gamma > alpha > 1.
        const double gamma = gen.uniform(0.2, 3.0);
        const double sigma = gen.uniform(0.2, 3.0);
        const double t = 3.0 * kSqrt2 * sigma / gamma;
        if (t <= 1.0)
        {
            --i;
            continue;
        }
        const double alpha = gen.uniform(1.0, t);
        if (!(alpha > 1.0 && alpha < t))
        {
            --i;
            continue;
        }
        const Params p = make_params(alpha, gamma, sigma);
        double ell = 50.0 - gen.uniform(0.0, 50.0);
        double c = 50.0 - gen.uniform(0.0, 50.0);
        bad_k += !(K_of(ell, c, p) < slack);
        bad_jc += !(script_J(ell, c, p).d_c < slack);
        const QValue q = Q_of(ell, c, p);
        bad_ql += !(q.d_ell < slack);
        bad_qc += !(q.d_c > -slack);
        bad_L += !(ell_of_c(1.01 * c, p) - ell_of_c(c, p) > -slack);
        bad_F += !(F_of_c(c, p).derivative < slack);
    }
    r.detail("%d points in (0,50]^2 with random pulse-regime parameters", n);
    r.detail("violations: K %d, dJ/dc %d, dQ/dl %d, dQ/dc %d, L' %d, F' %d", bad_k, bad_jc, bad_ql, bad_qc, bad_L,
             bad_F);
    r.check(bad_k + bad_jc + bad_ql + bad_qc + bad_L + bad_F == 0, "zero violations");
    return r.finish(3, "monotonicity and sign suite");
}

// 4 ------------------------------------------------------------------------
double rel(double a, double b, double scale)
{
    return std::abs(a - b) / std::max(scale, 1e-300);
}

bool identity_suite()
{
    Report r;
    oracle::ProfileGen gen(4);
    double e_sum = 0, e_H = 0, e_Jl = 0, e_Q = 0, e_Qzero = 0, e_jstar = 0, e_zero = 0;
    for (int i = 0; i < 2000; ++i)
    {
        const Params p = make_params(gen.uniform(0.5, 5.0), gen.uniform(0.3, 3.0), gen.uniform(0.3, 3.0));
        const double ell = gen.uniform(0.05, 20.0);
        const double c = gen.uniform(0.05, 20.0);
        const CharRoots cr = char_roots(c, p.gamma);
        const double H = H_of_c(c, p.gamma).value;
        const ScriptJ j = script_J(ell, c, p);

        e_sum = std::max(e_sum, rel(cr.r1 + cr.r2, -1.0, 1.0));
        e_H = std::max(e_H, rel(cr.r2 - cr.r1, 1.0 / H, 1.0 / H));

        const double lhs = std::exp(ell) * j.d_ell;
        const double t1 = p.sigma / (2.0 * p.gamma) * (1.0 + H) * (-std::expm1(-cr.r2 * ell));
        const double t2 = kSqrt2 / 12.0 * (p.alpha + 1.0);
        e_Jl = std::max(e_Jl, rel(lhs, t1 - t2, std::max({std::abs(lhs), t1, t2})));

        // Q = -(gamma/sigma) [e^l J_l / X + (J + J_l) / Y]
        const double X = -std::expm1(-cr.r2 * ell);
        const double Y = -std::expm1(cr.r1 * ell);
        const double a = std::exp(ell) * j.d_ell / X;
        const double b = (j.value + j.d_ell) / Y;
        const double q = Q_of(ell, c, p).value;
        const double scale = p.gamma / p.sigma * std::max(std::abs(a), std::abs(b));
        e_Q = std::max(e_Q, rel(q, -(p.gamma / p.sigma) * (a + b), std::max(std::abs(q), scale)));

        const double lo = gen.uniform(-5.0, 3.0);
        const double len = gen.uniform(0.05, 8.0);
        const double js = jstar(IntervalUnion({{lo, lo + len}}), c, p).total;
        const double ref = std::exp(lo + len) * script_J(len, c, p).value;
        e_jstar = std::max(e_jstar, rel(js, ref, std::abs(ref)));

        e_zero = std::max(e_zero, rel(script_J(1e-13, c, p).value, kSqrt2 / 6.0, kSqrt2 / 6.0));
    }
    // On the zero set of J the relation takes its reduced form.
    const Params p = make_params(2.0, 1.0, 1.0);
    for (double ell : {1.2, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0})
    {
        const double c = oracle::bisect([&](double cc) { return script_J(ell, cc, p).value; }, 1e-3, 1e3);
        const ScriptJ j = script_J(ell, c, p);
        const CharRoots cr = char_roots(c, p.gamma);
        const double X = -std::expm1(-cr.r2 * ell);
        const double Y = -std::expm1(cr.r1 * ell);
        const double rhs = -(p.sigma / p.gamma) * Q_of(ell, c, p).value / (1.0 / Y + std::exp(ell) / X);
        e_Qzero = std::max(e_Qzero, rel(j.d_ell, rhs, std::abs(rhs)));
    }
    r.detail("max relative errors over 2000 random points:");
    r.detail("r1+r2=-1 %.2g, r2-r1=1/H %.2g, e^l J_l %.2g, Q relation %.2g, Q on J=0 %.2g", e_sum, e_H, e_Jl, e_Q,
             e_Qzero);
    r.detail("J*(chi_[a,b]) = e^b J %.2g, J(0+) = sqrt2/6 %.2g", e_jstar, e_zero);
    for (double e : {e_sum, e_H, e_Jl, e_Q, e_Qzero, e_jstar, e_zero})
        r.check(e < 1e-10, "identity within 1e-10 relative");
    return r.finish(4, "identity suite");
}

// 5 ------------------------------------------------------------------------
double fd_error(double h, double c, double gamma)
{
    const Grid g = Grid::with_spacing(-31.0, 12.0, h);
    const SampledFunction v = lc_solve_fd(sample_indicator(IntervalUnion({{-1.0, 0.0}}), g), c, gamma);
    const PiecewiseExpSolution exact = lc_indicator(1.0, c, gamma);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(v[i] - exact(g.x(i))));
    return err;
}

bool operator_convergence()
{
    Report r;
    for (auto [c, gamma] : {std::pair{2.0, 3.0}, std::pair{1.0, 1.0}, std::pair{0.5, 2.0}})
    {
        const double e1 = fd_error(0.01, c, gamma);
        const double e2 = fd_error(0.005, c, gamma);
        r.detail("c=%g gamma=%g: max error %.3g (h=0.01), %.3g (h=0.005), ratio %.3f", c, gamma, e1, e2, e1 / e2);
        r.check(e1 / e2 >= 3.5 && e1 / e2 <= 4.5, "error ratio in [3.5, 4.5]");
    }

    oracle::ProfileGen gen(5);
    const Grid g = Grid::with_spacing(-35.0, 10.0, 0.01);
    double worst_sym = 0.0;
    double min_energy = INFINITY;
    for (int k = 0; k < 100; ++k)
    {
        const double c = std::exp(gen.uniform(-1.0, 1.5));
        const double gamma = std::exp(gen.uniform(-1.0, 1.0));
        const InhibitorOperator op(g, c, gamma);
        const SampledFunction u = SampledFunction::from(g, gen.bumps(-5.0, 2.0));
        const SampledFunction w = SampledFunction::from(g, gen.bumps(-5.0, 2.0));
        const double uw = weighted_inner(u, op.apply(w));
        const double wu = weighted_inner(w, op.apply(u));
        worst_sym = std::max(worst_sym, std::abs(uw - wu) / std::max(std::abs(uw), 1e-300));
        min_energy = std::min(min_energy, op.bilinear(w.values, w.values));
    }
    r.detail("100 random profiles: max self-adjointness defect %.2g, min energy %.3g", worst_sym, min_energy);
    r.check(worst_sym < 1e-8, "self-adjoint to 1e-8");
    r.check(min_energy >= -1e-10, "nonlocal energy nonnegative");
    return r.finish(5, "operator convergence, self-adjointness, positivity");
}

// 6 ------------------------------------------------------------------------
bool weighted_space_laws()
{
    Report r;
    const double tv = total_variation_e(IntervalUnion({{0.0, 1.0}}));
    r.detail("TV_e(chi_[0,1]) - (1+e) = %.3g", tv - (1.0 + std::exp(1.0)));
    r.check(tv == 1.0 + std::exp(1.0), "TV_e(chi_[0,1]) = 1 + e");

    oracle::ProfileGen gen(6);
    double worst_shift = 0.0;
    double worst_poincare = INFINITY;
    for (double h : {0.01, 0.005})
    {
        const Grid g = Grid::with_spacing(-40.0, 8.0, h);
        for (int k = 0; k < 50; ++k)
        {
            const SampledFunction f = SampledFunction::from(g, gen.bumps(-3.0, 2.0));
            const double s = static_cast<int>(gen.uniform(-1.5, 1.5) / h) * h;
            const ShiftResult m = shift(f, s);
            const double l1 = weighted_norms(m.f).l1e / (std::exp(-s) * weighted_norms(f).l1e) - 1.0;
            const double tvr = total_variation_e_sampled(m.f) / (std::exp(-s) * total_variation_e_sampled(f)) - 1.0;
            worst_shift = std::max({worst_shift, std::abs(l1) / (h * h), std::abs(tvr) / (h * h)});
        }
    }
    const Grid g = Grid::with_spacing(-30.0, 6.0, 0.005);
    const std::vector<double> kappa = g.exp_cell_weights();
    for (int k = 0; k < 100; ++k)
    {
        const SampledFunction f =
            SampledFunction::from(g, gen.bumps(gen.uniform(-10.0, -1.0), gen.uniform(0.0, 4.0)));
        double dir = 0.0;
        for (std::size_t i = 0; i + 1 < g.size(); ++i)
        {
            const double d = (f[i + 1] - f[i]) / g.h();
            dir += kappa[i] * d * d;
        }
        const double l2 = weighted_norms(f).l2e;
        worst_poincare = std::min(worst_poincare, dir / (l2 * l2));
    }
    r.detail("grid-aligned shifts: max relative defect / h^2 = %.3g", worst_shift);
    r.detail("Poincare: min int e^x f'^2 / int e^x f^2 over 100 profiles = %.4f (bound 0.25)", worst_poincare);
    r.check(worst_shift < 1.0, "shift identities within O(h^2)");
    r.check(worst_poincare >= 0.25, "Poincare inequality");
    return r.finish(6, "weighted-space laws");
}

// 7 ------------------------------------------------------------------------
bool weakly_decreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] <= v[i - 1]))
            return false;
    return true;
}

bool ladder_ok(Report& r, const char* name, const Params& p, const std::vector<double>& ladder)
{
    const LimitPrediction lim = limit_prediction(p);
    const std::vector<StudyRow> rows = convergence_study(ladder, p);
    std::vector<double> ec;
    std::vector<double> eu;
    for (const StudyRow& row : rows)
    {
        r.detail("%s eps=%.3g: c_eps=%.6g |c_eps-c|=%.4g ||u-chi||=%.4g m=%.3g iters=%d %s", name, row.eps,
                 row.c_eps, row.err_c, row.err_u_l2e, row.energy.total, row.iters, row.flag.c_str());
        ec.push_back(row.err_c);
        eu.push_back(row.err_u_l2e);
    }
    bool ok = true;
    const bool finite = std::all_of(ec.begin(), ec.end(), [](double x) { return std::isfinite(x); });
    ok = ok && finite && weakly_decreasing(ec) && weakly_decreasing(eu);
    ok = ok && ec.back() < 0.1 * lim.c_limit;
    r.detail("%s: limit speed %.6g, final error %.4g vs bound %.4g", name, lim.c_limit, ec.back(),
             0.1 * lim.c_limit);
    return ok;
}

bool gamma_limit_convergence()
{
    Report r;
    const std::vector<double> ladder{0.04, 0.02, 0.01};
    const auto t0 = Clock::now();
    const bool front_ok = ladder_ok(r, "front", make_params(5.0, 1.0, 1.0), ladder);
    const bool pulse_ok = ladder_ok(r, "pulse", make_params(2.0, 1.0, 1.0), ladder);
    const double t = seconds_since(t0);
    r.detail("total runtime %.1f s", t);
    r.check(front_ok, "front ladder: errors weakly decreasing, final speed error < 10% of c_f");
    r.check(pulse_ok, "pulse ladder: errors weakly decreasing, final speed error < 10% of c_p");
    r.check(t < 1800.0, "runtime < 30 minutes");
    return r.finish(7, "desk-scale convergence of eps-level speeds and profiles");
}

// 8 ------------------------------------------------------------------------
bool recovery_limsup()
{
    Report r;
    const std::vector<double> ladder{0.04, 0.02, 0.01};
    oracle::ProfileGen gen(8);
    double worst_residual = 0.0;
    for (double eps : ladder)
    {
        const RecoveryProfile layer(eps);
        for (int k = 0; k < 100000; ++k)
        {
            const double x = gen.uniform(0.0, layer.rho());
            const double u = layer.U(x);
            const double du = layer.dU(x);
            worst_residual = std::max(worst_residual, std::abs(0.5 * eps * eps * du * du - F0(u) - 0.5 * eps));
        }
    }
    r.detail("first-integral residual max %.3g over 3e5 samples", worst_residual);
    r.check(worst_residual < 1e-8, "first-integral residual < 1e-8");

    struct Case
    {
        const char* name;
        Params p;
    };
    for (const Case& cs : {Case{"front", make_params(5.0, 1.0, 1.0)}, Case{"pulse", make_params(2.0, 1.0, 1.0)}})
    {
        const LimitPrediction lim = limit_prediction(cs.p);
        const double target = jstar(lim.set, lim.c_limit, cs.p).total;
        std::vector<double> gaps;
        for (double eps : ladder)
        {
            Params pe = cs.p;
            pe.epsilon = eps;
            const AdmissibleProfile w = build_recovery(lim.set, pe, solver_grid(lim.set, eps));
            const double I = energy_I(w, lim.c_limit, pe).total;
            gaps.push_back(std::abs(I - target));
            r.detail("%s eps=%.3g: I = %.6g, J* = %.3g, gap %.4g", cs.name, eps, I, target, gaps.back());
        }
        r.check(weakly_decreasing(gaps), "gap decreasing along the ladder");
        r.check(gaps.back() < 0.1, "final gap < 0.1");
    }
    return r.finish(8, "recovery-sequence limsup check");
}

// 9 ------------------------------------------------------------------------
bool gamma_star_consistency()
{
    Report r;
    bool ok = true;
    for (double eps : {0.04, 0.02, 0.01})
    {
        const Params p = make_params(2.0, 1.0, 1.0, eps);
        const double dev = std::abs(gamma_star(p) * p.alpha / (3.0 * kSqrt2 * p.sigma) - 1.0);
        r.detail("eps=%.3g: gamma* = %.8g, deviation %.4g (bound %.3g)", eps, gamma_star(p), dev, 2.0 * eps);
        ok = ok && dev <= 2.0 * eps;
    }
    r.check(ok, "|gamma* alpha/(3 sqrt2 sigma) - 1| <= 2 eps");
    return r.finish(9, "gamma* consistency");
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<int, bool (*)()>> criteria = {
        {1, front_speed_closed_form}, {2, pulse_oracle_equivalence}, {3, monotonicity_suite},
        {4, identity_suite},          {5, operator_convergence},     {6, weighted_space_laws},
        {7, gamma_limit_convergence}, {8, recovery_limsup},          {9, gamma_star_consistency},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& [id, fn] : criteria)
    {
        if (!only.empty() && !only.count(id))
            continue;
        bool ok = false;
        try
        {
            ok = fn();
        }
        catch (const std::exception& e)
        {
            std::printf("FAIL criterion %d: exception: %s\n", id, e.what());
        }
        failed += !ok;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
