#include "fhn/wave_speeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "fhn/errors.hpp"
#include "fhn/limit_energy.hpp"

namespace fhn {

namespace {

void require_pulse(const Params& p)
{
    if (classify(p).tag != RegimeKind::Pulse)
    {
        std::ostringstream os;
        os << "pulse solver needs 3 sqrt(2) sigma/gamma > alpha > 1 (got alpha=" << p.alpha
           << ", 3 sqrt(2) sigma/gamma=" << 3.0 * kSqrt2 * p.sigma / p.gamma << ")";
        throw RegimeError(os.str());
    }
}

// Root of Q(., c) without the regime check; Q decreases from +inf to a
// negative limit.
double ell_root(double c, const Params& p)
{
    auto q = [&](double ell) { return Q_of(ell, c, p).value; };
    double lo = std::min(1.0, c);
    while (!(q(lo) > 0.0))
    {
        lo *= 0.5;
        if (lo < 1e-300)
            throw ConvergenceError("could not bracket L(c) from below");
    }
    double hi = std::max(2.0 * lo, 1.0);
    while (q(hi) > 0.0)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
            throw ConvergenceError("could not bracket L(c) from above");
    }
    for (int it = 0; it < 400; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        const double v = q(mid);
        if (std::abs(v) < 1e-12)
            return mid;
        (v > 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-14 * std::max(1.0, hi))
            break;
    }
    return 0.5 * (lo + hi);
}

struct GValue
{
    double g;
    double ell;
};

GValue g_of(double c, const Params& p)
{
    const double ell = ell_root(c, p);
    return {script_J(ell, c, p).value, ell};
}

nlohmann::json number_or_token(double v)
{
    if (std::isinf(v))
        return v > 0.0 ? "inf" : "-inf";
    return v;
}

}  // namespace

FrontResult front_speed(const Params& p)
{
    const Regime reg = classify(p);
    if (reg.tag != RegimeKind::Front)
    {
        std::ostringstream os;
        os << "front speed needs alpha >= 3 sqrt(2) sigma/gamma > alpha - 1 > 0 (got alpha="
           << p.alpha << ", 3 sqrt(2) sigma/gamma=" << 3.0 * kSqrt2 * p.sigma / p.gamma << ")";
        throw RegimeError(os.str());
    }
    FrontResult r;
    r.h_star = 1.0 - (p.alpha - 1.0) * p.gamma / (3.0 * kSqrt2 * p.sigma);
    r.c_f = 2.0 * r.h_star * std::sqrt(p.gamma) / std::sqrt(1.0 - r.h_star * r.h_star);
    r.residual = std::abs(F_of_c(r.c_f, p).value);
    r.strict = reg.strict;
    return r;
}

bool front_condition(double c, const Params& p)
{
    validate(p);
    return kSqrt2 * p.gamma / (6.0 * p.sigma) >= H_of_c(c, p.gamma).value;
}

double ell_of_c(double c, const Params& p)
{
    require_pulse(p);
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("L(c) needs a positive finite speed");
    return ell_root(c, p);
}

PulseResult pulse_speed(const Params& p, const PulseOptions& opt)
{
    require_pulse(p);
    if (!(opt.c_lo > 0.0))
        throw DomainError("speed bracket must lie in c > 0");
    if (opt.c_hi > 0.0 && !(opt.c_hi > opt.c_lo))
        throw DomainError("speed bracket must satisfy c_lo < c_hi");

    // g(c) = J(L(c), c) decreases from sqrt(2)/6 to (1 - alpha) sqrt(2)/12.
    double lo = opt.c_lo;
    GValue g_lo = g_of(lo, p);
    if (!(g_lo.g > 0.0))
        throw ConvergenceError("J(L(c), c) is not positive at the lower speed bracket");
    double hi = opt.c_hi > 0.0 ? opt.c_hi : std::max(1.0, 2.0 * lo);
    GValue g_hi = g_of(hi, p);
    while (g_hi.g > 0.0)
    {
        if (opt.c_hi > 0.0)
            throw ConvergenceError("J(L(c), c) does not change sign on the given speed bracket");
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        if (hi > 1e8)
            throw ConvergenceError("could not bracket the pulse speed");
        g_hi = g_of(hi, p);
    }

    PulseResult r;
    GValue mid_v{};
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it)
    {
        mid = 0.5 * (lo + hi);
        mid_v = g_of(mid, p);
        ++r.outer_iterations;
        if (std::abs(mid_v.g) < opt.outer_tol || hi - lo < 1e-15 * hi)
            break;
        (mid_v.g > 0.0 ? lo : hi) = mid;
    }

    // Newton polish on g with g' = J_ell L' + J_c and L' = -Q_c / Q_ell,
    // kept inside the bracket.
    double c = mid;
    GValue gv = mid_v;
    for (int it = 0; it < 8 && gv.g != 0.0; ++it)
    {
        const ScriptJ j = script_J(gv.ell, c, p);
        const QValue q = Q_of(gv.ell, c, p);
        const double slope = j.d_ell * (-q.d_c / q.d_ell) + j.d_c;
        if (!(slope < 0.0))
            break;
        const double next = c - gv.g / slope;
        if (!(next > lo && next < hi))
            break;
        const GValue nv = g_of(next, p);
        if (std::abs(nv.g) >= std::abs(gv.g))
            break;
        c = next;
        gv = nv;
    }

    r.c_p = c;
    r.ell_p = gv.ell;
    r.b = -std::log(-std::expm1(-r.ell_p));
    r.a = r.b - r.ell_p;
    const ScriptJ j = script_J(r.ell_p, r.c_p, p);
    r.residuals = {std::abs(j.value), std::abs(j.d_ell), std::abs(Q_of(r.ell_p, r.c_p, p).value)};
    r.d_ell2 = j.d_ell2;

    const double ell_min = std::log((p.alpha + 1.0) / (p.alpha - 1.0));
    if (!(r.ell_p > ell_min) || !(r.d_ell2 > 0.0))
        throw ConvergenceError("pulse solution violates the width or convexity condition");
    if (r.residuals.J > 1e-9 || r.residuals.dJ_dl > 1e-9 || r.residuals.Q > 1e-9)
    {
        std::ostringstream os;
        os << "pulse residuals too large: J=" << r.residuals.J << " dJ/dl=" << r.residuals.dJ_dl
           << " Q=" << r.residuals.Q;
        throw ConvergenceError(os.str());
    }
    return r;
}

std::string to_json(const FrontResult& r, const Params& p)
{
    nlohmann::ordered_json j;
    j["regime"] = "front";
    j["alpha"] = p.alpha;
    j["gamma"] = p.gamma;
    j["sigma"] = p.sigma;
    j["c"] = r.c_f;
    j["c_f"] = r.c_f;
    j["h_star"] = r.h_star;
    j["ell"] = number_or_token(std::numeric_limits<double>::infinity());
    j["a"] = number_or_token(-std::numeric_limits<double>::infinity());
    j["b"] = 0.0;
    j["strict"] = r.strict;
    j["residuals"] = {{"F", r.residual}};
    return j.dump();
}

std::string to_json(const PulseResult& r, const Params& p)
{
    nlohmann::ordered_json j;
    j["regime"] = "pulse";
    j["alpha"] = p.alpha;
    j["gamma"] = p.gamma;
    j["sigma"] = p.sigma;
    j["c"] = r.c_p;
    j["c_p"] = r.c_p;
    j["ell"] = r.ell_p;
    j["a"] = r.a;
    j["b"] = r.b;
    j["d2J_dl2"] = r.d_ell2;
    j["residuals"] = {{"J", r.residuals.J}, {"dJ_dl", r.residuals.dJ_dl}, {"Q", r.residuals.Q}};
    return j.dump();
}

}  // namespace fhn
