#include "fhn/limit_energy.hpp"

#include <algorithm>
#include <cmath>

#include "fhn/errors.hpp"
#include "fhn/nonlocal_operator.hpp"

namespace fhn {

namespace {

constexpr double kPerimeterCoef = kSqrt2 / 12.0;  // phi(1)

void require_positive(double ell, double c)
{
    if (!(ell > 0.0))
        throw DomainError("interval width ell must be positive");
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("speed c must be positive and finite");
}

// e^x with x <= 0, flushed to zero below the double range.
double decay(double x)
{
    return x < -745.0 ? 0.0 : std::exp(x);
}

}  // namespace

HValue H_of_c(double c, double gamma)
{
    if (!(c >= 0.0) || !(gamma > 0.0))
        throw DomainError("H(c) needs c >= 0 and gamma > 0");
    if (std::isinf(c))
        return {1.0, 0.0};
    const double q = c * c + 4.0 * gamma;
    const double s = std::sqrt(q);
    return {c / s, 4.0 * gamma / (q * s)};
}

FValue F_of_c(double c, const Params& p)
{
    validate(p);
    const HValue h = H_of_c(c, p.gamma);
    const double k = p.sigma / (2.0 * p.gamma);
    return {kPerimeterCoef * (1.0 - p.alpha) + k * (1.0 - h.value), -k * h.derivative};
}

double K_of(double ell, double c, const Params& p)
{
    validate(p);
    if (!(ell >= 0.0))
        throw DomainError("K needs ell >= 0");
    if (!(c > 0.0))
        throw DomainError("K needs c > 0");
    if (ell == 0.0)
        return 0.0;
    if (std::isinf(ell))
        return -1.0;
    const auto [r1, r2] = char_roots(c, p.gamma);
    const double span = r2 - r1;  // 1/H
    if (std::max(1.0, -r1) * ell <= 0.5)
    {
        // sum_{n>=2} ell^n/n! [-(-1)^n + 2 r1^n + n r1^{n-1} (r2 - r1)]
        double sum = 0.0;
        double fact = ell;     // ell^n / n!
        double r1_pow = 1.0;   // r1^{n-1}
        double sign = -1.0;    // (-1)^n
        for (int n = 2; n < 60; ++n)
        {
            fact *= ell / n;
            r1_pow *= r1;
            sign = -sign;
            const double term = fact * (-sign + 2.0 * r1_pow * r1 + n * r1_pow * span);
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum))
                break;
        }
        return sum;
    }
    const double er1 = decay(r1 * ell);
    return -1.0 - std::exp(-ell) + 2.0 * er1 + ell * span * er1;
}

ScriptJ script_J(double ell, double c, const Params& p)
{
    validate(p);
    require_positive(ell, c);
    const auto [r1, r2] = char_roots(c, p.gamma);
    const HValue h = H_of_c(c, p.gamma);
    const double H = h.value;
    const double a = p.alpha;
    const double sg = p.sigma / p.gamma;

    const double eml = decay(-ell);
    const double er1 = decay(r1 * ell);

    ScriptJ out{};
    out.value = kPerimeterCoef * (1.0 - a) + kPerimeterCoef * (1.0 + a) * eml +
                sg * H * (r2 + r1 * eml + er1);
    out.d_ell = -kPerimeterCoef * (1.0 + a) * eml - (1.0 + H) * 0.5 * sg * (er1 - eml);
    out.d_ell2 = kPerimeterCoef * (1.0 + a) * eml - (1.0 + H) * 0.5 * sg * (r1 * er1 + eml);
    const double q = c * c + 4.0 * p.gamma;
    out.d_c = sg * (2.0 * p.gamma / (q * std::sqrt(q))) * K_of(ell, c, p);
    return out;
}

QValue Q_of(double ell, double c, const Params& p)
{
    validate(p);
    require_positive(ell, c);
    const auto [r1, r2] = char_roots(c, p.gamma);
    const double k = kSqrt2 * p.gamma / (12.0 * p.sigma);
    const double a = p.alpha;

    const double x = -std::expm1(-r2 * ell);  // 1 - e^{-r2 ell}
    const double y = -std::expm1(r1 * ell);   // 1 - e^{r1 ell}
    const double emr2 = decay(-r2 * ell);
    const double er1 = decay(r1 * ell);

    // dr2/dc = -2 gamma/(c^2 s), dr1/dc = -dr2/dc
    const double s = std::sqrt(c * c + 4.0 * p.gamma);
    const double dr1 = 2.0 * p.gamma / (c * c * s);

    QValue out{};
    out.value = k * ((1.0 + a) / x + (a - 1.0) / y) - 1.0;
    if (std::isinf(ell))
        return {out.value, 0.0, 0.0};
    out.d_ell = k * (-(1.0 + a) * r2 * emr2 / (x * x) + (a - 1.0) * r1 * er1 / (y * y));
    out.d_c = k * ell * ((1.0 + a) * emr2 * dr1 / (x * x) + (a - 1.0) * er1 * dr1 / (y * y));
    return out;
}

LimitEnergyBreakdown jstar(const IntervalUnion& e, double c, const Params& p, const JstarOptions& opt)
{
    validate(p);
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("speed c must be positive and finite");
    LimitEnergyBreakdown out{};
    if (e.empty())
        return out;

    out.perimeter_term = kPerimeterCoef * total_variation_e(e);
    out.area_term = -kPerimeterCoef * p.alpha * e.measure_e();

    if (e.size() == 1)
    {
        const Interval iv = e.intervals().front();
        const PiecewiseExpSolution v(iv.b - iv.a, c, p.gamma);
        out.nonlocal_term = 0.5 * p.sigma * std::exp(iv.b) * v.weighted_self_integral();
    }
    else
    {
        if (!(opt.h > 0.0))
            throw InvalidParameter("jstar grid spacing must be positive");
        const CharRoots r = char_roots(c, p.gamma);
        const double h0 = std::min(opt.h, 0.1 / std::max(-r.r1, r.r2));
        auto nonlocal_at = [&](double h) {
            const Grid g = Grid::truncated_for(e.max_right(), h);
            const SampledFunction chi = sample_indicator(e, g);
            return nonlocal_energy(chi, c, p.gamma);
        };
        const double coarse = nonlocal_at(h0);
        const double fine = nonlocal_at(0.5 * h0);
        out.nonlocal_term = 0.5 * p.sigma * (4.0 * fine - coarse) / 3.0;
    }
    out.total = out.perimeter_term + out.area_term + out.nonlocal_term;
    return out;
}

}  // namespace fhn
