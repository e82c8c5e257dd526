#include "fhn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn {

double Params::beta_eps() const noexcept
{
    return 0.5 - alpha * epsilon / kSqrt2;
}

double Params::d(double c) const
{
    if (!(c > 0.0))
        throw DomainError("diffusivity d = eps^2/c^2 needs c > 0");
    return epsilon * epsilon / (c * c);
}

double Params::epsilon_max() const noexcept
{
    return std::min(1.0 / sigma, 1.0 / (2.0 * alpha));
}

void validate(const Params& p)
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(p.alpha) || !positive(p.gamma) || !positive(p.sigma))
    {
        std::ostringstream os;
        os << "alpha, gamma, sigma must be positive and finite (got alpha=" << p.alpha
           << ", gamma=" << p.gamma << ", sigma=" << p.sigma << ")";
        throw InvalidParameter(os.str());
    }
    if (!std::isfinite(p.epsilon) || p.epsilon < 0.0)
        throw InvalidParameter("epsilon must be finite and non-negative");
    if (p.epsilon > p.epsilon_max())
    {
        std::ostringstream os;
        os << "epsilon=" << p.epsilon << " exceeds min{1/sigma, 1/(2 alpha)}=" << p.epsilon_max();
        throw InvalidParameter(os.str());
    }
}

Params make_params(double alpha, double gamma, double sigma, double epsilon)
{
    Params p{alpha, gamma, sigma, epsilon};
    validate(p);
    return p;
}

double F0(double u) noexcept
{
    const double t = u * (u - 1.0);
    return 0.25 * t * t;
}

double dF0(double u) noexcept
{
    return 0.5 * u * (u - 1.0) * (2.0 * u - 1.0);
}

double G(double u) noexcept
{
    return (u * u * u / 3.0 - 0.5 * u * u) / kSqrt2;
}

double dG(double u) noexcept
{
    return (u * u - u) / kSqrt2;
}

double f_eps(double u, double beta_eps) noexcept
{
    return -u * (u - beta_eps) * (u - 1.0);
}

double phi(double u) noexcept
{
    // sqrt(2 F0(s)) = |s (s - 1)| / sqrt(2); integrate piecewise.
    auto cubic = [](double s) { return (s * s * s / 3.0 - 0.5 * s * s) / kSqrt2; };
    if (u <= 0.0)
        return cubic(u);
    if (u <= 1.0)
        return -cubic(u);
    return -cubic(1.0) + (cubic(u) - cubic(1.0));
}

Potentials potentials(double u, const Params& p)
{
    Potentials out{};
    out.f_eps = f_eps(u, p.beta_eps());
    out.F0 = F0(u);
    out.G = G(u);
    out.F_eps = out.F0 + p.alpha * p.epsilon * out.G;
    out.phi = phi(u);
    return out;
}

Regime classify(const Params& p)
{
    validate(p);
    const double threshold = 3.0 * kSqrt2 * p.sigma / p.gamma;
    const double a = p.alpha;
    if (a >= threshold && threshold > a - 1.0 && a - 1.0 > 0.0)
        return {RegimeKind::Front, a > threshold};
    if (threshold > a && a > 1.0)
        return {RegimeKind::Pulse, true};
    return {RegimeKind::Neither, true};
}

std::string to_string(RegimeKind k)
{
    switch (k)
    {
        case RegimeKind::Front:
            return "front";
        case RegimeKind::Pulse:
            return "pulse";
        case RegimeKind::Neither:
            return "neither";
    }
    return "neither";
}

double gamma_star(const Params& p)
{
    validate(p);
    if (p.epsilon == 0.0)
        throw DomainError("gamma* is undefined at the limit level; use gamma_star_leading()");
    const double beta = p.beta_eps();
    return 9.0 * p.epsilon * p.sigma / ((1.0 - 2.0 * beta) * (2.0 - beta));
}

double gamma_star_leading(const Params& p)
{
    validate(p);
    return 3.0 * kSqrt2 * p.sigma / p.alpha;
}

BoxConstraint box_constraint(const Params& p, double beta2)
{
    validate(p);
    if (!(beta2 > 1.0))
        throw InvalidParameter("beta2 must exceed 1");
    const double beta = p.beta_eps();
    const double target = beta2 / p.gamma;
    // f_eps(-M) = M (M + beta)(M + 1) is increasing on M >= 0.
    auto g = [&](double m) { return f_eps(-m, beta) - target; };
    double lo = 0.0;
    double hi = 1.0;
    while (g(hi) < 0.0)
        hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return {beta2, hi};
}

double quadratic_lower_bound(const Params& p, const BoxConstraint& box)
{
    // -F_eps(x)/x^2 = -x^2/4 + (1 + beta) x / 3 - beta/2, a concave parabola.
    const double beta = p.beta_eps();
    auto q = [beta](double x) { return -0.25 * x * x + (1.0 + beta) * x / 3.0 - 0.5 * beta; };
    const double vertex = std::clamp(2.0 * (1.0 + beta) / 3.0, box.lower(), box.upper());
    return std::max({q(vertex), q(box.lower()), q(box.upper())});
}

}  // namespace fhn
