#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fhn/epsilon_solver.hpp"
#include "fhn/errors.hpp"

namespace fhn {

RecoveryProfile::RecoveryProfile(double eps, std::size_t knots) : eps_(eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("transition layer needs eps > 0");
    if (knots < 3)
        throw InvalidParameter("transition layer needs at least 3 knots");

    auto dx_du = [eps](double u) { return eps / std::sqrt(eps + 2.0 * F0(u)); };
    rho_ = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(dx_du, 0.0, 1.0, 15, 1e-15);

    x_.resize(knots);
    u_.resize(knots);
    du_.resize(knots);
    const double step = 1.0 / static_cast<double>(knots - 1);
    double x = 0.0;
    for (std::size_t k = 0; k < knots; ++k)
    {
        const double u = k + 1 == knots ? 1.0 : static_cast<double>(k) * step;
        if (k > 0)
            x += boost::math::quadrature::gauss<double, 20>::integrate(dx_du, u_[k - 1], u);
        u_[k] = u;
        x_[k] = x;
        du_[k] = 1.0 / dx_du(u);
    }
    // Both quadratures agree to rounding; pin the end knot to rho.
    x_.back() = rho_;
}

double RecoveryProfile::U(double x) const
{
    if (x <= 0.0)
        return 0.0;
    if (x >= rho_)
        return 1.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double dx = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / dx;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * u_[k] + (t3 - 2.0 * t2 + t) * dx * du_[k] +
           (-2.0 * t3 + 3.0 * t2) * u_[k + 1] + (t3 - t2) * dx * du_[k + 1];
}

double RecoveryProfile::dU(double x) const
{
    if (x < 0.0 || x > rho_)
        return 0.0;
    const auto it = std::upper_bound(x_.begin(), x_.end() - 1, x);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double dx = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / dx;
    const double t2 = t * t;
    return ((6.0 * t2 - 6.0 * t) * u_[k] + (-6.0 * t2 + 6.0 * t) * u_[k + 1]) / dx +
           (3.0 * t2 - 4.0 * t + 1.0) * du_[k] + (3.0 * t2 - 2.0 * t) * du_[k + 1];
}

double RecoveryProfile::U_tilde(double x) const
{
    return U(rho_ - x);
}

RecoveryProfile recovery_profile(double eps)
{
    return RecoveryProfile(eps);
}

AdmissibleProfile make_admissible(SampledFunction w, const BoxConstraint& box)
{
    const double norm = weighted_norms(w).l2e;
    if (std::abs(norm - 1.0) >= 1e-8)
    {
        std::ostringstream os;
        os << "profile is not on the unit sphere (L2_e norm " << norm << ")";
        throw DomainError(os.str());
    }
    const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
    if (*lo < box.lower() - 1e-12 || *hi > box.upper() + 1e-12)
        throw DomainError("profile leaves the admissible box");
    return {std::move(w), norm, box, 0.0};
}

AdmissibleProfile build_recovery(const IntervalUnion& e, double eps, const Grid& grid,
                                 const BoxConstraint& box)
{
    if (e.empty())
        throw DomainError("cannot build a recovery profile for an empty set");
    if (std::abs(e.measure_e() - 1.0) > 1e-9)
        throw DomainError("recovery construction needs a normalized set (int e^x chi_E = 1)");

    const RecoveryProfile layer(eps);
    const double rho = layer.rho();
    const double min_gap = 2.0 * std::sqrt(eps);
    const std::vector<double> jumps = e.jumps();
    for (std::size_t i = 1; i < jumps.size(); ++i)
    {
        if (jumps[i - 1] - jumps[i] <= min_gap)
        {
            std::ostringstream os;
            os << "jumps at " << jumps[i] << " and " << jumps[i - 1]
               << " are closer than 2 sqrt(eps) = " << min_gap;
            throw DomainError(os.str());
        }
    }
    if (jumps.back() - rho <= grid.x_lo() || jumps.front() + rho >= grid.x_hi())
        throw DomainError("grid does not contain every transition layer");

    const std::vector<double> weights = grid.exp_weights();
    auto profile = [&](double theta) {
        std::vector<double> w(grid.size(), 0.0);
        for (const Interval& iv : e.intervals())
        {
            const double qa = iv.a - theta * rho;
            const double qb = iv.b - (1.0 - theta) * rho;
            for (std::size_t i = 0; i < w.size(); ++i)
            {
                const double x = grid.x(i);
                if (x > qb + rho || (std::isfinite(qa) && x < qa))
                    continue;
                const double up = std::isfinite(qa) ? layer.U(x - qa) : 1.0;
                w[i] += up * layer.U(qb + rho - x);
            }
        }
        return w;
    };
    auto norm_sq = [&](const std::vector<double>& w) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            s += weights[i] * w[i] * w[i];
        return s;
    };

    // The squared norm moves monotonically with theta: every layer shifts
    // left, and the right end of each interval carries the larger weight.
    double lo = 0.0;
    double hi = 1.0;
    const double f_lo = norm_sq(profile(lo)) - 1.0;
    const double f_hi = norm_sq(profile(hi)) - 1.0;
    if (f_lo * f_hi > 0.0)
    {
        std::ostringstream os;
        os << "no layer offset gives a unit L2_e norm (norm^2 - 1 = " << f_lo << " at theta=0, "
           << f_hi << " at theta=1)";
        throw ConvergenceError(os.str());
    }
    const bool increasing = f_hi > f_lo;
    double theta = 0.5;
    std::vector<double> w;
    for (int it = 0; it < 200; ++it)
    {
        theta = 0.5 * (lo + hi);
        w = profile(theta);
        const double f = norm_sq(w) - 1.0;
        if (std::abs(std::sqrt(f + 1.0) - 1.0) < 1e-12 || hi - lo < 1e-15)
            break;
        ((f < 0.0) == increasing ? lo : hi) = theta;
    }

    AdmissibleProfile out = make_admissible(SampledFunction(grid, std::move(w)), box);
    out.theta = theta;
    return out;
}

AdmissibleProfile build_recovery(const IntervalUnion& e, const Params& p, const Grid& grid)
{
    validate(p);
    return build_recovery(e, p.epsilon, grid, box_constraint(p));
}

}  // namespace fhn
