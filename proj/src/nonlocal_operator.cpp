#include "fhn/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn {

CharRoots char_roots(double c, double gamma)
{
    if (!(c > 0.0) || !(gamma > 0.0) || !std::isfinite(c) || !std::isfinite(gamma))
        throw DomainError("char_roots needs c > 0 and gamma > 0");
    // r2 = (s - c)/(2c) rewritten without cancellation.
    const double s = std::sqrt(c * c + 4.0 * gamma);
    const double r2 = 2.0 * gamma / (c * (s + c));
    return {-1.0 - r2, r2};
}

PiecewiseExpSolution::PiecewiseExpSolution(double ell, double c, double gamma)
    : roots_(char_roots(c, gamma)), ell_(ell), gamma_(gamma)
{
    if (!(ell > 0.0))
        throw DomainError("interval length must be positive");
    const auto [r1, r2] = roots_;
    const double k = gamma * (r2 - r1);
    er1l_ = std::isinf(ell) ? 0.0 : std::exp(r1 * ell);
    a1_ = r2 * (1.0 - er1l_) / k;
    a2_ = r1 / k;
    a3_ = -r2 * er1l_ / k;
}

double PiecewiseExpSolution::A4() const
{
    if (std::isinf(ell_))
        return 0.0;
    const auto [r1, r2] = roots_;
    return r1 / (gamma_ * (r2 - r1)) * (-std::expm1(r2 * ell_));
}

double PiecewiseExpSolution::operator()(double x) const
{
    const auto [r1, r2] = roots_;
    const double k = gamma_ * (r2 - r1);
    if (x >= 0.0)
        return a1_ * std::exp(r1 * x);
    if (x >= -ell_)
    {
        double v = 1.0 / gamma_ + a2_ * std::exp(r2 * x);
        if (!std::isinf(ell_))
            v -= r2 / k * std::exp(r1 * (x + ell_));
        return v;
    }
    return r1 / k * (std::exp(r2 * x) - std::exp(r2 * (x + ell_)));
}

double PiecewiseExpSolution::derivative(double x) const
{
    const auto [r1, r2] = roots_;
    const double k = gamma_ * (r2 - r1);
    if (x >= 0.0)
        return r1 * a1_ * std::exp(r1 * x);
    if (x >= -ell_)
    {
        double v = r2 * a2_ * std::exp(r2 * x);
        if (!std::isinf(ell_))
            v -= r1 * r2 / k * std::exp(r1 * (x + ell_));
        return v;
    }
    return r2 * r1 / k * (std::exp(r2 * x) - std::exp(r2 * (x + ell_)));
}

double PiecewiseExpSolution::weighted_self_integral() const
{
    const auto [r1, r2] = roots_;
    const double eml = std::isinf(ell_) ? 0.0 : std::exp(-ell_);
    return 2.0 * (r2 + r1 * eml + er1l_) / (gamma_ * (r2 - r1));
}

PiecewiseExpSolution lc_indicator(double ell, double c, double gamma)
{
    return {ell, c, gamma};
}

InhibitorOperator::InhibitorOperator(const Grid& grid, double c, double gamma)
    : grid_(grid), c_(c), gamma_(gamma), roots_(char_roots(c, gamma))
{
    const double h = grid_.h();
    const double rate = std::max(-roots_.r1, roots_.r2);
    if (h * rate >= 0.5)
    {
        std::ostringstream os;
        os << "grid spacing h=" << h << " does not resolve decay rate " << rate
           << " (need h*rate < 0.5)";
        throw DomainError(os.str());
    }

    const std::size_t n = grid_.size();
    mass_ = grid_.exp_weights();
    const std::vector<double> cells = grid_.exp_cell_weights();
    const double c2 = c * c;

    std::vector<double> diag(n);
    std::vector<double> off(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        diag[i] = gamma * mass_[i];
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        const double k = c2 * cells[i] / (h * h);
        diag[i] += k;
        diag[i + 1] += k;
        off[i] = -k;
    }
    const double left = c2 * std::exp(grid_.x_lo()) * roots_.r2;
    const double right = -c2 * std::exp(grid_.x_hi()) * roots_.r1;
    diag.front() += left;
    diag.back() += right;
    left_load_ = left / gamma;
    right_load_ = right / gamma;

    // LDL^T of the symmetric tridiagonal matrix.
    diag_.resize(n);
    lower_.resize(n - 1);
    diag_[0] = diag[0];
    for (std::size_t i = 1; i < n; ++i)
    {
        lower_[i - 1] = off[i - 1] / diag_[i - 1];
        diag_[i] = diag[i] - lower_[i - 1] * off[i - 1];
        if (!(diag_[i] > 0.0) || !std::isfinite(diag_[i]))
            throw ConvergenceError("inhibitor system is singular");
    }
}

std::vector<double> InhibitorOperator::solve(std::vector<double> rhs) const
{
    const std::size_t n = rhs.size();
    for (std::size_t i = 1; i < n; ++i)
        rhs[i] -= lower_[i - 1] * rhs[i - 1];
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] /= diag_[i];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] -= lower_[i] * rhs[i + 1];
    return rhs;
}

std::vector<double> InhibitorOperator::apply(std::span<const double> f) const
{
    if (f.size() != grid_.size())
        throw DomainError("profile length does not match operator grid");
    std::vector<double> rhs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        rhs[i] = mass_[i] * f[i];
    rhs.front() += left_load_ * f.front();
    rhs.back() += right_load_ * f.back();
    return solve(std::move(rhs));
}

SampledFunction InhibitorOperator::apply(const SampledFunction& f) const
{
    if (!f.grid.same_as(grid_))
        throw DomainError("profile grid does not match operator grid");
    return {grid_, apply(std::span<const double>(f.values))};
}

double InhibitorOperator::bilinear(std::span<const double> u, std::span<const double> w) const
{
    if (u.size() != grid_.size())
        throw DomainError("profile length does not match operator grid");
    const std::vector<double> v = apply(w);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += mass_[i] * u[i] * v[i];
    return s;
}

std::vector<double> InhibitorOperator::quadratic_gradient(std::span<const double> w) const
{
    std::vector<double> g(w.size());
    (void)quadratic_with_gradient(w, g);
    return g;
}

double InhibitorOperator::quadratic_with_gradient(std::span<const double> w, std::span<double> grad) const
{
    if (w.size() != grid_.size() || grad.size() != grid_.size())
        throw DomainError("profile length does not match operator grid");
    // E(w) = w^T M A^{-1} D w with D = M + edge loads, so
    // grad E = M A^{-1} D w + D A^{-1} M w.
    const std::vector<double> v = apply(w);
    std::vector<double> rhs(w.size());
    double e = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        rhs[i] = mass_[i] * w[i];
        e += rhs[i] * v[i];
    }
    const std::vector<double> z = solve(std::move(rhs));
    for (std::size_t i = 0; i < w.size(); ++i)
        grad[i] = mass_[i] * (v[i] + z[i]);
    grad.front() += left_load_ * z.front();
    grad.back() += right_load_ * z.back();
    return e;
}

SampledFunction lc_solve_fd(const SampledFunction& f, double c, double gamma)
{
    const InhibitorOperator op(f.grid, c, gamma);
    return op.apply(f);
}

double nonlocal_energy(const SampledFunction& w, double c, double gamma)
{
    const InhibitorOperator op(w.grid, c, gamma);
    return op.bilinear(w.values, w.values);
}

}  // namespace fhn
