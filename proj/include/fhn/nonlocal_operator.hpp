#pragma once

#include <span>
#include <vector>

#include "fhn/weighted_space.hpp"

namespace fhn {

/// Roots r1 < -1 < 0 < r2 of c^2 r^2 + c^2 r - gamma = 0, with r1 + r2 = -1.
struct CharRoots
{
    double r1;
    double r2;
};

[[nodiscard]] CharRoots char_roots(double c, double gamma);

/// Closed-form inhibitor response to the indicator of [-ell, 0]:
///
///   v(x) = A4 e^{r2 x}                         x <= -ell
///        = 1/gamma + A3 e^{r1 x} + A2 e^{r2 x}  -ell <= x <= 0
///        = A1 e^{r1 x}                          x >= 0
///
/// For ell = infinity the lower piece is absent and A3 = A4 = 0.
class PiecewiseExpSolution
{
  public:
    PiecewiseExpSolution(double ell, double c, double gamma);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double derivative(double x) const;

    [[nodiscard]] const CharRoots& roots() const noexcept { return roots_; }
    [[nodiscard]] double ell() const noexcept { return ell_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double A1() const noexcept { return a1_; }
    [[nodiscard]] double A2() const noexcept { return a2_; }
    [[nodiscard]] double A3() const noexcept { return a3_; }
    /// A4 overflows for long intervals; the evaluator never forms it directly.
    [[nodiscard]] double A4() const;

    /// int_{-ell}^0 e^x v(x) dx = 2/(gamma (r2 - r1)) (r2 + r1 e^{-ell} + e^{r1 ell}).
    [[nodiscard]] double weighted_self_integral() const;

  private:
    CharRoots roots_;
    double ell_;
    double gamma_;
    double a1_;
    double a2_;
    double a3_;
    double er1l_;  // e^{r1 ell}, 0 for ell = inf
};

[[nodiscard]] PiecewiseExpSolution lc_indicator(double ell, double c, double gamma);

/// Finite-difference solver for c^2 v'' + c^2 v' - gamma v + f = 0 on a
/// truncated grid.
///
/// The equation is discretized in the self-adjoint form
/// -(c^2 e^x v')' + gamma e^x v = e^x f with linear elements and a lumped
/// e^x mass, giving a symmetric tridiagonal system. Outside the grid f is
/// taken constant at its edge value, so the exact far-field conditions are
/// v' = r2 (v - f_lo/gamma) at x_lo and v' = r1 (v - f_hi/gamma) at x_hi.
/// The factorization is built once and shared read-only.
class InhibitorOperator
{
  public:
    InhibitorOperator(const Grid& grid, double c, double gamma);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] const CharRoots& roots() const noexcept { return roots_; }
    [[nodiscard]] std::span<const double> mass() const noexcept { return mass_; }

    /// v = L_c f.
    [[nodiscard]] std::vector<double> apply(std::span<const double> f) const;
    [[nodiscard]] SampledFunction apply(const SampledFunction& f) const;

    /// Discrete int e^x u L_c w dx.
    [[nodiscard]] double bilinear(std::span<const double> u, std::span<const double> w) const;

    /// Gradient of w -> int e^x w L_c w with respect to the nodal values.
    [[nodiscard]] std::vector<double> quadratic_gradient(std::span<const double> w) const;

    /// Returns int e^x w L_c w and writes its gradient into `grad`.
    double quadratic_with_gradient(std::span<const double> w, std::span<double> grad) const;

  private:
    [[nodiscard]] std::vector<double> solve(std::vector<double> rhs) const;

    Grid grid_;
    double c_;
    double gamma_;
    CharRoots roots_;
    std::vector<double> mass_;     // trapezoid e^x weights
    std::vector<double> diag_;     // LDL^T factors of the system matrix
    std::vector<double> lower_;
    double left_load_;             // c^2 e^{x_lo} r2 / gamma
    double right_load_;            // -c^2 e^{x_hi} r1 / gamma
};

[[nodiscard]] SampledFunction lc_solve_fd(const SampledFunction& f, double c, double gamma);

/// int e^x w L_c w dx (non-negative up to discretization error).
[[nodiscard]] double nonlocal_energy(const SampledFunction& w, double c, double gamma);

}  // namespace fhn
