#pragma once

#include <string>

namespace fhn {

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Physical parameters of the scaled FitzHugh-Nagumo traveling-wave problem.
///
/// `epsilon == 0` denotes the sharp-interface (limit) level. Construct through
/// make_params() or call validate() before use.
struct Params
{
    double alpha = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    double epsilon = 0.0;

    /// Unstable zero of the cubic: 1/2 - alpha*epsilon/sqrt(2).
    [[nodiscard]] double beta_eps() const noexcept;

    /// Activator diffusivity d = epsilon^2 / c^2 for an attached speed c.
    [[nodiscard]] double d(double c) const;

    /// Largest admissible epsilon, min{1/sigma, 1/(2 alpha)}.
    [[nodiscard]] double epsilon_max() const noexcept;
};

/// Throws InvalidParameter unless alpha, gamma, sigma > 0 and
/// 0 <= epsilon <= epsilon_max().
void validate(const Params& p);

[[nodiscard]] Params make_params(double alpha, double gamma, double sigma, double epsilon = 0.0);

struct Potentials
{
    double f_eps;  // -u(u - beta_eps)(u - 1)
    double F0;     // u^2 (u - 1)^2 / 4
    double G;      // (u^3/3 - u^2/2) / sqrt(2)
    double F_eps;  // F0 + alpha*epsilon*G
    double phi;    // int_0^u sqrt(2 F0)
};

[[nodiscard]] Potentials potentials(double u, const Params& p);

[[nodiscard]] double F0(double u) noexcept;
[[nodiscard]] double dF0(double u) noexcept;
[[nodiscard]] double G(double u) noexcept;
[[nodiscard]] double dG(double u) noexcept;
[[nodiscard]] double f_eps(double u, double beta_eps) noexcept;

/// Modica-Mortola primitive phi(u) = int_0^u sqrt(2 F0(s)) ds, any real u.
[[nodiscard]] double phi(double u) noexcept;

enum class RegimeKind
{
    Front,
    Pulse,
    Neither
};

struct Regime
{
    RegimeKind tag = RegimeKind::Neither;
    // False only on the boundary alpha == 3 sqrt(2) sigma / gamma, where the
    // limit front exists but the epsilon-level existence result needs
    // strict inequality.
    bool strict = true;
};

[[nodiscard]] Regime classify(const Params& p);

[[nodiscard]] std::string to_string(RegimeKind k);

/// Nullcline equal-area value gamma* = 9 eps sigma / ((1 - 2 beta)(2 - beta)).
/// Throws DomainError when p.epsilon == 0; see gamma_star_leading().
[[nodiscard]] double gamma_star(const Params& p);

/// Leading-order term 3 sqrt(2) sigma / alpha, the epsilon -> 0 limit.
[[nodiscard]] double gamma_star_leading(const Params& p);

/// Box [-m1_tilde - 1, beta2] of the admissible set.
struct BoxConstraint
{
    double beta2 = 1.01;
    double m1_tilde = 0.0;

    [[nodiscard]] double lower() const noexcept { return -m1_tilde - 1.0; }
    [[nodiscard]] double upper() const noexcept { return beta2; }
};

/// m1_tilde solves f_eps(-M) = beta2/gamma (unique positive root).
[[nodiscard]] BoxConstraint box_constraint(const Params& p, double beta2 = 1.01);

/// M2 = max over the box of -F_eps(xi)/xi^2, so F_eps(xi) >= -M2 xi^2 there.
[[nodiscard]] double quadratic_lower_bound(const Params& p, const BoxConstraint& box);

}  // namespace fhn
