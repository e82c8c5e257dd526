#pragma once

#include <string>

#include "fhn/model.hpp"

namespace fhn {

struct FrontResult
{
    double c_f = 0.0;
    double h_star = 0.0;
    double residual = 0.0;  // |F(c_f)|
    bool strict = true;     // regime inequality holds strictly
};

/// Closed-form front speed c_f = 2 h* sqrt(gamma) / sqrt(1 - h*^2).
/// Throws RegimeError outside the front regime.
[[nodiscard]] FrontResult front_speed(const Params& p);

/// True iff sqrt(2) gamma / (6 sigma) >= H(c), i.e. the optimal width at
/// speed c is infinite.
[[nodiscard]] bool front_condition(double c, const Params& p);

/// Unique root L(c) of Q(., c). Throws RegimeError outside the pulse regime.
[[nodiscard]] double ell_of_c(double c, const Params& p);

struct PulseResiduals
{
    double J = 0.0;
    double dJ_dl = 0.0;
    double Q = 0.0;
};

struct PulseResult
{
    double c_p = 0.0;
    double ell_p = 0.0;
    double a = 0.0;
    double b = 0.0;
    PulseResiduals residuals;
    double d_ell2 = 0.0;  // second ell-derivative of script_J at the solution
    int outer_iterations = 0;
};

struct PulseOptions
{
    // Initial speed bracket; c_hi <= 0 means "double from 1 until the sign
    // flips". Brackets must lie in c > 0.
    double c_lo = 1e-3;
    double c_hi = 0.0;
    double outer_tol = 1e-10;
};

/// Speed c_p and width ell_p of the limit pulse, solving J(L(c), c) = 0 by
/// bisection on c followed by Newton polishing.
[[nodiscard]] PulseResult pulse_speed(const Params& p, const PulseOptions& opt = {});

/// JSON record {regime, c, ell, a, b, residuals, ...}; infinite values are
/// written as the strings "inf" / "-inf".
[[nodiscard]] std::string to_json(const FrontResult& r, const Params& p);
[[nodiscard]] std::string to_json(const PulseResult& r, const Params& p);

}  // namespace fhn
