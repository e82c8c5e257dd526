#pragma once

#include "fhn/model.hpp"
#include "fhn/weighted_space.hpp"

namespace fhn {

struct HValue
{
    double value;       // c / sqrt(c^2 + 4 gamma)
    double derivative;  // 4 gamma / (c^2 + 4 gamma)^{3/2}
};

[[nodiscard]] HValue H_of_c(double c, double gamma);

/// Energy of a normalized interval of width ell at speed c, and its partials.
struct ScriptJ
{
    double value;
    double d_ell;
    double d_ell2;
    double d_c;
};

/// ell may be +infinity, in which case the value is F(c) and the ell
/// derivatives vanish.
[[nodiscard]] ScriptJ script_J(double ell, double c, const Params& p);

struct FValue
{
    double value;
    double derivative;
};

/// Limit of script_J as ell -> infinity; its zero is the front speed.
[[nodiscard]] FValue F_of_c(double c, const Params& p);

struct QValue
{
    double value;  // +infinity as ell -> 0+
    double d_ell;  // always negative
    double d_c;    // always positive
};

/// Combination of the two pulse optimality conditions whose ell-root is L(c).
[[nodiscard]] QValue Q_of(double ell, double c, const Params& p);

/// -1 - e^{-ell} + 2 e^{r1 ell} + (ell/H) e^{r1 ell}; a Taylor series is used
/// for small |r1| ell to avoid cancellation.
[[nodiscard]] double K_of(double ell, double c, const Params& p);

struct LimitEnergyBreakdown
{
    double perimeter_term = 0.0;
    double area_term = 0.0;
    double nonlocal_term = 0.0;
    double total = 0.0;
};

struct JstarOptions
{
    // Grid spacing of the finite-difference path used for unions. The
    // nonlocal term is Richardson-extrapolated from h and h/2.
    double h = 2e-3;
};

/// Geometric limit functional of a union of intervals at speed c.
/// Single intervals use closed forms; unions solve the inhibitor equation
/// numerically.
[[nodiscard]] LimitEnergyBreakdown jstar(const IntervalUnion& e, double c, const Params& p,
                                         const JstarOptions& opt = {});

}  // namespace fhn
