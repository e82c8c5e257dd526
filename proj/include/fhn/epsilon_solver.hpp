#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fhn/model.hpp"
#include "fhn/weighted_space.hpp"

namespace fhn {

/// Heteroclinic-like transition layer U with eps^2 U'^2 / 2 - F0(U) = eps/2,
/// U(0) = 0, rising to U(rho) = 1.
///
/// U is tabulated through its inverse x(U) = int_0^U eps / sqrt(eps + 2 F0)
/// and evaluated by cubic Hermite interpolation in x.
class RecoveryProfile
{
  public:
    explicit RecoveryProfile(double eps, std::size_t knots = 4097);

    [[nodiscard]] double eps() const noexcept { return eps_; }
    [[nodiscard]] double rho() const noexcept { return rho_; }

    /// Increasing layer, clamped to 0 for x <= 0 and 1 for x >= rho.
    [[nodiscard]] double U(double x) const;
    [[nodiscard]] double dU(double x) const;
    /// Decreasing layer U(rho - x).
    [[nodiscard]] double U_tilde(double x) const;

    [[nodiscard]] const std::vector<double>& knots_x() const noexcept { return x_; }
    [[nodiscard]] const std::vector<double>& knots_u() const noexcept { return u_; }

  private:
    double eps_;
    double rho_;
    std::vector<double> x_;
    std::vector<double> u_;
    std::vector<double> du_;
};

[[nodiscard]] RecoveryProfile recovery_profile(double eps);

struct AdmissibleProfile
{
    SampledFunction w;
    double l2e_norm = 0.0;
    BoxConstraint box;
    double theta = 0.0;  // layer offset used by build_recovery, if any
};

/// Checks the unit-norm and box invariants; throws DomainError otherwise.
[[nodiscard]] AdmissibleProfile make_admissible(SampledFunction w, const BoxConstraint& box);

/// Smoothed indicator of a normalized union: every jump is replaced by a
/// transition layer, all shifted by one global offset theta in [0, 1] that
/// is root-found so the discrete L^2_e norm is 1.
/// Throws DomainError when two jumps are closer than 2 sqrt(eps).
[[nodiscard]] AdmissibleProfile build_recovery(const IntervalUnion& e, double eps, const Grid& grid,
                                               const BoxConstraint& box);
[[nodiscard]] AdmissibleProfile build_recovery(const IntervalUnion& e, const Params& p,
                                               const Grid& grid);

struct EnergyReport
{
    double gradient = 0.0;
    double potential_F0_over_eps = 0.0;
    double G_term = 0.0;
    double nonlocal = 0.0;
    double total = 0.0;
};

/// int e^x { eps w'^2/2 + F0(w)/eps + alpha G(w) + (sigma/2) w L_c w } dx
/// on the profile's grid. Any sampled function is accepted.
[[nodiscard]] EnergyReport energy_I(const SampledFunction& w, double c, const Params& p);
[[nodiscard]] EnergyReport energy_I(const AdmissibleProfile& w, double c, const Params& p);

struct MinimizeOptions
{
    double grad_tol = 1e-6;
    int max_iter = 10000;
    double armijo = 1e-4;
};

struct MinimizeResult
{
    AdmissibleProfile w_min;
    double value = 0.0;
    EnergyReport report;
    int iterations = 0;
    double stationarity = 0.0;
    bool converged = false;
};

/// Projected gradient descent on {int e^x w^2 = 1} intersected with the box,
/// preconditioned by eps K + mu M (K the weighted stiffness, M the weighted
/// mass). Returns the best iterate with converged = false at the iteration
/// cap.
[[nodiscard]] MinimizeResult minimize_I(double c, const Params& p, const AdmissibleProfile& init,
                                        const MinimizeOptions& opt = {});

struct SolverOptions
{
    double h_factor = 8.0;       // grid spacing eps / h_factor
    double right_margin = 10.0;  // grid extends this far past the rightmost jump
    double m_tol = 5e-4;         // stop when |m(c)| falls below
    double c_tol = 1e-6;         // or when the speed bracket is this narrow
    double beta2 = 1.01;
    MinimizeOptions minimize;
};

struct SpeedEpsResult
{
    double c_eps = 0.0;
    double m_value = 0.0;  // min of I at c_eps
    MinimizeResult min;
    int bisections = 0;
    int total_iterations = 0;
    bool converged = true;  // every inner minimization converged
};

/// Limit set used to seed and judge the eps-level solve: (-inf, 0] for
/// fronts, the normalized pulse interval for pulses.
struct LimitPrediction
{
    RegimeKind regime = RegimeKind::Neither;
    double c_limit = 0.0;
    IntervalUnion set;
};

[[nodiscard]] LimitPrediction limit_prediction(const Params& p);

/// Grid used for an eps-level solve of the given limit set.
[[nodiscard]] Grid solver_grid(const IntervalUnion& e, double eps, const SolverOptions& opt = {});

/// Bisection on c for a sign change of m(c) = min_Y I_{eps,c}, warm-starting
/// each minimization from the previous minimizer. `init` defaults to the
/// recovery profile of the limit set.
[[nodiscard]] SpeedEpsResult speed_eps(const Params& p, double c_lo, double c_hi,
                                       const SolverOptions& opt = {},
                                       std::optional<AdmissibleProfile> init = std::nullopt);

struct StudyRow
{
    double eps = 0.0;
    double c_eps = 0.0;
    double err_c = 0.0;
    double err_u_l2e = 0.0;
    EnergyReport energy;
    int iters = 0;
    std::string flag;  // empty, or ';'-separated diagnostics
};

struct StudyOptions
{
    SolverOptions solver;
    // Speed bracket as multiples of the limit speed.
    double bracket_lo = 0.1;
    double bracket_hi = 2.0;
    unsigned threads = 0;  // 0: hardware concurrency, capped by FHN_GAMMA_THREADS
};

/// One speed_eps solve per eps (in parallel), compared with the limit
/// prediction. Rows keep the order of eps_list; error columns that increase
/// from one row to the next are flagged.
[[nodiscard]] std::vector<StudyRow> convergence_study(const std::vector<double>& eps_list,
                                                     const Params& p, const StudyOptions& opt = {});

void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows);

/// Worker count honoring FHN_GAMMA_THREADS.
[[nodiscard]] unsigned worker_count(unsigned requested, std::size_t tasks);

}  // namespace fhn
