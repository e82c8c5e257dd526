#include "fhn/epsilon_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "fhn/errors.hpp"
#include "fhn/nonlocal_operator.hpp"
#include "fhn/wave_speeds.hpp"

namespace fhn {

namespace {

void require_eps(const Params& p)
{
    validate(p);
    if (!(p.epsilon > 0.0))
        throw DomainError("the eps-level functional needs epsilon > 0");
}

// Symmetric tridiagonal LDL^T with diagonal d and off-diagonal e.
class Tridiagonal
{
  public:
    Tridiagonal(std::vector<double> diag, std::vector<double> off)
        : diag_(std::move(diag)), off_(std::move(off)), fd_(diag_.size()), fl_(off_.size())
    {
        fd_[0] = diag_[0];
        for (std::size_t i = 1; i < diag_.size(); ++i)
        {
            fl_[i - 1] = off_[i - 1] / fd_[i - 1];
            fd_[i] = diag_[i] - fl_[i - 1] * off_[i - 1];
        }
    }

    void solve(std::vector<double>& x) const
    {
        const std::size_t n = x.size();
        for (std::size_t i = 1; i < n; ++i)
            x[i] -= fl_[i - 1] * x[i - 1];
        for (std::size_t i = 0; i < n; ++i)
            x[i] /= fd_[i];
        for (std::size_t i = n - 1; i-- > 0;)
            x[i] -= fl_[i] * x[i + 1];
    }

    [[nodiscard]] double quad(const std::vector<double>& x) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += diag_[i] * x[i] * x[i];
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            s += 2.0 * off_[i] * x[i] * x[i + 1];
        return s;
    }

  private:
    std::vector<double> diag_;
    std::vector<double> off_;
    std::vector<double> fd_;
    std::vector<double> fl_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

// Discrete functional on a fixed grid at fixed (eps, c).
class Functional
{
  public:
    Functional(const Grid& grid, double c, const Params& p)
        : grid_(grid),
          p_(p),
          op_(grid, c, p.gamma),
          mass_(grid.exp_weights()),
          stiff_(grid.exp_cell_weights())
    {
        const double h2 = grid.h() * grid.h();
        for (double& k : stiff_)
            k /= h2;
    }

    [[nodiscard]] EnergyReport report(const std::vector<double>& w) const
    {
        EnergyReport r;
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
        {
            const double d = w[i + 1] - w[i];
            r.gradient += stiff_[i] * d * d;
        }
        r.gradient *= 0.5 * p_.epsilon;
        for (std::size_t i = 0; i < w.size(); ++i)
        {
            r.potential_F0_over_eps += mass_[i] * F0(w[i]);
            r.G_term += mass_[i] * G(w[i]);
        }
        r.potential_F0_over_eps /= p_.epsilon;
        r.G_term *= p_.alpha;
        r.nonlocal = 0.5 * p_.sigma * op_.bilinear(w, w);
        r.total = r.gradient + r.potential_F0_over_eps + r.G_term + r.nonlocal;
        return r;
    }

    [[nodiscard]] double value(const std::vector<double>& w) const { return report(w).total; }

    double value_and_gradient(const std::vector<double>& w, std::vector<double>& g) const
    {
        const std::size_t n = w.size();
        g.assign(n, 0.0);
        const double eps = p_.epsilon;
        double grad_e = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            const double d = w[i + 1] - w[i];
            grad_e += stiff_[i] * d * d;
            g[i] -= eps * stiff_[i] * d;
            g[i + 1] += eps * stiff_[i] * d;
        }
        double pot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            pot += mass_[i] * (F0(w[i]) / eps + p_.alpha * G(w[i]));
            g[i] += mass_[i] * (dF0(w[i]) / eps + p_.alpha * dG(w[i]));
        }
        std::vector<double> gn(n);
        const double nl = op_.quadratic_with_gradient(w, gn);
        for (std::size_t i = 0; i < n; ++i)
            g[i] += 0.5 * p_.sigma * gn[i];
        return 0.5 * eps * grad_e + pot + 0.5 * p_.sigma * nl;
    }

    // eps K + mu M, the quadratic part of the functional plus a shift.
    [[nodiscard]] Tridiagonal preconditioner(double mu) const
    {
        const std::size_t n = mass_.size();
        std::vector<double> d(n);
        std::vector<double> e(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            d[i] = mu * mass_[i];
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            const double k = p_.epsilon * stiff_[i];
            d[i] += k;
            d[i + 1] += k;
            e[i] = -k;
        }
        return {std::move(d), std::move(e)};
    }

    [[nodiscard]] const std::vector<double>& mass() const noexcept { return mass_; }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

  private:
    Grid grid_;
    Params p_;
    InhibitorOperator op_;
    std::vector<double> mass_;
    std::vector<double> stiff_;
};

// Clamp to the box, rescale to the unit sphere, repeat until both hold.
void project(std::vector<double>& w, const std::vector<double>& mass, const BoxConstraint& box)
{
    for (int pass = 0; pass < 50; ++pass)
    {
        for (double& v : w)
            v = std::clamp(v, box.lower(), box.upper());
        double n2 = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            n2 += mass[i] * w[i] * w[i];
        if (!(n2 > 0.0))
            throw DomainError("projection of a zero profile onto the sphere");
        const double s = 1.0 / std::sqrt(n2);
        bool inside = true;
        for (double& v : w)
        {
            v *= s;
            inside = inside && v >= box.lower() - 1e-13 && v <= box.upper() + 1e-13;
        }
        if (inside)
            return;
    }
    throw ConvergenceError("box and sphere projection did not settle");
}

}  // namespace

EnergyReport energy_I(const SampledFunction& w, double c, const Params& p)
{
    require_eps(p);
    const Functional f(w.grid, c, p);
    return f.report(w.values);
}

EnergyReport energy_I(const AdmissibleProfile& w, double c, const Params& p)
{
    return energy_I(w.w, c, p);
}

MinimizeResult minimize_I(double c, const Params& p, const AdmissibleProfile& init,
                          const MinimizeOptions& opt)
{
    require_eps(p);
    const Functional f(init.w.grid, c, p);
    const std::vector<double>& mass = f.mass();
    const BoxConstraint& box = init.box;
    const Tridiagonal prec = f.preconditioner(0.5 / p.epsilon);
    const std::size_t n = mass.size();

    std::vector<double> w = init.w.values;
    project(w, mass, box);
    std::vector<double> g;
    double value = f.value_and_gradient(w, g);

    // Tangential preconditioned direction d = -P^{-1}(g - lambda M w) with
    // lambda chosen so that d is M-orthogonal to w.
    std::vector<double> mw(n);
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> d(n);
    std::vector<double> r(n);
    auto direction = [&]() {
        for (std::size_t i = 0; i < n; ++i)
            mw[i] = mass[i] * w[i];
        a = g;
        prec.solve(a);
        b = mw;
        prec.solve(b);
        const double lambda = dot(mw, a) / dot(mw, b);
        for (std::size_t i = 0; i < n; ++i)
        {
            d[i] = -(a[i] - lambda * b[i]);
            r[i] = g[i] - lambda * mw[i];
        }
    };
    auto stationarity = [&]() {
        std::vector<double> s(w);
        for (std::size_t i = 0; i < n; ++i)
            s[i] += d[i];
        project(s, mass, box);
        for (std::size_t i = 0; i < n; ++i)
            s[i] -= w[i];
        return std::sqrt(std::max(0.0, prec.quad(s)));
    };

    direction();
    double measure = stationarity();
    double t = 1.0;
    std::vector<double> trial(n);
    std::vector<double> g_trial;
    std::vector<double> r_prev;
    std::vector<double> w_prev;
    int it = 0;
    while (measure >= opt.grad_tol && it < opt.max_iter)
    {
        bool accepted = false;
        double v_trial = 0.0;
        for (int bt = 0; bt < 60; ++bt)
        {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = w[i] + t * d[i];
            project(trial, mass, box);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                decrease += g[i] * (trial[i] - w[i]);
            v_trial = f.value_and_gradient(trial, g_trial);
            if (v_trial <= value + opt.armijo * decrease && decrease < 0.0)
            {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            break;

        ++it;
        w_prev = w;
        r_prev = r;
        w.swap(trial);
        g.swap(g_trial);
        value = v_trial;
        direction();
        measure = stationarity();

        // Barzilai-Borwein step in the preconditioner metric.
        std::vector<double> s(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            s[i] = w[i] - w_prev[i];
            sy += s[i] * (r[i] - r_prev[i]);
        }
        const double sps = prec.quad(s);
        t = sy > 0.0 ? sps / sy : 2.0 * t;
        t = std::clamp(t, 1e-6, 1e3);
    }

    AdmissibleProfile w_min = make_admissible(SampledFunction(f.grid(), std::move(w)), box);
    const EnergyReport report = f.report(w_min.w.values);
    return {std::move(w_min), report.total, report, it, measure, measure < opt.grad_tol};
}

LimitPrediction limit_prediction(const Params& p)
{
    const Regime reg = classify(p);
    const double inf = std::numeric_limits<double>::infinity();
    switch (reg.tag)
    {
        case RegimeKind::Front:
            return {RegimeKind::Front, front_speed(p).c_f, IntervalUnion({{-inf, 0.0}})};
        case RegimeKind::Pulse:
        {
            const PulseResult r = pulse_speed(p);
            return {RegimeKind::Pulse, r.c_p, IntervalUnion({{r.a, r.b}})};
        }
        case RegimeKind::Neither:
            break;
    }
    throw RegimeError("parameters are in neither the front nor the pulse regime");
}

Grid solver_grid(const IntervalUnion& e, double eps, const SolverOptions& opt)
{
    if (!(eps > 0.0) || !(opt.h_factor > 0.0))
        throw InvalidParameter("grid needs eps > 0 and h_factor > 0");
    return Grid::truncated_for(e.max_right(), eps / opt.h_factor, opt.right_margin);
}

SpeedEpsResult speed_eps(const Params& p, double c_lo, double c_hi, const SolverOptions& opt,
                         std::optional<AdmissibleProfile> init)
{
    require_eps(p);
    if (!(c_lo > 0.0))
        throw DomainError("speed bracket must lie in c > 0");
    if (!(c_hi > c_lo))
        throw InvalidParameter("speed bracket is degenerate (need c_lo < c_hi)");
    if (!init)
    {
        const LimitPrediction lim = limit_prediction(p);
        const Grid g = solver_grid(lim.set, p.epsilon, opt);
        init = build_recovery(lim.set, p.epsilon, g, box_constraint(p, opt.beta2));
    }

    int total_iterations = 0;
    int bisections = 0;
    bool converged = true;
    auto m = [&](double c, const AdmissibleProfile& start) {
        MinimizeResult r = minimize_I(c, p, start, opt.minimize);
        total_iterations += r.iterations;
        converged = converged && r.converged;
        return r;
    };
    auto finish = [&](double c, MinimizeResult r) {
        const double v = r.value;
        return SpeedEpsResult{c, v, std::move(r), bisections, total_iterations, converged};
    };

    MinimizeResult at_lo = m(c_lo, *init);
    if (std::abs(at_lo.value) < opt.m_tol)
        return finish(c_lo, std::move(at_lo));
    MinimizeResult at_hi = m(c_hi, at_lo.w_min);
    if (std::abs(at_hi.value) < opt.m_tol)
        return finish(c_hi, std::move(at_hi));
    if ((at_lo.value > 0.0) == (at_hi.value > 0.0))
    {
        std::ostringstream os;
        os.precision(10);
        os << "min I does not change sign on [" << c_lo << ", " << c_hi << "]: m(c_lo)=" << at_lo.value
           << ", m(c_hi)=" << at_hi.value;
        throw ConvergenceError(os.str());
    }

    const bool decreasing = at_lo.value > 0.0;
    double lo = c_lo;
    double hi = c_hi;
    MinimizeResult last = std::move(at_hi);
    double mid = 0.5 * (lo + hi);
    while (true)
    {
        mid = 0.5 * (lo + hi);
        MinimizeResult cur = m(mid, last.w_min);
        ++bisections;
        last = std::move(cur);
        if (std::abs(last.value) < opt.m_tol || hi - lo < opt.c_tol)
            break;
        ((last.value > 0.0) == decreasing ? lo : hi) = mid;
    }
    return finish(mid, std::move(last));
}

unsigned worker_count(unsigned requested, std::size_t tasks)
{
    unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FHN_GAMMA_THREADS"))
    {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0)
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(tasks, 1)));
    return std::max(1u, n);
}

std::vector<StudyRow> convergence_study(const std::vector<double>& eps_list, const Params& p,
                                        const StudyOptions& opt)
{
    validate(p);
    if (eps_list.empty())
        throw InvalidParameter("eps list is empty");
    const LimitPrediction lim = limit_prediction(p);
    for (double eps : eps_list)
    {
        Params q = p;
        q.epsilon = eps;
        require_eps(q);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<StudyRow> rows(eps_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < eps_list.size(); k = next++)
        {
            StudyRow row;
            row.eps = eps_list[k];
            Params q = p;
            q.epsilon = row.eps;
            try
            {
                const SpeedEpsResult r = speed_eps(q, opt.bracket_lo * lim.c_limit,
                                                   opt.bracket_hi * lim.c_limit, opt.solver);
                row.c_eps = r.c_eps;
                row.err_c = std::abs(r.c_eps - lim.c_limit);
                const SampledFunction chi = sample_indicator(lim.set, r.min.w_min.w.grid);
                std::vector<double> diff(chi.values);
                for (std::size_t i = 0; i < diff.size(); ++i)
                    diff[i] = r.min.w_min.w.values[i] - diff[i];
                row.err_u_l2e = weighted_norms(SampledFunction(chi.grid, std::move(diff))).l2e;
                row.energy = r.min.report;
                row.iters = r.total_iterations;
                if (!r.converged)
                    row.flag = "not_converged";
            }
            catch (const Error& e)
            {
                row.c_eps = row.err_c = row.err_u_l2e = nan;
                row.energy = {nan, nan, nan, nan, nan};
                row.flag = dynamic_cast<const ConvergenceError*>(&e) ? "no_root" : "error";
            }
            rows[k] = std::move(row);
        }
    };

    const unsigned nthreads = worker_count(opt.threads, eps_list.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();

    auto add_flag = [](std::string& f, const char* tag) {
        if (!f.empty())
            f += ';';
        f += tag;
    };
    for (std::size_t k = 1; k < rows.size(); ++k)
    {
        if (rows[k].err_c > rows[k - 1].err_c)
            add_flag(rows[k].flag, "err_c_increase");
        if (rows[k].err_u_l2e > rows[k - 1].err_u_l2e)
            add_flag(rows[k].flag, "err_u_increase");
    }
    return rows;
}

void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows)
{
    const auto old_prec = os.precision(17);
    os << "eps,c_eps,err_c,err_u_l2e,E_grad,E_F0,E_G,E_nonlocal,total,iters,flag\n";
    for (const StudyRow& r : rows)
    {
        os << r.eps << ',' << r.c_eps << ',' << r.err_c << ',' << r.err_u_l2e << ','
           << r.energy.gradient << ',' << r.energy.potential_F0_over_eps << ',' << r.energy.G_term << ','
           << r.energy.nonlocal << ',' << r.energy.total << ',' << r.iters << ',' << r.flag << '\n';
    }
    os.precision(old_prec);
}

}  // namespace fhn
