#include "fhn/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>
#include <tuple>

#include "CLI11.hpp"
#include "json.hpp"

#include "fhn/errors.hpp"
#include "fhn/limit_energy.hpp"
#include "fhn/nonlocal_operator.hpp"
#include "fhn/svg_plot.hpp"
#include "fhn/wave_speeds.hpp"
#include "fhn/weighted_space.hpp"

namespace fhn::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double out = 0.0;
    try
    {
        out = std::stod(v, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || trim(v.substr(used)) != "")
        throw InvalidParameter("setting '" + key + "' expects a number, got '" + v + "'");
    return out;
}

long to_long(const std::string& key, const std::string& v)
{
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9)
        throw InvalidParameter("setting '" + key + "' expects an integer, got '" + v + "'");
    return static_cast<long>(d);
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(key, trim(item)));
    if (out.empty())
        throw InvalidParameter("setting '" + key + "' expects a comma-separated list");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters()
{
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"alpha", [](RunConfig& c, auto& k, auto& v) { c.params.alpha = to_double(k, v); c.has_alpha = true; }},
        {"gamma", [](RunConfig& c, auto& k, auto& v) { c.params.gamma = to_double(k, v); c.has_gamma = true; }},
        {"sigma", [](RunConfig& c, auto& k, auto& v) { c.params.sigma = to_double(k, v); c.has_sigma = true; }},
        {"epsilon", [](RunConfig& c, auto& k, auto& v) { c.params.epsilon = to_double(k, v); }},
        {"c", [](RunConfig& c, auto& k, auto& v) { c.c = to_double(k, v); c.has_c = true; }},
        {"c_lo", [](RunConfig& c, auto& k, auto& v) { c.c_lo = to_double(k, v); }},
        {"c_hi", [](RunConfig& c, auto& k, auto& v) { c.c_hi = to_double(k, v); }},
        {"ell_grid", [](RunConfig& c, auto&, auto& v) { c.ell_grid = v; }},
        {"eps_list", [](RunConfig& c, auto& k, auto& v) { c.eps_list = to_list(k, v); }},
        {"h_factor", [](RunConfig& c, auto& k, auto& v) { c.solver.h_factor = to_double(k, v); }},
        {"right_margin", [](RunConfig& c, auto& k, auto& v) { c.solver.right_margin = to_double(k, v); }},
        {"m_tol", [](RunConfig& c, auto& k, auto& v) { c.solver.m_tol = to_double(k, v); }},
        {"c_tol", [](RunConfig& c, auto& k, auto& v) { c.solver.c_tol = to_double(k, v); }},
        {"beta2", [](RunConfig& c, auto& k, auto& v) { c.solver.beta2 = to_double(k, v); }},
        {"grad_tol", [](RunConfig& c, auto& k, auto& v) { c.solver.minimize.grad_tol = to_double(k, v); }},
        {"max_iter", [](RunConfig& c, auto& k, auto& v) { c.solver.minimize.max_iter = static_cast<int>(to_long(k, v)); }},
        {"bracket_lo", [](RunConfig& c, auto& k, auto& v) { c.bracket_lo = to_double(k, v); }},
        {"bracket_hi", [](RunConfig& c, auto& k, auto& v) { c.bracket_hi = to_double(k, v); }},
        {"threads", [](RunConfig& c, auto& k, auto& v) {
             const long n = to_long(k, v);
             if (n < 0)
                 throw InvalidParameter("threads must be non-negative");
             c.threads = static_cast<unsigned>(n);
         }},
        {"output", [](RunConfig& c, auto&, auto& v) { c.output = v; }},
        {"svg", [](RunConfig& c, auto&, auto& v) { c.svg = v; }},
        {"input", [](RunConfig& c, auto&, auto& v) { c.input = v; }},
        {"set", [](RunConfig& c, auto&, auto& v) { c.set = v; }},
        {"alpha_range", [](RunConfig& c, auto&, auto& v) { c.alpha_range = v; }},
        {"gamma_range", [](RunConfig& c, auto&, auto& v) { c.gamma_range = v; }},
        {"sigma_range", [](RunConfig& c, auto&, auto& v) { c.sigma_range = v; }},
    };
    return table;
}

std::string flag_name(const std::string& key)
{
    std::string f = "--" + key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

void require_physical(const RunConfig& cfg)
{
    if (!cfg.has_alpha || !cfg.has_gamma || !cfg.has_sigma)
        throw InvalidParameter("alpha, gamma and sigma are required");
    validate(cfg.params);
}

// Writes to cfg.output when set, else to `fallback`.
template<class F>
void emit(const RunConfig& cfg, std::ostream& fallback, F&& body)
{
    if (cfg.output.empty())
    {
        body(fallback);
        return;
    }
    std::ofstream f(cfg.output);
    if (!f)
        throw IoError("cannot open " + cfg.output + " for writing");
    body(f);
    if (!f)
        throw IoError("failed writing " + cfg.output);
}

SampledFunction read_profile(const std::string& path)
{
    if (path.empty())
        throw InvalidParameter("--input profile CSV is required");
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    return read_csv(in);
}

IntervalUnion target_set(const RunConfig& cfg)
{
    if (!cfg.set.empty())
        return interval_union_from_json(cfg.set);
    return limit_prediction(cfg.params).set;
}

void write_profile_csv(const RunConfig& cfg, const SampledFunction& f, std::ostream& out)
{
    emit(cfg, out, [&](std::ostream& os) { write_csv(os, f); });
}

PlotSeries series_of(const std::string& label, const SampledFunction& f)
{
    PlotSeries s{label, {}, f.values};
    s.x.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        s.x.push_back(f.grid.x(i));
    return s;
}

// Restrict a profile plot to the window where something happens.
std::vector<PlotSeries> windowed(std::vector<PlotSeries> series, double lo, double hi)
{
    for (PlotSeries& s : series)
    {
        PlotSeries t{s.label, {}, {}};
        for (std::size_t i = 0; i < s.x.size(); ++i)
        {
            if (s.x[i] >= lo && s.x[i] <= hi)
            {
                t.x.push_back(s.x[i]);
                t.y.push_back(s.y[i]);
            }
        }
        s = std::move(t);
    }
    return series;
}

std::vector<PlotSeries> profile_plot(const AdmissibleProfile& w, const IntervalUnion& e)
{
    const SampledFunction chi = sample_indicator(e, w.w.grid);
    const double hi = e.max_right() + 2.0;
    const auto& ivs = e.intervals();
    const double lo = std::isfinite(ivs.back().a) ? ivs.back().a - 2.0 : e.max_right() - 4.0;
    return windowed({series_of("u_eps", w.w), series_of("limit indicator", chi)}, lo, hi);
}

nlohmann::ordered_json energy_json(const EnergyReport& r)
{
    return {{"gradient", r.gradient},
            {"F0_over_eps", r.potential_F0_over_eps},
            {"G", r.G_term},
            {"nonlocal", r.nonlocal},
            {"total", r.total}};
}

int cmd_classify(const RunConfig& cfg, std::ostream& out)
{
    require_physical(cfg);
    const Regime r = classify(cfg.params);
    nlohmann::ordered_json j;
    j["regime"] = to_string(r.tag);
    j["strict"] = r.strict;
    j["alpha"] = cfg.params.alpha;
    j["gamma"] = cfg.params.gamma;
    j["sigma"] = cfg.params.sigma;
    j["threshold"] = 3.0 * kSqrt2 * cfg.params.sigma / cfg.params.gamma;
    j["gamma_star_leading"] = gamma_star_leading(cfg.params);
    if (cfg.params.epsilon > 0.0)
    {
        j["epsilon"] = cfg.params.epsilon;
        j["gamma_star"] = gamma_star(cfg.params);
    }
    out << j.dump() << '\n';
    return 0;
}

int cmd_front(const RunConfig& cfg, std::ostream& out)
{
    require_physical(cfg);
    const FrontResult r = front_speed(cfg.params);
    emit(cfg, out, [&](std::ostream& os) { os << to_json(r, cfg.params) << '\n'; });
    return 0;
}

int cmd_pulse(const RunConfig& cfg, std::ostream& out)
{
    require_physical(cfg);
    PulseOptions opt;
    if (cfg.c_lo > 0.0)
        opt.c_lo = cfg.c_lo;
    opt.c_hi = cfg.c_hi;
    const PulseResult r = pulse_speed(cfg.params, opt);
    emit(cfg, out, [&](std::ostream& os) { os << to_json(r, cfg.params) << '\n'; });
    return 0;
}

int cmd_limit_energy(const RunConfig& cfg, std::ostream& out)
{
    require_physical(cfg);
    if (!cfg.has_c)
        throw InvalidParameter("--c is required");
    if (!cfg.set.empty())
    {
        const LimitEnergyBreakdown b = jstar(interval_union_from_json(cfg.set), cfg.c, cfg.params);
        nlohmann::ordered_json j{{"c", cfg.c},
                                 {"perimeter", b.perimeter_term},
                                 {"area", b.area_term},
                                 {"nonlocal", b.nonlocal_term},
                                 {"total", b.total}};
        emit(cfg, out, [&](std::ostream& os) { os << j.dump() << '\n'; });
        return 0;
    }
    const std::vector<double> ells = parse_range(cfg.ell_grid);
    PlotSeries js{"J(ell, c)", {}, {}};
    emit(cfg, out, [&](std::ostream& os) {
        os.precision(17);
        os << "ell,J,dJ_dl,d2J_dl2,dJ_dc,Q,K,J_normalized\n";
        for (double ell : ells)
        {
            const ScriptJ j = script_J(ell, cfg.c, cfg.params);
            const double q = Q_of(ell, cfg.c, cfg.params).value;
            const double k = K_of(ell, cfg.c, cfg.params);
            os << ell << ',' << j.value << ',' << j.d_ell << ',' << j.d_ell2 << ',' << j.d_c << ',' << q << ','
               << k << ',' << j.value / -std::expm1(-ell) << '\n';
            js.x.push_back(ell);
            js.y.push_back(j.value);
        }
    });
    if (!cfg.svg.empty())
    {
        std::ostringstream title;
        title << "J(ell, c) at c = " << cfg.c;
        write_svg(cfg.svg, {js}, {title.str(), "ell", "J"});
    }
    return 0;
}

int cmd_lc_apply(const RunConfig& cfg, std::ostream& out)
{
    if (!cfg.has_gamma)
        throw InvalidParameter("--gamma is required");
    if (!cfg.has_c)
        throw InvalidParameter("--c is required");
    const SampledFunction f = read_profile(cfg.input);
    const SampledFunction v = lc_solve_fd(f, cfg.c, cfg.params.gamma);
    write_profile_csv(cfg, v, out);
    if (!cfg.svg.empty())
        write_svg(cfg.svg, {series_of("input", f), series_of("L_c input", v)}, {"Inhibitor response", "x", "value"});
    return 0;
}

AdmissibleProfile recovery_for(const RunConfig& cfg, const IntervalUnion& e)
{
    const Grid g = solver_grid(e, cfg.params.epsilon, cfg.solver);
    return build_recovery(e, cfg.params.epsilon, g, box_constraint(cfg.params, cfg.solver.beta2));
}

void require_eps(const RunConfig& cfg)
{
    require_physical(cfg);
    if (!(cfg.params.epsilon > 0.0))
        throw InvalidParameter("--epsilon > 0 is required");
}

int cmd_recovery(const RunConfig& cfg, std::ostream& out)
{
    require_eps(cfg);
    const IntervalUnion e = target_set(cfg);
    const AdmissibleProfile w = recovery_for(cfg, e);
    write_profile_csv(cfg, w.w, out);
    if (!cfg.svg.empty())
        write_svg(cfg.svg, profile_plot(w, e), {"Recovery profile", "x", "w"});
    return 0;
}

AdmissibleProfile initial_profile(const RunConfig& cfg, const IntervalUnion& e)
{
    if (cfg.input.empty())
        return recovery_for(cfg, e);
    SampledFunction f = read_profile(cfg.input);
    const double n = weighted_norms(f).l2e;
    if (!(n > 0.0))
        throw InvalidParameter("initial profile has zero L2_e norm");
    for (double& v : f.values)
        v /= n;
    return make_admissible(std::move(f), box_constraint(cfg.params, cfg.solver.beta2));
}

int cmd_minimize(const RunConfig& cfg, std::ostream& out)
{
    require_eps(cfg);
    if (!cfg.has_c)
        throw InvalidParameter("--c is required");
    const IntervalUnion e = target_set(cfg);
    const AdmissibleProfile init = initial_profile(cfg, e);
    const MinimizeResult r = minimize_I(cfg.c, cfg.params, init, cfg.solver.minimize);
    nlohmann::ordered_json j{{"c", cfg.c},
                             {"epsilon", cfg.params.epsilon},
                             {"value", r.value},
                             {"initial_value", energy_I(init, cfg.c, cfg.params).total},
                             {"energy", energy_json(r.report)},
                             {"iterations", r.iterations},
                             {"stationarity", r.stationarity},
                             {"converged", r.converged}};
    out << j.dump() << '\n';
    if (!cfg.output.empty())
        write_profile_csv(cfg, r.w_min.w, out);
    if (!cfg.svg.empty())
        write_svg(cfg.svg, profile_plot(r.w_min, e), {"Constrained minimizer", "x", "w"});
    return r.converged ? 0 : 3;
}

int cmd_speed_eps(const RunConfig& cfg, std::ostream& out)
{
    require_eps(cfg);
    const LimitPrediction lim = limit_prediction(cfg.params);
    const IntervalUnion e = cfg.set.empty() ? lim.set : interval_union_from_json(cfg.set);
    const double lo = cfg.c_lo > 0.0 ? cfg.c_lo : cfg.bracket_lo * lim.c_limit;
    const double hi = cfg.c_hi > 0.0 ? cfg.c_hi : cfg.bracket_hi * lim.c_limit;
    const SpeedEpsResult r = speed_eps(cfg.params, lo, hi, cfg.solver, initial_profile(cfg, e));

    const SampledFunction chi = sample_indicator(lim.set, r.min.w_min.w.grid);
    std::vector<double> diff(chi.values);
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = r.min.w_min.w.values[i] - diff[i];
    const double err_u = weighted_norms(SampledFunction(chi.grid, std::move(diff))).l2e;

    nlohmann::ordered_json j{{"epsilon", cfg.params.epsilon},
                             {"regime", to_string(lim.regime)},
                             {"c_eps", r.c_eps},
                             {"m", r.m_value},
                             {"c_limit", lim.c_limit},
                             {"err_c", std::abs(r.c_eps - lim.c_limit)},
                             {"err_u_l2e", err_u},
                             {"energy", energy_json(r.min.report)},
                             {"bisections", r.bisections},
                             {"iterations", r.total_iterations},
                             {"converged", r.converged}};
    out << j.dump() << '\n';
    if (!cfg.output.empty())
        write_profile_csv(cfg, r.min.w_min.w, out);
    if (!cfg.svg.empty())
        write_svg(cfg.svg, profile_plot(r.min.w_min, lim.set), {"Profile at c_eps", "x", "w"});
    return r.converged ? 0 : 3;
}

int cmd_study(const RunConfig& cfg, std::ostream& out)
{
    require_physical(cfg);
    StudyOptions opt;
    opt.solver = cfg.solver;
    opt.bracket_lo = cfg.bracket_lo;
    opt.bracket_hi = cfg.bracket_hi;
    opt.threads = cfg.threads;
    const std::vector<StudyRow> rows = convergence_study(cfg.eps_list, cfg.params, opt);
    emit(cfg, out, [&](std::ostream& os) { write_study_csv(os, rows); });
    if (!cfg.svg.empty())
    {
        PlotSeries ec{"|c_eps - c_limit|", {}, {}};
        PlotSeries eu{"||u_eps - chi_E||", {}, {}};
        for (const StudyRow& r : rows)
        {
            ec.x.push_back(r.eps);
            ec.y.push_back(r.err_c);
            eu.x.push_back(r.eps);
            eu.y.push_back(r.err_u_l2e);
        }
        PlotSpec spec{"Convergence toward the limit", "eps", "error"};
        spec.log_x = spec.log_y = true;
        write_svg(cfg.svg, {ec, eu}, spec);
    }
    return 0;
}

struct SweepRow
{
    double alpha = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    std::string regime;
    bool strict = true;
    double c = kNaN;
    double ell = kNaN;
    double a = kNaN;
    double b = kNaN;
    double h_star = kNaN;
    std::string note;
};

SweepRow sweep_point(double alpha, double gamma, double sigma)
{
    SweepRow row;
    row.alpha = alpha;
    row.gamma = gamma;
    row.sigma = sigma;
    row.regime = "invalid";
    try
    {
        const Params p = make_params(alpha, gamma, sigma);
        const Regime reg = classify(p);
        row.regime = to_string(reg.tag);
        row.strict = reg.strict;
        if (reg.tag == RegimeKind::Front)
        {
            const FrontResult r = front_speed(p);
            row.c = r.c_f;
            row.ell = std::numeric_limits<double>::infinity();
            row.a = -std::numeric_limits<double>::infinity();
            row.b = 0.0;
            row.h_star = r.h_star;
        }
        else if (reg.tag == RegimeKind::Pulse)
        {
            const PulseResult r = pulse_speed(p);
            row.c = r.c_p;
            row.ell = r.ell_p;
            row.a = r.a;
            row.b = r.b;
        }
    }
    catch (const ConvergenceError& e)
    {
        row.note = "no_convergence";
    }
    catch (const Error& e)
    {
        row.note = "invalid";
    }
    return row;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out)
{
    auto axis = [](const std::string& range, bool has, double value, const char* name) {
        if (!range.empty())
            return parse_range(range);
        if (!has)
            throw InvalidParameter(std::string("sweep needs --") + name + " or --" + name + "-range");
        return std::vector<double>{value};
    };
    const std::vector<double> as = axis(cfg.alpha_range, cfg.has_alpha, cfg.params.alpha, "alpha");
    const std::vector<double> gs = axis(cfg.gamma_range, cfg.has_gamma, cfg.params.gamma, "gamma");
    const std::vector<double> ss = axis(cfg.sigma_range, cfg.has_sigma, cfg.params.sigma, "sigma");

    struct Point
    {
        double a, g, s;
    };
    std::vector<Point> points;
    for (double a : as)
        for (double g : gs)
            for (double s : ss)
                points.push_back({a, g, s});
    std::sort(points.begin(), points.end(), [](const Point& l, const Point& r) {
        return std::tie(l.a, l.g, l.s) < std::tie(r.a, r.g, r.s);
    });

    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < points.size(); k = next++)
            rows[k] = sweep_point(points[k].a, points[k].g, points[k].s);
    };
    const unsigned n = worker_count(cfg.threads, points.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    emit(cfg, out, [&](std::ostream& os) {
        os.precision(17);
        os << "alpha,gamma,sigma,regime,strict,c,ell,a,b,h_star,note\n";
        for (const SweepRow& r : rows)
        {
            os << r.alpha << ',' << r.gamma << ',' << r.sigma << ',' << r.regime << ',' << (r.strict ? 1 : 0)
               << ',' << r.c << ',' << r.ell << ',' << r.a << ',' << r.b << ',' << r.h_star << ',' << r.note
               << '\n';
        }
    });

    if (!cfg.svg.empty())
    {
        // Speed against the first swept parameter, one curve per combination
        // of the others.
        const int which = as.size() > 1 ? 0 : (gs.size() > 1 ? 1 : 2);
        const char* names[] = {"alpha", "gamma", "sigma"};
        std::vector<PlotSeries> series;
        for (const SweepRow& r : rows)
        {
            const double key[] = {r.alpha, r.gamma, r.sigma};
            std::ostringstream label;
            for (int i = 0; i < 3; ++i)
                if (i != which)
                    label << names[i] << '=' << key[i] << ' ';
            const std::string lbl = trim(label.str());
            auto it = std::find_if(series.begin(), series.end(), [&](const PlotSeries& s) { return s.label == lbl; });
            if (it == series.end())
            {
                series.push_back({lbl, {}, {}});
                it = series.end() - 1;
            }
            it->x.push_back(key[which]);
            it->y.push_back(r.c);
        }
        write_svg(cfg.svg, series, {"Limit wave speed", names[which], "c"});
    }
    return 0;
}

int exit_code(const std::exception& e)
{
    if (dynamic_cast<const IoError*>(&e))
        return 4;
    if (dynamic_cast<const ConvergenceError*>(&e))
        return 3;
    return 2;
}

}  // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, setter] : setters())
            k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    for (const auto& [name, setter] : setters())
    {
        if (name == key)
        {
            setter(cfg, key, value);
            return;
        }
    }
    throw InvalidParameter("unknown configuration key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> out;
    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{')
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(body);
        }
        catch (const nlohmann::json::exception& e)
        {
            throw InvalidParameter(std::string("malformed JSON config: ") + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            std::string value;
            if (it->is_string())
                value = it->get<std::string>();
            else if (it->is_array())
            {
                for (const auto& item : *it)
                {
                    if (!value.empty())
                        value += ',';
                    value += item.is_string() ? item.get<std::string>() : item.dump();
                }
            }
            else
                value = it->dump();
            out.emplace_back(it.key(), value);
        }
    }
    else
    {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t.front() == '#')
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw InvalidParameter("config line " + std::to_string(lineno) + " is not key=value");
            out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        }
    }
    for (const auto& [key, value] : out)
    {
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw InvalidParameter("unknown configuration key '" + key + "'");
    }
    return out;
}

std::vector<double> parse_range(const std::string& spec)
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(trim(item));
    if (parts.size() != 3)
        throw InvalidParameter("range '" + spec + "' is not lo:hi:n");
    const double lo = to_double("range", parts[0]);
    const double hi = to_double("range", parts[1]);
    const long n = to_long("range", parts[2]);
    if (n < 1 || n > 10000000)
        throw InvalidParameter("range point count must be in [1, 1e7]");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Traveling-wave speeds of the FitzHugh-Nagumo system from its sharp-interface energy"};
    app.name("fhn-gamma");
    app.require_subcommand(1);
    app.fallthrough();

    std::vector<std::pair<std::string, std::string>> flag_values;
    std::vector<std::pair<std::string, CLI::Option*>> flag_opts;
    static const std::vector<std::pair<std::string, std::string>> help = {
        {"alpha", "activator nonlinearity coupling alpha > 0"},
        {"gamma", "inhibitor decay gamma > 0"},
        {"sigma", "inhibitor coupling sigma > 0"},
        {"epsilon", "interface width epsilon >= 0"},
        {"c", "wave speed"},
        {"c_lo", "lower speed bracket"},
        {"c_hi", "upper speed bracket"},
        {"ell_grid", "interval widths lo:hi:n"},
        {"eps_list", "comma-separated epsilon ladder"},
        {"h_factor", "grid spacing epsilon/h_factor"},
        {"right_margin", "grid extent past the rightmost jump"},
        {"m_tol", "speed search stops when |min I| is below this"},
        {"c_tol", "speed search stops when the bracket is this narrow"},
        {"beta2", "upper bound of the admissible box"},
        {"grad_tol", "minimizer stationarity tolerance"},
        {"max_iter", "minimizer iteration cap"},
        {"bracket_lo", "lower speed bracket as a multiple of the limit speed"},
        {"bracket_hi", "upper speed bracket as a multiple of the limit speed"},
        {"threads", "worker threads (0: all cores, capped by FHN_GAMMA_THREADS)"},
        {"output", "output file (default stdout)"},
        {"svg", "also render an SVG plot to this file"},
        {"input", "input profile CSV (x,value)"},
        {"set", "interval union as JSON, e.g. [[\"-inf\",0]]"},
        {"alpha_range", "sweep range lo:hi:n"},
        {"gamma_range", "sweep range lo:hi:n"},
        {"sigma_range", "sweep range lo:hi:n"},
    };
    flag_values.reserve(help.size());
    for (const auto& [key, text] : help)
    {
        flag_values.emplace_back(key, std::string{});
        flag_opts.emplace_back(key, app.add_option(flag_name(key), flag_values.back().second, text));
    }
    std::string config_path;
    app.add_option("--config", config_path, "key=value or JSON configuration file");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"classify", "report the wave regime of (alpha, gamma, sigma)"},
        {"front-speed", "closed-form limit front speed"},
        {"pulse-speed", "limit pulse speed and width"},
        {"limit-energy", "tabulate J(ell, c) over --ell-grid, or J* of --set"},
        {"lc-apply", "apply the inhibitor solution operator to a profile CSV"},
        {"recovery", "smoothed indicator of the limit set at --epsilon"},
        {"minimize", "minimize the epsilon-level energy at speed --c"},
        {"speed-eps", "epsilon-level speed by bisection on the minimum energy"},
        {"study", "convergence table over --eps-list"},
        {"sweep", "limit speeds over a parameter grid"},
    };
    for (const auto& [name, text] : commands)
        app.add_subcommand(name, text);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return 0;
    }
    catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() == 0)
        {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try
    {
        RunConfig cfg;
        if (!config_path.empty())
        {
            std::ifstream in(config_path);
            if (!in)
                throw IoError("cannot open config file " + config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            for (const auto& [key, value] : parse_config_text(buf.str()))
                apply_setting(cfg, key, value);
        }
        for (std::size_t i = 0; i < flag_opts.size(); ++i)
            if (flag_opts[i].second->count() > 0)
                apply_setting(cfg, flag_values[i].first, flag_values[i].second);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "classify")
            return cmd_classify(cfg, out);
        if (sub == "front-speed")
            return cmd_front(cfg, out);
        if (sub == "pulse-speed")
            return cmd_pulse(cfg, out);
        if (sub == "limit-energy")
            return cmd_limit_energy(cfg, out);
        if (sub == "lc-apply")
            return cmd_lc_apply(cfg, out);
        if (sub == "recovery")
            return cmd_recovery(cfg, out);
        if (sub == "minimize")
            return cmd_minimize(cfg, out);
        if (sub == "speed-eps")
            return cmd_speed_eps(cfg, out);
        if (sub == "study")
            return cmd_study(cfg, out);
        return cmd_sweep(cfg, out);
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace fhn::cli
