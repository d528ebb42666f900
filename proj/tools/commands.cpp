#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hpz/error.hpp"
#include "hpz/evolution.hpp"
#include "hpz/fluctuations.hpp"
#include "hpz/green.hpp"
#include "hpz/oracle/discrete_bath.hpp"
#include "hpz/oracle/master_equation.hpp"
#include "hpz/oracle/moment_odes.hpp"
#include "hpz/simd/kernels.hpp"

#ifndef HPZ_VERSION
#define HPZ_VERSION "unknown"
#endif

namespace hpz::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Optional quantity: NaN where the model does not define it.
template <class F>
double optional_value(F f) {
    try {
        return f();
    } catch (const DomainError&) {
        return kNaN;
    } catch (const UnsupportedError&) {
        return kNaN;
    }
}

nlohmann::json units(const PhysicalConfig& c) {
    return {{"hbar", c.hbar()},
            {"boltzmann", c.units.boltzmann},
            {"note", "all quantities in the configured units of mass, length and time; "
                     "the natural time scale is m/zeta"}};
}

Table density_slice(const ScenarioSpec& s, const SpatialDensity& p) {
    Table t{"density", {"x", "P"}, {}};
    const auto& d = *s.density;
    for (int k = 0; k < d.n_points; ++k) {
        const double x = d.x_min + (d.x_max - d.x_min) * k / (d.n_points - 1);
        t.add({x, p(x)});
    }
    return t;
}

CommandResult coefficients(const ScenarioSpec& s) {
    const auto& c = s.physical;
    CommandResult r;
    Table t{"coefficients",
            {"t", "G", "Gdot", "Gddot", "two_gamma", "omega_sq", "omega_sq_delta_weight", "xf_sym", "vf_sym", "f", "h"},
            {}};
    for (double time : s.time.points()) {
        const auto g = green(c, time);
        const auto l = local_coefficients(c, time);
        double xf = kNaN, vf = kNaN, f = kNaN, h = kNaN;
        try {
            const auto d = diffusion_coefficients(c, time);
            xf = d.xf_sym;
            vf = d.vf_sym;
            f = d.f;
            h = d.h;
        } catch (const DomainError&) {
        } catch (const UnsupportedError&) {
        }
        t.add({time, g.g, g.g1, g.g2, l.two_gamma, l.omega_sq.value, l.omega_sq.delta_weight, xf, vf, f, h});
    }
    r.summary["columns"] = {{"G", "time/mass"}, {"two_gamma", "1/time"}, {"omega_sq", "1/time^2"},
                            {"f", "dimensionless (f, h as defined through <XF+FX> = 2 hbar Gamma f)"}};
    if (!c.is_ohmic() && c.free_particle()) {
        const auto roots = gamma_pm(c);
        r.summary["gamma_plus"] = roots.plus;
        r.summary["gamma_minus"] = roots.minus;
        r.summary["omega_sq_at_0"] = local_coefficients(c, 0.0).omega_sq.value;
    }
    r.tables.push_back(std::move(t));
    return r;
}

CommandResult fluctuations(const ScenarioSpec& s) {
    const auto& c = s.physical;
    CommandResult r;
    Table t{"fluctuations", {"t", "x_sq", "xdot_sq", "x_xdot_sym", "msd"}, {}};
    bool cutoff_dependent = false;
    for (double time : s.time.points()) {
        const auto x = x_moments(c, time);
        cutoff_dependent = cutoff_dependent || x.cutoff_dependent;
        t.add({time, x.xx, x.vv, x.xv_sym, optional_value([&] { return msd(c, time).s; })});
    }
    r.summary["cutoff_dependent"] = cutoff_dependent;
    r.summary["columns"] = {{"x_sq", "length^2, <X^2>"}, {"xdot_sq", "length^2/time^2"},
                            {"x_xdot_sym", "length^2/time, <X Xdot + Xdot X>"}, {"msd", "length^2, s(t)"}};
    if (!c.free_particle()) {
        const double e = optional_value([&] { return equilibrium_moments(c).x_sq; });
        r.summary["equilibrium_x_sq"] = std::isfinite(e) ? nlohmann::json(e) : nlohmann::json(nullptr);
    }
    r.tables.push_back(std::move(t));
    return r;
}

CommandResult spread(const ScenarioSpec& s) {
    const auto& c = s.physical;
    CommandResult r;
    Table t{"spread", {"t", "mean", "variance", "density_variance"}, {}};
    for (double time : s.time.points()) {
        const auto p = spatial_density(s.state, c, time);
        t.add({time, p.mean, variance_report(s.state, c, time), p.variance});
    }
    r.summary["columns"] = {{"variance", "length^2, <Delta x^2> of one packet"},
                            {"density_variance", "length^2, variance of P(x)"}};
    r.tables.push_back(std::move(t));
    if (s.density) r.tables.push_back(density_slice(s, spatial_density(s.state, c, s.time.t_end)));
    return r;
}

FitLaw fit_law(const ScenarioSpec& s) {
    const auto name = s.cat.is_object() ? string_field(s.cat, "cat", "fit_law", std::string("auto")) : "auto";
    if (name == "auto") return s.state.thermal() ? FitLaw::GaussT2 : FitLaw::ExpT3;
    if (name == "exp_t3") return FitLaw::ExpT3;
    if (name == "gauss_t2") return FitLaw::GaussT2;
    throw ConfigError("key 'cat.fit_law' must be \"auto\", \"exp_t3\" or \"gauss_t2\"");
}

CommandResult cat(const ScenarioSpec& s) {
    const auto& c = s.physical;
    if (!s.state.pair()) throw ConfigError("cat: key 'state.kind' must be \"cat\"");
    if (s.cat.is_object()) reject_unknown(s.cat, "cat", {"fit_law", "t_lo", "t_hi", "fit"});
    CommandResult r;
    Table t{"cat", {"t", "a", "variance"}, {}};
    for (double time : s.time.points()) t.add({time, attenuation(s.state, c, time).a, variance_report(s.state, c, time)});
    r.tables.push_back(std::move(t));
    if (s.density) r.tables.push_back(density_slice(s, spatial_density(s.state, c, s.time.t_end)));

    const double d = s.state.d, sigma = s.state.sigma;
    r.summary["plateau"] = std::exp(-d * d / (8.0 * sigma * sigma));
    const bool fit = !s.cat.is_object() || !s.cat.contains("fit") || s.cat.at("fit").get<bool>();
    if (fit) {
        const FitLaw law = fit_law(s);
        const double lo = s.cat.is_object() ? number_field(s.cat, "cat", "t_lo", 0.0) : 0.0;
        const double hi = s.cat.is_object() ? number_field(s.cat, "cat", "t_hi", 0.0) : 0.0;
        const auto f = fit_decoherence_time(s.state, c, law, lo, hi);
        r.summary["fit_law"] = law == FitLaw::ExpT3 ? "exp_t3" : "gauss_t2";
        r.summary["tau_d"] = f.tau_d;
        r.summary["fit_window"] = {f.t_lo, f.t_hi};
        r.summary["fit_max_residual"] = f.max_residual;
        const double kT = c.kT(), hbar = c.hbar(), m = c.m();
        r.summary["tau_d_leading_law"] =
            law == FitLaw::ExpT3 ? 3.0 * hbar * hbar / (c.zeta() * kT * d * d)
                                 : std::sqrt(8.0) * sigma * sigma / (std::sqrt(kT / m) * d);
    }
    r.summary["columns"] = {{"a", "dimensionless attenuation"}, {"variance", "length^2"}};
    return r;
}

CommandResult reference(const ScenarioSpec& s) {
    const auto& c = s.physical;
    CommandResult r;
    Table t{"reference", {"t", "commutator", "s", "w_sq", "a_exact", "a"}, {}};
    for (double time : s.time.points()) {
        const auto e = exact_reference(s.state, c, time);
        const double a = s.state.pair() ? attenuation(s.state, c, time).a : kNaN;
        t.add({time, e.commutator, e.s, e.w_sq, e.a_exact ? *e.a_exact : kNaN, a});
    }
    r.summary["columns"] = {{"commutator", "C(t), length^2 (hbar G)"}, {"s", "length^2"}, {"w_sq", "length^2"}};
    r.tables.push_back(std::move(t));
    return r;
}

CommandResult divergence(const ScenarioSpec& s) {
    const auto& c = s.physical;
    if (c.thermal.regime != Regime::ZeroTemperature)
        throw ConfigError("divergence: key 'physical.regime' must be \"zero\"");
    std::vector<double> cutoffs;
    double t_probe = 20.0 * c.m() / c.zeta();
    if (s.divergence.is_object()) {
        reject_unknown(s.divergence, "divergence", {"t_probe", "cutoffs"});
        t_probe = number_field(s.divergence, "divergence", "t_probe", t_probe);
        if (s.divergence.contains("cutoffs")) {
            const auto& v = s.divergence.at("cutoffs");
            if (!v.is_array()) throw ConfigError("key 'divergence.cutoffs' must be an array");
            for (const auto& x : v) {
                if (!x.is_number()) throw ConfigError("key 'divergence.cutoffs' must hold numbers");
                cutoffs.push_back(x.get<double>());
            }
        }
    }
    if (cutoffs.empty()) {
        if (!c.has_cutoff()) throw DivergenceError(std::string("divergence: ") + kZeroPointDivergence);
        for (double f : {0.1, 0.3, 1.0, 3.0, 10.0}) cutoffs.push_back(f * c.bath.cutoff);
    }
    const auto fit = divergence_probe(c, t_probe, cutoffs);
    CommandResult r;
    Table t{"divergence", {"cutoff", "x_sq"}, {}};
    for (std::size_t k = 0; k < fit.cutoffs.size(); ++k) t.add({fit.cutoffs[k], fit.xx[k]});
    r.tables.push_back(std::move(t));
    r.summary["t_probe"] = t_probe;
    r.summary["slope"] = fit.slope;
    r.summary["intercept"] = fit.intercept;
    r.summary["max_residual"] = fit.max_residual;
    r.summary["slope_expected"] = c.hbar() / (M_PI * c.zeta());
    r.summary["columns"] = {{"x_sq", "length^2 at t_probe"}, {"slope", "d<X^2>/d log(cutoff)"}};
    return r;
}

// ---- validate -------------------------------------------------------------

struct Check {
    std::string metric;
    double value;
    double tolerance;
    bool pass;
};

nlohmann::json suite_json(const std::string& name, const std::vector<Check>& checks, const nlohmann::json& info) {
    nlohmann::json metrics = nlohmann::json::object(), tol = nlohmann::json::object(),
                   pass = nlohmann::json::object();
    bool all = true;
    for (const auto& k : checks) {
        metrics[k.metric] = k.value;
        tol[k.metric] = k.tolerance;
        pass[k.metric] = k.pass;
        all = all && k.pass;
    }
    return {{"suite", name}, {"metrics", metrics}, {"tolerances", tol}, {"pass_by_metric", pass},
            {"info", info}, {"pass", all}};
}

Check below(const std::string& metric, double value, double tolerance) {
    return {metric, value, tolerance, std::isfinite(value) && value < tolerance};
}

CommandResult validate(const ScenarioSpec& s, const RunOptions& options) {
    const auto& c = s.physical;
    const auto& v = s.validate;
    if (v.is_object())
        reject_unknown(v, "validate", {"suites", "grid_points", "samples", "modes", "bath_cutoff"});
    std::vector<std::string> suites{"moments", "pde", "mc"};
    if (v.is_object() && v.contains("suites")) {
        suites.clear();
        for (const auto& x : v.at("suites")) {
            if (!x.is_string()) throw ConfigError("key 'validate.suites' must hold strings");
            suites.push_back(x.get<std::string>());
        }
    }
    const nlohmann::json empty = nlohmann::json::object();
    const auto& vo = v.is_object() ? v : empty;
    const int grid_points = integer_field(vo, "validate", "grid_points", 256);
    const int samples = integer_field(vo, "validate", "samples", 100000);
    const int modes = integer_field(vo, "validate", "modes", 400);
    const double bath_cutoff = number_field(vo, "validate", "bath_cutoff", 1000.0);
    const double t_final = s.time.t_end;
    const double exact_var = variance_report(s.state, c, t_final);

    CommandResult r;
    nlohmann::json reports = nlohmann::json::array();
    double pde_var = kNaN, mc_var = kNaN, mc_var_se = kNaN;
    for (const auto& suite : suites) {
        const auto t0 = std::chrono::steady_clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
        if (suite == "moments") {
            const auto init = oracle::initial_moments(s.state, c);
            const auto times = s.time.points();
            const auto curve = oracle::integrate_moment_odes(c, init, times);
            const auto paper = oracle::integrate_moment_odes(c, init, times, oracle::DiffusionRoute::ForceCorrelation);
            Table t{"moments", {"t", "x_sq", "xp_sym", "p_sq", "x_sq_closed_form", "x_sq_force_correlation_route"}, {}};
            double worst = 0.0, worst_paper = 0.0;
            for (std::size_t k = 0; k < curve.size(); ++k) {
                const double exact = variance_report(s.state, c, curve[k].t);
                worst = std::max(worst, std::abs(curve[k].x_sq / exact - 1.0));
                worst_paper = std::max(worst_paper, std::abs(paper[k].x_sq / exact - 1.0));
                t.add({curve[k].t, curve[k].x_sq, curve[k].xp_sym, curve[k].p_sq, exact, paper[k].x_sq});
            }
            r.tables.push_back(std::move(t));
            reports.push_back(suite_json("moments", {below("x_sq_max_rel_error", worst, 1e-5)},
                                         {{"force_correlation_route_max_rel_error", worst_paper},
                                          {"runtime_s", elapsed()}}));
        } else if (suite == "pde") {
            const auto grid = oracle::default_grid(c, s.state, t_final, grid_points, grid_points);
            const auto sol = oracle::integrate_master_equation(c, s.state, grid, t_final);
            const auto exact = spatial_density(s.state, c, t_final);
            pde_var = sol.moments.var_x;
            const double runtime = elapsed();
            reports.push_back(suite_json(
                "pde",
                {below("x_sq_rel_error", std::abs(sol.moments.var_x / exact_var - 1.0), 1e-2),
                 below("density_l1", oracle::density_l1_distance(sol, exact), 1e-2),
                 below("mass_error", std::abs(sol.moments.mass - 1.0), 1e-4),
                 below("runtime_s", runtime, 120.0)},
                {{"grid", {grid.n_q, grid.n_p}}, {"q_range", {grid.q_min, grid.q_max}},
                 {"p_range", {grid.p_min, grid.p_max}}, {"dt", sol.grid.dt}, {"steps", sol.steps},
                 {"max_mass_drift", sol.max_mass_drift}, {"simd", simd::to_string(simd::active_level())}}));
            Table t{"pde_density", {"x", "P_grid", "P_closed_form"}, {}};
            const auto P = sol.density();
            for (int i = 0; i < grid.n_q; ++i) t.add({grid.q(i), P[i], exact(grid.q(i))});
            r.tables.push_back(std::move(t));
        } else if (suite == "mc") {
            const auto bath = oracle::build_discrete_bath(c, static_cast<std::size_t>(modes), bath_cutoff);
            oracle::McOptions mo;
            mo.samples = static_cast<std::size_t>(samples);
            mo.seed = options.seed ? *options.seed : s.seed.value_or(1);
            mo.threads = options.threads;
            mo.histogram_bins = 60;
            const auto rep = oracle::mc_estimate(c, bath, s.state, {t_final}, mo);
            const auto& p = rep.points.front();
            const double xx = x_moments(c, t_final).xx;
            mc_var = p.var_x;
            mc_var_se = p.var_x_se;
            const double runtime = elapsed();
            reports.push_back(suite_json(
                "mc",
                {below("x_sq_fluct_z", std::abs(p.xx - xx) / p.xx_se, 3.0),
                 below("variance_z", std::abs(p.var_x - exact_var) / p.var_x_se, 3.0),
                 below("runtime_s", runtime, 120.0)},
                {{"x_sq_fluct", p.xx}, {"x_sq_fluct_se", p.xx_se}, {"x_sq_fluct_discrete_bath", p.xx_discrete},
                 {"x_sq_fluct_closed_form", xx}, {"variance", p.var_x}, {"variance_se", p.var_x_se},
                 {"variance_closed_form", exact_var}, {"samples", rep.samples}, {"modes", rep.modes},
                 {"bath_cutoff", rep.cutoff}, {"seed", rep.seed}}));
            Table t{"mc_histogram", {"x", "density_mc", "density_closed_form"}, {}};
            const auto& h = rep.histogram;
            const auto exact = spatial_density(s.state, c, t_final);
            const double w = (h.x_max - h.x_min) / h.density.size();
            for (std::size_t k = 0; k < h.density.size(); ++k) {
                const double x = h.x_min + (k + 0.5) * w;
                t.add({x, h.density[k], exact(x)});
            }
            r.tables.push_back(std::move(t));
        } else {
            throw ConfigError("key 'validate.suites': unknown suite '" + suite + "' (moments, pde, mc)");
        }
    }
    if (std::isfinite(pde_var) && std::isfinite(mc_var)) {
        // pairwise agreement within the combined tolerances
        const double tol = 3.0 * mc_var_se + 1e-2 * exact_var;
        reports.push_back(suite_json("three_way",
                                     {below("pde_vs_mc", std::abs(pde_var - mc_var), tol),
                                      below("pde_vs_closed_form", std::abs(pde_var - exact_var), 1e-2 * exact_var),
                                      below("mc_vs_closed_form", std::abs(mc_var - exact_var), 3.0 * mc_var_se)},
                                     {{"pde", pde_var}, {"mc", mc_var}, {"closed_form", exact_var}}));
    }
    bool all = true;
    for (const auto& rep : reports) all = all && rep.at("pass").get<bool>();
    r.summary["scenario"] = s.name;
    r.summary["suites"] = reports;
    r.summary["pass"] = all;
    r.suite_passed = all;
    return r;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + p.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string code_version() { return HPZ_VERSION; }

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"coefficients", "fluctuations", "spread", "cat",
                                                "reference",    "divergence",   "validate"};
    return names;
}

CommandResult run_command(const std::string& name, const ScenarioSpec& spec, const RunOptions& options) {
    if (name == "coefficients") return coefficients(spec);
    if (name == "fluctuations") return fluctuations(spec);
    if (name == "spread") return spread(spec);
    if (name == "cat") return cat(spec);
    if (name == "reference") return reference(spec);
    if (name == "divergence") return divergence(spec);
    if (name == "validate") return validate(spec, options);
    throw ConfigError("unknown subcommand '" + name + "'");
}

int execute(const std::string& name, const std::string& config_path, const RunOptions& options, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto spec = load_scenario(config_path);
        auto result = run_command(name, spec, options);
        std::filesystem::create_directories(options.out_dir);
        std::vector<std::string> files;
        auto emit = [&](const std::string& file, const std::string& content) {
            write_atomic(options.out_dir / file, content);
            files.push_back(file);
        };
        for (const auto& t : result.tables) {
            if (options.format != Format::Json) emit(t.name + ".csv", to_csv(t));
            if (options.format != Format::Csv) emit(t.name + ".json", to_json(t).dump(2) + "\n");
        }
        result.summary["subcommand"] = name;
        result.summary["scenario"] = spec.name;
        result.summary["units"] = units(spec.physical);
        emit("summary.json", result.summary.dump(2) + "\n");

        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        nlohmann::json manifest{{"subcommand", name},
                                {"config", spec.echo},
                                {"config_path", config_path},
                                {"code_version", code_version()},
                                {"seed", options.seed ? *options.seed : spec.seed.value_or(1)},
                                {"threads", options.threads},
                                {"outputs", files},
                                {"wall_clock_s", seconds}};
        write_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
        if (!result.suite_passed) {
            err << "validation failed: see " << (options.out_dir / "summary.json").string() << "\n";
            return 2;
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    }
}

nlohmann::json compare_runs(const std::filesystem::path& a, const std::filesystem::path& b) {
    const auto ma = nlohmann::json::parse(read_file(a / "manifest.json"));
    const auto mb = nlohmann::json::parse(read_file(b / "manifest.json"));
    if (ma.at("subcommand") != mb.at("subcommand"))
        throw ConfigError("compare: runs used different subcommands (" + ma.at("subcommand").get<std::string>() +
                          " vs " + mb.at("subcommand").get<std::string>() + ")");
    nlohmann::json out{{"subcommand", ma.at("subcommand")}, {"run_a", a.string()}, {"run_b", b.string()}};
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : ma.at("outputs")) {
        const auto name = f.get<std::string>();
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
        if (!std::filesystem::exists(b / name)) continue;
        const auto ta = parse_csv(read_file(a / name), name), tb = parse_csv(read_file(b / name), name);
        if (ta.columns != tb.columns || ta.rows.size() != tb.rows.size())
            throw ConfigError("compare: grid mismatch in '" + name + "' (columns or row count differ)");
        for (std::size_t k = 0; k < ta.rows.size(); ++k) {
            const double x = ta.rows[k][0], y = tb.rows[k][0];
            if (std::abs(x - y) > 1e-12 * std::max(std::abs(x), std::abs(y)))
                throw ConfigError("compare: grid mismatch in '" + name + "' at row " + std::to_string(k + 1));
        }
        nlohmann::json cols = nlohmann::json::object();
        for (std::size_t j = 1; j < ta.columns.size(); ++j) {
            double max_abs = 0.0, max_rel = 0.0;
            for (std::size_t k = 0; k < ta.rows.size(); ++k) {
                const double x = ta.rows[k][j], y = tb.rows[k][j];
                if (std::isnan(x) && std::isnan(y)) continue;
                const double d = std::abs(x - y);
                max_abs = std::max(max_abs, d);
                const double scale = std::max(std::abs(x), std::abs(y));
                if (scale > 0.0) max_rel = std::max(max_rel, d / scale);
            }
            cols[ta.columns[j]] = {{"max_abs", max_abs}, {"max_rel", max_rel}};
        }
        files.push_back({{"file", name}, {"columns", cols}});
    }
    out["files"] = files;
    return out;
}

}  // namespace hpz::cli
