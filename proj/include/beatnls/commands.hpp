#pragma once

/// @file commands.hpp
/// @brief Argument parsing and the computational subcommands.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beatnls/config.hpp"
#include "beatnls/effective_dynamics.hpp"
#include "beatnls/fixtures.hpp"
#include "beatnls/implicit_curve.hpp"
#include "beatnls/report.hpp"
#include "beatnls/spectral_pde.hpp"
#include "beatnls/tail_probability.hpp"

namespace beatnls::cli {

/// Thrown for --help; carries the text to print.
struct HelpRequested {
    std::string text;
};

// ---------------------------------------------------------------------------
// Domain views of a RunConfig

inline dyn::InitialData initial_data(const RunConfig& c) {
    return {{c.real("alpha-re"), c.real("alpha-im")}, {c.real("beta-re"), c.real("beta-im")}, c.real("eps")};
}

inline tail::RegimeSpec regime_spec(const RunConfig& c) {
    tail::RegimeSpec s;
    s.z0 = c.real("z0");
    s.delta = c.real("delta");
    s.gamma = c.real("gamma");
    s.c_time = c.real("c-time");
    s.cutoff_c = c.real("cutoff-c");
    s.c2 = c.real("c2");
    return s;
}

inline tail::VariancePair variance_pair(const RunConfig& c) { return {c.real("sigma-a2"), c.real("sigma-b2")}; }

inline tail::MonteCarloOptions mc_options(const RunConfig& c) {
    tail::MonteCarloOptions o;
    o.n = c.integer("n");
    o.seed = c.seed;
    o.workers = c.workers;
    const double th = c.real("theta");
    o.theta = th < 0.0 ? tail::kNaN : th;
    return o;
}

inline pde::PdeRunConfig pde_config(const RunConfig& c) {
    pde::PdeRunConfig p;
    p.n = static_cast<int>(c.integer("modes"));
    p.dt = c.real("dt");
    p.t_end = c.real("t-end");
    p.dealias = c.boolean("dealias");
    p.coupling = c.real("coupling");
    p.sample_every = static_cast<int>(c.integer("sample-every"));
    return p;
}

/// Cross-key constraints, checked once all layers are merged.
inline void validate_domain(const RunConfig& c) {
    const std::string& s = c.subcommand;
    if (s == "branches" || s == "rate") {
        if (!(c.real("tau-min") < c.real("tau-max"))) throw ValidationError("tau-min < tau-max violated");
    } else if (s == "collisions") {
        if (c.integer("j-min") > c.integer("j-max")) throw ValidationError("j-min <= j-max violated");
    } else if (s == "dynamics") {
        const auto d = initial_data(c);
        dyn::validate(d);
        const double load = c.real("dt") * (1.0 + d.eps * d.eps * (std::norm(d.alpha) + std::norm(d.beta)));
        if (load > 0.1) throw ValidationError("dt*(1 + eps^2(|alpha|^2+|beta|^2)) <= 0.1 violated");
    } else if (s == "pde") {
        dyn::validate(initial_data(c));
        pde::validate(pde_config(c));
    } else if (s == "tail" || s == "ldp-sweep") {
        tail::validate(regime_spec(c));
        tail::validate(variance_pair(c));
        if (c.real("theta") >= 1.0) throw ValidationError("theta < 1 violated");
        if (c.text("method") == "monte_carlo" && c.integer("n") < 10000) {
            throw ValidationError("n >= 10000 violated for monte_carlo");
        }
        if (s == "ldp-sweep") {
            const auto e = c.real_list("eps-list");
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!(e[i] > 0.0 && e[i] < 1.0)) throw ValidationError("eps-list entries must lie in (0,1)");
                if (i > 0 && !(e[i] < e[i - 1])) throw ValidationError("eps-list must be strictly decreasing");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// parse_config

/// Builds a RunConfig from argv (subcommand first, program name excluded).
/// Precedence: flags over the config file over defaults. The file is taken
/// from `--config` when given, otherwise from `file`.
inline RunConfig parse_config(const std::vector<std::string>& argv, const std::optional<std::string>& file = {}) {
    CLI::App app{"beatnls: beating NLS extreme-wave toolkit", "beatnls"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Expand all help");
    std::map<std::string, std::map<std::string, std::string>> store;
    std::map<std::string, std::string> config_path;
    std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;
    for (const auto& sub : subcommand_names()) {
        CLI::App* sc = app.add_subcommand(sub);
        sc->allow_extras();
        for (const auto& k : all_keys(sub)) {
            std::string desc = k.doc + " (default: " + (k.def.empty() ? "none" : k.def) + ")";
            auto* opt = sc->add_option("--" + k.name, store[sub][k.name], desc);
            options[sub].push_back({k.name, opt});
        }
        sc->add_option("--config", config_path[sub], "config file: key = value lines or JSON");
    }
    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw ValidationError(e.what());
    }
    std::string sub;
    for (const auto& name : subcommand_names()) {
        if (app.got_subcommand(name)) sub = name;
    }
    for (auto* sc : app.get_subcommands()) {
        if (sc->get_help_ptr() != nullptr && sc->get_help_ptr()->count() > 0) throw HelpRequested{sc->help()};
    }
    for (auto* sc : app.get_subcommands()) {
        for (const auto& extra : sc->remaining()) {
            if (extra.rfind("--", 0) == 0) throw ValidationError("unknown key '" + extra.substr(2) + "' for subcommand " + sub);
            throw ValidationError("unexpected argument '" + extra + "'");
        }
    }
    Layer flags;
    for (auto& [name, opt] : options[sub]) {
        if (opt->count() > 0) flags[name] = store[sub][name];
    }
    Layer from_file;
    if (!config_path[sub].empty()) {
        from_file = load_config_file(config_path[sub]);
    } else if (file) {
        from_file = load_config_file(*file);
    }
    RunConfig cfg = resolve_config(sub, from_file, flags);
    validate_domain(cfg);
    return cfg;
}

// ---------------------------------------------------------------------------
// Output

struct Report {
    std::vector<Table> tables;  ///< first table is the primary output
    nlohmann::json summary = nlohmann::json::object();
};

inline nlohmann::json fixtures_json() {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& p : fixtures::provenance()) j[p.name] = {{"value", p.value}, {"recipe", p.recipe}};
    return j;
}

inline std::string render_json(const RunConfig& cfg, const Report& r) {
    nlohmann::json doc;
    doc["config"] = config_to_json(cfg);
    doc["fixtures"] = fixtures_json();
    nlohmann::json tables = nlohmann::json::object();
    for (const auto& t : r.tables) tables[t.name] = table_json(t);
    doc["tables"] = std::move(tables);
    doc["summary"] = r.summary;
    return doc.dump(2) + "\n";
}

/// Writes the report. CSV to stdout carries only the primary table; CSV to a
/// file writes the remaining tables next to it as "<stem>_<name><ext>".
inline void emit(const RunConfig& cfg, const Report& r, std::ostream& stdout_stream) {
    const std::string path = resolve_out_path(cfg.out_path);
    if (cfg.format == "json") {
        const std::string text = render_json(cfg, r);
        if (path == "-") {
            stdout_stream << text;
        } else {
            write_text_file(path, text);
        }
        return;
    }
    if (r.tables.empty()) return;
    if (path == "-") {
        write_csv(stdout_stream, r.tables.front());
        return;
    }
    for (std::size_t i = 0; i < r.tables.size(); ++i) {
        std::ostringstream ss;
        write_csv(ss, r.tables[i]);
        write_text_file(i == 0 ? path : sidecar_path(path, r.tables[i].name), ss.str());
    }
}

// ---------------------------------------------------------------------------
// Subcommands

inline std::vector<double> grid(double lo, double hi, std::int64_t n, bool logarithmic) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        g[static_cast<std::size_t>(i)] = logarithmic ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
    }
    g.back() = hi;
    return g;
}

/// Branch diagram on a grid given in units of 1/z0², so that doubling z0
/// divides every τ by four.
inline Report run_branches(const RunConfig& c) {
    const double lambda = c.real("z0");
    const double l2 = lambda * lambda;
    const auto nat = grid(c.real("tau-min"), c.real("tau-max"), c.integer("samples"), false);
    Report r;
    Table branches{"branches", {"tau", "branch_index", "y", "xi", "exists"}, {}};
    Table minimal{"minimal", {"tau", "branch_index", "y", "xi"}, {}};
    Table rate{"rate", {"tau", "J", "is_jump"}, {}};
    for (double T : nat) {
        const double tau = T / l2;
        for (const auto& v : curve::enumerate_solutions(tau, lambda)) {
            branches.add({tau, v.branch_index, v.y, v.xi, v.exists});
            if (v.partner_index != 0) branches.add({tau, v.partner_index, v.y, v.xi, v.exists});
        }
        const auto m = curve::minimal_solution(tau, lambda);
        minimal.add({tau, m.branch_index, m.y, m.xi});
        const auto rv = curve::rate_function(lambda, tau);
        rate.add({tau, rv.J, rv.is_jump});
    }
    Table events{"events", {"kind", "j", "tau", "y", "xi"}, {}};
    const double tau_hi = nat.back() / l2;
    for (std::int64_t j = 1;; ++j) {
        const double tb = curve::birth_tau(j, lambda);
        const auto col = curve::collision(j, lambda);
        if (tb > tau_hi && col.tau > tau_hi) break;
        if (tb <= tau_hi) events.add({std::string("birth"), j, tb, lambda, static_cast<double>(j) * curve::kQuarter});
        if (col.tau <= tau_hi) {
            events.add({std::string("collision"), j, col.tau, std::sqrt(col.xi / (2.0 * col.tau)), col.xi});
        }
        const double tj = curve::tau_j(j, lambda);
        if (tj <= tau_hi) events.add({std::string("dip"), j, tj, lambda / std::numbers::sqrt2, tj * l2});
    }
    r.summary["rows"] = static_cast<std::int64_t>(branches.rows.size());
    r.summary["lambda"] = lambda;
    r.tables = {std::move(branches), std::move(events), std::move(minimal), std::move(rate)};
    return r;
}

inline Report run_rate(const RunConfig& c) {
    const double z0 = c.real("z0");
    const double lo = c.real("tau-min");
    const double hi = c.real("tau-max");
    auto taus = grid(lo, hi, c.integer("samples"), c.text("grid") == "log");
    for (std::int64_t j = 1;; ++j) {
        const double t = curve::collision(j, z0).tau;
        if (t > hi) break;
        if (t >= lo) taus.push_back(t);
    }
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    Report r;
    Table t{"rate", {"tau", "J", "is_jump"}, {}};
    for (double tau : taus) {
        const auto v = curve::rate_function(z0, tau);
        t.add({tau, v.J, v.is_jump});
    }
    r.tables.push_back(std::move(t));
    return r;
}

inline Report run_collisions(const RunConfig& c) {
    const double lambda = c.real("z0");
    Report r;
    Table t{"collisions",
            {"j", "xi", "offset", "tau", "tau_j", "tau_excess", "scaled_excess", "offset_lo", "offset_hi"},
            {}};
    for (std::int64_t j = c.integer("j-min"); j <= c.integer("j-max"); ++j) {
        const auto col = curve::collision(j, lambda);
        const double jd = static_cast<double>(j);
        t.add({j, col.xi, col.offset, col.tau, curve::tau_j(j, lambda), col.tau_excess,
               jd * lambda * lambda * col.tau_excess, 1.0 / (std::numbers::sqrt2 * curve::kPi * jd),
               std::numbers::sqrt2 / (curve::kPi * (jd - 0.5))});
    }
    r.tables.push_back(std::move(t));
    return r;
}

inline Report run_mu(const RunConfig& c) {
    const auto j = c.integer("j");
    Report r;
    Table t{"mu",
            {"j", "zeta", "tau", "mu_minus", "mu_plus", "xi_minus", "xi_plus", "iterations_minus", "iterations_plus",
             "contraction", "minus_lo", "upper", "plus_lo"},
            {}};
    for (double z : curve::zeta_grid(static_cast<int>(c.integer("zeta-points")))) {
        const auto s = curve::mu_solution(j, z);
        const auto b = curve::mu_bounds(j, z);
        const double tau = (curve::kPi * static_cast<double>(j) - 1.5 * curve::kPi + z) / 2.0;
        t.add({j, z, tau, s.mu_minus, s.mu_plus, s.xi_minus, s.xi_plus, static_cast<std::int64_t>(s.iterations_minus),
               static_cast<std::int64_t>(s.iterations_plus), s.contraction, b.minus_lo, b.minus_hi, b.plus_lo});
    }
    r.tables.push_back(std::move(t));
    return r;
}

inline Report run_dynamics(const RunConfig& c) {
    const auto d = initial_data(c);
    const auto traj = dyn::integrate_reduced(d, c.real("t-end"), c.real("dt"), static_cast<int>(c.integer("stride")));
    Report r;
    Table t{"trajectory",
            {"t", "re_u1", "im_u1", "re_um1", "im_um1", "J1", "K1", "G", "sup_paper", "sup_exact"},
            {}};
    double err = 0.0;
    for (const auto& s : traj) {
        const auto k = dyn::conserved(s);
        const auto e = dyn::closed_form_state(d, s.t);
        err = std::max(err, std::abs(s.u1 - e.u1) + std::abs(s.um1 - e.um1));
        t.add({s.t, s.u1.real(), s.u1.imag(), s.um1.real(), s.um1.imag(), k.J1, k.K1, k.G,
               dyn::sup_norm_effective(d, s.t, dyn::SupMode::paper), std::abs(s.u1) + std::abs(s.um1)});
    }
    r.summary["max_error_vs_closed_form"] = err;
    r.tables.push_back(std::move(t));
    return r;
}

inline Report run_pde(const RunConfig& c) {
    const auto d = initial_data(c);
    const auto p = pde_config(c);
    const auto traj = pde::solve_pde(p, d);
    const auto rows = pde::pde_table(traj, d);
    Report r;
    Table t{"pde", {"t", "mass", "energy", "sup_pde", "sup_effective_exact", "sup_effective_paper", "tail_mass"}, {}};
    for (const auto& w : rows) {
        t.add({w.t, w.mass, w.energy, w.sup_pde, w.sup_effective_exact, w.sup_effective_paper, w.tail_mass});
    }
    const double m0 = rows.front().mass;
    const double e0 = rows.front().energy;
    double dm = 0.0;
    double de = 0.0;
    for (const auto& w : rows) {
        dm = std::max(dm, std::abs(w.mass - m0) / std::max(m0, 1e-300));
        de = std::max(de, std::abs(w.energy - e0) / std::max(std::abs(e0), 1e-300));
    }
    r.summary["mass_drift"] = dm;
    r.summary["energy_drift"] = de;
    const std::string ck = c.text("checkpoint");
    if (!ck.empty()) {
        const std::string path = resolve_out_path(ck);
        pde::write_checkpoint(path, traj.back().field, p.dt);
        r.summary["checkpoint"] = std::filesystem::path(ck).filename().string();
    }
    r.tables.push_back(std::move(t));
    return r;
}

inline Table ldp_table() {
    return {"ldp",
            {"eps", "tau", "gamma", "delta", "z0", "sigma_a2", "sigma_b2", "method", "log_p", "scaled", "err",
             "target_rate", "regime", "target_lower", "target_upper", "theta", "lambda"},
            {}};
}

inline void add_ldp_row(Table& t, const tail::RegimeSpec& s, const tail::VariancePair& v, const tail::TailEstimate& e,
                        const tail::RateTarget& target) {
    t.add({e.eps, e.tau, s.gamma, s.delta, s.z0, v.sigma_a2, v.sigma_b2, tail::method_label(e.method), e.log_p,
           e.scaled, e.err, target.target, tail::regime_label(target.regime), target.lower, target.upper, e.theta,
           e.lambda});
}

/// τ → 0 event {a + b ≥ λ}: the ℓ¹ tail of the rescaled Rayleigh pair.
inline tail::TailEstimate closed_form_estimate(const tail::RegimeSpec& s, const tail::VariancePair& v, double eps) {
    tail::validate(s);
    tail::TailEstimate e;
    e.eps = eps;
    e.method = tail::Method::closed_form;
    e.tau = tail::rescaled_tau(s, eps);
    e.lambda = tail::threshold_lambda(s, eps);
    if (!(e.lambda > 0.0)) throw ValidationError("eps too large: the corrected threshold is not positive");
    const double scale = std::pow(eps, 2.0 * s.delta);
    e.log_p = tail::log_l1_tail(e.lambda, {v.sigma_a2 * scale, v.sigma_b2 * scale});
    e.scaled = scale * e.log_p;
    return e;
}

inline Report run_tail(const RunConfig& c) {
    const auto s = regime_spec(c);
    const auto v = variance_pair(c);
    const double eps = c.real("eps");
    const std::string m = c.text("method");
    tail::TailEstimate e;
    if (m == "quadrature") {
        e = tail::log_tail_quadrature(s, v, eps);
    } else if (m == "monte_carlo") {
        e = tail::log_tail_monte_carlo(s, v, eps, mc_options(c));
    } else {
        e = closed_form_estimate(s, v, eps);
    }
    Report r;
    Table t = ldp_table();
    add_ldp_row(t, s, v, e, tail::rate_target(s, v));
    r.summary["seed"] = c.seed;
    r.summary["theta"] = e.theta;
    r.tables.push_back(std::move(t));
    return r;
}

inline Report run_ldp_sweep(const RunConfig& c) {
    const auto s = regime_spec(c);
    const auto v = variance_pair(c);
    const auto method = c.text("method") == "monte_carlo" ? tail::Method::monte_carlo : tail::Method::quadrature;
    const auto rows = tail::ldp_sweep(s, v, c.real_list("eps-list"), method, {}, mc_options(c));
    Report r;
    Table t = ldp_table();
    for (const auto& row : rows) add_ldp_row(t, s, v, row.estimate, row.target);
    r.summary["seed"] = c.seed;
    r.tables.push_back(std::move(t));
    return r;
}

/// Dispatch for every subcommand except verify.
inline Report run_compute(const RunConfig& c) {
    const std::string& s = c.subcommand;
    if (s == "branches") return run_branches(c);
    if (s == "rate") return run_rate(c);
    if (s == "collisions") return run_collisions(c);
    if (s == "mu") return run_mu(c);
    if (s == "dynamics") return run_dynamics(c);
    if (s == "pde") return run_pde(c);
    if (s == "tail") return run_tail(c);
    if (s == "ldp-sweep") return run_ldp_sweep(c);
    throw ValidationError("subcommand '" + s + "' is not a computation");
}

}  // namespace beatnls::cli
