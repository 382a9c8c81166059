#include "kawarada/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

#include "kawarada/error.hpp"
#include "kawarada/spectral.hpp"

namespace kawarada {

namespace {

int exit_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Config:
        case ErrorKind::InvalidArgument:
        case ErrorKind::InvalidGrid:
        case ErrorKind::EmptyGrid: return exit_code::config;
        case ErrorKind::GridTooLarge: return exit_code::grid_too_large;
        default: return exit_code::numeric;
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
    return f;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double min_entry(const DenseMatrix& m) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) lo = std::min(lo, m(i, j));
    return lo;
}

std::string axis_name(std::size_t s) { return "axis " + std::to_string(s); }

}  // namespace

json run_info(const RunConfig& cfg) {
    json problem = {{"edges", cfg.spec.edges},
                    {"q", cfg.spec.q},
                    {"weight", cfg.weight},
                    {"source_power", cfg.source_power},
                    {"source_scale", cfg.source_scale},
                    {"u0", cfg.u0},
                    {"u0_value", cfg.u0_value},
                    {"t0", cfg.spec.t0},
                    {"t_max", cfg.spec.t_max},
                    {"quench_eps", cfg.spec.quench_eps}};
    if (cfg.weight == "endpoint") problem["weight_p"] = cfg.weight_p;
    json axes = json::array();
    for (const auto& a : cfg.axes) {
        const char* kind = a.kind == GridKind::Uniform ? "uniform" : a.kind == GridKind::Graded ? "graded" : "explicit";
        json j = {{"kind", kind}, {"n", a.interior}};
        if (a.kind == GridKind::Graded) j["gamma"] = a.gamma;
        if (a.kind == GridKind::Explicit) j["nodes"] = a.explicit_nodes;
        axes.push_back(j);
    }
    const auto& c = cfg.run.controller;
    const char* cap = c.cap_mode == TauCapMode::Positivity ? "positivity" : c.cap_mode == TauCapMode::None ? "none" : "fixed";
    const auto& st = cfg.run.step;
    const char* mode = st.source_mode == SourceMode::Predictor    ? "predictor"
                       : st.source_mode == SourceMode::FixedPoint ? "fixed_point"
                                                                  : "frozen";
    json stepping = {{"tau0", c.tau0},
                     {"tau_min", c.tau_min},
                     {"cap", cap},
                     {"adaptive", c.adaptive},
                     {"source_mode", mode},
                     {"sweep_order", st.sweep_order},
                     {"clamp_predictor", st.clamp_predictor},
                     {"max_steps", cfg.run.max_steps},
                     {"clip_to_horizon", cfg.run.clip_to_horizon}};
    if (c.cap_mode == TauCapMode::Fixed) stepping["cap_value"] = c.cap_value;
    return {{"problem", problem},
            {"grid", axes},
            {"stepping", stepping},
            {"strict", cfg.run.strict},
            {"seed", cfg.seed}};
}

std::string to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::Pass: return "pass";
        case VerifyStatus::Fail: return "FAIL";
        case VerifyStatus::OutOfRegime: return "out of regime";
    }
    return "?";
}

std::vector<VerifyRow> verify_properties(const RunConfig& cfg) {
    const Mesh mesh = cfg.build_mesh();
    require_oracle_size(mesh.size());
    const auto& spec = cfg.spec;
    const DegeneracyField phi = make_degeneracy(spec, mesh);
    const auto ops = build_operators(mesh, phi, spec.edges);
    const double tau = cfg.verify.tau.value_or(cfl_step_cap(mesh, phi, spec.edges));
    const auto cfl = check_cfl(tau, mesh, phi, spec.edges);
    const double K = check_regularity(mesh, phi, spec.edges).K;

    std::vector<VerifyRow> rows;
    auto add = [&](std::string prop, std::string subject, bool ok, double value, double bound, std::string note = {}) {
        rows.push_back({std::move(prop), std::move(subject), ok ? VerifyStatus::Pass : VerifyStatus::Fail, value,
                        bound, std::move(note)});
    };
    auto skip = [&](std::string prop, std::string subject) {
        rows.push_back({std::move(prop), std::move(subject), VerifyStatus::OutOfRegime, tau, cfl.bound,
                        "tau exceeds the positivity bound"});
    };

    for (std::size_t s = 0; s < mesh.dim(); ++s) {
        const auto& axis = mesh.axis(s);
        const double norm = spectral_norm(materialize_stencil(TridiagStencil::from_axis(axis)));
        const double bound = gersgorin_T_bound(axis);
        add("gersgorin_T_bound", axis_name(s), norm <= bound * (1.0 + 1e-12), norm, bound);
    }

    for (std::size_t s = 0; s < ops.size(); ++s) {
        if (!cfl.ok) {
            skip("factor_sign", axis_name(s));
            continue;
        }
        const double inv_min = min_entry(dense_inverse(materialize_backward_factor(ops[s], tau)));
        const double fwd_min = min_entry(materialize_forward_factor(ops[s], tau));
        add("factor_sign", axis_name(s), inv_min >= -1e-13 && fwd_min >= 0.0, std::min(inv_min, fwd_min), -1e-13,
            "min entry of the inverse backward and forward factors");
    }

    for (std::size_t s = 0; s < ops.size(); ++s) {
        const auto b = materialize_backward_factor(ops[s], tau);
        const std::vector<double> ones(mesh.size(), 1.0);
        const auto r = b.apply(ones);
        const double lo = *std::min_element(r.begin(), r.end());
        // row sums of M vanish only to roundoff, which tau scales up
        double diag = 0.0;
        for (std::size_t i = 0; i < b.dim(); ++i) diag = std::max(diag, std::abs(b(i, i)));
        const double tol = 1e-13 * std::max(1.0, diag);
        add("ones_vector", axis_name(s), lo >= 1.0 - tol, lo, 1.0 - tol, "min of (I - tau/2 M) 1");
    }

    {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> d(0.0, 0.3);
        double worst = -std::numeric_limits<double>::infinity();
        bool ok = true;
        const std::size_t n = cfg.verify.matrix_size;
        for (std::size_t k = 0; k < cfg.verify.random_matrices; ++k) {
            DenseMatrix a(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) a(i, j) = d(rng);
            for (double alpha : {0.1, 1.0}) {
                const auto c = matrix_exp_bound_check(a, alpha);
                ok = ok && c.holds();
                worst = std::max(worst, c.lhs / c.rhs);
            }
        }
        add("exp_log_norm_bound", "random " + std::to_string(n) + "x" + std::to_string(n), ok, worst, 1.0,
            "max ||E(aA)|| / exp(a mu(A))");
        for (std::size_t s = 0; s < ops.size(); ++s) {
            const auto c = matrix_exp_bound_check(materialize(ops[s]), tau);
            add("exp_log_norm_bound", axis_name(s), c.holds(), c.lhs, c.rhs);
        }
    }

    for (std::size_t s = 0; s < ops.size(); ++s) {
        const double mu = log_norm(materialize(ops[s]));
        add("log_norm_K", axis_name(s), mu <= K + 1e-9 * (1.0 + std::abs(K)), mu, K);
    }

    for (std::size_t s = 0; s < ops.size(); ++s) {
        if (!cfl.ok) {
            skip("factor_norm_growth", axis_name(s));
            continue;
        }
        const auto sweep = factor_norm_sweep(ops[s], tau, K, cfg.verify.halvings);
        add("factor_norm_growth", axis_name(s), sweep.bounded, sweep.rows.back().norm, sweep.rows.back().linear,
            "||F|| against 1 + tau K at the smallest tau; pass when the tau^2 excess stays bounded");
    }
    return rows;
}

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_config(opts.config);
        if (opts.strict) cfg.run.strict = true;
        if (opts.seed) cfg.seed = *opts.seed;
        const std::string prefix = opts.out.value_or(cfg.output.prefix);
        const Mesh mesh = cfg.build_mesh();

        std::optional<Checkpoint> resume;
        if (auto path = opts.resume ? opts.resume : cfg.output.resume) resume = load_checkpoint(*path);

        const RunTrace trace = run(cfg.spec, mesh, cfg.run, resume);

        if (cfg.output.jsonl) {
            auto f = open_out(prefix + ".jsonl");
            write_trace_jsonl(f, trace, run_info(cfg));
        }
        if (cfg.output.csv) {
            auto f = open_out(prefix + ".csv");
            write_trace_csv(f, trace);
        }
        if (cfg.output.checkpoint) save_checkpoint(prefix + ".checkpoint.json", {trace.final_state, trace.controller});

        const auto& o = trace.outcome;
        out << "outcome: " << to_string(o.kind) << '\n';
        out << "steps: " << trace.records.size() << "  t: " << fmt(trace.final_state.t) << '\n';
        const auto failures = trace.criteria.failures();
        for (const auto& f : failures) out << "guard: " << f << " failed" << (cfg.run.strict ? "" : " (advisory)") << '\n';
        switch (o.kind) {
            case OutcomeKind::Quenched:
                out << "T: " << fmt(o.quench_time) << "  bracket: " << fmt(o.bracket) << "  node: "
                    << o.quench_location.value_or(0) << '\n';
                return exit_code::ok;
            case OutcomeKind::HorizonReached:
            case OutcomeKind::StopLevelReached: return exit_code::ok;
            case OutcomeKind::GuardBlocked: err << o.message << '\n'; return exit_code::guard_blocked;
            case OutcomeKind::Error: err << o.message << '\n'; return exit_code::numeric;
        }
        return exit_code::numeric;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_for(e);
    }
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_config(opts.config);
        if (opts.seed) cfg.seed = *opts.seed;
        std::vector<VerifyRow> rows;
        try {
            rows = verify_properties(cfg);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::GridTooLarge) {
                err << e.what() << "\nuse a smaller verification grid, e.g. n = 3 per axis, or raise "
                    << "KAWARADA_ORACLE_CAP\n";
                return exit_code::grid_too_large;
            }
            throw;
        }
        bool failed = false;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-20s %-14s %-14s %14s %14s\n", "property", "subject", "status", "value", "bound");
        out << buf;
        json table = json::array();
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%-20s %-14s %-14s %14.6g %14.6g\n", r.property.c_str(), r.subject.c_str(),
                          to_string(r.status).c_str(), r.value, r.bound);
            out << buf;
            failed = failed || r.status == VerifyStatus::Fail;
            table.push_back({{"property", r.property},
                             {"subject", r.subject},
                             {"status", to_string(r.status)},
                             {"value", r.value},
                             {"bound", r.bound},
                             {"note", r.note}});
        }
        if (opts.out) {
            auto f = open_out(*opts.out);
            f << table.dump(1) << '\n';
        }
        return failed ? exit_code::property_failed : exit_code::ok;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_for(e);
    }
}

int cmd_stability(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_config(opts.config);
        auto& st = cfg.stability;
        if (opts.mode) {
            if (*opts.mode == "frozen") st.mode = StabilityMode::Frozen;
            else if (*opts.mode == "live") st.mode = StabilityMode::Live;
            else throw Error(ErrorKind::Config, "--mode must be frozen or live");
        }
        if (opts.mag) st.magnitude = *opts.mag;
        if (opts.seed) cfg.seed = *opts.seed;
        if (!(st.magnitude > 0.0)) {
            err << "degenerate perturbation: magnitude must be positive\n";
            return exit_code::config;
        }
        if (st.steps == 0) throw Error(ErrorKind::Config, "stability needs at least one step");

        const Mesh mesh = cfg.build_mesh();
        const double tau = st.tau.value_or(cfl_step_cap(mesh, make_degeneracy(cfg.spec, mesh), cfg.spec.edges));
        StabilityOptions so;
        so.mode = st.mode;
        so.perturbation = {cfg.seed, st.magnitude};
        so.tau_schedule.assign(st.steps, tau);
        so.stop_at = st.stop_at;
        so.step = cfg.run.step;
        const auto r = stability_run(cfg.spec, mesh, so);

        const bool live = st.mode == StabilityMode::Live;
        const double allowed = live ? 1.1 * r.envelope : r.envelope * (1.0 + 1e-12);
        const bool ok = r.inconclusive || r.c_emp <= allowed;

        json j = to_json(r);
        j["mode"] = live ? "live" : "frozen";
        j["seed"] = cfg.seed;
        j["magnitude"] = st.magnitude;
        j["tau"] = tau;
        j["allowed"] = allowed;
        j["within_envelope"] = ok;
        auto f = open_out(opts.out.value_or(cfg.output.prefix + ".stability.json"));
        f << j.dump(1) << '\n';

        out << "mode: " << (live ? "live" : "frozen") << "  steps: " << r.steps << '\n';
        out << "c_emp: " << fmt(r.c_emp) << "  envelope: " << fmt(r.envelope) << "  K: " << fmt(r.K);
        if (live) out << "  G: " << fmt(r.G);
        out << '\n';
        if (r.inconclusive) out << "inconclusive: the run reached the quench neighbourhood\n";
        if (!ok) {
            err << "growth exceeds the envelope\n";
            return exit_code::property_failed;
        }
        return exit_code::ok;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_for(e);
    }
}

int cmd_convergence(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_config(opts.config);
        const auto& cs = cfg.convergence;
        if (cs.taus.size() < 3) throw Error(ErrorKind::Config, "[convergence] taus needs at least three values");
        ConvergenceOptions co;
        co.t_common = cs.t_common;
        co.quench_runs = cs.quench_runs;
        co.run = cfg.run;
        const auto rows = convergence_study(cfg.spec, cfg.build_mesh(), cs.taus, co);

        auto f = open_out(opts.out.value_or(cfg.output.prefix + ".convergence.csv"));
        f << "tau,unknowns,terminal_time,terminal_max_v,quench_time,bracket\n";
        char buf[256];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,", r.tau, r.unknowns, r.terminal_time,
                          r.terminal_max_v);
            f << buf;
            if (r.quench_time) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", *r.quench_time, r.bracket);
                f << buf;
            } else {
                f << ",\n";
            }
            out << "tau " << fmt(r.tau) << "  max v " << fmt(r.terminal_max_v);
            if (r.quench_time) out << "  T " << fmt(*r.quench_time);
            out << '\n';
        }
        const auto orders = observed_orders(rows);
        for (std::size_t k = 0; k < orders.size(); ++k) out << "order " << k << ": " << fmt(orders[k]) << '\n';
        return exit_code::ok;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_for(e);
    }
}

}  // namespace kawarada
