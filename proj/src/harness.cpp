#include "kawarada/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "kawarada/error.hpp"
#include "kawarada/spectral.hpp"

namespace kawarada {

std::string to_string(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::Quenched: return "quenched";
        case OutcomeKind::HorizonReached: return "horizon_reached";
        case OutcomeKind::StopLevelReached: return "stop_level_reached";
        case OutcomeKind::GuardBlocked: return "guard_blocked";
        case OutcomeKind::Error: return "error";
    }
    return "unknown";
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
    return m;
}

double max_value(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

std::optional<double> resolve_cap(const ControllerSettings& c, const Mesh& mesh,
                                  const DegeneracyField& phi, const ProblemSpec& spec) {
    switch (c.cap_mode) {
        case TauCapMode::Positivity: return cfl_step_cap(mesh, phi, spec.edges);
        case TauCapMode::Fixed:
            if (!(c.cap_value > 0.0)) throw Error(ErrorKind::InvalidArgument, "fixed tau cap must be positive");
            return c.cap_value;
        case TauCapMode::None: return std::nullopt;
    }
    return std::nullopt;
}

void fail_outcome(RunOutcome& out, const Error& e) {
    out.kind = OutcomeKind::Error;
    out.error_kind = to_string(e.kind());
    out.message = e.what();
}

}  // namespace

ProblemSpec benchmark1d_problem() {
    using std::numbers::pi;
    ProblemSpec spec;
    spec.edges = {pi, 1.0, 1.0};
    const double p = (std::sqrt(5.0) - 1.0) / 2.0;
    spec.custom_weight = [p](double x, double, double) {
        return std::pow(x, p) * std::pow(pi - x, 1.0 - p);
    };
    spec.source = SourceFn::power(1.0);
    spec.u0 = InitialField::sine(0.001);
    spec.t0 = 0.0;
    spec.t_max = 1.0;
    return spec;
}

Mesh benchmark1d_mesh(std::size_t interior) { return Mesh({make_uniform_axis(interior)}); }

RunOptions benchmark1d_options() {
    RunOptions opts;
    opts.controller.tau0 = 1e-4;
    opts.controller.tau_min = 1e-9;
    opts.controller.cap_mode = TauCapMode::Positivity;
    return opts;
}

RunTrace run(const ProblemSpec& spec, const Mesh& mesh, const RunOptions& opts,
             const std::optional<Checkpoint>& resume) {
    spec.validate();
    RunTrace trace;

    StepConfig cfg = opts.step;
    const std::vector<double> v_init = initial_state(spec, mesh);
    if (cfg.source_mode == SourceMode::Frozen && cfg.frozen_source.empty()) {
        cfg.frozen_source = eval_source(spec.source, make_degeneracy(spec, mesh), v_init);
    }
    LodScheme scheme(mesh, spec, cfg);

    const auto& ctl = opts.controller;
    trace.criteria = evaluate_criteria(scheme, spec, v_init, ctl.tau0);
    trace.tau_cap = resolve_cap(ctl, mesh, scheme.phi(), spec);

    const auto failures = trace.criteria.failures();
    if (opts.strict && !failures.empty()) {
        trace.outcome.kind = OutcomeKind::GuardBlocked;
        trace.outcome.blocked_by = failures;
        trace.outcome.message = "blocked by guard: " + failures.front();
        trace.final_state = StateVector{v_init, spec.t0, 0};
        return trace;
    }

    std::optional<StepController> controller;
    double fixed_tau = ctl.tau0;
    if (ctl.adaptive) {
        controller.emplace(ctl.tau0, ctl.tau_min, trace.tau_cap);
    } else {
        if (!(ctl.tau0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau0 must be positive");
        if (trace.tau_cap) fixed_tau = std::min(fixed_tau, *trace.tau_cap);
    }

    StateVector state{v_init, spec.t0, 0};
    if (resume) {
        if (resume->state.values.size() != mesh.size()) {
            throw Error(ErrorKind::InvalidArgument, "checkpoint state does not match the mesh");
        }
        state = resume->state;
        if (controller) controller->restore(resume->controller);
    }
    if (opts.keep_states) trace.states.push_back(state.values);

    const double cfl_beta = trace.criteria.cfl.beta_min;
    const double cfl_e2 = trace.criteria.cfl.min_edge_sq;
    const double t_end = spec.t_max;
    const double t_slack = 1e-14 * std::max(1.0, std::abs(t_end));
    auto& outcome = trace.outcome;
    outcome.kind = OutcomeKind::HorizonReached;

    std::size_t taken = 0;
    bool finished = false;
    std::optional<double> retry_tau;
    while (!finished) {
        if (state.t >= t_end - t_slack) {
            outcome.kind = OutcomeKind::HorizonReached;
            break;
        }
        if (taken >= opts.max_steps) {
            outcome.kind = OutcomeKind::Error;
            outcome.error_kind = to_string(ErrorKind::IterationFailure);
            outcome.message = "step budget of " + std::to_string(opts.max_steps) + " exhausted";
            break;
        }
        double tau = controller ? controller->current_step() : fixed_tau;
        if (retry_tau) {
            tau = *retry_tau;
            retry_tau.reset();
        }
        bool last = false;
        if (opts.clip_to_horizon && state.t + tau >= t_end - t_slack) {
            tau = t_end - state.t;
            last = true;
        }

        const bool cfl_ok = tau / cfl_beta < cfl_e2;
        if (opts.strict && !cfl_ok) {
            outcome.kind = OutcomeKind::GuardBlocked;
            outcome.blocked_by = {"check_cfl"};
            outcome.message = "step " + std::to_string(state.step + 1) + " violates check_cfl";
            break;
        }

        StepResult res;
        try {
            res = scheme.step(state, tau);
        } catch (const Error& e) {
            fail_outcome(outcome, e);
            break;
        }
        if (last) res.state.t = t_end;
        ++taken;

        const auto verdict = monitor_step(state.values, res.state.values, spec.quench_eps);
        if (verdict.quenched && controller && tau > ctl.tau_min) {
            // refine the bracket: retry the crossing step with a smaller one
            retry_tau = std::max(0.5 * tau, ctl.tau_min);
            ++trace.rejected_steps;
            continue;
        }
        if (verdict.quenched) {
            outcome.kind = OutcomeKind::Quenched;
            outcome.quench_time = 0.5 * (state.t + res.state.t);
            outcome.bracket = res.state.t - state.t;
            outcome.quench_location = verdict.argmax;
            outcome.quench_coordinates = mesh.coordinates(verdict.argmax);
            trace.total_clamp_events += res.clamp_events;
            break;
        }

        StepRecord rec;
        rec.step = res.state.step;
        rec.t = res.state.t;
        rec.tau = tau;
        rec.max_v = verdict.max_value;
        rec.argmax = verdict.argmax;
        rec.derivative = derivative_scalar(state.values, res.state.values, tau);
        rec.clamp_events = res.clamp_events;
        rec.positive = verdict.positive;
        rec.monotone = verdict.monotone;
        rec.cfl_ok = cfl_ok;
        trace.records.push_back(rec);
        trace.total_clamp_events += res.clamp_events;

        if (controller) controller->observe(rec.derivative, tau);
        state = std::move(res.state);
        if (opts.keep_states) trace.states.push_back(state.values);

        if (opts.stop_at && verdict.max_value >= *opts.stop_at) {
            outcome.kind = OutcomeKind::StopLevelReached;
            finished = true;
        }
    }

    trace.final_state = std::move(state);
    if (controller) {
        trace.controller = controller->history();
    } else {
        trace.controller.current = fixed_tau;
    }
    return trace;
}

PerturbationResult stability_run(const ProblemSpec& spec, const Mesh& mesh,
                                 const StabilityOptions& opts) {
    if (!(opts.perturbation.magnitude > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "perturbation magnitude must be positive");
    }
    std::mt19937_64 rng(opts.perturbation.seed);
    std::uniform_real_distribution<double> dist(-opts.perturbation.magnitude,
                                                opts.perturbation.magnitude);
    std::vector<double> z0(mesh.size());
    for (double& z : z0) z = dist(rng);
    return stability_run(spec, mesh, opts, z0);
}

PerturbationResult stability_run(const ProblemSpec& spec, const Mesh& mesh,
                                 const StabilityOptions& opts, const std::vector<double>& z0) {
    spec.validate();
    if (opts.tau_schedule.empty()) throw Error(ErrorKind::InvalidArgument, "empty step schedule");
    for (double tau : opts.tau_schedule) {
        if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "step sizes must be positive");
    }
    if (z0.size() != mesh.size()) throw Error(ErrorKind::InvalidArgument, "perturbation size mismatch");
    if (opts.mode == StabilityMode::Live && !(opts.stop_at > 0.0 && opts.stop_at <= 0.9)) {
        throw Error(ErrorKind::InvalidArgument, "live stop level must lie in (0, 0.9]");
    }

    const std::vector<double> v0 = initial_state(spec, mesh);
    std::vector<double> w0(v0.size());
    for (std::size_t n = 0; n < v0.size(); ++n) {
        w0[n] = v0[n] + z0[n];
        if (!(w0[n] < 1.0)) throw Error(ErrorKind::QuenchDomain, "perturbed state leaves [0,1)");
    }

    StepConfig cfg = opts.step;
    const DegeneracyField phi = make_degeneracy(spec, mesh);
    if (opts.mode == StabilityMode::Frozen) {
        cfg.source_mode = SourceMode::Frozen;
        cfg.frozen_source = eval_source(spec.source, phi, v0);
    } else {
        cfg.source_mode = SourceMode::Predictor;
    }
    LodScheme base(mesh, spec, cfg);
    LodScheme twin(mesh, spec, cfg);

    PerturbationResult r;
    r.K = check_regularity(mesh, base.phi(), spec.edges).K;
    const double z0_norm = norm2(z0);
    r.norms.push_back(z0_norm);
    r.times.push_back(spec.t0);

    auto jac_max = [&](std::span<const double> v) {
        return max_value(eval_source_jacobian_diag(base.source(), base.phi(), v));
    };

    StateVector a{v0, spec.t0, 0};
    StateVector b{w0, spec.t0, 0};
    if (opts.mode == StabilityMode::Live) r.G = std::max(jac_max(a.values), jac_max(b.values));

    std::vector<double> z_prev = z0;
    std::vector<double> phi_z(z0.size());
    std::map<double, double> factor_products;  // tau -> prod_sigma ||F_sigma(tau)||_2

    for (double tau : opts.tau_schedule) {
        if (opts.mode == StabilityMode::Frozen) {
            auto it = factor_products.find(tau);
            if (it == factor_products.end()) {
                require_oracle_size(mesh.size());
                double prod = 1.0;
                for (const auto& op : base.operators()) {
                    const DenseMatrix f =
                        materialize_backward_factor(op, tau) * materialize_forward_factor(op, tau);
                    prod *= spectral_norm(f);
                }
                factor_products.emplace(tau, prod);
            }
        }

        StepResult ra;
        StepResult rb;
        try {
            ra = base.step(a, tau);
            rb = twin.step(b, tau);
        } catch (const Error& e) {
            if (opts.mode == StabilityMode::Live && e.kind() == ErrorKind::QuenchDomain) {
                r.inconclusive = true;
                break;
            }
            throw;
        }

        std::vector<double> z(z0.size());
        for (std::size_t n = 0; n < z.size(); ++n) z[n] = rb.state.values[n] - ra.state.values[n];

        if (opts.mode == StabilityMode::Frozen) {
            base.apply_product(tau, z_prev, phi_z);
            r.recursion_defect = std::max(r.recursion_defect, max_abs_diff(z, phi_z));
        } else {
            const double ma = max_value(ra.state.values);
            const double mb = max_value(rb.state.values);
            if (!(std::max(ma, mb) < 1.0 - spec.quench_eps)) {
                r.inconclusive = true;
                break;
            }
            r.G = std::max({r.G, jac_max(ra.state.values), jac_max(rb.state.values),
                            jac_max(base.predictor(a.values, tau)),
                            jac_max(twin.predictor(b.values, tau))});
        }

        a = std::move(ra.state);
        b = std::move(rb.state);
        r.norms.push_back(norm2(z));
        r.times.push_back(a.t);
        r.elapsed = a.t - spec.t0;
        ++r.steps;
        z_prev = std::move(z);

        if (opts.mode == StabilityMode::Live &&
            std::max(max_value(a.values), max_value(b.values)) >= opts.stop_at) {
            break;
        }
    }

    if (z0_norm > 0.0) {
        double c = 0.0;
        for (double n : r.norms) c = std::max(c, n / z0_norm);
        r.c_emp = c;
    }

    if (opts.mode == StabilityMode::Frozen) {
        for (const auto& [tau, prod] : factor_products) {
            r.c_measured = std::max(r.c_measured, (prod - 1.0 - 3.0 * r.K * tau) / (tau * tau));
        }
        double env = 1.0;
        for (std::size_t l = 0; l < r.steps; ++l) {
            const double tau = opts.tau_schedule[l];
            env *= 1.0 + 3.0 * r.K * tau + r.c_measured * tau * tau;
        }
        r.envelope = env;
    } else {
        r.envelope = std::exp(r.G * r.elapsed) * (1.0 + 3.0 * r.K * r.elapsed);
    }
    return r;
}

std::vector<ConvergenceRow> convergence_study(const ProblemSpec& spec, const Mesh& mesh,
                                              const std::vector<double>& taus,
                                              const ConvergenceOptions& opts) {
    if (taus.empty()) throw Error(ErrorKind::InvalidArgument, "no step sizes given");
    std::vector<ConvergenceRow> rows;
    for (double tau : taus) {
        ConvergenceRow row;
        row.tau = tau;
        row.unknowns = mesh.size();

        if (opts.t_common > 0.0) {
            ProblemSpec fixed = spec;
            fixed.t_max = spec.t0 + opts.t_common;
            RunOptions ro = opts.run;
            ro.controller.tau0 = tau;
            ro.controller.adaptive = false;
            ro.controller.cap_mode = TauCapMode::None;
            ro.clip_to_horizon = true;
            ro.strict = false;
            const auto tr = run(fixed, mesh, ro);
            row.terminal_time = tr.final_state.t;
            row.terminal_state = tr.final_state.values;
            row.terminal_max_v = max_value(row.terminal_state);
        }
        if (opts.quench_runs) {
            RunOptions ro = opts.run;
            ro.controller.tau0 = tau;
            ro.strict = false;
            const auto tr = run(spec, mesh, ro);
            if (tr.outcome.kind == OutcomeKind::Quenched) {
                row.quench_time = tr.outcome.quench_time;
                row.bracket = tr.outcome.bracket;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> observed_orders(const std::vector<ConvergenceRow>& rows) {
    std::vector<double> errs;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const auto& x = rows[k].terminal_state;
        const auto& y = rows[k + 1].terminal_state;
        if (x.empty() || x.size() != y.size()) return {};
        errs.push_back(max_abs_diff(x, y));
    }
    std::vector<double> orders;
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
        orders.push_back(std::log2(errs[k] / errs[k + 1]));
    }
    return orders;
}

}  // namespace kawarada
