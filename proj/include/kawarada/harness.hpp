#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kawarada/adapt.hpp"
#include "kawarada/guard.hpp"
#include "kawarada/stepper.hpp"

namespace kawarada {

enum class TauCapMode { Positivity, Fixed, None };

struct ControllerSettings {
    double tau0 = 1e-4;
    double tau_min = 1e-9;
    TauCapMode cap_mode = TauCapMode::Positivity;
    double cap_value = 0.0;   // TauCapMode::Fixed
    bool adaptive = true;     // false: constant steps of min(tau0, cap)
};

struct RunOptions {
    ControllerSettings controller;
    StepConfig step;
    bool strict = false;
    std::size_t max_steps = 50'000'000;
    /// Stop once max v reaches this level (used by stability runs); unset runs to quench.
    std::optional<double> stop_at;
    bool keep_states = false;  // store every accepted state in the trace
    /// Shorten the final step to land on t_max exactly. Off by default: the run stops at the
    /// first t >= t_max, which keeps fixed-step runs on a single step map.
    bool clip_to_horizon = false;
};

struct StepRecord {
    std::size_t step = 0;  // index of the accepted state
    double t = 0.0;
    double tau = 0.0;      // step that produced this state
    double max_v = 0.0;
    std::size_t argmax = 0;
    double derivative = 0.0;  // D = ||v_l - v_{l-1}||_inf / tau
    std::size_t clamp_events = 0;
    bool positive = true;
    bool monotone = true;
    bool cfl_ok = true;
};

enum class OutcomeKind { Quenched, HorizonReached, StopLevelReached, GuardBlocked, Error };

std::string to_string(OutcomeKind kind);

struct RunOutcome {
    OutcomeKind kind = OutcomeKind::HorizonReached;
    double quench_time = 0.0;     // midpoint of [t_last_ok, t_detected]
    double bracket = 0.0;         // t_detected - t_last_ok
    std::optional<std::size_t> quench_location;
    std::array<double, 3> quench_coordinates{0.0, 0.0, 0.0};
    std::string error_kind;
    std::string message;
    std::vector<std::string> blocked_by;
};

struct RunTrace {
    CriteriaReport criteria;
    std::optional<double> tau_cap;
    std::vector<StepRecord> records;
    RunOutcome outcome;
    StateVector final_state;
    StepController::History controller;
    std::size_t total_clamp_events = 0;
    std::size_t rejected_steps = 0;  // quench-crossing steps retried with a smaller tau
    std::vector<std::vector<double>> states;  // only with keep_states

    /// Derivative of the last accepted step (0 when no step was taken).
    double last_derivative() const { return records.empty() ? 0.0 : records.back().derivative; }
};

/// Everything a run needs that is not part of the problem definition.
struct Checkpoint {
    StateVector state;
    StepController::History controller;
};

/// 1D benchmark on [0, pi]: u0 = 0.001 sin x, f = 1/(1-u),
/// s(x) = x^p (pi - x)^(1-p) with p = (sqrt 5 - 1)/2, horizon t_max = 1.
ProblemSpec benchmark1d_problem();
/// Uniform 1D mesh with `interior` nodes for benchmark1d_problem.
Mesh benchmark1d_mesh(std::size_t interior = 200);
/// Controller used for the benchmark: tau0 = 1e-4, tau_min = 1e-9, default cap.
RunOptions benchmark1d_options();

/// Runs the scheme until quench, t_max, stop level or error.
RunTrace run(const ProblemSpec& spec, const Mesh& mesh, const RunOptions& opts,
             const std::optional<Checkpoint>& resume = std::nullopt);

enum class StabilityMode { Frozen, Live };

struct Perturbation {
    std::uint64_t seed = 1;
    double magnitude = 1e-8;
};

struct PerturbationResult {
    std::vector<double> norms;  // ||z_l||_2, l = 0..steps
    std::vector<double> times;
    double c_emp = 0.0;         // max_l ||z_l|| / ||z_0||
    double envelope = 0.0;      // theoretical bound on c_emp
    double K = 0.0;
    double G = 0.0;             // largest observed source Jacobian diagonal (live)
    double c_measured = 0.0;    // quadratic coefficient in the frozen envelope
    double elapsed = 0.0;
    double recursion_defect = 0.0;  // frozen: max ||z_{l+1} - Phi z_l||_inf
    bool inconclusive = false;      // live run reached the quench neighbourhood
    std::size_t steps = 0;
};

struct StabilityOptions {
    StabilityMode mode = StabilityMode::Frozen;
    Perturbation perturbation;
    std::vector<double> tau_schedule;  // one entry per step
    double stop_at = 0.5;              // live mode: stop once max v reaches this
    StepConfig step;                   // sweep order etc. (source mode is set by `mode`)
};

/// Twin runs from v0 and v0 + z0 with z0 uniform in [-m, m].
/// Throws InvalidArgument when the perturbation is zero.
PerturbationResult stability_run(const ProblemSpec& spec, const Mesh& mesh,
                                 const StabilityOptions& opts);

/// Same, with an explicit initial perturbation (may be zero).
PerturbationResult stability_run(const ProblemSpec& spec, const Mesh& mesh,
                                 const StabilityOptions& opts, const std::vector<double>& z0);

struct ConvergenceRow {
    double tau = 0.0;
    std::size_t unknowns = 0;
    double terminal_time = 0.0;
    double terminal_max_v = 0.0;
    std::vector<double> terminal_state;
    std::optional<double> quench_time;
    double bracket = 0.0;
};

struct ConvergenceOptions {
    double t_common = 0.0;          // fixed-step runs stop here; 0 means skip them
    bool quench_runs = true;        // also run adaptively (tau0 = tau) to estimate T
    RunOptions run;                 // template; controller.tau0 replaced per row
};

/// One row per tau on a fixed mesh.
std::vector<ConvergenceRow> convergence_study(const ProblemSpec& spec, const Mesh& mesh,
                                              const std::vector<double>& taus,
                                              const ConvergenceOptions& opts);

/// Observed orders log2(||x_k - x_{k+1}|| / ||x_{k+1} - x_{k+2}||) for consecutive
/// halvings of the terminal states.
std::vector<double> observed_orders(const std::vector<ConvergenceRow>& rows);

}  // namespace kawarada
