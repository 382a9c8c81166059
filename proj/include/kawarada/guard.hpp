#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kawarada/mesh.hpp"
#include "kawarada/model.hpp"
#include "kawarada/stepper.hpp"

namespace kawarada {

/// Positivity step-size condition tau / beta_min < min{a^2, b^2, c^2} with
/// beta_min = h_min^2 / (2 ||B||_2) and 1/||B||_2 = min phi.
struct CflCheck {
    bool ok = false;
    double tau = 0.0;
    double beta_min = 0.0;
    double min_edge_sq = 0.0;
    double bound = 0.0;          // beta_min * min edge^2, the largest admissible tau
    double margin = 0.0;         // min edge^2 - tau / beta_min
    double relative_margin = 0.0;  // 1 - tau / bound
};

CflCheck check_cfl(double tau, const Mesh& mesh, const DegeneracyField& phi,
                   const std::array<double, 3>& edges);

/// Largest step allowed by check_cfl, shrunk by (1 - 1e-9) so it passes strictly.
double cfl_step_cap(const Mesh& mesh, const DegeneracyField& phi, const std::array<double, 3>& edges);

/// First-step mesh bound h_max^2 < 1/(2 min edge^2) min{1/f0, 4/f(tau0 f0 / phi_min)}.
struct MeshBoundCheck {
    bool ok = false;
    double h_max = 0.0;
    double source_branch = 0.0;  // 1 / (2 min edge^2 f0)
    double blowup_branch = 0.0;  // 4 / (2 min edge^2 f(tau0 f0 / phi_min))
    double threshold = 0.0;      // min of the branches, bound on h_max^2
    std::string binding;         // "source" or "blowup"
};

/// Throws QuenchDomain if tau0 f0 / phi_min >= 1.
MeshBoundCheck check_mesh_bound(const Mesh& mesh, const ProblemSpec& spec, double tau0,
                                const DegeneracyField& phi);

/// Start conditions for monotone growth:
/// (a) C v0 + g(v0)/2 > 0 componentwise,
/// (b) tau0 * d0 < 2 with d0 the largest source Jacobian diagonal f'/phi sampled at v0
///     and at the predictor state.
struct MonotoneStartCheck {
    bool a_ok = false;
    double a_min = 0.0;  // smallest component of C v0 + g(v0)/2
    bool b_ok = false;
    double d0 = 0.0;
    double tau0 = 0.0;
    bool ok() const noexcept { return a_ok && b_ok; }
};

/// Criterion (b) alone: tau0 * d0 < 2.
bool jacobian_start_ok(double tau0, double d0) noexcept;

MonotoneStartCheck check_monotonicity_start(std::span<const double> v0, const LodScheme& scheme,
                                            double tau0);

/// Grid regularity: for every row i of every direction,
///   1/(h_sigma^2 phi_nb) - 1/(h_{i-1} h_i phi_i) <= K/2
/// where h_sigma is the smallest spacing of the axis and phi_nb the smallest phi at the
/// row's in-line neighbours. Rows are scaled by 1/edge^2 to match M_sigma.
struct RegularityCheck {
    bool ok = false;
    double K = 0.0;
    std::array<double, 3> per_axis_max{0.0, 0.0, 0.0};  // max left-hand side per axis
};

RegularityCheck check_regularity(const Mesh& mesh, const DegeneracyField& phi,
                                 const std::array<double, 3>& edges = {1.0, 1.0, 1.0});

struct MonitorVerdict {
    bool positive = false;
    bool monotone = false;
    bool quenched = false;
    std::optional<std::size_t> quench_location;
    double max_value = 0.0;
    std::size_t argmax = 0;
};

/// Verdicts for one accepted step. Monotone allows a -1e-12 roundoff slack.
MonitorVerdict monitor_step(std::span<const double> prev, std::span<const double> next,
                            double quench_eps);

/// Nonzero-start variant of the first-step bound, evaluated as a diagnostic only:
/// h_max^2 < (1 - 8 max v0) / (2 F min edge^2), F = f(max v0 + tau0 max(C v0 + g(v0))).
struct NonzeroStartDiagnostic {
    bool applicable = false;  // 0 < v0 < 1/8
    bool ok = false;
    double F = 0.0;
    double threshold = 0.0;
};

NonzeroStartDiagnostic nonzero_start_diagnostic(std::span<const double> v0, const LodScheme& scheme,
                                                const ProblemSpec& spec, double tau0);

struct CriteriaReport {
    CflCheck cfl;
    std::optional<MeshBoundCheck> mesh_bound;  // absent when the bound is undefined
    std::string mesh_bound_error;
    MonotoneStartCheck monotone_start;
    RegularityCheck regularity;
    NonzeroStartDiagnostic nonzero_start;
    double tau_bound_monotone = 0.0;  // min{cfl bound, min 2 phi / f'(v0)}
    double jacobian_G = 0.0;          // max f'(v0)/phi

    /// Names of the blocking criteria that failed (empty when all pass).
    std::vector<std::string> failures() const;
};

CriteriaReport evaluate_criteria(const LodScheme& scheme, const ProblemSpec& spec,
                                 std::span<const double> v0, double tau0);

}  // namespace kawarada
