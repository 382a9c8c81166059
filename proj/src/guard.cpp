#include "kawarada/guard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kawarada/error.hpp"

namespace kawarada {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double min_edge_sq(const Mesh& mesh, const std::array<double, 3>& edges) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < mesh.dim(); ++s) m = std::min(m, edges[s] * edges[s]);
    return m;
}

double max_of(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

}  // namespace

CflCheck check_cfl(double tau, const Mesh& mesh, const DegeneracyField& phi,
                   const std::array<double, 3>& edges) {
    CflCheck c;
    c.tau = tau;
    const double h = mesh_extrema(mesh).h_min;
    c.beta_min = 0.5 * h * h * phi.inv_norm;
    c.min_edge_sq = min_edge_sq(mesh, edges);
    c.bound = c.beta_min * c.min_edge_sq;
    c.margin = c.min_edge_sq - tau / c.beta_min;
    c.relative_margin = 1.0 - tau / c.bound;
    c.ok = tau / c.beta_min < c.min_edge_sq;
    return c;
}

double cfl_step_cap(const Mesh& mesh, const DegeneracyField& phi, const std::array<double, 3>& edges) {
    return check_cfl(0.0, mesh, phi, edges).bound * (1.0 - 1e-9);
}

MeshBoundCheck check_mesh_bound(const Mesh& mesh, const ProblemSpec& spec, double tau0,
                                const DegeneracyField& phi) {
    MeshBoundCheck c;
    const double f0 = spec.source.f0();
    const double arg = tau0 * f0 / phi.inv_norm;
    if (!(arg < 1.0)) {
        throw Error(ErrorKind::QuenchDomain,
                    "tau0 f0 / phi_min = " + std::to_string(arg) + " >= 1, mesh bound undefined");
    }
    const double e2 = min_edge_sq(mesh, spec.edges);
    c.h_max = mesh_extrema(mesh).h_max;
    c.source_branch = 1.0 / (2.0 * e2 * f0);
    c.blowup_branch = 4.0 / (2.0 * e2 * spec.source.f(arg));
    c.threshold = std::min(c.source_branch, c.blowup_branch);
    c.binding = c.source_branch <= c.blowup_branch ? "source" : "blowup";
    c.ok = c.h_max * c.h_max < c.threshold;
    return c;
}

bool jacobian_start_ok(double tau0, double d0) noexcept { return tau0 * d0 < 2.0; }

MonotoneStartCheck check_monotonicity_start(std::span<const double> v0, const LodScheme& scheme,
                                            double tau0) {
    MonotoneStartCheck c;
    c.tau0 = tau0;
    const auto& phi = scheme.phi();
    const auto& source = scheme.source();

    // C v0 + g/2 = (C v0 + g) - g/2
    const auto full = apply_full_operator(scheme.operators(), source, phi, v0);
    const auto g = eval_source(source, phi, v0);
    c.a_min = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < v0.size(); ++n) c.a_min = std::min(c.a_min, full[n] - 0.5 * g[n]);
    c.a_ok = c.a_min > 0.0;

    // f' is increasing for the canonical family, so the segment maximum sits at an endpoint
    const auto w = scheme.predictor(v0, tau0);
    const auto d_start = eval_source_jacobian_diag(source, phi, v0);
    double d0 = max_of(d_start);
    if (max_of(w) < 1.0) {
        d0 = std::max(d0, max_of(eval_source_jacobian_diag(source, phi, w)));
    } else {
        d0 = std::numeric_limits<double>::infinity();
    }
    c.d0 = d0;
    c.b_ok = jacobian_start_ok(tau0, d0);
    return c;
}

RegularityCheck check_regularity(const Mesh& mesh, const DegeneracyField& phi,
                                 const std::array<double, 3>& edges) {
    RegularityCheck c;
    double worst = 0.0;
    for (std::size_t s = 0; s < mesh.dim(); ++s) {
        const auto& axis = mesh.axis(s);
        const auto h = axis.spacings();
        const double hs = *std::min_element(h.begin(), h.end());
        const std::size_t len = mesh.counts()[s];
        const std::size_t stride = mesh.stride(s);
        const double inv_e2 = 1.0 / (edges[s] * edges[s]);
        double axis_max = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < mesh.size(); ++n) {
            const std::size_t r = (n / stride) % len;
            double phi_nb = std::numeric_limits<double>::infinity();
            if (r > 0) phi_nb = std::min(phi_nb, phi.values[n - stride]);
            if (r + 1 < len) phi_nb = std::min(phi_nb, phi.values[n + stride]);
            if (len == 1) phi_nb = phi.values[n];
            const double a = 1.0 / (hs * hs * phi_nb);
            const double b = 1.0 / (h[r] * h[r + 1] * phi.values[n]);
            // equal spacings computed as node differences cancel only up to roundoff
            const double diff = std::abs(a - b) <= 16.0 * kEps * std::max(a, b) ? 0.0 : a - b;
            const double lhs = inv_e2 * diff;
            axis_max = std::max(axis_max, lhs);
        }
        c.per_axis_max[s] = axis_max;
        worst = std::max(worst, axis_max);
    }
    c.K = 2.0 * std::max(worst, 0.0);
    c.ok = std::isfinite(c.K);
    return c;
}

MonitorVerdict monitor_step(std::span<const double> prev, std::span<const double> next,
                            double quench_eps) {
    if (prev.size() != next.size()) throw Error(ErrorKind::InvalidArgument, "size mismatch");
    MonitorVerdict v;
    v.positive = true;
    v.monotone = true;
    v.max_value = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < next.size(); ++n) {
        const double x = next[n];
        if (!(x >= 0.0)) v.positive = false;
        if (!(x - prev[n] >= -1e-12)) v.monotone = false;
        // NaN counts as quenched: the state left the domain of the source
        if (std::isnan(x) || x > v.max_value) {
            if (std::isnan(x)) {
                v.max_value = std::numeric_limits<double>::infinity();
                v.argmax = n;
                break;
            }
            v.max_value = x;
            v.argmax = n;
        }
    }
    v.quenched = v.max_value >= 1.0 - quench_eps;
    if (v.quenched) v.quench_location = v.argmax;
    return v;
}

NonzeroStartDiagnostic nonzero_start_diagnostic(std::span<const double> v0, const LodScheme& scheme,
                                                const ProblemSpec& spec, double tau0) {
    NonzeroStartDiagnostic d;
    const double vmax = max_of(v0);
    const double vmin = *std::min_element(v0.begin(), v0.end());
    d.applicable = vmin > 0.0 && vmax < 0.125;
    if (!d.applicable) return d;
    const auto full = apply_full_operator(scheme.operators(), scheme.source(), scheme.phi(), v0);
    const double arg = vmax + tau0 * max_of(full);
    if (!(arg < 1.0)) {
        d.ok = false;
        d.F = std::numeric_limits<double>::infinity();
        return d;
    }
    d.F = spec.source.f(arg);
    const double h = mesh_extrema(scheme.mesh()).h_max;
    d.threshold = (1.0 - 8.0 * vmax) / (2.0 * d.F * min_edge_sq(scheme.mesh(), spec.edges));
    d.ok = h * h < d.threshold;
    return d;
}

std::vector<std::string> CriteriaReport::failures() const {
    std::vector<std::string> out;
    if (!cfl.ok) out.emplace_back("check_cfl");
    if (!mesh_bound || !mesh_bound->ok) out.emplace_back("check_mesh_bound");
    if (!monotone_start.a_ok || !monotone_start.b_ok) out.emplace_back("check_monotonicity_start");
    if (!regularity.ok) out.emplace_back("check_regularity");
    return out;
}

CriteriaReport evaluate_criteria(const LodScheme& scheme, const ProblemSpec& spec,
                                 std::span<const double> v0, double tau0) {
    CriteriaReport r;
    const auto& mesh = scheme.mesh();
    const auto& phi = scheme.phi();
    r.cfl = check_cfl(tau0, mesh, phi, spec.edges);
    try {
        r.mesh_bound = check_mesh_bound(mesh, spec, tau0, phi);
    } catch (const Error& e) {
        r.mesh_bound_error = e.what();
    }
    r.monotone_start = check_monotonicity_start(v0, scheme, tau0);
    r.regularity = check_regularity(mesh, phi, spec.edges);
    r.nonzero_start = nonzero_start_diagnostic(v0, scheme, spec, tau0);
    r.jacobian_G = max_of(eval_source_jacobian_diag(scheme.source(), phi, v0));
    r.tau_bound_monotone = std::min(r.cfl.bound, 2.0 / r.monotone_start.d0);
    return r;
}

}  // namespace kawarada
