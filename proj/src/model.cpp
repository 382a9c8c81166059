#include "kawarada/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kawarada/error.hpp"

namespace kawarada {

SourceFn SourceFn::power(double r, double scale) {
    if (!(r >= 1.0)) throw Error(ErrorKind::InvalidArgument, "source exponent r must be >= 1");
    if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "source scale must be positive");
    SourceFn s;
    if (r == 1.0) {
        s.f = [scale](double u) { return scale / (1.0 - u); };
        s.f_prime = [scale](double u) {
            const double d = 1.0 - u;
            return scale / (d * d);
        };
    } else {
        s.f = [r, scale](double u) { return scale * std::pow(1.0 - u, -r); };
        s.f_prime = [r, scale](double u) { return scale * r * std::pow(1.0 - u, -r - 1.0); };
    }
    return s;
}

InitialField InitialField::zero() { return constant(0.0); }

InitialField InitialField::constant(double value) {
    InitialField field;
    field.fn = [value](double, double, double) { return value; };
    return field;
}

InitialField InitialField::sine(double amplitude) {
    InitialField field;
    field.fn = [amplitude](double x, double y, double z) {
        using std::numbers::pi;
        return amplitude * std::sin(pi * x) * std::sin(pi * y) * std::sin(pi * z);
    };
    return field;
}

void ProblemSpec::validate() const {
    for (double e : edges) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw Error(ErrorKind::InvalidArgument, "domain edges must be positive");
        }
    }
    if (!custom_weight && !(q >= 0.0 && q <= 2.0)) {
        throw Error(ErrorKind::InvalidArgument, "q must lie in [0,2]");
    }
    if (!(t0 < t_max)) throw Error(ErrorKind::InvalidArgument, "t0 must be < t_max");
    if (!(quench_eps > 0.0 && quench_eps < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "quench_eps must lie in (0,1)");
    }
    if (!source.f || !source.f_prime) {
        throw Error(ErrorKind::InvalidArgument, "source function not set");
    }
    if (!(source.f0() > 0.0)) throw Error(ErrorKind::InvalidArgument, "f(0) must be positive");
}

DegeneracyField make_degeneracy(const ProblemSpec& spec, const Mesh& mesh) {
    if (spec.custom_weight) return custom_degeneracy(mesh, spec.edges, spec.custom_weight);
    return eval_degeneracy(mesh, spec.edges, spec.q);
}

std::vector<double> initial_state(const ProblemSpec& spec, const Mesh& mesh) {
    std::vector<double> v;
    if (!spec.u0.nodal.empty()) {
        if (spec.u0.nodal.size() != mesh.size()) {
            throw Error(ErrorKind::InvalidArgument,
                        "nodal initial field has " + std::to_string(spec.u0.nodal.size()) +
                            " values, mesh has " + std::to_string(mesh.size()));
        }
        v = spec.u0.nodal;
    } else {
        if (!spec.u0.fn) throw Error(ErrorKind::InvalidArgument, "initial field not set");
        v.resize(mesh.size());
        for (std::size_t n = 0; n < mesh.size(); ++n) {
            auto x = mesh.coordinates(n);
            // inactive axes sit at the line midpoint so separable profiles stay nonzero
            for (std::size_t s = mesh.dim(); s < 3; ++s) x[s] = 0.5;
            v[n] = spec.u0.fn(x[0], x[1], x[2]);
        }
    }
    for (double value : v) {
        if (!(value >= 0.0 && value < 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "initial field must lie in [0,1)");
        }
    }
    return v;
}

namespace {

void check_shapes(const DegeneracyField& phi, std::span<const double> v, std::span<double> out) {
    if (v.size() != phi.values.size() || out.size() != v.size()) {
        throw Error(ErrorKind::InvalidArgument, "source evaluation size mismatch");
    }
}

[[noreturn]] void throw_quench(std::size_t n, double value) {
    throw Error(ErrorKind::QuenchDomain, "state component " + std::to_string(n) + " = " +
                                             std::to_string(value) + " outside [.., 1)");
}

}  // namespace

void eval_source(const SourceFn& source, const DegeneracyField& phi, std::span<const double> v,
                 std::span<double> out) {
    check_shapes(phi, v, out);
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!(v[n] < 1.0)) throw_quench(n, v[n]);
        out[n] = source.f(v[n]) / phi.values[n];
    }
}

std::vector<double> eval_source(const SourceFn& source, const DegeneracyField& phi,
                                std::span<const double> v) {
    std::vector<double> out(v.size());
    eval_source(source, phi, v, out);
    return out;
}

void eval_source_jacobian_diag(const SourceFn& source, const DegeneracyField& phi,
                               std::span<const double> v, std::span<double> out) {
    check_shapes(phi, v, out);
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!(v[n] < 1.0)) throw_quench(n, v[n]);
        out[n] = source.f_prime(v[n]) / phi.values[n];
    }
}

std::vector<double> eval_source_jacobian_diag(const SourceFn& source, const DegeneracyField& phi,
                                              std::span<const double> v) {
    std::vector<double> out(v.size());
    eval_source_jacobian_diag(source, phi, v, out);
    return out;
}

}  // namespace kawarada
