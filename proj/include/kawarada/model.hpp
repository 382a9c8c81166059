#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "kawarada/mesh.hpp"

namespace kawarada {

/// Source nonlinearity f on [0,1): strictly increasing, f(0) > 0, f -> inf as u -> 1.
struct SourceFn {
    std::function<double(double)> f;
    std::function<double(double)> f_prime;

    double f0() const { return f(0.0); }

    /// f(u) = scale / (1 - u)^r, r >= 1.
    static SourceFn power(double r, double scale = 1.0);
};

/// How the initial field is supplied: a closed form in dimensionless coordinates
/// or an explicit nodal array in the mesh layout.
struct InitialField {
    std::function<double(double, double, double)> fn;
    std::vector<double> nodal;

    static InitialField zero();
    static InitialField constant(double value);
    /// amplitude * prod sin(pi x_sigma) over active axes.
    static InitialField sine(double amplitude);
};

struct ProblemSpec {
    std::array<double, 3> edges{1.0, 1.0, 1.0};
    double q = 0.0;
    WeightFn custom_weight;  // when set, replaces the power-law degeneracy
    SourceFn source = SourceFn::power(1.0);
    InitialField u0 = InitialField::zero();
    double t0 = 0.0;
    double t_max = 1.0;
    double quench_eps = 1e-6;

    /// Throws InvalidArgument on non-positive edges, t0 >= t_max or a bad quench threshold.
    void validate() const;
};

/// phi for the spec: custom weight if present, otherwise the power-law family.
DegeneracyField make_degeneracy(const ProblemSpec& spec, const Mesh& mesh);

/// Samples u0 at interior nodes; every value must lie in [0,1).
std::vector<double> initial_state(const ProblemSpec& spec, const Mesh& mesh);

/// g = f(v)/phi. Throws QuenchDomain if any component is >= 1 or not finite.
void eval_source(const SourceFn& source, const DegeneracyField& phi, std::span<const double> v,
                 std::span<double> out);
std::vector<double> eval_source(const SourceFn& source, const DegeneracyField& phi,
                                std::span<const double> v);

/// Diagonal of the source Jacobian, f'(v)/phi.
void eval_source_jacobian_diag(const SourceFn& source, const DegeneracyField& phi,
                               std::span<const double> v, std::span<double> out);
std::vector<double> eval_source_jacobian_diag(const SourceFn& source, const DegeneracyField& phi,
                                              std::span<const double> v);

}  // namespace kawarada
