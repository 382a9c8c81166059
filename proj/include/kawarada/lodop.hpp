#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kawarada/mesh.hpp"
#include "kawarada/model.hpp"

namespace kawarada {

/// Nonuniform second-difference matrix T for one axis, stored by band.
/// Row r couples u_{r-1}, u_r, u_{r+1}; lower[r-1] is entry (r, r-1) and
/// upper[r] is entry (r, r+1).
struct TridiagStencil {
    std::vector<double> lower;  // l_j = 2 / (h_j (h_j + h_{j+1})),     size N-1
    std::vector<double> diag;   // m_j = -2 / (h_{j-1} h_j),             size N
    std::vector<double> upper;  // n_j = 2 / (h_j (h_{j-1} + h_j)),      size N-1

    static TridiagStencil from_axis(const AxisGrid& axis);
    std::size_t size() const noexcept { return diag.size(); }
};

/// M_sigma = (1/edge^2) B (Kronecker-embedded T_sigma) acting along one axis,
/// kept as per-node scaled band coefficients. Immutable once built.
class DirectionalOperator {
public:
    DirectionalOperator(std::size_t axis, const Mesh& mesh, const DegeneracyField& phi, double edge);

    std::size_t axis() const noexcept { return axis_; }
    double edge() const noexcept { return edge_; }
    const TridiagStencil& stencil() const noexcept { return stencil_; }
    std::size_t size() const noexcept { return diag_.size(); }
    std::size_t line_length() const noexcept { return line_length_; }
    std::size_t line_count() const noexcept { return size() / line_length_; }
    std::size_t stride() const noexcept { return stride_; }
    /// Flat index of the first node of line `line`.
    std::size_t line_start(std::size_t line) const noexcept;

    /// Row scale 1/(edge^2 phi) at a flat node index.
    double row_scale(std::size_t flat) const noexcept { return scale_[flat]; }
    /// Scaled coefficients of row `flat` (neighbour terms are 0 at line ends).
    double lower(std::size_t flat) const noexcept { return lower_[flat]; }
    double diag(std::size_t flat) const noexcept { return diag_[flat]; }
    double upper(std::size_t flat) const noexcept { return upper_[flat]; }

    /// out = M v
    void apply(std::span<const double> v, std::span<double> out) const;
    /// out = (I + tau/2 M) v
    void apply_forward(double tau, std::span<const double> v, std::span<double> out) const;

private:
    std::size_t axis_;
    double edge_;
    TridiagStencil stencil_;
    std::size_t line_length_;
    std::size_t stride_;
    std::size_t plane_;  // stride * line_length
    std::vector<double> scale_;
    std::vector<double> lower_;
    std::vector<double> diag_;
    std::vector<double> upper_;
};

/// Thomas factorisation of (I - tau/2 M) for every line of one operator,
/// without pivoting. Rebuilt whenever tau changes.
class BackwardFactor {
public:
    /// Throws SingularFactor if a pivot vanishes.
    BackwardFactor(const DirectionalOperator& op, double tau);

    double tau() const noexcept { return tau_; }

    /// Solves (I - tau/2 M) w = rhs line by line. rhs and w may alias.
    void solve(std::span<const double> rhs, std::span<double> w) const;

private:
    double tau_;
    std::size_t line_length_;
    std::size_t stride_;
    std::size_t plane_;
    std::size_t line_count_;
    std::vector<double> inv_pivot_;
    std::vector<double> multiplier_;  // lower elimination factor per row
    std::vector<double> upper_;       // -tau/2 * upper coefficient per row
};

/// w with (I - tau/2 M) w = rhs.
std::vector<double> solve_backward(const DirectionalOperator& op, double tau,
                                   std::span<const double> rhs);
std::vector<double> apply_forward(const DirectionalOperator& op, double tau,
                                  std::span<const double> v);

/// One operator per active axis, in axis order.
std::vector<DirectionalOperator> build_operators(const Mesh& mesh, const DegeneracyField& phi,
                                                 const std::array<double, 3>& edges);

/// out = C v + g(v) with C the sum of all directional operators.
void apply_full_operator(std::span<const DirectionalOperator> ops, const SourceFn& source,
                         const DegeneracyField& phi, std::span<const double> v,
                         std::span<double> out);
std::vector<double> apply_full_operator(std::span<const DirectionalOperator> ops,
                                        const SourceFn& source, const DegeneracyField& phi,
                                        std::span<const double> v);

}  // namespace kawarada
