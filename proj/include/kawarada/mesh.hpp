#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace kawarada {

/// One spatial axis of the unit cube: boundary-inclusive nodes
/// x_0 = 0 < x_1 < ... < x_{N+1} = 1 and spacings h_j = x_{j+1} - x_j.
class AxisGrid {
public:
    /// Builds from the full node list (including both boundary nodes).
    /// Throws InvalidGrid unless nodes start at 0, end at 1 and strictly increase.
    explicit AxisGrid(std::vector<double> nodes);

    std::size_t interior_count() const noexcept { return nodes_.size() - 2; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> spacings() const noexcept { return spacings_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double spacing(std::size_t j) const { return spacings_[j]; }

private:
    std::vector<double> nodes_;
    std::vector<double> spacings_;
};

enum class GridKind { Uniform, Graded, Explicit };

struct AxisSpec {
    GridKind kind = GridKind::Uniform;
    std::size_t interior = 1;           // N, ignored for Explicit
    double gamma = 1.0;                 // Graded: x_i = (i/(N+1))^gamma
    std::vector<double> explicit_nodes; // Explicit: interior nodes in (0,1)
};

AxisGrid make_axis_grid(const AxisSpec& spec);
AxisGrid make_uniform_axis(std::size_t interior);
AxisGrid make_graded_axis(std::size_t interior, double gamma);
AxisGrid make_explicit_axis(std::span<const double> interior_nodes);

/// Tensor-product grid over 1 to 3 active axes. Inactive axes count as a single
/// line (N = 1) in the lexicographic layout and their sweeps are skipped.
/// Interior values are stored x-fastest: flat = i + j*N1 + k*N1*N2 (0-based).
class Mesh {
public:
    explicit Mesh(std::vector<AxisGrid> axes);

    std::size_t dim() const noexcept { return axes_.size(); }
    const AxisGrid& axis(std::size_t sigma) const { return axes_.at(sigma); }
    std::span<const AxisGrid> axes() const noexcept { return axes_; }

    /// Interior node counts (N1, N2, N3); inactive axes report 1.
    const std::array<std::size_t, 3>& counts() const noexcept { return counts_; }
    /// Distance between neighbours along axis sigma in the flat layout.
    std::size_t stride(std::size_t sigma) const noexcept { return strides_[sigma]; }
    std::size_t size() const noexcept { return size_; }

    std::size_t flat_index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return i + counts_[0] * (j + counts_[1] * k);
    }
    std::array<std::size_t, 3> multi_index(std::size_t flat) const noexcept;

    /// Dimensionless coordinate of an interior node along each axis (0 for inactive axes).
    std::array<double, 3> coordinates(std::size_t flat) const noexcept;

private:
    std::vector<AxisGrid> axes_;
    std::array<std::size_t, 3> counts_{1, 1, 1};
    std::array<std::size_t, 3> strides_{1, 1, 1};
    std::size_t size_ = 1;
};

struct MeshExtrema {
    double h_min;
    double h_max;
};

/// Smallest and largest spacing over all active axes, boundary intervals included.
MeshExtrema mesh_extrema(const Mesh& mesh);

/// Positive nodal weight phi at every interior node, with 1/||B||_2 = min phi.
struct DegeneracyField {
    std::vector<double> values;
    std::optional<double> q;  // set for the power-law family
    double inv_norm = 1.0;
};

/// phi = (a^2 x^2 + b^2 y^2 + c^2 z^2)^{q/2} over the active axes.
DegeneracyField eval_degeneracy(const Mesh& mesh, const std::array<double, 3>& edges, double q);

/// User weight s(x, y, z) of physical coordinates, sampled at interior nodes.
using WeightFn = std::function<double(double, double, double)>;
DegeneracyField custom_degeneracy(const Mesh& mesh, const std::array<double, 3>& edges,
                                  const WeightFn& weight);

}  // namespace kawarada
