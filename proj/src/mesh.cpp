#include "kawarada/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kawarada/error.hpp"

namespace kawarada {

AxisGrid::AxisGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 3) {
        throw Error(ErrorKind::EmptyGrid, "axis needs at least one interior node");
    }
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
        throw Error(ErrorKind::InvalidGrid, "axis must start at 0 and end at 1");
    }
    spacings_.resize(nodes_.size() - 1);
    for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
        const double h = nodes_[j + 1] - nodes_[j];
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw Error(ErrorKind::InvalidGrid,
                        "nodes not strictly increasing at index " + std::to_string(j + 1));
        }
        spacings_[j] = h;
    }
}

AxisGrid make_uniform_axis(std::size_t interior) {
    if (interior == 0) throw Error(ErrorKind::EmptyGrid, "N must be at least 1");
    std::vector<double> nodes(interior + 2);
    const double n1 = static_cast<double>(interior + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<double>(i) / n1;
    nodes.back() = 1.0;
    return AxisGrid(std::move(nodes));
}

AxisGrid make_graded_axis(std::size_t interior, double gamma) {
    if (interior == 0) throw Error(ErrorKind::EmptyGrid, "N must be at least 1");
    if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidGrid, "grading exponent must be positive");
    std::vector<double> nodes(interior + 2);
    const double n1 = static_cast<double>(interior + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i] = std::pow(static_cast<double>(i) / n1, gamma);
    }
    nodes.front() = 0.0;
    nodes.back() = 1.0;
    return AxisGrid(std::move(nodes));
}

AxisGrid make_explicit_axis(std::span<const double> interior_nodes) {
    if (interior_nodes.empty()) throw Error(ErrorKind::EmptyGrid, "explicit node list is empty");
    std::vector<double> nodes;
    nodes.reserve(interior_nodes.size() + 2);
    nodes.push_back(0.0);
    for (double x : interior_nodes) {
        if (!(x > 0.0 && x < 1.0)) {
            throw Error(ErrorKind::InvalidGrid, "explicit nodes must lie in (0,1)");
        }
        nodes.push_back(x);
    }
    nodes.push_back(1.0);
    return AxisGrid(std::move(nodes));
}

AxisGrid make_axis_grid(const AxisSpec& spec) {
    switch (spec.kind) {
        case GridKind::Uniform: return make_uniform_axis(spec.interior);
        case GridKind::Graded: return make_graded_axis(spec.interior, spec.gamma);
        case GridKind::Explicit: return make_explicit_axis(spec.explicit_nodes);
    }
    throw Error(ErrorKind::InvalidGrid, "unknown grid kind");
}

Mesh::Mesh(std::vector<AxisGrid> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 3) {
        throw Error(ErrorKind::InvalidGrid, "mesh needs 1 to 3 axes");
    }
    for (std::size_t s = 0; s < axes_.size(); ++s) counts_[s] = axes_[s].interior_count();
    strides_ = {1, counts_[0], counts_[0] * counts_[1]};
    size_ = counts_[0] * counts_[1] * counts_[2];
}

std::array<std::size_t, 3> Mesh::multi_index(std::size_t flat) const noexcept {
    const std::size_t i = flat % counts_[0];
    const std::size_t rest = flat / counts_[0];
    return {i, rest % counts_[1], rest / counts_[1]};
}

std::array<double, 3> Mesh::coordinates(std::size_t flat) const noexcept {
    const auto idx = multi_index(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t s = 0; s < axes_.size(); ++s) x[s] = axes_[s].node(idx[s] + 1);
    return x;
}

MeshExtrema mesh_extrema(const Mesh& mesh) {
    MeshExtrema ext{std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& axis : mesh.axes()) {
        const auto [lo, hi] = std::minmax_element(axis.spacings().begin(), axis.spacings().end());
        ext.h_min = std::min(ext.h_min, *lo);
        ext.h_max = std::max(ext.h_max, *hi);
    }
    return ext;
}

namespace {

void check_edges(const std::array<double, 3>& edges) {
    for (double e : edges) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw Error(ErrorKind::InvalidArgument, "domain edges must be positive");
        }
    }
}

double min_value(const std::vector<double>& values) {
    return *std::min_element(values.begin(), values.end());
}

}  // namespace

DegeneracyField eval_degeneracy(const Mesh& mesh, const std::array<double, 3>& edges, double q) {
    check_edges(edges);
    if (!(q >= 0.0 && q <= 2.0)) {
        throw Error(ErrorKind::InvalidArgument, "degeneracy exponent q must lie in [0,2]");
    }
    DegeneracyField field;
    field.q = q;
    field.values.resize(mesh.size());
    for (std::size_t n = 0; n < mesh.size(); ++n) {
        const auto x = mesh.coordinates(n);
        double r2 = 0.0;
        for (std::size_t s = 0; s < mesh.dim(); ++s) r2 += edges[s] * edges[s] * x[s] * x[s];
        field.values[n] = q == 0.0 ? 1.0 : std::pow(r2, 0.5 * q);
    }
    field.inv_norm = min_value(field.values);
    return field;
}

DegeneracyField custom_degeneracy(const Mesh& mesh, const std::array<double, 3>& edges,
                                  const WeightFn& weight) {
    check_edges(edges);
    DegeneracyField field;
    field.values.resize(mesh.size());
    for (std::size_t n = 0; n < mesh.size(); ++n) {
        const auto x = mesh.coordinates(n);
        const double w = weight(edges[0] * x[0], edges[1] * x[1], edges[2] * x[2]);
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw Error(ErrorKind::InvalidArgument,
                        "degeneracy weight must be positive at every interior node");
        }
        field.values[n] = w;
    }
    field.inv_norm = min_value(field.values);
    return field;
}

}  // namespace kawarada
