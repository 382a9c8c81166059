#include "kawarada/lodop.hpp"

#include <cmath>
#include <string>

#include "kawarada/error.hpp"

namespace kawarada {

TridiagStencil TridiagStencil::from_axis(const AxisGrid& axis) {
    const auto h = axis.spacings();
    const std::size_t n = axis.interior_count();
    TridiagStencil st;
    st.diag.resize(n);
    st.lower.resize(n - 1);
    st.upper.resize(n - 1);
    // interior node j (1-based) sits between spacings h_{j-1} and h_j
    for (std::size_t j = 1; j <= n; ++j) {
        st.diag[j - 1] = -2.0 / (h[j - 1] * h[j]);
    }
    for (std::size_t j = 1; j < n; ++j) {
        st.lower[j - 1] = 2.0 / (h[j] * (h[j] + h[j + 1]));
        st.upper[j - 1] = 2.0 / (h[j] * (h[j - 1] + h[j]));
    }
    return st;
}

DirectionalOperator::DirectionalOperator(std::size_t axis, const Mesh& mesh,
                                         const DegeneracyField& phi, double edge)
    : axis_(axis),
      edge_(edge),
      stencil_(TridiagStencil::from_axis(mesh.axis(axis))),
      line_length_(mesh.counts()[axis]),
      stride_(mesh.stride(axis)),
      plane_(mesh.stride(axis) * mesh.counts()[axis]) {
    if (phi.values.size() != mesh.size()) {
        throw Error(ErrorKind::InvalidArgument, "degeneracy field does not match mesh");
    }
    if (!(edge > 0.0)) throw Error(ErrorKind::InvalidArgument, "edge must be positive");
    const std::size_t size = mesh.size();
    scale_.resize(size);
    lower_.assign(size, 0.0);
    diag_.resize(size);
    upper_.assign(size, 0.0);
    for (std::size_t n = 0; n < size; ++n) {
        const std::size_t r = (n / stride_) % line_length_;
        const double s = 1.0 / (edge * edge * phi.values[n]);
        scale_[n] = s;
        diag_[n] = s * stencil_.diag[r];
        if (r > 0) lower_[n] = s * stencil_.lower[r - 1];
        if (r + 1 < line_length_) upper_[n] = s * stencil_.upper[r];
    }
}

std::size_t DirectionalOperator::line_start(std::size_t line) const noexcept {
    return (line / stride_) * plane_ + line % stride_;
}

void DirectionalOperator::apply(std::span<const double> v, std::span<double> out) const {
    const std::size_t len = line_length_;
    for (std::size_t line = 0; line < line_count(); ++line) {
        const std::size_t base = line_start(line);
        for (std::size_t r = 0; r < len; ++r) {
            const std::size_t n = base + r * stride_;
            double acc = diag_[n] * v[n];
            if (r > 0) acc += lower_[n] * v[n - stride_];
            if (r + 1 < len) acc += upper_[n] * v[n + stride_];
            out[n] = acc;
        }
    }
}

void DirectionalOperator::apply_forward(double tau, std::span<const double> v,
                                        std::span<double> out) const {
    const double half = 0.5 * tau;
    const std::size_t len = line_length_;
    for (std::size_t line = 0; line < line_count(); ++line) {
        const std::size_t base = line_start(line);
        for (std::size_t r = 0; r < len; ++r) {
            const std::size_t n = base + r * stride_;
            double acc = diag_[n] * v[n];
            if (r > 0) acc += lower_[n] * v[n - stride_];
            if (r + 1 < len) acc += upper_[n] * v[n + stride_];
            out[n] = v[n] + half * acc;
        }
    }
}

BackwardFactor::BackwardFactor(const DirectionalOperator& op, double tau)
    : tau_(tau),
      line_length_(op.line_length()),
      stride_(op.stride()),
      plane_(op.stride() * op.line_length()),
      line_count_(op.line_count()) {
    const std::size_t size = op.size();
    const std::size_t len = op.line_length();
    const std::size_t stride = op.stride();
    const double half = 0.5 * tau;
    inv_pivot_.resize(size);
    multiplier_.assign(size, 0.0);
    upper_.assign(size, 0.0);
    for (std::size_t line = 0; line < op.line_count(); ++line) {
        const std::size_t base = op.line_start(line);
        double prev_pivot = 0.0;
        for (std::size_t r = 0; r < len; ++r) {
            const std::size_t n = base + r * stride;
            const double a = -half * op.lower(n);
            const double b = 1.0 - half * op.diag(n);
            const double c = -half * op.upper(n);
            double pivot = b;
            if (r > 0) {
                const double m = a / prev_pivot;
                multiplier_[n] = m;
                pivot = b - m * upper_[n - stride];
            }
            const double scale = std::abs(a) + std::abs(b) + std::abs(c);
            if (!(std::abs(pivot) > 1e-14 * scale) || !std::isfinite(pivot)) {
                throw Error(ErrorKind::SingularFactor,
                            "zero pivot on axis " + std::to_string(op.axis()) + " at node " +
                                std::to_string(n) + " (tau too large for this grid?)");
            }
            upper_[n] = c;
            inv_pivot_[n] = 1.0 / pivot;
            prev_pivot = pivot;
        }
    }
}

void BackwardFactor::solve(std::span<const double> rhs, std::span<double> w) const {
    const std::size_t len = line_length_;
    const std::size_t stride = stride_;
    for (std::size_t line = 0; line < line_count_; ++line) {
        const std::size_t base = (line / stride_) * plane_ + line % stride_;
        w[base] = rhs[base];
        for (std::size_t r = 1; r < len; ++r) {
            const std::size_t n = base + r * stride;
            w[n] = rhs[n] - multiplier_[n] * w[n - stride];
        }
        std::size_t n = base + (len - 1) * stride;
        w[n] *= inv_pivot_[n];
        for (std::size_t r = len - 1; r-- > 0;) {
            n = base + r * stride;
            w[n] = (w[n] - upper_[n] * w[n + stride]) * inv_pivot_[n];
        }
    }
}

std::vector<double> solve_backward(const DirectionalOperator& op, double tau,
                                   std::span<const double> rhs) {
    std::vector<double> w(rhs.size());
    BackwardFactor(op, tau).solve(rhs, w);
    return w;
}

std::vector<double> apply_forward(const DirectionalOperator& op, double tau,
                                  std::span<const double> v) {
    std::vector<double> out(v.size());
    op.apply_forward(tau, v, out);
    return out;
}

std::vector<DirectionalOperator> build_operators(const Mesh& mesh, const DegeneracyField& phi,
                                                 const std::array<double, 3>& edges) {
    std::vector<DirectionalOperator> ops;
    ops.reserve(mesh.dim());
    for (std::size_t s = 0; s < mesh.dim(); ++s) ops.emplace_back(s, mesh, phi, edges[s]);
    return ops;
}

void apply_full_operator(std::span<const DirectionalOperator> ops, const SourceFn& source,
                         const DegeneracyField& phi, std::span<const double> v,
                         std::span<double> out) {
    eval_source(source, phi, v, out);
    std::vector<double> tmp(v.size());
    for (const auto& op : ops) {
        op.apply(v, tmp);
        for (std::size_t n = 0; n < v.size(); ++n) out[n] += tmp[n];
    }
}

std::vector<double> apply_full_operator(std::span<const DirectionalOperator> ops,
                                        const SourceFn& source, const DegeneracyField& phi,
                                        std::span<const double> v) {
    std::vector<double> out(v.size());
    apply_full_operator(ops, source, phi, v, out);
    return out;
}

}  // namespace kawarada
