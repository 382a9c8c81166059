#include "kawarada/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "kawarada/error.hpp"

namespace kawarada {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
    DenseMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
    DenseMatrix c(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < n_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) c(i, j) += aik * rhs(k, j);
        }
    }
    return c;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& rhs) const {
    DenseMatrix c(*this);
    for (std::size_t i = 0; i < a_.size(); ++i) c.a_[i] += rhs.a_[i];
    return c;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& rhs) const {
    DenseMatrix c(*this);
    for (std::size_t i = 0; i < a_.size(); ++i) c.a_[i] -= rhs.a_[i];
    return c;
}

DenseMatrix DenseMatrix::scaled(double s) const {
    DenseMatrix c(*this);
    for (double& x : c.a_) x *= s;
    return c;
}

std::vector<double> DenseMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

double DenseMatrix::min_entry() const { return *std::min_element(a_.begin(), a_.end()); }

double DenseMatrix::max_abs_entry() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

double DenseMatrix::norm_one() const {
    double best = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n_; ++i) col += std::abs((*this)(i, j));
        best = std::max(best, col);
    }
    return best;
}

std::size_t oracle_cap() {
    if (const char* env = std::getenv("KAWARADA_ORACLE_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 1000;
}

void require_oracle_size(std::size_t n) {
    const std::size_t cap = oracle_cap();
    if (n > cap) {
        throw Error(ErrorKind::GridTooLarge, std::to_string(n) + " unknowns exceed the dense oracle cap of " +
                                                 std::to_string(cap) + "; use a smaller verification grid");
    }
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    DenseMatrix c(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) c(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
    return c;
}

DenseMatrix materialize(const DirectionalOperator& op) {
    const std::size_t n = op.size();
    require_oracle_size(n);
    DenseMatrix m(n);
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        op.apply(e, col);
        for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
        e[j] = 0.0;
    }
    return m;
}

DenseMatrix materialize_sum(std::span<const DirectionalOperator> ops) {
    if (ops.empty()) throw Error(ErrorKind::InvalidArgument, "no operators to sum");
    DenseMatrix c = materialize(ops.front());
    for (std::size_t s = 1; s < ops.size(); ++s) c = c + materialize(ops[s]);
    return c;
}

DenseMatrix materialize_forward_factor(const DirectionalOperator& op, double tau) {
    return DenseMatrix::identity(op.size()) + materialize(op).scaled(0.5 * tau);
}

DenseMatrix materialize_backward_factor(const DirectionalOperator& op, double tau) {
    return DenseMatrix::identity(op.size()) - materialize(op).scaled(0.5 * tau);
}

DenseMatrix materialize_stencil(const TridiagStencil& st) {
    const std::size_t n = st.size();
    DenseMatrix t(n);
    for (std::size_t r = 0; r < n; ++r) {
        t(r, r) = st.diag[r];
        if (r + 1 < n) {
            t(r, r + 1) = st.upper[r];
            t(r + 1, r) = st.lower[r];
        }
    }
    return t;
}

namespace {

// LU with partial pivoting in place; returns the row permutation.
std::vector<std::size_t> lu_factor(DenseMatrix& a) {
    const std::size_t n = a.dim();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    const double scale = std::max(a.max_abs_entry(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (!(std::abs(a(p, k)) > 1e-15 * scale)) {
            throw Error(ErrorKind::NumericFailure, "dense matrix is singular");
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(perm[k], perm[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a(i, k) / a(k, k);
            a(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
        }
    }
    return perm;
}

std::vector<double> lu_solve(const DenseMatrix& lu, const std::vector<std::size_t>& perm,
                             std::span<const double> b) {
    const std::size_t n = lu.dim();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[perm[i]];
        for (std::size_t j = 0; j < i; ++j) acc -= lu(i, j) * x[j];
        x[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = x[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= lu(i, j) * x[j];
        x[i] = acc / lu(i, i);
    }
    return x;
}

}  // namespace

std::vector<double> dense_solve(const DenseMatrix& a, std::span<const double> b) {
    DenseMatrix lu(a);
    const auto perm = lu_factor(lu);
    return lu_solve(lu, perm, b);
}

DenseMatrix dense_inverse(const DenseMatrix& a) {
    const std::size_t n = a.dim();
    DenseMatrix lu(a);
    const auto perm = lu_factor(lu);
    DenseMatrix inv(n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const auto col = lu_solve(lu, perm, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

namespace {

/// Householder reduction of a symmetric matrix to tridiagonal form (diagonal d,
/// off-diagonal e with e[i] coupling rows i and i+1).
void tridiagonalize(const DenseMatrix& s, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = s.dim();
    std::vector<double> a(s.data().begin(), s.data().end());
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    std::vector<double> v(n);
    std::vector<double> p(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += at(i, k) * at(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (at(k + 1, k) > 0.0) alpha = -alpha;
        std::fill(v.begin(), v.end(), 0.0);
        v[k + 1] = at(k + 1, k) - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = at(i, k);
        double vv = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vv += v[i] * v[i];
        if (vv == 0.0) continue;
        // A <- H A H with H = I - 2 v v^T / (v^T v), applied as a rank-2 update
        for (std::size_t i = k; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) acc += at(i, j) * v[j];
            p[i] = 2.0 * acc / vv;
        }
        double pv = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) pv += p[i] * v[i];
        const double kk = pv / vv;
        for (std::size_t i = k; i < n; ++i) p[i] -= kk * v[i];
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j) at(i, j) -= v[i] * p[j] + p[i] * v[j];
    }
    d.resize(n);
    e.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = at(i + 1, i);
}

/// Number of eigenvalues of the tridiagonal (d, e) strictly below x (Sturm count).
std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double off = i > 0 ? e[i - 1] * e[i - 1] : 0.0;
        q = d[i] - x - (i > 0 ? off / q : 0.0);
        if (q == 0.0) q = -std::numeric_limits<double>::min();
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace

double symmetric_lambda_max(const DenseMatrix& s) {
    const std::size_t n = s.dim();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty matrix");
    for (double x : s.data()) {
        if (!std::isfinite(x)) throw Error(ErrorKind::NumericFailure, "non-finite matrix entry");
    }
    std::vector<double> d;
    std::vector<double> e;
    tridiagonalize(s, d, e);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (scale == 0.0) return 0.0;
    lo -= 1e-12 * scale;
    hi += 1e-12 * scale;
    // invariant: fewer than n eigenvalues below lo, all n below hi
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
        if (sturm_count(d, e, mid) == n) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double spectral_norm(const DenseMatrix& a) {
    const DenseMatrix ata = a.transpose() * a;
    return std::sqrt(std::max(0.0, symmetric_lambda_max(ata)));
}

double log_norm(const DenseMatrix& a) {
    const DenseMatrix sym = (a + a.transpose()).scaled(0.5);
    return symmetric_lambda_max(sym);
}

double gersgorin_T_bound(const AxisGrid& axis) {
    double best = 0.0;
    for (double h : axis.spacings()) best = std::max(best, 4.0 / (h * h));
    return best;
}

double gersgorin_T_bound_interior(const AxisGrid& axis) {
    double best = 0.0;
    const auto h = axis.spacings();
    for (std::size_t j = 1; j < h.size(); ++j) best = std::max(best, 4.0 / (h[j] * h[j]));
    return best;
}

DenseMatrix matrix_exp(const DenseMatrix& a) {
    const std::size_t n = a.dim();
    const double norm = a.norm_one();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const DenseMatrix x = a.scaled(std::ldexp(1.0, -squarings));
    // ||x|| <= 1/2, so degree 20 leaves a remainder below 0.5^21/21! ~ 1e-26
    constexpr int degree = 20;
    DenseMatrix result = DenseMatrix::identity(n);
    DenseMatrix term = DenseMatrix::identity(n);
    for (int k = 1; k <= degree; ++k) {
        term = (term * x).scaled(1.0 / k);
        result = result + term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

ExpBoundCheck matrix_exp_bound_check(const DenseMatrix& a, double alpha) {
    require_oracle_size(a.dim());
    if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
    ExpBoundCheck c{};
    c.lhs = spectral_norm(matrix_exp(a.scaled(alpha)));
    c.rhs = std::exp(alpha * log_norm(a));
    c.margin = c.rhs - c.lhs;
    return c;
}

FactorNormCheck factor_norm_bound(const DirectionalOperator& op, double tau, double K) {
    const DenseMatrix factor =
        dense_inverse(materialize_backward_factor(op, tau)) * materialize_forward_factor(op, tau);
    FactorNormCheck c{};
    c.tau = tau;
    c.norm = spectral_norm(factor);
    c.linear = 1.0 + tau * K;
    c.excess = (c.norm - c.linear) / (tau * tau);
    return c;
}

FactorNormSweep factor_norm_sweep(const DirectionalOperator& op, double tau, double K,
                                  int halvings) {
    FactorNormSweep sweep;
    double t = tau;
    for (int k = 0; k <= halvings; ++k, t *= 0.5) sweep.rows.push_back(factor_norm_bound(op, t, K));
    for (std::size_t k = 1; k < sweep.rows.size(); ++k) {
        const auto& prev = sweep.rows[k - 1];
        const auto& cur = sweep.rows[k];
        // roundoff in the computed norm is ~1e-12, amplified by 1/tau^2
        const double noise = 1e-12 / (cur.tau * cur.tau);
        if (cur.excess > 1.5 * std::max(prev.excess, 0.0) + noise) sweep.bounded = false;
    }
    return sweep;
}

DenseMatrix dense_step_factor(std::span<const DirectionalOperator> ops, double tau,
                              std::span<const std::size_t> order) {
    if (ops.empty()) throw Error(ErrorKind::InvalidArgument, "no operators");
    DenseMatrix phi = DenseMatrix::identity(ops.front().size());
    for (std::size_t s : order) {
        const auto& op = ops[s];
        const DenseMatrix factor =
            dense_inverse(materialize_backward_factor(op, tau)) * materialize_forward_factor(op, tau);
        phi = factor * phi;
    }
    return phi;
}

}  // namespace kawarada
