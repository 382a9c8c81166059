#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kawarada/lodop.hpp"

namespace kawarada {

/// Square row-major matrix for the brute-force oracle. Deliberately naive.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);

    std::size_t dim() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::span<const double> data() const noexcept { return a_; }

    DenseMatrix transpose() const;
    DenseMatrix operator*(const DenseMatrix& rhs) const;
    DenseMatrix operator+(const DenseMatrix& rhs) const;
    DenseMatrix operator-(const DenseMatrix& rhs) const;
    DenseMatrix scaled(double s) const;
    std::vector<double> apply(std::span<const double> x) const;

    double min_entry() const;
    double max_abs_entry() const;
    double norm_one() const;  // max column sum

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Largest dense dimension the oracle will build. KAWARADA_ORACLE_CAP overrides the default 1000.
std::size_t oracle_cap();
/// Throws GridTooLarge if n exceeds the cap.
void require_oracle_size(std::size_t n);

/// Kronecker product of two square matrices.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// Dense M_sigma built column by column from the operator's action on unit vectors.
DenseMatrix materialize(const DirectionalOperator& op);
/// Dense C = sum of the directional operators.
DenseMatrix materialize_sum(std::span<const DirectionalOperator> ops);
/// I + tau/2 M_sigma
DenseMatrix materialize_forward_factor(const DirectionalOperator& op, double tau);
/// I - tau/2 M_sigma
DenseMatrix materialize_backward_factor(const DirectionalOperator& op, double tau);
/// Dense T_sigma from its band stencil.
DenseMatrix materialize_stencil(const TridiagStencil& stencil);

/// Gaussian elimination with partial pivoting. Throws NumericFailure if singular.
std::vector<double> dense_solve(const DenseMatrix& a, std::span<const double> b);
DenseMatrix dense_inverse(const DenseMatrix& a);

/// Largest eigenvalue of a symmetric matrix: Householder tridiagonalisation, then
/// Sturm-count bisection to working precision.
double symmetric_lambda_max(const DenseMatrix& s);
/// ||A||_2 = sqrt(lambda_max(A^T A)).
double spectral_norm(const DenseMatrix& a);
/// mu(A) = 1/2 lambda_max(A + A^T).
double log_norm(const DenseMatrix& a);

/// max_j 4 / h_j^2 over every spacing of the axis, a bound on ||T_sigma||_2.
double gersgorin_T_bound(const AxisGrid& axis);
/// Same bound with j restricted to 1..N (the boundary spacing h_0 excluded).
double gersgorin_T_bound_interior(const AxisGrid& axis);

/// exp(A) by scaling and squaring of a truncated Taylor series.
DenseMatrix matrix_exp(const DenseMatrix& a);

struct ExpBoundCheck {
    double lhs;     // ||E(alpha A)||_2
    double rhs;     // exp(alpha mu(A))
    double margin;  // rhs - lhs
    bool holds(double rel_tol = 1e-10) const { return lhs <= rhs * (1.0 + rel_tol); }
};
ExpBoundCheck matrix_exp_bound_check(const DenseMatrix& a, double alpha);

struct FactorNormCheck {
    double tau;
    double norm;     // ||(I - tau/2 M)^{-1} (I + tau/2 M)||_2
    double linear;   // 1 + tau K
    double excess;   // (norm - 1 - tau K) / tau^2
};
FactorNormCheck factor_norm_bound(const DirectionalOperator& op, double tau, double K);

/// Runs factor_norm_bound over tau, tau/2, ... (`halvings` + 1 values) and reports
/// whether the excess ratio stays bounded: it may not grow by more than 1.5x per
/// halving beyond roundoff, which an O(tau) violation (doubling) would.
struct FactorNormSweep {
    std::vector<FactorNormCheck> rows;
    bool bounded = true;
};
FactorNormSweep factor_norm_sweep(const DirectionalOperator& op, double tau, double K,
                                  int halvings = 4);

/// Dense product factor for one LOD step, factors applied in `order`
/// (first entry applied first).
DenseMatrix dense_step_factor(std::span<const DirectionalOperator> ops, double tau,
                              std::span<const std::size_t> order);

}  // namespace kawarada
