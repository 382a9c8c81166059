#include "kawarada/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kawarada/error.hpp"
#include "kawarada/spectral.hpp"

namespace kawarada {

LodScheme::LodScheme(const Mesh& mesh, const ProblemSpec& spec, StepConfig cfg)
    : mesh_(mesh),
      phi_(make_degeneracy(spec, mesh)),
      source_(spec.source),
      quench_eps_(spec.quench_eps),
      cfg_(std::move(cfg)),
      ops_(build_operators(mesh_, phi_, spec.edges)) {
    std::array<bool, 3> seen{false, false, false};
    for (std::size_t s : cfg_.sweep_order) {
        if (s > 2 || seen[s]) {
            throw Error(ErrorKind::InvalidArgument, "sweep order must be a permutation of 0,1,2");
        }
        seen[s] = true;
        if (s < mesh_.dim()) order_.push_back(s);
    }
    if (cfg_.source_mode == SourceMode::FixedPoint && (cfg_.max_iters < 1 || !(cfg_.tol > 0.0))) {
        throw Error(ErrorKind::InvalidArgument, "fixed-point mode needs max_iters >= 1 and tol > 0");
    }
    if (cfg_.source_mode == SourceMode::Frozen && cfg_.frozen_source.size() != mesh_.size()) {
        throw Error(ErrorKind::InvalidArgument, "frozen source has the wrong size");
    }
    scratch_.resize(mesh_.size());
}

void LodScheme::ensure_factors(double tau) {
    if (factor_tau_ && *factor_tau_ == tau) return;
    factors_.clear();
    factors_.reserve(ops_.size());
    for (const auto& op : ops_) factors_.emplace_back(op, tau);
    factor_tau_ = tau;
}

void LodScheme::apply_product(double tau, std::span<const double> x, std::span<double> out) {
    ensure_factors(tau);
    std::copy(x.begin(), x.end(), out.begin());
    for (std::size_t s : order_) {
        ops_[s].apply_forward(tau, out, scratch_);
        factors_[s].solve(scratch_, out);
    }
}

std::vector<double> LodScheme::source_term(std::span<const double> v) const {
    if (cfg_.source_mode == SourceMode::Frozen) return cfg_.frozen_source;
    return eval_source(source_, phi_, v);
}

std::vector<double> LodScheme::predictor(std::span<const double> v, double tau,
                                         std::size_t* clamp_events) const {
    std::vector<double> w = apply_full_operator(ops_, source_, phi_, v);
    const double ceiling = clamp_ceiling();
    std::size_t clamps = 0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        w[n] = v[n] + tau * w[n];
        if (cfg_.clamp_predictor && w[n] > ceiling) {
            w[n] = ceiling;
            ++clamps;
        }
    }
    if (clamp_events) *clamp_events = clamps;
    return w;
}

StepResult LodScheme::step(const StateVector& state, double tau) {
    if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
    const auto& v = state.values;
    if (v.size() != mesh_.size()) throw Error(ErrorKind::InvalidArgument, "state size mismatch");

    const std::vector<double> g = source_term(v);
    std::vector<double> rhs(v.size());
    for (std::size_t n = 0; n < v.size(); ++n) rhs[n] = v[n] + 0.5 * tau * g[n];
    std::vector<double> base(v.size());
    apply_product(tau, rhs, base);

    StepResult result;
    result.state.t = state.t + tau;
    result.state.step = state.step + 1;
    auto& next = result.state.values;
    next.resize(v.size());

    switch (cfg_.source_mode) {
        case SourceMode::Frozen: {
            for (std::size_t n = 0; n < v.size(); ++n) next[n] = base[n] + 0.5 * tau * g[n];
            break;
        }
        case SourceMode::Predictor: {
            const auto w = predictor(v, tau, &result.clamp_events);
            const auto gw = eval_source(source_, phi_, w);
            for (std::size_t n = 0; n < v.size(); ++n) next[n] = base[n] + 0.5 * tau * gw[n];
            break;
        }
        case SourceMode::FixedPoint: {
            std::vector<double> star = predictor(v, tau, &result.clamp_events);
            std::vector<double> gs(v.size());
            bool converged = false;
            for (int it = 1; it <= cfg_.max_iters; ++it) {
                eval_source(source_, phi_, star, gs);
                double delta = 0.0;
                for (std::size_t n = 0; n < v.size(); ++n) {
                    const double cand = base[n] + 0.5 * tau * gs[n];
                    delta = std::max(delta, std::abs(cand - star[n]));
                    star[n] = cand;
                }
                result.iterations = it;
                if (delta < cfg_.tol) {
                    converged = true;
                    break;
                }
            }
            if (!converged) {
                throw Error(ErrorKind::IterationFailure,
                            "fixed-point source iteration did not converge in " +
                                std::to_string(cfg_.max_iters) + " iterations");
            }
            next = std::move(star);
            break;
        }
    }
    return result;
}

double LodScheme::step_defect(const StateVector& state, double tau) {
    require_oracle_size(mesh_.size());
    if (tau == 0.0) return 0.0;
    const auto& v = state.values;
    const std::vector<double> g = source_term(v);
    std::vector<double> rhs(v.size());
    for (std::size_t n = 0; n < v.size(); ++n) rhs[n] = v[n] + 0.5 * tau * g[n];

    std::vector<double> lod(v.size());
    apply_product(tau, rhs, lod);

    const DenseMatrix c = materialize_sum(ops_);
    const DenseMatrix id = DenseMatrix::identity(v.size());
    const auto forward = (id + c.scaled(0.5 * tau)).apply(rhs);
    const auto cn = dense_solve(id - c.scaled(0.5 * tau), forward);

    // the trailing source term is shared by both steps and cancels
    double defect = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) defect = std::max(defect, std::abs(lod[n] - cn[n]));
    return defect;
}

}  // namespace kawarada
