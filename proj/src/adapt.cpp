#include "kawarada/adapt.hpp"

#include <algorithm>
#include <cmath>

#include "kawarada/error.hpp"

namespace kawarada {

double derivative_scalar(std::span<const double> v_prev, std::span<const double> v_curr,
                         double tau_prev) {
    if (!(tau_prev > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau_prev must be positive");
    if (v_prev.size() != v_curr.size()) throw Error(ErrorKind::InvalidArgument, "size mismatch");
    double m = 0.0;
    for (std::size_t n = 0; n < v_prev.size(); ++n) m = std::max(m, std::abs(v_curr[n] - v_prev[n]));
    return m / tau_prev;
}

StepController::StepController(double tau0, double tau_min, std::optional<double> tau_cap)
    : tau0_(tau0), tau_min_(tau_min), tau_cap_(tau_cap) {
    if (!(tau_min > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau_min must be positive");
    if (!(tau_min < tau0)) throw Error(ErrorKind::InvalidArgument, "tau_min must be < tau0");
    if (tau_cap && !(*tau_cap >= tau_min)) {
        throw Error(ErrorKind::InvalidArgument, "tau_cap is below tau_min");
    }
    current_ = clip(tau0);
}

double StepController::clip(double tau) const noexcept {
    tau = std::max(tau, tau_min_);
    if (tau_cap_) tau = std::min(tau, *tau_cap_);
    return tau;
}

double StepController::next_step(double d_lm2, double d_lm1, double d_l, double tau_prev) const {
    const double prev_jump = d_lm1 - d_lm2;
    const double jump = d_l - d_lm1;
    const double disc = tau_prev * tau_prev + prev_jump * prev_jump - jump * jump;
    const double tau = std::sqrt(std::max(disc, tau_min_ * tau_min_));
    return clip(tau);
}

double StepController::observe(double derivative, double tau_taken) {
    if (count_ == 3) {
        d_[0] = d_[1];
        d_[1] = d_[2];
        d_[2] = derivative;
    } else {
        d_[count_++] = derivative;
    }
    current_ = count_ < 3 ? clip(tau0_) : next_step(d_[0], d_[1], d_[2], tau_taken);
    return current_;
}

StepController::History StepController::history_with_current() const noexcept {
    History h;
    for (std::size_t i = 0; i < 3; ++i) h.d[i] = d_[i];
    h.count = count_;
    h.current = current_;
    return h;
}

void StepController::restore(const History& h) {
    if (h.count > 3) throw Error(ErrorKind::InvalidArgument, "bad controller history");
    for (std::size_t i = 0; i < 3; ++i) d_[i] = h.d[i];
    count_ = h.count;
    current_ = clip(h.current);
}

}  // namespace kawarada
