#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace kawarada {

/// D = ||v_curr - v_prev||_inf / tau_prev, the max-norm discrete time derivative.
double derivative_scalar(std::span<const double> v_prev, std::span<const double> v_curr,
                         double tau_prev);

/// Arc-length step recursion on the scalar derivative history with a minimal-step floor:
///   tau_l^2 = tau_{l-1}^2 + (D_{l-1} - D_{l-2})^2 - (D_l - D_{l-1})^2,
/// floored at tau_min^2 and clipped to tau_cap.
class StepController {
public:
    StepController(double tau0, double tau_min, std::optional<double> tau_cap = std::nullopt);

    double tau0() const noexcept { return tau0_; }
    double tau_min() const noexcept { return tau_min_; }
    std::optional<double> tau_cap() const noexcept { return tau_cap_; }

    /// Pure recursion step, independent of the stored history.
    double next_step(double d_lm2, double d_lm1, double d_l, double tau_prev) const;

    /// Step to take now. Uses tau0 (clipped) until three derivative samples exist.
    double current_step() const noexcept { return current_; }

    /// Records the derivative of the step just accepted (taken with tau_taken)
    /// and returns the next step size.
    double observe(double derivative, double tau_taken);

    /// History for checkpointing: the last three derivative samples (oldest first)
    /// and how many are valid.
    struct History {
        double d[3] = {0.0, 0.0, 0.0};
        std::size_t count = 0;
        double current = 0.0;
    };
    History history() const noexcept { return history_with_current(); }
    void restore(const History& h);

private:
    History history_with_current() const noexcept;
    double clip(double tau) const noexcept;

    double tau0_;
    double tau_min_;
    std::optional<double> tau_cap_;
    double d_[3] = {0.0, 0.0, 0.0};
    std::size_t count_ = 0;
    double current_;
};

}  // namespace kawarada
