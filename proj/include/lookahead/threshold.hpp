#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lookahead {

/// Per-step thresholds gamma_t for t = 0..T. A constant schedule is stored as
/// a scalar and covers any horizon.
class ThresholdSchedule {
public:
    ThresholdSchedule(double constant = 0.0) : constant_(constant) {}  // NOLINT: implicit from scalar
    explicit ThresholdSchedule(std::vector<double> per_step) : per_step_(std::move(per_step)) {
        if (per_step_.empty()) throw std::invalid_argument("ThresholdSchedule: empty schedule");
    }

    bool is_constant() const noexcept { return per_step_.empty(); }
    double constant() const noexcept { return constant_; }
    const std::vector<double>& values() const noexcept { return per_step_; }

    bool covers(std::size_t horizon) const noexcept { return is_constant() || per_step_.size() >= horizon + 1; }

    double at(std::size_t t) const {
        if (is_constant()) return constant_;
        if (t >= per_step_.size()) throw std::out_of_range("ThresholdSchedule: t beyond schedule");
        return per_step_[t];
    }

private:
    double constant_ = 0.0;
    std::vector<double> per_step_;
};

}  // namespace lookahead
