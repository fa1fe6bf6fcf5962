#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "lookahead/mdp.hpp"

namespace lookahead {

/// Exploration function g(t) = 3 ln t.
inline double exploration_g(double t) { return 3.0 * std::log(t); }

/// sqrt(g(n + 2) / (n + 2)).
inline double lcb_bonus(std::uint64_t n) {
    const double m = static_cast<double>(n) + 2.0;
    return std::sqrt(exploration_g(m) / m);
}

/**
 * Per-(s, a) statistics behind the lower confidence bounds.
 *
 * With K = 1 the bound is phi1/n - bonus(n). With K >= 2 it adds the
 * (K-1)-step continuation estimate: phi1/n + phi_km1/n_km1 - bonus(n) -
 * bonus(n_km1). Undefined bounds are -inf.
 */
class LcbState {
public:
    LcbState() = default;
    LcbState(std::size_t num_states, std::size_t num_actions, std::size_t k)
        : num_states_(num_states),
          num_actions_(num_actions),
          k_(k),
          n_(num_states * num_actions, 0),
          n_km1_(num_states * num_actions, 0),
          phi1_(num_states * num_actions, 0.0),
          phi_km1_(num_states * num_actions, 0.0),
          lcb_(num_states * num_actions, -std::numeric_limits<double>::infinity()) {}

    /// Keeps the one-step statistics of `source` and starts fresh (K-1)-step
    /// statistics for lookahead depth k.
    static LcbState warm_start(const LcbState& source, std::size_t k) {
        LcbState out(source.num_states_, source.num_actions_, k);
        out.n_ = source.n_;
        out.phi1_ = source.phi1_;
        for (std::size_t i = 0; i < out.lcb_.size(); ++i) out.recompute(i);
        return out;
    }

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_actions() const noexcept { return num_actions_; }
    std::size_t k() const noexcept { return k_; }

    std::uint64_t n(State s, Action a) const { return n_[idx(s, a)]; }
    std::uint64_t n_km1(State s, Action a) const { return n_km1_[idx(s, a)]; }
    double phi1(State s, Action a) const { return phi1_[idx(s, a)]; }
    double phi_km1(State s, Action a) const { return phi_km1_[idx(s, a)]; }
    double lcb(State s, Action a) const { return lcb_[idx(s, a)]; }

    double mean1(State s, Action a) const {
        const auto c = n_[idx(s, a)];
        return c == 0 ? 0.0 : phi1_[idx(s, a)] / static_cast<double>(c);
    }
    double mean_km1(State s, Action a) const {
        const auto c = n_km1_[idx(s, a)];
        return c == 0 ? 0.0 : phi_km1_[idx(s, a)] / static_cast<double>(c);
    }
    /// Point estimate of the K-step reward used by the UCB-index tie-breaker.
    double mean_k(State s, Action a) const { return k_ > 1 ? mean1(s, a) + mean_km1(s, a) : mean1(s, a); }

    /// One-step update: phi1 += r, n += 1, bound recomputed.
    void record_reward(State s, Action a, double r) {
        const auto i = idx(s, a);
        phi1_[i] += r;
        ++n_[i];
        recompute(i);
    }

    /// One (K-1)-step continuation sample for (s, a).
    void record_continuation(State s, Action a, double sum) {
        const auto i = idx(s, a);
        phi_km1_[i] += sum;
        ++n_km1_[i];
        recompute(i);
    }

    friend bool operator==(const LcbState&, const LcbState&) = default;

private:
    std::size_t idx(State s, Action a) const { return s * num_actions_ + a; }

    void recompute(std::size_t i) {
        if (n_[i] == 0 || (k_ > 1 && n_km1_[i] == 0)) {
            lcb_[i] = -std::numeric_limits<double>::infinity();
            return;
        }
        double value = phi1_[i] / static_cast<double>(n_[i]) - lcb_bonus(n_[i]);
        if (k_ > 1) value += phi_km1_[i] / static_cast<double>(n_km1_[i]) - lcb_bonus(n_km1_[i]);
        lcb_[i] = value;
    }

    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::size_t k_ = 1;
    std::vector<std::uint64_t> n_;
    std::vector<std::uint64_t> n_km1_;
    std::vector<double> phi1_;
    std::vector<double> phi_km1_;
    std::vector<double> lcb_;
};

}  // namespace lookahead
