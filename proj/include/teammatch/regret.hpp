#pragma once
#include <optional>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace teammatch {

// One recorded step: the payoff deficit against the omniscient optimum (in
// integer payoff units, so cumulative regret stays exact) and the raw match
// composition counts.
struct StepRecord {
    int regret_units = 0;  // optimal_step_payoff - realized payoff
    int c01 = 0;           // high-low matches
    int c11 = 0;           // high-high matches
    int c00 = 0;           // low-low matches
};

inline StepRecord score_step(const TypeAssignment& assignment, const Matching& matching,
                             FeedbackModel model) {
    StepRecord rec;
    int realized = 0;
    for (const auto& pr : matching.pairs) {
        const int ti = assignment.type(pr.a);
        const int tj = assignment.type(pr.b);
        realized += payoff(model, ti, tj);
        if (ti + tj == 2)
            ++rec.c11;
        else if (ti + tj == 1)
            ++rec.c01;
        else
            ++rec.c00;
    }
    rec.regret_units = optimal_step_payoff(model, assignment) - realized;
    return rec;
}

// Per-worker exact regret of a single step.
inline double exact_step_regret(const TypeAssignment& assignment, const Matching& matching,
                                FeedbackModel model) {
    return static_cast<double>(score_step(assignment, matching, model).regret_units) /
           assignment.size();
}

class RegretLedger {
  public:
    RegretLedger(int n, FeedbackModel model) : n_(n), model_(model) {}

    void record(const TypeAssignment& assignment, const Matching& matching) {
        steps_.push_back(score_step(assignment, matching, model_));
    }

    int n() const { return n_; }
    FeedbackModel model() const { return model_; }
    const std::vector<StepRecord>& steps() const { return steps_; }
    std::optional<long> tau() const { return tau_; }
    void set_tau(std::optional<long> t) { tau_ = t; }

    long count_01() const { return total(&StepRecord::c01, steps_.size()); }
    long count_11() const { return total(&StepRecord::c11, steps_.size()); }
    long count_00() const { return total(&StepRecord::c00, steps_.size()); }

    // Cumulative exact per-worker regret over recorded steps. Steps past tau
    // contribute nothing by construction, so the full sum equals the regret
    // accumulated until tau on absorbed runs.
    long cumulative_regret_units() const {
        long units = 0;
        for (const auto& s : steps_) units += s.regret_units;
        return units;
    }
    double exact_regret() const { return static_cast<double>(cumulative_regret_units()) / n_; }

  private:
    template <class Member>
    long total(Member member, std::size_t upto) const {
        long sum = 0;
        for (std::size_t i = 0; i < upto && i < steps_.size(); ++i) sum += steps_[i].*member;
        return sum;
    }

    friend double proxy_weak(const RegretLedger&);
    friend double proxy_strong(const RegretLedger&, double);

    int n_;
    FeedbackModel model_;
    std::vector<StepRecord> steps_;
    std::optional<long> tau_;
};

// First step index from which every later step incurs zero exact regret,
// given that the run ended in an absorbing configuration whose per-step
// regret is `absorbing_regret_units`. nullopt when the trace never settles
// at zero.
inline std::optional<long> detect_tau(const std::vector<StepRecord>& steps, bool absorbed,
                                      int absorbing_regret_units) {
    if (!absorbed || absorbing_regret_units != 0) return std::nullopt;
    long tau = 0;
    for (std::size_t t = 0; t < steps.size(); ++t)
        if (steps[t].regret_units != 0) tau = static_cast<long>(t) + 1;
    return tau;
}

// Weakest Link proxy: high-low match count until tau, scaled by 1/(2N).
inline double proxy_weak(const RegretLedger& ledger) {
    if (ledger.model() != FeedbackModel::WeakestLink)
        throw std::invalid_argument("proxy_weak applies to Weakest Link runs only");
    const auto upto = ledger.tau() ? static_cast<std::size_t>(*ledger.tau()) : ledger.steps().size();
    return static_cast<double>(ledger.total(&StepRecord::c01, upto)) / (2.0 * ledger.n());
}

// Strongest Link proxy: 0-0 matches for p > 0.5, 1-1 matches for p <= 0.5,
// scaled by 1/N, counted until tau.
inline double proxy_strong(const RegretLedger& ledger, double p) {
    if (ledger.model() != FeedbackModel::StrongestLink)
        throw std::invalid_argument("proxy_strong applies to Strongest Link runs only");
    const auto upto = ledger.tau() ? static_cast<std::size_t>(*ledger.tau()) : ledger.steps().size();
    const long count = p > 0.5 ? ledger.total(&StepRecord::c00, upto)
                               : ledger.total(&StepRecord::c11, upto);
    return static_cast<double>(count) / ledger.n();
}

}  // namespace teammatch
