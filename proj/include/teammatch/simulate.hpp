#pragma once
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "core.hpp"
#include "knowledge.hpp"
#include "policy.hpp"
#include "regret.hpp"

namespace teammatch {

struct SimOptions {
    long t_max = 0;  // 0: default 4n
    bool record_trace = false;
    bool terminal_rematch = false;
    bool validate = true;
};

struct SimResult {
    RegretLedger ledger;
    std::optional<long> tau;
    bool absorbed = false;
    bool stranded = false;
    long steps_run = 0;
    nlohmann::json trace;
};

// Runs one replication to absorption or the step cap. After the policy
// reports an absorbing configuration, one probe step certifies the constant
// tail regret; the probe itself is not recorded.
inline SimResult run_simulation(const TypeAssignment& assignment, FeedbackModel model,
                                Policy& policy, Rng& rng, const SimOptions& options = {}) {
    const int n = assignment.size();
    const long t_max = options.t_max > 0 ? options.t_max : 4L * n;
    KnowledgeState knowledge(n, model);
    SimResult result{RegretLedger(n, model), std::nullopt, false, false, 0, nlohmann::json::array()};

    int absorbing_units = 0;
    for (long t = 0; t < t_max; ++t) {
        Matching matching = policy.step(knowledge, rng);
        if (options.validate)
            if (auto violation = validate_matching(matching, n))
                throw std::logic_error("policy emitted an invalid matching at step " +
                                       std::to_string(t) + ": " + violation->describe());
        result.ledger.record(assignment, matching);
        knowledge.update(realize_outcomes(matching, assignment, model), static_cast<int>(t));
        ++result.steps_run;
        if (options.record_trace) {
            nlohmann::json row;
            row["step"] = t;
            auto pairs = nlohmann::json::array();
            for (const auto& pr : matching.pairs) pairs.push_back({pr.a, pr.b});
            row["matching"] = std::move(pairs);
            row["regret_units"] = result.ledger.steps().back().regret_units;
            row["knowledge"] = knowledge.to_json();
            result.trace.push_back(std::move(row));
        }
        if (policy.absorbed(knowledge)) {
            if (options.terminal_rematch && policy.apply_terminal_rematch(knowledge)) continue;
            result.absorbed = true;
            // Probe the absorbing configuration once; its regret repeats
            // forever, so it certifies the tail without being recorded.
            Matching probe = policy.step(knowledge, rng);
            absorbing_units = score_step(assignment, probe, model).regret_units;
            break;
        }
    }
    result.tau = detect_tau(result.ledger.steps(), result.absorbed, absorbing_units);
    result.ledger.set_tau(result.tau);
    return result;
}

}  // namespace teammatch
