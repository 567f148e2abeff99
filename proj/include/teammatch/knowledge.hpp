#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "core.hpp"

namespace teammatch {

// Thrown when an observed outcome contradicts current knowledge. With an
// honest environment this signals a bug, never a recoverable condition.
class inconsistency_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

class not_a_clique_partition : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

enum class WorkerStatus : unsigned char { Unknown, KnownHigh, KnownLow };

struct DeductionLog {
    std::vector<WorkerId> newly_high;
    std::vector<WorkerId> newly_low;
    int step = -1;
};

// The sufficient statistic (KH_t, KL_t, G_t): known-high set, known-low set,
// and the unknown-worker graph. Under Weakest Link an edge records a past
// score of 0 (not both high); under Strongest Link a past score of 1 (not
// both low). Edges incident to identified workers are deleted, so the graph
// always lives on the unknown set only.
class KnowledgeState {
  public:
    KnowledgeState(int n, FeedbackModel model)
        : model_(model),
          status_(static_cast<std::size_t>(n), WorkerStatus::Unknown),
          adjacency_(static_cast<std::size_t>(n)),
          num_unknown_(n) {
        if (n < 2 || n % 2 != 0) throw std::invalid_argument("n must be even and >= 2");
    }

    int size() const { return static_cast<int>(status_.size()); }
    FeedbackModel model() const { return model_; }

    WorkerStatus status(WorkerId w) const { return status_[static_cast<std::size_t>(w)]; }
    bool is_unknown(WorkerId w) const { return status(w) == WorkerStatus::Unknown; }
    int num_high() const { return num_high_; }
    int num_low() const { return num_low_; }
    int num_unknown() const { return num_unknown_; }
    long edge_count() const { return edge_count_; }

    std::vector<WorkerId> known_high_ids() const { return collect(WorkerStatus::KnownHigh); }
    std::vector<WorkerId> known_low_ids() const { return collect(WorkerStatus::KnownLow); }
    std::vector<WorkerId> unknown_ids() const { return collect(WorkerStatus::Unknown); }

    bool has_edge(WorkerId i, WorkerId j) const {
        const auto& nb = adjacency_[static_cast<std::size_t>(i)];
        return nb.find(j) != nb.end();
    }

    const std::unordered_set<WorkerId>& neighbors(WorkerId w) const {
        return adjacency_[static_cast<std::size_t>(w)];
    }

    // Applies one round of simultaneous outcomes and iterates deduction to a
    // fixed point. The final state does not depend on outcome order.
    DeductionLog update(const std::vector<Outcome>& outcomes, int step = -1) {
        DeductionLog log;
        log.step = step;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& o : outcomes) changed |= apply_outcome(o, log);
        }
        // Remaining uninformative outcomes between unknowns become edges.
        for (const auto& o : outcomes) {
            const bool edge_score = (model_ == FeedbackModel::WeakestLink) ? o.score == 0
                                                                           : o.score == 1;
            if (edge_score && is_unknown(o.pair.a) && is_unknown(o.pair.b))
                add_edge(o.pair.a, o.pair.b);
        }
        std::sort(log.newly_high.begin(), log.newly_high.end());
        std::sort(log.newly_low.begin(), log.newly_low.end());
        return log;
    }

    // Connected components of the unknown graph, each sorted, ordered by
    // smallest member. Singleton components are included.
    std::vector<std::vector<WorkerId>> components() const {
        std::vector<std::vector<WorkerId>> comps;
        std::vector<char> visited(status_.size(), 0);
        for (WorkerId v = 0; v < size(); ++v) {
            if (!is_unknown(v) || visited[static_cast<std::size_t>(v)]) continue;
            std::vector<WorkerId> comp;
            std::vector<WorkerId> stack{v};
            visited[static_cast<std::size_t>(v)] = 1;
            while (!stack.empty()) {
                const WorkerId u = stack.back();
                stack.pop_back();
                comp.push_back(u);
                for (WorkerId w : adjacency_[static_cast<std::size_t>(u)]) {
                    if (!visited[static_cast<std::size_t>(w)]) {
                        visited[static_cast<std::size_t>(w)] = 1;
                        stack.push_back(w);
                    }
                }
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
        return comps;
    }

    // Components if every one of them is complete, nullopt otherwise.
    std::optional<std::vector<std::vector<WorkerId>>> try_clique_partition() const {
        auto comps = components();
        for (const auto& comp : comps) {
            const auto need = static_cast<std::size_t>(comp.size() - 1);
            for (WorkerId v : comp)
                if (adjacency_[static_cast<std::size_t>(v)].size() != need) return std::nullopt;
        }
        return comps;
    }

    std::vector<std::vector<WorkerId>> clique_partition() const {
        auto comps = try_clique_partition();
        if (!comps) throw not_a_clique_partition("unknown graph is not a disjoint union of cliques");
        return std::move(*comps);
    }

    // True when no untested pair of unknown workers remains, i.e. the unknown
    // graph is a single complete clique (or has at most one vertex).
    bool unknowns_fully_tested() const {
        const long v = num_unknown_;
        if (v <= 1) return true;
        if (edge_count_ != v * (v - 1) / 2) return false;
        // Edge count alone proves completeness only if the graph is connected
        // on one component; a full count forces exactly that.
        for (WorkerId w = 0; w < size(); ++w)
            if (is_unknown(w) &&
                adjacency_[static_cast<std::size_t>(w)].size() != static_cast<std::size_t>(v - 1))
                return false;
        return true;
    }

    // Exact per-worker posterior P(theta = 1) on one connected component,
    // by enumeration against the Bernoulli(p) prior. Weakest Link: the high
    // set is an independent set of the 0-edge graph; Strongest Link: the low
    // set is an independent set of the 1-edge graph. Capped at 20 vertices;
    // this is an oracle for tests, not a hot path.
    std::vector<double> component_posterior(const std::vector<WorkerId>& component,
                                            double p) const {
        const int m = static_cast<int>(component.size());
        if (m > kPosteriorCap)
            throw std::invalid_argument("component exceeds the posterior enumeration cap");
        for (WorkerId w : component)
            if (!is_unknown(w)) throw std::invalid_argument("component contains a known worker");

        std::vector<std::uint32_t> adj_mask(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (has_edge(component[static_cast<std::size_t>(i)],
                             component[static_cast<std::size_t>(j)])) {
                    adj_mask[static_cast<std::size_t>(i)] |= (1u << j);
                    adj_mask[static_cast<std::size_t>(j)] |= (1u << i);
                }

        // Subset S is the high set (weakest) or the low set (strongest).
        const double q = 1.0 - p;
        const double member_weight = (model_ == FeedbackModel::WeakestLink) ? p : q;
        const double rest_weight = (model_ == FeedbackModel::WeakestLink) ? q : p;
        double total = 0.0;
        std::vector<double> in_subset(static_cast<std::size_t>(m), 0.0);
        for (std::uint32_t s = 0; s < (1u << m); ++s) {
            bool independent = true;
            for (int i = 0; i < m && independent; ++i)
                if ((s >> i) & 1u)
                    if ((adj_mask[static_cast<std::size_t>(i)] & s) != 0) independent = false;
            if (!independent) continue;
            const int k = __builtin_popcount(s);
            double w = 1.0;
            for (int i = 0; i < k; ++i) w *= member_weight;
            for (int i = 0; i < m - k; ++i) w *= rest_weight;
            total += w;
            for (int i = 0; i < m; ++i)
                if ((s >> i) & 1u) in_subset[static_cast<std::size_t>(i)] += w;
        }
        std::vector<double> high_prob(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const double frac = total > 0.0 ? in_subset[static_cast<std::size_t>(i)] / total : 0.0;
            high_prob[static_cast<std::size_t>(i)] =
                (model_ == FeedbackModel::WeakestLink) ? frac : 1.0 - frac;
        }
        return high_prob;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["model"] = to_string(model_);
        j["known_high"] = known_high_ids();
        j["known_low"] = known_low_ids();
        j["unknown"] = unknown_ids();
        std::vector<std::pair<WorkerId, WorkerId>> edges;
        for (WorkerId v = 0; v < size(); ++v)
            for (WorkerId w : adjacency_[static_cast<std::size_t>(v)])
                if (v < w) edges.emplace_back(v, w);
        std::sort(edges.begin(), edges.end());
        auto arr = nlohmann::json::array();
        for (const auto& [a, b] : edges) arr.push_back({a, b});
        j["edges"] = std::move(arr);
        return j;
    }

    static constexpr int kPosteriorCap = 20;

  private:
    std::vector<WorkerId> collect(WorkerStatus s) const {
        std::vector<WorkerId> out;
        for (WorkerId w = 0; w < size(); ++w)
            if (status(w) == s) out.push_back(w);
        return out;
    }

    // Applies one outcome against current knowledge; returns true if any
    // worker was newly identified.
    bool apply_outcome(const Outcome& o, DeductionLog& log) {
        const WorkerId i = o.pair.a;
        const WorkerId j = o.pair.b;
        if (model_ == FeedbackModel::WeakestLink) {
            if (o.score == 1) {
                if (status(i) == WorkerStatus::KnownLow || status(j) == WorkerStatus::KnownLow)
                    throw inconsistency_error("score 1 observed for a pair with a known low worker");
                bool any = false;
                if (is_unknown(i)) any |= mark_high(i, log);
                if (is_unknown(j)) any |= mark_high(j, log);
                return any;
            }
            if (status(i) == WorkerStatus::KnownHigh && status(j) == WorkerStatus::KnownHigh)
                throw inconsistency_error("score 0 observed for a pair of known high workers");
            if (status(i) == WorkerStatus::KnownHigh && is_unknown(j)) return mark_low(j, log);
            if (status(j) == WorkerStatus::KnownHigh && is_unknown(i)) return mark_low(i, log);
            return false;
        }
        // Strongest Link: the mirror image.
        if (o.score == 0) {
            if (status(i) == WorkerStatus::KnownHigh || status(j) == WorkerStatus::KnownHigh)
                throw inconsistency_error("score 0 observed for a pair with a known high worker");
            bool any = false;
            if (is_unknown(i)) any |= mark_low(i, log);
            if (is_unknown(j)) any |= mark_low(j, log);
            return any;
        }
        if (status(i) == WorkerStatus::KnownLow && status(j) == WorkerStatus::KnownLow)
            throw inconsistency_error("score 1 observed for a pair of known low workers");
        if (status(i) == WorkerStatus::KnownLow && is_unknown(j)) return mark_high(j, log);
        if (status(j) == WorkerStatus::KnownLow && is_unknown(i)) return mark_high(i, log);
        return false;
    }

    bool mark_high(WorkerId w, DeductionLog& log) {
        if (status(w) == WorkerStatus::KnownHigh) return false;
        if (status(w) == WorkerStatus::KnownLow)
            throw inconsistency_error("worker deduced both high and low");
        set_status(w, WorkerStatus::KnownHigh);
        log.newly_high.push_back(w);
        const auto nbs = detach(w);
        if (model_ == FeedbackModel::WeakestLink) {
            // 0-edges from a high worker pin every neighbor low.
            for (WorkerId u : nbs) mark_low(u, log);
        }
        return true;
    }

    bool mark_low(WorkerId w, DeductionLog& log) {
        if (status(w) == WorkerStatus::KnownLow) return false;
        if (status(w) == WorkerStatus::KnownHigh)
            throw inconsistency_error("worker deduced both high and low");
        set_status(w, WorkerStatus::KnownLow);
        log.newly_low.push_back(w);
        const auto nbs = detach(w);
        if (model_ == FeedbackModel::StrongestLink) {
            // 1-edges from a low worker pin every neighbor high.
            for (WorkerId u : nbs) mark_high(u, log);
        }
        return true;
    }

    void set_status(WorkerId w, WorkerStatus s) {
        status_[static_cast<std::size_t>(w)] = s;
        --num_unknown_;
        (s == WorkerStatus::KnownHigh ? num_high_ : num_low_) += 1;
    }

    // Removes w from the graph, returning its (sorted) former neighbors.
    std::vector<WorkerId> detach(WorkerId w) {
        auto& nb = adjacency_[static_cast<std::size_t>(w)];
        std::vector<WorkerId> out(nb.begin(), nb.end());
        std::sort(out.begin(), out.end());
        for (WorkerId u : out) adjacency_[static_cast<std::size_t>(u)].erase(w);
        edge_count_ -= static_cast<long>(out.size());
        nb.clear();
        return out;
    }

    void add_edge(WorkerId i, WorkerId j) {
        if (i == j) return;
        if (adjacency_[static_cast<std::size_t>(i)].insert(j).second) {
            adjacency_[static_cast<std::size_t>(j)].insert(i);
            ++edge_count_;
        }
    }

    FeedbackModel model_;
    std::vector<WorkerStatus> status_;
    std::vector<std::unordered_set<WorkerId>> adjacency_;
    int num_high_ = 0;
    int num_low_ = 0;
    int num_unknown_ = 0;
    long edge_count_ = 0;
};

}  // namespace teammatch
