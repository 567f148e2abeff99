#pragma once
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "knowledge.hpp"
#include "rng.hpp"

namespace teammatch {

// A policy is a step function (knowledge, rng) -> matching over the whole
// population. State lives inside the policy object; one instance per
// replication, so replay is deterministic given the seed.
class Policy {
  public:
    virtual ~Policy() = default;
    virtual Matching step(const KnowledgeState& knowledge, Rng& rng) = 0;
    // True once the configuration is absorbing: no future match can change
    // knowledge and per-step regret is constant from here on.
    virtual bool absorbed(const KnowledgeState& knowledge) const = 0;
    virtual std::string name() const = 0;
    // Optional post-absorption hook (see the chain policies); returns true
    // if the absorbing configuration was changed.
    virtual bool apply_terminal_rematch(const KnowledgeState&) { return false; }
};

// Uniform random perfect matching on the given ids.
inline std::vector<WorkerPair> random_pairs(std::vector<WorkerId> ids, Rng& rng) {
    if (ids.size() % 2 != 0) throw std::invalid_argument("random matching needs an even id count");
    rng.shuffle(ids);
    std::vector<WorkerPair> out;
    out.reserve(ids.size() / 2);
    for (std::size_t i = 0; i + 1 < ids.size(); i += 2) out.emplace_back(ids[i], ids[i + 1]);
    return out;
}

inline Matching random_matching(std::vector<WorkerId> ids, Rng& rng) {
    return Matching{random_pairs(std::move(ids), rng)};
}

// Round `round` of the circle-method 1-factorization of the complete graph
// on an even participant list: over |ids|-1 rounds every unordered pair is
// matched exactly once.
inline std::vector<WorkerPair> round_robin_round(const std::vector<WorkerId>& ids, long round) {
    const int m = static_cast<int>(ids.size());
    if (m % 2 != 0) throw std::invalid_argument("round robin needs an even participant count");
    std::vector<WorkerPair> out;
    if (m < 2) return out;
    const int cycle = m - 1;
    const int r = static_cast<int>(round % cycle);
    out.reserve(static_cast<std::size_t>(m / 2));
    // Hub ids[m-1] meets position r; the rest pair symmetrically around it.
    out.emplace_back(ids[static_cast<std::size_t>(m - 1)], ids[static_cast<std::size_t>(r)]);
    for (int i = 1; i <= (m - 2) / 2; ++i) {
        const int x = (r + i) % cycle;
        const int y = (r - i + cycle) % cycle;
        out.emplace_back(ids[static_cast<std::size_t>(x)], ids[static_cast<std::size_t>(y)]);
    }
    return out;
}

// Pairs the identified workers around a policy's scheduled matches: known
// highs among themselves (stable order), known lows among themselves, and
// any scheduled-side unknown stragglers against known lows. A lone leftover
// high (possible only under learning policies) takes a known low; this keeps
// known highs away from unknown workers.
inline Matching assemble_full_matching(const KnowledgeState& k,
                                       std::vector<WorkerPair> scheduled,
                                       const std::vector<WorkerId>& loose_unknowns = {}) {
    std::vector<char> covered(static_cast<std::size_t>(k.size()), 0);
    for (const auto& pr : scheduled) {
        covered[static_cast<std::size_t>(pr.a)] = 1;
        covered[static_cast<std::size_t>(pr.b)] = 1;
    }
    std::vector<WorkerId> highs, lows;
    for (WorkerId w = 0; w < k.size(); ++w) {
        if (covered[static_cast<std::size_t>(w)]) continue;
        switch (k.status(w)) {
            case WorkerStatus::KnownHigh: highs.push_back(w); break;
            case WorkerStatus::KnownLow: lows.push_back(w); break;
            case WorkerStatus::Unknown: break;  // must appear in loose_unknowns
        }
    }
    for (std::size_t i = 0; i + 1 < highs.size(); i += 2) scheduled.emplace_back(highs[i], highs[i + 1]);
    std::size_t low_at = 0;
    auto take_low = [&]() -> WorkerId {
        if (low_at >= lows.size())
            throw std::logic_error("matching assembly ran out of known low workers");
        return lows[low_at++];
    };
    for (WorkerId u : loose_unknowns) scheduled.emplace_back(u, take_low());
    if (highs.size() % 2 != 0) scheduled.emplace_back(highs.back(), take_low());
    if ((lows.size() - low_at) % 2 != 0)
        throw std::logic_error("matching assembly left an odd number of known low workers");
    for (; low_at + 1 < lows.size(); low_at += 2) scheduled.emplace_back(lows[low_at], lows[low_at + 1]);
    return Matching{std::move(scheduled)};
}

// The non-learning pairing of identified workers: highs with highs, lows
// with lows. An odd low count leaves one low unpaired for the caller's
// odd-low rule; an odd high count is an invariant violation here.
struct WrapperPairs {
    std::vector<WorkerPair> pairs;
    std::optional<WorkerId> loose_low;
};

inline WrapperPairs nonlearning_wrapper(std::vector<WorkerId> known_high,
                                        std::vector<WorkerId> known_low) {
    if (known_high.size() % 2 != 0)
        throw std::logic_error("non-learning wrapper requires an even known-high count");
    std::sort(known_high.begin(), known_high.end());
    std::sort(known_low.begin(), known_low.end());
    WrapperPairs out;
    for (std::size_t i = 0; i + 1 < known_high.size(); i += 2)
        out.pairs.emplace_back(known_high[i], known_high[i + 1]);
    for (std::size_t i = 0; i + 1 < known_low.size(); i += 2)
        out.pairs.emplace_back(known_low[i], known_low[i + 1]);
    if (known_low.size() % 2 != 0) out.loose_low = known_low.back();
    return out;
}

}  // namespace teammatch
