#pragma once
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "policy.hpp"

namespace teammatch {

// Strongest Link exploration. After the arbitrary first round, pairs that
// scored 0 are known 0-0 pairs (the chain queue K), pairs that scored 1 have
// unknown composition (the set U). Each 0-0 pair runs chain epochs against U
// seeking high partners; claimed pairs always leave U, settled pairs land in
// P and re-match forever. Unclaimed U pairs re-match internally.
class ChainPolicy final : public Policy {
  public:
    enum class Variant { OneChain, TwoChain, Conservative };

    explicit ChainPolicy(Variant variant) : variant_(variant) {}

    Matching step(const KnowledgeState& k, Rng& rng) override {
        if (t_ == 0) {
            std::vector<WorkerId> all(static_cast<std::size_t>(k.size()));
            for (int i = 0; i < k.size(); ++i) all[static_cast<std::size_t>(i)] = i;
            first_ = random_matching(std::move(all), rng);
            ++t_;
            return first_;
        }
        if (!initialized_) initialize(k, rng);
        ++t_;
        if (variant_ == Variant::Conservative) return first_;

        std::vector<WorkerPair> sched;
        const std::size_t u_at_period_start = u_.size();
        for (auto& c : chains_) advance_chain(c, k, sched, u_at_period_start);
        for (const auto& up : u_) sched.push_back(up);
        for (const auto& pp : p_) sched.push_back(pp);
        return Matching{std::move(sched)};
    }

    bool absorbed(const KnowledgeState&) const override {
        if (t_ == 0) return false;
        if (variant_ == Variant::Conservative) return true;
        if (!initialized_) return false;
        for (const auto& c : chains_)
            if (c.st != ChainSt::Settled && c.st != ChainSt::Retired) return false;
        return true;
    }

    std::string name() const override {
        switch (variant_) {
            case Variant::OneChain: return "one-chain";
            case Variant::TwoChain: return "two-chain";
            case Variant::Conservative: return "conservative";
        }
        return "?";
    }

    // Post-settlement extension: splits a retired 0-0 pair and an identified
    // 1-1 pair into two 0-1 pairs. Returns true if anything changed.
    bool apply_terminal_rematch(const KnowledgeState& k) override {
        bool changed = false;
        for (;;) {
            int idx00 = -1, idx11 = -1;
            for (int i = 0; i < static_cast<int>(p_.size()); ++i) {
                const auto& pr = p_[static_cast<std::size_t>(i)];
                const bool both_low = k.status(pr.a) == WorkerStatus::KnownLow &&
                                      k.status(pr.b) == WorkerStatus::KnownLow;
                const bool both_high = k.status(pr.a) == WorkerStatus::KnownHigh &&
                                       k.status(pr.b) == WorkerStatus::KnownHigh;
                if (both_low && idx00 < 0) idx00 = i;
                if (both_high && idx11 < 0) idx11 = i;
            }
            if (idx00 < 0 || idx11 < 0) break;
            const WorkerPair lows = p_[static_cast<std::size_t>(idx00)];
            const WorkerPair highs = p_[static_cast<std::size_t>(idx11)];
            p_[static_cast<std::size_t>(idx00)] = WorkerPair(lows.a, highs.a);
            p_[static_cast<std::size_t>(idx11)] = WorkerPair(lows.b, highs.b);
            changed = true;
        }
        return changed;
    }

    int retired_count() const {
        int n = 0;
        for (const auto& c : chains_) n += c.st == ChainSt::Retired ? 1 : 0;
        return n;
    }

  private:
    enum class ChainSt { Idle, AwaitOne, AwaitTwoA, AwaitTwoB, Settled, Retired };
    struct Chain {
        WorkerId z1 = -1, z2 = -1;
        ChainSt st = ChainSt::Idle;
        WorkerId i = -1, j = -1, k = -1, l = -1;
    };

    void initialize(const KnowledgeState& k, Rng& rng) {
        auto pairs = first_.pairs;
        std::sort(pairs.begin(), pairs.end());
        for (const auto& pr : pairs) {
            const bool both_low = k.status(pr.a) == WorkerStatus::KnownLow &&
                                  k.status(pr.b) == WorkerStatus::KnownLow;
            if (both_low)
                chains_.push_back({pr.a, pr.b, ChainSt::Idle, -1, -1, -1, -1});
            else
                u_.push_back(pr);
        }
        rng.shuffle(chains_);
        initialized_ = true;
    }

    static WorkerStatus require_known(const KnowledgeState& k, WorkerId w) {
        const auto s = k.status(w);
        if (s == WorkerStatus::Unknown)
            throw std::logic_error("chain probe target was not identified");
        return s;
    }

    void advance_chain(Chain& c, const KnowledgeState& k, std::vector<WorkerPair>& sched,
                       std::size_t u_at_period_start) {
        switch (c.st) {
            case ChainSt::Settled:
            case ChainSt::Retired: return;
            case ChainSt::Idle: claim(c, sched, u_at_period_start); return;
            case ChainSt::AwaitOne: {
                const auto si = require_known(k, c.i);
                const auto sj = require_known(k, c.j);
                if (si == WorkerStatus::KnownHigh && sj == WorkerStatus::KnownHigh) {
                    settle(c, {{c.z1, c.i}, {c.z2, c.j}});
                } else {
                    p_.emplace_back(c.i, c.j);
                    c.st = ChainSt::Idle;
                    claim(c, sched, u_at_period_start);
                }
                return;
            }
            case ChainSt::AwaitTwoA: {
                const auto si = require_known(k, c.i);
                const auto sk = require_known(k, c.k);
                const bool ih = si == WorkerStatus::KnownHigh;
                const bool kh = sk == WorkerStatus::KnownHigh;
                if (ih && kh) {
                    const bool j_low = k.status(c.j) == WorkerStatus::KnownLow;
                    const bool l_low = k.status(c.l) == WorkerStatus::KnownLow;
                    if (j_low != l_low)
                        throw std::logic_error("chain cross pair resolved asymmetrically");
                    if (j_low) {
                        // Case 4: cross scored 0; both claimed pairs are now
                        // known 0-1 and retire to P.
                        p_.emplace_back(c.i, c.j);
                        p_.emplace_back(c.k, c.l);
                        c.st = ChainSt::Idle;
                        claim(c, sched, u_at_period_start);
                    } else {
                        // Case 1: every match scored 1; settle all three.
                        settle(c, {{c.z1, c.i}, {c.z2, c.k}, {c.j, c.l}});
                    }
                } else if (!ih && !kh) {
                    // Case 3: both probes scored 0, so j and l are known high.
                    p_.emplace_back(c.i, c.j);
                    p_.emplace_back(c.k, c.l);
                    c.st = ChainSt::Idle;
                    claim(c, sched, u_at_period_start);
                } else {
                    // Case 2. Normalize so the z1 probe was the one that
                    // scored 1; then l is known high and j is the remaining
                    // unknown. Second period: re-match (z1,i), probe (z2,j),
                    // re-match the resolved 0-1 pair (k,l).
                    if (!ih) {
                        std::swap(c.i, c.k);
                        std::swap(c.j, c.l);
                        std::swap(c.z1, c.z2);
                    }
                    sched.emplace_back(c.z1, c.i);
                    sched.emplace_back(c.z2, c.j);
                    sched.emplace_back(c.k, c.l);
                    c.st = ChainSt::AwaitTwoB;
                }
                return;
            }
            case ChainSt::AwaitTwoB: {
                const auto sj = require_known(k, c.j);
                if (sj == WorkerStatus::KnownHigh) {
                    settle(c, {{c.z1, c.i}, {c.z2, c.j}, {c.k, c.l}});
                } else {
                    p_.emplace_back(c.i, c.j);
                    p_.emplace_back(c.k, c.l);
                    c.st = ChainSt::Idle;
                    claim(c, sched, u_at_period_start);
                }
                return;
            }
        }
    }

    void settle(Chain& c, std::initializer_list<WorkerPair> pairs) {
        for (const auto& pr : pairs) p_.push_back(pr);
        c.st = ChainSt::Settled;
    }

    void claim(Chain& c, std::vector<WorkerPair>& sched, std::size_t u_at_period_start) {
        if (u_.empty()) {
            if (u_at_period_start == 0) {
                // U was already empty when the epoch began: retire for good.
                c.st = ChainSt::Retired;
                p_.emplace_back(c.z1, c.z2);
            } else {
                // Outpaced by earlier chains this period: idle once.
                sched.emplace_back(c.z1, c.z2);
            }
            return;
        }
        const WorkerPair u1 = u_.front();
        u_.pop_front();
        if (variant_ == Variant::OneChain || u_.empty()) {
            c.i = u1.a;
            c.j = u1.b;
            sched.emplace_back(c.z1, c.i);
            sched.emplace_back(c.z2, c.j);
            c.st = ChainSt::AwaitOne;
            return;
        }
        const WorkerPair u2 = u_.front();
        u_.pop_front();
        c.i = u1.a;
        c.j = u1.b;
        c.k = u2.a;
        c.l = u2.b;
        sched.emplace_back(c.z1, c.i);
        sched.emplace_back(c.z2, c.k);
        sched.emplace_back(c.j, c.l);
        c.st = ChainSt::AwaitTwoA;
    }

    Variant variant_;
    long t_ = 0;
    bool initialized_ = false;
    Matching first_;
    std::vector<Chain> chains_;
    std::deque<WorkerPair> u_;
    std::vector<WorkerPair> p_;
};

}  // namespace teammatch
