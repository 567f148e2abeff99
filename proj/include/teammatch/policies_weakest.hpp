#pragma once
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "policy.hpp"

namespace teammatch {

// Epoch budget for k-stopped Exponential Cliques. Natural log; the o(1)
// analysis is base-insensitive, but determinism needs one fixed choice.
inline int kstop_epoch_limit(int n) {
    if (n < 2) throw std::invalid_argument("population must have at least 2 workers");
    return static_cast<int>(std::floor(std::sqrt(2.0 * std::log(static_cast<double>(n)))));
}

// Random matching over the still-unknown workers, non-learning wrapper for
// everyone identified. Baseline.
class RandomPolicy final : public Policy {
  public:
    Matching step(const KnowledgeState& k, Rng& rng) override {
        auto unknowns = k.unknown_ids();
        rng.shuffle(unknowns);
        std::vector<WorkerPair> sched;
        std::vector<WorkerId> loose;
        for (std::size_t i = 0; i + 1 < unknowns.size(); i += 2)
            sched.emplace_back(unknowns[i], unknowns[i + 1]);
        if (unknowns.size() % 2 != 0) loose.push_back(unknowns.back());
        return assemble_full_matching(k, std::move(sched), loose);
    }
    bool absorbed(const KnowledgeState& k) const override { return k.unknowns_fully_tested(); }
    std::string name() const override { return "random"; }
};

// Brute-force sweep: every worker meets every other worker over N-1 rounds,
// then the optimal configuration repeats forever.
class AllPairsPolicy final : public Policy {
  public:
    explicit AllPairsPolicy(int n) : n_(n) {
        ids_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) ids_[static_cast<std::size_t>(i)] = i;
    }

    Matching step(const KnowledgeState& k, Rng&) override {
        if (t_ < n_ - 1) return Matching{round_robin_round(ids_, t_++)};
        ++t_;
        return absorbed_matching(k);
    }
    bool absorbed(const KnowledgeState&) const override { return t_ >= n_ - 1; }
    std::string name() const override { return "all-pairs"; }

  private:
    Matching absorbed_matching(const KnowledgeState& k) const {
        std::vector<WorkerPair> sched;
        std::vector<WorkerId> loose;
        auto unknowns = k.unknown_ids();
        for (std::size_t i = 0; i + 1 < unknowns.size(); i += 2)
            sched.emplace_back(unknowns[i], unknowns[i + 1]);
        if (unknowns.size() % 2 != 0) loose.push_back(unknowns.back());
        return assemble_full_matching(k, std::move(sched), loose);
    }
    int n_;
    long t_ = 0;
    std::vector<WorkerId> ids_;
};

// Exponential Cliques and its variants. The unknown graph is kept as a
// disjoint union of cliques whose size doubles each epoch:
//   - epoch 0 (t = 0): one uniform random matching;
//   - epoch k: cliques of size 2^k are paired at random, and 2^k steps of a
//     cyclic cross-schedule test all 2^k x 2^k pairs between the two cliques
//     of every pair; resolved blocks drop out mid-epoch;
//   - at most one unpaired clique self-matches until a later unpaired clique
//     appears, at which point the two cross-match and merge.
//
// learning_epochs > 0 turns the first epochs into Distributed Learning:
// pairs of known high workers probe a clique pair, one worker per clique per
// step, while a cyclic schedule pairs the untouched remainder across the two
// cliques with no repeated match. Every probed block is fully identified by
// the end of its epoch.
//
// With a stop limit, remaining untested pairs are completed by a circle
// round-robin over the survivors (rounds containing no untested pair are
// skipped), after which the configuration is absorbing.
class EcFamilyPolicy final : public Policy {
  public:
    struct Params {
        int learning_epochs = 0;
        std::optional<int> epoch_limit;  // nullopt: run until one clique remains
        std::string display_name = "ec";
    };

    explicit EcFamilyPolicy(Params params) : params_(std::move(params)) {}

    static EcFamilyPolicy pure_ec() { return EcFamilyPolicy({0, std::nullopt, "ec"}); }
    static EcFamilyPolicy kstop(int n, std::optional<int> limit_override = std::nullopt) {
        return EcFamilyPolicy(
            {0, limit_override ? *limit_override : kstop_epoch_limit(n), "kstop-ec"});
    }
    static EcFamilyPolicy ec_learning(int n, int j,
                                      std::optional<int> limit_override = std::nullopt) {
        return EcFamilyPolicy(
            {j, limit_override ? *limit_override : kstop_epoch_limit(n), "ec-l"});
    }

    Matching step(const KnowledgeState& k, Rng& rng) override {
        if (t_ == 0) {
            ++t_;
            std::vector<WorkerId> all(static_cast<std::size_t>(k.size()));
            for (int i = 0; i < k.size(); ++i) all[static_cast<std::size_t>(i)] = i;
            return random_matching(std::move(all), rng);
        }
        if (phase_ == Phase::Epoch && step_in_epoch_ >= epoch_len_) begin_epoch(k, rng);
        Matching m;
        switch (phase_) {
            case Phase::Epoch:
                m = emit_epoch_step(k);
                ++step_in_epoch_;
                break;
            case Phase::Finish: m = emit_finish_step(k); break;
            case Phase::Done: m = emit_done_step(k); break;
        }
        ++t_;
        return m;
    }

    bool absorbed(const KnowledgeState&) const override { return phase_ == Phase::Done; }
    std::string name() const override { return params_.display_name; }
    int current_epoch() const { return epoch_; }

  private:
    enum class Phase { Epoch, Finish, Done };
    enum class BlockKind { Regular, Merge, Self };
    struct Block {
        std::vector<WorkerId> a;
        std::vector<WorkerId> b;
        std::optional<std::pair<WorkerId, WorkerId>> helpers;
        BlockKind kind = BlockKind::Regular;
    };

    void begin_epoch(const KnowledgeState& k, Rng& rng) {
        ++epoch_;
        if (k.num_unknown() == 0) {
            phase_ = Phase::Done;
            return;
        }
        if (params_.epoch_limit && epoch_ > *params_.epoch_limit) {
            phase_ = Phase::Finish;
            finish_ids_.clear();
            finish_round_ = 0;
            return;
        }
        auto comps = k.clique_partition();
        if (!params_.epoch_limit && comps.size() <= 1) {
            phase_ = Phase::Done;
            return;
        }
        build_blocks(k, std::move(comps), rng);
        epoch_len_ = 1 << epoch_;
        step_in_epoch_ = 0;
    }

    void build_blocks(const KnowledgeState& k, std::vector<std::vector<WorkerId>> comps,
                      Rng& rng) {
        blocks_.clear();
        const auto regular_size = static_cast<std::size_t>(1) << epoch_;
        std::vector<std::vector<WorkerId>> regulars;
        std::vector<WorkerId> leftover;
        for (auto& comp : comps) {
            if (comp.size() == regular_size) {
                regulars.push_back(std::move(comp));
            } else if (comp.size() < regular_size) {
                if (!leftover.empty())
                    throw std::logic_error("more than one undersized clique at an epoch boundary");
                leftover = std::move(comp);
            } else {
                throw std::logic_error("oversized clique at an epoch boundary");
            }
        }
        rng.shuffle(regulars);
        for (std::size_t i = 0; i + 1 < regulars.size(); i += 2)
            blocks_.push_back({std::move(regulars[i]), std::move(regulars[i + 1]), std::nullopt,
                               BlockKind::Regular});
        std::vector<WorkerId> unpaired;
        if (regulars.size() % 2 != 0) unpaired = std::move(regulars.back());
        if (!unpaired.empty() && !leftover.empty()) {
            // Old leftover cross-matches into the new unpaired clique over
            // this epoch; their union is the next leftover.
            blocks_.push_back({std::move(leftover), std::move(unpaired), std::nullopt,
                               BlockKind::Merge});
        } else if (!unpaired.empty()) {
            blocks_.push_back({std::move(unpaired), {}, std::nullopt, BlockKind::Self});
        } else if (!leftover.empty()) {
            blocks_.push_back({std::move(leftover), {}, std::nullopt, BlockKind::Self});
        }
        if (epoch_ <= params_.learning_epochs) {
            const auto pool = k.known_high_ids();
            std::size_t next = 0;
            for (auto& blk : blocks_) {
                if (blk.kind != BlockKind::Regular) continue;
                if (next + 1 >= pool.size()) break;
                blk.helpers = {pool[next], pool[next + 1]};
                next += 2;
            }
        }
    }

    static bool all_known(const KnowledgeState& k, const std::vector<WorkerId>& ids) {
        for (WorkerId w : ids)
            if (k.is_unknown(w)) return false;
        return true;
    }

    static bool all_unknown(const KnowledgeState& k, const std::vector<WorkerId>& ids) {
        for (WorkerId w : ids)
            if (!k.is_unknown(w)) return false;
        return true;
    }

    Matching emit_epoch_step(const KnowledgeState& k) {
        std::vector<WorkerPair> sched;
        std::vector<WorkerId> loose;
        const int r = step_in_epoch_;
        for (const auto& blk : blocks_) {
            switch (blk.kind) {
                case BlockKind::Self: emit_self(k, blk, sched); break;
                case BlockKind::Merge: emit_merge(k, blk, r, sched); break;
                case BlockKind::Regular:
                    if (blk.helpers)
                        emit_learning(k, blk, r, sched, loose);
                    else
                        emit_cross(k, blk, r, sched);
                    break;
            }
        }
        return assemble_full_matching(k, std::move(sched), loose);
    }

    // Unpaired clique: internal repeats only, rotated for coverage symmetry.
    void emit_self(const KnowledgeState& k, const Block& blk, std::vector<WorkerPair>& sched) {
        if (all_known(k, blk.a)) return;
        if (!all_unknown(k, blk.a)) throw std::logic_error("partially identified unpaired clique");
        if (blk.a.size() < 2) return;
        for (const auto& pr : round_robin_round(blk.a, t_)) sched.push_back(pr);
    }

    // Equal-size clique pair: cyclic shift covers all m*m cross pairs in m
    // steps with no repeats.
    void emit_cross(const KnowledgeState& k, const Block& blk, int r,
                    std::vector<WorkerPair>& sched) {
        const bool a_known = all_known(k, blk.a);
        const bool b_known = all_known(k, blk.b);
        if (a_known && b_known) return;
        if (a_known != b_known || !all_unknown(k, blk.a) || !all_unknown(k, blk.b))
            throw std::logic_error("partially resolved clique block");
        const auto m = blk.a.size();
        for (std::size_t s = 0; s < m; ++s)
            sched.emplace_back(blk.a[s], blk.b[(s + static_cast<std::size_t>(r)) % m]);
    }

    // Leftover (size a) crossed into the fresh unpaired clique (size b > a):
    // all a*b cross pairs in b steps; the unused b-side workers repeat
    // internal matches.
    void emit_merge(const KnowledgeState& k, const Block& blk, int r,
                    std::vector<WorkerPair>& sched) {
        const bool a_known = all_known(k, blk.a);
        const bool b_known = all_known(k, blk.b);
        if (a_known && b_known) return;
        if (a_known != b_known || !all_unknown(k, blk.a) || !all_unknown(k, blk.b))
            throw std::logic_error("partially resolved merge block");
        const auto asz = blk.a.size();
        const auto bsz = blk.b.size();
        std::vector<char> used(bsz, 0);
        for (std::size_t s = 0; s < asz; ++s) {
            const std::size_t j = (s + static_cast<std::size_t>(r)) % bsz;
            sched.emplace_back(blk.a[s], blk.b[j]);
            used[j] = 1;
        }
        std::vector<WorkerId> rest;
        for (std::size_t j = 0; j < bsz; ++j)
            if (!used[j]) rest.push_back(blk.b[j]);
        for (std::size_t i = 0; i + 1 < rest.size(); i += 2) sched.emplace_back(rest[i], rest[i + 1]);
    }

    // Distributed Learning block. With both cliques live, step r matches
    // helper1 with C1[r], helper2 with C2[m-1-r], and C1[s] with
    // C2[(s+m-r) mod (m+1)] for s > r; this is the cyclic 1-factorization of
    // K_{m+1,m+1} with the helper edge removed, so helpers visit every clique
    // member exactly once and no cross pair repeats. Once one clique
    // resolves, its helper retires and the other helper keeps revealing its
    // clique one worker per step.
    void emit_learning(const KnowledgeState& k, const Block& blk, int r,
                       std::vector<WorkerPair>& sched, std::vector<WorkerId>& loose) {
        const auto [h1, h2] = *blk.helpers;
        const bool a_done = all_known(k, blk.a);
        const bool b_done = all_known(k, blk.b);
        if (a_done && b_done) return;
        const auto m = static_cast<int>(blk.a.size());
        auto pair_consecutive = [&](const std::vector<WorkerId>& ids) {
            for (std::size_t i = 0; i + 1 < ids.size(); i += 2) sched.emplace_back(ids[i], ids[i + 1]);
            if (ids.size() % 2 != 0) loose.push_back(ids.back());
        };
        if (!a_done && !b_done) {
            const WorkerId pa = blk.a[static_cast<std::size_t>(r)];
            const WorkerId pb = blk.b[static_cast<std::size_t>(m - 1 - r)];
            if (!k.is_unknown(pa) || !k.is_unknown(pb))
                throw std::logic_error("learning probe target already identified");
            sched.emplace_back(h1, pa);
            sched.emplace_back(h2, pb);
            for (int s = r + 1; s < m; ++s)
                sched.emplace_back(blk.a[static_cast<std::size_t>(s)],
                                   blk.b[static_cast<std::size_t>((s + m - r) % (m + 1))]);
            return;
        }
        if (a_done) {
            sched.emplace_back(h2, blk.b[static_cast<std::size_t>(m - 1 - r)]);
            std::vector<WorkerId> middles(blk.b.begin(), blk.b.begin() + (m - 1 - r));
            pair_consecutive(middles);
        } else {
            sched.emplace_back(h1, blk.a[static_cast<std::size_t>(r)]);
            std::vector<WorkerId> middles(blk.a.begin() + r + 1, blk.a.end());
            pair_consecutive(middles);
        }
    }

    Matching emit_finish_step(const KnowledgeState& k) {
        if (static_cast<int>(finish_ids_.size()) != k.num_unknown()) {
            finish_ids_ = k.unknown_ids();
            finish_round_ = 0;
        }
        auto ids = finish_ids_;
        if (ids.size() >= 2) {
            const bool odd = ids.size() % 2 != 0;
            if (odd) ids.push_back(kBye);
            const long rounds = static_cast<long>(ids.size()) - 1;
            for (long r = finish_round_; r < rounds; ++r) {
                auto pairs = round_robin_round(ids, r);
                std::vector<WorkerPair> sched;
                std::vector<WorkerId> loose;
                bool fresh = false;
                for (const auto& pr : pairs) {
                    if (pr.a == kBye || pr.b == kBye) {
                        loose.push_back(pr.a == kBye ? pr.b : pr.a);
                        continue;
                    }
                    sched.push_back(pr);
                    fresh |= !k.has_edge(pr.a, pr.b);
                }
                if (fresh) {
                    finish_round_ = r + 1;
                    return assemble_full_matching(k, std::move(sched), loose);
                }
            }
        }
        phase_ = Phase::Done;
        return emit_done_step(k);
    }

    Matching emit_done_step(const KnowledgeState& k) {
        std::vector<WorkerPair> sched;
        std::vector<WorkerId> loose;
        const auto unknowns = k.unknown_ids();
        for (std::size_t i = 0; i + 1 < unknowns.size(); i += 2)
            sched.emplace_back(unknowns[i], unknowns[i + 1]);
        if (unknowns.size() % 2 != 0) loose.push_back(unknowns.back());
        return assemble_full_matching(k, std::move(sched), loose);
    }

    static constexpr WorkerId kBye = -1;

    Params params_;
    Phase phase_ = Phase::Epoch;
    long t_ = 0;
    int epoch_ = 0;
    int epoch_len_ = 0;
    int step_in_epoch_ = 0;
    std::vector<Block> blocks_;
    std::vector<WorkerId> finish_ids_;
    long finish_round_ = 0;
};

}  // namespace teammatch
