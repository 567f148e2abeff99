#pragma once
#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace teammatch {

using WorkerId = int;

enum class FeedbackModel { WeakestLink, StrongestLink };

inline const char* to_string(FeedbackModel m) {
    return m == FeedbackModel::WeakestLink ? "weakest" : "strongest";
}

inline std::optional<FeedbackModel> parse_model(const std::string& s) {
    if (s == "weakest") return FeedbackModel::WeakestLink;
    if (s == "strongest") return FeedbackModel::StrongestLink;
    return std::nullopt;
}

// Unordered pair of workers, stored with a <= b.
struct WorkerPair {
    WorkerId a = -1;
    WorkerId b = -1;
    WorkerPair() = default;
    WorkerPair(WorkerId x, WorkerId y) : a(std::min(x, y)), b(std::max(x, y)) {}
    bool contains(WorkerId w) const { return a == w || b == w; }
    WorkerId other(WorkerId w) const { return a == w ? b : a; }
    friend bool operator==(const WorkerPair& l, const WorkerPair& r) = default;
    friend auto operator<=>(const WorkerPair& l, const WorkerPair& r) = default;
};

struct Matching {
    std::vector<WorkerPair> pairs;
};

struct Outcome {
    WorkerPair pair;
    int score = 0;  // binary
};

// Hidden ground-truth worker types. 0 = low, 1 = high.
class TypeAssignment {
  public:
    explicit TypeAssignment(std::vector<int> theta)
        : theta_(std::move(theta)),
          n1_(static_cast<int>(std::count(theta_.begin(), theta_.end(), 1))) {
        if (theta_.size() % 2 != 0) throw std::invalid_argument("population size must be even");
        for (int t : theta_)
            if (t != 0 && t != 1) throw std::invalid_argument("worker types must be 0 or 1");
    }

    int size() const { return static_cast<int>(theta_.size()); }
    int type(WorkerId w) const { return theta_[static_cast<std::size_t>(w)]; }
    int high_count() const { return n1_; }
    const std::vector<int>& types() const { return theta_; }

  private:
    std::vector<int> theta_;
    int n1_;
};

// Each coordinate i.i.d. Bernoulli(p), drawn from the given stream.
inline TypeAssignment sample_types(int n, double p, Rng& rng) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("n must be even and >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
    std::vector<int> theta(static_cast<std::size_t>(n));
    for (auto& t : theta) t = rng.bernoulli(p) ? 1 : 0;
    return TypeAssignment(std::move(theta));
}

inline TypeAssignment sample_types(int n, double p, std::uint64_t seed) {
    Rng rng(seed);
    return sample_types(n, p, rng);
}

inline int payoff(FeedbackModel model, int ti, int tj) {
    return model == FeedbackModel::WeakestLink ? std::min(ti, tj) : std::max(ti, tj);
}

// Maximum one-step payoff over all perfect matchings, in closed form.
// Weakest Link: pair highs together -> floor(n1/2). Strongest Link: spread
// highs across pairs -> min(n1, N/2).
inline int optimal_step_payoff(FeedbackModel model, const TypeAssignment& assignment) {
    const int n1 = assignment.high_count();
    if (model == FeedbackModel::WeakestLink) return n1 / 2;
    return std::min(n1, assignment.size() / 2);
}

struct MatchingViolation {
    enum class Kind { SelfPair, OutOfRange, Duplicate, Missing };
    Kind kind;
    WorkerId worker;

    std::string describe() const {
        switch (kind) {
            case Kind::SelfPair: return "worker " + std::to_string(worker) + " paired with itself";
            case Kind::OutOfRange: return "worker " + std::to_string(worker) + " out of range";
            case Kind::Duplicate: return "worker " + std::to_string(worker) + " appears twice";
            case Kind::Missing: return "worker " + std::to_string(worker) + " is unmatched";
        }
        return "unknown violation";
    }
};

// Checks the perfect-matching invariants; reports the first violation found.
inline std::optional<MatchingViolation> validate_matching(const Matching& m, int n) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto& pr : m.pairs) {
        if (pr.a == pr.b) return MatchingViolation{MatchingViolation::Kind::SelfPair, pr.a};
        for (WorkerId w : {pr.a, pr.b}) {
            if (w < 0 || w >= n) return MatchingViolation{MatchingViolation::Kind::OutOfRange, w};
            if (seen[static_cast<std::size_t>(w)])
                return MatchingViolation{MatchingViolation::Kind::Duplicate, w};
            seen[static_cast<std::size_t>(w)] = 1;
        }
    }
    for (WorkerId w = 0; w < n; ++w)
        if (!seen[static_cast<std::size_t>(w)])
            return MatchingViolation{MatchingViolation::Kind::Missing, w};
    return std::nullopt;
}

inline std::vector<Outcome> realize_outcomes(const Matching& m, const TypeAssignment& assignment,
                                             FeedbackModel model) {
    std::vector<Outcome> out;
    out.reserve(m.pairs.size());
    for (const auto& pr : m.pairs)
        out.push_back({pr, payoff(model, assignment.type(pr.a), assignment.type(pr.b))});
    return out;
}

}  // namespace teammatch
