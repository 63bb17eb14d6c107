#ifndef WMRL_DUAL_CONTROL_HPP
#define WMRL_DUAL_CONTROL_HPP

#include <optional>
#include <utility>
#include <vector>

#include "wmrl/qlearning.hpp"
#include "wmrl/working_memory.hpp"

namespace wmrl {

inline constexpr double kLikelihoodFloor = 1e-8;

// ---------------------------------------------------------------------------
// Weight-based mixture

struct MixtureState {
  double w = 0.5;
  double w0 = 0.5;
};

inline ActionDist mixture_combine(const ActionDist& p_ql, const ActionDist& p_bwm, double w) {
  ActionDist p{};
  for (int a = 0; a < kNumActions; ++a) p[a] = (1.0 - w) * p_ql[a] + w * p_bwm[a];
  return p;
}

/// Bayesian reliability update of the working-memory weight.
inline double mixture_weight_update(double w, double lik_bwm, double lik_ql) {
  if (!(lik_bwm > 0.0) && !(lik_ql > 0.0)) return w;
  lik_bwm = std::max(lik_bwm, kLikelihoodFloor);
  lik_ql = std::max(lik_ql, kLikelihoodFloor);
  const double num = lik_bwm * w;
  const double den = num + lik_ql * (1.0 - w);
  return std::clamp(num / den, 0.0, 1.0);
}

/// p(r|a) under Q-learning, reading Q(a) as a reward probability.
inline double ql_reward_likelihood(const QTable& q, int a, int r) {
  check_action(a);
  const double p1 = std::clamp(std::max(kLikelihoodFloor, q[a]), kLikelihoodFloor, 1.0 - kLikelihoodFloor);
  return r == 1 ? p1 : 1.0 - p1;
}

/// Reliability of a model from the choice it would have made: p(a) when a was
/// rewarded, 1 - p(a) when it was not.
inline double choice_reliability(const ActionDist& policy, int a, int r) {
  check_action(a);
  const double p = std::clamp(policy[a], kLikelihoodFloor, 1.0 - kLikelihoodFloor);
  return r == 1 ? p : 1.0 - p;
}

enum class ReliabilitySource { ChoiceProbability, RewardEstimate };

struct MixtureOptions {
  ReliabilitySource reliability = ReliabilitySource::ChoiceProbability;
  /// Start every problem from w0 instead of carrying w over.
  bool reset_weight = true;
};

// ---------------------------------------------------------------------------
// Entropy-based coordination

struct CoordParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

/// Trial type used by the meta-learned entropy table: phase and clipped index within the phase.
struct TrialType {
  Phase phase = Phase::Search;
  int index = 0;
};

inline constexpr int kMetaIndexSlots = 6;  // indices 0..5, the last one absorbing longer runs

class MetaEntropyTable {
 public:
  struct Entry {
    double h_bwm = kMaxEntropy;
    double h_ql = kMaxEntropy;
  };

  explicit MetaEntropyTable(bool phase_only = false) : phase_only_(phase_only) {}

  bool phase_only() const { return phase_only_; }

  void set(TrialType t, Entry e) {
    const auto [p, k] = index_of(t);
    entries_[p][k] = e;
  }

  /// Mean entropies for a trial type; types never observed fall back to (H^max, H^max).
  Entry lookup(TrialType t) const {
    const auto [p, k] = index_of(t);
    return entries_[p][k].value_or(Entry{});
  }

  bool has(TrialType t) const {
    const auto [p, k] = index_of(t);
    return entries_[p][k].has_value();
  }

  std::pair<int, int> index_of(TrialType t) const {
    return {t.phase == Phase::Search ? 0 : 1, phase_only_ ? 0 : std::clamp(t.index, 0, kMetaIndexSlots - 1)};
  }

 private:
  bool phase_only_ = false;
  std::array<std::array<std::optional<Entry>, kMetaIndexSlots>, 2> entries_{};
};

struct EntropyLog {
  TrialType type;
  double h_bwm = 0.0;
  double h_ql = 0.0;
};

inline MetaEntropyTable meta_learn(const std::vector<EntropyLog>& logs, bool phase_only = false) {
  MetaEntropyTable table(phase_only);
  struct Acc {
    double bwm = 0.0, ql = 0.0;
    std::size_t n = 0;
  };
  std::array<std::array<Acc, kMetaIndexSlots>, 2> acc{};
  for (const auto& log : logs) {
    const auto [p, k] = table.index_of(log.type);
    acc[p][k].bwm += log.h_bwm;
    acc[p][k].ql += log.h_ql;
    ++acc[p][k].n;
  }
  for (int p = 0; p < 2; ++p)
    for (int k = 0; k < kMetaIndexSlots; ++k)
      if (acc[p][k].n > 0)
        table.set({p == 0 ? Phase::Search : Phase::Repetition, k},
                  {acc[p][k].bwm / acc[p][k].n, acc[p][k].ql / acc[p][k].n});
  return table;
}

/// Probability of retrieving one more item given both systems' entropies.
inline double retrieval_probability(double h_bwm, double h_ql, int n, int i, const CoordParams& params,
                                    const MetaEntropyTable* meta = nullptr, TrialType type = {}) {
  if (i < 0 || i > n) throw ContractViolation("retrieved count outside [0, n]");
  double e = 2.0 * kMaxEntropy - h_bwm - h_ql;
  if (meta) {
    const auto m = meta->lookup(type);
    e = e + m.h_bwm - m.h_ql;
  }
  const double x = params.lambda1 * static_cast<double>(n - i) * std::exp(-params.lambda2 * e);
  const double p = 1.0 - 1.0 / (1.0 + x);
  return std::min(p, std::nextafter(1.0, 0.0));
}

struct CoordSettings {
  CoordParams gains;
  double beta = 3.0;
  /// Retrieval also stops once the working-memory entropy is at or below this floor.
  double theta = 0.0;
};

/// Summed-value policy: softmax(beta * (Q_bwm + Q_ql)).
inline ActionDist combined_policy(const ActionDist& q_bwm, const QTable& q, double beta) {
  std::array<double, kNumActions> v{};
  for (int a = 0; a < kNumActions; ++a) v[a] = q_bwm[a] + q[a];
  return softmax_policy(v, beta);
}

struct CoordDecision {
  ActionDist policy = uniform_dist();
  int items_retrieved = 0;
  double h_bwm = kMaxEntropy;
  double h_ql = kMaxEntropy;
  WmAccumulator acc;
};

/// One stopping point of the retrieval loop and its probability.
struct CoordOutcome {
  double probability = 0.0;
  CoordDecision decision;
};

namespace detail {

// Walks the retrieval chain; `visit(p_retrieve, decision_if_stopped_here)` returns whether to keep going.
template <class Visit>
void walk_retrieval(const QTable& q, const WmStore& store, const CoordSettings& s, const MetaEntropyTable* meta,
                    TrialType type, Visit&& visit) {
  const int n = static_cast<int>(store.size());
  CoordDecision d;
  d.h_ql = entropy(softmax_policy(q, s.beta));
  ActionDist q_bwm = uniform_dist();
  for (;;) {
    d.policy = combined_policy(q_bwm, q, s.beta);
    const int i = d.items_retrieved;
    const double p = (i < n && d.h_bwm > s.theta)
                         ? retrieval_probability(d.h_bwm, d.h_ql, n, i, s.gains, meta, type)
                         : 0.0;
    if (!visit(p, d) || i >= n || p <= 0.0) return;
    d.acc = retrieve_next(d.acc, store);
    d.items_retrieved = d.acc.items_retrieved;
    q_bwm = action_probability(d.acc);
    d.h_bwm = d.acc.entropy_h;
  }
}

}  // namespace detail

/// Sampled retrieval: each step retrieves with the sigmoid probability; the first failure stops the loop.
inline CoordDecision coordination_decide(const QTable& q, const WmStore& store, const CoordSettings& s, Rng& rng,
                                         const MetaEntropyTable* meta = nullptr, TrialType type = {}) {
  CoordDecision out;
  detail::walk_retrieval(q, store, s, meta, type, [&](double p, const CoordDecision& d) {
    out = d;
    return p > 0.0 && uniform01(rng) < p;
  });
  return out;
}

/// Every stopping point of the retrieval loop with its probability; the probabilities sum to 1.
inline std::vector<CoordOutcome> coordination_outcomes(const QTable& q, const WmStore& store, const CoordSettings& s,
                                                       const MetaEntropyTable* meta = nullptr, TrialType type = {}) {
  std::vector<CoordOutcome> out;
  double reach = 1.0;
  detail::walk_retrieval(q, store, s, meta, type, [&](double p, const CoordDecision& d) {
    out.push_back({reach * (1.0 - p), d});
    reach *= p;
    return reach > 0.0;
  });
  return out;
}

}  // namespace wmrl

#endif  // WMRL_DUAL_CONTROL_HPP
