#ifndef WMRL_WORKING_MEMORY_HPP
#define WMRL_WORKING_MEMORY_HPP

// Bayesian working memory.
//
// The store holds one item per encoded trial, newest first. Each item carries
// p(a|t) and p(r|a,t). At decision time items are folded in one by one from the
// newest; the running sum of the per-item joints p(a,r|t) gives p(a,r|t_0..i),
// whose reward-conditionals form the action values
//
//     Q(a) = p(a | r=1, t_0..i) / p(a | r=0, t_0..i)
//
// normalized into the action distribution. Retrieval stops once the entropy of
// that distribution drops to the threshold, or the store is exhausted.

#include <deque>

#include "wmrl/core.hpp"

namespace wmrl {

/// Floor on p(a|r=0) in the reward/no-reward ratio.
inline constexpr double kRatioFloor = 1e-8;

using RewardTable = std::array<std::array<double, kNumOutcomes>, kNumActions>;  // [a][r]

struct MemoryItem {
  ActionDist p_action{};
  RewardTable p_reward{};
};

struct WmStore {
  std::deque<MemoryItem> items;  // items[0] is the most recent trial
  int capacity = 1;
  double noise = 0.0;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

struct WmAccumulator {
  RewardTable joint_sum{};  // unnormalized sum of per-item joints
  int items_retrieved = 0;
  double entropy_h = kMaxEntropy;

  /// Normalized p(a,r|t_0..i); all zero while nothing is folded in.
  RewardTable joint() const {
    RewardTable j{};
    if (items_retrieved == 0) return j;
    double s = 0.0;
    for (const auto& row : joint_sum)
      for (double v : row) s += v;
    for (int a = 0; a < kNumActions; ++a)
      for (int r = 0; r < kNumOutcomes; ++r) j[a][r] = s > 0.0 ? joint_sum[a][r] / s : 0.0;
    return j;
  }
};

inline double entropy(const ActionDist& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return std::max(0.0, h);
}

/// One-hot description of a trial: the chosen action and its outcome; unchosen
/// actions get an uninformative 0.5/0.5 outcome column.
inline MemoryItem make_item(int a, int r) {
  check_action(a);
  MemoryItem item;
  for (int b = 0; b < kNumActions; ++b) {
    item.p_action[b] = b == a ? 1.0 : 0.0;
    item.p_reward[b] = {0.5, 0.5};
  }
  item.p_reward[a] = {r == 0 ? 1.0 : 0.0, r == 1 ? 1.0 : 0.0};
  return item;
}

/// Mixes an item with the uniform distribution: p <- (1 - eta) p + eta U.
inline void blur(MemoryItem& item, double eta) {
  for (int a = 0; a < kNumActions; ++a) {
    item.p_action[a] = (1.0 - eta) * item.p_action[a] + eta / kNumActions;
    for (int r = 0; r < kNumOutcomes; ++r)
      item.p_reward[a][r] = (1.0 - eta) * item.p_reward[a][r] + eta / kNumOutcomes;
  }
}

inline WmStore encode_trial(WmStore store, int a, int r) {
  for (auto& item : store.items) blur(item, store.noise);
  store.items.push_front(make_item(a, r));
  while (static_cast<int>(store.items.size()) > store.capacity) store.items.pop_back();
  return store;
}

/// Conditional p(a | r) from a joint table; an empty column yields the uniform distribution.
inline ActionDist action_given_outcome(const RewardTable& joint, int r) {
  ActionDist p{};
  for (int a = 0; a < kNumActions; ++a) p[a] = joint[a][r];
  return normalized(p);
}

inline ActionDist action_probability(const ActionDist& given_rewarded, const ActionDist& given_unrewarded) {
  ActionDist q{};
  for (int a = 0; a < kNumActions; ++a) q[a] = given_rewarded[a] / std::max(given_unrewarded[a], kRatioFloor);
  return normalized(q);
}

inline ActionDist action_probability(const WmAccumulator& acc) {
  if (acc.items_retrieved < 1) throw ContractViolation("action_probability needs at least one retrieved item");
  const RewardTable j = acc.joint();
  return action_probability(action_given_outcome(j, 1), action_given_outcome(j, 0));
}

/// Action distribution of an accumulator, uniform when nothing was retrieved.
inline ActionDist policy_of(const WmAccumulator& acc) {
  return acc.items_retrieved == 0 ? uniform_dist() : action_probability(acc);
}

/// p(r | a, t_0..i); 0.5 for actions the accumulator knows nothing about.
inline double reward_likelihood(const WmAccumulator& acc, int a, int r) {
  check_action(a);
  const double s = acc.joint_sum[a][0] + acc.joint_sum[a][1];
  if (acc.items_retrieved == 0 || !(s > 0.0)) return 0.5;
  return acc.joint_sum[a][r] / s;
}

inline WmAccumulator retrieve_next(WmAccumulator acc, const WmStore& store) {
  if (acc.items_retrieved < 0 || static_cast<std::size_t>(acc.items_retrieved) >= store.size())
    throw ContractViolation("retrieval past the end of the working-memory store");
  const MemoryItem& item = store.items[acc.items_retrieved];
  for (int a = 0; a < kNumActions; ++a)
    for (int r = 0; r < kNumOutcomes; ++r) acc.joint_sum[a][r] += item.p_reward[a][r] * item.p_action[a];
  ++acc.items_retrieved;
  acc.entropy_h = entropy(action_probability(acc));
  return acc;
}

struct BwmDecision {
  ActionDist policy = uniform_dist();
  int items_retrieved = 0;
  WmAccumulator acc;
};

/// Standalone retrieval: fold items while the entropy stays above theta.
inline BwmDecision bwm_decide(const WmStore& store, double theta) {
  BwmDecision d;
  const int n = static_cast<int>(store.size());
  while (d.acc.entropy_h > theta && d.acc.items_retrieved < n) d.acc = retrieve_next(d.acc, store);
  d.items_retrieved = d.acc.items_retrieved;
  d.policy = policy_of(d.acc);
  return d;
}

/// Folds the whole store ahead of the next decision.
inline WmAccumulator anticipate(const WmStore& store) {
  WmAccumulator acc;
  for (std::size_t k = 0; k < store.size(); ++k) acc = retrieve_next(acc, store);
  return acc;
}

/// Encoding gate on the reward prediction error: store the trial only when it falls outside [xi1, xi2].
inline bool thr_gate(double delta, double xi1, double xi2) { return delta < xi1 || delta > xi2; }

}  // namespace wmrl

#endif  // WMRL_WORKING_MEMORY_HPP
