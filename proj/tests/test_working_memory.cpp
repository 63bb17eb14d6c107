#include <gtest/gtest.h>

#include <algorithm>

#include "wmrl/working_memory.hpp"

using namespace wmrl;

namespace {

WmStore store_of(int capacity, double eta, std::initializer_list<std::pair<int, int>> oldest_first) {
  WmStore s;
  s.capacity = capacity;
  s.noise = eta;
  for (auto [a, r] : oldest_first) s = encode_trial(s, a, r);
  return s;
}

// Hand fold: sum of p(r|a) p(a) over the first i items, then normalized.
RewardTable oracle_joint(const WmStore& s, int i) {
  RewardTable j{};
  double total = 0;
  for (int k = 0; k < i; ++k)
    for (int a = 0; a < 4; ++a)
      for (int r = 0; r < 2; ++r) {
        j[a][r] += s.items[k].p_reward[a][r] * s.items[k].p_action[a];
        total += s.items[k].p_reward[a][r] * s.items[k].p_action[a];
      }
  for (auto& row : j)
    for (double& v : row) v /= total;
  return j;
}

void expect_normalized(const ActionDist& p) {
  double s = 0;
  for (double x : p) {
    EXPECT_GE(x, 0.0);
    s += x;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

}  // namespace

TEST(Encode, NoiseFreeSingleItem) {
  const auto s = store_of(5, 0.0, {{1, 0}});
  ASSERT_EQ(s.size(), 1u);
  const auto& item = s.items[0];
  for (int a = 0; a < 4; ++a) EXPECT_EQ(item.p_action[a], a == 1 ? 1.0 : 0.0);
  EXPECT_EQ(item.p_reward[1][0], 1.0);
  EXPECT_EQ(item.p_reward[1][1], 0.0);
  for (int a : {0, 2, 3}) EXPECT_EQ(item.p_reward[a][0], 0.5);
}

TEST(Encode, CapacityDropsOldest) {
  auto s = store_of(3, 0.0, {{0, 0}, {1, 0}, {2, 0}});
  s = encode_trial(s, 3, 1);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.items[0].p_action[3], 1.0);
  EXPECT_EQ(s.items[2].p_action[1], 1.0);
  for (const auto& item : s.items) EXPECT_EQ(item.p_action[0], 0.0);
}

TEST(Encode, NoiseMixesOlderItems) {
  const auto s = store_of(5, 0.2, {{0, 1}, {2, 0}});
  const auto& old = s.items[1];
  EXPECT_NEAR(old.p_action[0], 0.8 * 1.0 + 0.2 * 0.25, 1e-12);
  EXPECT_NEAR(old.p_action[0], 0.85, 1e-12);
  for (int a = 1; a < 4; ++a) EXPECT_NEAR(old.p_action[a], 0.05, 1e-12);
  EXPECT_NEAR(old.p_reward[0][1], 0.8 + 0.1, 1e-12);
  EXPECT_EQ(s.items[0].p_action[2], 1.0);
}

TEST(Retrieve, FirstItemAlone) {
  const auto s = store_of(5, 0.3, {{0, 1}, {2, 0}, {3, 1}});
  const auto acc = retrieve_next({}, s);
  const auto want = oracle_joint(s, 1);
  const auto got = acc.joint();
  for (int a = 0; a < 4; ++a)
    for (int r = 0; r < 2; ++r) EXPECT_NEAR(got[a][r], want[a][r], 1e-12);
  EXPECT_EQ(acc.items_retrieved, 1);
}

TEST(Retrieve, IdenticalItemsIdempotent) {
  const auto one = store_of(5, 0.0, {{2, 0}});
  const auto three = store_of(5, 0.0, {{2, 0}, {2, 0}, {2, 0}});
  const auto j1 = anticipate(one).joint();
  const auto j3 = anticipate(three).joint();
  for (int a = 0; a < 4; ++a)
    for (int r = 0; r < 2; ++r) EXPECT_NEAR(j1[a][r], j3[a][r], 1e-12);
}

TEST(Retrieve, TwoFailures) {
  const auto s = store_of(5, 0.0, {{0, 0}, {1, 0}});
  const auto j = anticipate(s).joint();
  EXPECT_NEAR(j[0][0], 0.5, 1e-12);
  EXPECT_NEAR(j[1][0], 0.5, 1e-12);
  double rest = 0;
  for (int a = 0; a < 4; ++a)
    for (int r = 0; r < 2; ++r)
      if (!(r == 0 && a < 2)) rest += j[a][r];
  EXPECT_EQ(rest, 0.0);
}

TEST(Retrieve, MatchesHandFoldEverywhere) {
  const auto s = store_of(6, 0.15, {{0, 0}, {1, 0}, {3, 1}, {3, 1}, {2, 0}, {3, 0}});
  WmAccumulator acc;
  for (int i = 1; i <= 6; ++i) {
    acc = retrieve_next(acc, s);
    const auto want = oracle_joint(s, i);
    const auto got = acc.joint();
    for (int a = 0; a < 4; ++a)
      for (int r = 0; r < 2; ++r) EXPECT_NEAR(got[a][r], want[a][r], 1e-12);
  }
  EXPECT_THROW(retrieve_next(acc, s), ContractViolation);
}

TEST(ActionProbability, UniformConditionals) {
  for (double x : action_probability(uniform_dist(), uniform_dist())) EXPECT_NEAR(x, 0.25, 1e-12);
}

TEST(ActionProbability, RatioExample) {
  const auto p = action_probability({0.7, 0.1, 0.1, 0.1}, {0.1, 0.3, 0.3, 0.3});
  const double z = 7.0 + 3.0 * (1.0 / 3.0);
  EXPECT_NEAR(p[0], 7.0 / z, 1e-12);
  EXPECT_NEAR(p[0], 0.875, 1e-12);
  for (int a = 1; a < 4; ++a) {
    EXPECT_NEAR(p[a], (1.0 / 3.0) / z, 1e-12);
    EXPECT_NEAR(p[a], 0.0417, 1e-4);
  }
}

TEST(ActionProbability, UntriedActionsFavored) {
  const auto p = policy_of(anticipate(store_of(5, 0.0, {{0, 0}})));
  EXPECT_LT(p[0], p[1]);
  EXPECT_EQ(p[1], p[2]);
  EXPECT_EQ(p[2], p[3]);
  EXPECT_EQ(*std::min_element(p.begin(), p.end()), p[0]);
}

TEST(ActionProbability, NeedsAnItem) { EXPECT_THROW(action_probability(WmAccumulator{}), ContractViolation); }

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(uniform_dist()), 2.0, 1e-12);
  EXPECT_EQ(entropy({0, 1, 0, 0}), 0.0);
  EXPECT_NEAR(entropy({0.5, 0.5, 0, 0}), 1.0, 1e-12);
}

TEST(Entropy, PermutationInvariantAndMaximalAtUniform) {
  Rng rng(8);
  for (int k = 0; k < 300; ++k) {
    ActionDist p{uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng) + 1e-3};
    p = normalized(p);
    ActionDist q = p;
    std::sort(q.begin(), q.end());
    EXPECT_NEAR(entropy(p), entropy(q), 1e-12);
    EXPECT_LT(entropy(p), 2.0);
  }
}

TEST(BwmDecide, HighThresholdDecidesAtOnce) {
  const auto d = bwm_decide(WmStore{}, 2.0);
  EXPECT_EQ(d.items_retrieved, 0);
  for (double x : d.policy) EXPECT_EQ(x, 0.25);
  EXPECT_EQ(bwm_decide(store_of(5, 0.0, {{1, 1}}), 2.0).items_retrieved, 0);
}

TEST(BwmDecide, ZeroThresholdExhaustsAmbiguousStore) {
  const auto s = store_of(4, 0.5, {{0, 0}, {1, 0}, {2, 0}, {0, 0}});
  EXPECT_EQ(bwm_decide(s, 0.0).items_retrieved, 4);
}

TEST(BwmDecide, DecisiveRewardedItem) {
  const auto d = bwm_decide(store_of(5, 0.0, {{2, 1}}), 1.0);
  EXPECT_EQ(d.items_retrieved, 1);
  EXPECT_NEAR(d.policy[2], 1.0, 1e-6);
  EXPECT_LT(d.acc.entropy_h, 1.0);
}

TEST(BwmDecide, LowerThresholdNeverRetrievesFewer) {
  Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    WmStore s;
    s.capacity = 1 + k % 8;
    s.noise = 0.3 * uniform01(rng);
    for (int t = 0; t < 10; ++t)
      s = encode_trial(s, std::uniform_int_distribution<int>(0, 3)(rng), uniform01(rng) < 0.3);
    int prev = -1;
    for (double theta = 2.0; theta >= -1e-9; theta -= 0.25) {
      const int i = bwm_decide(s, theta).items_retrieved;
      EXPECT_GE(i, prev);
      prev = i;
    }
    EXPECT_EQ(bwm_decide(s, 0.0).items_retrieved <= static_cast<int>(s.size()), true);
    expect_normalized(bwm_decide(s, 0.5).policy);
  }
}

TEST(BwmDecide, OneRewardedItemWins) {
  Rng rng(10);
  for (int k = 0; k < 100; ++k) {
    const int target = k % 4;
    WmStore s;
    s.capacity = 6;
    for (int t = 0; t < 4; ++t) {
      int a = std::uniform_int_distribution<int>(0, 3)(rng);
      if (a == target) a = (a + 1) % 4;
      s = encode_trial(s, a, 0);
    }
    s = encode_trial(s, target, 1);
    EXPECT_EQ(argmax(action_probability(anticipate(s))), target);
  }
}

TEST(Anticipate, EmptyStore) {
  const auto acc = anticipate(WmStore{});
  EXPECT_EQ(acc.items_retrieved, 0);
  for (double x : policy_of(acc)) EXPECT_EQ(x, 0.25);
}

TEST(Anticipate, SameAsExhaustiveDecision) {
  const auto s = store_of(5, 0.1, {{3, 0}});
  const auto a = anticipate(s);
  const auto d = bwm_decide(s, 0.0);
  EXPECT_EQ(a.items_retrieved, d.items_retrieved);
  for (int x = 0; x < 4; ++x) EXPECT_EQ(policy_of(a)[x], d.policy[x]);
}

TEST(ThrGate, Examples) {
  EXPECT_TRUE(thr_gate(1.0, -20.0, 0.3));
  EXPECT_FALSE(thr_gate(0.1, -0.2, 0.3));
  EXPECT_FALSE(thr_gate(-0.2, -0.2, 0.3));
  EXPECT_FALSE(thr_gate(0.3, -0.2, 0.3));
  EXPECT_TRUE(thr_gate(-0.4, -0.2, 0.3));
}

TEST(RewardLikelihood, FallbackAndReadout) {
  EXPECT_EQ(reward_likelihood(WmAccumulator{}, 1, 1), 0.5);
  const auto acc = anticipate(store_of(5, 0.0, {{1, 0}}));
  EXPECT_EQ(reward_likelihood(acc, 1, 0), 1.0);
  EXPECT_EQ(reward_likelihood(acc, 2, 1), 0.5);
}
