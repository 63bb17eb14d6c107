#include <gtest/gtest.h>

#include <cmath>

#include "wmrl/dual_control.hpp"

using namespace wmrl;

TEST(MixtureCombine, Endpoints) {
  const ActionDist ql{0.7, 0.1, 0.1, 0.1}, bwm{0.1, 0.7, 0.1, 0.1};
  EXPECT_EQ(mixture_combine(ql, bwm, 0.0), ql);
  EXPECT_EQ(mixture_combine(ql, bwm, 1.0), bwm);
}

TEST(MixtureCombine, Half) {
  const auto p = mixture_combine({0.7, 0.1, 0.1, 0.1}, {0.1, 0.7, 0.1, 0.1}, 0.5);
  const ActionDist want{0.4, 0.4, 0.1, 0.1};
  for (int a = 0; a < 4; ++a) EXPECT_NEAR(p[a], want[a], 1e-12);
}

TEST(MixtureCombine, StaysNormalized) {
  Rng rng(1);
  for (int k = 0; k < 300; ++k) {
    const ActionDist a = normalized({uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng)});
    const ActionDist b = normalized({uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng)});
    const auto p = mixture_combine(a, b, uniform01(rng));
    double s = 0;
    for (double x : p) {
      EXPECT_GE(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(WeightUpdate, EqualLikelihoods) {
  for (double w : {0.1, 0.5, 0.93}) EXPECT_NEAR(mixture_weight_update(w, 0.3, 0.3), w, 1e-12);
}

TEST(WeightUpdate, Example) {
  const double w = 0.5, lb = 0.8, lq = 0.2;
  EXPECT_NEAR(mixture_weight_update(w, lb, lq), lb * w / (lb * w + lq * (1 - w)), 1e-12);
  EXPECT_NEAR(mixture_weight_update(w, lb, lq), 0.8, 1e-12);
}

TEST(WeightUpdate, AbsorbingEndpoints) {
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const double lb = uniform01(rng), lq = uniform01(rng);
    EXPECT_EQ(mixture_weight_update(1.0, lb, lq), 1.0);
    EXPECT_EQ(mixture_weight_update(0.0, lb, lq), 0.0);
    const double w = mixture_weight_update(uniform01(rng), lb, lq);
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, 1.0);
  }
}

TEST(WeightUpdate, BothZeroKeepsWeight) { EXPECT_EQ(mixture_weight_update(0.37, 0.0, 0.0), 0.37); }

TEST(Reliability, RewardEstimate) {
  const QTable q{{0.0, 0.6, 1.0, 0.2}};
  EXPECT_NEAR(ql_reward_likelihood(q, 0, 1), 1e-8, 1e-20);
  EXPECT_NEAR(ql_reward_likelihood(q, 1, 1), 0.6, 1e-12);
  EXPECT_NEAR(ql_reward_likelihood(q, 1, 0), 0.4, 1e-12);
  EXPECT_NEAR(ql_reward_likelihood(q, 2, 0), 1e-8, 1e-16);
}

TEST(Reliability, ChoiceProbability) {
  const ActionDist p{0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(choice_reliability(p, 3, 1), 0.4, 1e-12);
  EXPECT_NEAR(choice_reliability(p, 3, 0), 0.6, 1e-12);
}

TEST(RetrievalProbability, ExhaustedMemory) {
  EXPECT_EQ(retrieval_probability(2.0, 2.0, 4, 4, {5.0, 1.0}), 0.0);
}

TEST(RetrievalProbability, MaxEntropyHalf) {
  EXPECT_NEAR(retrieval_probability(2.0, 2.0, 3, 2, {1.0, 1.0}), 1.0 - 1.0 / 2.0, 1e-12);
}

TEST(RetrievalProbability, CertaintySuppresses) {
  EXPECT_LT(retrieval_probability(0.0, 0.0, 5, 0, {1.0, 20.0}), 1e-12);
}

TEST(RetrievalProbability, RangeAndMonotone) {
  Rng rng(3);
  for (int k = 0; k < 300; ++k) {
    const double hb = 2 * uniform01(rng), hq = 2 * uniform01(rng);
    const int n = 1 + k % 7, i = k % n;
    const double l2a = 5 * uniform01(rng), l2b = l2a + 0.5;
    const CoordParams a{20 * uniform01(rng) + 0.01, l2a}, b{a.lambda1, l2b};
    const double pa = retrieval_probability(hb, hq, n, i, a), pb = retrieval_probability(hb, hq, n, i, b);
    EXPECT_GE(pa, 0.0);
    EXPECT_LT(pa, 1.0);
    const double e = 4.0 - hb - hq;
    if (e > 1e-6 && pa > 1e-300) EXPECT_LT(pb, pa);
  }
  EXPECT_LT(retrieval_probability(2, 2, 15, 0, {20, 0}), 1.0);
}

TEST(RetrievalProbability, ZeroMetaTableIsNeutral) {
  MetaEntropyTable zero;
  for (int ph = 0; ph < 2; ++ph)
    for (int k = 0; k < kMetaIndexSlots; ++k) zero.set({ph ? Phase::Repetition : Phase::Search, k}, {0.0, 0.0});
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const double hb = 2 * uniform01(rng), hq = 2 * uniform01(rng);
    const CoordParams p{3 * uniform01(rng), 3 * uniform01(rng)};
    const TrialType t{k % 2 ? Phase::Search : Phase::Repetition, k % 9};
    EXPECT_EQ(retrieval_probability(hb, hq, 5, 1, p, &zero, t), retrieval_probability(hb, hq, 5, 1, p));
  }
}

TEST(RetrievalProbability, HighMeanMemoryEntropyRetrievesLess) {
  MetaEntropyTable low, high;
  low.set({Phase::Search, 1}, {0.2, 1.0});
  high.set({Phase::Search, 1}, {1.8, 1.0});
  const TrialType t{Phase::Search, 1};
  EXPECT_LT(retrieval_probability(1.0, 1.0, 4, 0, {2, 1}, &high, t),
            retrieval_probability(1.0, 1.0, 4, 0, {2, 1}, &low, t));
}

TEST(MetaLearn, SingleLog) {
  const auto t = meta_learn({{{Phase::Search, 2}, 1.0, 0.5}});
  EXPECT_TRUE(t.has({Phase::Search, 2}));
  EXPECT_EQ(t.lookup({Phase::Search, 2}).h_bwm, 1.0);
  EXPECT_EQ(t.lookup({Phase::Search, 2}).h_ql, 0.5);
  EXPECT_FALSE(t.has({Phase::Search, 1}));
}

TEST(MetaLearn, Mean) {
  const auto t = meta_learn({{{Phase::Repetition, 0}, 1, 1}, {{Phase::Repetition, 0}, 0, 0}});
  EXPECT_NEAR(t.lookup({Phase::Repetition, 0}).h_bwm, 0.5, 1e-12);
  EXPECT_NEAR(t.lookup({Phase::Repetition, 0}).h_ql, 0.5, 1e-12);
}

TEST(MetaLearn, PhaseOnlyAndClipping) {
  const auto t = meta_learn({{{Phase::Search, 0}, 2, 0}, {{Phase::Search, 7}, 0, 0}}, true);
  EXPECT_NEAR(t.lookup({Phase::Search, 3}).h_bwm, 1.0, 1e-12);
  const auto u = meta_learn({{{Phase::Search, 5}, 2, 0}, {{Phase::Search, 9}, 0, 0}});
  EXPECT_NEAR(u.lookup({Phase::Search, 6}).h_bwm, 1.0, 1e-12);
}

namespace {

WmStore store_with(std::initializer_list<std::pair<int, int>> oldest_first, int capacity = 5) {
  WmStore s;
  s.capacity = capacity;
  for (auto [a, r] : oldest_first) s = encode_trial(s, a, r);
  return s;
}

}  // namespace

TEST(Coordination, EmptyStore) {
  const QTable q{{0.4, 0.1, 0.0, 0.9}};
  CoordSettings s;
  s.beta = 4.0;
  Rng rng(5);
  const auto d = coordination_decide(q, WmStore{}, s, rng);
  EXPECT_EQ(d.items_retrieved, 0);
  double z = 0;
  std::array<double, 4> e{};
  for (int a = 0; a < 4; ++a) z += e[a] = std::exp(4.0 * (0.25 + q[a]));
  for (int a = 0; a < 4; ++a) EXPECT_NEAR(d.policy[a], e[a] / z, 1e-12);
}

TEST(Coordination, NoGainNoRetrieval) {
  Rng rng(6);
  CoordSettings s;
  s.gains = {0.0, 0.5};
  s.beta = 3;
  const auto store = store_with({{0, 0}, {1, 0}, {2, 1}});
  for (int k = 0; k < 200; ++k) {
    const QTable q{{uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng)}};
    const auto d = coordination_decide(q, store, s, rng);
    EXPECT_EQ(d.items_retrieved, 0);
    EXPECT_EQ(argmax(d.policy), argmax(softmax_policy(q, s.beta)));
  }
}

TEST(Coordination, DecisiveItemDominatesFlatValues) {
  CoordSettings s;
  s.gains = {1e6, 0.0};
  s.beta = 5;
  Rng rng(7);
  const auto d = coordination_decide(QTable{}, store_with({{3, 1}}), s, rng);
  ASSERT_EQ(d.items_retrieved, 1);
  EXPECT_EQ(argmax(d.policy), 3);
}

TEST(Coordination, OutcomesSumToOneAndMatchSampling) {
  CoordSettings s;
  s.gains = {0.8, 0.7};
  s.beta = 3;
  const auto store = store_with({{0, 0}, {1, 0}, {3, 0}, {2, 1}});
  const QTable q{{0.1, 0.0, 0.3, 0.05}};
  const auto outs = coordination_outcomes(q, store, s);
  double total = 0;
  std::array<double, 5> p_items{};
  for (const auto& o : outs) {
    total += o.probability;
    p_items[o.decision.items_retrieved] += o.probability;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);

  // Independent Monte-Carlo run of the sampled loop.
  Rng rng(8);
  std::array<int, 5> count{};
  const int n = 200000;
  for (int k = 0; k < n; ++k) ++count[coordination_decide(q, store, s, rng).items_retrieved];
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(count[i] / double(n), p_items[i], 0.005);
}
