#ifndef WMRL_AGENT_HPP
#define WMRL_AGENT_HPP

// Uniform agent over the four model kinds.
//
// A trial is `decide` (or `forecast` when replaying recorded choices) followed
// by `observe`; `on_new_problem` is called between problems. Inside `observe`
// the order is fixed: prediction error on the pre-update values, memory
// encoding (optionally gated by the error), Q update, Q decay, mixture weight
// update, anticipatory retrieval.

#include <optional>
#include <vector>

#include "wmrl/dual_control.hpp"
#include "wmrl/params.hpp"
#include "wmrl/task_env.hpp"

namespace wmrl {

struct AgentConfig {
  ModelKind model = ModelKind::QL;
  /// Numbered variation 1..7, or 0 when the flags were given explicitly.
  int variation = 1;
  VariationFlags flags;
  ParamVector params;
  /// Key the meta-entropy table on phase only instead of (phase, index).
  bool meta_phase_only = false;
  MixtureOptions mixture;
};

inline void validate_params(const AgentConfig& cfg) {
  for (ParamId id : active_params(cfg.model, cfg.flags)) {
    const auto& info = param_info(id);
    const double v = cfg.params[id];
    if (!std::isfinite(v) || v < info.bound.lo || v > info.bound.hi)
      throw ConfigError("parameter " + std::string(info.name) + " = " + std::to_string(v) + " outside [" +
                        std::to_string(info.bound.lo) + ", " + std::to_string(info.bound.hi) + "]");
  }
}

inline AgentConfig make_config(ModelKind model, int variation, const ParamVector& params = {}) {
  AgentConfig cfg;
  cfg.model = model;
  cfg.variation = variation;
  cfg.flags = variation_flags(model, variation);
  cfg.params = params;
  validate_params(cfg);
  return cfg;
}

inline AgentConfig make_config(ModelKind model, const VariationFlags& flags, const ParamVector& params = {}) {
  validate_flags(model, flags);
  AgentConfig cfg;
  cfg.model = model;
  cfg.variation = 0;
  cfg.flags = flags;
  cfg.params = params;
  validate_params(cfg);
  return cfg;
}

inline std::size_t param_count(const AgentConfig& cfg) { return active_params(cfg.model, cfg.flags).size(); }

inline QlParams ql_params(const AgentConfig& cfg) {
  QlParams p;
  p.alpha = cfg.params.alpha();
  p.beta = cfg.params.beta();
  p.gamma = cfg.flags.free_gamma ? cfg.params.gamma() : 0.0;
  p.kappa = cfg.flags.decay ? cfg.params.kappa() : 1.0;
  p.reset_on_new_problem = !cfg.flags.no_init;
  p.decay_enabled = cfg.flags.decay;
  return p;
}

/// sRT = log2(i+1)^sigma + H, with the i = 0 term taken as 0 for every sigma.
inline double simulated_rt(double items_retrieved, double h, double sigma) {
  if (items_retrieved <= 0.0) return h;
  return std::pow(std::log2(items_retrieved + 1.0), sigma) + h;
}

struct AgentState {
  QTable q;
  WmStore wm;
  MixtureState mix;
  std::optional<MetaEntropyTable> meta;
  std::optional<WmAccumulator> anticipated;
  /// Working-memory accumulator behind the latest decision (mixture reliability update).
  WmAccumulator last_acc;
};

struct Decision {
  int action = -1;
  ActionDist policy = uniform_dist();
  int items_retrieved = 0;
  double srt = 0.0;
  double h_bwm = kMaxEntropy;
  double h_ql = kMaxEntropy;
};

/// Deterministic view of a decision: the policy marginalized over stochastic retrieval.
struct Forecast {
  ActionDist policy = uniform_dist();
  double expected_items = 0.0;
  double expected_srt = 0.0;
  double h_bwm = kMaxEntropy;
  double h_ql = kMaxEntropy;
};

struct ObserveInfo {
  double delta = 0.0;
  bool encoded = false;
  double weight = 0.0;  // mixture weight after the update
};

struct TeacherForcedResult {
  double p_observed = 0.0;
  double srt = 0.0;
  double expected_items = 0.0;
};

inline TrialType context_of(const TrialRecord& rec) {
  if (rec.phase == Phase::Search) return {Phase::Search, static_cast<int>(rec.trial_index)};
  if (rec.errors_in_search < 0) throw DataError("trial record is missing its search error count");
  return {Phase::Repetition, static_cast<int>(rec.trial_index) - rec.errors_in_search - 1};
}

class Agent {
 public:
  explicit Agent(AgentConfig cfg, std::optional<MetaEntropyTable> meta = std::nullopt) : cfg_(std::move(cfg)) {
    validate_flags(cfg_.model, cfg_.flags);
    validate_params(cfg_);
    ql_ = ql_params(cfg_);
    state_.wm.capacity = cfg_.params.capacity();
    state_.wm.noise = cfg_.params.eta();
    state_.mix.w0 = cfg_.params.w0();
    state_.mix.w = state_.mix.w0;
    if (cfg_.flags.meta) state_.meta = std::move(meta);
  }

  const AgentConfig& config() const { return cfg_; }
  const AgentState& state() const { return state_; }
  AgentState& mutable_state() { return state_; }

  /// Records (trial type, H_bwm, H_ql) for every decision when enabled.
  void enable_entropy_log(bool on = true) { log_entropies_ = on; }
  const std::vector<EntropyLog>& entropy_log() const { return log_; }

  Decision decide(TrialType ctx, Rng& rng) {
    Decision d;
    const auto& p = cfg_.params;
    switch (cfg_.model) {
      case ModelKind::QL:
        d.policy = softmax_policy(state_.q, ql_.beta);
        d.h_ql = entropy(d.policy);
        break;
      case ModelKind::BWM:
      case ModelKind::Mixture: {
        const auto bwm = memory_decision();
        d.items_retrieved = bwm.items_retrieved;
        d.h_bwm = entropy(bwm.policy);
        if (cfg_.model == ModelKind::BWM) {
          d.policy = bwm.policy;
        } else {
          const auto p_ql = softmax_policy(state_.q, ql_.beta);
          d.h_ql = entropy(p_ql);
          d.policy = mixture_combine(p_ql, bwm.policy, state_.mix.w);
        }
        break;
      }
      case ModelKind::Coordination: {
        if (state_.anticipated) {
          d.policy = consume_anticipated();
          d.h_bwm = state_.last_acc.entropy_h;
          d.h_ql = entropy(softmax_policy(state_.q, ql_.beta));
        } else {
          const auto c = coordination_decide(state_.q, state_.wm, coord_settings(), rng, meta_table(), ctx);
          d.policy = c.policy;
          d.items_retrieved = c.items_retrieved;
          d.h_bwm = c.h_bwm;
          d.h_ql = c.h_ql;
          state_.last_acc = c.acc;
        }
        break;
      }
    }
    d.srt = simulated_rt(d.items_retrieved, entropy(d.policy), p.sigma());
    d.action = sample_action(d.policy, rng);
    log(ctx, d.h_bwm, d.h_ql);
    return d;
  }

  Forecast forecast(TrialType ctx) {
    if (cfg_.model != ModelKind::Coordination || state_.anticipated) {
      // Every path except sampled retrieval is deterministic; reuse decide() with a throwaway stream.
      Rng unused(0);
      const bool was_logging = log_entropies_;
      log_entropies_ = false;
      const Decision d = decide(ctx, unused);
      log_entropies_ = was_logging;
      log(ctx, d.h_bwm, d.h_ql);
      return {d.policy, static_cast<double>(d.items_retrieved), d.srt, d.h_bwm, d.h_ql};
    }
    Forecast f;
    f.policy = {};
    f.h_bwm = 0.0;
    const auto outcomes = coordination_outcomes(state_.q, state_.wm, coord_settings(), meta_table(), ctx);
    for (const auto& o : outcomes) {
      for (int a = 0; a < kNumActions; ++a) f.policy[a] += o.probability * o.decision.policy[a];
      f.expected_items += o.probability * o.decision.items_retrieved;
      f.expected_srt +=
          o.probability * simulated_rt(o.decision.items_retrieved, entropy(o.decision.policy), cfg_.params.sigma());
      f.h_bwm += o.probability * o.decision.h_bwm;
    }
    f.policy = normalized(f.policy);
    f.h_ql = outcomes.empty() ? kMaxEntropy : outcomes.front().decision.h_ql;
    log(ctx, f.h_bwm, f.h_ql);
    return f;
  }

  ObserveInfo observe(TrialType ctx, int action, int reward) {
    check_action(action);
    if (reward != 0 && reward != 1) throw ContractViolation("reward must be 0 or 1");
    ObserveInfo info;
    const bool ql = uses_qlearning(cfg_.model);
    const bool wm = uses_memory(cfg_.model);
    if (ql) info.delta = rpe(state_.q, action, reward, ql_.gamma);

    double lik_bwm = 0.0, lik_ql = 0.0;
    if (cfg_.model == ModelKind::Mixture) {
      if (cfg_.mixture.reliability == ReliabilitySource::ChoiceProbability) {
        lik_bwm = choice_reliability(policy_of(state_.last_acc), action, reward);
        lik_ql = choice_reliability(softmax_policy(state_.q, ql_.beta), action, reward);
      } else {
        lik_bwm = reward_likelihood(state_.last_acc, action, reward);
        lik_ql = ql_reward_likelihood(state_.q, action, reward);
      }
    }

    if (wm && (!cfg_.flags.thr || thr_gate(info.delta, cfg_.params.xi1(), cfg_.params.xi2()))) {
      state_.wm = encode_trial(std::move(state_.wm), action, reward);
      info.encoded = true;
    }
    if (ql) {
      state_.q = q_update(state_.q, action, reward, ql_);
      if (ql_.decay_enabled) state_.q = decay_q(state_.q, ql_.kappa);
    }
    if (cfg_.model == ModelKind::Mixture) state_.mix.w = mixture_weight_update(state_.mix.w, lik_bwm, lik_ql);
    info.weight = state_.mix.w;

    if (cfg_.flags.ant && ctx.phase == Phase::Search && reward == 0) state_.anticipated = anticipate(state_.wm);
    return info;
  }

  void on_new_problem() {
    state_.q = on_problem_boundary(state_.q, ql_);
    // The inter-problem interval counts as one elapsed step of forgetting.
    if (ql_.decay_enabled) state_.q = decay_q(state_.q, ql_.kappa);
    state_.wm.items.clear();
    state_.anticipated.reset();
    state_.last_acc = {};
    if (cfg_.mixture.reset_weight) state_.mix.w = state_.mix.w0;
  }

  /// Probability the model gives to the recorded choice, then an update with the recorded outcome.
  TeacherForcedResult teacher_forced_step(const TrialRecord& rec) {
    if (rec.chosen_action < 0 || rec.chosen_action >= kNumActions || (rec.reward != 0 && rec.reward != 1))
      throw DataError("malformed trial record at problem " + std::to_string(rec.problem_index) + ", trial " +
                      std::to_string(rec.trial_index));
    const TrialType ctx = context_of(rec);
    const Forecast f = forecast(ctx);
    observe(ctx, rec.chosen_action, rec.reward);
    return {f.policy[rec.chosen_action], f.expected_srt, f.expected_items};
  }

 private:
  BwmDecision memory_decision() {
    if (state_.anticipated) {
      BwmDecision d;
      d.policy = consume_anticipated();
      d.acc = state_.last_acc;
      return d;
    }
    auto d = bwm_decide(state_.wm, cfg_.params.theta());
    state_.last_acc = d.acc;
    return d;
  }

  // Anticipated retrieval counts as zero items at decision time.
  ActionDist consume_anticipated() {
    state_.last_acc = *state_.anticipated;
    state_.anticipated.reset();
    const ActionDist p_bwm = policy_of(state_.last_acc);
    if (cfg_.model == ModelKind::Coordination) return combined_policy(p_bwm, state_.q, ql_.beta);
    return p_bwm;
  }

  CoordSettings coord_settings() const {
    CoordSettings s;
    s.gains = {cfg_.params.lambda1(), cfg_.params.lambda2()};
    s.beta = ql_.beta;
    s.theta = cfg_.params.theta();
    return s;
  }

  const MetaEntropyTable* meta_table() const {
    return cfg_.flags.meta && state_.meta ? &*state_.meta : nullptr;
  }

  void log(TrialType ctx, double h_bwm, double h_ql) {
    if (log_entropies_) log_.push_back({ctx, h_bwm, h_ql});
  }

  AgentConfig cfg_;
  QlParams ql_;
  AgentState state_;
  bool log_entropies_ = false;
  std::vector<EntropyLog> log_;
};

}  // namespace wmrl

#endif  // WMRL_AGENT_HPP
