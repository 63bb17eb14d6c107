#ifndef WMRL_REPLAY_HPP
#define WMRL_REPLAY_HPP

// Free-choice replay of an agent against a fixed chain of problems.

#include "wmrl/agent.hpp"
#include "wmrl/representative.hpp"

namespace wmrl {

struct SimTrial {
  TrialRecord rec;
  int items_retrieved = 0;
  double weight = 0.0;
  bool encoded = false;
  double delta = 0.0;
  double h_bwm = kMaxEntropy;
  double h_ql = kMaxEntropy;
};

struct RecordOf {
  const TrialRecord& operator()(const SimTrial& t) const { return t.rec; }
};

inline constexpr int kDefaultMaxTrialsPerProblem = 200;

/// Plays every problem of the chain; a problem that is not solved within `max_trials` is abandoned.
inline std::vector<SimTrial> simulate_chain(Agent& agent, const std::vector<ProblemSpec>& chain, Rng& rng,
                                            const std::string& session_id = "sim",
                                            int max_trials = kDefaultMaxTrialsPerProblem) {
  std::vector<SimTrial> out;
  for (std::size_t p = 0; p < chain.size(); ++p) {
    if (p > 0) agent.on_new_problem();
    TaskState state = start_problem(chain[p]);
    const std::size_t first = out.size();
    bool ended = false;
    for (int t = 0; !ended && t < max_trials; ++t) {
      const TrialType ctx{state.phase, state.trial_in_phase};
      const Decision d = agent.decide(ctx, rng);
      const StepResult s = step(state, d.action);
      const ObserveInfo info = agent.observe(ctx, d.action, s.reward);

      SimTrial st;
      st.rec.session_id = session_id;
      st.rec.problem_index = chain[p].problem_index;
      st.rec.trial_index = static_cast<std::size_t>(t);
      st.rec.phase = state.phase;
      st.rec.chosen_action = d.action;
      st.rec.reward = s.reward;
      st.rec.rt = d.srt;
      st.rec.correct_action = chain[p].correct_action;
      st.items_retrieved = d.items_retrieved;
      st.weight = info.weight;
      st.encoded = info.encoded;
      st.delta = info.delta;
      st.h_bwm = d.h_bwm;
      st.h_ql = d.h_ql;
      out.push_back(std::move(st));

      state = s.state;
      ended = s.problem_ended;
    }
    int errors = 0;
    for (std::size_t k = first; k < out.size() && out[k].rec.reward == 0; ++k) ++errors;
    for (std::size_t k = first; k < out.size(); ++k) out[k].rec.errors_in_search = errors;
  }
  return out;
}

/// Entropy table for META-L: the same model run once without the meta bias.
inline MetaEntropyTable build_meta_table(const AgentConfig& cfg, const std::vector<ProblemSpec>& chain,
                                         std::uint64_t seed) {
  AgentConfig plain = cfg;
  plain.flags.meta = false;
  Agent agent(plain);
  agent.enable_entropy_log();
  Rng rng(derive_seed(seed, 0x6d657461));
  simulate_chain(agent, chain, rng, "meta");
  return meta_learn(agent.entropy_log(), cfg.meta_phase_only);
}

struct ContributionPoint {
  int errors = 0;
  int position = 0;
  Phase phase = Phase::Search;
  double items_retrieved = 0.0;
  double weight = 0.0;
  double update_probability = 0.0;
};

struct ContributionTrace {
  bool has_weight = false;
  std::vector<ContributionPoint> points;
};

inline ContributionTrace contribution_trace(const std::vector<SimTrial>& trials, bool has_weight) {
  std::array<std::vector<std::array<MeanSem, 3>>, kMaxRepresentativeErrors + 1> acc;
  for (int k = 0; k <= kMaxRepresentativeErrors; ++k) acc[k].resize(k + 1 + kRepresentativeRepeats);
  for_each_representative(
      trials,
      [&](int k, int pos, const SimTrial& t) {
        acc[k][pos][0].add(t.items_retrieved);
        acc[k][pos][1].add(t.weight);
        acc[k][pos][2].add(t.encoded ? 1.0 : 0.0);
      },
      RecordOf{});
  ContributionTrace trace;
  trace.has_weight = has_weight;
  for (int k = 0; k <= kMaxRepresentativeErrors; ++k)
    for (int pos = 0; pos < static_cast<int>(acc[k].size()); ++pos) {
      if (acc[k][pos][0].size() == 0) continue;
      trace.points.push_back({k, pos, pos <= k ? Phase::Search : Phase::Repetition, acc[k][pos][0].mean(),
                              acc[k][pos][1].mean(), acc[k][pos][2].mean()});
    }
  return trace;
}

struct ReplayOptions {
  bool keep_trials = true;
  int max_trials_per_problem = kDefaultMaxTrialsPerProblem;
  std::size_t threads = 0;
  /// Precomputed META-L table; built from a plain run of the same model when absent.
  std::optional<MetaEntropyTable> meta;
};

struct ReplayResult {
  RepresentativeCurve curve;
  ContributionTrace trace;
  PerformanceTable performance;
  std::vector<SimTrial> trials;  // every replicate, session_id "rep<k>"
};

/// Averages per-replicate curves: statistics are computed over problems within a replicate and then
/// averaged over the replicates that contain the group; problem counts are summed.
inline RepresentativeCurve average_curves(const std::vector<RepresentativeCurve>& reps) {
  RepresentativeCurve out;
  for (int k = 0; k <= kMaxRepresentativeErrors; ++k) {
    std::vector<const GroupCurve*> present;
    for (const auto& c : reps)
      if (const auto* g = c.group(k)) present.push_back(g);
    if (present.empty()) {
      out.notes.push_back("no problems with " + std::to_string(k) + " errors; group omitted");
      continue;
    }
    GroupCurve g = *present.front();
    const double m = static_cast<double>(present.size());
    g.problem_count = 0;
    for (auto& p : g.positions) p = {p.phase, p.position, 0, 0.0, 0.0, 0, 0.0, 0.0};
    for (const auto* src : present) {
      g.problem_count += src->problem_count;
      for (std::size_t j = 0; j < g.positions.size(); ++j) {
        auto& d = g.positions[j];
        const auto& s = src->positions[j];
        d.n += s.n;
        d.rt_n += s.rt_n;
        d.perf_mean += s.perf_mean / m;
        d.perf_sem += s.perf_sem / m;
        d.rt_mean += s.rt_mean / m;
        d.rt_sem += s.rt_sem / m;
      }
    }
    out.included_problems += g.problem_count;
    out.groups.push_back(std::move(g));
  }
  for (auto& g : out.groups)
    g.density = static_cast<double>(g.problem_count) / static_cast<double>(out.included_problems);
  for (const auto& c : reps) out.excluded_problems += c.excluded_problems;
  return out;
}

inline ReplayResult replay_simulate(const AgentConfig& cfg, const std::vector<ProblemSpec>& chain,
                                    std::size_t n_reps, std::uint64_t seed, ReplayOptions opts = {}) {
  if (chain.empty()) throw ContractViolation("replay_simulate needs a non-empty problem chain");
  if (cfg.flags.meta && !opts.meta) opts.meta = build_meta_table(cfg, chain, seed);

  std::vector<std::vector<SimTrial>> runs(n_reps);
  std::vector<RepresentativeCurve> curves(n_reps);
  parallel_for(n_reps, opts.threads, [&](std::size_t r) {
    Agent agent(cfg, opts.meta);
    Rng rng(derive_seed(seed, r + 1));
    runs[r] = simulate_chain(agent, chain, rng, "rep" + std::to_string(r), opts.max_trials_per_problem);
    curves[r] = representative_steps(runs[r], RecordOf{});
  });

  ReplayResult res;
  res.curve = average_curves(curves);
  std::vector<SimTrial> all;
  for (auto& run : runs) all.insert(all.end(), std::make_move_iterator(run.begin()), std::make_move_iterator(run.end()));
  res.trace = contribution_trace(all, cfg.model == ModelKind::Mixture);
  res.performance = performance_by_error_count(all, RecordOf{});
  if (opts.keep_trials) res.trials = std::move(all);
  return res;
}

/// Replicate-averaged representative curve only; used inside objective evaluation.
inline RepresentativeCurve replay_curve(const AgentConfig& cfg, const std::vector<ProblemSpec>& chain,
                                        std::size_t n_reps, std::uint64_t seed,
                                        const std::optional<MetaEntropyTable>& meta = std::nullopt,
                                        int max_trials = kDefaultMaxTrialsPerProblem) {
  std::optional<MetaEntropyTable> table = meta;
  if (cfg.flags.meta && !table) table = build_meta_table(cfg, chain, seed);
  std::vector<RepresentativeCurve> curves(n_reps);
  for (std::size_t r = 0; r < n_reps; ++r) {
    Agent agent(cfg, table);
    Rng rng(derive_seed(seed, r + 1));
    curves[r] = representative_steps(simulate_chain(agent, chain, rng, "rep", max_trials), RecordOf{});
  }
  return average_curves(curves);
}

}  // namespace wmrl

#endif  // WMRL_REPLAY_HPP
