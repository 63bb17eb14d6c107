#ifndef WMRL_FITTING_HPP
#define WMRL_FITTING_HPP

// Bi-objective fitting of an agent configuration to a dataset:
//   1. negative log-likelihood of the recorded choices under teacher forcing,
//   2. squared error between z-scored representative-step RT profiles of the
//      data and of free-choice replays of the model.
// NSGA-II yields a Pareto front; one solution is picked with the augmented
// Chebyshev function over the front's ideal and nadir points.

#include <map>

#include "wmrl/dataset.hpp"
#include "wmrl/nsga2.hpp"
#include "wmrl/replay.hpp"

namespace wmrl {

inline constexpr double kProbabilityFloor = 1e-10;

struct FitObjectives {
  double neg_log_likelihood_choice = 0.0;
  double rt_mse = 0.0;
};

struct Solution {
  AgentConfig cfg;
  FitObjectives objectives;
};

struct ParetoFront {
  std::vector<Solution> solutions;
};

/// Runs the recorded trials through an agent; calls fn(record, teacher_forced_result) per trial.
template <class Fn>
void teacher_force(const AgentConfig& cfg, const Dataset& data, const std::optional<MetaEntropyTable>& meta,
                   Fn&& fn, bool log_entropies = false, std::vector<EntropyLog>* logs = nullptr) {
  std::optional<Agent> agent;
  const TrialRecord* prev = nullptr;
  for (const auto& rec : data.trials) {
    if (!prev || prev->session_id != rec.session_id) {
      if (agent && logs) logs->insert(logs->end(), agent->entropy_log().begin(), agent->entropy_log().end());
      agent.emplace(cfg, meta);
      agent->enable_entropy_log(log_entropies);
    } else if (prev->problem_index != rec.problem_index) {
      agent->on_new_problem();
    }
    fn(rec, agent->teacher_forced_step(rec));
    prev = &rec;
  }
  if (agent && logs) logs->insert(logs->end(), agent->entropy_log().begin(), agent->entropy_log().end());
}

/// META-L table from a teacher-forced pass of the same model without the meta bias.
inline MetaEntropyTable teacher_forced_meta_table(const AgentConfig& cfg, const Dataset& data) {
  AgentConfig plain = cfg;
  plain.flags.meta = false;
  std::vector<EntropyLog> logs;
  teacher_force(plain, data, std::nullopt, [](const TrialRecord&, const TeacherForcedResult&) {}, true, &logs);
  return meta_learn(logs, cfg.meta_phase_only);
}

inline double choice_negll(const AgentConfig& cfg, const Dataset& data,
                           std::optional<MetaEntropyTable> meta = std::nullopt) {
  if (data.empty()) throw DataError("choice likelihood needs a non-empty dataset");
  if (cfg.flags.meta && !meta) meta = teacher_forced_meta_table(cfg, data);
  double nll = 0.0;
  teacher_force(cfg, data, meta, [&](const TrialRecord&, const TeacherForcedResult& r) {
    nll -= std::log(std::max(r.p_observed, kProbabilityFloor));
  });
  return nll;
}

/// Bayesian information criterion, 2 negLL + k ln n.
inline double bic(double negll, std::size_t k_params, std::size_t n_trials) {
  if (n_trials < 1) throw ContractViolation("bic needs at least one trial");
  return 2.0 * negll + static_cast<double>(k_params) * std::log(static_cast<double>(n_trials));
}

struct FitRunConfig {
  ModelKind model = ModelKind::QL;
  int variation = 1;
  /// Overrides of the default parameter bounds.
  std::map<std::string, Bound> bounds;
  std::size_t population = 96;
  std::size_t generations = 150;
  std::uint64_t seed = 1;
  /// Replays per candidate for the RT curve during the search.
  std::size_t replicates = 64;
  /// Replays used to re-evaluate the final front; 0 keeps the search-time values.
  std::size_t report_replicates = 1000;
  /// Fit the RT objective; forced off when the data has no reaction times.
  bool fit_rt = true;
  double crossover_rate = 0.9;
  double mutation_rate = -1.0;
  std::size_t threads = 0;
};

inline moo::Box parameter_box(const std::vector<ParamId>& ids, const std::map<std::string, Bound>& overrides) {
  moo::Box box;
  for (ParamId id : ids) {
    const auto& info = param_info(id);
    Bound b = info.bound;
    if (auto it = overrides.find(std::string(info.name)); it != overrides.end()) {
      b = it->second;
      if (!(b.lo <= b.hi) || b.lo < info.bound.lo || b.hi > info.bound.hi)
        throw ConfigError("bounds for " + std::string(info.name) + " must lie inside [" +
                          std::to_string(info.bound.lo) + ", " + std::to_string(info.bound.hi) + "]");
    }
    box.lo.push_back(b.lo);
    box.hi.push_back(b.hi);
  }
  for (const auto& [name, b] : overrides) {
    const ParamId id = parse_param(name);
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      throw ConfigError("bounds given for " + name + ", which is not a free parameter of this model");
  }
  return box;
}

inline AgentConfig with_params(AgentConfig cfg, const std::vector<ParamId>& ids, std::span<const double> x) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    cfg.params[ids[i]] = ids[i] == ParamId::N ? std::round(x[i]) : x[i];
  return cfg;
}

/// RT objective of one configuration: replay the data's problem chain and compare representative profiles.
inline double rt_fit(const AgentConfig& cfg, const std::vector<ProblemSpec>& chain,
                     const RepresentativeCurve& data_curve, std::size_t replicates, std::uint64_t seed) {
  const auto model_curve = replay_curve(cfg, chain, replicates, seed);
  const auto [m, d] = align_curves(model_curve, data_curve);
  if (m.groups.empty()) return std::numeric_limits<double>::infinity();
  return rt_objective(m, d);
}

inline ParetoFront nsga2_fit(const AgentConfig& tmpl, const Dataset& data, const FitRunConfig& run) {
  if (data.empty()) throw DataError("cannot fit an empty dataset");
  validate_flags(tmpl.model, tmpl.flags);
  const auto ids = active_params(tmpl.model, tmpl.flags);
  const moo::Box box = parameter_box(ids, run.bounds);
  const auto chain = problem_chain(data);
  const auto data_curve = representative_steps(data.trials);
  const bool use_rt = run.fit_rt && data.has_rt && !data_curve.groups.empty();

  moo::Nsga2Settings s;
  s.population = run.population;
  s.generations = run.generations;
  s.crossover_rate = run.crossover_rate;
  s.mutation_rate = run.mutation_rate;
  s.seed = run.seed;
  s.threads = run.threads;

  const auto evaluate = [&](std::span<const double> x, std::uint64_t seed) -> moo::Objectives {
    const AgentConfig cfg = with_params(tmpl, ids, x);
    const double nll = choice_negll(cfg, data);
    const double rt = use_rt ? rt_fit(cfg, chain, data_curve, run.replicates, seed) : 0.0;
    return {nll, rt};
  };
  const auto pop = moo::nsga2(box, evaluate, s);

  ParetoFront front;
  for (const auto& ind : moo::first_front(pop))
    front.solutions.push_back({with_params(tmpl, ids, ind.x), {ind.f[0], ind.f[1]}});

  if (use_rt && run.report_replicates > 0) {
    for (std::size_t k = 0; k < front.solutions.size(); ++k)
      front.solutions[k].objectives.rt_mse =
          rt_fit(front.solutions[k].cfg, chain, data_curve, run.report_replicates, derive_seed(run.seed, 0x7265, k));
    std::vector<moo::Objectives> f;
    for (const auto& sol : front.solutions) f.push_back({sol.objectives.neg_log_likelihood_choice, sol.objectives.rt_mse});
    ParetoFront filtered;
    for (std::size_t k : moo::pareto_filter(f)) filtered.solutions.push_back(front.solutions[k]);
    front = std::move(filtered);
  }
  return front;
}

/// Member with the lowest choice negLL.
inline const Solution& best_choice_fit(const ParetoFront& front) {
  if (front.solutions.empty()) throw ContractViolation("empty Pareto front");
  return *std::min_element(front.solutions.begin(), front.solutions.end(), [](const Solution& a, const Solution& b) {
    return a.objectives.neg_log_likelihood_choice < b.objectives.neg_log_likelihood_choice;
  });
}

struct ChebyshevConfig {
  std::array<double, 2> lambda{0.5, 0.5};
  double epsilon = 1e-3;
};

/// Augmented Chebyshev score of an objective vector, each term normalized to [0, 1] between the
/// ideal (best) and nadir (worst) values; the ideal point scores 0.
inline double chebyshev_score(const std::array<double, 2>& x, const std::array<double, 2>& ideal,
                              const std::array<double, 2>& nadir, const ChebyshevConfig& c) {
  double worst = 0.0, sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double span = nadir[i] - ideal[i];
    const double term = span > 0.0 ? c.lambda[i] * (x[i] - ideal[i]) / span : 0.0;
    worst = std::max(worst, term);
    sum += term;
  }
  return worst + c.epsilon * sum;
}

struct RankedSolution {
  Solution solution;
  double score = 0.0;
  std::size_t index = 0;
};

inline std::vector<double> chebyshev_scores(const ParetoFront& front, const ChebyshevConfig& c = {}) {
  if (front.solutions.empty()) throw ContractViolation("chebyshev ranking needs a non-empty front");
  for (double l : c.lambda)
    if (l < 0.0) throw ConfigError("chebyshev weights must be non-negative");
  std::array<double, 2> ideal{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  std::array<double, 2> nadir{-ideal[0], -ideal[1]};
  const auto vec = [](const Solution& s) {
    return std::array<double, 2>{s.objectives.neg_log_likelihood_choice, s.objectives.rt_mse};
  };
  for (const auto& s : front.solutions)
    for (int i = 0; i < 2; ++i) {
      ideal[i] = std::min(ideal[i], vec(s)[i]);
      nadir[i] = std::max(nadir[i], vec(s)[i]);
    }
  std::vector<double> scores;
  for (const auto& s : front.solutions) scores.push_back(chebyshev_score(vec(s), ideal, nadir, c));
  return scores;
}

inline RankedSolution chebyshev_rank(const ParetoFront& front, const ChebyshevConfig& c = {}) {
  const auto scores = chebyshev_scores(front, c);
  const auto best = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
  return {front.solutions[best], scores[best], best};
}

}  // namespace wmrl

#endif  // WMRL_FITTING_HPP
