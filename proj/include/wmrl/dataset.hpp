#ifndef WMRL_DATASET_HPP
#define WMRL_DATASET_HPP

// Behavioral dataset: a flat list of trials, possibly spanning several sessions.

#include <vector>

#include "wmrl/representative.hpp"

namespace wmrl {

struct Dataset {
  std::vector<TrialRecord> trials;
  /// False when at least one trial has no reaction time; RT objectives are then unavailable.
  bool has_rt = true;

  bool empty() const { return trials.empty(); }
  std::size_t size() const { return trials.size(); }
};

/// Checks the task semantics of every problem and fills errors_in_search. `row_of(k)` names the
/// source row of trial k in error messages.
template <class RowOf>
void label_problems(std::vector<TrialRecord>& trials, RowOf&& row_of) {
  std::size_t start = 0;
  while (start < trials.size()) {
    std::size_t end = start;
    while (end < trials.size() && trials[end].session_id == trials[start].session_id &&
           trials[end].problem_index == trials[start].problem_index)
      ++end;
    bool found = false;
    int errors = 0;
    for (std::size_t k = start; k < end; ++k) {
      auto& t = trials[k];
      if (t.correct_action != trials[start].correct_action)
        throw DataError("row " + std::to_string(row_of(k)) + ": correct_action changes within a problem");
      if (t.reward != (t.chosen_action == t.correct_action ? 1 : 0))
        throw DataError("row " + std::to_string(row_of(k)) + ": reward inconsistent with chosen/correct action");
      const Phase expected = found ? Phase::Repetition : Phase::Search;
      if (t.phase != expected)
        throw DataError("row " + std::to_string(row_of(k)) + ": phase " + phase_code(t.phase) +
                        " contradicts the reward history (expected " + phase_code(expected) + ")");
      if (!found && t.reward == 1) found = true;
      if (!found) ++errors;
    }
    for (std::size_t k = start; k < end; ++k) trials[k].errors_in_search = errors;
    start = end;
  }
}

inline void label_problems(std::vector<TrialRecord>& trials) {
  label_problems(trials, [](std::size_t k) { return k + 1; });
}

/// The chain of problems a dataset went through, for free-choice replay. The required repetition
/// count is the number of rewarded repetition trials observed, kept within the task's range.
inline std::vector<ProblemSpec> problem_chain(const Dataset& data) {
  std::vector<ProblemSpec> chain;
  for (const auto& problem : split_problems(data.trials)) {
    ProblemSpec spec;
    spec.correct_action = problem.front().correct_action;
    spec.problem_index = chain.size();
    int reps = 0;
    for (const auto& t : problem)
      if (t.phase == Phase::Repetition && t.reward == 1) ++reps;
    spec.repetition_length = std::clamp(reps, kMinRepetitions, kMaxRepetitions);
    chain.push_back(spec);
  }
  return chain;
}

}  // namespace wmrl

#endif  // WMRL_DATASET_HPP
