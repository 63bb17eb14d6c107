#ifndef WMRL_TASK_ENV_HPP
#define WMRL_TASK_ENV_HPP

// Four-target trial-and-error problem solving task.
//
// A problem has one rewarded target. The search phase lasts until the first
// rewarded trial (CO1); the repetition phase then requires `repetition_length`
// further rewarded trials. Incorrect repetition trials are recorded but do not
// advance the repetition counter.

#include <optional>
#include <vector>

#include "wmrl/core.hpp"

namespace wmrl {

inline constexpr int kMinRepetitions = 3;
inline constexpr int kMaxRepetitions = 11;
inline constexpr double kTargetChangeProbability = 0.9;

struct ProblemSpec {
  int correct_action = 0;
  int repetition_length = kMinRepetitions;
  std::size_t problem_index = 0;
};

struct TaskState {
  ProblemSpec problem;
  Phase phase = Phase::Search;
  int trial_in_phase = 0;
  int completed_correct_repeats = 0;
};

struct TrialRecord {
  std::string session_id;
  std::size_t problem_index = 0;
  std::size_t trial_index = 0;
  Phase phase = Phase::Search;
  int chosen_action = 0;
  int reward = 0;
  std::optional<double> rt;
  int correct_action = 0;
  /// Number of incorrect search trials of the enclosing problem; filled once the problem is complete.
  int errors_in_search = -1;
};

struct StepResult {
  int reward = 0;
  TaskState state;
  bool problem_ended = false;
};

/// Draws the next problem. With probability 0.9 the target moves to one of the
/// three other locations (uniformly), otherwise it stays put.
inline ProblemSpec new_problem(Rng& rng, std::optional<int> previous_correct, std::size_t index = 0) {
  ProblemSpec spec;
  spec.problem_index = index;
  if (!previous_correct) {
    spec.correct_action = std::uniform_int_distribution<int>(0, kNumActions - 1)(rng);
  } else {
    check_action(*previous_correct);
    if (uniform01(rng) < kTargetChangeProbability) {
      const int shift = std::uniform_int_distribution<int>(1, kNumActions - 1)(rng);
      spec.correct_action = (*previous_correct + shift) % kNumActions;
    } else {
      spec.correct_action = *previous_correct;
    }
  }
  spec.repetition_length = std::uniform_int_distribution<int>(kMinRepetitions, kMaxRepetitions)(rng);
  return spec;
}

inline TaskState start_problem(const ProblemSpec& spec) {
  TaskState s;
  s.problem = spec;
  return s;
}

inline StepResult step(const TaskState& state, int action) {
  check_action(action);
  StepResult out;
  out.state = state;
  out.reward = action == state.problem.correct_action ? 1 : 0;
  if (state.phase == Phase::Search) {
    if (out.reward == 1) {
      out.state.phase = Phase::Repetition;
      out.state.trial_in_phase = 0;
    } else {
      ++out.state.trial_in_phase;
    }
  } else {
    ++out.state.trial_in_phase;
    if (out.reward == 1) ++out.state.completed_correct_repeats;
    out.problem_ended = out.state.completed_correct_repeats >= state.problem.repetition_length;
  }
  return out;
}

inline std::vector<ProblemSpec> generate_session(Rng& rng, std::size_t n_problems) {
  std::vector<ProblemSpec> chain;
  chain.reserve(n_problems);
  std::optional<int> prev;
  for (std::size_t k = 0; k < n_problems; ++k) {
    chain.push_back(new_problem(rng, prev, k));
    prev = chain.back().correct_action;
  }
  return chain;
}

}  // namespace wmrl

#endif  // WMRL_TASK_ENV_HPP
