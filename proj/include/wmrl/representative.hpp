#ifndef WMRL_REPRESENTATIVE_HPP
#define WMRL_REPRESENTATIVE_HPP

// Representative steps: problems grouped by their number of search errors
// k = 0..4, each aligned as k+1 search trials (the last one being CO1)
// followed by the first three repetition trials.

#include <functional>
#include <string>
#include <vector>

#include "wmrl/task_env.hpp"

namespace wmrl {

inline constexpr int kMaxRepresentativeErrors = 4;
inline constexpr int kRepresentativeRepeats = 3;

/// Splits a flat trial list into problems (consecutive runs of the same session and problem index).
template <class T, class Rec = std::identity>
std::vector<std::vector<T>> split_problems(const std::vector<T>& trials, Rec rec = {}) {
  std::vector<std::vector<T>> out;
  for (const auto& t : trials) {
    const TrialRecord& r = rec(t);
    if (out.empty() || rec(out.back().front()).problem_index != r.problem_index ||
        rec(out.back().front()).session_id != r.session_id)
      out.emplace_back();
    out.back().push_back(t);
  }
  return out;
}

/// Index of the first rewarded trial, or -1.
template <class T, class Rec = std::identity>
int co1_index(const std::vector<T>& problem, Rec rec = {}) {
  for (std::size_t k = 0; k < problem.size(); ++k)
    if (rec(problem[k]).reward == 1) return static_cast<int>(k);
  return -1;
}

/// Calls fn(errors, position, trial) for every representative trial; returns the number of problems used.
template <class T, class Rec = std::identity, class Fn>
std::size_t for_each_representative(const std::vector<T>& trials, Fn&& fn, Rec rec = {},
                                    std::size_t* excluded = nullptr) {
  std::size_t used = 0, dropped = 0;
  for (const auto& problem : split_problems(trials, rec)) {
    const int co1 = co1_index(problem, rec);
    if (co1 < 0 || co1 > kMaxRepresentativeErrors ||
        static_cast<int>(problem.size()) < co1 + 1 + kRepresentativeRepeats) {
      ++dropped;
      continue;
    }
    for (int pos = 0; pos <= co1 + kRepresentativeRepeats; ++pos) fn(co1, pos, problem[pos]);
    ++used;
  }
  if (excluded) *excluded = dropped;
  return used;
}

struct PositionStats {
  Phase phase = Phase::Search;
  int position = 0;
  std::size_t n = 0;
  double perf_mean = 0.0;
  double perf_sem = 0.0;
  std::size_t rt_n = 0;
  double rt_mean = 0.0;
  double rt_sem = 0.0;
};

struct GroupCurve {
  int errors = 0;
  std::size_t problem_count = 0;
  double density = 0.0;  // share of the included problems
  std::vector<PositionStats> positions;
};

struct RepresentativeCurve {
  std::vector<GroupCurve> groups;  // only non-empty groups, ordered by error count
  std::vector<std::string> notes;
  std::size_t included_problems = 0;
  std::size_t excluded_problems = 0;

  const GroupCurve* group(int errors) const {
    for (const auto& g : groups)
      if (g.errors == errors) return &g;
    return nullptr;
  }
};

struct MeanSem {
  std::vector<double> values;

  void add(double x) { values.push_back(x); }
  std::size_t size() const { return values.size(); }
  double mean() const {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double x : values) s += x;
    return s / static_cast<double>(values.size());
  }
  /// Standard error of the mean with the n-1 sample variance; 0 for fewer than two samples.
  double sem() const {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double x : values) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

template <class T, class Rec = std::identity>
RepresentativeCurve representative_steps(const std::vector<T>& trials, Rec rec = {}) {
  struct Cell {
    MeanSem perf, rt;
  };
  std::array<std::vector<Cell>, kMaxRepresentativeErrors + 1> cells;
  std::array<std::size_t, kMaxRepresentativeErrors + 1> counts{};
  for (int k = 0; k <= kMaxRepresentativeErrors; ++k) cells[k].resize(k + 1 + kRepresentativeRepeats);

  RepresentativeCurve curve;
  curve.included_problems = for_each_representative(
      trials,
      [&](int k, int pos, const T& t) {
        const TrialRecord& r = rec(t);
        if (pos == 0) ++counts[k];
        cells[k][pos].perf.add(r.reward);
        if (r.rt) cells[k][pos].rt.add(*r.rt);
      },
      rec, &curve.excluded_problems);

  for (int k = 0; k <= kMaxRepresentativeErrors; ++k) {
    if (counts[k] == 0) {
      curve.notes.push_back("no problems with " + std::to_string(k) + " errors; group omitted");
      continue;
    }
    GroupCurve g;
    g.errors = k;
    g.problem_count = counts[k];
    g.density = static_cast<double>(counts[k]) / static_cast<double>(curve.included_problems);
    for (int pos = 0; pos < static_cast<int>(cells[k].size()); ++pos) {
      const auto& c = cells[k][pos];
      g.positions.push_back({pos <= k ? Phase::Search : Phase::Repetition, pos, c.perf.size(), c.perf.mean(),
                             c.perf.sem(), c.rt.size(), c.rt.mean(), c.rt.sem()});
    }
    curve.groups.push_back(std::move(g));
  }
  return curve;
}

/// Restricts both curves to the error groups they share.
inline std::pair<RepresentativeCurve, RepresentativeCurve> align_curves(const RepresentativeCurve& a,
                                                                        const RepresentativeCurve& b) {
  RepresentativeCurve ra, rb;
  for (const auto& g : a.groups)
    if (const auto* h = b.group(g.errors)) {
      ra.groups.push_back(g);
      rb.groups.push_back(*h);
    }
  return {ra, rb};
}

/// Mean RT per representative position, groups in order.
inline std::vector<double> rt_profile(const RepresentativeCurve& c) {
  std::vector<double> v;
  for (const auto& g : c.groups)
    for (const auto& p : g.positions) v.push_back(p.rt_mean);
  return v;
}

inline std::vector<double> zscore(std::vector<double> v) {
  if (v.empty()) return v;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));
  for (double& x : v) x = sd > 0.0 ? (x - m) / sd : 0.0;
  return v;
}

/// Mean squared difference between the z-scored RT profiles of two curves over the same positions.
inline double rt_objective(const RepresentativeCurve& model, const RepresentativeCurve& data) {
  if (model.groups.size() != data.groups.size())
    throw ContractViolation("rt_objective: curves cover different error groups");
  for (std::size_t g = 0; g < model.groups.size(); ++g)
    if (model.groups[g].errors != data.groups[g].errors ||
        model.groups[g].positions.size() != data.groups[g].positions.size())
      throw ContractViolation("rt_objective: curves have different representative positions");
  const auto zm = zscore(rt_profile(model));
  const auto zd = zscore(rt_profile(data));
  if (zm.empty()) throw ContractViolation("rt_objective: empty curves");
  double s = 0.0;
  for (std::size_t k = 0; k < zm.size(); ++k) s += (zm[k] - zd[k]) * (zm[k] - zd[k]);
  return s / static_cast<double>(zm.size());
}

/// Repetition-phase performance per error group (repetition trials 1..3) and group densities.
struct PerformanceTable {
  struct Row {
    int errors = 0;
    int repeat = 0;  // 1..3
    std::size_t n = 0;
    double mean = 0.0;
    double sem = 0.0;
  };
  std::vector<Row> rows;
  std::array<std::size_t, kMaxRepresentativeErrors + 1> density{};
};

template <class T, class Rec = std::identity>
PerformanceTable performance_by_error_count(const std::vector<T>& trials, Rec rec = {}) {
  std::array<std::array<MeanSem, kRepresentativeRepeats>, kMaxRepresentativeErrors + 1> acc{};
  PerformanceTable table;
  for_each_representative(
      trials,
      [&](int k, int pos, const T& t) {
        if (pos == 0) ++table.density[k];
        if (pos > k) acc[k][pos - k - 1].add(rec(t).reward);
      },
      rec);
  for (int k = 0; k <= kMaxRepresentativeErrors; ++k) {
    if (table.density[k] == 0) continue;
    for (int j = 0; j < kRepresentativeRepeats; ++j)
      table.rows.push_back({k, j + 1, acc[k][j].size(), acc[k][j].mean(), acc[k][j].sem()});
  }
  return table;
}

}  // namespace wmrl

#endif  // WMRL_REPRESENTATIVE_HPP
