#ifndef WMRL_NSGA2_HPP
#define WMRL_NSGA2_HPP

// NSGA-II for box-bounded real-coded problems: fast non-dominated sorting,
// crowding distance, binary crowded tournament, SBX crossover and polynomial
// mutation. Candidate evaluations of a generation run in parallel; every
// candidate gets a seed derived from (run seed, generation, slot), so the
// result does not depend on the number of workers.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "wmrl/core.hpp"

namespace wmrl::moo {

using Objectives = std::vector<double>;

struct Individual {
  std::vector<double> x;
  Objectives f;
  int rank = 0;
  double crowding = 0.0;
};

struct Nsga2Settings {
  std::size_t population = 96;
  std::size_t generations = 150;
  double crossover_rate = 0.9;
  /// Per-variable mutation probability; negative means 1/dim.
  double mutation_rate = -1.0;
  double eta_crossover = 15.0;
  double eta_mutation = 20.0;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

/// Replacement for non-finite objective values; keeps such candidates in the last front.
inline constexpr double kWorstObjective = 1e300;

/// Minimization dominance.
inline bool dominates(const Objectives& a, const Objectives& b) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

/// Fronts as index lists, best first.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<Objectives>& f) {
  const std::size_t n = f.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(f[p], f[q]))
        dominated_by[p].push_back(q);
      else if (dominates(f[q], f[p]))
        ++count[p];
    }
    if (count[p] == 0) fronts[0].push_back(p);
  }
  for (std::size_t i = 0; !fronts[i].empty(); ++i) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts[i])
      for (std::size_t q : dominated_by[p])
        if (--count[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

/// Crowding distance of the members of one front (boundary points get +inf).
inline std::vector<double> crowding_distance(const std::vector<Objectives>& f, const std::vector<std::size_t>& front) {
  const std::size_t n = front.size();
  std::vector<double> d(n, 0.0);
  if (n == 0) return d;
  if (n <= 2) {
    std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
    return d;
  }
  const std::size_t m = f[front[0]].size();
  std::vector<std::size_t> order(n);
  for (std::size_t obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[front[a]][obj] < f[front[b]][obj]; });
    const double lo = f[front[order.front()]][obj];
    const double hi = f[front[order.back()]][obj];
    d[order.front()] = d[order.back()] = std::numeric_limits<double>::infinity();
    if (!(hi > lo)) continue;
    for (std::size_t k = 1; k + 1 < n; ++k)
      d[order[k]] += (f[front[order[k + 1]]][obj] - f[front[order[k - 1]]][obj]) / (hi - lo);
  }
  return d;
}

/// Indices of the members of `f` that no other member dominates; identical objective vectors are kept once.
inline std::vector<std::size_t> pareto_filter(const std::vector<Objectives>& f) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < f.size() && keep; ++j) {
      if (i == j) continue;
      if (dominates(f[j], f[i]) || (j < i && f[j] == f[i])) keep = false;
    }
    if (keep) out.push_back(i);
  }
  return out;
}

struct Box {
  std::vector<double> lo, hi;
  std::size_t dim() const { return lo.size(); }
};

namespace detail {

inline void sbx(std::vector<double>& c1, std::vector<double>& c2, const Box& box, double eta, Rng& rng) {
  for (std::size_t i = 0; i < c1.size(); ++i) {
    if (uniform01(rng) > 0.5) continue;
    const double lo = box.lo[i], hi = box.hi[i];
    if (!(hi > lo) || std::abs(c1[i] - c2[i]) < 1e-14) continue;
    const double y1 = std::min(c1[i], c2[i]), y2 = std::max(c1[i], c2[i]);
    const double u = uniform01(rng);
    const auto child = [&](double beta_bound) {
      const double alpha = 2.0 - std::pow(beta_bound, -(eta + 1.0));
      return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                              : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };
    const double bq1 = child(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
    const double bq2 = child(1.0 + 2.0 * (hi - y2) / (y2 - y1));
    double v1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), lo, hi);
    double v2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), lo, hi);
    if (uniform01(rng) < 0.5) std::swap(v1, v2);
    c1[i] = v1;
    c2[i] = v2;
  }
}

inline void polynomial_mutation(std::vector<double>& x, const Box& box, double rate, double eta, Rng& rng) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (uniform01(rng) >= rate) continue;
    const double lo = box.lo[i], hi = box.hi[i];
    if (!(hi > lo)) continue;
    const double d1 = (x[i] - lo) / (hi - lo), d2 = (hi - x[i]) / (hi - lo);
    const double u = uniform01(rng);
    const double pw = 1.0 / (eta + 1.0);
    double dq;
    if (u < 0.5) {
      const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(v, pw) - 1.0;
    } else {
      const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(v, pw);
    }
    x[i] = std::clamp(x[i] + dq * (hi - lo), lo, hi);
  }
}

inline void assign_rank_and_crowding(std::vector<Individual>& pop) {
  std::vector<Objectives> f;
  f.reserve(pop.size());
  for (const auto& ind : pop) f.push_back(ind.f);
  const auto fronts = non_dominated_sort(f);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto cd = crowding_distance(f, fronts[r]);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      pop[fronts[r][k]].rank = static_cast<int>(r);
      pop[fronts[r][k]].crowding = cd[k];
    }
  }
}

inline bool crowded_less(const Individual& a, const Individual& b) {
  return a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding);
}

}  // namespace detail

/// Evaluate: (std::span<const double> x, std::uint64_t seed) -> Objectives. Returns the final population.
template <class Evaluate>
std::vector<Individual> nsga2(const Box& box, Evaluate&& evaluate, const Nsga2Settings& s) {
  const std::size_t dim = box.dim();
  if (dim == 0 || box.hi.size() != dim) throw ContractViolation("nsga2: empty or inconsistent bounds");
  const std::size_t n = std::max<std::size_t>(4, s.population + (s.population % 2));
  const double pm = s.mutation_rate < 0.0 ? 1.0 / static_cast<double>(dim) : s.mutation_rate;
  Rng rng(derive_seed(s.seed, 0x6e736761));

  const auto eval_all = [&](std::vector<Individual>& group, std::size_t generation) {
    parallel_for(group.size(), s.threads, [&](std::size_t k) {
      auto f = evaluate(std::span<const double>(group[k].x), derive_seed(s.seed, generation + 1, k));
      for (double& v : f)
        if (!std::isfinite(v)) v = kWorstObjective;
      group[k].f = std::move(f);
    });
  };

  std::vector<Individual> pop(n);
  for (auto& ind : pop) {
    ind.x.resize(dim);
    for (std::size_t i = 0; i < dim; ++i)
      ind.x[i] = box.lo[i] + uniform01(rng) * (box.hi[i] - box.lo[i]);
  }
  eval_all(pop, 0);
  detail::assign_rank_and_crowding(pop);

  for (std::size_t gen = 1; gen <= s.generations; ++gen) {
    const auto tournament = [&]() -> const Individual& {
      const auto& a = pop[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
      const auto& b = pop[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
      return detail::crowded_less(b, a) ? b : a;
    };
    std::vector<Individual> children;
    children.reserve(n);
    while (children.size() < n) {
      Individual c1{tournament().x, {}, 0, 0.0}, c2{tournament().x, {}, 0, 0.0};
      if (uniform01(rng) < s.crossover_rate) detail::sbx(c1.x, c2.x, box, s.eta_crossover, rng);
      detail::polynomial_mutation(c1.x, box, pm, s.eta_mutation, rng);
      detail::polynomial_mutation(c2.x, box, pm, s.eta_mutation, rng);
      children.push_back(std::move(c1));
      children.push_back(std::move(c2));
    }
    eval_all(children, gen);

    std::vector<Individual> merged = std::move(pop);
    merged.insert(merged.end(), std::make_move_iterator(children.begin()), std::make_move_iterator(children.end()));
    std::vector<Objectives> f;
    f.reserve(merged.size());
    for (const auto& ind : merged) f.push_back(ind.f);
    const auto fronts = non_dominated_sort(f);

    std::vector<Individual> next;
    next.reserve(n);
    for (std::size_t r = 0; r < fronts.size() && next.size() < n; ++r) {
      const auto cd = crowding_distance(f, fronts[r]);
      std::vector<std::size_t> order(fronts[r].size());
      std::iota(order.begin(), order.end(), 0);
      if (next.size() + order.size() > n)
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
      for (std::size_t k : order) {
        if (next.size() == n) break;
        Individual ind = std::move(merged[fronts[r][k]]);
        ind.rank = static_cast<int>(r);
        ind.crowding = cd[k];
        next.push_back(std::move(ind));
      }
    }
    pop = std::move(next);
  }
  return pop;
}

/// Non-dominated members of a population, without duplicates in objective space.
inline std::vector<Individual> first_front(const std::vector<Individual>& pop) {
  std::vector<Objectives> f;
  for (const auto& ind : pop) f.push_back(ind.f);
  std::vector<Individual> out;
  for (std::size_t k : pareto_filter(f)) out.push_back(pop[k]);
  std::sort(out.begin(), out.end(), [](const Individual& a, const Individual& b) { return a.f < b.f; });
  return out;
}

}  // namespace wmrl::moo

#endif  // WMRL_NSGA2_HPP
