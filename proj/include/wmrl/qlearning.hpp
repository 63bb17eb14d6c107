#ifndef WMRL_QLEARNING_HPP
#define WMRL_QLEARNING_HPP

#include <algorithm>

#include "wmrl/core.hpp"

namespace wmrl {

/// Action values of the single-state task.
struct QTable {
  std::array<double, kNumActions> q{};

  double max() const { return *std::max_element(q.begin(), q.end()); }
  double operator[](int a) const { return q[a]; }
};

/// Forgetting target of the decay rule.
inline constexpr double kQBaseline = 0.0;

struct QlParams {
  double alpha = 0.1;
  double beta = 3.0;
  double gamma = 0.0;
  double kappa = 1.0;
  bool reset_on_new_problem = true;
  bool decay_enabled = false;
};

/// Temporal-difference error; s' = s in the single-state task.
inline double rpe(const QTable& q, int a, int r, double gamma) {
  check_action(a);
  return r + gamma * q.max() - q[a];
}

inline QTable q_update(QTable q, int a, int r, const QlParams& p) {
  const double delta = rpe(q, a, r, p.gamma);
  q.q[a] += p.alpha * delta;
  return q;
}

/// Softmax over beta * q, evaluated with max subtraction.
inline ActionDist softmax_policy(const std::array<double, kNumActions>& values, double beta) {
  const double m = *std::max_element(values.begin(), values.end());
  ActionDist p{};
  double s = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    p[a] = std::exp(beta * (values[a] - m));
    s += p[a];
  }
  for (double& x : p) x /= s;
  return p;
}

inline ActionDist softmax_policy(const QTable& q, double beta) { return softmax_policy(q.q, beta); }

inline QTable decay_q(QTable q, double kappa, double q0 = kQBaseline) {
  for (double& v : q.q) v += (1.0 - kappa) * (q0 - v);
  return q;
}

inline QTable on_problem_boundary(const QTable& q, const QlParams& p) {
  return p.reset_on_new_problem ? QTable{} : q;
}

}  // namespace wmrl

#endif  // WMRL_QLEARNING_HPP
