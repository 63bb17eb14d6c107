#ifndef WMRL_CORE_HPP
#define WMRL_CORE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>
#include <atomic>
#include <exception>
#include <mutex>

namespace wmrl {

inline constexpr int kNumActions = 4;
inline constexpr int kNumOutcomes = 2;
/// Maximum action entropy in bits, log2(|actions|).
inline constexpr double kMaxEntropy = 2.0;

using ActionDist = std::array<double, kNumActions>;
using Rng = std::mt19937_64;

enum class Phase { Search, Repetition };

inline char phase_code(Phase p) { return p == Phase::Search ? 'S' : 'R'; }

/// Broken precondition on the caller side (invalid action id, retrieval past the store end, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input data that cannot be interpreted or is internally inconsistent.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model or run configuration that is out of bounds or not allowed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void check_action(int a) {
  if (a < 0 || a >= kNumActions) throw ContractViolation("action id out of range: " + std::to_string(a));
}

inline constexpr ActionDist uniform_dist() { return {0.25, 0.25, 0.25, 0.25}; }

/// splitmix64 finalizer; used to derive independent stream seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Draws an index from a normalized distribution by inverse CDF.
inline int sample_action(const ActionDist& p, Rng& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    cum += p[a];
    if (u < cum) return a;
  }
  for (int a = kNumActions - 1; a >= 0; --a)
    if (p[a] > 0.0) return a;
  return kNumActions - 1;
}

inline int argmax(const ActionDist& p) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a)
    if (p[a] > p[best]) best = a;
  return best;
}

inline ActionDist normalized(ActionDist v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (!(s > 0.0) || !std::isfinite(s)) return uniform_dist();
  for (double& x : v) x /= s;
  return v;
}

/// Runs fn(k) for k in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// Results must be written by index; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < n;) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wmrl

#endif  // WMRL_CORE_HPP
