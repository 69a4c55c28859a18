#ifndef MORAN_ESTIMATOR_HPP
#define MORAN_ESTIMATOR_HPP

#include <cstdint>
#include <optional>

#include "moran/engine.hpp"
#include "moran/graph.hpp"
#include "moran/rational.hpp"

namespace moran {

// Parameters of the early-terminating estimator:
//   N  = 18 * ceil(r * avg_deg / (eps^2 (r-1)))    replica count
//   P' = least integer k with r^k >= 6N
//   P  = min(P', phi(V))                           potential threshold
//   T  = N * 2r(P+1)Delta/(r-1)                    expected-step budget
// with a per-attempt cap of 27T active steps.
struct FprasParams {
  long N = 0;
  long P_prime = 0;
  Rational P;
  Rational T;
  BigInt T_cap;  // ceil(27 T)
};

FprasParams fpras_params(const Graph& g, const Rational& r, const Rational& eps);

struct Estimate {
  double value = 0.0;        // runs_fixated / N of the median attempt
  bool failed = false;       // every attempt overran its step cap
  bool capped = false;       // the median attempt overran
  bool degenerate = false;   // disconnected (0) or single-vertex (1) shortcut
  long runs_fixated = 0;
  std::uint64_t total_active_steps = 0;  // across all attempts
  FprasParams params;
  std::uint64_t seed = 0;
};

// Median of three attempts; each attempt runs N independent replicas to the
// threshold P and averages the indicators of reaching it. An attempt whose
// replicas simulate more than 27T active steps in total reports the -1
// overrun sentinel instead. Deterministic in (g, r, eps, seed) regardless of
// the worker count.
Estimate estimate_fixation(const Graph& g, const Rational& r, const Rational& eps,
                           std::uint64_t seed, int jobs = 1);

struct MonteCarloResult {
  double value = 0.0;
  long fixated = 0;
  long runs = 0;
  double ci_low = 0.0;   // Wilson 95%
  double ci_high = 0.0;
  std::uint64_t total_active_steps = 0;
};

// Plain estimator: runs to absorption, any r > 0, directed graphs welcome.
MonteCarloResult monte_carlo_fixation(const Graph& g, const Rational& r, long runs,
                                      std::uint64_t seed, int jobs = 1,
                                      const std::optional<MutantSet>& start = {});

struct AbsorptionTimeResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  long runs = 0;
};

// Sample mean of full-process steps to absorption, uniform initial mutant.
AbsorptionTimeResult mean_absorption_time(const Graph& g, const Rational& r, long runs,
                                          std::uint64_t seed, int jobs = 1);

// Fan out fn(i) for i in [0, count) over `jobs` workers; fn must only touch
// per-index state.
void parallel_replicas(long count, int jobs, const std::function<void(long)>& fn);

}  // namespace moran

#endif
