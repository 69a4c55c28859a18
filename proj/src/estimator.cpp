#include "moran/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "moran/potential.hpp"

namespace moran {

void parallel_replicas(long count, int jobs, const std::function<void(long)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    while (true) {
      long i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int n_threads = std::min<long>(jobs, count);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

FprasParams fpras_params(const Graph& g, const Rational& r, const Rational& eps) {
  if (g.directed()) throw std::invalid_argument("fpras: undirected graphs only");
  if (g.n() < 2) throw std::invalid_argument("fpras: need at least two vertices");
  if (r <= 1) throw std::invalid_argument("fpras: need r > 1");
  if (eps <= 0 || eps >= 1) throw std::invalid_argument("fpras: need eps in (0,1)");
  if (!is_connected(g)) throw std::invalid_argument("fpras: graph must be connected");

  FprasParams p;
  Rational inner = r * average_degree(g) / (eps * eps * (r - 1));
  BigInt n_big = 18 * ceil_rational(inner);
  if (!n_big.fits_slong_p()) throw std::invalid_argument("fpras: replica count overflow");
  p.N = n_big.get_si();

  // least k with r^k >= 6N, exact for rational r
  Rational target(6 * n_big);
  Rational power = 1;
  long k = 0;
  while (power < target) {
    power *= r;
    ++k;
  }
  p.P_prime = k;
  Rational phi_v = phi_total(g);
  p.P = std::min(Rational(k), phi_v);
  p.T = Rational(p.N) * 2 * r * (p.P + 1) * Rational(g.max_degree()) / (r - 1);
  p.T_cap = ceil_rational(27 * p.T);
  return p;
}

namespace {

struct AttemptResult {
  double value = -1.0;  // -1 = overran the step budget
  long fixated = 0;
  std::uint64_t steps = 0;
};

AttemptResult run_attempt(const SimContext& ctx, const Rational& r, const FprasParams& params,
                          std::uint64_t master_seed, long attempt, int jobs) {
  long n = params.N;
  std::vector<std::uint8_t> hit(n, 0);
  std::vector<std::uint64_t> steps(n, 0);
  std::uint64_t per_replica_cap =
      params.T_cap.fits_ulong_p() ? params.T_cap.get_ui() : ~std::uint64_t{0};
  std::atomic<bool> over{false};

  parallel_replicas(n, jobs, [&](long i) {
    SplitMix64 rng = SplitMix64::substream(master_seed, static_cast<std::uint64_t>(attempt) *
                                                                static_cast<std::uint64_t>(n) +
                                                            static_cast<std::uint64_t>(i));
    RunSpec spec;
    spec.mode = RunMode::to_threshold;
    spec.threshold = params.P;
    // a single replica exceeding the whole attempt budget settles the attempt
    spec.max_steps = per_replica_cap;
    RunOutcome out = run(ctx, r, spec, rng.next());
    steps[i] = out.active_steps;
    if (out.result == RunResult::step_capped) over = true;
    hit[i] = out.result == RunResult::fixation || out.result == RunResult::threshold_reached;
  });

  AttemptResult res;
  BigInt total = 0;
  for (long i = 0; i < n; ++i) {
    total += static_cast<unsigned long>(steps[i]);
    res.fixated += hit[i];
    res.steps += steps[i];
  }
  if (over || total > params.T_cap) {
    res.value = -1.0;
    return res;
  }
  res.value = static_cast<double>(res.fixated) / static_cast<double>(n);
  return res;
}

}  // namespace

Estimate estimate_fixation(const Graph& g, const Rational& r, const Rational& eps,
                           std::uint64_t seed, int jobs) {
  if (r <= 1) throw std::invalid_argument("estimate: need r > 1");
  if (g.directed()) throw std::invalid_argument("estimate: undirected graphs only");
  if (g.n() < 1) throw std::invalid_argument("estimate: empty graph");

  Estimate est;
  est.seed = seed;
  if (g.n() == 1) {
    est.value = 1.0;
    est.degenerate = true;
    return est;
  }
  if (!is_connected(g)) {
    est.value = 0.0;
    est.degenerate = true;
    return est;
  }

  est.params = fpras_params(g, r, eps);
  SimContext ctx(g);

  AttemptResult attempts[3];
  for (long a = 0; a < 3; ++a) {
    attempts[a] = run_attempt(ctx, r, est.params, seed, a, jobs);
    est.total_active_steps += attempts[a].steps;
  }
  double values[3] = {attempts[0].value, attempts[1].value, attempts[2].value};
  std::size_t order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const AttemptResult& median = attempts[order[1]];

  if (median.value < 0.0) {
    est.failed = true;
    est.capped = true;
    est.value = -1.0;
    return est;
  }
  est.value = median.value;
  est.runs_fixated = median.fixated;
  return est;
}

MonteCarloResult monte_carlo_fixation(const Graph& g, const Rational& r, long runs,
                                      std::uint64_t seed, int jobs,
                                      const std::optional<MutantSet>& start) {
  if (g.n() < 2) throw std::invalid_argument("monte carlo: need at least two vertices");
  if (runs < 1) throw std::invalid_argument("monte carlo: need at least one run");
  if (g.directed()) {
    if (!is_strongly_connected(g))
      throw std::invalid_argument("monte carlo: directed graph must be strongly connected");
  } else if (!is_connected(g)) {
    throw std::invalid_argument("monte carlo: graph must be connected");
  }
  SimContext ctx(g);
  std::vector<std::uint8_t> fixed(runs, 0);
  std::vector<std::uint64_t> steps(runs, 0);
  parallel_replicas(runs, jobs, [&](long i) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(i));
    RunSpec spec;
    spec.mode = RunMode::to_absorption_active;
    spec.start_set = start;
    RunOutcome out = run(ctx, r, spec, rng.next());
    fixed[i] = out.result == RunResult::fixation;
    steps[i] = out.active_steps;
  });

  MonteCarloResult res;
  res.runs = runs;
  for (long i = 0; i < runs; ++i) {
    res.fixated += fixed[i];
    res.total_active_steps += steps[i];
  }
  res.value = static_cast<double>(res.fixated) / static_cast<double>(runs);

  // Wilson 95% interval
  double z = 1.959963984540054;
  double nn = static_cast<double>(runs);
  double ph = res.value;
  double denom = 1.0 + z * z / nn;
  double center = (ph + z * z / (2 * nn)) / denom;
  double half = z * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn)) / denom;
  res.ci_low = std::max(0.0, center - half);
  res.ci_high = std::min(1.0, center + half);
  return res;
}

AbsorptionTimeResult mean_absorption_time(const Graph& g, const Rational& r, long runs,
                                          std::uint64_t seed, int jobs) {
  if (g.n() < 2) throw std::invalid_argument("absorption time: need at least two vertices");
  if (runs < 1) throw std::invalid_argument("absorption time: need at least one run");
  if (g.directed()) {
    if (!is_strongly_connected(g))
      throw std::invalid_argument("absorption time: directed graph must be strongly connected");
  } else if (!is_connected(g)) {
    throw std::invalid_argument("absorption time: graph must be connected");
  }
  SimContext ctx(g);
  std::vector<double> samples(runs, 0.0);
  parallel_replicas(runs, jobs, [&](long i) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(i));
    RunSpec spec;
    spec.mode = RunMode::to_absorption_naive;
    RunOutcome out = run(ctx, r, spec, rng.next());
    samples[i] = static_cast<double>(*out.naive_steps);
  });

  AbsorptionTimeResult res;
  res.runs = runs;
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(runs);
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var = runs > 1 ? var / static_cast<double>(runs - 1) : 0.0;
  res.mean = mean;
  res.stderr_ = std::sqrt(var / static_cast<double>(runs));
  return res;
}

}  // namespace moran
