#ifndef MORAN_POTENTIAL_HPP
#define MORAN_POTENTIAL_HPP

#include <optional>
#include <utility>
#include <vector>

#include "moran/graph.hpp"
#include "moran/rational.hpp"

namespace moran {

// Fitness r and the derived constants lambda = (r+1)/2, beta = (r-1)/(6r+2).
struct ProcessConstants {
  Rational r;
  Rational lambda;
  Rational beta;

  explicit ProcessConstants(const Rational& fitness)
      : r(fitness), lambda((fitness + 1) / 2), beta((fitness - 1) / (6 * fitness + 2)) {}
};

// Non-negative vertex weights f with the cached maximum m_f of f(v)/d(v).
class WeightFunction {
 public:
  WeightFunction(const Graph& g, std::vector<Rational> values);  // values[v], slot 0 ignored

  static WeightFunction ones(const Graph& g);
  static WeightFunction indicator(const Graph& g, const MutantSet& U);

  const Rational& operator[](Vertex v) const { return values_[v]; }
  const Rational& max_ratio() const { return m_f_; }   // m_f
  bool everywhere_zero() const { return zero_; }

 private:
  std::vector<Rational> values_;
  Rational m_f_;
  bool zero_;
};

// phi(S) = sum over S of 1/d(v). Undirected connected graphs, n >= 2.
Rational phi(const Graph& g, const MutantSet& S);
Rational phi_total(const Graph& g);  // phi(V)

// drift d(A,B) = sum over edges between disjoint A and B of 1/(d(x)d(y)).
Rational drift(const Graph& g, const MutantSet& A, const MutantSet& B);
Rational boundary_drift(const Graph& g, const MutantSet& S);  // d(S, V \ S)

// phi_f(S) = sum of f(v)/d(v) over S.
Rational phi_weighted(const Graph& g, const WeightFunction& f, const MutantSet& S);

// psi_f(S) = exp(-phi_f(S) * beta / m_f), evaluated from the exact rational
// exponent.
double psi_weighted(const Graph& g, const ProcessConstants& consts, const WeightFunction& f,
                    const MutantSet& S);

// The cut inequality deciding whether f is valid for X: the heavy-tail sum
// (pairs with f(x) > lambda f(y)) must not exceed (r-1)/4r times the rest.
struct ValidityReport {
  bool valid;
  Rational heavy_sum;   // sum of f(x)/(d(x)d(y)) where f(x) > lambda f(y)
  Rational light_sum;   // sum of f(y)/(d(x)d(y)) where f(x) <= lambda f(y)
};
ValidityReport is_valid_for(const Graph& g, const ProcessConstants& consts,
                            const WeightFunction& f, const MutantSet& X);

// rho(n) = (10r/(r-1)) exp((10/log lambda * log log n)^3 log r). The plain
// value overflows double already at modest n, so the log form is the one to
// compare against.
double barrier_rho(Vertex n, const ProcessConstants& consts);
double barrier_log_rho(Vertex n, const ProcessConstants& consts);

// S is a barrier when d(S, V\S) < 1/(2 n rho(n)). Comparison happens in log
// space; "borderline" flags results within a 1e-12 relative band of the
// threshold.
struct BarrierReport {
  bool is_barrier;
  bool borderline;
  double log_threshold;
};
BarrierReport is_barrier(const Graph& g, const ProcessConstants& consts, const MutantSet& S);

// R(G,U): greedy deletion inside G[U] with the threshold t = avg_deg(G[U])/2
// fixed up front; repeatedly removes the least-id minimum-degree vertex while
// any induced degree is below t. Result is non-empty with min induced degree
// at least t.
MutantSet core_subset(const Graph& g, const MutantSet& U);

// Exhaustive scan for the proper non-empty subset minimizing d(S, V\S),
// restricted to subsets of `restrict` when given. Ties break by cardinality,
// then by bit-mask value. Caps at 2^24 subsets.
std::pair<MutantSet, Rational> min_drift_subset(const Graph& g,
                                                const std::optional<MutantSet>& restrict_to = {});

}  // namespace moran

#endif
