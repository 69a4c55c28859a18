#ifndef MORAN_EXACT_HPP
#define MORAN_EXACT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "moran/families.hpp"
#include "moran/graph.hpp"
#include "moran/potential.hpp"
#include "moran/rational.hpp"

namespace moran {

// Ground-truth oracle over the full 2^n state lattice (bit-mask states, bit
// v-1 for vertex v; masks 0 and 2^n-1 absorbing). Dense elimination with
// partial pivoting up to n = 12; Gauss-Seidel sweeps (residual 1e-12, at most
// 1e6 sweeps) up to n = 20. An exact-rational elimination path is kept for
// n <= 10.
inline constexpr Vertex kExactDenseCap = 12;
inline constexpr Vertex kExactStateCap = 20;
inline constexpr Vertex kExactRationalCap = 10;

// One full-process step from S: successor distribution over {S, S+y, S-x},
// exact probabilities summing to 1; normalizer W(S) = n + (r-1)|S|. The
// fitness-weighted vertex fires, then a uniform (out-)neighbor is replaced.
std::map<MutantSet, Rational> transition_distribution(const Graph& g, const Rational& r,
                                                      const MutantSet& S);

// Fixation probabilities h with h(empty)=0, h(V)=1 for every state mask.
std::vector<double> fixation_vector_exact(const Graph& g, const Rational& r);
// Expected absorption times t with t(empty)=t(V)=0 for every state mask.
std::vector<double> absorption_time_vector_exact(const Graph& g, const Rational& r);

// Uniform-singleton start: (1/n) sum over v of h({v}).
double fixation_probability_exact(const Graph& g, const Rational& r);
double fixation_probability_exact(const Graph& g, const Rational& r, const MutantSet& start);
Rational fixation_probability_exact_rational(const Graph& g, const Rational& r);
Rational fixation_probability_exact_rational(const Graph& g, const Rational& r,
                                             const MutantSet& start);

double absorption_time_exact(const Graph& g, const Rational& r);
double absorption_time_exact(const Graph& g, const Rational& r, const MutantSet& start);

// Residual of the last fixation/time solve, for reporting.
struct ExactDiagnostics {
  double residual;
  std::size_t n_states;
};
ExactDiagnostics last_exact_diagnostics();

enum class PotentialKind { phi, phi_weighted, psi_weighted, sigma };

struct OneStepExpectation {
  PotentialKind kind;
  Rational exact;   // phi / phi_weighted / sigma
  double value;     // all kinds (psi_weighted is float-only)
};

// E[potential(M(t+1)) - potential(M(t)) | M(t) = S], summed over boundary
// edges only; exact rational for phi, phi_f and sigma.
OneStepExpectation one_step_expected_change(const Graph& g, const Rational& r, const MutantSet& S,
                                            PotentialKind kind,
                                            const WeightFunction* f = nullptr,
                                            const SigmaWeights* sigma = nullptr,
                                            const ProcessConstants* consts = nullptr);

// Identity of the vertex that spawns, conditioned on the step being active:
// mutants w carry weight r*d_bdry(w)/d_w, non-mutants d_bdry(w)/d_w.
std::map<Vertex, Rational> active_spawner_distribution(const Graph& g, const Rational& r,
                                                       const MutantSet& S);

}  // namespace moran

#endif
