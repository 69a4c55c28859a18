#ifndef MORAN_ENGINE_HPP
#define MORAN_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "moran/graph.hpp"
#include "moran/rational.hpp"
#include "moran/rng.hpp"

namespace moran {

// D = lcm(1..delta), computed from a prime sieve as the product of the
// maximal prime powers below delta. D has O(delta) bits (D <= 4^delta).
struct LcmTable {
  std::uint32_t delta;
  BigInt value;
};
LcmTable lcm_upto(std::uint32_t delta);

// Shared per-graph precomputation for simulations: the lcm table, scaled
// per-degree potential increments D/d, and the reverse adjacency for directed
// graphs. Immutable; share freely across workers.
class SimContext {
 public:
  explicit SimContext(const Graph& g);

  const Graph& graph() const { return *g_; }
  const LcmTable& lcm() const { return lcm_; }
  const BigInt& phi_step(Vertex v) const { return phi_step_[g_->degree(v)]; }
  const BigInt& phi_total_scaled() const { return phi_total_scaled_; }  // phi(V) * D
  // vertices with an out-edge to v (== neighbors for undirected graphs)
  std::span<const Vertex> in_neighbors(Vertex v) const;

 private:
  const Graph* g_;
  LcmTable lcm_;
  std::vector<BigInt> phi_step_;  // D / d, indexed by degree
  BigInt phi_total_scaled_;
  std::vector<std::vector<Vertex>> reverse_;  // empty when undirected
};

// Simulation state of the active Moran process, maintaining the invariants
//   (I1) n_mut equals |M|
//   (I2) phi_scaled equals phi(M) * D exactly
//   (I3) the mutant index holds exactly the mutants
//   (I4) the boundary index holds exactly the vertices with d_bdry > 0
//   (I5) index and slot array agree, slots carry the true d_bdry, and the
//        slot array stays between one-third and two-thirds occupied while
//        non-empty.
// d_bdry(v) counts opposite-type out-neighbors (for undirected graphs, the
// number of boundary edges at v).
class ActiveState {
 public:
  ActiveState(const SimContext& ctx, Vertex v0, SplitMix64& rng);
  ActiveState(const SimContext& ctx, const MutantSet& start, SplitMix64& rng);

  std::uint32_t n_mut() const { return n_mut_; }
  const BigInt& phi_scaled() const { return phi_scaled_; }
  std::uint64_t steps() const { return step_count_; }
  bool is_mutant(Vertex v) const { return mutants_.count(v) > 0; }
  bool absorbed(const SimContext& ctx) const {
    return n_mut_ == 0 || n_mut_ == ctx.graph().n();
  }
  MutantSet mutant_set() const;

  // One active transition: rejection-sample the spawner from the boundary
  // array, pick a uniform opposite-type out-neighbor, flip it, restore
  // invariants. Returns (spawner, flipped vertex).
  std::pair<Vertex, Vertex> active_step(const SimContext& ctx, double r, SplitMix64& rng);

  // Recomputes everything from scratch and lists any invariant violations.
  std::vector<std::string> audit_invariants(const SimContext& ctx) const;

  // test hook: corrupt phi to watch the audit catch it
  void debug_perturb_phi(long delta) { phi_scaled_ += delta; }

  std::size_t boundary_slot_count() const { return slots_.size(); }
  std::size_t boundary_occupied() const { return occupied_; }
  std::uint32_t boundary_degree(Vertex v) const;

 private:
  struct Slot {
    Vertex v = 0;  // 0 = unoccupied
    std::uint32_t d_bdry = 0;
  };

  void flip(const SimContext& ctx, Vertex y, SplitMix64& rng);
  void boundary_set(Vertex v, std::uint32_t d, SplitMix64& rng);
  void boundary_insert(Vertex v, std::uint32_t d, SplitMix64& rng);
  void resize_slots(std::size_t new_size, SplitMix64& rng);
  void maybe_resize(SplitMix64& rng);

  std::uint32_t n_mut_ = 0;
  BigInt phi_scaled_ = 0;
  std::unordered_set<Vertex> mutants_;                 // H_mut
  std::unordered_map<Vertex, std::uint32_t> slot_of_;  // H_B
  std::vector<Slot> slots_;                            // A_B
  std::size_t occupied_ = 0;
  std::uint64_t step_count_ = 0;
};

// One full-process step (possibly idle): pick the mutant class with
// probability r|M|/W(M), a uniform class member, then a uniform
// (out-)neighbor; the chosen vertex's state is copied onto the neighbor.
MutantSet naive_step(const Graph& g, double r, const MutantSet& M, SplitMix64& rng);

enum class RunMode { to_absorption_naive, to_absorption_active, to_threshold, capped };
enum class RunResult { fixation, extinction, threshold_reached, step_capped };

struct RunSpec {
  RunMode mode = RunMode::to_absorption_active;
  Rational threshold = 0;               // to_threshold: stop once phi >= threshold
  std::uint64_t max_steps = 0;          // capped: bound on active steps
  std::optional<Vertex> start;          // absent = uniform initial mutant
  std::optional<MutantSet> start_set;   // multi-vertex initial state
  // called once per active transition
  std::function<void(std::uint64_t step, Vertex spawner, Vertex target, std::uint32_t n_mut,
                     const BigInt& phi_scaled)>
      trace;
};

struct RunOutcome {
  RunResult result;
  std::uint64_t active_steps = 0;
  std::optional<std::uint64_t> naive_steps;
  BigInt final_phi_scaled;
  std::uint64_t seed = 0;
};

RunOutcome run(const SimContext& ctx, const Rational& r, const RunSpec& spec, std::uint64_t seed);

// Continue an existing active state to absorption (used by the
// early-termination soundness checks).
RunResult continue_to_absorption(const SimContext& ctx, ActiveState& state, double r,
                                 SplitMix64& rng);

std::string run_result_name(RunResult r);

}  // namespace moran

#endif
