#include "moran/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace moran {

LcmTable lcm_upto(std::uint32_t delta) {
  if (delta < 1) throw std::invalid_argument("lcm: delta must be at least 1");
  // sieve of Eratosthenes, then multiply the maximal prime powers <= delta
  std::vector<std::uint8_t> composite(delta + 1, 0);
  BigInt d = 1;
  for (std::uint32_t p = 2; p <= delta; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t q = static_cast<std::uint64_t>(p) * p; q <= delta; q += p)
      composite[q] = 1;
    std::uint64_t power = p;
    while (power * p <= delta) power *= p;
    d *= static_cast<unsigned long>(power);
  }
  return {delta, d};
}

SimContext::SimContext(const Graph& g) : g_(&g), lcm_(lcm_upto(std::max<Vertex>(g.max_degree(), 1))) {
  // absorption needs every vertex reachable both ways; a disconnected graph
  // has frozen states the run loops could never leave
  if (g.directed()) {
    if (!is_strongly_connected(g))
      throw std::invalid_argument("simulation: directed graph must be strongly connected");
  } else if (!is_connected(g)) {
    throw std::invalid_argument("simulation: graph must be connected");
  }
  phi_step_.resize(g.max_degree() + 1);
  for (Vertex d = 1; d <= g.max_degree(); ++d) phi_step_[d] = lcm_.value / d;
  phi_total_scaled_ = 0;
  for (Vertex v = 1; v <= g.n(); ++v) {
    if (g.degree(v) == 0) throw std::invalid_argument("simulation: isolated vertex");
    phi_total_scaled_ += phi_step_[g.degree(v)];
  }
  if (g.directed()) reverse_ = reverse_adjacency(g);
}

std::span<const Vertex> SimContext::in_neighbors(Vertex v) const {
  if (g_->directed()) return reverse_[v];
  return g_->neighbors(v);
}

namespace {

std::uint32_t opposite_out_degree(const Graph& g, Vertex v,
                                  const std::unordered_set<Vertex>& mutants) {
  bool v_mut = mutants.count(v) > 0;
  std::uint32_t d = 0;
  for (Vertex w : g.neighbors(v))
    if ((mutants.count(w) > 0) != v_mut) ++d;
  return d;
}

}  // namespace

ActiveState::ActiveState(const SimContext& ctx, Vertex v0, SplitMix64& rng)
    : ActiveState(ctx, MutantSet::single(v0), rng) {}

ActiveState::ActiveState(const SimContext& ctx, const MutantSet& start, SplitMix64& rng) {
  const Graph& g = ctx.graph();
  if (g.n() < 2) throw std::invalid_argument("active state: need at least two vertices");
  if (start.empty()) throw std::invalid_argument("active state: empty initial state");
  for (Vertex v : start) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("active state: invalid vertex");
    mutants_.insert(v);
  }
  n_mut_ = static_cast<std::uint32_t>(mutants_.size());
  for (Vertex v : mutants_) phi_scaled_ += ctx.phi_step(v);

  // boundary degrees of the mutants and of the non-mutants that can fire
  // into them
  std::unordered_map<Vertex, std::uint32_t> bdry;
  for (Vertex v : mutants_) {
    std::uint32_t d = opposite_out_degree(g, v, mutants_);
    if (d > 0) bdry[v] = d;
    for (Vertex w : ctx.in_neighbors(v))
      if (mutants_.count(w) == 0) ++bdry[w];
  }
  for (auto [v, d] : bdry)
    if (d > 0) boundary_insert(v, d, rng);
}

MutantSet ActiveState::mutant_set() const {
  return MutantSet(std::vector<Vertex>(mutants_.begin(), mutants_.end()));
}

std::uint32_t ActiveState::boundary_degree(Vertex v) const {
  auto it = slot_of_.find(v);
  return it == slot_of_.end() ? 0 : slots_[it->second].d_bdry;
}

void ActiveState::resize_slots(std::size_t new_size, SplitMix64& rng) {
  std::vector<Slot> old = std::move(slots_);
  slots_.assign(new_size, Slot{});
  slot_of_.clear();
  // re-place entries at fresh uniform unoccupied positions
  std::size_t placed = 0;
  for (const Slot& s : old) {
    if (s.v == 0) continue;
    std::size_t idx;
    do {
      idx = rng.next_below(new_size);
    } while (slots_[idx].v != 0);
    slots_[idx] = s;
    slot_of_[s.v] = static_cast<std::uint32_t>(idx);
    ++placed;
  }
  occupied_ = placed;
}

void ActiveState::boundary_insert(Vertex v, std::uint32_t d, SplitMix64& rng) {
  // grow before inserting so the band holds after every operation; growth
  // lands close to half-occupied (factor 4/3 with a 2*occ floor)
  if (slots_.empty() || 3 * (occupied_ + 1) > 2 * slots_.size()) {
    std::size_t target = std::max((slots_.size() * 4 + 2) / 3, 2 * (occupied_ + 1));
    resize_slots(target, rng);
  }
  std::size_t idx;
  do {
    idx = rng.next_below(slots_.size());
  } while (slots_[idx].v != 0);
  slots_[idx] = {v, d};
  slot_of_[v] = static_cast<std::uint32_t>(idx);
  ++occupied_;
}

void ActiveState::boundary_set(Vertex v, std::uint32_t d, SplitMix64& rng) {
  auto it = slot_of_.find(v);
  if (d == 0) {
    if (it != slot_of_.end()) {
      slots_[it->second] = Slot{};
      slot_of_.erase(it);
      --occupied_;
      maybe_resize(rng);
    }
    return;
  }
  if (it != slot_of_.end()) {
    slots_[it->second].d_bdry = d;
  } else {
    boundary_insert(v, d, rng);
  }
}

void ActiveState::maybe_resize(SplitMix64& rng) {
  if (occupied_ == 0) {
    slots_.clear();
    slot_of_.clear();
    return;
  }
  if (3 * occupied_ < slots_.size()) resize_slots(2 * occupied_, rng);
}

std::pair<Vertex, Vertex> ActiveState::active_step(const SimContext& ctx, double r,
                                                   SplitMix64& rng) {
  const Graph& g = ctx.graph();
  if (absorbed(ctx)) throw std::invalid_argument("active step: state is absorbing");
  if (r <= 0) throw std::invalid_argument("active step: need r > 0");

  // Rejection-sample the spawner: uniform occupied slot, then accept with
  // probability proportional to weight(v) * d_bdry(v) / d_v, where mutants
  // weigh r and non-mutants 1. Scaling by max(r,1) keeps both acceptance
  // probabilities in [0,1] for every r > 0.
  double scale = std::max(r, 1.0);
  std::uint64_t cap = 1000000ULL * std::max<std::uint64_t>(g.max_degree(), 1);
  Vertex spawner = 0;
  for (std::uint64_t iter = 0;; ++iter) {
    if (iter >= cap) throw std::runtime_error("active step: rejection loop exceeded safety cap");
    std::size_t idx = rng.next_below(slots_.size());
    const Slot& s = slots_[idx];
    if (s.v == 0) continue;
    double ratio = static_cast<double>(s.d_bdry) / static_cast<double>(g.degree(s.v));
    double accept = mutants_.count(s.v) > 0 ? r * ratio / scale : ratio / scale;
    if (rng.next_unit() < accept) {
      spawner = s.v;
      break;
    }
  }

  // uniform opposite-type out-neighbor
  bool spawner_mut = mutants_.count(spawner) > 0;
  std::uint32_t want = boundary_degree(spawner);
  std::uint32_t pick = static_cast<std::uint32_t>(rng.next_below(want));
  Vertex target = 0;
  for (Vertex w : g.neighbors(spawner)) {
    if ((mutants_.count(w) > 0) != spawner_mut) {
      if (pick == 0) {
        target = w;
        break;
      }
      --pick;
    }
  }

  flip(ctx, target, rng);
  ++step_count_;
  return {spawner, target};
}

void ActiveState::flip(const SimContext& ctx, Vertex y, SplitMix64& rng) {
  const Graph& g = ctx.graph();
  bool becomes_mutant = mutants_.count(y) == 0;
  if (becomes_mutant) {
    mutants_.insert(y);
    ++n_mut_;
    phi_scaled_ += ctx.phi_step(y);
  } else {
    mutants_.erase(y);
    --n_mut_;
    phi_scaled_ -= ctx.phi_step(y);
  }
  // boundary degree of every vertex firing into y moves by one
  for (Vertex x : ctx.in_neighbors(y)) {
    bool x_mut = mutants_.count(x) > 0;
    std::uint32_t d = boundary_degree(x);
    boundary_set(x, x_mut == becomes_mutant ? d - 1 : d + 1, rng);
  }
  boundary_set(y, opposite_out_degree(g, y, mutants_), rng);
}

std::vector<std::string> ActiveState::audit_invariants(const SimContext& ctx) const {
  const Graph& g = ctx.graph();
  std::vector<std::string> bad;
  if (n_mut_ != mutants_.size()) bad.push_back("I1: n_mut differs from |mutant index|");

  BigInt phi = 0;
  for (Vertex v : mutants_) phi += ctx.phi_step(v);
  if (phi != phi_scaled_) bad.push_back("I2: phi_scaled differs from phi(M)*D");

  for (Vertex v : mutants_)
    if (v < 1 || v > g.n()) bad.push_back("I3: mutant index holds an invalid id");

  std::size_t seen_occupied = 0;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const Slot& s = slots_[i];
    if (s.v == 0) continue;
    ++seen_occupied;
    auto it = slot_of_.find(s.v);
    if (it == slot_of_.end() || it->second != i)
      bad.push_back("I5: slot " + std::to_string(i) + " not mirrored in the boundary index");
    std::uint32_t d = opposite_out_degree(g, s.v, mutants_);
    if (d != s.d_bdry)
      bad.push_back("I5: stale boundary degree at vertex " + std::to_string(s.v));
  }
  if (seen_occupied != occupied_) bad.push_back("I5: occupancy counter is wrong");
  for (auto [v, idx] : slot_of_)
    if (idx >= slots_.size() || slots_[idx].v != v)
      bad.push_back("I5: boundary index points at the wrong slot for " + std::to_string(v));

  for (Vertex v = 1; v <= g.n(); ++v) {
    bool indexed = slot_of_.count(v) > 0;
    bool should = opposite_out_degree(g, v, mutants_) > 0;
    if (indexed != should) {
      bad.push_back("I4: boundary membership wrong at vertex " + std::to_string(v));
      break;
    }
  }

  if (occupied_ > 0) {
    if (slots_.empty())
      bad.push_back("I5: occupied entries but no slots");
    else if (3 * occupied_ < slots_.size() || 3 * occupied_ > 2 * slots_.size())
      bad.push_back("occupancy outside the [1/3, 2/3] band");
  }
  return bad;
}

MutantSet naive_step(const Graph& g, double r, const MutantSet& M, SplitMix64& rng) {
  if (M.empty() || M.count() >= g.n()) throw std::invalid_argument("naive step: absorbing state");
  auto n_mut = static_cast<double>(M.count());
  double w = static_cast<double>(g.n()) + (r - 1.0) * n_mut;
  Vertex firing;
  if (rng.next_unit() < r * n_mut / w) {
    firing = M.members()[rng.next_below(M.count())];
  } else {
    std::vector<Vertex> others;
    others.reserve(g.n() - M.count());
    for (Vertex v = 1; v <= g.n(); ++v)
      if (!M.contains(v)) others.push_back(v);
    firing = others[rng.next_below(others.size())];
  }
  auto nbrs = g.neighbors(firing);
  Vertex onto = nbrs[rng.next_below(nbrs.size())];
  if (M.contains(onto) == M.contains(firing)) return M;  // idle step
  std::vector<Vertex> next(M.members());
  if (M.contains(firing))
    next.push_back(onto);
  else
    next.erase(std::find(next.begin(), next.end(), onto));
  return MutantSet(std::move(next));
}

namespace {

// O(1)-per-step full-process loop used by the naive run mode.
struct NaiveRun {
  const SimContext& ctx;
  std::vector<std::uint8_t> is_mut;
  std::vector<Vertex> mut_list, non_list;
  std::vector<std::uint32_t> pos;  // position in whichever list holds the vertex
  BigInt phi_scaled = 0;

  NaiveRun(const SimContext& c, const MutantSet& start) : ctx(c) {
    const Graph& g = ctx.graph();
    is_mut.assign(g.n() + 1, 0);
    pos.assign(g.n() + 1, 0);
    for (Vertex v : start) is_mut[v] = 1;
    for (Vertex v = 1; v <= g.n(); ++v) {
      if (is_mut[v]) {
        pos[v] = static_cast<std::uint32_t>(mut_list.size());
        mut_list.push_back(v);
        phi_scaled += ctx.phi_step(v);
      } else {
        pos[v] = static_cast<std::uint32_t>(non_list.size());
        non_list.push_back(v);
      }
    }
  }

  void move(std::vector<Vertex>& from, std::vector<Vertex>& to, Vertex v) {
    std::uint32_t at = pos[v];
    Vertex last = from.back();
    from[at] = last;
    pos[last] = at;
    from.pop_back();
    pos[v] = static_cast<std::uint32_t>(to.size());
    to.push_back(v);
  }

  // one full step; returns (spawner, target) when the state changed
  std::optional<std::pair<Vertex, Vertex>> step(double r, SplitMix64& rng) {
    const Graph& g = ctx.graph();
    auto n_mut = static_cast<double>(mut_list.size());
    double w = static_cast<double>(g.n()) + (r - 1.0) * n_mut;
    Vertex firing;
    if (rng.next_unit() < r * n_mut / w)
      firing = mut_list[rng.next_below(mut_list.size())];
    else
      firing = non_list[rng.next_below(non_list.size())];
    auto nbrs = g.neighbors(firing);
    Vertex onto = nbrs[rng.next_below(nbrs.size())];
    if (is_mut[onto] == is_mut[firing]) return std::nullopt;
    if (is_mut[firing]) {
      is_mut[onto] = 1;
      move(non_list, mut_list, onto);
      phi_scaled += ctx.phi_step(onto);
    } else {
      is_mut[onto] = 0;
      move(mut_list, non_list, onto);
      phi_scaled -= ctx.phi_step(onto);
    }
    return std::make_pair(firing, onto);
  }
};

MutantSet resolve_start(const SimContext& ctx, const RunSpec& spec, SplitMix64& rng) {
  if (spec.start_set) {
    if (spec.start_set->empty() || spec.start_set->count() >= ctx.graph().n())
      throw std::invalid_argument("run: initial state must be non-absorbing");
    for (Vertex v : *spec.start_set)
      if (v < 1 || v > ctx.graph().n()) throw std::invalid_argument("run: invalid start vertex");
    return *spec.start_set;
  }
  if (spec.start) {
    if (*spec.start < 1 || *spec.start > ctx.graph().n())
      throw std::invalid_argument("run: invalid start vertex");
    return MutantSet::single(*spec.start);
  }
  return MutantSet::single(static_cast<Vertex>(rng.next_below(ctx.graph().n()) + 1));
}

}  // namespace

RunOutcome run(const SimContext& ctx, const Rational& r, const RunSpec& spec, std::uint64_t seed) {
  const Graph& g = ctx.graph();
  if (g.n() < 2) throw std::invalid_argument("run: need at least two vertices");
  if (spec.mode == RunMode::to_threshold && g.directed())
    throw std::invalid_argument("run: threshold mode needs an undirected graph");
  double rd = to_double(r);
  if (rd <= 0) throw std::invalid_argument("run: need r > 0");

  SplitMix64 rng(seed);
  RunOutcome out;
  out.seed = seed;
  MutantSet start = resolve_start(ctx, spec, rng);

  if (spec.mode == RunMode::to_absorption_naive) {
    NaiveRun sim(ctx, start);
    std::uint64_t naive = 0;
    while (!sim.mut_list.empty() && sim.mut_list.size() < g.n()) {
      ++naive;
      if (auto changed = sim.step(rd, rng)) {
        ++out.active_steps;
        if (spec.trace)
          spec.trace(out.active_steps, changed->first, changed->second,
                     static_cast<std::uint32_t>(sim.mut_list.size()), sim.phi_scaled);
      }
    }
    out.naive_steps = naive;
    out.result = sim.mut_list.empty() ? RunResult::extinction : RunResult::fixation;
    out.final_phi_scaled = sim.phi_scaled;
    return out;
  }

  ActiveState st(ctx, start, rng);
  BigInt thresh_scaled;
  if (spec.mode == RunMode::to_threshold) {
    if (spec.threshold <= 0) throw std::invalid_argument("run: threshold must be positive");
    thresh_scaled = ceil_rational(spec.threshold * Rational(ctx.lcm().value));
  }
  while (true) {
    if (st.n_mut() == g.n()) {
      out.result = RunResult::fixation;
      break;
    }
    if (st.n_mut() == 0) {
      out.result = RunResult::extinction;
      break;
    }
    if (spec.mode == RunMode::to_threshold && st.phi_scaled() >= thresh_scaled) {
      out.result = RunResult::threshold_reached;
      break;
    }
    // capped mode stops at max_steps; other modes treat a non-zero
    // max_steps as a safety bound
    if (st.steps() >= spec.max_steps &&
        (spec.mode == RunMode::capped || spec.max_steps > 0)) {
      out.result = RunResult::step_capped;
      break;
    }
    auto [spawner, target] = st.active_step(ctx, rd, rng);
    if (spec.trace) spec.trace(st.steps(), spawner, target, st.n_mut(), st.phi_scaled());
  }
  out.active_steps = st.steps();
  out.final_phi_scaled = st.phi_scaled();
  return out;
}

RunResult continue_to_absorption(const SimContext& ctx, ActiveState& state, double r,
                                 SplitMix64& rng) {
  while (!state.absorbed(ctx)) state.active_step(ctx, r, rng);
  return state.n_mut() == 0 ? RunResult::extinction : RunResult::fixation;
}

std::string run_result_name(RunResult r) {
  switch (r) {
    case RunResult::fixation: return "fixation";
    case RunResult::extinction: return "extinction";
    case RunResult::threshold_reached: return "threshold_reached";
    case RunResult::step_capped: return "step_capped";
  }
  return "?";
}

}  // namespace moran
