#include "moran/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace moran {

namespace {

thread_local ExactDiagnostics g_diag{0.0, 0};

void require_process_graph(const Graph& g) {
  if (g.n() < 2) throw std::invalid_argument("exact: need at least two vertices");
  if (g.directed()) {
    if (!is_strongly_connected(g))
      throw std::invalid_argument("exact: directed graph must be strongly connected");
  } else if (!is_connected(g)) {
    throw std::invalid_argument("exact: graph must be connected");
  }
}

void require_state_cap(const Graph& g) {
  if (g.n() > kExactStateCap)
    throw std::invalid_argument("exact: state space cap is n <= " +
                                std::to_string(kExactStateCap));
}

// Enumerates the non-idle moves out of `mask`: calls fn(next_mask,
// from_mutant, firing_vertex); the move has probability weight/(W d(v)) with
// weight r for mutants and 1 otherwise.
template <class Fn>
void for_each_move(const Graph& g, std::uint32_t mask, Fn&& fn) {
  for (Vertex v = 1; v <= g.n(); ++v) {
    bool v_mut = mask >> (v - 1) & 1;
    for (Vertex w : g.neighbors(v)) {
      bool w_mut = mask >> (w - 1) & 1;
      if (v_mut == w_mut) continue;
      std::uint32_t next = v_mut ? (mask | 1u << (w - 1)) : (mask & ~(1u << (w - 1)));
      fn(next, v_mut, v);
    }
  }
}

struct DoubleSystem {
  // Probabilities of one full step in double precision.
  const Graph& g;
  double r;
  std::vector<double> inv_w;  // 1/W by popcount

  DoubleSystem(const Graph& graph, const Rational& fitness) : g(graph), r(to_double(fitness)) {
    inv_w.resize(g.n() + 1);
    double rd = to_double(fitness);
    for (Vertex k = 0; k <= g.n(); ++k)
      inv_w[k] = 1.0 / (static_cast<double>(g.n()) + (rd - 1.0) * static_cast<double>(k));
  }

  template <class Fn>
  void moves(std::uint32_t mask, Fn&& fn) const {
    double iw = inv_w[static_cast<std::size_t>(std::popcount(mask))];
    for_each_move(g, mask, [&](std::uint32_t next, bool from_mutant, Vertex v) {
      double p = (from_mutant ? r : 1.0) * iw / static_cast<double>(g.degree(v));
      fn(next, p);
    });
  }
};

// Dense Gaussian elimination with partial pivoting over the active states,
// solving (I - P_active) x = b for one or two right-hand sides.
void solve_dense(const DoubleSystem& sys, std::vector<std::vector<double>>& rhs) {
  const Vertex n = sys.g.n();
  const std::size_t full = (std::size_t{1} << n) - 1;
  const std::size_t rows = full - 1;  // masks 1 .. full-1
  std::vector<double> a(rows * rows, 0.0);
  for (std::size_t mask = 1; mask < full; ++mask) {
    std::size_t row = mask - 1;
    double stay = 1.0;
    sys.moves(static_cast<std::uint32_t>(mask), [&](std::uint32_t next, double p) {
      stay -= p;
      if (next != 0 && next != full) a[row * rows + (next - 1)] -= p;
    });
    a[row * rows + row] = 1.0 - stay;
  }
  // forward elimination
  for (std::size_t col = 0; col < rows; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * rows + col]);
    for (std::size_t r2 = col + 1; r2 < rows; ++r2) {
      double v = std::abs(a[r2 * rows + col]);
      if (v > best) {
        best = v;
        pivot = r2;
      }
    }
    if (best == 0.0) throw std::runtime_error("exact: singular system");
    if (pivot != col) {
      for (std::size_t j = col; j < rows; ++j) std::swap(a[pivot * rows + j], a[col * rows + j]);
      for (auto& b : rhs) std::swap(b[pivot], b[col]);
    }
    double inv_piv = 1.0 / a[col * rows + col];
    for (std::size_t r2 = col + 1; r2 < rows; ++r2) {
      double factor = a[r2 * rows + col] * inv_piv;
      if (factor == 0.0) continue;
      a[r2 * rows + col] = 0.0;
      for (std::size_t j = col + 1; j < rows; ++j) a[r2 * rows + j] -= factor * a[col * rows + j];
      for (auto& b : rhs) b[r2] -= factor * b[col];
    }
  }
  // back substitution
  for (auto& b : rhs) {
    for (std::size_t i = rows; i-- > 0;) {
      double acc = b[i];
      for (std::size_t j = i + 1; j < rows; ++j) acc -= a[i * rows + j] * b[j];
      b[i] = acc / a[i * rows + i];
    }
  }
}

// Gauss-Seidel sweeps for 12 < n <= 20.
void solve_gauss_seidel(const DoubleSystem& sys, std::vector<double>& x,
                        const std::vector<double>& b, double residual_cap) {
  const std::size_t full = (std::size_t{1} << sys.g.n()) - 1;
  constexpr std::size_t kMaxSweeps = 1000000;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double max_res = 0.0;
    for (std::size_t mask = 1; mask < full; ++mask) {
      double acc = b[mask - 1];
      double self = 1.0;
      sys.moves(static_cast<std::uint32_t>(mask), [&](std::uint32_t next, double p) {
        self -= p;
        if (next != 0 && next != full) acc += p * x[next - 1];
      });
      double updated = acc / (1.0 - self);
      max_res = std::max(max_res, std::abs(updated - x[mask - 1]));
      x[mask - 1] = updated;
    }
    if (max_res <= residual_cap) return;
  }
  throw std::runtime_error("exact: Gauss-Seidel did not converge within the sweep cap");
}

double system_residual(const DoubleSystem& sys, const std::vector<double>& x,
                       const std::vector<double>& b) {
  const std::size_t full = (std::size_t{1} << sys.g.n()) - 1;
  double worst = 0.0;
  for (std::size_t mask = 1; mask < full; ++mask) {
    double acc = b[mask - 1];
    double self = 1.0;
    sys.moves(static_cast<std::uint32_t>(mask), [&](std::uint32_t next, double p) {
      self -= p;
      if (next != 0 && next != full) acc += p * x[next - 1];
    });
    worst = std::max(worst, std::abs((1.0 - self) * x[mask - 1] - acc));
  }
  return worst;
}

std::vector<double> solve_absorbing(const Graph& g, const Rational& r, bool fixation) {
  require_process_graph(g);
  require_state_cap(g);
  DoubleSystem sys(g, r);
  const std::size_t full = (std::size_t{1} << g.n()) - 1;
  const std::size_t rows = full - 1;

  std::vector<double> b(rows, 0.0);
  if (fixation) {
    for (std::size_t mask = 1; mask < full; ++mask) {
      double acc = 0.0;
      sys.moves(static_cast<std::uint32_t>(mask), [&](std::uint32_t next, double p) {
        if (next == full) acc += p;
      });
      b[mask - 1] = acc;
    }
  } else {
    std::fill(b.begin(), b.end(), 1.0);
  }

  std::vector<double> x;
  if (g.n() <= kExactDenseCap) {
    std::vector<std::vector<double>> rhs{b};
    solve_dense(sys, rhs);
    x = std::move(rhs[0]);
  } else {
    x.assign(rows, fixation ? 0.5 : 0.0);
    solve_gauss_seidel(sys, x, b, fixation ? 1e-13 : 1e-11);
  }

  g_diag = {system_residual(sys, x, b), full + 1};

  std::vector<double> out(full + 1, 0.0);
  for (std::size_t mask = 1; mask < full; ++mask) out[mask] = x[mask - 1];
  out[0] = 0.0;
  out[full] = fixation ? 1.0 : 0.0;
  return out;
}

}  // namespace

ExactDiagnostics last_exact_diagnostics() { return g_diag; }

std::map<MutantSet, Rational> transition_distribution(const Graph& g, const Rational& r,
                                                      const MutantSet& S) {
  if (r <= 0) throw std::invalid_argument("transition: need r > 0");
  if (S.empty() || S.count() >= g.n())
    throw std::invalid_argument("transition: state is absorbing");
  std::vector<std::uint8_t> in_s(g.n() + 1, 0);
  for (Vertex v : S) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("transition: vertex outside graph");
    in_s[v] = 1;
  }
  Rational w = Rational(g.n()) + (r - 1) * Rational(static_cast<long>(S.count()));

  std::map<MutantSet, Rational> out;
  Rational idle = 1;
  for (Vertex v = 1; v <= g.n(); ++v) {
    Rational fire = (in_s[v] ? r : Rational(1)) / (w * Rational(g.degree(v)));
    for (Vertex y : g.neighbors(v)) {
      if (in_s[y] == in_s[v]) continue;
      std::vector<Vertex> next(S.members());
      if (in_s[v]) {
        next.push_back(y);
      } else {
        next.erase(std::find(next.begin(), next.end(), y));
      }
      out[MutantSet(std::move(next))] += fire;
      idle -= fire;
    }
  }
  if (idle != 0) out[S] += idle;
  return out;
}

std::vector<double> fixation_vector_exact(const Graph& g, const Rational& r) {
  return solve_absorbing(g, r, true);
}

std::vector<double> absorption_time_vector_exact(const Graph& g, const Rational& r) {
  return solve_absorbing(g, r, false);
}

double fixation_probability_exact(const Graph& g, const Rational& r) {
  auto h = fixation_vector_exact(g, r);
  double sum = 0.0;
  for (Vertex v = 1; v <= g.n(); ++v) sum += h[std::size_t{1} << (v - 1)];
  return sum / static_cast<double>(g.n());
}

double fixation_probability_exact(const Graph& g, const Rational& r, const MutantSet& start) {
  auto h = fixation_vector_exact(g, r);
  return h[start.to_mask(g.n())];
}

double absorption_time_exact(const Graph& g, const Rational& r) {
  auto t = absorption_time_vector_exact(g, r);
  double sum = 0.0;
  for (Vertex v = 1; v <= g.n(); ++v) sum += t[std::size_t{1} << (v - 1)];
  return sum / static_cast<double>(g.n());
}

double absorption_time_exact(const Graph& g, const Rational& r, const MutantSet& start) {
  auto t = absorption_time_vector_exact(g, r);
  return t[start.to_mask(g.n())];
}

namespace {

// Exact dense elimination over the active states; row-ordered pivoting with
// the first non-zero entry. Only sensible at small n.
std::vector<Rational> solve_rational(const Graph& g, const Rational& r) {
  require_process_graph(g);
  if (g.n() > kExactRationalCap)
    throw std::invalid_argument("exact: rational path caps at n <= " +
                                std::to_string(kExactRationalCap));
  const std::size_t full = (std::size_t{1} << g.n()) - 1;
  const std::size_t rows = full - 1;
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(rows, Rational(0)));
  std::vector<Rational> b(rows, Rational(0));
  for (std::size_t mask = 1; mask < full; ++mask) {
    std::size_t row = mask - 1;
    auto count = static_cast<long>(std::popcount(mask));
    Rational w = Rational(g.n()) + (r - 1) * Rational(count);
    Rational self = 1;
    for_each_move(g, static_cast<std::uint32_t>(mask),
                  [&](std::uint32_t next, bool from_mutant, Vertex v) {
                    Rational p = (from_mutant ? r : Rational(1)) / (w * Rational(g.degree(v)));
                    self -= p;
                    if (next == full)
                      b[row] += p;
                    else if (next != 0)
                      a[row][next - 1] -= p;
                  });
    a[row][row] = 1 - self;
  }
  for (std::size_t col = 0; col < rows; ++col) {
    std::size_t pivot = col;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) throw std::runtime_error("exact: singular rational system");
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r2 = col + 1; r2 < rows; ++r2) {
      if (a[r2][col] == 0) continue;
      Rational factor = a[r2][col] / a[col][col];
      a[r2][col] = 0;
      for (std::size_t j = col + 1; j < rows; ++j)
        if (a[col][j] != 0) a[r2][j] -= factor * a[col][j];
      b[r2] -= factor * b[col];
    }
  }
  for (std::size_t i = rows; i-- > 0;) {
    Rational acc = b[i];
    for (std::size_t j = i + 1; j < rows; ++j)
      if (a[i][j] != 0) acc -= a[i][j] * b[j];
    b[i] = acc / a[i][i];
  }
  std::vector<Rational> out(full + 1, Rational(0));
  for (std::size_t mask = 1; mask < full; ++mask) out[mask] = b[mask - 1];
  out[full] = 1;
  return out;
}

}  // namespace

Rational fixation_probability_exact_rational(const Graph& g, const Rational& r) {
  auto h = solve_rational(g, r);
  Rational sum = 0;
  for (Vertex v = 1; v <= g.n(); ++v) sum += h[std::size_t{1} << (v - 1)];
  return sum / Rational(g.n());
}

Rational fixation_probability_exact_rational(const Graph& g, const Rational& r,
                                             const MutantSet& start) {
  auto h = solve_rational(g, r);
  return h[start.to_mask(g.n())];
}

OneStepExpectation one_step_expected_change(const Graph& g, const Rational& r, const MutantSet& S,
                                            PotentialKind kind, const WeightFunction* f,
                                            const SigmaWeights* sigma,
                                            const ProcessConstants* consts) {
  if (g.directed())
    throw std::invalid_argument("one-step expectation: undirected graphs only");
  if ((kind == PotentialKind::phi_weighted || kind == PotentialKind::psi_weighted) && f == nullptr)
    throw std::invalid_argument("one-step expectation: weight function required");
  if (kind == PotentialKind::sigma && sigma == nullptr)
    throw std::invalid_argument("one-step expectation: sigma weights required");
  if (kind == PotentialKind::psi_weighted && consts == nullptr)
    throw std::invalid_argument("one-step expectation: process constants required");

  std::vector<std::uint8_t> in_s(g.n() + 1, 0);
  for (Vertex v : S) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("one-step expectation: vertex outside graph");
    in_s[v] = 1;
  }
  Rational w = Rational(g.n()) + (r - 1) * Rational(static_cast<long>(S.count()));

  OneStepExpectation out{kind, Rational(0), 0.0};
  switch (kind) {
    case PotentialKind::phi: {
      Rational acc = 0;
      for (Vertex x : S) {
        Rational dx(g.degree(x));
        for (Vertex y : g.neighbors(x))
          if (!in_s[y]) acc += (r - 1) / (dx * Rational(g.degree(y)));
      }
      out.exact = acc / w;
      break;
    }
    case PotentialKind::phi_weighted: {
      Rational acc = 0;
      for (Vertex x : S) {
        Rational dx(g.degree(x));
        for (Vertex y : g.neighbors(x))
          if (!in_s[y]) acc += (r * (*f)[y] - (*f)[x]) / (dx * Rational(g.degree(y)));
      }
      out.exact = acc / w;
      break;
    }
    case PotentialKind::sigma: {
      // Bucket the non-mutant neighbors of each boundary mutant by
      // (class, degree); the suppressor instances have huge degree but only
      // a handful of distinct buckets.
      Rational acc = 0;
      std::vector<std::pair<std::uint64_t, std::uint64_t>> buckets;
      for (Vertex x : S) {
        buckets.clear();
        for (Vertex y : g.neighbors(x)) {
          if (in_s[y]) continue;
          std::uint64_t key = (static_cast<std::uint64_t>(sigma->class_of(y)) << 32) | g.degree(y);
          bool hit = false;
          for (auto& [k, cnt] : buckets)
            if (k == key) {
              ++cnt;
              hit = true;
              break;
            }
          if (!hit) buckets.emplace_back(key, 1);
        }
        if (buckets.empty()) continue;
        Rational dx(g.degree(x));
        const Rational& sx = sigma->sigma(x);
        for (auto& [key, cnt] : buckets) {
          int cls = static_cast<int>(key >> 32);
          auto dy = static_cast<long>(key & 0xffffffffULL);
          Rational term = r * sigma->class_value(cls) / dx - sx / Rational(dy);
          acc += Rational(static_cast<long>(cnt)) * term;
        }
      }
      out.exact = acc / w;
      break;
    }
    case PotentialKind::psi_weighted: {
      if (consts->r != r)
        throw std::invalid_argument("one-step expectation: consts.r mismatch");
      if (f->everywhere_zero())
        throw std::invalid_argument("one-step expectation: psi needs non-zero weights");
      double psi_here = psi_weighted(g, *consts, *f, S);
      Rational scale = consts->beta / f->max_ratio();
      double up = 0.0, down = 0.0, active = 0.0;
      double wd = to_double(w);
      for (Vertex x : S) {
        double dx = g.degree(x);
        for (Vertex y : g.neighbors(x)) {
          if (in_s[y]) continue;
          double p_up = to_double(r) / (wd * dx);
          double p_down = 1.0 / (wd * static_cast<double>(g.degree(y)));
          up += p_up * std::exp(-to_double((*f)[y] / Rational(g.degree(y)) * scale));
          down += p_down * std::exp(to_double((*f)[x] / Rational(g.degree(x)) * scale));
          active += p_up + p_down;
        }
      }
      out.value = psi_here * (up + down - active);
      return out;
    }
  }
  out.value = to_double(out.exact);
  return out;
}

std::map<Vertex, Rational> active_spawner_distribution(const Graph& g, const Rational& r,
                                                       const MutantSet& S) {
  if (S.empty() || S.count() >= g.n())
    throw std::invalid_argument("spawner distribution: state is absorbing");
  std::vector<std::uint8_t> in_s(g.n() + 1, 0);
  for (Vertex v : S) in_s[v] = 1;

  std::map<Vertex, Rational> weight;
  Rational total = 0;
  for (Vertex v = 1; v <= g.n(); ++v) {
    long bdry = 0;
    for (Vertex y : g.neighbors(v))
      if (in_s[y] != in_s[v]) ++bdry;
    if (bdry == 0) continue;
    Rational wv = (in_s[v] ? r : Rational(1)) * Rational(bdry) / Rational(g.degree(v));
    weight[v] = wv;
    total += wv;
  }
  if (total == 0) throw std::invalid_argument("spawner distribution: empty boundary");
  for (auto& [v, wv] : weight) wv /= total;
  return weight;
}

}  // namespace moran
