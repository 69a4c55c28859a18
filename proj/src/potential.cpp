#include "moran/potential.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace moran {

namespace {

void require_undirected(const Graph& g, const char* op) {
  if (g.directed())
    throw std::invalid_argument(std::string(op) + ": defined for undirected graphs only");
  if (g.n() < 2) throw std::invalid_argument(std::string(op) + ": need at least two vertices");
}

std::vector<std::uint8_t> membership(const Graph& g, const MutantSet& S) {
  std::vector<std::uint8_t> in(g.n() + 1, 0);
  for (Vertex v : S) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("vertex id outside graph");
    in[v] = 1;
  }
  return in;
}

}  // namespace

WeightFunction::WeightFunction(const Graph& g, std::vector<Rational> values)
    : values_(std::move(values)), m_f_(0), zero_(true) {
  if (values_.size() != static_cast<std::size_t>(g.n()) + 1)
    throw std::invalid_argument("weight function: need one value per vertex");
  for (Vertex v = 1; v <= g.n(); ++v) {
    if (values_[v] < 0) throw std::invalid_argument("weight function: negative weight");
    if (values_[v] != 0) zero_ = false;
    if (g.degree(v) == 0) throw std::invalid_argument("weight function: isolated vertex");
    Rational ratio = values_[v] / Rational(g.degree(v));
    if (ratio > m_f_) m_f_ = ratio;
  }
}

WeightFunction WeightFunction::ones(const Graph& g) {
  return WeightFunction(g, std::vector<Rational>(g.n() + 1, Rational(1)));
}

WeightFunction WeightFunction::indicator(const Graph& g, const MutantSet& U) {
  std::vector<Rational> vals(g.n() + 1, Rational(0));
  for (Vertex v : U) vals[v] = 1;
  return WeightFunction(g, std::move(vals));
}

Rational phi(const Graph& g, const MutantSet& S) {
  require_undirected(g, "phi");
  Rational total = 0;
  for (Vertex v : S) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("phi: vertex id outside graph");
    if (g.degree(v) == 0) throw std::invalid_argument("phi: isolated vertex");
    total += Rational(1, g.degree(v));
  }
  return total;
}

Rational phi_total(const Graph& g) { return phi(g, MutantSet::full(g.n())); }

Rational drift(const Graph& g, const MutantSet& A, const MutantSet& B) {
  require_undirected(g, "drift");
  auto in_a = membership(g, A);
  auto in_b = membership(g, B);
  for (Vertex v : A)
    if (in_b[v]) throw std::invalid_argument("drift: arguments overlap");
  Rational total = 0;
  for (Vertex x : A) {
    Rational dx(g.degree(x));
    for (Vertex y : g.neighbors(x))
      if (in_b[y]) total += 1 / (dx * Rational(g.degree(y)));
  }
  return total;
}

Rational boundary_drift(const Graph& g, const MutantSet& S) {
  require_undirected(g, "drift");
  auto in_s = membership(g, S);
  Rational total = 0;
  for (Vertex x : S) {
    Rational dx(g.degree(x));
    for (Vertex y : g.neighbors(x))
      if (!in_s[y]) total += 1 / (dx * Rational(g.degree(y)));
  }
  return total;
}

Rational phi_weighted(const Graph& g, const WeightFunction& f, const MutantSet& S) {
  require_undirected(g, "phi_f");
  Rational total = 0;
  for (Vertex v : S) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("phi_f: vertex id outside graph");
    total += f[v] / Rational(g.degree(v));
  }
  return total;
}

double psi_weighted(const Graph& g, const ProcessConstants& consts, const WeightFunction& f,
                    const MutantSet& S) {
  if (consts.r <= 1) throw std::invalid_argument("psi_f: need r > 1");
  if (f.everywhere_zero()) throw std::invalid_argument("psi_f: weights are everywhere zero");
  Rational exponent = phi_weighted(g, f, S) * consts.beta / f.max_ratio();
  return std::exp(-to_double(exponent));
}

ValidityReport is_valid_for(const Graph& g, const ProcessConstants& consts,
                            const WeightFunction& f, const MutantSet& X) {
  require_undirected(g, "validity");
  if (consts.r <= 1) throw std::invalid_argument("validity: need r > 1");
  auto in_x = membership(g, X);
  Rational heavy = 0, light = 0;
  for (Vertex x = 1; x <= g.n(); ++x) {
    if (!in_x[x]) continue;
    Rational dx(g.degree(x));
    for (Vertex y : g.neighbors(x)) {
      if (in_x[y]) continue;
      Rational dd = dx * Rational(g.degree(y));
      if (f[x] > consts.lambda * f[y])
        heavy += f[x] / dd;
      else
        light += f[y] / dd;
    }
  }
  Rational rhs = (consts.r - 1) / (4 * consts.r) * light;
  return {heavy <= rhs, heavy, light};
}

double barrier_log_rho(Vertex n, const ProcessConstants& consts) {
  if (consts.r <= 1) throw std::invalid_argument("barrier: need r > 1");
  if (n < 3) throw std::invalid_argument("barrier: need n >= 3");
  double r = to_double(consts.r);
  double log_lambda = std::log(to_double(consts.lambda));
  double inner = 10.0 / log_lambda * std::log(std::log(static_cast<double>(n)));
  return std::log(10.0 * r / (r - 1.0)) + inner * inner * inner * std::log(r);
}

double barrier_rho(Vertex n, const ProcessConstants& consts) {
  return std::exp(barrier_log_rho(n, consts));
}

BarrierReport is_barrier(const Graph& g, const ProcessConstants& consts, const MutantSet& S) {
  require_undirected(g, "barrier");
  if (S.empty() || S.count() >= g.n())
    throw std::invalid_argument("barrier: S must be a proper non-empty subset");
  double log_threshold =
      -std::log(2.0 * static_cast<double>(g.n())) - barrier_log_rho(g.n(), consts);
  Rational d = boundary_drift(g, S);
  if (d == 0) return {true, false, log_threshold};
  double log_d = log_rational(d);
  double band = 1e-12 * (std::abs(log_threshold) + 1.0);
  return {log_d < log_threshold, std::abs(log_d - log_threshold) <= band, log_threshold};
}

MutantSet core_subset(const Graph& g, const MutantSet& U) {
  require_undirected(g, "core subset");
  if (U.empty()) throw std::invalid_argument("core subset: U is empty");
  auto in_u = membership(g, U);

  // induced degrees and edge count of G[U]
  std::vector<long> deg(g.n() + 1, -1);
  std::uint64_t edges2 = 0;
  for (Vertex v : U) {
    long d = 0;
    for (Vertex w : g.neighbors(v))
      if (in_u[w]) ++d;
    deg[v] = d;
    edges2 += static_cast<std::uint64_t>(d);
  }
  Rational threshold(BigInt(static_cast<unsigned long>(edges2)), BigInt(2 * U.count()));
  threshold.canonicalize();

  std::vector<Vertex> alive(U.begin(), U.end());
  while (true) {
    Vertex victim = 0;
    long min_deg = -1;
    bool below = false;
    for (Vertex v : alive) {
      if (Rational(deg[v]) < threshold) below = true;
      if (min_deg < 0 || deg[v] < min_deg || (deg[v] == min_deg && v < victim)) {
        min_deg = deg[v];
        victim = v;
      }
    }
    if (!below) break;
    in_u[victim] = 0;
    deg[victim] = -1;
    for (Vertex w : g.neighbors(victim))
      if (in_u[w] && deg[w] >= 0) --deg[w];
    alive.erase(std::find(alive.begin(), alive.end(), victim));
    if (alive.empty()) throw std::logic_error("core subset: deletion emptied U");
  }
  return MutantSet(std::move(alive));
}

std::pair<MutantSet, Rational> min_drift_subset(const Graph& g,
                                                const std::optional<MutantSet>& restrict_to) {
  require_undirected(g, "min drift");
  if (g.n() > 64) throw std::invalid_argument("min drift: n > 64 unsupported");
  std::vector<Vertex> pool;
  if (restrict_to) {
    pool.assign(restrict_to->begin(), restrict_to->end());
  } else {
    for (Vertex v = 1; v <= g.n(); ++v) pool.push_back(v);
  }
  if (pool.size() > 24) throw std::invalid_argument("min drift: more than 24 candidate vertices");
  if (pool.empty()) throw std::invalid_argument("min drift: empty candidate set");

  // Degrees fit in lcm-scaled integers: weight of edge xy is (L/dx)(L/dy)
  // where L = lcm of degrees, so cut sums stay exact in 128-bit arithmetic.
  BigInt lcm = 1;
  for (Vertex v = 1; v <= g.n(); ++v) {
    if (g.degree(v) == 0) throw std::invalid_argument("min drift: isolated vertex");
    mpz_lcm_ui(lcm.get_mpz_t(), lcm.get_mpz_t(), g.degree(v));
  }
  if (mpz_sizeinbase(lcm.get_mpz_t(), 2) > 52)
    throw std::invalid_argument("min drift: degree lcm too large for exact cut sums");
  unsigned long L = lcm.get_ui();
  using Wide = unsigned __int128;

  std::vector<std::uint8_t> in_s(g.n() + 1, 0);
  Wide cut = 0;
  auto flip = [&](Vertex v) {
    Wide wv = L / g.degree(v);
    if (!in_s[v]) {
      in_s[v] = 1;
      for (Vertex w : g.neighbors(v)) {
        Wide term = wv * (L / g.degree(w));
        if (in_s[w])
          cut -= term;
        else
          cut += term;
      }
    } else {
      in_s[v] = 0;
      for (Vertex w : g.neighbors(v)) {
        Wide term = wv * (L / g.degree(w));
        if (in_s[w])
          cut += term;
        else
          cut -= term;
      }
    }
  };

  auto mask_of_pool_bits = [&](std::uint32_t bits) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (bits >> i & 1) mask |= 1ULL << (pool[i] - 1);
    return mask;
  };

  bool found = false;
  Wide best_cut = 0;
  int best_size = 0;
  std::uint64_t best_mask = 0;
  std::uint32_t prev_gray = 0;
  int cur_size = 0;
  std::uint32_t total = 1u << pool.size();
  for (std::uint32_t i = 1; i < total; ++i) {
    std::uint32_t gray = i ^ (i >> 1);
    std::uint32_t changed = gray ^ prev_gray;
    int bit = std::countr_zero(changed);
    flip(pool[static_cast<std::size_t>(bit)]);
    cur_size += (gray >> bit & 1) ? 1 : -1;
    prev_gray = gray;
    if (static_cast<Vertex>(cur_size) == g.n()) continue;  // not a proper subset
    std::uint64_t mask = mask_of_pool_bits(gray);
    if (!found || cut < best_cut ||
        (cut == best_cut &&
         (cur_size < best_size || (cur_size == best_size && mask < best_mask)))) {
      found = true;
      best_cut = cut;
      best_size = cur_size;
      best_mask = mask;
    }
  }
  if (!found) throw std::invalid_argument("min drift: no proper non-empty subset exists");

  BigInt num = 0;
  // reconstruct exact rational from the 128-bit cut sum
  Wide tmp = best_cut;
  BigInt shift = 1;
  while (tmp > 0) {
    num += shift * static_cast<unsigned long>(tmp & 0xffffffffULL);
    tmp >>= 32;
    shift <<= 32;
  }
  Rational value(num, lcm * lcm);
  value.canonicalize();
  return {MutantSet::from_mask(best_mask, g.n()), value};
}

}  // namespace moran
