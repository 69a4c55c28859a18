#include "moran/families.hpp"

#include <algorithm>
#include <sstream>

#include "moran/rng.hpp"

namespace moran {

Family family_from_name(const std::string& name) {
  if (name == "complete") return Family::complete;
  if (name == "cycle") return Family::cycle;
  if (name == "star") return Family::star;
  if (name == "double_star") return Family::double_star;
  if (name == "dir_suppressor") return Family::dir_suppressor;
  if (name == "undir_suppressor") return Family::undir_suppressor;
  if (name == "random_connected") return Family::random_connected;
  throw std::invalid_argument("unknown family: " + name);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::complete: return "complete";
    case Family::cycle: return "cycle";
    case Family::star: return "star";
    case Family::double_star: return "double_star";
    case Family::dir_suppressor: return "dir_suppressor";
    case Family::undir_suppressor: return "undir_suppressor";
    case Family::random_connected: return "random_connected";
  }
  return "?";
}

const std::vector<Vertex>& LabeledGraph::group(const std::string& name) const {
  auto it = groups.find(name);
  if (it == groups.end()) throw std::invalid_argument("no such group: " + name);
  return it->second;
}

namespace {

long require(const std::optional<long>& v, const char* what, long lo) {
  if (!v) throw std::invalid_argument(std::string("missing parameter ") + what);
  if (*v < lo)
    throw std::invalid_argument(std::string(what) + " must be at least " + std::to_string(lo));
  return *v;
}

LabeledGraph make_complete(long n) {
  std::vector<std::vector<Vertex>> adj(n + 1);
  for (long v = 1; v <= n; ++v)
    for (long w = 1; w <= n; ++w)
      if (w != v) adj[v].push_back(static_cast<Vertex>(w));
  return {Graph(false, static_cast<Vertex>(n), std::move(adj)), {}, Family::complete, {}, {}};
}

LabeledGraph make_cycle(long n) {
  std::vector<std::vector<Vertex>> adj(n + 1);
  for (long v = 1; v <= n; ++v) {
    adj[v].push_back(static_cast<Vertex>(v % n + 1));
    adj[v].push_back(static_cast<Vertex>((v + n - 2) % n + 1));
  }
  return {Graph(false, static_cast<Vertex>(n), std::move(adj)), {}, Family::cycle, {}, {}};
}

LabeledGraph make_star(long k) {
  long n = k + 1;
  std::vector<std::vector<Vertex>> adj(n + 1);
  for (long leaf = 2; leaf <= n; ++leaf) {
    adj[1].push_back(static_cast<Vertex>(leaf));
    adj[leaf].push_back(1);
  }
  std::map<std::string, std::vector<Vertex>> groups;
  groups["center"] = {1};
  for (long leaf = 2; leaf <= n; ++leaf) groups["leaves"].push_back(static_cast<Vertex>(leaf));
  return {Graph(false, static_cast<Vertex>(n), std::move(adj)), std::move(groups), Family::star,
          {}, {}};
}

LabeledGraph make_double_star(long k) {
  long n = 2 * (k + 1);
  std::vector<std::vector<Vertex>> adj(n + 1);
  adj[1].push_back(2);
  adj[2].push_back(1);
  std::map<std::string, std::vector<Vertex>> groups;
  groups["x1"] = {1};
  groups["x2"] = {2};
  for (long i = 0; i < k; ++i) {
    auto leaf1 = static_cast<Vertex>(3 + i);
    auto leaf2 = static_cast<Vertex>(k + 3 + i);
    adj[1].push_back(leaf1);
    adj[leaf1].push_back(1);
    adj[2].push_back(leaf2);
    adj[leaf2].push_back(2);
    groups["L1"].push_back(leaf1);
    groups["L2"].push_back(leaf2);
  }
  return {Graph(false, static_cast<Vertex>(n), std::move(adj)), std::move(groups),
          Family::double_star, {}, {}};
}

// Directed cycle w_1..w_{ka} v_k..v_1 w_1 plus the fans I_i x {v_i}. The fan
// of I_k already contains the cycle arc w_{ka} -> v_k, so the union has
// 2ka + k - 1 arcs.
LabeledGraph make_dir_suppressor(long k, long a) {
  long n = k * (a + 1);
  auto w_id = [&](long j) { return static_cast<Vertex>(j); };            // j in 1..ka
  auto v_id = [&](long i) { return static_cast<Vertex>(k * a + i); };    // i in 1..k
  std::vector<std::vector<Vertex>> adj(n + 1);
  for (long j = 1; j < k * a; ++j) adj[w_id(j)].push_back(w_id(j + 1));
  adj[w_id(k * a)].push_back(v_id(k));
  for (long i = k; i >= 2; --i) adj[v_id(i)].push_back(v_id(i - 1));
  adj[v_id(1)].push_back(w_id(1));
  for (long i = 1; i <= k; ++i)
    for (long j = (i - 1) * a + 1; j <= i * a; ++j)
      if (!(i == k && j == k * a)) adj[w_id(j)].push_back(v_id(i));

  std::map<std::string, std::vector<Vertex>> groups;
  for (long j = 1; j <= k * a; ++j) groups["w"].push_back(w_id(j));
  for (long i = 1; i <= k; ++i) groups["v"].push_back(v_id(i));
  for (long i = 1; i <= k; ++i)
    for (long j = (i - 1) * a + 1; j <= i * a; ++j)
      groups["I" + std::to_string(i)].push_back(w_id(j));
  for (long i = 1; i <= k + 1; ++i) {
    auto& x = groups["X" + std::to_string(i)];
    for (long j = (i - 1) * a + 1; j <= k * a; ++j) x.push_back(w_id(j));
    for (long q = i; q <= k; ++q) x.push_back(v_id(q));
    std::sort(x.begin(), x.end());
  }
  return {Graph(true, static_cast<Vertex>(n), std::move(adj)), std::move(groups),
          Family::dir_suppressor, {}, {}};
}

// Complete bipartite V0-V1, a^2k disjoint k-leaf stars with centers in V2 and
// leaves in V1, perfect matching V2-V3.
LabeledGraph make_undir_suppressor(long a, long k) {
  long n0 = a * k, n1 = a * a * k * k, n2 = a * a * k, n3 = a * a * k;
  long n = n0 + n1 + n2 + n3;
  auto v0 = [&](long i) { return static_cast<Vertex>(i); };
  auto v1 = [&](long i) { return static_cast<Vertex>(n0 + i); };
  auto v2 = [&](long i) { return static_cast<Vertex>(n0 + n1 + i); };
  auto v3 = [&](long i) { return static_cast<Vertex>(n0 + n1 + n2 + i); };

  std::vector<std::vector<Vertex>> adj(n + 1);
  for (long i = 1; i <= n0; ++i) adj[v0(i)].reserve(n1);
  for (long i = 1; i <= n1; ++i) adj[v1(i)].reserve(n0 + 1);
  for (long i = 1; i <= n2; ++i) adj[v2(i)].reserve(k + 1);
  for (long i = 1; i <= n3; ++i) adj[v3(i)].reserve(1);

  for (long i = 1; i <= n0; ++i)
    for (long j = 1; j <= n1; ++j) {
      adj[v0(i)].push_back(v1(j));
      adj[v1(j)].push_back(v0(i));
    }
  for (long c = 1; c <= n2; ++c) {
    for (long l = (c - 1) * k + 1; l <= c * k; ++l) {
      adj[v2(c)].push_back(v1(l));
      adj[v1(l)].push_back(v2(c));
    }
    adj[v2(c)].push_back(v3(c));
    adj[v3(c)].push_back(v2(c));
  }

  std::map<std::string, std::vector<Vertex>> groups;
  for (long i = 1; i <= n0; ++i) groups["V0"].push_back(v0(i));
  for (long i = 1; i <= n1; ++i) groups["V1"].push_back(v1(i));
  for (long i = 1; i <= n2; ++i) groups["V2"].push_back(v2(i));
  for (long i = 1; i <= n3; ++i) groups["V3"].push_back(v3(i));
  return {Graph(false, static_cast<Vertex>(n), std::move(adj)), std::move(groups),
          Family::undir_suppressor, {}, {}};
}

LabeledGraph make_random_connected(long n, const Rational& p, std::uint64_t seed) {
  if (p <= 0 || p > 1) throw std::invalid_argument("random_connected: need 0 < p <= 1");
  double pd = to_double(p);
  SplitMix64 rng(SplitMix64::mix(seed ^ 0x6d6f72616e ^ 0xc0ffee));
  constexpr int kMaxResamples = 1000;
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    std::vector<std::vector<Vertex>> adj(n + 1);
    for (long v = 1; v <= n; ++v)
      for (long w = v + 1; w <= n; ++w)
        if (rng.next_unit() < pd) {
          adj[v].push_back(static_cast<Vertex>(w));
          adj[w].push_back(static_cast<Vertex>(v));
        }
    Graph g(false, static_cast<Vertex>(n), std::move(adj));
    if (is_connected(g))
      return {std::move(g), {}, Family::random_connected, {}, seed};
  }
  throw std::runtime_error("random_connected: no connected sample in 1000 resamples");
}

}  // namespace

LabeledGraph generate(Family family, const FamilyParams& params,
                      std::optional<std::uint64_t> seed) {
  LabeledGraph out = [&] {
    switch (family) {
      case Family::complete: return make_complete(require(params.n, "n", 1));
      case Family::cycle: return make_cycle(require(params.n, "n", 3));
      case Family::star: return make_star(require(params.k, "k", 1));
      case Family::double_star: return make_double_star(require(params.k, "k", 1));
      case Family::dir_suppressor:
        return make_dir_suppressor(require(params.k, "k", 2), require(params.a, "a", 1));
      case Family::undir_suppressor:
        return make_undir_suppressor(require(params.a, "a", 1), require(params.k, "k", 1));
      case Family::random_connected: {
        if (!params.p) throw std::invalid_argument("random_connected: missing p");
        if (!seed) throw std::invalid_argument("random_connected: missing seed");
        return make_random_connected(require(params.n, "n", 2), *params.p, *seed);
      }
    }
    throw std::invalid_argument("unknown family");
  }();
  out.family = family;
  out.params = params;
  if (seed) out.seed = seed;
  return out;
}

SigmaWeights::SigmaWeights(const LabeledGraph& h, const Rational& r) {
  if (h.family != Family::undir_suppressor)
    throw std::invalid_argument("sigma weights: graph is not an undir_suppressor instance");
  if (r <= 1) throw std::invalid_argument("sigma weights: need r > 1");
  long a = *h.params.a, k = *h.params.k;
  Rational aa(a), kk(k);
  Rational a2k = aa * aa * kk;
  if (a2k == 1) throw std::invalid_argument("sigma weights: undefined for a^2*k = 1");
  class_value_[0] = r * (aa * kk + 1) / (kk * (a2k - 1));
  class_value_[1] = 1;
  class_value_[2] = 2 * r + kk * aa * r * r / (a2k - 1);
  class_value_[3] = kk;
  class_of_.assign(h.graph.n() + 1, 0);
  for (int cls = 0; cls < 4; ++cls)
    for (Vertex v : h.group("V" + std::to_string(cls))) class_of_[v] = static_cast<std::uint8_t>(cls);
}

Rational sigma_potential(const SigmaWeights& w, const MutantSet& S) {
  Rational total = 0;
  for (Vertex v : S) total += w.sigma(v);
  return total;
}

Rational sigma_potential(const LabeledGraph& h, const Rational& r, const MutantSet& S) {
  for (Vertex v : S)
    if (v < 1 || v > h.graph.n())
      throw std::invalid_argument("sigma potential: vertex id outside graph");
  SigmaWeights w(h, r);
  return sigma_potential(w, S);
}

std::string format_groups(const LabeledGraph& lg) {
  std::ostringstream out;
  for (const auto& [name, ids] : lg.groups) {
    out << name << ":";
    for (Vertex v : ids) out << " " << v;
    out << "\n";
  }
  return out.str();
}

std::map<std::string, std::vector<Vertex>> parse_groups(const std::string& text) {
  std::map<std::string, std::vector<Vertex>> groups;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("group file: missing ':' in line " + line);
    std::string name = line.substr(0, colon);
    std::istringstream rest(line.substr(colon + 1));
    std::vector<Vertex> ids;
    long long v;
    while (rest >> v) ids.push_back(static_cast<Vertex>(v));
    groups[name] = std::move(ids);
  }
  return groups;
}

}  // namespace moran
