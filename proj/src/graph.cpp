#include "moran/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace moran {

Graph::Graph(bool directed, Vertex n, std::vector<std::vector<Vertex>> adjacency)
    : directed_(directed), n_(n), adjacency_(std::move(adjacency)) {
  if (n_ < 1) throw ConsistencyError("graph: need at least one vertex");
  if (adjacency_.size() != static_cast<std::size_t>(n_) + 1)
    throw ConsistencyError("graph: adjacency size mismatch");
  std::uint64_t degree_sum = 0;
  Vertex max_deg = 0;
  for (Vertex v = 1; v <= n_; ++v) {
    for (Vertex w : adjacency_[v]) {
      if (w < 1 || w > n_) throw ConsistencyError("graph: neighbor id out of range");
      if (w == v) throw ConsistencyError("graph: self-loop at vertex " + std::to_string(v));
    }
    degree_sum += adjacency_[v].size();
    max_deg = std::max<Vertex>(max_deg, static_cast<Vertex>(adjacency_[v].size()));
  }
  m_ = directed_ ? degree_sum : degree_sum / 2;
  if (!directed_ && degree_sum % 2 != 0)
    throw ConsistencyError("graph: odd degree sum on undirected graph");
  max_degree_ = max_deg;
}

MutantSet::MutantSet(std::vector<Vertex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

MutantSet MutantSet::full(Vertex n) {
  std::vector<Vertex> all(n);
  for (Vertex v = 1; v <= n; ++v) all[v - 1] = v;
  MutantSet s;
  s.members_ = std::move(all);
  return s;
}

MutantSet MutantSet::from_mask(std::uint64_t mask, Vertex n) {
  std::vector<Vertex> vs;
  for (Vertex v = 1; v <= n; ++v)
    if (mask >> (v - 1) & 1) vs.push_back(v);
  MutantSet s;
  s.members_ = std::move(vs);
  return s;
}

bool MutantSet::contains(Vertex v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

std::uint64_t MutantSet::to_mask(Vertex n) const {
  if (n > 64) throw std::invalid_argument("mutant set: mask needs n <= 64");
  std::uint64_t mask = 0;
  for (Vertex v : members_) mask |= 1ULL << (v - 1);
  return mask;
}

namespace {

std::string read_line(std::istream& in, int line_no) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("line " + std::to_string(line_no) + ": unexpected end of input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Graph load_graph(std::istream& in) {
  if (read_line(in, 1) != "moran-graph v1") throw ParseError("line 1: bad magic");

  std::istringstream l2(read_line(in, 2));
  std::string word;
  int directed_flag = -1;
  if (!(l2 >> word >> directed_flag) || word != "directed" ||
      (directed_flag != 0 && directed_flag != 1))
    throw ParseError("line 2: expected 'directed <0|1>'");
  bool directed = directed_flag == 1;

  std::istringstream l3(read_line(in, 3));
  long long n = 0, m = 0, delta = 0;
  if (!(l3 >> n >> m >> delta) || n < 1 || m < 0 || delta < 0)
    throw ParseError("line 3: expected '<n> <m> <delta>'");

  std::vector<std::vector<Vertex>> adjacency(static_cast<std::size_t>(n) + 1);
  for (long long i = 1; i <= n; ++i) {
    int line_no = static_cast<int>(i) + 3;
    std::istringstream row(read_line(in, line_no));
    std::string vertex_tag;
    long long declared_degree = 0;
    if (!(row >> vertex_tag >> declared_degree) || vertex_tag.empty() || vertex_tag.back() != ':')
      throw ParseError("line " + std::to_string(line_no) + ": expected '<v>: <d_v> <neighbors>'");
    long long v = 0;
    try {
      v = std::stoll(vertex_tag.substr(0, vertex_tag.size() - 1));
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": bad vertex id");
    }
    if (v != i)
      throw ConsistencyError("line " + std::to_string(line_no) + ": vertex ids must run 1..n in order");
    if (declared_degree < 0)
      throw ParseError("line " + std::to_string(line_no) + ": negative degree");
    std::vector<Vertex> nbrs;
    nbrs.reserve(static_cast<std::size_t>(declared_degree));
    long long w = 0;
    while (row >> w) {
      if (w < 1 || w > n)
        throw ConsistencyError("line " + std::to_string(line_no) + ": neighbor out of range");
      if (w == v) throw ConsistencyError("line " + std::to_string(line_no) + ": self-loop");
      nbrs.push_back(static_cast<Vertex>(w));
    }
    if (!row.eof()) throw ParseError("line " + std::to_string(line_no) + ": trailing garbage");
    if (static_cast<long long>(nbrs.size()) != declared_degree)
      throw ConsistencyError("line " + std::to_string(line_no) + ": declared degree " +
                             std::to_string(declared_degree) + " but " +
                             std::to_string(nbrs.size()) + " neighbors listed");
    auto sorted = nbrs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConsistencyError("line " + std::to_string(line_no) + ": duplicate neighbor");
    adjacency[static_cast<std::size_t>(i)] = std::move(nbrs);
  }

  Graph g(directed, static_cast<Vertex>(n), std::move(adjacency));
  if (static_cast<long long>(g.m()) != m)
    throw ConsistencyError("header: declared m=" + std::to_string(m) + " but lists give " +
                           std::to_string(g.m()));
  if (static_cast<long long>(g.max_degree()) != delta)
    throw ConsistencyError("header: declared delta=" + std::to_string(delta) + " but lists give " +
                           std::to_string(g.max_degree()));
  if (!directed) {
    for (Vertex v = 1; v <= g.n(); ++v)
      for (Vertex w : g.neighbors(v)) {
        auto back = g.neighbors(w);
        if (std::find(back.begin(), back.end(), v) == back.end())
          throw ConsistencyError("edge " + std::to_string(v) + "-" + std::to_string(w) +
                                 " is asymmetric in an undirected graph");
      }
  }
  return g;
}

Graph load_graph_string(const std::string& text) {
  std::istringstream in(text);
  return load_graph(in);
}

void save_graph(const Graph& g, std::ostream& out) {
  out << "moran-graph v1\n";
  out << "directed " << (g.directed() ? 1 : 0) << "\n";
  out << g.n() << " " << g.m() << " " << g.max_degree() << "\n";
  for (Vertex v = 1; v <= g.n(); ++v) {
    out << v << ": " << g.degree(v);
    for (Vertex w : g.neighbors(v)) out << " " << w;
    out << "\n";
  }
}

std::string save_graph_string(const Graph& g) {
  std::ostringstream out;
  save_graph(g, out);
  return out.str();
}

namespace {

std::size_t reachable_count(Vertex n, Vertex start,
                            const std::vector<std::vector<Vertex>>& adj) {
  std::vector<std::uint8_t> seen(n + 1, 0);
  std::vector<Vertex> stack{start};
  seen[start] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count;
}

std::vector<std::vector<Vertex>> copy_adjacency(const Graph& g) {
  std::vector<std::vector<Vertex>> adj(g.n() + 1);
  for (Vertex v = 1; v <= g.n(); ++v) {
    auto nb = g.neighbors(v);
    adj[v].assign(nb.begin(), nb.end());
  }
  return adj;
}

}  // namespace

std::vector<std::vector<Vertex>> reverse_adjacency(const Graph& g) {
  std::vector<std::vector<Vertex>> rev(g.n() + 1);
  std::vector<std::uint32_t> in_degree(g.n() + 1, 0);
  for (Vertex v = 1; v <= g.n(); ++v)
    for (Vertex w : g.neighbors(v)) ++in_degree[w];
  for (Vertex v = 1; v <= g.n(); ++v) rev[v].reserve(in_degree[v]);
  for (Vertex v = 1; v <= g.n(); ++v)
    for (Vertex w : g.neighbors(v)) rev[w].push_back(v);
  return rev;
}

bool is_connected(const Graph& g) {
  if (g.n() == 1) return true;
  if (!g.directed()) return reachable_count(g.n(), 1, copy_adjacency(g)) == g.n();
  // weak connectivity is not interesting here; for directed graphs
  // "connected" means every vertex is reachable from vertex 1
  return reachable_count(g.n(), 1, copy_adjacency(g)) == g.n();
}

bool is_strongly_connected(const Graph& g) {
  if (!g.directed()) return is_connected(g);
  if (g.n() == 1) return true;
  auto fwd = copy_adjacency(g);
  if (reachable_count(g.n(), 1, fwd) != g.n()) return false;
  auto rev = reverse_adjacency(g);
  return reachable_count(g.n(), 1, rev) == g.n();
}

ValidationReport validate(const Graph& g) {
  ValidationReport report;
  std::uint64_t degree_sum = 0;
  Vertex max_deg = 0;
  for (Vertex v = 1; v <= g.n(); ++v) {
    auto nb = g.neighbors(v);
    degree_sum += nb.size();
    max_deg = std::max<Vertex>(max_deg, g.degree(v));
    std::vector<Vertex> sorted(nb.begin(), nb.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      report.invariant_violations.push_back("duplicate neighbor in list of vertex " +
                                            std::to_string(v));
    for (Vertex w : nb) {
      if (w == v) report.invariant_violations.push_back("self-loop at " + std::to_string(v));
      if (!g.directed()) {
        auto back = g.neighbors(w);
        if (std::find(back.begin(), back.end(), v) == back.end())
          report.invariant_violations.push_back("asymmetric edge " + std::to_string(v) + "-" +
                                                std::to_string(w));
      }
    }
  }
  std::uint64_t expected = g.directed() ? g.m() : 2 * g.m();
  if (degree_sum != expected)
    report.invariant_violations.push_back("degree sum does not match edge count");
  if (max_deg != g.max_degree())
    report.invariant_violations.push_back("cached max degree is wrong");
  report.connected = is_connected(g);
  if (g.directed()) {
    report.has_strong = true;
    report.strongly_connected = is_strongly_connected(g);
  }
  return report;
}

Rational average_degree(const Graph& g) {
  std::uint64_t degree_sum = g.directed() ? g.m() : 2 * g.m();
  Rational q(BigInt(static_cast<unsigned long>(degree_sum)), BigInt(g.n()));
  q.canonicalize();
  return q;
}

}  // namespace moran
