#ifndef MORAN_GRAPH_HPP
#define MORAN_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "moran/rational.hpp"

namespace moran {

using Vertex = std::uint32_t;  // ids are 1..n at every interface

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Augmented adjacency-list graph: n, m, max degree and per-vertex degrees are
// carried alongside the lists. Immutable after construction; safe to share
// read-only across workers. Neighbor order is preserved as given. For
// directed graphs the lists are out-neighbors and degree means out-degree.
class Graph {
 public:
  Graph(bool directed, Vertex n, std::vector<std::vector<Vertex>> adjacency);

  bool directed() const { return directed_; }
  Vertex n() const { return n_; }
  std::uint64_t m() const { return m_; }
  Vertex max_degree() const { return max_degree_; }
  Vertex degree(Vertex v) const { return static_cast<Vertex>(adjacency_[v].size()); }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }

  bool operator==(const Graph& other) const = default;

 private:
  bool directed_;
  Vertex n_;
  std::uint64_t m_;
  Vertex max_degree_;
  std::vector<std::vector<Vertex>> adjacency_;  // slot 0 unused
};

// A set of vertex ids: sorted, unique, within 1..n of whatever graph it is
// used against. The state of a Moran process.
class MutantSet {
 public:
  MutantSet() = default;
  explicit MutantSet(std::vector<Vertex> members);

  static MutantSet single(Vertex v) { return MutantSet({v}); }
  static MutantSet full(Vertex n);
  static MutantSet from_mask(std::uint64_t mask, Vertex n);

  std::size_t count() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(Vertex v) const;
  const std::vector<Vertex>& members() const { return members_; }
  std::uint64_t to_mask(Vertex n) const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool operator==(const MutantSet&) const = default;
  auto operator<=>(const MutantSet&) const = default;

 private:
  std::vector<Vertex> members_;
};

struct ValidationReport {
  bool connected = false;
  bool strongly_connected = false;  // meaningful only when directed
  bool has_strong = false;
  std::vector<std::string> invariant_violations;
  bool ok() const { return invariant_violations.empty(); }
};

// Interfaces of the bit-exact text format:
//   moran-graph v1
//   directed <0|1>
//   <n> <m> <delta>
//   <v>: <d_v> <neighbor> ...   (v = 1..n in order)
Graph load_graph(std::istream& in);
Graph load_graph_string(const std::string& text);
void save_graph(const Graph& g, std::ostream& out);
std::string save_graph_string(const Graph& g);

// Report-only: connectivity (search from vertex 1, forward+reverse when
// directed) plus every structural invariant re-checked from the raw lists.
ValidationReport validate(const Graph& g);

bool is_connected(const Graph& g);           // undirected sense / forward from 1
bool is_strongly_connected(const Graph& g);  // directed graphs only

// Exact (sum of degrees)/n; equals 2m/n on undirected graphs.
Rational average_degree(const Graph& g);

// Reverse adjacency (in-neighbors) of a directed graph.
std::vector<std::vector<Vertex>> reverse_adjacency(const Graph& g);

}  // namespace moran

#endif
