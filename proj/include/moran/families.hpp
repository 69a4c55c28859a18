#ifndef MORAN_FAMILIES_HPP
#define MORAN_FAMILIES_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moran/graph.hpp"
#include "moran/rational.hpp"

namespace moran {

enum class Family {
  complete,
  cycle,
  star,
  double_star,
  dir_suppressor,
  undir_suppressor,
  random_connected,
};

Family family_from_name(const std::string& name);
std::string family_name(Family f);

struct FamilyParams {
  std::optional<long> n;
  std::optional<long> k;
  std::optional<long> a;
  std::optional<Rational> p;  // edge probability for random_connected
};

// A graph plus the construction's named vertex groups, so tests and the CLI
// can address subsets like L1 or X_15 directly. Vertex numbering per family
// is fixed:
//   double_star(k):      x1=1, x2=2, L1=3..k+2, L2=k+3..2k+2
//   dir_suppressor(k,a): w_j=j for j=1..ka, v_i=ka+i for i=1..k
//   undir_suppressor(a,k): V0=1..ak, V1 next a^2k^2, V2 next a^2k, V3 next a^2k;
//                          star j has center V2[j] and leaves V1[(j-1)k+1..jk],
//                          V3[j] matched to V2[j]
struct LabeledGraph {
  Graph graph;
  std::map<std::string, std::vector<Vertex>> groups;
  Family family;
  FamilyParams params;
  std::optional<std::uint64_t> seed;

  const std::vector<Vertex>& group(const std::string& name) const;
};

LabeledGraph generate(Family family, const FamilyParams& params,
                      std::optional<std::uint64_t> seed = std::nullopt);

// Exact per-class sigma weights of an undir_suppressor instance:
//   sigma_0 = r(ak+1)/(k(a^2k-1)), sigma_1 = 1,
//   sigma_2 = 2r + kar^2/(a^2k-1), sigma_3 = k.
// Undefined when a^2k = 1 (the degenerate path instance).
class SigmaWeights {
 public:
  SigmaWeights(const LabeledGraph& h, const Rational& r);

  const Rational& class_value(int cls) const { return class_value_[cls]; }
  int class_of(Vertex v) const { return class_of_[v]; }
  const Rational& sigma(Vertex v) const { return class_value_[class_of_[v]]; }

 private:
  std::array<Rational, 4> class_value_;
  std::vector<std::uint8_t> class_of_;  // slot 0 unused
};

// sigma(S) = sum of sigma(v) over v in S, exact.
Rational sigma_potential(const LabeledGraph& h, const Rational& r, const MutantSet& S);
Rational sigma_potential(const SigmaWeights& w, const MutantSet& S);

// Sidecar format: one line per group, "<name>: <id> <id> ...".
std::string format_groups(const LabeledGraph& lg);
std::map<std::string, std::vector<Vertex>> parse_groups(const std::string& text);

}  // namespace moran

#endif
