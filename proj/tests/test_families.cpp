#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "moran/families.hpp"
#include "moran/graph.hpp"

using namespace moran;

namespace {

LabeledGraph make(Family f, long n, long k, long a) {
  FamilyParams fp;
  if (n) fp.n = n;
  if (k) fp.k = k;
  if (a) fp.a = a;
  return generate(f, fp);
}

}  // namespace

TEST_CASE("double star layout") {
  auto lg = make(Family::double_star, 0, 2, 0);
  const Graph& g = lg.graph;
  CHECK(g.n() == 6);
  CHECK(g.m() == 5);
  std::multiset<Vertex> degrees;
  for (Vertex v = 1; v <= g.n(); ++v) degrees.insert(g.degree(v));
  CHECK(degrees == std::multiset<Vertex>{3, 3, 1, 1, 1, 1});
  CHECK(lg.group("x1") == std::vector<Vertex>{1});
  CHECK(lg.group("L1") == std::vector<Vertex>{3, 4});
  CHECK(lg.group("L2") == std::vector<Vertex>{5, 6});
  CHECK(validate(g).connected);
}

TEST_CASE("directed suppressor structure") {
  auto lg = make(Family::dir_suppressor, 0, 2, 4);
  const Graph& g = lg.graph;
  CHECK(g.n() == 10);
  // cycle gives ka+k arcs, the fans another ka, and the fan of I_k shares
  // the arc w_{ka} -> v_k with the cycle
  CHECK(g.m() == 2 * 2 * 4 + 2 - 1);
  CHECK(g.directed());
  CHECK(is_strongly_connected(g));
  CHECK(lg.group("I1") == std::vector<Vertex>{1, 2, 3, 4});
  CHECK(lg.group("I2") == std::vector<Vertex>{5, 6, 7, 8});
  CHECK(lg.group("v") == std::vector<Vertex>{9, 10});

  // X nesting: X_{i+1} proper subset of X_i, X_{k+1} empty
  long k = 2;
  for (long i = 1; i <= k; ++i) {
    auto xi = lg.group("X" + std::to_string(i));
    auto xj = lg.group("X" + std::to_string(i + 1));
    CHECK(xj.size() < xi.size());
    CHECK(std::includes(xi.begin(), xi.end(), xj.begin(), xj.end()));
  }
  CHECK(lg.group("X3").empty());
}

TEST_CASE("directed suppressor counts at other parameters") {
  for (auto [k, a] : std::vector<std::pair<long, long>>{{2, 1}, {3, 2}, {5, 3}}) {
    auto lg = make(Family::dir_suppressor, 0, k, a);
    CHECK(lg.graph.n() == static_cast<Vertex>(k * (a + 1)));
    CHECK(lg.graph.m() == static_cast<std::uint64_t>(2 * k * a + k - 1));
    CHECK(is_strongly_connected(lg.graph));
  }
}

TEST_CASE("undirected suppressor degenerate instance is the 4-path") {
  auto lg = make(Family::undir_suppressor, 0, 1, 1);
  const Graph& g = lg.graph;
  CHECK(g.n() == 4);
  CHECK(g.m() == 3);
  CHECK(g.degree(1) == 1);
  CHECK(g.degree(2) == 2);
  CHECK(g.degree(3) == 2);
  CHECK(g.degree(4) == 1);
  CHECK(lg.group("V0") == std::vector<Vertex>{1});
  CHECK(lg.group("V3") == std::vector<Vertex>{4});
}

TEST_CASE("undirected suppressor degree table") {
  long a = 2, k = 3;
  auto lg = make(Family::undir_suppressor, 0, k, a);
  const Graph& g = lg.graph;
  CHECK(g.n() == static_cast<Vertex>(a * k + a * a * k * k + 2 * a * a * k));
  CHECK(lg.group("V1").size() == static_cast<std::size_t>(a * a * k * k));
  for (Vertex v : lg.group("V0")) CHECK(g.degree(v) == static_cast<Vertex>(a * a * k * k));
  for (Vertex v : lg.group("V1")) CHECK(g.degree(v) == static_cast<Vertex>(a * k + 1));
  for (Vertex v : lg.group("V2")) CHECK(g.degree(v) == static_cast<Vertex>(k + 1));
  for (Vertex v : lg.group("V3")) CHECK(g.degree(v) == 1);
  auto rep = validate(g);
  CHECK(rep.connected);
  CHECK(rep.invariant_violations.empty());
}

TEST_CASE("sigma weights and potential") {
  auto lg = make(Family::undir_suppressor, 0, 28, 5);
  Rational r = 2;
  CHECK(sigma_potential(lg, r, MutantSet{}) == 0);
  CHECK(sigma_potential(lg, r, MutantSet::single(lg.group("V3")[0])) == 28);
  CHECK(sigma_potential(lg, r, MutantSet::single(lg.group("V0")[0])) == make_rational(282, 19572));
  // sums are additive over classes
  MutantSet mixed({lg.group("V1")[0], lg.group("V3")[2]});
  CHECK(sigma_potential(lg, r, mixed) == Rational(1) + Rational(28));
  CHECK_THROWS_AS(sigma_potential(lg, r, MutantSet::single(lg.graph.n() + 1)),
                  std::invalid_argument);
}

TEST_CASE("sigma weights reject the degenerate instance") {
  auto lg = make(Family::undir_suppressor, 0, 1, 1);
  CHECK_THROWS_AS(SigmaWeights(lg, Rational(2)), std::invalid_argument);
}

TEST_CASE("generation is deterministic") {
  FamilyParams fp;
  fp.n = 12;
  fp.p = make_rational(1, 3);
  auto one = generate(Family::random_connected, fp, 42);
  auto two = generate(Family::random_connected, fp, 42);
  CHECK(save_graph_string(one.graph) == save_graph_string(two.graph));
  CHECK(validate(one.graph).connected);
  auto three = generate(Family::random_connected, fp, 43);
  CHECK(save_graph_string(three.graph) != save_graph_string(one.graph));
}

TEST_CASE("family parameter validation") {
  FamilyParams none;
  CHECK_THROWS_AS(generate(Family::double_star, none), std::invalid_argument);
  FamilyParams bad;
  bad.k = 1;  // dir_suppressor needs k >= 2
  bad.a = 1;
  CHECK_THROWS_AS(generate(Family::dir_suppressor, bad), std::invalid_argument);
  FamilyParams p_bad;
  p_bad.n = 5;
  p_bad.p = make_rational(3, 2);
  CHECK_THROWS_AS(generate(Family::random_connected, p_bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate(Family::random_connected, p_bad), std::invalid_argument);  // no seed
}

TEST_CASE("every family validates connected") {
  std::vector<LabeledGraph> zoo;
  zoo.push_back(make(Family::complete, 5, 0, 0));
  zoo.push_back(make(Family::cycle, 6, 0, 0));
  zoo.push_back(make(Family::star, 0, 3, 0));
  zoo.push_back(make(Family::double_star, 0, 3, 0));
  zoo.push_back(make(Family::undir_suppressor, 0, 2, 2));
  for (const auto& lg : zoo) {
    auto rep = validate(lg.graph);
    CHECK(rep.connected);
    CHECK(rep.invariant_violations.empty());
  }
  auto dir = make(Family::dir_suppressor, 0, 3, 2);
  auto rep = validate(dir.graph);
  CHECK(rep.strongly_connected);
  CHECK(rep.invariant_violations.empty());
}

TEST_CASE("group sidecar round-trip") {
  auto lg = make(Family::double_star, 0, 3, 0);
  auto parsed = parse_groups(format_groups(lg));
  CHECK(parsed == lg.groups);
}
