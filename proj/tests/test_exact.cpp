#include <doctest.h>

#include <cmath>

#include "moran/exact.hpp"
#include "moran/families.hpp"
#include "moran/potential.hpp"
#include "moran/rng.hpp"

using namespace moran;

namespace {

Graph complete(long n) {
  FamilyParams fp;
  fp.n = n;
  return generate(Family::complete, fp).graph;
}

Graph cycle(long n) {
  FamilyParams fp;
  fp.n = n;
  return generate(Family::cycle, fp).graph;
}

Graph random_graph(long n, std::uint64_t seed, long p_num = 2, long p_den = 5) {
  FamilyParams fp;
  fp.n = n;
  fp.p = make_rational(p_num, p_den);
  return generate(Family::random_connected, fp, seed).graph;
}

double clique_fixation(double r, long n) {
  if (r == 1.0) return 1.0 / static_cast<double>(n);
  return (1.0 - 1.0 / r) / (1.0 - std::pow(r, static_cast<double>(-n)));
}

}  // namespace

TEST_CASE("transition distribution closed cases") {
  Graph k2 = complete(2);
  auto dist = transition_distribution(k2, Rational(2), MutantSet::single(1));
  CHECK(dist.size() == 2);
  CHECK(dist.at(MutantSet{}) == make_rational(1, 3));
  CHECK(dist.at(MutantSet::full(2)) == make_rational(2, 3));

  Graph c3 = cycle(3);
  auto d3 = transition_distribution(c3, Rational(3), MutantSet::single(1));
  CHECK(d3.at(MutantSet({1, 2})) == make_rational(3, 10));

  CHECK_THROWS_AS(transition_distribution(k2, Rational(2), MutantSet{}), std::invalid_argument);
  CHECK_THROWS_AS(transition_distribution(k2, Rational(2), MutantSet::full(2)),
                  std::invalid_argument);
}

TEST_CASE("transition probabilities sum to one exactly") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_graph(8, 2100 + trial);
    std::uint64_t mask = 1 + rng.next_below((1ULL << g.n()) - 2);
    MutantSet s = MutantSet::from_mask(mask, g.n());
    Rational r = make_rational(1 + static_cast<long>(rng.next_below(5)),
                               1 + static_cast<long>(rng.next_below(3)));
    auto dist = transition_distribution(g, r, s);
    Rational total = 0;
    for (const auto& [next, p] : dist) {
      total += p;
      CHECK(p > 0);
      // successors differ from S by at most one vertex
      long diff = static_cast<long>(next.count()) - static_cast<long>(s.count());
      CHECK(std::abs(diff) <= 1);
    }
    CHECK(total == 1);
  }
}

TEST_CASE("neutral drift on regular graphs balances growth and shrinkage") {
  Graph k5 = complete(5);
  auto dist = transition_distribution(k5, Rational(1), MutantSet::single(3));
  Rational grow = 0, shrink = 0;
  for (const auto& [next, p] : dist) {
    if (next.count() == 2) grow += p;
    if (next.count() == 0) shrink += p;
  }
  CHECK(grow == shrink);
}

TEST_CASE("clique fixation closed form") {
  for (long n = 2; n <= 5; ++n) {
    Graph g = complete(n);
    for (Rational r : {make_rational(1, 2), Rational(1), Rational(2), Rational(5)}) {
      double expect = clique_fixation(to_double(r), n);
      CHECK(fixation_probability_exact(g, r) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("neutral uniform fixation is 1/n") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Graph g = random_graph(7, 2300 + seed);
    CHECK(fixation_probability_exact(g, Rational(1)) ==
          doctest::Approx(1.0 / g.n()).epsilon(1e-10));
  }
}

TEST_CASE("rational solver agrees with closed forms exactly") {
  Graph k2 = complete(2);
  CHECK(fixation_probability_exact_rational(k2, Rational(2)) == make_rational(2, 3));
  // K_3 at r=2: (1 - 1/2) / (1 - 1/8) = 4/7
  Graph k3 = complete(3);
  CHECK(fixation_probability_exact_rational(k3, Rational(2)) == make_rational(4, 7));
  // against the float path on an irregular instance
  Graph g = random_graph(6, 77);
  Rational exact = fixation_probability_exact_rational(g, make_rational(3, 2));
  CHECK(fixation_probability_exact(g, make_rational(3, 2)) ==
        doctest::Approx(to_double(exact)).epsilon(1e-12));
}

TEST_CASE("gauss-seidel path agrees with the isothermal closed form") {
  // n = 13 is above the dense cutoff; cycles are regular, so the clique
  // formula applies
  Graph c13 = cycle(13);
  double got = fixation_probability_exact(c13, Rational(2));
  CHECK(got == doctest::Approx(clique_fixation(2.0, 13)).epsilon(1e-9));
  CHECK(last_exact_diagnostics().residual <= 1e-12);
}

TEST_CASE("absorption time closed cases") {
  Graph k2 = complete(2);
  for (Rational r : {make_rational(1, 2), Rational(1), Rational(3)}) {
    CHECK(absorption_time_exact(k2, r, MutantSet::single(1)) == doctest::Approx(1.0));
  }
  Graph c3 = cycle(3);
  double t1 = absorption_time_exact(c3, Rational(1), MutantSet::single(1));
  double t2 = absorption_time_exact(c3, Rational(1), MutantSet::single(2));
  double t3 = absorption_time_exact(c3, Rational(1), MutantSet::single(3));
  CHECK(t1 > 0);
  CHECK(t1 == doctest::Approx(t2).epsilon(1e-10));
  CHECK(t1 == doctest::Approx(t3).epsilon(1e-10));
}

TEST_CASE("solver rejects bad inputs") {
  Graph disjoint(false, 4, {{}, {2}, {1}, {4}, {3}});
  CHECK_THROWS_AS(fixation_vector_exact(disjoint, Rational(2)), std::invalid_argument);
  Graph dpath(true, 3, {{}, {2}, {3}, {}});
  CHECK_THROWS_AS(fixation_vector_exact(dpath, Rational(2)), std::invalid_argument);
  CHECK_THROWS_AS(absorption_time_vector_exact(dpath, Rational(2)), std::invalid_argument);
}

TEST_CASE("one-step phi drift identity") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = random_graph(9, 2500 + trial);
    std::uint64_t mask = 1 + rng.next_below((1ULL << g.n()) - 2);
    MutantSet s = MutantSet::from_mask(mask, g.n());
    Rational r = make_rational(1 + static_cast<long>(rng.next_below(6)),
                               1 + static_cast<long>(rng.next_below(4)));
    auto change = one_step_expected_change(g, r, s, PotentialKind::phi);
    Rational w = Rational(g.n()) + (r - 1) * Rational(static_cast<long>(s.count()));
    CHECK(change.exact == (r - 1) / w * boundary_drift(g, s));
  }
  Graph k3 = complete(3);
  CHECK(one_step_expected_change(k3, Rational(1), MutantSet::single(1), PotentialKind::phi).exact ==
        0);
}

TEST_CASE("one-step expectations agree with full-state enumeration") {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 12; ++trial) {
    Graph g = random_graph(7, 2700 + trial);
    std::uint64_t mask = 1 + rng.next_below((1ULL << g.n()) - 2);
    MutantSet s = MutantSet::from_mask(mask, g.n());
    Rational r = make_rational(5, 2);

    std::vector<Rational> raw(g.n() + 1, Rational(0));
    for (Vertex v = 1; v <= g.n(); ++v)
      raw[v] = make_rational(static_cast<long>(rng.next_below(4)), 1 + (v % 3));
    if (WeightFunction(g, raw).everywhere_zero()) raw[1] = 1;
    WeightFunction f(g, raw);

    auto dist = transition_distribution(g, r, s);
    Rational brute = 0;
    for (const auto& [next, p] : dist) brute += p * phi_weighted(g, f, next);
    brute -= phi_weighted(g, f, s);

    auto change = one_step_expected_change(g, r, s, PotentialKind::phi_weighted, &f);
    CHECK(change.exact == brute);
  }
}

TEST_CASE("one-step sigma expectation matches enumeration") {
  FamilyParams fp;
  fp.a = 2;
  fp.k = 3;
  auto lg = generate(Family::undir_suppressor, fp);
  Rational r = 2;
  SigmaWeights weights(lg, r);
  SplitMix64 rng(15);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<Vertex> vs;
    vs.push_back(lg.group("V0")[rng.next_below(lg.group("V0").size())]);
    vs.push_back(lg.group("V1")[rng.next_below(lg.group("V1").size())]);
    if (trial % 2) vs.push_back(lg.group("V2")[rng.next_below(lg.group("V2").size())]);
    MutantSet s(std::move(vs));
    auto dist = transition_distribution(lg.graph, r, s);
    Rational brute = 0;
    for (const auto& [next, p] : dist) brute += p * sigma_potential(weights, next);
    brute -= sigma_potential(weights, s);
    auto change =
        one_step_expected_change(lg.graph, r, s, PotentialKind::sigma, nullptr, &weights);
    CHECK(change.exact == brute);
  }
}

TEST_CASE("one-step psi expectation matches enumeration") {
  SplitMix64 rng(16);
  Graph g = random_graph(7, 3100);
  ProcessConstants consts(Rational(2));
  WeightFunction f = WeightFunction::ones(g);
  for (int trial = 0; trial < 6; ++trial) {
    std::uint64_t mask = 1 + rng.next_below((1ULL << g.n()) - 2);
    MutantSet s = MutantSet::from_mask(mask, g.n());
    auto dist = transition_distribution(g, Rational(2), s);
    double brute = -psi_weighted(g, consts, f, s);
    for (const auto& [next, p] : dist) brute += to_double(p) * psi_weighted(g, consts, f, next);
    auto change =
        one_step_expected_change(g, Rational(2), s, PotentialKind::psi_weighted, &f, nullptr,
                                 &consts);
    CHECK(change.value == doctest::Approx(brute).epsilon(1e-10));
  }
}

TEST_CASE("valid weights are submartingales") {
  SplitMix64 rng(17);
  int hits = 0;
  for (int trial = 0; trial < 60 && hits < 15; ++trial) {
    Graph g = random_graph(8, 3300 + trial);
    ProcessConstants consts(Rational(2));
    std::vector<Rational> raw(g.n() + 1, Rational(0));
    for (Vertex v = 1; v <= g.n(); ++v)
      raw[v] = make_rational(static_cast<long>(rng.next_below(3)) + (v % 2), 1);
    WeightFunction f(g, raw);
    if (f.everywhere_zero()) continue;
    std::uint64_t mask = 1 + rng.next_below((1ULL << g.n()) - 2);
    MutantSet x = MutantSet::from_mask(mask, g.n());
    if (!is_valid_for(g, consts, f, x).valid) continue;
    ++hits;
    auto phif = one_step_expected_change(g, Rational(2), x, PotentialKind::phi_weighted, &f);
    CHECK(phif.exact >= 0);
    auto psif = one_step_expected_change(g, Rational(2), x, PotentialKind::psi_weighted, &f,
                                         nullptr, &consts);
    CHECK(psif.value <= 1e-9);
  }
  CHECK(hits > 0);
}

TEST_CASE("active spawner distribution") {
  Graph k2 = complete(2);
  auto dist = active_spawner_distribution(k2, Rational(2), MutantSet::single(1));
  CHECK(dist.at(1) == make_rational(2, 3));
  CHECK(dist.at(2) == make_rational(1, 3));

  // on a clique the mutant:non-mutant mass ratio per class is r
  Graph k5 = complete(5);
  auto d5 = active_spawner_distribution(k5, Rational(3), MutantSet({1, 2}));
  Rational mutant_mass = d5.at(1) + d5.at(2);
  Rational other_mass = d5.at(3) + d5.at(4) + d5.at(5);
  CHECK(mutant_mass == Rational(3) * other_mass);

  // vertices with no boundary edge carry no mass
  FamilyParams d3;
  d3.k = 3;
  Graph g = generate(Family::double_star, d3).graph;
  std::vector<Vertex> star1{1, 3, 4, 5};
  auto dd = active_spawner_distribution(g, Rational(2), MutantSet(star1));
  CHECK(dd.count(3) == 0);  // interior leaf
  Rational total = 0;
  for (const auto& [v, p] : dd) total += p;
  CHECK(total == 1);
}

TEST_CASE("one-step expectation context errors") {
  Graph k3 = complete(3);
  MutantSet s = MutantSet::single(1);
  CHECK_THROWS_AS(one_step_expected_change(k3, Rational(2), s, PotentialKind::phi_weighted),
                  std::invalid_argument);
  CHECK_THROWS_AS(one_step_expected_change(k3, Rational(2), s, PotentialKind::sigma),
                  std::invalid_argument);
  WeightFunction f = WeightFunction::ones(k3);
  CHECK_THROWS_AS(one_step_expected_change(k3, Rational(2), s, PotentialKind::psi_weighted, &f),
                  std::invalid_argument);
  Graph dir(true, 3, {{}, {2}, {3}, {1}});
  CHECK_THROWS_AS(one_step_expected_change(dir, Rational(2), s, PotentialKind::phi),
                  std::invalid_argument);
}

TEST_CASE("rationalize recovers small fractions") {
  CHECK(rationalize(0.5) == make_rational(1, 2));
  CHECK(rationalize(2.0 / 3.0) == make_rational(2, 3));
  CHECK(rationalize(0.125) == make_rational(1, 8));
  CHECK(rationalize(-1.25) == make_rational(-5, 4));
  Rational pi = rationalize(3.14159265358979, 1000000);
  CHECK(pi.get_den() <= 1000000);
  CHECK(std::abs(to_double(pi) - 3.14159265358979) < 1e-11);
}

TEST_CASE("single-vertex graphs load but the process layer rejects them") {
  Graph g = load_graph_string("moran-graph v1\ndirected 0\n1 0 0\n1: 0\n");
  CHECK(g.n() == 1);
  CHECK(g.m() == 0);
  CHECK_THROWS_AS(fixation_vector_exact(g, Rational(2)), std::invalid_argument);
  CHECK_THROWS_AS(phi(g, MutantSet::single(1)), std::invalid_argument);
}

TEST_CASE("fixation is monotone in r") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Graph g = random_graph(7, 3500 + seed);
    double prev = -1.0;
    for (Rational r :
         {make_rational(1, 2), Rational(1), make_rational(3, 2), Rational(2), Rational(3)}) {
      double f = fixation_probability_exact(g, r);
      CHECK(f >= prev - 1e-10);
      prev = f;
    }
  }
}

TEST_CASE("potential lower bound on fixation") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Graph g = random_graph(6, 3700 + seed);
    Rational r(2);
    auto h = fixation_vector_exact(g, r);
    double delta = 1e9;
    for (Vertex v = 1; v <= g.n(); ++v) delta = std::min<double>(delta, g.degree(v));
    double denom = 1.0 - std::pow(2.0, -to_double(phi_total(g)) * delta);
    std::uint64_t full = (1ULL << g.n()) - 1;
    for (std::uint64_t mask = 1; mask <= full; ++mask) {
      double bound =
          (1.0 - std::pow(2.0, -to_double(phi(g, MutantSet::from_mask(mask, g.n()))) * delta)) /
          denom;
      CHECK(h[mask] >= bound - 1e-9);
    }
  }
}
