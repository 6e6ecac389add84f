#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "wickgraph/multigraph.hpp"

using namespace wickgraph;

namespace {

Multigraph random_graph(std::mt19937& gen, int n, int max_mult = 2) {
  std::uniform_int_distribution<int> mult(0, max_mult);
  Multigraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g.set_multiplicity(i, j, mult(gen));
  return g;
}

}  // namespace

TEST_CASE("degrees: loops count twice") {
  Multigraph loop(1);
  loop.set_multiplicity(0, 0, 1);
  CHECK(loop.degree(0) == 2);

  Multigraph edge(2);
  edge.set_multiplicity(0, 1, 1);
  CHECK(edge.degree(0) == 1);
  CHECK(edge.degree(1) == 1);

  Multigraph triangle(3);
  triangle.set_multiplicity(0, 1, 1);
  triangle.set_multiplicity(1, 2, 1);
  triangle.set_multiplicity(0, 2, 1);
  for (int j = 0; j < 3; ++j) CHECK(triangle.degree(j) == 2);

  CHECK_THROWS_AS(edge.degree(2), ValidationError);
}

TEST_CASE("graph sum") {
  // loop at v + loop at w equals the two-loops graph
  Multigraph d1(2), d2(2);
  d1.set_multiplicity(0, 0, 1);
  d2.set_multiplicity(1, 1, 1);
  Multigraph b2(2);
  b2.set_multiplicity(0, 0, 1);
  b2.set_multiplicity(1, 1, 1);
  CHECK(d1 + d2 == b2);

  // sum with the zero graph is the identity
  const Multigraph zero(2);
  CHECK(d1 + zero == d1);

  // single edge + single edge = double edge
  Multigraph a(2);
  a.set_multiplicity(0, 1, 1);
  Multigraph b1(2);
  b1.set_multiplicity(0, 1, 2);
  CHECK(a + a == b1);

  CHECK_THROWS_AS(Multigraph(2) + Multigraph(3), ValidationError);
}

TEST_CASE("degree additivity under graph sum") {
  std::mt19937 gen(7);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 5);
    const auto g1 = random_graph(gen, n);
    const auto g2 = random_graph(gen, n);
    const auto s = g1 + g2;
    for (int j = 0; j < n; ++j) CHECK(s.degree(j) == g1.degree(j) + g2.degree(j));
  }
}

TEST_CASE("degree sum equals twice the edge multiplicity") {
  std::mt19937 gen(8);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 6);
    const auto g = random_graph(gen, n);
    int degsum = 0;
    for (int j = 0; j < n; ++j) degsum += g.degree(j);
    CHECK(degsum == 2 * g.total_edge_multiplicity());
  }
}

TEST_CASE("connected components") {
  // two loops -> two components
  Multigraph b2(2);
  b2.set_multiplicity(0, 0, 1);
  b2.set_multiplicity(1, 1, 1);
  CHECK(components(b2).blocks.size() == 2);

  // double edge -> one component
  Multigraph b1(2);
  b1.set_multiplicity(0, 1, 2);
  CHECK(components(b1).blocks.size() == 1);

  // zero graph on 3 vertices -> 3 singletons
  const auto dec = components(Multigraph(3));
  REQUIRE(dec.blocks.size() == 3);
  for (const auto& b : dec.blocks) {
    CHECK(b.vertices.size() == 1);
    CHECK(b.graph.total_edge_multiplicity() == 0);
  }
}

TEST_CASE("components are edge-closed and idempotent") {
  std::mt19937 gen(9);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 6);
    const auto g = random_graph(gen, n, 1);
    const auto dec = components(g);
    // blocks partition the vertex set
    std::set<int> seen;
    for (const auto& b : dec.blocks)
      for (int v : b.vertices) CHECK(seen.insert(v).second);
    CHECK(static_cast<int>(seen.size()) == n);
    // no edge crosses blocks, and edge totals add up
    int block_edges = 0;
    for (const auto& b : dec.blocks) {
      block_edges += b.graph.total_edge_multiplicity();
      CHECK(components(b.graph).blocks.size() == 1);  // idempotent: each block connected
    }
    CHECK(block_edges == g.total_edge_multiplicity());
  }
}

TEST_CASE("enumeration: small-degree census") {
  CHECK(enumerate_multigraphs(3, {2, 2, 2}).size() == 5);
  CHECK(enumerate_multigraphs(2, {1, 1}).size() == 1);
  CHECK(enumerate_multigraphs(2, {2, 2}).size() == 2);
  CHECK(enumerate_multigraphs(2, {1, 2}).empty());  // odd total degree
}

TEST_CASE("enumeration output is exact, duplicate-free, lexicographic") {
  std::mt19937 gen(10);
  std::uniform_int_distribution<int> deg(0, 4);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 4);
    DegreeSpec d(static_cast<std::size_t>(n));
    for (auto& x : d) x = deg(gen);
    const auto graphs = enumerate_multigraphs(n, d);
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      CHECK(graphs[i].degree_sequence() == d);
      CHECK(seen.insert(graphs[i].upper_data()).second);
      if (i > 0) CHECK(graphs[i - 1].upper_data() < graphs[i].upper_data());
    }
    const int total = std::accumulate(d.begin(), d.end(), 0);
    if (total % 2 == 1) CHECK(graphs.empty());
    if (total % 2 == 0) CHECK(!graphs.empty());
  }
}

TEST_CASE("enumeration count is permutation invariant") {
  std::mt19937 gen(11);
  std::uniform_int_distribution<int> deg(0, 4);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2 + static_cast<int>(gen() % 3);
    DegreeSpec d(static_cast<std::size_t>(n));
    for (auto& x : d) x = deg(gen);
    const auto count = enumerate_multigraphs(n, d).size();
    DegreeSpec p(d);
    std::shuffle(p.begin(), p.end(), gen);
    CHECK(enumerate_multigraphs(n, p).size() == count);
  }
}

TEST_CASE("canonical keys identify isomorphic components") {
  // loop at v1 vs loop at v2, presented as 1-vertex components
  Multigraph l1(1);
  l1.set_multiplicity(0, 0, 1);
  CHECK(canonical_key(l1) == canonical_key(l1));

  // double edge vs two loops on 2 vertices: not isomorphic
  Multigraph dbl(2), loops(2);
  dbl.set_multiplicity(0, 1, 2);
  loops.set_multiplicity(0, 0, 1);
  loops.set_multiplicity(1, 1, 1);
  CHECK(canonical_key(dbl) != canonical_key(loops));

  // path 1-2-3 vs path 2-1-3: relabelings of each other
  Multigraph p1(3), p2(3);
  p1.set_multiplicity(0, 1, 1);
  p1.set_multiplicity(1, 2, 1);
  p2.set_multiplicity(0, 1, 1);
  p2.set_multiplicity(0, 2, 1);
  CHECK(canonical_key(p1) == canonical_key(p2));

  CHECK_THROWS_AS(canonical_key(Multigraph(9)), BudgetError);
}

TEST_CASE("canonical keys are relabeling invariant and round-trip") {
  std::mt19937 gen(12);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 5);
    const auto g = random_graph(gen, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    const auto key = canonical_key(g);
    CHECK(canonical_key(g.relabeled(perm)) == key);
    // decoding the key yields a graph in the same class
    CHECK(canonical_key(multigraph_from_canonical_key(key)) == key);
  }
}

TEST_CASE("serialization round trip and edge list text") {
  Multigraph g(3);
  g.set_multiplicity(0, 1, 2);
  g.set_multiplicity(2, 2, 1);
  CHECK(g.edge_list_string() == "1-2:2, 3-3:1");
  CHECK(Multigraph::from_upper_rows(g.upper_rows()) == g);
  CHECK(Multigraph(2).edge_list_string() == "-");

  CHECK_THROWS_AS(Multigraph::from_upper_rows({{0, 1}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(Multigraph::from_upper_rows({{0, -1}, {0, 0}}), ValidationError);
}
