#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "wickgraph/factors.hpp"

using namespace wickgraph;

namespace {

Multigraph from_edges(int n, const std::vector<std::array<int, 3>>& edges) {
  Multigraph g(n);
  for (const auto& e : edges) g.set_multiplicity(e[0], e[1], e[2]);
  return g;
}

}  // namespace

TEST_CASE("matrix statistics") {
  const auto a = IntMatrix::from_rows({{2, 1}, {0, 3}});
  const auto s = factorial_stats(a);
  CHECK(s.total_sum == 6);
  CHECK(s.trace == 5);
  CHECK(s.factorial_product == 12);  // 2! * 1! * 0! * 3!
  CHECK(s.entry_product == 0);
  CHECK(s.row_sums[0] == 3);
  CHECK(s.column_sums[1] == 4);

  const auto z = factorial_stats(IntMatrix(2, 2, 0));
  CHECK(z.total_sum == 0);
  CHECK(z.factorial_product == 1);

  const auto one = factorial_stats(IntMatrix::from_rows({{1}}));
  CHECK(one.column_sums[0] == 1);
  CHECK(one.row_sums[0] == 1);
}

TEST_CASE("closed-form factors of the basic graphs") {
  // single loop: A=(2), C = 2!/(2^1 1!) = 1
  CHECK(c_graph(from_edges(1, {{0, 0, 1}})) == 1);
  // double edge: A=(2,2), C = (2! 2!)/(2^0 2!) = 2
  CHECK(c_graph(from_edges(2, {{0, 1, 2}})) == 2);
  // triangle: A=(2,2,2), C = 8
  CHECK(c_graph(from_edges(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}})) == 8);
  // three loops: C = 8/2^3 = 1
  CHECK(c_graph(from_edges(3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}})) == 1);
  // path on 3 vertices: degrees (1,2,1), C = 2
  CHECK(c_graph(from_edges(3, {{0, 1, 1}, {1, 2, 1}})) == 2);
  // single edge
  CHECK(c_graph(from_edges(2, {{0, 1, 1}})) == 1);
}

TEST_CASE("c_graph is invariant under vertex relabeling") {
  std::mt19937 gen(33);
  std::uniform_int_distribution<int> mult(0, 2);
  for (int rep = 0; rep < 80; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 5);
    Multigraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g.set_multiplicity(i, j, mult(gen));
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    CHECK(c_graph(g) == c_graph(g.relabeled(perm)));
  }
}

TEST_CASE("c_graph is multiplicative over disjoint unions") {
  std::mt19937 gen(34);
  std::uniform_int_distribution<int> mult(0, 2);
  for (int rep = 0; rep < 60; ++rep) {
    const int n1 = 1 + static_cast<int>(gen() % 3);
    const int n2 = 1 + static_cast<int>(gen() % 3);
    Multigraph g1(n1), g2(n2);
    for (int i = 0; i < n1; ++i)
      for (int j = i; j < n1; ++j) g1.set_multiplicity(i, j, mult(gen));
    for (int i = 0; i < n2; ++i)
      for (int j = i; j < n2; ++j) g2.set_multiplicity(i, j, mult(gen));
    Multigraph un(n1 + n2);
    for (int i = 0; i < n1; ++i)
      for (int j = i; j < n1; ++j) un.set_multiplicity(i, j, g1.multiplicity(i, j));
    for (int i = 0; i < n2; ++i)
      for (int j = i; j < n2; ++j)
        un.set_multiplicity(n1 + i, n1 + j, g2.multiplicity(i, j));
    CHECK(c_graph(un) == c_graph(g1) * c_graph(g2));
  }
}

TEST_CASE("c_general reduces to c_graph for l = 1") {
  // M=[[1]] (single loop), A=[2]
  CHECK(c_general(IntMatrix::from_rows({{1}}), IntMatrix::from_rows({{2}})) == 1);
  // double edge
  CHECK(c_general(IntMatrix::from_rows({{0, 2}, {0, 0}}), IntMatrix::from_rows({{2}, {2}})) == 2);

  std::mt19937 gen(35);
  std::uniform_int_distribution<int> mult(0, 2);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 3);
    Multigraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g.set_multiplicity(i, j, mult(gen));
    IntMatrix m(n, n, 0);
    IntMatrix a(n, 1, 0);
    for (int i = 0; i < n; ++i) {
      a.at(i, 0) = g.degree(i);
      for (int j = i; j < n; ++j) m.at(i, j) = g.multiplicity(i, j);
    }
    CHECK(c_general(m, a) == c_graph(g));
  }
}

TEST_CASE("c_general: two-column split of a double edge") {
  // M = [[0,2],[0,0]], A = [[1,1],[1,1]]: the double edge split into two
  // single-edge classes; exactly one decomposition, value 1.
  const auto m = IntMatrix::from_rows({{0, 2}, {0, 0}});
  const auto a = IntMatrix::from_rows({{1, 1}, {1, 1}});
  CHECK(c_general(m, a) == 1);
}

TEST_CASE("c_general returns 0 on an empty decomposition set") {
  // A asks vertex 1 for degree 3 but M only provides 2
  const auto m = IntMatrix::from_rows({{0, 2}, {0, 0}});
  const auto a = IntMatrix::from_rows({{3}, {1}});
  CHECK(c_general(m, a) == 0);
}

TEST_CASE("integrality on randomized constraint-satisfying instances") {
  // Build instances backwards: draw M_1..M_l, set M = sum, A_{j,k} = SC+SR of M_k.
  std::mt19937 gen(36);
  std::uniform_int_distribution<int> entry(0, 1), dim(1, 3), cols(1, 3);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = dim(gen), l = cols(gen);
    IntMatrix m(n, n, 0);
    IntMatrix a(n, l, 0);
    for (int k = 0; k < l; ++k) {
      IntMatrix mk(n, n, 0);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          mk.at(r, c) = entry(gen);
          m.at(r, c) += mk.at(r, c);
        }
      for (int j = 0; j < n; ++j) {
        long long t = 0;
        for (int c = 0; c < n; ++c) t += mk.at(j, c);
        for (int r = 0; r < n; ++r) t += mk.at(r, j);
        a.at(j, k) = t;
      }
    }
    // c_general throws std::logic_error if the value fails to be integral
    const BigInt c = c_general(m, a);
    CHECK(c >= 0);
  }
}
