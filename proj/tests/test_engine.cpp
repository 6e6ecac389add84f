#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "psi_reference.hpp"
#include "wickgraph/engine.hpp"
#include "wickgraph/oracle.hpp"

using namespace wickgraph;

namespace {

MultiIndex mi(std::vector<int> v) { return MultiIndex(std::move(v)); }

Polynomial poly_x() { return Polynomial(1, {{mi({1}), 1.0}}); }
Polynomial poly_x2(double d = 1.0) { return Polynomial(1, {{mi({2}), d}}); }

double oracle_total(const Polynomial& q, int n, const CovarianceKernel& k,
                    const QuadratureRule& rule) {
  detail::Kahan acc;
  for_each_alpha_tuple(q, n, [&](const AlphaTuple& t, double coeff) {
    acc.add(coeff * lhs_bruteforce(t, k, rule));
  });
  return acc.sum / to_double(factorial(n));
}

std::mt19937 rng_engine(20260807);

psi_reference::Matrix random_symmetric(int m, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  psi_reference::Matrix d(static_cast<std::size_t>(m),
                          std::vector<double>(static_cast<std::size_t>(m)));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = u(gen);
      d[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  return d;
}

std::vector<double> random_vector(int m, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(m));
  for (auto& x : c) x = u(gen);
  return c;
}

}  // namespace

TEST_CASE("closed form for Q(x)=x with the product kernel") {
  const QuadratureRule rule;
  const auto k = CovarianceKernel::product();
  // (1/(l! 2^l)) (int int s t)^l with int int s t = 1/4
  CHECK(evaluate(poly_x(), 2, k, rule).total == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(evaluate(poly_x(), 4, k, rule).total == doctest::Approx(0.0078125).epsilon(1e-12));
  CHECK(evaluate(poly_x(), 3, k, rule).total == 0.0);  // odd degree everywhere
}

TEST_CASE("order 0 and the zero polynomial") {
  const QuadratureRule rule;
  const auto k = CovarianceKernel::brownian_bridge();
  CHECK(evaluate(poly_x(), 0, k, rule).total == 1.0);
  CHECK(evaluate(Polynomial(2), 0, k, rule).total == 1.0);
  CHECK(evaluate(Polynomial(2), 3, k, rule).total == 0.0);
  CHECK_THROWS_AS(evaluate(poly_x(), -1, k, rule), ValidationError);
}

TEST_CASE("first-order diagonal: Q(x)=x^2 with brownian motion") {
  const QuadratureRule rule;
  const auto res = evaluate(poly_x2(), 1, CovarianceKernel::brownian_motion(), rule);
  CHECK(res.total == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(res.terms.size() == 1);
  CHECK(fraction_string(res.terms[0].coeff_comb) == "1/1");
}

TEST_CASE("constant polynomial reduces to c^n/n!") {
  const QuadratureRule rule;
  const auto k = CovarianceKernel::brownian_bridge();
  const Polynomial q(1, {{mi({0}), 3.0}});
  for (int n = 1; n <= 4; ++n)
    CHECK(evaluate(q, n, k, rule).total ==
          doctest::Approx(std::pow(3.0, n) / to_double(factorial(n))).epsilon(1e-12));
}

TEST_CASE("quadratic potential reproduces the order-1 and order-2 closed forms") {
  const QuadratureRule rule;
  for (int rep = 0; rep < 5; ++rep) {
    const auto d = random_symmetric(2, rng_engine);
    const auto c = random_vector(2, rng_engine);
    const auto q = Polynomial::quadratic_form(d, c);
    for (const auto& k :
         {CovarianceKernel::brownian_motion(), CovarianceKernel::brownian_bridge()}) {
      const auto b = psi_reference::basic_integrals(k, rule);
      CHECK(evaluate(q, 1, k, rule).total ==
            doctest::Approx(psi_reference::psi1(d, b)).epsilon(1e-10));
      CHECK(evaluate(q, 2, k, rule).total ==
            doctest::Approx(psi_reference::psi2(d, c, b)).epsilon(1e-10));
    }
  }
}

TEST_CASE("quadratic potential reproduces the order-3 closed form at m=1 and m=2") {
  const QuadratureRule rule;
  for (int m : {1, 2}) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto d = random_symmetric(m, rng_engine);
      const auto c = random_vector(m, rng_engine);
      const auto q = Polynomial::quadratic_form(d, c);
      for (const auto& k :
           {CovarianceKernel::brownian_motion(), CovarianceKernel::brownian_bridge()}) {
        const auto b = psi_reference::basic_integrals(k, rule);
        CHECK(evaluate(q, 3, k, rule).total ==
              doctest::Approx(psi_reference::psi3(d, c, b)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("engine agrees with the pairing oracle") {
  const QuadratureRule rule;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<MultiIndex> support_m2{mi({0, 0}), mi({1, 0}), mi({0, 1}),
                                           mi({2, 0}), mi({1, 1}), mi({0, 2})};
  for (const auto& k : {CovarianceKernel::product(), CovarianceKernel::brownian_bridge()}) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<std::pair<MultiIndex, double>> terms;
      for (const auto& a : support_m2) terms.emplace_back(a, u(rng_engine));
      const Polynomial q(2, terms);
      for (int n = 1; n <= 3; ++n) {
        const double engine = evaluate(q, n, k, rule).total;
        const double oracle = oracle_total(q, n, k, rule);
        CHECK(std::abs(engine - oracle) <= 1e-8);
      }
    }
  }
}

TEST_CASE("engine agrees with the pairing oracle at four time slots") {
  // n = 4 exercises 4-vertex graph enumeration and the 4-dimensional
  // integration path on both sides.
  QuadratureRule rule;
  rule.order = 8;
  rule.panels = 1;
  const Polynomial q_full(1, {{mi({0}), 0.3}, {mi({1}), -0.7}, {mi({2}), 0.5}});
  const double e1 = evaluate(q_full, 4, CovarianceKernel::product(), rule).total;
  const double o1 = oracle_total(q_full, 4, CovarianceKernel::product(), rule);
  CHECK(e1 == doctest::Approx(o1).epsilon(1e-9));

  const Polynomial q_small(1, {{mi({1}), 1.1}, {mi({2}), -0.6}});
  const double e2 = evaluate(q_small, 4, CovarianceKernel::brownian_bridge(), rule).total;
  const double o2 = oracle_total(q_small, 4, CovarianceKernel::brownian_bridge(), rule);
  CHECK(e2 == doctest::Approx(o2).epsilon(1e-8));
}

TEST_CASE("engine agrees with the pairing oracle for the m=3 quadratic") {
  QuadratureRule rule;
  rule.order = 8;
  rule.panels = 1;
  const auto d = random_symmetric(3, rng_engine);
  const auto c = random_vector(3, rng_engine);
  const auto q = Polynomial::quadratic_form(d, c);
  for (const auto& k : {CovarianceKernel::product(), CovarianceKernel::brownian_bridge()}) {
    const double engine = evaluate(q, 3, k, rule).total;
    const double oracle = oracle_total(q, 3, k, rule);
    CHECK(std::abs(engine - oracle) <= 1e-8);
  }
}

TEST_CASE("parity pruning annihilates odd tuples") {
  const QuadratureRule rule;
  const auto k = CovarianceKernel::product();
  for (int n : {1, 3, 5}) {
    const auto res = evaluate(poly_x(), n, k, rule);
    CHECK(res.total == 0.0);
    CHECK(res.diagnostics.skipped_parity == res.diagnostics.tuple_count);
    CHECK(res.diagnostics.term_count == 0);
  }
  // q_{(1,2)} at n=2 has even column sums (2,4): nonzero. With the product
  // kernel, Wick gives (1/2) int int 3 s1^3 s2^3 = 3/32.
  const Polynomial q(2, {{mi({1, 2}), 1.0}});
  const auto res = evaluate(q, 2, k, rule);
  CHECK(res.total == doctest::Approx(3.0 / 32).epsilon(1e-12));
  CHECK(res.diagnostics.skipped_parity == 0);

  // a coordinate with an odd column sum kills the whole tuple
  const Polynomial q_mixed(2, {{mi({1, 1}), 1.0}, {mi({2, 0}), 1.0}});
  const auto res2 = evaluate(q_mixed, 3, k, rule);
  CHECK(res2.diagnostics.skipped_parity > 0);
  const double oracle = oracle_total(q_mixed, 3, k, rule);
  CHECK(res2.total == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("covariance scaling moves each term by c^(edge count)") {
  // a grid table holding 2*s*t is exactly the doubled product kernel
  std::vector<std::vector<double>> tab(5, std::vector<double>(5));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      tab[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          2.0 * (i / 4.0) * (j / 4.0);
  const auto doubled = CovarianceKernel::from_grid(tab);
  const auto base = CovarianceKernel::product();
  const QuadratureRule rule;

  // Q=x at n=2l scales by 2^l
  CHECK(evaluate(poly_x(), 2, doubled, rule).total ==
        doctest::Approx(2.0 * 0.125).epsilon(1e-11));
  CHECK(evaluate(poly_x(), 4, doubled, rule).total ==
        doctest::Approx(4.0 * 0.0078125).epsilon(1e-11));

  // term-by-term for Q=x^2, n=2: every term has 2 edge units
  const auto r1 = evaluate(poly_x2(), 2, base, rule);
  const auto r2 = evaluate(poly_x2(), 2, doubled, rule);
  REQUIRE(r1.terms.size() == r2.terms.size());
  for (std::size_t i = 0; i < r1.terms.size(); ++i)
    CHECK(r2.terms[i].value == doctest::Approx(4.0 * r1.terms[i].value).epsilon(1e-11));
}

TEST_CASE("symbolic expansion shapes for the small quadratic cases") {
  // Q=x: one shape, a single edge with weight 1/2
  const auto ex1 = expand_symbolic(poly_x(), 2);
  REQUIRE(ex1.shapes.size() == 1);
  CHECK(ex1.shapes[0].weight == doctest::Approx(0.5));
  CHECK(ex1.shapes[0].components.size() == 1);
  CHECK(ex1.shapes[0].components[0].first == "2:0,1,0");

  // Q=Dx^2, n=2: double edge with weight D^2, two loops with weight D^2/2
  const double dcoef = 1.5;
  const auto ex2 = expand_symbolic(poly_x2(dcoef), 2);
  REQUIRE(ex2.shapes.size() == 2);
  std::map<std::string, double> weights;
  for (const auto& s : ex2.shapes) {
    std::string label;
    for (const auto& [key, count] : s.components)
      label += key + "*" + std::to_string(count) + ";";
    weights[label] = s.weight;
  }
  CHECK(weights.at("2:0,2,0*1;") == doctest::Approx(dcoef * dcoef));
  CHECK(weights.at("1:1*2;") == doctest::Approx(0.5 * dcoef * dcoef));

  // Q=x^2, n=3: triangle 4/3, three loops 1/6, double-edge + loop 1
  const auto ex3 = expand_symbolic(poly_x2(), 3);
  REQUIRE(ex3.shapes.size() == 3);
  std::map<std::size_t, double> by_count;  // component count -> weight
  for (const auto& s : ex3.shapes) {
    std::size_t total = 0;
    for (const auto& [key, count] : s.components) total += static_cast<std::size_t>(count);
    by_count[total] = s.weight;
  }
  CHECK(by_count.at(1) == doctest::Approx(4.0 / 3.0));  // triangle
  CHECK(by_count.at(3) == doctest::Approx(1.0 / 6.0));  // loop^3
  CHECK(by_count.at(2) == doctest::Approx(1.0));        // double edge + loop
}

TEST_CASE("expansion aggregation preserves totals") {
  const QuadratureRule rule;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    const auto d = random_symmetric(2, rng_engine);
    const auto c = random_vector(2, rng_engine);
    const auto q = Polynomial::quadratic_form(d, c);
    for (int n = 1; n <= 3; ++n) {
      const auto ex = expand_symbolic(q, n);
      for (const auto& k :
           {CovarianceKernel::product(), CovarianceKernel::brownian_bridge()}) {
        const double direct = evaluate(q, n, k, rule).total;
        const double via_shapes = evaluate_expansion(ex, k, rule);
        CHECK(std::abs(direct - via_shapes) <= 1e-10 * (1.0 + std::abs(direct)));
      }
    }
  }
}

TEST_CASE("perturbation-series partial sums") {
  const QuadratureRule rule;
  const auto bridge = CovarianceKernel::brownian_bridge();

  const auto s0 = fk_partial_sum(poly_x2(), 0, bridge, rule);
  REQUIRE(s0.partial_sums.size() == 1);
  CHECK(s0.partial_sums[0] == 1.0);

  // Q=x: I_1 = 0, I_2 = (1/2) int int f = 1/24, so S_2 = 1 + 1/24
  const auto s2 = fk_partial_sum(poly_x(), 2, bridge, rule);
  CHECK(s2.order_values[1] == 0.0);
  CHECK(s2.order_values[2] == doctest::Approx(1.0 / 24).epsilon(1e-11));
  CHECK(s2.partial_sums[2] == doctest::Approx(1.0 + 1.0 / 24).epsilon(1e-11));

  const auto sz = fk_partial_sum(Polynomial(1), 4, bridge, rule);
  for (double s : sz.partial_sums) CHECK(s == 1.0);

  CHECK_THROWS_AS(fk_partial_sum(poly_x(), 7, bridge, rule), BudgetError);
}

TEST_CASE("term budget guard and dry-run counter") {
  const QuadratureRule rule;
  const auto k = CovarianceKernel::product();
  const Polynomial q(1, {{mi({1}), 1.0}, {mi({2}), 0.5}});
  const long long count = count_terms(q, 2);
  CHECK(count > 0);
  EngineOptions opt;
  opt.term_budget = count - 1;
  CHECK_THROWS_AS(evaluate(q, 2, k, rule, opt), BudgetError);
  opt.term_budget = count;
  CHECK(evaluate(q, 2, k, rule, opt).diagnostics.term_count == count);
}

TEST_CASE("stored terms are self-consistent") {
  const QuadratureRule rule;
  const auto k = CovarianceKernel::brownian_bridge();
  const auto d = random_symmetric(2, rng_engine);
  const auto c = random_vector(2, rng_engine);
  const auto q = Polynomial::quadratic_form(d, c);
  const auto res = evaluate(q, 2, k, rule);
  REQUIRE(!res.diagnostics.terms_truncated);
  REQUIRE(static_cast<long long>(res.terms.size()) == res.diagnostics.term_count);

  detail::Kahan sum;
  double abs_sum = 0.0;
  ComponentIntegrator integrator(k, rule, 8, false);
  for (const auto& t : res.terms) {
    sum.add(t.value);
    abs_sum += std::abs(t.value);
    double prod = 1.0;
    for (const auto& [key, count] : t.components)
      for (int i = 0; i < count; ++i) prod *= integrator.integral_for_key(key).value;
    CHECK(t.value ==
          doctest::Approx(t.coeff_q * to_double(t.coeff_comb) * prod).epsilon(1e-12));
    // graphs satisfy their degree specs
    for (int qx = 0; qx < q.dimension(); ++qx)
      for (std::size_t slot = 0; slot < t.alphas.size(); ++slot)
        CHECK(t.graphs[static_cast<std::size_t>(qx)].degree(static_cast<int>(slot)) ==
              t.alphas[slot][qx]);
  }
  CHECK(std::abs(res.total - sum.sum) <= 1e-10 * (1.0 + abs_sum));
}

TEST_CASE("evaluation is deterministic") {
  const QuadratureRule rule;
  const auto k = CovarianceKernel::brownian_bridge();
  const auto d = random_symmetric(2, rng_engine);
  const auto c = random_vector(2, rng_engine);
  const auto q = Polynomial::quadratic_form(d, c);
  const auto a = evaluate(q, 3, k, rule);
  const auto b = evaluate(q, 3, k, rule);
  CHECK(a.total == b.total);  // bit-for-bit
  CHECK(a.diagnostics.term_count == b.diagnostics.term_count);
}
