#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wickgraph/errors.hpp"
#include "wickgraph/factors.hpp"
#include "wickgraph/kernel.hpp"
#include "wickgraph/multigraph.hpp"
#include "wickgraph/polynomial.hpp"
#include "wickgraph/quadrature.hpp"
#include "wickgraph/rational.hpp"

namespace wickgraph {

// One summand of the expansion: an alpha tuple, one multigraph per
// coordinate, the exact combinatorial weight, and the factorized integral.
struct Term {
  AlphaTuple alphas;
  double coeff_q = 1.0;                                 // prod_k q_{alpha^(k)}
  Rational coeff_comb = 1;                              // (1/n!) prod_q C(Gamma_q)
  std::vector<Multigraph> graphs;                       // per coordinate
  std::vector<std::pair<std::string, int>> components;  // canonical key -> count, sorted
  double value = std::numeric_limits<double>::quiet_NaN();  // NaN until integrated
};

struct EvaluationDiagnostics {
  long long tuple_count = 0;      // alpha tuples visited
  long long skipped_parity = 0;   // tuples killed by an odd per-coordinate degree sum
  long long term_count = 0;       // graph-tuple terms accumulated
  long long term_budget = 0;
  double quad_error_envelope = 0.0;  // sum |coeff| * component-integral error estimates
  bool terms_truncated = false;      // raw term storage hit max_stored_terms
};

struct EvaluationResult {
  int n = 0;
  double total = 0.0;
  std::vector<Term> terms;
  EvaluationDiagnostics diagnostics;
};

struct EngineOptions {
  long long term_budget = 10'000'000;
  int component_dimension_cap = 8;
  std::size_t max_stored_terms = 100'000;
  bool store_terms = true;
  bool estimate_quad_error = true;
};

// Memoized component integrals for one fixed (kernel, rule) pair. The same
// small components (loop, edge, double edge, triangle, ...) recur across
// thousands of terms, so each canonical class is integrated once.
class ComponentIntegrator {
 public:
  ComponentIntegrator(const CovarianceKernel& kernel, const QuadratureRule& rule,
                      int dimension_cap = 8, bool with_error = true)
      : kernel_(kernel), rule_(rule), cap_(dimension_cap), with_error_(with_error) {}

  const IntegralWithError& integral(const Multigraph& component) {
    return integral_for_key(canonical_key(component));
  }

  const IntegralWithError& integral_for_key(const std::string& key) {
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      const Multigraph rep = multigraph_from_canonical_key(key);
      IntegralWithError v{0.0, 0.0};
      if (with_error_) {
        v = integrate_component_with_error(rep, kernel_, rule_, cap_);
      } else {
        v.value = integrate_component(rep, kernel_, rule_, cap_);
      }
      it = memo_.emplace(key, v).first;
    }
    return it->second;
  }

  std::size_t distinct_components() const { return memo_.size(); }

 private:
  CovarianceKernel kernel_;
  QuadratureRule rule_;
  int cap_;
  bool with_error_;
  std::map<std::string, IntegralWithError> memo_;
};

namespace detail {

// Per-coordinate degree specs of an alpha tuple: spec[q][k] = alpha^(k)_q.
inline std::vector<DegreeSpec> coordinate_degree_specs(const AlphaTuple& t, int m) {
  std::vector<DegreeSpec> specs(static_cast<std::size_t>(m),
                                DegreeSpec(t.size(), 0));
  for (std::size_t k = 0; k < t.size(); ++k)
    for (int q = 0; q < m; ++q) specs[static_cast<std::size_t>(q)][k] = t[k][q];
  return specs;
}

struct EnumeratedSpec {
  std::vector<Multigraph> graphs;
  std::vector<BigInt> c_factors;  // c_graph per enumerated graph
};

class SpecEnumerationCache {
 public:
  const EnumeratedSpec& get(const DegreeSpec& d) {
    auto it = memo_.find(d);
    if (it == memo_.end()) {
      EnumeratedSpec e;
      e.graphs = enumerate_multigraphs(static_cast<int>(d.size()), d);
      e.c_factors.reserve(e.graphs.size());
      for (const auto& g : e.graphs) e.c_factors.push_back(c_graph(g));
      it = memo_.emplace(d, std::move(e)).first;
    }
    return it->second;
  }

 private:
  std::map<DegreeSpec, EnumeratedSpec> memo_;
};

inline std::vector<std::pair<std::string, int>> component_key_multiset(const Multigraph& sum) {
  std::vector<std::string> keys;
  for (const auto& block : components(sum).blocks) keys.push_back(canonical_key(block.graph));
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<std::string, int>> out;
  for (auto& k : keys) {
    if (!out.empty() && out.back().first == k)
      ++out.back().second;
    else
      out.emplace_back(std::move(k), 1);
  }
  return out;
}

// Walks every (alpha tuple, graph tuple) pair of the expansion in
// deterministic order, with parity pruning and the term budget guard.
// visit(tuple, qprod, graphs, c_product, sum_graph) is called per term.
template <class Visit>
void walk_expansion(const Polynomial& q, int n, const EngineOptions& opt,
                    EvaluationDiagnostics& diag, Visit&& visit) {
  const int m = q.dimension();
  SpecEnumerationCache cache;
  diag.term_budget = opt.term_budget;

  for_each_alpha_tuple(q, n, [&](const AlphaTuple& tuple, double qprod) {
    ++diag.tuple_count;
    const auto specs = coordinate_degree_specs(tuple, m);
    for (const auto& spec : specs) {
      int sum = 0;
      for (int d : spec) sum += d;
      if (sum % 2 != 0) {
        ++diag.skipped_parity;
        return;
      }
    }
    std::vector<const EnumeratedSpec*> per_coord;
    per_coord.reserve(static_cast<std::size_t>(m));
    long long tuple_terms = 1;
    for (const auto& spec : specs) {
      const EnumeratedSpec& e = cache.get(spec);
      if (e.graphs.empty()) return;  // even but infeasible: contributes nothing
      per_coord.push_back(&e);
      tuple_terms *= static_cast<long long>(e.graphs.size());
    }
    if (diag.term_count + tuple_terms > opt.term_budget)
      throw BudgetError("engine: term budget of " + std::to_string(opt.term_budget) +
                        " exceeded");

    // odometer over the m-fold Cartesian product of graph lists
    std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);
    for (;;) {
      BigInt c_product = 1;
      Multigraph sum(n);
      std::vector<Multigraph> graphs;
      graphs.reserve(static_cast<std::size_t>(m));
      for (int qx = 0; qx < m; ++qx) {
        const EnumeratedSpec& e = *per_coord[static_cast<std::size_t>(qx)];
        const std::size_t i = pick[static_cast<std::size_t>(qx)];
        c_product *= e.c_factors[i];
        sum += e.graphs[i];
        graphs.push_back(e.graphs[i]);
      }
      ++diag.term_count;
      visit(tuple, qprod, graphs, c_product, sum);
      int qx = m - 1;
      while (qx >= 0 &&
             ++pick[static_cast<std::size_t>(qx)] ==
                 per_coord[static_cast<std::size_t>(qx)]->graphs.size()) {
        pick[static_cast<std::size_t>(qx)] = 0;
        --qx;
      }
      if (qx < 0) break;
    }
  });
}

}  // namespace detail

// Counts the terms evaluate() would generate, without integrating anything.
inline long long count_terms(const Polynomial& q, int n,
                             const EngineOptions& options = EngineOptions{}) {
  if (n == 0 || q.is_zero()) return 0;
  if (n < 0) throw ValidationError("count_terms: n must be >= 0");
  EvaluationDiagnostics diag;
  detail::walk_expansion(q, n, options, diag,
                         [](const AlphaTuple&, double, const std::vector<Multigraph>&,
                            const BigInt&, const Multigraph&) {});
  return diag.term_count;
}

// The time-ordered integral of E[prod_{k<=n} Q(X(s_k))]:
//   (1/n!) sum_{alpha tuples, all coordinate degree sums even}
//          (prod_k q_{alpha^(k)})
//          sum_{Gamma_1} ... sum_{Gamma_m} (prod_q C(Gamma_q))
//          prod_{components Lambda of Gamma_1+...+Gamma_m} int_Lambda f.
// n = 0 returns 1 (empty product). Combinatorial factors are exact rationals,
// converted to double only at the final multiply per term.
inline EvaluationResult evaluate(const Polynomial& q, int n, const CovarianceKernel& kernel,
                                 const QuadratureRule& rule,
                                 const EngineOptions& options = EngineOptions{}) {
  if (n < 0) throw ValidationError("evaluate: n must be >= 0");
  EvaluationResult res;
  res.n = n;
  if (n == 0) {
    res.total = 1.0;
    return res;
  }
  if (q.is_zero()) return res;

  ComponentIntegrator integrator(kernel, rule, options.component_dimension_cap,
                                 options.estimate_quad_error);
  const Rational inv_nfact = Rational(1) / Rational(factorial(n));
  detail::Kahan total;

  detail::walk_expansion(
      q, n, options, res.diagnostics,
      [&](const AlphaTuple& tuple, double qprod, const std::vector<Multigraph>& graphs,
          const BigInt& c_product, const Multigraph& sum) {
        const Rational coeff_comb = inv_nfact * Rational(c_product);
        auto keys = detail::component_key_multiset(sum);
        double integral_product = 1.0;
        double error_accum = 0.0;
        for (const auto& [key, count] : keys) {
          const IntegralWithError& iv = integrator.integral_for_key(key);
          for (int c = 0; c < count; ++c) {
            // first-order error propagation through the product
            error_accum = error_accum * std::abs(iv.value) +
                          iv.error_estimate * std::abs(integral_product);
            integral_product *= iv.value;
          }
        }
        const double value = qprod * to_double(coeff_comb) * integral_product;
        total.add(value);
        res.diagnostics.quad_error_envelope +=
            std::abs(qprod * to_double(coeff_comb)) * error_accum;
        if (options.store_terms) {
          if (res.terms.size() < options.max_stored_terms) {
            Term t;
            t.alphas = tuple;
            t.coeff_q = qprod;
            t.coeff_comb = coeff_comb;
            t.graphs = graphs;
            t.components = std::move(keys);
            t.value = value;
            res.terms.push_back(std::move(t));
          } else {
            res.diagnostics.terms_truncated = true;
          }
        }
      });
  res.total = total.sum;
  return res;
}

// One aggregated shape of the kernel-free expansion: a component multiset
// and the summed real weight (coeff_q * coeff_comb over all terms with this
// multiset). Re-evaluating shapes against any kernel reproduces evaluate().
struct ExpansionShape {
  std::vector<std::pair<std::string, int>> components;
  double weight = 0.0;
  long long term_count = 0;
};

struct Expansion {
  int n = 0;
  std::vector<ExpansionShape> shapes;
  std::vector<Term> terms;  // raw terms, value unset
  EvaluationDiagnostics diagnostics;
};

inline Expansion expand_symbolic(const Polynomial& q, int n,
                                 const EngineOptions& options = EngineOptions{}) {
  if (n < 0) throw ValidationError("expand_symbolic: n must be >= 0");
  Expansion ex;
  ex.n = n;
  if (n == 0 || q.is_zero()) return ex;
  const Rational inv_nfact = Rational(1) / Rational(factorial(n));
  std::map<std::vector<std::pair<std::string, int>>, std::pair<double, long long>> agg;

  detail::walk_expansion(
      q, n, options, ex.diagnostics,
      [&](const AlphaTuple& tuple, double qprod, const std::vector<Multigraph>& graphs,
          const BigInt& c_product, const Multigraph& sum) {
        const Rational coeff_comb = inv_nfact * Rational(c_product);
        auto keys = detail::component_key_multiset(sum);
        auto& slot = agg[keys];
        slot.first += qprod * to_double(coeff_comb);
        slot.second += 1;
        if (options.store_terms && ex.terms.size() < options.max_stored_terms) {
          Term t;
          t.alphas = tuple;
          t.coeff_q = qprod;
          t.coeff_comb = coeff_comb;
          t.graphs = graphs;
          t.components = std::move(keys);
          ex.terms.push_back(std::move(t));
        } else if (options.store_terms) {
          ex.diagnostics.terms_truncated = true;
        }
      });
  for (auto& [keys, acc] : agg)
    ex.shapes.push_back(ExpansionShape{keys, acc.first, acc.second});
  return ex;
}

// Applies a kernel to an aggregated expansion: sum over shapes of
// weight * prod component integrals.
inline double evaluate_expansion(const Expansion& ex, const CovarianceKernel& kernel,
                                 const QuadratureRule& rule, int dimension_cap = 8) {
  if (ex.n == 0) return 1.0;
  ComponentIntegrator integrator(kernel, rule, dimension_cap, /*with_error=*/false);
  detail::Kahan total;
  for (const auto& shape : ex.shapes) {
    double p = shape.weight;
    for (const auto& [key, count] : shape.components)
      for (int c = 0; c < count; ++c) p *= integrator.integral_for_key(key).value;
    total.add(p);
  }
  return total.sum;
}

inline constexpr int kFkMaxOrder = 6;

// Partial sums S_N = sum_{n<=N} (-1)^n I_n of the formal perturbation series
// for E[exp(-int_0^1 Q(X(s)) ds)], I_n the order-n time-ordered integral.
// A formal/asymptotic diagnostic only; no convergence is claimed.
struct FkPartialSums {
  std::vector<double> order_values;  // I_0..I_N
  std::vector<double> partial_sums;  // S_0..S_N
};

inline FkPartialSums fk_partial_sum(const Polynomial& q, int truncation,
                                    const CovarianceKernel& kernel, const QuadratureRule& rule,
                                    const EngineOptions& options = EngineOptions{}) {
  if (truncation < 0) throw ValidationError("fk_partial_sum: truncation must be >= 0");
  if (truncation > kFkMaxOrder)
    throw BudgetError("fk_partial_sum: truncation capped at " + std::to_string(kFkMaxOrder));
  FkPartialSums out;
  double running = 0.0;
  for (int n = 0; n <= truncation; ++n) {
    const double in = evaluate(q, n, kernel, rule, options).total;
    out.order_values.push_back(in);
    running += (n % 2 == 0 ? 1.0 : -1.0) * in;
    out.partial_sums.push_back(running);
  }
  return out;
}

}  // namespace wickgraph
