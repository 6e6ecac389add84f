#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wickgraph/errors.hpp"
#include "wickgraph/kernel.hpp"
#include "wickgraph/multigraph.hpp"

namespace wickgraph {

// Tensor-grid quadrature spec: `order` points per panel per axis, `panels`
// composite panels per axis.
struct QuadratureRule {
  enum class Kind { GaussLegendre, Trapezoid };
  Kind kind = Kind::GaussLegendre;
  int order = 12;
  int panels = 2;

  void validate() const {
    if (order < 1) throw ValidationError("quadrature: order must be >= 1");
    if (panels < 1) throw ValidationError("quadrature: panels must be >= 1");
  }

  std::string identity() const {
    return std::string(kind == Kind::GaussLegendre ? "gauss_legendre" : "trapezoid") + ":" +
           std::to_string(order) + ":" + std::to_string(panels);
  }
};

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

namespace detail {

struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

inline double powi(double x, int p) {
  double r = 1.0;
  while (p > 0) {
    if (p & 1) r *= x;
    x *= x;
    p >>= 1;
  }
  return r;
}

}  // namespace detail

// Gauss-Legendre nodes/weights on [0,1], Newton iteration on P_G.
inline Rule1D gauss_legendre_01(int g) {
  if (g < 1) throw ValidationError("gauss_legendre_01: order must be >= 1");
  Rule1D r;
  r.nodes.resize(static_cast<std::size_t>(g));
  r.weights.resize(static_cast<std::size_t>(g));
  const int half = (g + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (g + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (g == 1) p1 = x;  // P_1
      for (int k = 2; k <= g; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pg = (g == 1) ? x : p1;
      const double pg1 = (g == 1) ? 1.0 : p0;
      pp = g * (x * pg - pg1) / (x * x - 1.0);
      const double dx = pg / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.nodes[static_cast<std::size_t>(i)] = (1.0 - x) / 2.0;
    r.nodes[static_cast<std::size_t>(g - 1 - i)] = (1.0 + x) / 2.0;
    r.weights[static_cast<std::size_t>(i)] = w / 2.0;
    r.weights[static_cast<std::size_t>(g - 1 - i)] = w / 2.0;
  }
  if (g % 2 == 1) {
    r.nodes[static_cast<std::size_t>(g / 2)] = 0.5;  // middle node is exact
  }
  return r;
}

inline Rule1D trapezoid_01(int g) {
  if (g < 1) throw ValidationError("trapezoid_01: order must be >= 1");
  Rule1D r;
  if (g == 1) {  // degenerate to the midpoint rule
    r.nodes = {0.5};
    r.weights = {1.0};
    return r;
  }
  const double h = 1.0 / (g - 1);
  for (int i = 0; i < g; ++i) {
    r.nodes.push_back(i * h);
    r.weights.push_back((i == 0 || i == g - 1) ? h / 2.0 : h);
  }
  return r;
}

// `panels` copies of the base rule scaled into equal subintervals of [0,1].
inline Rule1D composite_01(const Rule1D& base, int panels) {
  if (panels == 1) return base;
  Rule1D r;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < base.size(); ++i) {
      r.nodes.push_back((p + base.nodes[i]) * h);
      r.weights.push_back(base.weights[i] * h);
    }
  return r;
}

// Per-axis rule for a kernel: grid kernels get panels rounded up to a
// multiple of the grid cell count so panel boundaries sit on the node lines.
inline Rule1D axis_rule(const QuadratureRule& rule, const CovarianceKernel& kernel) {
  rule.validate();
  const Rule1D base =
      rule.kind == QuadratureRule::Kind::GaussLegendre ? gauss_legendre_01(rule.order)
                                                       : trapezoid_01(rule.order);
  int panels = rule.panels;
  if (const int cells = kernel.grid_cells(); cells > 0 && panels % cells != 0)
    panels = ((panels / cells) + 1) * cells;
  return composite_01(base, panels);
}

namespace detail {

// Tensor product of the same 1-D rule over l axes.
template <class F>
double integrate_tensor(int l, const Rule1D& axis, F&& f) {
  const std::size_t g = axis.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(l), 0);
  std::vector<double> s(static_cast<std::size_t>(l));
  Kahan acc;
  for (;;) {
    double w = 1.0;
    for (int a = 0; a < l; ++a) {
      s[static_cast<std::size_t>(a)] = axis.nodes[idx[static_cast<std::size_t>(a)]];
      w *= axis.weights[idx[static_cast<std::size_t>(a)]];
    }
    acc.add(w * f(std::span<const double>(s)));
    int a = l - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == g) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return acc.sum;
}

// Integral over [0,1]^l of f as the sum over the l! order simplices
// {0 <= t_1 <= ... <= t_l <= 1}, each mapped from the cube by
// t_i = x_i x_{i+1} ... x_l with Jacobian prod_i x_i^{i-1}. Inside one
// simplex every min(s_a, s_b) and |s_a - s_b| resolves, so kinked kernels
// become analytic piece by piece and Gauss-Legendre converges fast.
template <class F>
double integrate_simplex_sum(int l, const Rule1D& axis, F&& f) {
  const std::size_t g = axis.size();
  std::vector<int> perm(static_cast<std::size_t>(l));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> idx(static_cast<std::size_t>(l), 0);
  std::vector<double> t(static_cast<std::size_t>(l));
  std::vector<double> s(static_cast<std::size_t>(l));
  Kahan acc;
  do {
    // perm[i] is the axis holding the (i+1)-th smallest coordinate
    for (;;) {
      double w = 1.0;
      double tail = 1.0;
      for (int a = l - 1; a >= 0; --a) {
        const double x = axis.nodes[idx[static_cast<std::size_t>(a)]];
        w *= axis.weights[idx[static_cast<std::size_t>(a)]];
        w *= powi(x, a);  // Jacobian factor x_{a+1}^{a}
        tail *= x;
        t[static_cast<std::size_t>(a)] = tail;
      }
      for (int a = 0; a < l; ++a)
        s[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])] =
            t[static_cast<std::size_t>(a)];
      acc.add(w * f(std::span<const double>(s)));
      int a = l - 1;
      while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == g) {
        idx[static_cast<std::size_t>(a)] = 0;
        --a;
      }
      if (a < 0) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc.sum;
}

}  // namespace detail

// Simplex decomposition is exact-fast but costs l! cube passes; above this
// dimension kinked kernels fall back to the plain composite tensor grid.
inline constexpr int kSimplexDimensionLimit = 4;

// Integral of an arbitrary integrand over [0,1]^l, with the scheme chosen by
// the kernel's smoothness class. The integrand must be built from values
// f(s_a, s_b) of this kernel so the smoothness routing is sound.
template <class F>
double integrate_cube(int l, const CovarianceKernel& kernel, const QuadratureRule& rule, F&& f) {
  if (l == 0) return f(std::span<const double>{});
  const Rule1D axis = axis_rule(rule, kernel);
  if (kernel.diagonal_kink() && l >= 2 && l <= kSimplexDimensionLimit)
    return detail::integrate_simplex_sum(l, axis, std::forward<F>(f));
  return detail::integrate_tensor(l, axis, std::forward<F>(f));
}

// \int_Gamma f over a connected component (or degree-0 singleton) with l
// vertices: the l-dimensional integral of the product over all edge
// occurrences; an edge of multiplicity h contributes f(s_a,s_b)^h, a loop
// f(s_a,s_a) per unit. A graph with no edges integrates the empty product: 1.
inline double integrate_component(const Multigraph& component, const CovarianceKernel& kernel,
                                  const QuadratureRule& rule, int dimension_cap = 8) {
  const int l = component.order();
  if (l > dimension_cap)
    throw BudgetError("integrate_component: component has " + std::to_string(l) +
                      " vertices, cap is " + std::to_string(dimension_cap));
  struct Factor {
    int a, b, power;
  };
  std::vector<Factor> factors;
  for (int i = 0; i < l; ++i)
    for (int j = i; j < l; ++j)
      if (const int h = component.multiplicity(i, j); h > 0) factors.push_back({i, j, h});
  if (factors.empty()) return 1.0;

  auto integrand = [&](std::span<const double> s) {
    double p = 1.0;
    for (const auto& fct : factors)
      p *= detail::powi(kernel(s[static_cast<std::size_t>(fct.a)],
                                s[static_cast<std::size_t>(fct.b)]),
                        fct.power);
    return p;
  };
  return integrate_cube(l, kernel, rule, integrand);
}

// Value at the requested rule plus a two-resolution error estimate
// (difference against a finer rule).
struct IntegralWithError {
  double value;
  double error_estimate;
};

inline IntegralWithError integrate_component_with_error(const Multigraph& component,
                                                        const CovarianceKernel& kernel,
                                                        const QuadratureRule& rule,
                                                        int dimension_cap = 8) {
  const double value = integrate_component(component, kernel, rule, dimension_cap);
  QuadratureRule finer = rule;
  finer.order += 3;
  finer.panels += 1;
  const double refined = integrate_component(component, kernel, finer, dimension_cap);
  return {value, std::abs(refined - value)};
}

// Product over connected components; equals the full |V|-dimensional
// integral by Fubini factorization.
inline double integrate_graph(const Multigraph& g, const CovarianceKernel& kernel,
                              const QuadratureRule& rule, int dimension_cap = 8) {
  double p = 1.0;
  for (const auto& block : components(g).blocks)
    p *= integrate_component(block.graph, kernel, rule, dimension_cap);
  return p;
}

}  // namespace wickgraph
