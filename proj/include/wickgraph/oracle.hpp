#pragma once

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "wickgraph/errors.hpp"
#include "wickgraph/kernel.hpp"
#include "wickgraph/multigraph.hpp"
#include "wickgraph/polynomial.hpp"
#include "wickgraph/quadrature.hpp"
#include "wickgraph/rational.hpp"

// Brute-force reference implementations. Deliberately naive -- full
// enumeration with hard size guards -- because these are the ground truth
// the evaluation engine is checked against.

namespace wickgraph {

// A perfect matching on an occurrence set.
struct Pairing {
  std::vector<std::pair<Occurrence, Occurrence>> pairs;
};

namespace detail {

// Pairings of {0,...,size-1} in canonical order: the smallest unpaired index
// is always matched first, partners tried in increasing order.
template <class Fn>
void for_each_index_pairing_rec(std::vector<int>& unpaired,
                                std::vector<std::pair<int, int>>& acc, Fn&& fn) {
  if (unpaired.empty()) {
    fn(static_cast<const std::vector<std::pair<int, int>>&>(acc));
    return;
  }
  const int first = unpaired.front();
  for (std::size_t p = 1; p < unpaired.size(); ++p) {
    const int partner = unpaired[p];
    std::vector<int> rest;
    rest.reserve(unpaired.size() - 2);
    for (std::size_t q = 1; q < unpaired.size(); ++q)
      if (q != p) rest.push_back(unpaired[q]);
    acc.emplace_back(first, partner);
    for_each_index_pairing_rec(rest, acc, fn);
    acc.pop_back();
  }
}

template <class Fn>
void for_each_index_pairing(int size, Fn&& fn) {
  if (size % 2 != 0) throw ValidationError("pairings: set size must be even");
  std::vector<int> all(static_cast<std::size_t>(size));
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::pair<int, int>> acc;
  acc.reserve(static_cast<std::size_t>(size) / 2);
  for_each_index_pairing_rec(all, acc, fn);
}

}  // namespace detail

// All (2l-1)!! pairings of an even-size occurrence set, canonical order.
inline std::vector<Pairing> enumerate_pairings(const std::vector<Occurrence>& occ) {
  std::vector<Pairing> out;
  detail::for_each_index_pairing(static_cast<int>(occ.size()),
                                 [&](const std::vector<std::pair<int, int>>& idx) {
                                   Pairing p;
                                   for (auto [a, b] : idx)
                                     p.pairs.emplace_back(occ[static_cast<std::size_t>(a)],
                                                          occ[static_cast<std::size_t>(b)]);
                                   out.push_back(std::move(p));
                                 });
  return out;
}

// E[prod_k (Y^(k))^{alpha^(k)}] for zero-mean jointly Gaussian Y's: the
// pairing sum of products of covariances. `cov(k, i, l, j)` is
// Cov(Y^(k)_i, Y^(l)_j), slots and coordinates 1-based. Odd occurrence sets
// give 0.
template <class CovFn>
double wick_expectation(const AlphaTuple& t, CovFn&& cov) {
  const std::vector<Occurrence> occ = occurrence_set(t);
  if (occ.size() % 2 != 0) return 0.0;
  if (occ.empty()) return 1.0;
  detail::Kahan total;
  detail::for_each_index_pairing(
      static_cast<int>(occ.size()), [&](const std::vector<std::pair<int, int>>& idx) {
        double prod = 1.0;
        for (auto [a, b] : idx) {
          const Occurrence& x = occ[static_cast<std::size_t>(a)];
          const Occurrence& y = occ[static_cast<std::size_t>(b)];
          prod *= cov(x.slot, x.coord, y.slot, y.coord);
        }
        total.add(prod);
      });
  return total.sum;
}

inline constexpr int kLhsMaxSlots = 4;
inline constexpr int kLhsMaxOccurrences = 10;

// Left side of the graph identity, straight from its statement:
//   int_{[0,1]^n} sum_{pairings P of O(alpha^(1..n))} prod delta_ij f(s_k,s_l) ds.
// Pairings are enumerated once, cross-coordinate pairs discarded by the
// Kronecker delta, and the surviving sum integrated on the tensor grid.
inline double lhs_bruteforce(const AlphaTuple& t, const CovarianceKernel& kernel,
                             const QuadratureRule& rule) {
  const int n = static_cast<int>(t.size());
  if (n < 1) throw ValidationError("lhs_bruteforce: empty tuple");
  if (n > kLhsMaxSlots) throw BudgetError("lhs_bruteforce: more than 4 time slots");
  const std::vector<Occurrence> occ = occurrence_set(t);
  if (static_cast<int>(occ.size()) > kLhsMaxOccurrences)
    throw BudgetError("lhs_bruteforce: occurrence set larger than 10");
  if (occ.size() % 2 != 0) return 0.0;
  if (occ.empty()) return 1.0;

  // surviving pairings as lists of 0-based slot pairs
  std::vector<std::vector<std::pair<int, int>>> admissible;
  detail::for_each_index_pairing(
      static_cast<int>(occ.size()), [&](const std::vector<std::pair<int, int>>& idx) {
        std::vector<std::pair<int, int>> slots;
        for (auto [a, b] : idx) {
          const Occurrence& x = occ[static_cast<std::size_t>(a)];
          const Occurrence& y = occ[static_cast<std::size_t>(b)];
          if (x.coord != y.coord) return;  // delta_ij kills the product
          slots.emplace_back(x.slot - 1, y.slot - 1);
        }
        admissible.push_back(std::move(slots));
      });
  if (admissible.empty()) return 0.0;

  auto integrand = [&](std::span<const double> s) {
    detail::Kahan sum;
    for (const auto& pairing : admissible) {
      double prod = 1.0;
      for (auto [a, b] : pairing)
        prod *= kernel(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]);
      sum.add(prod);
    }
    return sum.sum;
  };
  return integrate_cube(n, kernel, rule, integrand);
}

// Both sides of the hafnian/permutation identity for a symmetric matrix:
//   sum_{pairings P of [n]} prod A_{i,j}  vs  (1/(l! 2^l)) sum_{sigma in S_n} A_{s1,s2}...A_{s(n-1),sn}.
struct HafnianCheck {
  double pairing_sum;
  double permutation_sum;  // already divided by l! 2^l
};

inline HafnianCheck hafnian_identity_check(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  if (n % 2 != 0) throw ValidationError("hafnian_identity_check: n must be even");
  if (n > 8) throw BudgetError("hafnian_identity_check: n capped at 8");
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != n)
      throw ValidationError("hafnian_identity_check: matrix must be square");
  const int l = n / 2;

  detail::Kahan pairing_sum;
  detail::for_each_index_pairing(n, [&](const std::vector<std::pair<int, int>>& idx) {
    double prod = 1.0;
    for (auto [i, j] : idx) prod *= a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    pairing_sum.add(prod);
  });

  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  detail::Kahan perm_sum;
  do {
    double prod = 1.0;
    for (int p = 0; p + 1 < n; p += 2)
      prod *= a[static_cast<std::size_t>(sigma[static_cast<std::size_t>(p)])]
               [static_cast<std::size_t>(sigma[static_cast<std::size_t>(p + 1)])];
    perm_sum.add(prod);
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  const double norm = to_double(factorial(l) * (BigInt(1) << l));
  return {pairing_sum.sum, perm_sum.sum / norm};
}

inline constexpr int kPairingCountMaxDegree = 12;

// Number of pairings of the flat occurrence multiset (vertex j contributes
// deg(v_j) items) inducing exactly the edge multiplicities of g -- the
// pairing count the closed-form factor must reproduce.
inline BigInt pairing_count_for_graph(const Multigraph& g) {
  const int n = g.order();
  std::vector<int> labels;
  for (int j = 0; j < n; ++j)
    for (int d = 0; d < g.degree(j); ++d) labels.push_back(j);
  if (static_cast<int>(labels.size()) > kPairingCountMaxDegree)
    throw BudgetError("pairing_count_for_graph: total degree capped at 12");
  if (labels.size() % 2 != 0) return 0;  // cannot happen for a multigraph
  if (labels.empty()) return 1;

  BigInt count = 0;
  Multigraph induced(n);
  detail::for_each_index_pairing(
      static_cast<int>(labels.size()), [&](const std::vector<std::pair<int, int>>& idx) {
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) induced.set_multiplicity(i, j, 0);
        for (auto [a, b] : idx)
          induced.add_edges(labels[static_cast<std::size_t>(a)],
                            labels[static_cast<std::size_t>(b)]);
        if (induced == g) ++count;
      });
  return count;
}

}  // namespace wickgraph
