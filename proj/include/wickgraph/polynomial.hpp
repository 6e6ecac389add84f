#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wickgraph/errors.hpp"

namespace wickgraph {

// Exponent vector alpha in N_0^m, with x^alpha = x_1^{a_1} ... x_m^{a_m}.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_)
      if (e < 0) throw ValidationError("MultiIndex: negative exponent");
  }

  static MultiIndex zero(int m) { return MultiIndex(std::vector<int>(m, 0)); }

  // e_i scaled by `power` (0-based coordinate).
  static MultiIndex unit(int m, int i, int power = 1) {
    if (i < 0 || i >= m) throw ValidationError("MultiIndex::unit: coordinate out of range");
    std::vector<int> e(m, 0);
    e[i] = power;
    return MultiIndex(std::move(e));
  }

  int dimension() const { return static_cast<int>(exps_.size()); }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }

  int total_degree() const {
    int s = 0;
    for (int e : exps_) s += e;
    return s;
  }

  const std::vector<int>& exponents() const { return exps_; }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    if (a.dimension() != b.dimension())
      throw ValidationError("MultiIndex: dimension mismatch in sum");
    std::vector<int> e(a.exps_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.exps_[i];
    return MultiIndex(std::move(e));
  }

  bool operator==(const MultiIndex&) const = default;
  auto operator<=>(const MultiIndex& o) const {
    return std::lexicographical_compare_three_way(exps_.begin(), exps_.end(),
                                                  o.exps_.begin(), o.exps_.end());
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(exps_[i]);
    }
    return s + ")";
  }

 private:
  std::vector<int> exps_;
};

// Q(x) = sum_alpha q_alpha x^alpha with finite support. Immutable once built;
// zero coefficients are dropped at construction, duplicates are summed.
class Polynomial {
 public:
  explicit Polynomial(int dimension) : dim_(dimension) {
    if (dimension <= 0) throw ValidationError("Polynomial: dimension must be positive");
  }

  Polynomial(int dimension, const std::vector<std::pair<MultiIndex, double>>& terms)
      : Polynomial(dimension) {
    for (const auto& [alpha, q] : terms) accumulate(alpha, q);
    prune();
  }

  // Q(x) = (x, D x) + (c, x), the quadratic-plus-linear potential.
  // Coefficients: q_{e_i} = c_i, q_{2 e_i} = D_ii, q_{e_i + e_j} = 2 D_ij (i != j).
  static Polynomial quadratic_form(const std::vector<std::vector<double>>& d_matrix,
                                   const std::vector<double>& c) {
    const int m = static_cast<int>(c.size());
    if (static_cast<int>(d_matrix.size()) != m)
      throw ValidationError("quadratic_form: D row count must equal dim(c)");
    for (const auto& row : d_matrix)
      if (static_cast<int>(row.size()) != m)
        throw ValidationError("quadratic_form: D must be square");
    Polynomial p(m);
    for (int i = 0; i < m; ++i) {
      p.accumulate(MultiIndex::unit(m, i), c[static_cast<std::size_t>(i)]);
      p.accumulate(MultiIndex::unit(m, i, 2), d_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
      for (int j = i + 1; j < m; ++j) {
        const double dij = d_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const double dji = d_matrix[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        p.accumulate(MultiIndex::unit(m, i) + MultiIndex::unit(m, j), dij + dji);
      }
    }
    p.prune();
    return p;
  }

  int dimension() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }

  // Lexicographically ordered support -> coefficient map.
  const std::map<MultiIndex, double>& terms() const { return terms_; }

  double coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw ValidationError("Polynomial::eval: dimension mismatch");
    double total = 0.0;
    for (const auto& [alpha, q] : terms_) {
      double mono = q;
      for (int i = 0; i < dim_; ++i)
        for (int r = 0; r < alpha[i]; ++r) mono *= x[static_cast<std::size_t>(i)];
      total += mono;
    }
    return total;
  }

 private:
  void accumulate(const MultiIndex& alpha, double q) {
    if (alpha.dimension() != dim_)
      throw ValidationError("Polynomial: term dimension mismatch");
    terms_[alpha] += q;
  }
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
  }

  int dim_;
  std::map<MultiIndex, double> terms_;
};

// One slot choice per time index: (alpha^(1), ..., alpha^(n)).
using AlphaTuple = std::vector<MultiIndex>;

// Element of the occurrence set O(alpha^(1),...,alpha^(n)): slot k in [n],
// coordinate i in [m], replica 1 <= r <= alpha^(k)_i. All fields 1-based.
struct Occurrence {
  int slot;
  int coord;
  int replica;
  auto operator<=>(const Occurrence&) const = default;
};

// Occurrences in lexicographic (k, i, r) order; size = sum of all exponents.
inline std::vector<Occurrence> occurrence_set(const AlphaTuple& t) {
  std::vector<Occurrence> occ;
  for (std::size_t k = 0; k < t.size(); ++k)
    for (int i = 0; i < t[k].dimension(); ++i)
      for (int r = 1; r <= t[k][i]; ++r)
        occ.push_back(Occurrence{static_cast<int>(k) + 1, i + 1, r});
  return occ;
}

inline bool total_degree_is_even(const AlphaTuple& t) {
  int total = 0;
  for (const auto& a : t) total += a.total_degree();
  return total % 2 == 0;
}

// Expansion of Q(Y^(1))...Q(Y^(n)) over the support: visits all
// |support|^n tuples with their coefficient products, in lexicographic order
// over the support enumeration (last slot varies fastest).
template <class Fn>
void for_each_alpha_tuple(const Polynomial& q, int n, Fn&& fn) {
  if (n < 1) throw ValidationError("for_each_alpha_tuple: n must be >= 1");
  if (q.is_zero()) return;
  std::vector<const MultiIndex*> support;
  std::vector<double> coeff;
  for (const auto& [alpha, c] : q.terms()) {
    support.push_back(&alpha);
    coeff.push_back(c);
  }
  const std::size_t s = support.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  AlphaTuple tuple;
  tuple.reserve(static_cast<std::size_t>(n));
  for (;;) {
    tuple.clear();
    double prod = 1.0;
    for (int k = 0; k < n; ++k) {
      tuple.push_back(*support[idx[static_cast<std::size_t>(k)]]);
      prod *= coeff[idx[static_cast<std::size_t>(k)]];
    }
    fn(static_cast<const AlphaTuple&>(tuple), prod);
    int k = n - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == s) {
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

inline std::vector<std::pair<AlphaTuple, double>> alpha_tuples(const Polynomial& q, int n) {
  std::vector<std::pair<AlphaTuple, double>> out;
  for_each_alpha_tuple(q, n, [&](const AlphaTuple& t, double c) { out.emplace_back(t, c); });
  return out;
}

}  // namespace wickgraph
