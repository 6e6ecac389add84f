#pragma once

#include <map>
#include <utility>
#include <vector>

#include "wickgraph/errors.hpp"
#include "wickgraph/multigraph.hpp"
#include "wickgraph/rational.hpp"

namespace wickgraph {

// Dense non-negative integer matrix, just enough for the factor formulas.
class IntMatrix {
 public:
  IntMatrix(int rows, int cols, long long fill = 0)
      : rows_(rows), cols_(cols),
        a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
    if (rows < 1 || cols < 1) throw ValidationError("IntMatrix: shape must be positive");
    if (fill < 0) throw ValidationError("IntMatrix: negative entry");
  }

  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
    if (rows.empty()) throw ValidationError("IntMatrix: empty matrix");
    IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows_; ++r) {
      if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != m.cols_)
        throw ValidationError("IntMatrix: ragged rows");
      for (int c = 0; c < m.cols_; ++c) {
        const long long v = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        if (v < 0) throw ValidationError("IntMatrix: negative entry");
        m.at(r, c) = v;
      }
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long long& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  long long at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const std::vector<long long>& data() const { return a_; }
  bool operator==(const IntMatrix&) const = default;

 private:
  int rows_, cols_;
  std::vector<long long> a_;
};

// The helper statistics of a non-negative integer matrix A:
// S(A), SC(A,i), SR(A,i), P(A!), P(A), tr(A).
struct MatrixStats {
  BigInt total_sum;                 // S(A)
  std::vector<BigInt> column_sums;  // SC(A,i)
  std::vector<BigInt> row_sums;     // SR(A,i)
  BigInt factorial_product;         // P(A!)
  BigInt entry_product;             // P(A)
  BigInt trace;                     // tr(A) over the main diagonal
};

inline MatrixStats factorial_stats(const IntMatrix& a) {
  MatrixStats s;
  s.total_sum = 0;
  s.factorial_product = 1;
  s.entry_product = 1;
  s.trace = 0;
  s.column_sums.assign(static_cast<std::size_t>(a.cols()), BigInt(0));
  s.row_sums.assign(static_cast<std::size_t>(a.rows()), BigInt(0));
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      const long long v = a.at(r, c);
      s.total_sum += v;
      s.column_sums[static_cast<std::size_t>(c)] += v;
      s.row_sums[static_cast<std::size_t>(r)] += v;
      s.factorial_product *= factorial(v);
      s.entry_product *= v;
      if (r == c) s.trace += v;
    }
  return s;
}

// C(Gamma) = P(A!)/(2^{tr M} P(M!)) with M the upper-triangular adjacency
// matrix and A the degree vector. Always a positive integer, and invariant
// under vertex relabeling.
inline BigInt c_graph(const Multigraph& g) {
  BigInt num = 1;
  for (int j = 0; j < g.order(); ++j) num *= factorial(g.degree(j));
  long long trace = 0;
  BigInt fact_product = 1;
  for (int i = 0; i < g.order(); ++i) {
    trace += g.loop_count(i);
    for (int j = i; j < g.order(); ++j) fact_product *= factorial(g.multiplicity(i, j));
  }
  const BigInt den = (BigInt(1) << trace) * fact_product;
  BigInt q, r;
  divide_qr(num, den, q, r);
  if (r != 0) throw std::logic_error("c_graph: non-integral quotient");
  return q;
}

namespace detail {

// Enumerates matrices Mk <= budget entrywise with SC(Mk,j)+SR(Mk,j) = target[j]
// for all j, invoking fn(Mk) for each. Cell-by-cell backtracking; tally[j]
// tracks SC+SR so far, cap[j] the SC+SR still reachable from later cells.
template <class Fn>
void for_each_constrained_part(const IntMatrix& budget, const std::vector<long long>& target,
                               Fn&& fn) {
  const int n = budget.rows();
  const int cells = n * n;
  IntMatrix mk(n, n, 0);
  std::vector<long long> tally(static_cast<std::size_t>(n), 0);
  // suffix capacity: cap[cell][j] = sum over cells >= cell of budget * (touches j)
  std::vector<std::vector<long long>> cap(static_cast<std::size_t>(cells) + 1,
                                          std::vector<long long>(static_cast<std::size_t>(n), 0));
  for (int cell = cells - 1; cell >= 0; --cell) {
    const int r = cell / n, c = cell % n;
    cap[static_cast<std::size_t>(cell)] = cap[static_cast<std::size_t>(cell) + 1];
    cap[static_cast<std::size_t>(cell)][static_cast<std::size_t>(r)] += budget.at(r, c);
    cap[static_cast<std::size_t>(cell)][static_cast<std::size_t>(c)] += budget.at(r, c);
  }

  auto feasible_from = [&](int cell) {
    for (int j = 0; j < n; ++j) {
      const long long t = tally[static_cast<std::size_t>(j)];
      if (t > target[static_cast<std::size_t>(j)]) return false;
      if (t + cap[static_cast<std::size_t>(cell)][static_cast<std::size_t>(j)] <
          target[static_cast<std::size_t>(j)])
        return false;
    }
    return true;
  };

  auto rec = [&](auto&& self, int cell) -> void {
    if (!feasible_from(cell)) return;
    if (cell == cells) {
      fn(static_cast<const IntMatrix&>(mk));
      return;
    }
    const int r = cell / n, c = cell % n;
    const long long diag_weight = (r == c) ? 2 : 1;
    long long hi = budget.at(r, c);
    hi = std::min(hi, (target[static_cast<std::size_t>(r)] - tally[static_cast<std::size_t>(r)]) /
                          diag_weight);
    if (r != c)
      hi = std::min(hi, target[static_cast<std::size_t>(c)] - tally[static_cast<std::size_t>(c)]);
    for (long long v = 0; v <= hi; ++v) {
      mk.at(r, c) = v;
      tally[static_cast<std::size_t>(r)] += v * diag_weight;
      if (r != c) tally[static_cast<std::size_t>(c)] += v;
      self(self, cell + 1);
      tally[static_cast<std::size_t>(r)] -= v * diag_weight;
      if (r != c) tally[static_cast<std::size_t>(c)] -= v;
      mk.at(r, c) = 0;
    }
  };
  rec(rec, 0);
}

}  // namespace detail

// C(M, A) for M in N_0^{n x n} and A in N_0^{n x l}:
//   P(A!)/2^{tr M} * sum_{M_1+...+M_l = M, SC(M_k,j)+SR(M_k,j) = A_{j,k}} prod_k 1/P(M_k!)
// evaluated exactly. An empty decomposition set yields 0. For l = 1 with M
// upper triangular and A its degree vector this reduces to c_graph. Exposed
// for integrality testing; the evaluation path only ever needs c_graph.
inline BigInt c_general(const IntMatrix& m, const IntMatrix& a) {
  const int n = m.rows();
  if (m.cols() != n) throw ValidationError("c_general: M must be square");
  if (a.rows() != n) throw ValidationError("c_general: A must have as many rows as M");
  const int l = a.cols();

  std::map<std::pair<int, std::vector<long long>>, Rational> memo;

  auto rec = [&](auto&& self, int k, const IntMatrix& budget) -> Rational {
    if (k == l) {
      for (long long v : budget.data())
        if (v != 0) return Rational(0);
      return Rational(1);
    }
    const auto key = std::make_pair(k, budget.data());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<long long> target(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) target[static_cast<std::size_t>(j)] = a.at(j, k);
    Rational sum = 0;
    detail::for_each_constrained_part(budget, target, [&](const IntMatrix& mk) {
      BigInt pfact = 1;
      for (long long v : mk.data()) pfact *= factorial(v);
      IntMatrix rest = budget;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) rest.at(r, c) -= mk.at(r, c);
      sum += self(self, k + 1, rest) / Rational(pfact);
    });
    memo.emplace(key, sum);
    return sum;
  };

  const Rational inner = rec(rec, 0, m);
  BigInt pa_fact = 1;
  for (long long v : a.data()) pa_fact *= factorial(v);
  long long trace = 0;
  for (int j = 0; j < n; ++j) trace += m.at(j, j);
  const Rational total = Rational(pa_fact) / Rational(BigInt(1) << trace) * inner;
  if (denominator(total) != 1) throw std::logic_error("c_general: non-integral value");
  return numerator(total);
}

}  // namespace wickgraph
