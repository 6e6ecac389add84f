#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wickgraph/errors.hpp"

namespace wickgraph {

// Labeled multigraph with loops on vertices v_1..v_n, stored as the upper
// triangular adjacency matrix: entry (i,j), i<j, is the multiplicity of the
// edge {v_i,v_j}; entry (i,i) is the loop count at v_i. Loops count twice to
// the degree. Vertices are 0-based in this API.
class Multigraph {
 public:
  explicit Multigraph(int n) : n_(n), upper_(static_cast<std::size_t>(n) * (n + 1) / 2, 0) {
    if (n < 1) throw ValidationError("Multigraph: vertex count must be >= 1");
  }

  // Builds from a full square matrix whose strictly-lower entries must be 0.
  static Multigraph from_upper_rows(const std::vector<std::vector<int>>& rows) {
    const int n = static_cast<int>(rows.size());
    Multigraph g(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
        throw ValidationError("Multigraph: adjacency matrix must be square");
      for (int j = 0; j < n; ++j) {
        const int v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (j < i) {
          if (v != 0) throw ValidationError("Multigraph: entries below the diagonal must be 0");
        } else {
          if (v < 0) throw ValidationError("Multigraph: negative multiplicity");
          g.set_multiplicity(i, j, v);
        }
      }
    }
    return g;
  }

  int order() const { return n_; }

  int multiplicity(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    return upper_[idx(std::min(i, j), std::max(i, j))];
  }

  void set_multiplicity(int i, int j, int h) {
    check_vertex(i);
    check_vertex(j);
    if (h < 0) throw ValidationError("Multigraph: negative multiplicity");
    upper_[idx(std::min(i, j), std::max(i, j))] = h;
  }

  void add_edges(int i, int j, int count = 1) {
    set_multiplicity(i, j, multiplicity(i, j) + count);
  }

  int loop_count(int i) const { return multiplicity(i, i); }

  int degree(int j) const {
    check_vertex(j);
    int d = 2 * loop_count(j);
    for (int k = 0; k < n_; ++k)
      if (k != j) d += multiplicity(j, k);
    return d;
  }

  std::vector<int> degree_sequence() const {
    std::vector<int> d(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) d[static_cast<std::size_t>(j)] = degree(j);
    return d;
  }

  // Total edge multiplicity, loops counted once each.
  int total_edge_multiplicity() const {
    return std::accumulate(upper_.begin(), upper_.end(), 0);
  }

  Multigraph operator+(const Multigraph& o) const {
    if (n_ != o.n_) throw ValidationError("Multigraph: vertex-count mismatch in sum");
    Multigraph r(n_);
    for (std::size_t p = 0; p < upper_.size(); ++p) r.upper_[p] = upper_[p] + o.upper_[p];
    return r;
  }
  Multigraph& operator+=(const Multigraph& o) { return *this = *this + o; }

  bool operator==(const Multigraph&) const = default;
  bool operator<(const Multigraph& o) const {
    return n_ != o.n_ ? n_ < o.n_ : upper_ < o.upper_;
  }

  // Upper-triangular entries in row-major order: (0,0),(0,1),...,(1,1),...
  const std::vector<int>& upper_data() const { return upper_; }

  std::vector<std::vector<int>> upper_rows() const {
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(n_),
                                       std::vector<int>(static_cast<std::size_t>(n_), 0));
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = upper_[idx(i, j)];
    return rows;
  }

  // Compact log form, 1-based vertices: "1-2:2, 3-3:1"; "-" when edgeless.
  std::string edge_list_string() const {
    std::string s;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        const int h = upper_[idx(i, j)];
        if (h == 0) continue;
        if (!s.empty()) s += ", ";
        s += std::to_string(i + 1) + "-" + std::to_string(j + 1) + ":" + std::to_string(h);
      }
    return s.empty() ? "-" : s;
  }

  // New graph with vertex i relabeled to perm[i].
  Multigraph relabeled(std::span<const int> perm) const {
    if (static_cast<int>(perm.size()) != n_)
      throw ValidationError("Multigraph::relabeled: permutation size mismatch");
    Multigraph r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        r.add_edges(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)],
                    upper_[idx(i, j)]);
    return r;
  }

 private:
  void check_vertex(int i) const {
    if (i < 0 || i >= n_) throw ValidationError("Multigraph: vertex index out of range");
  }
  // i <= j
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * (2 * n_ - i + 1) / 2 + static_cast<std::size_t>(j - i);
  }

  int n_;
  std::vector<int> upper_;
};

using DegreeSpec = std::vector<int>;

struct ComponentBlock {
  std::vector<int> vertices;  // original labels, ascending
  Multigraph graph;           // induced sub-multigraph on those vertices
};

struct ComponentDecomposition {
  std::vector<ComponentBlock> blocks;  // ordered by smallest original vertex
};

// Connected components via union-find over edges of multiplicity >= 1.
// Degree-0 vertices come out as singleton blocks with no edges.
inline ComponentDecomposition components(const Multigraph& g) {
  const int n = g.order();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.multiplicity(i, j) > 0) unite(i, j);

  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) groups[static_cast<std::size_t>(find(v))].push_back(v);

  ComponentDecomposition out;
  for (const auto& members : groups) {
    if (members.empty()) continue;
    Multigraph sub(static_cast<int>(members.size()));
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a; b < members.size(); ++b)
        sub.set_multiplicity(static_cast<int>(a), static_cast<int>(b),
                             g.multiplicity(members[a], members[b]));
    out.blocks.push_back(ComponentBlock{members, std::move(sub)});
  }
  return out;
}

namespace detail {

// Backtracks over upper-triangular cells in row-major order, ascending
// values, so the output is lexicographically sorted by upper_data().
inline void enumerate_rec(Multigraph& g, std::vector<int>& rem, int i, int j,
                          std::vector<Multigraph>& out) {
  const int n = g.order();
  if (i == n) {
    out.push_back(g);
    return;
  }
  const int next_i = (j == n - 1) ? i + 1 : i;
  const int next_j = (j == n - 1) ? next_i : j + 1;

  if (i == j) {
    // Loop cell: each loop eats 2 off the remaining degree of v_i.
    int cap_after = 0;  // max degree still reachable from later cells in row i
    for (int k = i + 1; k < n; ++k) cap_after += rem[static_cast<std::size_t>(k)];
    for (int loops = 0; 2 * loops <= rem[static_cast<std::size_t>(i)]; ++loops) {
      const int left = rem[static_cast<std::size_t>(i)] - 2 * loops;
      if (left > cap_after) continue;
      g.set_multiplicity(i, i, loops);
      rem[static_cast<std::size_t>(i)] -= 2 * loops;
      enumerate_rec(g, rem, next_i, next_j, out);
      rem[static_cast<std::size_t>(i)] += 2 * loops;
      g.set_multiplicity(i, i, 0);
    }
    return;
  }

  int cap_after = 0;
  for (int k = j + 1; k < n; ++k) cap_after += rem[static_cast<std::size_t>(k)];
  const int hi = std::min(rem[static_cast<std::size_t>(i)], rem[static_cast<std::size_t>(j)]);
  for (int h = 0; h <= hi; ++h) {
    const int left = rem[static_cast<std::size_t>(i)] - h;
    if (left > cap_after) continue;            // row i cannot be completed
    if (j == n - 1 && left != 0) continue;     // last cell of the row must close it
    g.set_multiplicity(i, j, h);
    rem[static_cast<std::size_t>(i)] -= h;
    rem[static_cast<std::size_t>(j)] -= h;
    enumerate_rec(g, rem, next_i, next_j, out);
    rem[static_cast<std::size_t>(i)] += h;
    rem[static_cast<std::size_t>(j)] += h;
    g.set_multiplicity(i, j, 0);
  }
}

}  // namespace detail

// All multigraphs on n labeled vertices with deg(v_j) = d[j] for every j,
// in deterministic lexicographic order of the upper-triangular entries.
// Odd total degree yields an empty list.
inline std::vector<Multigraph> enumerate_multigraphs(int n, const DegreeSpec& d) {
  if (n < 1) throw ValidationError("enumerate_multigraphs: n must be >= 1");
  if (static_cast<int>(d.size()) != n)
    throw ValidationError("enumerate_multigraphs: degree spec size mismatch");
  for (int x : d)
    if (x < 0) throw ValidationError("enumerate_multigraphs: negative degree");
  std::vector<Multigraph> out;
  const int total = std::accumulate(d.begin(), d.end(), 0);
  if (total % 2 != 0) return out;
  Multigraph g(n);
  std::vector<int> rem(d);
  detail::enumerate_rec(g, rem, 0, 0, out);
  return out;
}

inline constexpr int kCanonicalKeyVertexCap = 8;

// Canonical representative under vertex relabeling: the minimum over all
// vertex permutations of the upper-triangular entry sequence. Equal keys iff
// the multigraphs are isomorphic (as labeled structures up to relabeling).
// Intended for single components; brute force, capped at 8 vertices.
inline std::string canonical_key(const Multigraph& g) {
  const int n = g.order();
  if (n > kCanonicalKeyVertexCap)
    throw BudgetError("canonical_key: component exceeds the " +
                      std::to_string(kCanonicalKeyVertexCap) + "-vertex cap");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best;
  do {
    std::vector<int> cand = g.relabeled(perm).upper_data();
    if (best.empty() || cand < best) best = std::move(cand);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::string key = std::to_string(n) + ":";
  for (std::size_t p = 0; p < best.size(); ++p) {
    if (p) key += ",";
    key += std::to_string(best[p]);
  }
  return key;
}

// Rebuilds the representative multigraph encoded by a canonical key.
inline Multigraph multigraph_from_canonical_key(const std::string& key) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) throw ValidationError("bad canonical key: " + key);
  const int n = std::stoi(key.substr(0, colon));
  Multigraph g(n);
  std::size_t pos = colon + 1;
  std::vector<int> entries;
  while (pos < key.size()) {
    std::size_t next = key.find(',', pos);
    if (next == std::string::npos) next = key.size();
    entries.push_back(std::stoi(key.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (static_cast<int>(entries.size()) != n * (n + 1) / 2)
    throw ValidationError("bad canonical key length: " + key);
  std::size_t p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g.set_multiplicity(i, j, entries[p++]);
  return g;
}

}  // namespace wickgraph
