#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wickgraph/errors.hpp"

namespace wickgraph {

// Symmetric covariance function f : [0,1]^2 -> R. Presets are exact closed
// forms; grid kernels bilinearly interpolate a symmetric N x N table on the
// uniform nodes 0, 1/(N-1), ..., 1.
//
// The evaluation identity needs only symmetry and continuity. Positive
// semidefiniteness matters only when a kernel is used to *sample* a process
// (Monte Carlo); it is checked there, not here.
class CovarianceKernel {
 public:
  enum class Preset { BrownianMotion, BrownianBridge, Product, Constant, Exponential, Grid };

  static CovarianceKernel brownian_motion() { return CovarianceKernel(Preset::BrownianMotion); }
  static CovarianceKernel brownian_bridge() { return CovarianceKernel(Preset::BrownianBridge); }
  static CovarianceKernel product() { return CovarianceKernel(Preset::Product); }
  static CovarianceKernel constant() { return CovarianceKernel(Preset::Constant); }

  static CovarianceKernel exponential(double rho) {
    if (!(rho > 0)) throw ValidationError("exponential kernel: scale rho must be > 0");
    CovarianceKernel k(Preset::Exponential);
    k.rho_ = rho;
    return k;
  }

  // Symmetrizes the table as (T + T^t)/2; warns on stderr when the applied
  // correction exceeds 1e-9, rejects input beyond 1e-12 residual asymmetry
  // after symmetrization (cannot happen numerically, kept as the contract).
  static CovarianceKernel from_grid(std::vector<std::vector<double>> table) {
    const int n = static_cast<int>(table.size());
    if (n < 2) throw ValidationError("grid kernel: need at least a 2x2 table");
    for (const auto& row : table)
      if (static_cast<int>(row.size()) != n)
        throw ValidationError("grid kernel: table must be square");
    double max_asym = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double a = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const double b = table[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        max_asym = std::max(max_asym, std::abs(a - b) / 2.0);
        const double sym = (a + b) / 2.0;
        table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = sym;
        table[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = sym;
      }
    if (max_asym > 1e-9)
      std::cerr << "[wickgraph] warning: grid kernel symmetrized, max correction " << max_asym
                << "\n";
    CovarianceKernel k(Preset::Grid);
    k.table_ = std::move(table);
    k.grid_n_ = n;
    return k;
  }

  // CSV of N rows x N columns on the uniform nodes.
  static CovarianceKernel load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("grid kernel: cannot open " + path);
    std::vector<std::vector<double>> table;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        try {
          row.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw ValidationError("grid kernel: bad number '" + cell + "' in " + path);
        }
      }
      table.push_back(std::move(row));
    }
    return from_grid(std::move(table));
  }

  static CovarianceKernel from_preset_name(const std::string& name, double rho = 1.0) {
    if (name == "brownian_motion") return brownian_motion();
    if (name == "brownian_bridge") return brownian_bridge();
    if (name == "product") return product();
    if (name == "constant") return constant();
    if (name == "exponential") return exponential(rho);
    throw ValidationError("unknown kernel preset: " + name);
  }

  Preset preset() const { return preset_; }

  double operator()(double s, double t) const {
    check_time(s);
    check_time(t);
    switch (preset_) {
      case Preset::BrownianMotion:
        return std::min(s, t);
      case Preset::BrownianBridge:
        return std::min(s, t) - s * t;
      case Preset::Product:
        return s * t;
      case Preset::Constant:
        return 1.0;
      case Preset::Exponential:
        return std::exp(-std::abs(s - t) / rho_);
      case Preset::Grid:
        return grid_eval(s, t);
    }
    return 0.0;  // unreachable
  }

  // Gram matrix G_ij = f(times_i, times_j); exactly symmetric by construction.
  std::vector<std::vector<double>> gram(const std::vector<double>& times) const {
    const std::size_t n = times.size();
    std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g[i][j] = g[j][i] = (*this)(times[i], times[j]);
    return g;
  }

  // Polynomial in (s,t): a tensor Gauss-Legendre rule of sufficient order
  // integrates products of these exactly.
  bool polynomial_smooth() const {
    return preset_ == Preset::Product || preset_ == Preset::Constant;
  }

  // Kink along s = t (min / |s-t| based kernels).
  bool diagonal_kink() const {
    return preset_ == Preset::BrownianMotion || preset_ == Preset::BrownianBridge ||
           preset_ == Preset::Exponential;
  }

  // Number of grid cells per axis (0 for analytic presets). Quadrature panels
  // aligned to a multiple of this integrate the bilinear patches exactly.
  int grid_cells() const { return preset_ == Preset::Grid ? grid_n_ - 1 : 0; }

  // Stable identity string for memo keys and logs.
  std::string identity() const {
    switch (preset_) {
      case Preset::BrownianMotion:
        return "brownian_motion";
      case Preset::BrownianBridge:
        return "brownian_bridge";
      case Preset::Product:
        return "product";
      case Preset::Constant:
        return "constant";
      case Preset::Exponential:
        return "exponential:" + std::to_string(rho_);
      case Preset::Grid: {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the table bytes
        for (const auto& row : table_)
          for (double v : row) {
            std::uint64_t bits;
            static_assert(sizeof bits == sizeof v);
            std::memcpy(&bits, &v, sizeof v);
            for (int b = 0; b < 8; ++b) {
              h ^= (bits >> (8 * b)) & 0xffu;
              h *= 1099511628211ull;
            }
          }
        return "grid:" + std::to_string(grid_n_) + ":" + std::to_string(h);
      }
    }
    return "?";
  }

  double scale_rho() const { return rho_; }
  const std::vector<std::vector<double>>& grid_table() const { return table_; }

 private:
  explicit CovarianceKernel(Preset p) : preset_(p) {}

  static void check_time(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("kernel: time outside [0,1]");
  }

  double grid_eval(double s, double t) const {
    const int cells = grid_n_ - 1;
    const double xs = s * cells, xt = t * cells;
    const int i = std::min(static_cast<int>(xs), cells - 1);
    const int j = std::min(static_cast<int>(xt), cells - 1);
    const double u = xs - i, v = xt - j;
    const auto& tb = table_;
    const auto f = [&](int a, int b) {
      return tb[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    };
    return (1 - u) * (1 - v) * f(i, j) + u * (1 - v) * f(i + 1, j) + (1 - u) * v * f(i, j + 1) +
           u * v * f(i + 1, j + 1);
  }

  Preset preset_;
  double rho_ = 1.0;
  std::vector<std::vector<double>> table_;
  int grid_n_ = 0;
};

}  // namespace wickgraph
