#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "wickgraph/engine.hpp"
#include "wickgraph/errors.hpp"
#include "wickgraph/kernel.hpp"
#include "wickgraph/polynomial.hpp"
#include "wickgraph/rational.hpp"

namespace wickgraph {

struct McConfig {
  long long samples = 100'000;
  std::uint64_t seed = 0x5eed5eed5eed5eedull;
  double jitter = 1e-12;  // PSD regularization added to the Gram diagonal
  int threads = 1;
};

struct McEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  long long samples = 0;
};

namespace detail {

// Counter-based stream: every sample index derives its own generator from
// the master seed, so draws are identical no matter how samples are split
// across threads.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  static SplitMix64 stream(std::uint64_t master_seed, std::uint64_t index) {
    SplitMix64 warm(master_seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    warm.next();
    warm.next();
    return warm;
  }
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in (0,1)
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
  // standard normal via Box-Muller
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * std::numbers::pi * v);
    have_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Lower-triangular Cholesky of G + jitter*I; empty result on failure.
inline bool cholesky(const std::vector<std::vector<double>>& g, double jitter,
                     std::vector<std::vector<double>>& l) {
  const std::size_t n = g.size();
  l.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = g[i][j] + (i == j ? jitter : 0.0);
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        l[i][j] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return true;
}

}  // namespace detail

// Factorization with jitter escalation over three decades
// (jitter, 100*jitter, 10000*jitter) before giving up.
inline std::vector<std::vector<double>> gram_cholesky(const CovarianceKernel& kernel,
                                                      const std::vector<double>& times,
                                                      double jitter = 1e-12) {
  const auto g = kernel.gram(times);
  std::vector<std::vector<double>> l;
  for (int escalation = 0; escalation < 3; ++escalation) {
    if (detail::cholesky(g, jitter, l)) return l;
    jitter *= 100.0;
  }
  throw SamplingError(
      "gram_cholesky: Gram matrix is not positive semidefinite for kernel " + kernel.identity());
}

// Draws X(times) for an m-coordinate process with Cov(X_i(s),X_j(t)) =
// f(s,t) delta_ij: m independent columns, each L z with z standard normal.
// Row k is the R^m value at times[k].
inline std::vector<std::vector<double>> sample_values(const CovarianceKernel& kernel,
                                                      const std::vector<double>& times, int m,
                                                      detail::SplitMix64& rng,
                                                      double jitter = 1e-12) {
  if (m < 1) throw ValidationError("sample_values: dimension must be >= 1");
  for (double t : times)
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("sample_values: time outside [0,1]");
  const std::size_t n = times.size();
  const auto l = gram_cholesky(kernel, times, jitter);
  std::vector<std::vector<double>> x(n, std::vector<double>(static_cast<std::size_t>(m), 0.0));
  std::vector<double> z(n);
  for (int col = 0; col < m; ++col) {
    for (std::size_t k = 0; k < n; ++k) z[k] = rng.normal();
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j <= k; ++j) s += l[k][j] * z[j];
      x[k][static_cast<std::size_t>(col)] = s;
    }
  }
  return x;
}

// Direct Monte Carlo estimate of the time-ordered integral: each sample
// draws s ~ Uniform[0,1]^n, samples the process at the sorted times,
// averages prod_k Q(X(s_k)) and divides by n! (the symmetrization of the
// ordered region). Reproducible bit-for-bit for a fixed (seed, samples),
// independent of the thread count: samples are processed in fixed chunks
// whose partial sums are combined in chunk order.
inline McEstimate mc_estimate(const Polynomial& q, int n, const CovarianceKernel& kernel,
                              const McConfig& cfg) {
  if (n < 1) throw ValidationError("mc_estimate: n must be >= 1");
  if (cfg.samples < 1) throw ValidationError("mc_estimate: need at least one sample");
  const int m = q.dimension();

  constexpr long long kChunk = 8192;
  const long long chunks = (cfg.samples + kChunk - 1) / kChunk;
  std::vector<double> chunk_sum(static_cast<std::size_t>(chunks), 0.0);
  std::vector<double> chunk_sumsq(static_cast<std::size_t>(chunks), 0.0);

  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run_chunk = [&](long long c) {
    detail::Kahan sum, sumsq;
    std::vector<double> times(static_cast<std::size_t>(n));
    std::vector<double> xk(static_cast<std::size_t>(m));
    const long long lo = c * kChunk;
    const long long hi = std::min(cfg.samples, lo + kChunk);
    for (long long s = lo; s < hi; ++s) {
      auto rng = detail::SplitMix64::stream(cfg.seed, static_cast<std::uint64_t>(s));
      for (auto& t : times) t = rng.uniform();
      std::sort(times.begin(), times.end());
      const auto x = sample_values(kernel, times, m, rng, cfg.jitter);
      double prod = 1.0;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < m; ++i)
          xk[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        prod *= q.eval(xk);
      }
      sum.add(prod);
      sumsq.add(prod * prod);
    }
    chunk_sum[static_cast<std::size_t>(c)] = sum.sum;
    chunk_sumsq[static_cast<std::size_t>(c)] = sumsq.sum;
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (long long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < threads; ++tid)
      pool.emplace_back([&, tid] {
        try {
          for (long long c = tid; c < chunks; c += threads) run_chunk(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  detail::Kahan sum, sumsq;
  for (long long c = 0; c < chunks; ++c) {
    sum.add(chunk_sum[static_cast<std::size_t>(c)]);
    sumsq.add(chunk_sumsq[static_cast<std::size_t>(c)]);
  }
  const double count = static_cast<double>(cfg.samples);
  const double raw_mean = sum.sum / count;
  const double var = std::max(0.0, sumsq.sum / count - raw_mean * raw_mean);
  const double sd = std::sqrt(var * count / std::max(1.0, count - 1.0));
  const double nfact = to_double(factorial(n));

  McEstimate est;
  est.samples = cfg.samples;
  est.mean = raw_mean / nfact;
  est.stderr_of_mean = sd / std::sqrt(count) / nfact;
  return est;
}

}  // namespace wickgraph
