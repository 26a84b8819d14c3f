#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the engines it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Partition sum by full enumeration of integer-spin configurations in long
/// double. Returns coefficients of z^m, m = -n*smax..n*smax.
inline std::vector<long double> gibbs_sum(const std::vector<std::pair<int, double>>& atoms,
                                          const std::vector<double>& K, std::size_t n,
                                          double beta) {
  int smax = 0;
  for (const auto& [s, w] : atoms) smax = std::max(smax, std::abs(s));
  const int extent = static_cast<int>(n) * smax;
  std::vector<long double> c(static_cast<std::size_t>(2 * extent + 1), 0.0L);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= atoms.size();
  std::vector<int> spin(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    long double weight = 1.0L;
    int magnet = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& [s, w] = atoms[rest % atoms.size()];
      rest /= atoms.size();
      spin[i] = s;
      weight *= w;
      magnet += s;
    }
    long double energy = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) energy += K[i * n + j] * spin[i] * spin[j];
    c[static_cast<std::size_t>(magnet + extent)] += weight * std::exp(0.5L * beta * energy);
  }
  return c;
}

inline std::vector<std::pair<int, double>> blume_capel_atoms(double theta) {
  const double edge = 1.0 / (2.0 * (1.0 + theta));
  return {{-1, edge}, {0, theta / (1.0 + theta)}, {1, edge}};
}

inline std::vector<std::pair<int, double>> ising_atoms() { return {{-1, 0.5}, {1, 0.5}}; }

using Pairing = std::vector<std::pair<std::size_t, std::size_t>>;

/// All (n-1)!! perfect pairings of {0..n-1}.
inline void all_pairings(std::vector<std::size_t> rest, Pairing& current, std::vector<Pairing>& out) {
  if (rest.empty()) {
    out.push_back(current);
    return;
  }
  const std::size_t first = rest.front();
  for (std::size_t k = 1; k < rest.size(); ++k) {
    std::vector<std::size_t> next;
    for (std::size_t t = 1; t < rest.size(); ++t)
      if (t != k) next.push_back(rest[t]);
    current.emplace_back(first, rest[k]);
    all_pairings(next, current, out);
    current.pop_back();
  }
}

inline std::vector<Pairing> all_pairings(std::size_t n) {
  std::vector<Pairing> out;
  if (n % 2 != 0) return out;
  std::vector<std::size_t> rest(n);
  for (std::size_t i = 0; i < n; ++i) rest[i] = i;
  Pairing current;
  all_pairings(rest, current, out);
  return out;
}

/// max over pairings of min pair entry, counting only pairings with all entries > 0.
inline std::pair<bool, double> exhaustive_bottleneck(const std::vector<double>& K, std::size_t n) {
  bool found = false;
  double best = 0.0;
  for (const Pairing& p : all_pairings(n)) {
    double weakest = INFINITY;
    for (const auto& [i, j] : p) weakest = std::min(weakest, K[i * n + j]);
    if (weakest > 0.0 && (!found || weakest > best)) {
      found = true;
      best = weakest;
    }
  }
  return {found, best};
}

/// Random symmetric nonnegative matrix with zero diagonal; entries are zero
/// with probability `sparsity`, otherwise uniform in [lo, hi].
inline std::vector<double> random_coupling(std::size_t n, std::mt19937_64& rng, double sparsity,
                                           double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> value(lo, hi);
  std::vector<double> K(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = u(rng) < sparsity ? 0.0 : value(rng);
      K[i * n + j] = K[j * n + i] = v;
    }
  return K;
}

/// Roots of a z^2 + b z + c by the quadratic formula.
inline std::pair<std::complex<double>, std::complex<double>> quadratic_roots(double a, double b,
                                                                             double c) {
  const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * a * c));
  return {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)};
}

}  // namespace oracle
