#include "lyzero/structure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>

namespace lyzero {

namespace {

using Mask = std::uint64_t;

constexpr std::size_t kSearchSiteCap = 64;

Mask bit(std::size_t i) { return Mask{1} << i; }

// Perfect-matching search on a graph given by adjacency bitmasks. The lowest
// unmatched vertex is always matched next, so each subset is visited at most
// once; dead subsets are memoized.
class PairingSearch {
 public:
  explicit PairingSearch(std::vector<Mask> adjacency)
      : n_(adjacency.size()), adjacency_(std::move(adjacency)) {
    if (n_ <= kMatchingSiteCap) dense_.assign(std::size_t{1} << n_, kUnknown);
  }

  bool feasible() { return n_ % 2 == 0 && solve(full()); }

  // Lexicographically smallest perfect matching; call only when feasible().
  PairPartition smallest() {
    PairPartition pairs;
    Mask mask = full();
    while (mask != 0) {
      const auto i = static_cast<std::size_t>(std::countr_zero(mask));
      Mask candidates = adjacency_[i] & mask & ~bit(i);
      while (candidates != 0) {
        const auto j = static_cast<std::size_t>(std::countr_zero(candidates));
        candidates &= candidates - 1;
        const Mask rest = mask & ~bit(i) & ~bit(j);
        if (solve(rest)) {
          pairs.emplace_back(i, j);
          mask = rest;
          break;
        }
      }
    }
    return pairs;
  }

 private:
  static constexpr std::int8_t kUnknown = -1;

  Mask full() const { return n_ == 64 ? ~Mask{0} : bit(n_) - 1; }

  bool solve(Mask mask) {
    if (mask == 0) return true;
    if (!dense_.empty()) {
      std::int8_t& slot = dense_[static_cast<std::size_t>(mask)];
      if (slot != kUnknown) return slot != 0;
      const bool ok = expand(mask);
      slot = ok ? 1 : 0;
      return ok;
    }
    if (failed_.contains(mask)) return false;
    const bool ok = expand(mask);
    if (!ok) failed_.insert(mask);
    return ok;
  }

  bool expand(Mask mask) {
    const auto i = static_cast<std::size_t>(std::countr_zero(mask));
    Mask candidates = adjacency_[i] & mask & ~bit(i);
    while (candidates != 0) {
      const auto j = static_cast<std::size_t>(std::countr_zero(candidates));
      candidates &= candidates - 1;
      if (solve(mask & ~bit(i) & ~bit(j))) return true;
    }
    return false;
  }

  std::size_t n_;
  std::vector<Mask> adjacency_;
  std::vector<std::int8_t> dense_;
  std::unordered_set<Mask> failed_;
};

std::vector<Mask> threshold_graph(const CouplingMatrix& K, double threshold,
                                  const std::vector<Mask>* restrict_to) {
  const std::size_t n = K.size();
  std::vector<Mask> adjacency(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && K(i, j) > 0.0 && K(i, j) >= threshold) adjacency[i] |= bit(j);
  if (restrict_to != nullptr)
    for (std::size_t i = 0; i < n; ++i) adjacency[i] &= (*restrict_to)[i];
  return adjacency;
}

struct Bottleneck {
  bool found = false;
  double kappa = 0.0;
  PairPartition pairs;
};

// Largest t such that the pairs with K >= t (and K > 0) admit a perfect matching.
Bottleneck max_bottleneck(const CouplingMatrix& K, const std::vector<Mask>* restrict_to) {
  const std::size_t n = K.size();
  if (n > kMatchingSiteCap)
    throw InstanceTooLarge("instance too large for bottleneck matching: " + std::to_string(n) +
                           " sites exceed the cap of " + std::to_string(kMatchingSiteCap));
  Bottleneck result;
  if (n % 2 != 0) return result;

  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (K(i, j) > 0.0 && (restrict_to == nullptr || ((*restrict_to)[i] & bit(j))))
        values.push_back(K(i, j));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) return result;

  auto feasible_at = [&](double t) {
    PairingSearch search(threshold_graph(K, t, restrict_to));
    return search.feasible();
  };
  if (!feasible_at(values.front())) return result;

  // Invariant: values[lo] feasible, values[hi] infeasible (hi may be one past the end).
  std::size_t lo = 0;
  std::size_t hi = values.size();
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible_at(values[mid])) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  PairingSearch search(threshold_graph(K, values[lo], restrict_to));
  search.feasible();
  result.found = true;
  result.kappa = values[lo];
  result.pairs = search.smallest();
  return result;
}

std::vector<Mask> condition_ii_compatibility(const CouplingMatrix& K) {
  const std::size_t n = K.size();
  if (n > kSearchSiteCap)
    throw InstanceTooLarge("instance too large for the condition (ii) search: " +
                           std::to_string(n) + " sites");
  // Row-signature prefilter: compatible rows have equal sums once the pair's
  // own entries are removed.
  std::vector<double> row_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (double e : K.row(i)) row_sums[i] += e;
  const double sum_tolerance = static_cast<double>(n) * kColumnEqualityTolerance;

  std::vector<Mask> compatible(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(row_sums[i] - row_sums[j]) > sum_tolerance) continue;
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k)
        if (k != i && k != j) ok = std::abs(K(k, i) - K(k, j)) <= kColumnEqualityTolerance;
      if (ok) {
        compatible[i] |= bit(j);
        compatible[j] |= bit(i);
      }
    }
  }
  return compatible;
}

}  // namespace

MatchingReport bottleneck_matching(const CouplingMatrix& K) {
  MatchingReport report;
  Bottleneck b = max_bottleneck(K, nullptr);
  report.has_perfect_matching = b.found;
  report.bottleneck_kappa = b.kappa;
  report.matching = std::move(b.pairs);
  return report;
}

std::optional<PairPartition> pair_partition_condition_ii(const CouplingMatrix& K) {
  const std::size_t n = K.size();
  if (n % 2 != 0) return std::nullopt;
  PairingSearch search(condition_ii_compatibility(K));
  if (!search.feasible()) return std::nullopt;
  return search.smallest();
}

MatchingReport analyze_structure(const CouplingMatrix& K) {
  MatchingReport report = bottleneck_matching(K);
  if (K.size() % 2 != 0) return report;
  const std::vector<Mask> compatible = condition_ii_compatibility(K);
  PairingSearch search(compatible);
  if (!search.feasible()) return report;
  report.condition_ii_partition = search.smallest();

  Bottleneck joint = max_bottleneck(K, &compatible);
  if (joint.found) {
    report.condition_ii_kappa = joint.kappa;
    report.condition_ii_matching = std::move(joint.pairs);
    report.simultaneous =
        report.has_perfect_matching && joint.kappa >= report.bottleneck_kappa;
  }
  return report;
}

bool satisfies_condition_ii(const CouplingMatrix& K, const PairPartition& pairs) {
  const std::size_t n = K.size();
  std::vector<int> covered(n, 0);
  for (const auto& [i, j] : pairs) {
    if (i >= n || j >= n || i == j) return false;
    ++covered[i];
    ++covered[j];
  }
  if (std::any_of(covered.begin(), covered.end(), [](int c) { return c != 1; })) return false;
  for (const auto& [i, j] : pairs)
    for (std::size_t k = 0; k < n; ++k)
      if (k != i && k != j && std::abs(K(k, i) - K(k, j)) > kColumnEqualityTolerance) return false;
  return true;
}

namespace {

nlohmann::json pairs_json(const PairPartition& pairs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [i, j] : pairs) out.push_back({i, j});
  return out;
}

}  // namespace

nlohmann::json to_json(const MatchingReport& report) {
  nlohmann::json j;
  j["has_perfect_matching"] = report.has_perfect_matching;
  j["bottleneck_kappa"] = report.bottleneck_kappa;
  j["matching"] = pairs_json(report.matching);
  j["condition_ii_partition"] =
      report.condition_ii_partition ? pairs_json(*report.condition_ii_partition) : nlohmann::json();
  j["condition_ii_kappa"] = report.condition_ii_kappa;
  j["condition_ii_matching"] =
      report.condition_ii_matching ? pairs_json(*report.condition_ii_matching) : nlohmann::json();
  j["simultaneous"] = report.simultaneous;
  return j;
}

}  // namespace lyzero
