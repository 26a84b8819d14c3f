#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lyzero/models.hpp"

namespace lyzero {

/// Largest site count handled by the subset dynamic programs.
inline constexpr std::size_t kMatchingSiteCap = 24;
/// Absolute tolerance for the column-equality test of condition (ii).
inline constexpr double kColumnEqualityTolerance = 1e-12;

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unordered site pair stored with first < second (0-based).
using SitePair = std::pair<std::size_t, std::size_t>;
using PairPartition = std::vector<SitePair>;

struct MatchingReport {
  // Condition (i): pairing whose weakest pair is as strong as possible.
  bool has_perfect_matching = false;
  double bottleneck_kappa = 0.0;
  PairPartition matching;

  // Condition (ii): column-equality pairing, if one exists.
  std::optional<PairPartition> condition_ii_partition;
  // Strongest weakest-pair value over all condition-(ii) pairings using only
  // positive entries, with the pairing that attains it.
  double condition_ii_kappa = 0.0;
  std::optional<PairPartition> condition_ii_matching;
  // A single pairing meets condition (ii) and reaches bottleneck_kappa.
  bool simultaneous = false;
};

/// Condition (i). Binary search over distinct positive entries; each
/// threshold is tested with a subset dynamic program. Among optimal
/// pairings the lexicographically smallest sorted pair list is returned.
/// Throws InstanceTooLarge above kMatchingSiteCap sites.
MatchingReport bottleneck_matching(const CouplingMatrix& K);

/// Condition (ii): a pairing in which the two members of every pair see
/// identical couplings from all other sites. Empty when none exists.
std::optional<PairPartition> pair_partition_condition_ii(const CouplingMatrix& K);

/// Both conditions plus the joint (ii)-restricted bottleneck.
MatchingReport analyze_structure(const CouplingMatrix& K);

/// Independent check of a proposed condition-(ii) pairing over every (pair, site).
bool satisfies_condition_ii(const CouplingMatrix& K, const PairPartition& pairs);

nlohmann::json to_json(const MatchingReport& report);

}  // namespace lyzero
