#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyzero/expsum.hpp"

namespace lyzero {

enum class Precision { Double, Extended };

std::string to_string(Precision precision);
Precision precision_from_string(const std::string& name);

/// Default tolerance on ||z| - 1| for the Lee-Yang verdict.
inline constexpr double kDefaultCircleTolerance = 1e-8;

struct RootCluster {
  std::vector<std::size_t> members;
  std::complex<double> center;
};

/// All roots of Q(z) = z^N P(z), degree 2N, with multiplicity.
struct ZeroSet {
  std::vector<std::complex<double>> roots;
  /// max |Q(z)| / |Q'(z)| over roots outside clusters.
  double residual = 0.0;
  /// Groups of roots closer than the cluster distance (numerical multiple roots).
  std::vector<RootCluster> clusters;
  int iterations = 0;
  Precision precision = Precision::Double;
};

struct ZeroFinderOptions {
  Precision precision = Precision::Double;
  int max_iterations = 2000;
  double cluster_distance = 1e-7;
  double initial_radius = 1.1;
};

class RootFindingError : public std::runtime_error {
 public:
  RootFindingError(const std::string& what, std::vector<std::complex<double>> best, double residual)
      : std::runtime_error(what), best_iterate(std::move(best)), residual(residual) {}

  std::vector<std::complex<double>> best_iterate;
  double residual;
};

/// Simultaneous Aberth-Ehrlich iteration started on a circle just outside
/// |z| = 1, then Newton polishing. Throws RootFindingError on non-convergence.
ZeroSet find_zeros(const FugacityPolynomial& p, const ZeroFinderOptions& options = {});

struct LeeYangVerdict {
  bool holds = false;
  double max_radial_deviation = 0.0;
  /// Smallest phase φ in (0, π] of a root e^{iφ}; set when holds.
  std::optional<double> first_zero_phase;
  /// φ_1 ≤ φ_2 ≤ ... (one per conjugate pair), set when holds.
  std::vector<double> phases;
  /// γ_j = 1/φ_j², nonincreasing, set when holds.
  std::vector<double> gammas;
  /// Roots whose radial deviation lies within a factor 10 of the tolerance.
  std::vector<std::size_t> borderline;
  double tolerance = kDefaultCircleTolerance;
};

LeeYangVerdict classify(const ZeroSet& zeros, const FugacityPolynomial& p,
                        double tol = kDefaultCircleTolerance);

/// βh zero for a z-plane root: principal log, imaginary part in (-π, π].
std::complex<double> field_zero(std::complex<double> z);

struct TrajectoryPoint {
  double parameter;
  ZeroSet zeros;
  LeeYangVerdict verdict;
};

class TrajectoryError : public std::runtime_error {
 public:
  TrajectoryError(const std::string& what, std::size_t index)
      : std::runtime_error(what), grid_index(index) {}
  std::size_t grid_index;
};

using PolynomialFamily = std::function<FugacityPolynomial(double)>;

struct TrajectoryOptions {
  ZeroFinderOptions finder;
  double tolerance = kDefaultCircleTolerance;
  unsigned threads = 1;
};

/// Zeros and verdicts along a monotone parameter grid. Roots of each point
/// are reordered to follow the nearest roots of the previous point.
std::vector<TrajectoryPoint> zero_trajectory(const PolynomialFamily& family,
                                             std::span<const double> grid,
                                             const TrajectoryOptions& options = {});

nlohmann::json to_json(const ZeroSet& zeros);
nlohmann::json to_json(const LeeYangVerdict& verdict);

}  // namespace lyzero
