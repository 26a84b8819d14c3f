#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyzero/partition.hpp"
#include "lyzero/structure.hpp"
#include "lyzero/zeros.hpp"

namespace lyzero {

/// θ ≤ √((e^{βϰ} + e^{-βϰ})/2) = √cosh(βϰ): the pairing-only bound.
double bound_condition_i(double beta_kappa);
/// θ ≤ √((e^{βϰ} + 1)/2): the bound when the pairing also meets condition (ii).
double bound_condition_ii(double beta_kappa);

enum class TheoremBranch { LiebSokal, ConditionI, ConditionII, Silent };
std::string to_string(TheoremBranch branch);

struct BoundReport {
  /// Bottleneck ϰ of condition (i), at unit β (0 without a perfect matching).
  double kappa = 0.0;
  double theta_bound_i = 1.0;
  /// ϰ over condition-(ii) pairings and its bound, when such a pairing exists.
  double kappa_ii = 0.0;
  std::optional<double> theta_bound_ii;
  TheoremBranch applicable = TheoremBranch::Silent;

  /// Largest θ covered by any branch (1 when only the single-spin regime applies).
  double best_bound() const;
};

BoundReport bound_report(const MatchingReport& structure, double beta, double theta);

/// Φ_κ(x, y) = exp(κ D_x D_y) φ(x)φ(y) for the Blume-Capel φ.
struct TwoSpinKernel {
  double kappa;
  double theta;
};

/// Closed form Ψ_κ/(1+θ)², Ψ_κ = θ² - cosh κ + 2θ c_u c_v + e^κ c_u² + e^{-κ} c_v²,
/// with c_u = cosh((x+y)/2), c_v = cosh((x-y)/2).
std::complex<double> two_spin_kernel_value(const TwoSpinKernel& k, std::complex<double> x,
                                           std::complex<double> y);

struct OmegaPair {
  double minus;
  double plus;
};

/// ω_± = e^{-κ}(√cosh κ ± √2 sinh(κ/2)), the factorization roots on the slice θ² = cosh κ.
OmegaPair omega_pm(double kappa);

struct EpsilonPair {
  double minus;
  double plus;
};

/// Roots ε^± = e^{-K}(-θ ± δ) in cosh y of the diagonal pair kernel, with
/// δ = √((e^K - 1)((e^K + 1)/2 - θ²)). Throws std::domain_error when δ is
/// imaginary, i.e. θ exceeds bound_condition_ii(K).
EpsilonPair epsilon_pm(double K, double theta);

struct CorollaryBounds {
  /// Largest Δ with θ = e^{βΔ}/2 inside bound_condition_i(βϰ).
  double delta_max;
  /// Largest thinning probability q with q/(1-q) ≤ bound_condition_i(βϰ).
  double q_max;
  /// Whether delta_max < ϰ/2; reported, never asserted.
  bool delta_max_below_half_kappa;
};

CorollaryBounds corollary_bounds(double beta, double kappa);

/// Smallest β at which a dilute model with thinning q is covered by
/// bound_condition_i(βϰ); 0 when q ≤ 1/2 (covered at every β).
double dilute_beta_threshold(double q, double kappa);

struct KernelScan {
  std::size_t samples = 0;
  double min_modulus = 0.0;
  /// min |Ψ| / (|2θ c_u c_v| + e^κ|c_u|² + e^{-κ}|c_v|²) over the sample.
  double min_relative_modulus = 0.0;
};

/// Samples Φ_κ with θ² = cosh κ on Re x, Re y ∈ (0, 5], |Im x|, |Im y| ≤ 2π.
/// Φ is 2πi-periodic in each variable and |Φ| grows with Re, so this window
/// covers the right half-plane.
KernelScan scan_kernel_nonvanishing(double kappa, std::size_t samples, std::uint64_t seed);

struct VerifyOptions {
  Engine engine = Engine::Auto;
  std::optional<HierarchySpec> hierarchy;
  EngineOptions engine_options;
  ZeroFinderOptions finder;
  double tolerance = kDefaultCircleTolerance;
};

struct VerificationRecord {
  double theta = 0.0;
  double beta = 0.0;
  MatchingReport structure;
  BoundReport bounds;
  /// true when some branch covers θ; empty when the theorem is silent.
  std::optional<bool> predicted;
  LeeYangVerdict observed;
  ZeroSet zeros;

  bool mismatch() const { return predicted.value_or(false) && !observed.holds; }
};

/// Structure check, applicable bound, exact partition function and verdict.
/// The measure must be supported on {-1, 0, +1}.
VerificationRecord verify_theorem1(const ModelInstance& m, const VerifyOptions& options = {});

/// Blume-Capel family over θ sharing the couplings and β of `base`.
PolynomialFamily theta_family(const ModelInstance& base, Engine engine = Engine::Auto,
                              std::optional<HierarchySpec> hierarchy = std::nullopt);

struct SharpnessOptions {
  double width = 1e-4;
  double tolerance = kDefaultCircleTolerance;
  int max_bisections = 200;
};

struct SharpnessResult {
  /// [lower, upper] brackets the first loss of the Lee-Yang property.
  bool bracketed = false;
  double lower = 0.0;
  double upper = 0.0;
  double theta_bound = 0.0;
  /// theta_bound ≤ lower.
  bool bound_respected = false;
  /// lower < theta_bound ≤ upper: the bound is attained to bracket width.
  bool bound_attained = false;
  double gap = 0.0;
  /// A grid point holds after an earlier one failed.
  bool non_monotone = false;
  std::vector<std::pair<double, bool>> grid_verdicts;
};

/// Grid verdicts, then bisection of the first holds→fails step with
/// extended-precision root finding until the bracket is at most `width`.
SharpnessResult sharpness_scan(const PolynomialFamily& family, std::span<const double> grid,
                               double theta_bound, const SharpnessOptions& options = {});

nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const VerificationRecord& record);
nlohmann::json to_json(const SharpnessResult& result);

}  // namespace lyzero
