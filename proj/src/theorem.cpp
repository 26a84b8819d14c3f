#include "lyzero/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lyzero {

namespace {

void require_nonnegative(double beta_kappa) {
  if (!(beta_kappa >= 0.0) || !std::isfinite(beta_kappa))
    throw std::invalid_argument("beta*kappa must be nonnegative and finite");
}

// ln(e^x + e^{-x}) without overflow.
double log_two_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

bool verdict_at(const PolynomialFamily& family, double theta, Precision precision, double tol) {
  const FugacityPolynomial p = family(theta);
  ZeroFinderOptions finder;
  finder.precision = precision;
  return classify(find_zeros(p, finder), p, tol).holds;
}

}  // namespace

double bound_condition_i(double beta_kappa) {
  require_nonnegative(beta_kappa);
  return std::sqrt(std::cosh(beta_kappa));
}

double bound_condition_ii(double beta_kappa) {
  require_nonnegative(beta_kappa);
  return std::sqrt((std::exp(beta_kappa) + 1.0) / 2.0);
}

std::string to_string(TheoremBranch branch) {
  switch (branch) {
    case TheoremBranch::LiebSokal:
      return "lieb_sokal";
    case TheoremBranch::ConditionI:
      return "condition_i";
    case TheoremBranch::ConditionII:
      return "condition_ii";
    case TheoremBranch::Silent:
      return "silent";
  }
  return "unknown";
}

double BoundReport::best_bound() const {
  return std::max({1.0, theta_bound_i, theta_bound_ii.value_or(1.0)});
}

BoundReport bound_report(const MatchingReport& structure, double beta, double theta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  BoundReport r;
  r.kappa = structure.has_perfect_matching ? structure.bottleneck_kappa : 0.0;
  r.theta_bound_i = bound_condition_i(beta * r.kappa);
  if (structure.condition_ii_matching && structure.condition_ii_kappa > 0.0) {
    r.kappa_ii = structure.condition_ii_kappa;
    r.theta_bound_ii = bound_condition_ii(beta * r.kappa_ii);
  }
  if (theta <= 1.0) {
    r.applicable = TheoremBranch::LiebSokal;
  } else if (r.kappa > 0.0 && theta <= r.theta_bound_i) {
    r.applicable = TheoremBranch::ConditionI;
  } else if (r.theta_bound_ii && theta <= *r.theta_bound_ii) {
    r.applicable = TheoremBranch::ConditionII;
  } else {
    r.applicable = TheoremBranch::Silent;
  }
  return r;
}

std::complex<double> two_spin_kernel_value(const TwoSpinKernel& k, std::complex<double> x,
                                           std::complex<double> y) {
  const double theta = k.theta;
  const double kappa = k.kappa;
  const std::complex<double> cu = std::cosh((x + y) / 2.0);
  const std::complex<double> cv = std::cosh((x - y) / 2.0);
  const std::complex<double> psi = theta * theta - std::cosh(kappa) + 2.0 * theta * cu * cv +
                                   std::exp(kappa) * cu * cu + std::exp(-kappa) * cv * cv;
  return psi / ((1.0 + theta) * (1.0 + theta));
}

OmegaPair omega_pm(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
  const double root = std::sqrt(std::cosh(kappa));
  const double split = std::numbers::sqrt2 * std::sinh(kappa / 2.0);
  const double scale = std::exp(-kappa);
  return {scale * (root - split), scale * (root + split)};
}

EpsilonPair epsilon_pm(double K, double theta) {
  if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("K must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  const double eK = std::exp(K);
  double delta_sq = std::expm1(K) * ((eK + 1.0) / 2.0 - theta * theta);
  if (delta_sq < 0.0) {
    // Rounding at the boundary θ² = (e^K + 1)/2 is tolerated.
    if (delta_sq < -1e-14 * eK * eK)
      throw std::domain_error("delta imaginary; bound violated: theta exceeds sqrt((e^K + 1)/2)");
    delta_sq = 0.0;
  }
  const double delta = std::sqrt(delta_sq);
  return {(-theta - delta) / eK, (-theta + delta) / eK};
}

CorollaryBounds corollary_bounds(double beta, double kappa) {
  if (!(beta > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("beta and kappa must be positive");
  CorollaryBounds c;
  c.delta_max = (std::numbers::ln2 + log_two_cosh(beta * kappa)) / (2.0 * beta);
  const double t = bound_condition_i(beta * kappa);
  c.q_max = t / (1.0 + t);
  c.delta_max_below_half_kappa = c.delta_max < kappa / 2.0;
  return c;
}

double dilute_beta_threshold(double q, double kappa) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in [0, 1)");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  const double ratio = q / (1.0 - q);
  if (ratio <= 1.0) return 0.0;
  // √cosh(βϰ) ≥ ratio  ⇔  βϰ ≥ arccosh(ratio²).
  return std::acosh(ratio * ratio) / kappa;
}

KernelScan scan_kernel_nonvanishing(double kappa, std::size_t samples, std::uint64_t seed) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  const double theta = std::sqrt(std::cosh(kappa));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(0.0, 5.0);
  std::uniform_real_distribution<double> im(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  KernelScan scan;
  scan.samples = samples;
  scan.min_modulus = std::numeric_limits<double>::infinity();
  scan.min_relative_modulus = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    double rx = re(rng);
    double ry = re(rng);
    // The half-open window (0, 5]: redraw the measure-zero endpoint.
    while (rx == 0.0) rx = re(rng);
    while (ry == 0.0) ry = re(rng);
    const std::complex<double> x(rx, im(rng));
    const std::complex<double> y(ry, im(rng));
    const std::complex<double> cu = std::cosh((x + y) / 2.0);
    const std::complex<double> cv = std::cosh((x - y) / 2.0);
    const double scale = std::abs(2.0 * theta * cu * cv) + std::exp(kappa) * std::norm(cu) +
                         std::exp(-kappa) * std::norm(cv);
    const double modulus = std::abs(two_spin_kernel_value({kappa, theta}, x, y)) *
                           (1.0 + theta) * (1.0 + theta);
    scan.min_modulus = std::min(scan.min_modulus, modulus);
    scan.min_relative_modulus = std::min(scan.min_relative_modulus, modulus / scale);
  }
  return scan;
}

VerificationRecord verify_theorem1(const ModelInstance& m, const VerifyOptions& options) {
  m.validate();
  VerificationRecord rec;
  rec.theta = m.measure.theta();
  rec.beta = m.beta;
  rec.structure = analyze_structure(m.coupling);
  rec.bounds = bound_report(rec.structure, m.beta, rec.theta);
  if (rec.bounds.applicable != TheoremBranch::Silent) rec.predicted = true;

  const FugacityPolynomial p =
      compute_partition(m, options.engine, options.hierarchy, options.engine_options);
  rec.zeros = find_zeros(p, options.finder);
  rec.observed = classify(rec.zeros, p, options.tolerance);
  return rec;
}

PolynomialFamily theta_family(const ModelInstance& base, Engine engine,
                              std::optional<HierarchySpec> hierarchy) {
  return [base, engine, hierarchy = std::move(hierarchy)](double theta) {
    const ModelInstance m{blume_capel_measure(theta), base.coupling, base.beta};
    return compute_partition(m, engine, hierarchy);
  };
}

SharpnessResult sharpness_scan(const PolynomialFamily& family, std::span<const double> grid,
                               double theta_bound, const SharpnessOptions& options) {
  if (grid.empty()) throw std::invalid_argument("sharpness grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("sharpness grid must be increasing");
  SharpnessResult r;
  r.theta_bound = theta_bound;

  std::optional<std::size_t> first_fail;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool holds = verdict_at(family, grid[i], Precision::Double, options.tolerance);
    r.grid_verdicts.emplace_back(grid[i], holds);
    if (!holds && !first_fail) first_fail = i;
    if (holds && first_fail) r.non_monotone = true;
  }
  if (!first_fail || *first_fail == 0) return r;

  double lower = grid[*first_fail - 1];
  double upper = grid[*first_fail];
  for (int step = 0; step < options.max_bisections && upper - lower > options.width; ++step) {
    const double mid = 0.5 * (lower + upper);
    if (verdict_at(family, mid, Precision::Extended, options.tolerance)) {
      lower = mid;
    } else {
      upper = mid;
    }
  }
  r.bracketed = true;
  r.lower = lower;
  r.upper = upper;
  r.bound_respected = theta_bound <= lower;
  r.bound_attained = lower < theta_bound && theta_bound <= upper;
  r.gap = lower - theta_bound;
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["kappa"] = r.kappa;
  j["theta_bound_i"] = r.theta_bound_i;
  j["kappa_ii"] = r.kappa_ii;
  j["theta_bound_ii"] = r.theta_bound_ii ? nlohmann::json(*r.theta_bound_ii) : nlohmann::json();
  j["applicable"] = to_string(r.applicable);
  return j;
}

nlohmann::json to_json(const VerificationRecord& rec) {
  nlohmann::json j;
  j["theta"] = rec.theta;
  j["beta"] = rec.beta;
  j["structure"] = to_json(rec.structure);
  j["bounds"] = to_json(rec.bounds);
  j["predicted"] = rec.predicted ? nlohmann::json(*rec.predicted) : nlohmann::json("theorem silent");
  j["observed"] = to_json(rec.observed);
  j["mismatch"] = rec.mismatch();
  return j;
}

nlohmann::json to_json(const SharpnessResult& r) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& [theta, holds] : r.grid_verdicts) grid.push_back({{"theta", theta}, {"holds", holds}});
  return {{"bracketed", r.bracketed},          {"lower", r.lower},
          {"upper", r.upper},                  {"theta_bound", r.theta_bound},
          {"bound_respected", r.bound_respected}, {"bound_attained", r.bound_attained},
          {"gap", r.gap},                      {"non_monotone", r.non_monotone},
          {"grid", grid}};
}

}  // namespace lyzero
