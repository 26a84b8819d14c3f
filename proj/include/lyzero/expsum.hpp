#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "lyzero/models.hpp"

namespace lyzero {

/// 3^16: the largest product expansion or state enumeration allowed by default.
inline constexpr std::size_t kDefaultTermCap = 43046721;

/// Raised when an exact expansion or enumeration would exceed its cap.
class ProblemTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Multivariate exponential sum  e^{log_scale} Σ_t c_t exp(a_t · x).
///
/// Canonical form: terms sorted by frequency vector, no duplicate
/// frequencies, every coefficient strictly positive. Frequencies are integers
/// or half-integers and are stored in half units.
class ExpSum {
 public:
  struct Term {
    double coefficient;
    std::vector<double> frequency;
  };

  ExpSum() = default;
  ExpSum(std::size_t dimension, std::vector<Term> terms);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return coefficients_.size(); }
  double coefficient(std::size_t term) const { return coefficients_[term]; }
  double frequency(std::size_t term, std::size_t site) const {
    return 0.5 * half_frequencies_[term * dimension_ + site];
  }
  std::vector<double> frequency(std::size_t term) const;
  /// Overall factor e^{log_scale}; zero unless an operator application would
  /// otherwise overflow.
  double log_scale() const { return log_scale_; }
  double coefficient_sum() const;

 private:
  friend ExpSum expsum_from_measure(const SpinMeasure&, std::size_t, std::size_t);
  friend ExpSum apply_quadratic_form(const ExpSum&, std::span<const double>, double);

  static ExpSum from_raw(std::size_t dimension, std::vector<double> coefficients,
                         std::vector<std::int8_t> half_frequencies, double log_scale);
  void canonicalize();

  std::size_t dimension_ = 0;
  std::vector<double> coefficients_;
  std::vector<std::int8_t> half_frequencies_;
  double log_scale_ = 0.0;
};

/// Laurent polynomial Σ_{m=-N}^{N} c_m z^m in the fugacity z = e^{βh}, times
/// e^{log_scale}. Coefficients are nonnegative and palindromic with c_N > 0.
class FugacityPolynomial {
 public:
  /// `coefficients` lists c_{-N}..c_N. Near-palindromic input (relative
  /// mismatch ≤ 1e-9) is symmetrized; outer zero pairs are trimmed.
  FugacityPolynomial(std::vector<double> coefficients, double beta, double log_scale = 0.0);

  int degree() const { return static_cast<int>(coefficients_.size() / 2); }
  double coefficient(int m) const;
  std::span<const double> coefficients() const { return coefficients_; }
  double beta() const { return beta_; }
  double log_scale() const { return log_scale_; }

  /// Σ c_m z^m without the e^{log_scale} factor.
  std::complex<double> evaluate(std::complex<double> z) const;
  /// log Z(h = 0), including log_scale.
  double log_value_at_one() const;

 private:
  std::vector<double> coefficients_;
  double beta_;
  double log_scale_;
};

/// ∏_{i<site_count} φ(x_i) expanded as an exponential sum.
ExpSum expsum_from_measure(const SpinMeasure& measure, std::size_t site_count,
                           std::size_t term_cap = kDefaultTermCap);

/// exp(½·scale·Σ K_ij D_i D_j) acting on s. D_i e^{a·x} = a_i e^{a·x}, so the
/// operator multiplies each term by exp(½·scale·aᵀKa) and keeps frequencies.
ExpSum apply_quadratic_exponential(const ExpSum& s, const CouplingMatrix& K, double scale);

/// Same action for an arbitrary symmetric row-major matrix; a nonzero
/// diagonal is allowed here and rescales coefficients.
ExpSum apply_quadratic_form(const ExpSum& s, std::span<const double> matrix, double scale);

/// Sets every x_i = x: term (c, a) contributes c to the coefficient of z^{Σ a_i}.
FugacityPolynomial restrict_to_diagonal(const ExpSum& s, double beta);

/// e^{log_scale} Σ c exp(a · point).
std::complex<double> eval_expsum(const ExpSum& s, std::span<const std::complex<double>> point);

nlohmann::json to_json(const FugacityPolynomial& p);
FugacityPolynomial fugacity_polynomial_from_json(const nlohmann::json& j);

}  // namespace lyzero
