#include "lyzero/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace lyzero {

namespace {

// exp() stays finite below ~709.78; keep headroom for later products.
constexpr double kLogRescaleThreshold = 600.0;
constexpr double kFoldLimit = 700.0;

std::int8_t to_half_units(double position) {
  return static_cast<std::int8_t>(std::lround(2.0 * position));
}

bool lexicographically_less(const std::int8_t* a, const std::int8_t* b, std::size_t dim) {
  return std::lexicographical_compare(a, a + dim, b, b + dim);
}

}  // namespace

ExpSum::ExpSum(std::size_t dimension, std::vector<Term> terms) : dimension_(dimension) {
  if (dimension == 0) throw std::invalid_argument("exponential sum needs at least one variable");
  coefficients_.reserve(terms.size());
  half_frequencies_.reserve(terms.size() * dimension);
  for (const Term& t : terms) {
    if (t.frequency.size() != dimension)
      throw std::invalid_argument("exponential sum term has wrong frequency dimension");
    if (!(t.coefficient >= 0.0) || !std::isfinite(t.coefficient))
      throw std::invalid_argument("exponential sum coefficients must be nonnegative and finite");
    coefficients_.push_back(t.coefficient);
    for (double a : t.frequency) {
      const double twice = 2.0 * a;
      if (std::abs(twice - std::round(twice)) > 1e-12 || std::abs(twice) > 127.0)
        throw std::invalid_argument("frequencies must be integers or half-integers");
      half_frequencies_.push_back(to_half_units(a));
    }
  }
  canonicalize();
}

ExpSum ExpSum::from_raw(std::size_t dimension, std::vector<double> coefficients,
                        std::vector<std::int8_t> half_frequencies, double log_scale) {
  ExpSum s;
  s.dimension_ = dimension;
  s.coefficients_ = std::move(coefficients);
  s.half_frequencies_ = std::move(half_frequencies);
  s.log_scale_ = log_scale;
  s.canonicalize();
  return s;
}

void ExpSum::canonicalize() {
  const std::size_t n = coefficients_.size();
  const std::size_t d = dimension_;
  auto key = [&](std::size_t t) { return half_frequencies_.data() + t * d; };

  bool strictly_sorted = true;
  for (std::size_t t = 1; t < n && strictly_sorted; ++t)
    strictly_sorted = lexicographically_less(key(t - 1), key(t), d);
  const bool all_positive =
      std::all_of(coefficients_.begin(), coefficients_.end(), [](double c) { return c > 0.0; });
  if (strictly_sorted && all_positive) return;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lexicographically_less(key(a), key(b), d);
  });

  std::vector<double> coefficients;
  std::vector<std::int8_t> frequencies;
  coefficients.reserve(n);
  frequencies.reserve(n * d);
  for (std::size_t i = 0; i < n;) {
    const std::size_t first = order[i];
    double sum = 0.0;
    std::size_t j = i;
    while (j < n && std::equal(key(first), key(first) + d, key(order[j]))) {
      sum += coefficients_[order[j]];
      ++j;
    }
    if (sum > 0.0) {
      coefficients.push_back(sum);
      frequencies.insert(frequencies.end(), key(first), key(first) + d);
    }
    i = j;
  }
  coefficients_ = std::move(coefficients);
  half_frequencies_ = std::move(frequencies);
}

std::vector<double> ExpSum::frequency(std::size_t term) const {
  std::vector<double> out(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) out[i] = frequency(term, i);
  return out;
}

double ExpSum::coefficient_sum() const {
  return std::exp(log_scale_) * std::accumulate(coefficients_.begin(), coefficients_.end(), 0.0);
}

FugacityPolynomial::FugacityPolynomial(std::vector<double> coefficients, double beta,
                                       double log_scale)
    : coefficients_(std::move(coefficients)), beta_(beta), log_scale_(log_scale) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
  if (!std::isfinite(log_scale)) throw std::invalid_argument("log_scale must be finite");
  if (coefficients_.size() % 2 == 0)
    throw std::invalid_argument("fugacity polynomial needs an odd coefficient count (c_-N..c_N)");
  for (double c : coefficients_)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("fugacity polynomial coefficients must be nonnegative and finite");
  while (coefficients_.size() > 1 && coefficients_.front() == 0.0 && coefficients_.back() == 0.0) {
    coefficients_.pop_back();
    coefficients_.erase(coefficients_.begin());
  }
  const double largest = *std::max_element(coefficients_.begin(), coefficients_.end());
  if (!(largest > 0.0)) throw std::invalid_argument("fugacity polynomial is identically zero");

  const std::size_t size = coefficients_.size();
  for (std::size_t i = 0; i < size / 2; ++i) {
    double& lo = coefficients_[i];
    double& hi = coefficients_[size - 1 - i];
    const double gap = std::abs(lo - hi);
    if (gap > 1e-9 * std::max(lo, hi) + 1e-14 * largest)
      throw std::invalid_argument("fugacity polynomial is not palindromic at m = " +
                                  std::to_string(size / 2 - i));
    lo = hi = 0.5 * (lo + hi);
  }
  if (coefficients_.back() == 0.0 && size > 1)
    throw std::invalid_argument("fugacity polynomial leading coefficient vanishes");

  if (log_scale_ != 0.0) {
    double smallest = largest;
    for (double c : coefficients_)
      if (c > 0.0) smallest = std::min(smallest, c);
    if (std::log(largest) + log_scale_ < kFoldLimit &&
        std::log(smallest) + log_scale_ > -kFoldLimit) {
      const double factor = std::exp(log_scale_);
      for (double& c : coefficients_) c *= factor;
      log_scale_ = 0.0;
    }
  }
}

double FugacityPolynomial::coefficient(int m) const {
  const int n = degree();
  if (m < -n || m > n) return 0.0;
  return coefficients_[static_cast<std::size_t>(m + n)];
}

std::complex<double> FugacityPolynomial::evaluate(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * z + *it;
  return acc * std::pow(z, -degree());
}

double FugacityPolynomial::log_value_at_one() const {
  return std::log(std::accumulate(coefficients_.begin(), coefficients_.end(), 0.0)) + log_scale_;
}

ExpSum expsum_from_measure(const SpinMeasure& measure, std::size_t site_count,
                           std::size_t term_cap) {
  if (site_count == 0) throw std::invalid_argument("site_count must be at least 1");
  const std::size_t atoms = measure.atom_count();
  std::size_t terms = 1;
  for (std::size_t i = 0; i < site_count; ++i) {
    if (terms > term_cap / atoms)
      throw ProblemTooLarge("problem too large for exact expansion: " + std::to_string(atoms) +
                            "^" + std::to_string(site_count) + " terms exceed the cap of " +
                            std::to_string(term_cap));
    terms *= atoms;
  }

  std::vector<double> coefficients(terms);
  std::vector<std::int8_t> frequencies(terms * site_count);
  std::vector<std::size_t> digits(site_count, 0);
  const auto atom_list = measure.atoms();
  // Odometer with the last site fastest: atoms are position-sorted, so the
  // output is already in canonical lexicographic order.
  for (std::size_t t = 0; t < terms; ++t) {
    double c = 1.0;
    for (std::size_t i = 0; i < site_count; ++i) {
      const Atom& a = atom_list[digits[i]];
      c *= a.weight;
      frequencies[t * site_count + i] = to_half_units(a.position);
    }
    coefficients[t] = c;
    for (std::size_t i = site_count; i-- > 0;) {
      if (++digits[i] < atoms) break;
      digits[i] = 0;
    }
  }
  return ExpSum::from_raw(site_count, std::move(coefficients), std::move(frequencies), 0.0);
}

ExpSum apply_quadratic_form(const ExpSum& s, std::span<const double> matrix, double scale) {
  const std::size_t d = s.dimension();
  if (matrix.size() != d * d)
    throw std::invalid_argument("operator matrix dimension does not match the exponential sum");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale must be positive");

  const std::size_t n = s.size();
  std::vector<double> exponents(n);
  double max_exponent = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const std::int8_t* a = s.half_frequencies_.data() + t * d;
    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (a[i] == 0) continue;
      double row = 0.0;
      for (std::size_t j = 0; j < d; ++j) row += matrix[i * d + j] * a[j];
      quad += a[i] * row;
    }
    // Half units on both sides: aᵀKa = quad / 4.
    exponents[t] = 0.5 * scale * quad * 0.25;
    max_exponent = std::max(max_exponent, exponents[t]);
  }

  double shift = 0.0;
  if (n > 0 && std::abs(max_exponent) > kLogRescaleThreshold) shift = max_exponent;
  std::vector<double> coefficients(n);
  for (std::size_t t = 0; t < n; ++t)
    coefficients[t] = s.coefficients_[t] * std::exp(exponents[t] - shift);
  return ExpSum::from_raw(d, std::move(coefficients), s.half_frequencies_, s.log_scale_ + shift);
}

ExpSum apply_quadratic_exponential(const ExpSum& s, const CouplingMatrix& K, double scale) {
  if (K.size() != s.dimension())
    throw std::invalid_argument("coupling matrix dimension does not match the exponential sum");
  return apply_quadratic_form(s, K.entries(), scale);
}

FugacityPolynomial restrict_to_diagonal(const ExpSum& s, double beta) {
  const std::size_t d = s.dimension();
  std::vector<long> totals(s.size());
  long max_abs = 0;
  for (std::size_t t = 0; t < s.size(); ++t) {
    long half_total = 0;
    for (std::size_t i = 0; i < d; ++i) half_total += std::lround(2.0 * s.frequency(t, i));
    if (half_total % 2 != 0)
      throw std::invalid_argument("total frequency is not an integer; exponential sum is corrupted");
    totals[t] = half_total / 2;
    max_abs = std::max(max_abs, std::abs(totals[t]));
  }
  std::vector<double> coefficients(static_cast<std::size_t>(2 * max_abs + 1), 0.0);
  for (std::size_t t = 0; t < s.size(); ++t)
    coefficients[static_cast<std::size_t>(totals[t] + max_abs)] += s.coefficient(t);
  return FugacityPolynomial(std::move(coefficients), beta, s.log_scale());
}

std::complex<double> eval_expsum(const ExpSum& s, std::span<const std::complex<double>> point) {
  const std::size_t d = s.dimension();
  if (point.size() != d) throw std::invalid_argument("evaluation point has wrong dimension");
  std::complex<double> acc = 0.0;
  for (std::size_t t = 0; t < s.size(); ++t) {
    std::complex<double> exponent = 0.0;
    for (std::size_t i = 0; i < d; ++i) exponent += s.frequency(t, i) * point[i];
    acc += s.coefficient(t) * std::exp(exponent);
  }
  return acc * std::exp(s.log_scale());
}

nlohmann::json to_json(const FugacityPolynomial& p) {
  nlohmann::json j;
  j["beta"] = p.beta();
  j["coeffs"] = std::vector<double>(p.coefficients().begin(), p.coefficients().end());
  if (p.log_scale() != 0.0) j["log_scale"] = p.log_scale();
  return j;
}

FugacityPolynomial fugacity_polynomial_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("beta") || !j.contains("coeffs"))
    throw std::invalid_argument("fugacity polynomial JSON needs \"beta\" and \"coeffs\"");
  return FugacityPolynomial(j.at("coeffs").get<std::vector<double>>(), j.at("beta").get<double>(),
                            j.value("log_scale", 0.0));
}

}  // namespace lyzero
