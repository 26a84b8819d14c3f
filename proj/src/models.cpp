#include "lyzero/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lyzero {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kEntryTolerance = 1e-12;

bool is_half_integer(double x) {
  const double twice = 2.0 * x;
  return std::abs(twice - std::round(twice)) <= 1e-12 && std::abs(twice) <= 127.0;
}

}  // namespace

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Ising:
      return "ising";
    case MeasureKind::BlumeCapel:
      return "blume_capel";
    case MeasureKind::Dilute:
      return "dilute";
  }
  return "unknown";
}

SpinMeasure::SpinMeasure(std::vector<Atom> atoms, MeasureKind kind, double parameter)
    : atoms_(std::move(atoms)), kind_(kind), parameter_(parameter) {
  if (atoms_.empty()) throw std::invalid_argument("spin measure needs at least one atom");
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("spin measure weights must be positive and finite");
    if (!is_half_integer(a.position))
      throw std::invalid_argument("spin positions must be integers or half-integers");
    if (i > 0 && atoms_[i - 1].position == a.position)
      throw std::invalid_argument("duplicate spin position");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw std::invalid_argument("spin measure weights must sum to 1");
  const std::size_t n = atoms_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Atom& a = atoms_[i];
    const Atom& mirror = atoms_[n - 1 - i];
    if (a.position != -mirror.position ||
        std::abs(a.weight - mirror.weight) > kWeightTolerance * std::max(1.0, a.weight))
      throw std::invalid_argument("spin measure must be symmetric under spin flip");
  }
}

double SpinMeasure::theta() const {
  double w_zero = 0.0;
  double w_one = 0.0;
  for (const Atom& a : atoms_) {
    if (a.position == 0.0) {
      w_zero = a.weight;
    } else if (a.position == 1.0) {
      w_one = a.weight;
    } else if (a.position != -1.0) {
      throw std::logic_error("theta is defined only for measures supported on {-1, 0, +1}");
    }
  }
  if (w_one == 0.0) throw std::logic_error("theta needs atoms at ±1");
  return w_zero / (2.0 * w_one);
}

double SpinMeasure::max_abs_position() const {
  return std::max(std::abs(atoms_.front().position), std::abs(atoms_.back().position));
}

SpinMeasure ising_measure() {
  return SpinMeasure({{-1.0, 0.5}, {1.0, 0.5}}, MeasureKind::Ising);
}

SpinMeasure blume_capel_measure(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("Blume-Capel theta must be positive and finite");
  const double edge = 1.0 / (2.0 * (1.0 + theta));
  const double centre = theta / (1.0 + theta);
  return SpinMeasure({{-1.0, edge}, {0.0, centre}, {1.0, edge}}, MeasureKind::BlumeCapel, theta);
}

SpinMeasure dilute_measure(double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("dilution q must lie in [0, 1)");
  const double p = 1.0 - q;
  if (q == 0.0) return SpinMeasure({{-1.0, 0.5}, {1.0, 0.5}}, MeasureKind::Dilute, p);
  // Same weights as blume_capel_measure(q/p): p/2 at ±1 and q at 0.
  return SpinMeasure({{-1.0, p / 2.0}, {0.0, q}, {1.0, p / 2.0}}, MeasureKind::Dilute, p);
}

double theta_from_delta(double beta, double delta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  return std::exp(beta * delta) / 2.0;
}

double theta_from_q(double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("dilution q must lie in [0, 1)");
  return q / (1.0 - q);
}

double q_from_theta(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("theta must be nonnegative and finite");
  return theta / (1.0 + theta);
}

CouplingMatrix::CouplingMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {
  if (n == 0) throw std::invalid_argument("coupling matrix needs at least one site");
}

CouplingMatrix::CouplingMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), entries_(std::move(row_major)) {
  if (n == 0) throw std::invalid_argument("coupling matrix needs at least one site");
  if (entries_.size() != n * n)
    throw std::invalid_argument("coupling matrix: expected " + std::to_string(n * n) +
                                " entries, got " + std::to_string(entries_.size()));
  for (std::size_t i = 0; i < n; ++i) {
    double& diag = entries_[i * n + i];
    if (!std::isfinite(diag) || std::abs(diag) > kEntryTolerance)
      throw std::invalid_argument("coupling matrix diagonal must be zero");
    diag = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double& upper = entries_[i * n + j];
      double& lower = entries_[j * n + i];
      if (!std::isfinite(upper) || !std::isfinite(lower))
        throw std::invalid_argument("coupling matrix entries must be finite");
      if (upper < 0.0 || lower < 0.0)
        throw std::invalid_argument("coupling matrix entries must be nonnegative");
      if (std::abs(upper - lower) > kEntryTolerance)
        throw std::invalid_argument("coupling matrix must be symmetric");
      lower = upper;
    }
  }
}

CouplingMatrix CouplingMatrix::with_entry(std::size_t i, std::size_t j, double value) const {
  if (i >= n_ || j >= n_ || i == j) throw std::out_of_range("with_entry: bad off-diagonal index");
  std::vector<double> copy = entries_;
  copy[i * n_ + j] = value;
  copy[j * n_ + i] = value;
  return CouplingMatrix(n_, std::move(copy));
}

CouplingMatrix CouplingMatrix::scaled(double factor) const {
  if (!(factor >= 0.0)) throw std::invalid_argument("scale factor must be nonnegative");
  std::vector<double> copy = entries_;
  for (double& e : copy) e *= factor;
  return CouplingMatrix(n_, std::move(copy));
}

double CouplingMatrix::max_entry() const {
  return entries_.empty() ? 0.0 : *std::max_element(entries_.begin(), entries_.end());
}

bool CouplingMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double e) { return e == 0.0; });
}

void HierarchySpec::validate() const {
  if (level_couplings.empty()) throw std::invalid_argument("hierarchy needs at least one level");
  if (level_couplings.size() > 20) throw std::invalid_argument("hierarchy deeper than 20 levels");
  for (double k : level_couplings)
    if (!(k > 0.0) || !std::isfinite(k))
      throw std::invalid_argument("hierarchy level couplings must be positive and finite");
  if (!relabel.empty()) {
    if (relabel.size() != site_count())
      throw std::invalid_argument("hierarchy relabel must list every site once");
    std::vector<bool> seen(relabel.size(), false);
    for (std::size_t target : relabel) {
      if (target >= relabel.size() || seen[target])
        throw std::invalid_argument("hierarchy relabel is not a permutation");
      seen[target] = true;
    }
  }
}

CouplingMatrix coupling_chain(std::size_t n, double J, bool periodic) {
  if (n < 2) throw std::invalid_argument("chain needs at least two sites");
  if (!(J > 0.0) || !std::isfinite(J)) throw std::invalid_argument("chain coupling must be positive");
  std::vector<double> k(n * n, 0.0);
  auto set = [&](std::size_t i, std::size_t j) {
    k[i * n + j] = J;
    k[j * n + i] = J;
  };
  for (std::size_t i = 0; i + 1 < n; ++i) set(i, i + 1);
  if (periodic) set(n - 1, 0);
  return CouplingMatrix(n, std::move(k));
}

CouplingMatrix coupling_hierarchical(const HierarchySpec& spec) {
  spec.validate();
  const std::size_t n = spec.site_count();
  std::vector<double> k(n * n, 0.0);
  auto place = [&](std::size_t i) { return spec.relabel.empty() ? i : spec.relabel[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // Lowest level whose dyadic block holds both i and j.
      const auto level = static_cast<std::size_t>(std::bit_width(i ^ j));
      k[place(i) * n + place(j)] = spec.level_couplings[level - 1];
    }
  }
  return CouplingMatrix(n, std::move(k));
}

CouplingMatrix coupling_curie_weiss(std::size_t n, double c) {
  if (n < 2) throw std::invalid_argument("Curie-Weiss coupling needs at least two sites");
  if (!(c > 0.0)) throw std::invalid_argument("Curie-Weiss coupling must be positive");
  std::vector<double> k(n * n, c);
  for (std::size_t i = 0; i < n; ++i) k[i * n + i] = 0.0;
  return CouplingMatrix(n, std::move(k));
}

}  // namespace lyzero
