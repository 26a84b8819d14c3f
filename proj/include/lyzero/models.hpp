#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lyzero {

enum class MeasureKind { Ising, BlumeCapel, Dilute };

std::string to_string(MeasureKind kind);

struct Atom {
  double position;
  double weight;
};

/// Finite atomic single-spin distribution.
///
/// Atoms are kept sorted by position. Weights are strictly positive and sum
/// to one; the atom set is symmetric under position negation. Positions must
/// be integers or half-integers so that exponential sums and magnetization
/// tables can index them exactly.
class SpinMeasure {
 public:
  /// `parameter` is θ for BlumeCapel, p for Dilute and ignored for Ising.
  SpinMeasure(std::vector<Atom> atoms, MeasureKind kind, double parameter = 0.0);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t atom_count() const { return atoms_.size(); }
  MeasureKind kind() const { return kind_; }
  double parameter() const { return parameter_; }

  /// Weight ratio θ = w(0) / (2 w(±1)) of the three-atom family; 0 for Ising.
  double theta() const;
  double max_abs_position() const;

 private:
  std::vector<Atom> atoms_;
  MeasureKind kind_;
  double parameter_;
};

SpinMeasure ising_measure();
SpinMeasure blume_capel_measure(double theta);
/// Annealed Bernoulli thinning with deletion probability q; equals the
/// Blume-Capel measure at θ = q/(1-q). q = 0 gives the two-atom Ising measure.
SpinMeasure dilute_measure(double q);

/// θ = e^{βΔ}/2.
double theta_from_delta(double beta, double delta);
double theta_from_q(double q);
double q_from_theta(double theta);

/// Symmetric nonnegative interaction matrix with zero diagonal, stored at
/// unit β (engines multiply by β).
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  explicit CouplingMatrix(std::size_t n);
  CouplingMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(entries_).subspan(i * n_, n_);
  }
  std::span<const double> entries() const { return entries_; }

  /// Copy with K_ij = K_ji = value.
  CouplingMatrix with_entry(std::size_t i, std::size_t j, double value) const;
  CouplingMatrix scaled(double factor) const;
  double max_entry() const;
  bool is_zero() const;

  friend bool operator==(const CouplingMatrix&, const CouplingMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// Dyson-type hierarchy over 2^levels sites. Level m (1-based) joins the two
/// halves of each dyadic block of size 2^m. `relabel` optionally permutes the
/// canonical dyadic layout: canonical site i is placed at index relabel[i].
struct HierarchySpec {
  std::vector<double> level_couplings;
  std::vector<std::size_t> relabel;

  std::size_t levels() const { return level_couplings.size(); }
  std::size_t site_count() const { return std::size_t{1} << levels(); }
  void validate() const;

  friend bool operator==(const HierarchySpec&, const HierarchySpec&) = default;
};

CouplingMatrix coupling_chain(std::size_t n, double J, bool periodic);
CouplingMatrix coupling_hierarchical(const HierarchySpec& spec);
/// Every off-diagonal entry equal to c.
CouplingMatrix coupling_curie_weiss(std::size_t n, double c);

}  // namespace lyzero
