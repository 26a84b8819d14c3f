#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lyzero/expsum.hpp"
#include "lyzero/models.hpp"

namespace lyzero {

/// Spin measure, couplings at unit β, and the inverse temperature.
struct ModelInstance {
  SpinMeasure measure;
  CouplingMatrix coupling;
  double beta;

  std::size_t site_count() const { return coupling.size(); }
  void validate() const;
};

enum class Engine { Auto, Brute, Operator, Transfer, Hierarchical };

std::string to_string(Engine engine);
Engine engine_from_string(const std::string& name);

struct EngineOptions {
  std::size_t state_cap = kDefaultTermCap;
  /// Worker threads for the brute-force sum. Work is split into a fixed set of
  /// branches reduced in branch order, so results do not depend on this value.
  unsigned threads = 1;
};

/// Weights indexed by block magnetization M = -B..B (in half units when the
/// measure has half-integer atoms), with an overall factor e^{log_scale}.
struct BlockMagnetizationTable {
  /// Largest |M| in half units; weights has 2*half_extent + 1 entries.
  long half_extent = 0;
  std::vector<double> weights;
  double log_scale = 0.0;

  double weight_at_half(long half_m) const;
};

BlockMagnetizationTable leaf_table(const SpinMeasure& measure);
/// Joins two blocks coupled by a uniform cross coupling `beta_coupling`
/// between every pair of sites on opposite sides:
/// W(M) = Σ_{M1+M2=M} W1(M1) W2(M2) exp(beta_coupling · M1 · M2).
BlockMagnetizationTable merge_blocks(const BlockMagnetizationTable& a,
                                     const BlockMagnetizationTable& b, double beta_coupling);

/// Direct Gibbs sum over all spin configurations.
FugacityPolynomial brute_force_partition(const ModelInstance& m, const EngineOptions& options = {});

/// exp(½ β Σ K_ij D_i D_j) ∏ φ(x_i) evaluated on the exponential-sum form,
/// then restricted to the diagonal.
FugacityPolynomial operator_partition(const ModelInstance& m, const EngineOptions& options = {});

/// Transfer matrices with Laurent-polynomial entries. The coupling must be
/// nearest-neighbour along 0-1-...-(n-1), plus the (n-1, 0) bond if periodic;
/// bond strengths may vary.
FugacityPolynomial chain_transfer_partition(const ModelInstance& m, bool periodic);

/// Returns the periodic flag when K is a chain (nullopt otherwise). A
/// two-site matrix is reported as open.
std::optional<bool> detect_chain(const CouplingMatrix& K);

/// Bottom-up block-magnetization merge. The coupling must equal
/// coupling_hierarchical(spec).
FugacityPolynomial hierarchical_partition(const ModelInstance& m, const HierarchySpec& spec);

/// Engine dispatch. Auto picks hierarchical when a spec is given, transfer
/// for chains, brute force otherwise.
FugacityPolynomial compute_partition(const ModelInstance& m, Engine engine,
                                     const std::optional<HierarchySpec>& hierarchy = std::nullopt,
                                     const EngineOptions& options = {});

/// log of the factor dropped by probability normalization: the partition
/// function with the physical single-site weights is e^{this} times ours.
double log_dropped_prefactor(const SpinMeasure& measure, std::size_t site_count);

}  // namespace lyzero
