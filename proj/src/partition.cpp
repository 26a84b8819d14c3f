#include "lyzero/partition.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace lyzero {

namespace {

constexpr double kLogRescaleThreshold = 600.0;
constexpr double kStructureTolerance = 1e-12;

long half_units(double position) { return std::lround(2.0 * position); }

// Converts a half-unit magnetization table into c_{-N}..c_N.
FugacityPolynomial from_half_table(const std::vector<double>& table, long half_extent, double beta,
                                   double log_scale) {
  long max_half = -1;
  for (long h = -half_extent; h <= half_extent; ++h) {
    const double w = table[static_cast<std::size_t>(h + half_extent)];
    if (w == 0.0) continue;
    if (h % 2 != 0)
      throw std::invalid_argument("total magnetization is not an integer for this measure");
    max_half = std::max(max_half, std::abs(h));
  }
  if (max_half < 0) throw std::logic_error("partition table is identically zero");
  const long degree = max_half / 2;
  std::vector<double> coefficients(static_cast<std::size_t>(2 * degree + 1));
  for (long m = -degree; m <= degree; ++m)
    coefficients[static_cast<std::size_t>(m + degree)] =
        table[static_cast<std::size_t>(2 * m + half_extent)];
  return FugacityPolynomial(std::move(coefficients), beta, log_scale);
}

std::size_t checked_state_count(std::size_t atoms, std::size_t sites, std::size_t cap) {
  std::size_t states = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    if (states > cap / atoms)
      throw ProblemTooLarge("state space " + std::to_string(atoms) + "^" + std::to_string(sites) +
                            " exceeds the cap of " + std::to_string(cap));
    states *= atoms;
  }
  return states;
}

}  // namespace

void ModelInstance::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
  if (coupling.size() == 0) throw std::invalid_argument("model needs at least one site");
}

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::Auto:
      return "auto";
    case Engine::Brute:
      return "brute";
    case Engine::Operator:
      return "operator";
    case Engine::Transfer:
      return "transfer";
    case Engine::Hierarchical:
      return "hierarchical";
  }
  return "unknown";
}

Engine engine_from_string(const std::string& name) {
  if (name == "auto") return Engine::Auto;
  if (name == "brute") return Engine::Brute;
  if (name == "operator") return Engine::Operator;
  if (name == "transfer") return Engine::Transfer;
  if (name == "hierarchical") return Engine::Hierarchical;
  throw std::invalid_argument("unknown engine '" + name + "'");
}

double BlockMagnetizationTable::weight_at_half(long half_m) const {
  if (half_m < -half_extent || half_m > half_extent) return 0.0;
  return weights[static_cast<std::size_t>(half_m + half_extent)];
}

BlockMagnetizationTable leaf_table(const SpinMeasure& measure) {
  BlockMagnetizationTable t;
  t.half_extent = half_units(measure.max_abs_position());
  t.weights.assign(static_cast<std::size_t>(2 * t.half_extent + 1), 0.0);
  for (const Atom& a : measure.atoms())
    t.weights[static_cast<std::size_t>(half_units(a.position) + t.half_extent)] += a.weight;
  return t;
}

BlockMagnetizationTable merge_blocks(const BlockMagnetizationTable& a,
                                     const BlockMagnetizationTable& b, double beta_coupling) {
  BlockMagnetizationTable out;
  out.half_extent = a.half_extent + b.half_extent;
  out.weights.assign(static_cast<std::size_t>(2 * out.half_extent + 1), 0.0);
  // Largest exponent: aligned extremes. Shifting by it keeps every factor ≤ 1.
  const double max_exponent =
      beta_coupling * static_cast<double>(a.half_extent * b.half_extent) / 4.0;
  const double shift = max_exponent > kLogRescaleThreshold ? max_exponent : 0.0;
  for (long h1 = -a.half_extent; h1 <= a.half_extent; ++h1) {
    const double w1 = a.weight_at_half(h1);
    if (w1 == 0.0) continue;
    for (long h2 = -b.half_extent; h2 <= b.half_extent; ++h2) {
      const double w2 = b.weight_at_half(h2);
      if (w2 == 0.0) continue;
      const double exponent = beta_coupling * static_cast<double>(h1 * h2) / 4.0 - shift;
      out.weights[static_cast<std::size_t>(h1 + h2 + out.half_extent)] +=
          w1 * w2 * std::exp(exponent);
    }
  }
  out.log_scale = a.log_scale + b.log_scale + shift;
  // Keep the table near unit size so repeated merges never overflow.
  const double top = *std::max_element(out.weights.begin(), out.weights.end());
  if (top > 0.0 && std::isfinite(top)) {
    for (double& w : out.weights) w /= top;
    out.log_scale += std::log(top);
  }
  return out;
}

FugacityPolynomial brute_force_partition(const ModelInstance& m, const EngineOptions& options) {
  m.validate();
  const std::size_t n = m.site_count();
  const auto atoms = m.measure.atoms();
  const std::size_t atom_count = atoms.size();
  checked_state_count(atom_count, n, options.state_cap);

  std::vector<double> spin(atom_count);
  std::vector<long> half(atom_count);
  for (std::size_t a = 0; a < atom_count; ++a) {
    spin[a] = atoms[a].position;
    half[a] = half_units(atoms[a].position);
  }
  const long half_extent = static_cast<long>(n) * half_units(m.measure.max_abs_position());
  const double beta = m.beta;
  const CouplingMatrix& K = m.coupling;

  // K ≥ 0 and symmetric atoms: the aligned extreme configuration maximizes
  // the Boltzmann exponent.
  double max_exponent = 0.0;
  {
    const double s = m.measure.max_abs_position();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) max_exponent += beta * K(i, j) * s * s;
  }
  const double shift = max_exponent > kLogRescaleThreshold ? max_exponent : 0.0;

  // Branches fix the first `prefix` sites; each branch owns its accumulator
  // and branches are reduced in index order.
  std::size_t prefix = 0;
  std::size_t branches = 1;
  while (prefix < n && branches < 256) {
    branches *= atom_count;
    ++prefix;
  }
  const std::size_t table_size = static_cast<std::size_t>(2 * half_extent + 1);
  std::vector<std::vector<double>> partial(branches);

  auto run_branch = [&](std::size_t branch) {
    std::vector<double> acc(table_size, 0.0);
    std::vector<std::size_t> choice(n, 0);
    std::size_t code = branch;
    for (std::size_t i = prefix; i-- > 0;) {
      choice[i] = code % atom_count;
      code /= atom_count;
    }
    // Depth-first over the free sites with running weight, exponent and
    // magnetization per depth.
    std::vector<double> weight(n + 1, 1.0);
    std::vector<double> exponent(n + 1, -shift);
    std::vector<long> magnet(n + 1, 0);
    auto descend = [&](std::size_t d) {
      const std::size_t a = choice[d];
      double local = 0.0;
      for (std::size_t j = 0; j < d; ++j) local += K(d, j) * spin[choice[j]];
      weight[d + 1] = weight[d] * atoms[a].weight;
      exponent[d + 1] = exponent[d] + beta * spin[a] * local;
      magnet[d + 1] = magnet[d] + half[a];
    };
    for (std::size_t d = 0; d < prefix; ++d) descend(d);
    auto visit = [&](auto&& self, std::size_t d) -> void {
      if (d == n) {
        acc[static_cast<std::size_t>(magnet[n] + half_extent)] += weight[n] * std::exp(exponent[n]);
        return;
      }
      for (std::size_t a = 0; a < atom_count; ++a) {
        choice[d] = a;
        descend(d);
        self(self, d + 1);
      }
    };
    visit(visit, prefix);
    partial[branch] = std::move(acc);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, branches));
  if (threads == 1) {
    for (std::size_t b = 0; b < branches; ++b) run_branch(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < branches; b = next++) run_branch(b);
      });
  }

  std::vector<double> table(table_size, 0.0);
  for (const auto& acc : partial)
    for (std::size_t k = 0; k < table_size; ++k) table[k] += acc[k];
  return from_half_table(table, half_extent, beta, shift);
}

FugacityPolynomial operator_partition(const ModelInstance& m, const EngineOptions& options) {
  m.validate();
  const ExpSum product = expsum_from_measure(m.measure, m.site_count(), options.state_cap);
  const ExpSum coupled = apply_quadratic_exponential(product, m.coupling, m.beta);
  return restrict_to_diagonal(coupled, m.beta);
}

std::optional<bool> detect_chain(const CouplingMatrix& K) {
  const std::size_t n = K.size();
  bool wrap = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (K(i, j) == 0.0 || j == i + 1) continue;
      if (i == 0 && j == n - 1) {
        wrap = true;
        continue;
      }
      return std::nullopt;
    }
  }
  return wrap;
}

FugacityPolynomial chain_transfer_partition(const ModelInstance& m, bool periodic) {
  m.validate();
  const CouplingMatrix& K = m.coupling;
  const std::size_t n = K.size();
  const std::optional<bool> shape = detect_chain(K);
  if (!shape) throw std::invalid_argument("transfer engine needs a nearest-neighbour chain coupling");
  if (*shape && !periodic)
    throw std::invalid_argument("coupling has a wrap-around bond but an open chain was requested");

  const auto atoms = m.measure.atoms();
  const std::size_t states = atoms.size();
  const long site_half = half_units(m.measure.max_abs_position());
  const long half_extent = static_cast<long>(n) * site_half;
  const std::size_t width = static_cast<std::size_t>(2 * half_extent + 1);
  const double s_max = m.measure.max_abs_position();
  // For n = 2 the wrap bond is the same matrix entry as the (0,1) bond.
  const bool closes = periodic && n > 2;
  const double wrap = closes ? K(n - 1, 0) : 0.0;

  // Polynomials in z stored in half units, one per current spin state.
  using Row = std::vector<double>;
  auto shift_for = [&](double J) {
    const double e = m.beta * J * s_max * s_max;
    return e > kLogRescaleThreshold ? e : 0.0;
  };

  std::vector<double> table(width, 0.0);
  double log_scale = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) log_scale += shift_for(K(i, i + 1));
  if (closes) log_scale += shift_for(wrap);

  // Open chains need a single sweep; periodic chains one sweep per initial state.
  const std::size_t sweeps = closes ? states : 1;
  for (std::size_t start = 0; start < sweeps; ++start) {
    std::vector<Row> v(states, Row(width, 0.0));
    for (std::size_t s = 0; s < states; ++s) {
      if (closes && s != start) continue;
      v[s][static_cast<std::size_t>(half_units(atoms[s].position) + half_extent)] = atoms[s].weight;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double J = K(i, i + 1);
      const double shift = shift_for(J);
      std::vector<Row> next(states, Row(width, 0.0));
      for (std::size_t t = 0; t < states; ++t) {
        const long dh = half_units(atoms[t].position);
        for (std::size_t s = 0; s < states; ++s) {
          const double factor =
              atoms[t].weight *
              std::exp(m.beta * J * atoms[s].position * atoms[t].position - shift);
          const Row& src = v[s];
          Row& dst = next[t];
          for (std::size_t k = 0; k < width; ++k) {
            if (src[k] == 0.0) continue;
            dst[static_cast<std::size_t>(static_cast<long>(k) + dh)] += src[k] * factor;
          }
        }
      }
      v = std::move(next);
    }
    for (std::size_t s = 0; s < states; ++s) {
      double closing = 1.0;
      if (closes)
        closing = std::exp(m.beta * wrap * atoms[s].position * atoms[start].position -
                           shift_for(wrap));
      for (std::size_t k = 0; k < width; ++k) table[k] += v[s][k] * closing;
    }
  }
  return from_half_table(table, half_extent, m.beta, log_scale);
}

FugacityPolynomial hierarchical_partition(const ModelInstance& m, const HierarchySpec& spec) {
  m.validate();
  spec.validate();
  if (spec.site_count() != m.site_count())
    throw std::invalid_argument("hierarchy spec does not match the coupling size");
  const CouplingMatrix expected = coupling_hierarchical(spec);
  const auto got = m.coupling.entries();
  const auto want = expected.entries();
  for (std::size_t k = 0; k < got.size(); ++k)
    if (std::abs(got[k] - want[k]) > kStructureTolerance)
      throw std::invalid_argument("coupling matrix was not generated by this hierarchy spec");

  // Every block at a level is identical (uniform measure), so one merge per level.
  BlockMagnetizationTable block = leaf_table(m.measure);
  for (double kappa : spec.level_couplings) block = merge_blocks(block, block, m.beta * kappa);
  return from_half_table(block.weights, block.half_extent, m.beta, block.log_scale);
}

FugacityPolynomial compute_partition(const ModelInstance& m, Engine engine,
                                     const std::optional<HierarchySpec>& hierarchy,
                                     const EngineOptions& options) {
  switch (engine) {
    case Engine::Brute:
      return brute_force_partition(m, options);
    case Engine::Operator:
      return operator_partition(m, options);
    case Engine::Transfer: {
      const auto shape = detect_chain(m.coupling);
      if (!shape) throw std::invalid_argument("transfer engine needs a chain coupling");
      return chain_transfer_partition(m, *shape);
    }
    case Engine::Hierarchical:
      if (!hierarchy) throw std::invalid_argument("hierarchical engine needs a hierarchy spec");
      return hierarchical_partition(m, *hierarchy);
    case Engine::Auto:
      break;
  }
  if (hierarchy) return hierarchical_partition(m, *hierarchy);
  if (const auto shape = detect_chain(m.coupling)) return chain_transfer_partition(m, *shape);
  return brute_force_partition(m, options);
}

double log_dropped_prefactor(const SpinMeasure& measure, std::size_t site_count) {
  const double n = static_cast<double>(site_count);
  switch (measure.kind()) {
    case MeasureKind::Ising:
    case MeasureKind::Dilute:
      return n * std::log(2.0);
    case MeasureKind::BlumeCapel:
      // Z_1 = 2e^{-βΔ}cosh(βh) + 1 = (1 + 1/θ) φ(βh).
      return n * std::log1p(1.0 / measure.parameter());
  }
  return 0.0;
}

}  // namespace lyzero
