#include "lyzero/zeros.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>
#include <tuple>

namespace lyzero {

namespace {

template <class T>
struct Evaluation {
  std::complex<T> newton;  // Q / Q'
  T magnitude;             // |Q|, scaled by |z|^-D outside the unit disk
  T noise;                 // Σ|a_k||z|^k with the same scaling
};

// Q with ascending real coefficients. Evaluation switches to the reversed
// polynomial outside the unit disk so Horner never sees |z|^D growth.
template <class T>
class RealPolynomial {
 public:
  explicit RealPolynomial(std::span<const double> ascending)
      : a_(ascending.begin(), ascending.end()) {}

  std::size_t degree() const { return a_.size() - 1; }

  Evaluation<T> at(std::complex<T> z) const {
    using C = std::complex<T>;
    const std::size_t d = degree();
    if (std::abs(z) <= T(1)) {
      C p = a_[d];
      C dp = 0;
      T s = std::abs(a_[d]);
      const T r = std::abs(z);
      for (std::size_t k = d; k-- > 0;) {
        dp = dp * z + p;
        p = p * z + a_[k];
        s = s * r + std::abs(a_[k]);
      }
      return {dp == C(0) ? C(0) : p / dp, std::abs(p), s};
    }
    const C w = T(1) / z;
    C q = a_[0];
    C dq = 0;
    T s = std::abs(a_[0]);
    const T r = std::abs(w);
    for (std::size_t k = 1; k <= d; ++k) {
      dq = dq * w + q;
      q = q * w + a_[k];
      s = s * r + std::abs(a_[k]);
    }
    // Q(z) = z^D q(w)  =>  Q/Q' = z q / (D q - w q').
    const C denom = T(d) * q - w * dq;
    return {denom == C(0) ? C(0) : z * q / denom, std::abs(q), s};
  }

 private:
  std::vector<T> a_;
};

template <class T>
struct AberthResult {
  std::vector<std::complex<T>> roots;
  std::vector<bool> done;
  int iterations = 0;
};

template <class T>
AberthResult<T> aberth(const RealPolynomial<T>& poly, const ZeroFinderOptions& options) {
  using C = std::complex<T>;
  const std::size_t d = poly.degree();
  const T eps = std::numeric_limits<T>::epsilon();
  const T noise_factor = T(4) * T(d) * eps;
  const T pi = std::numbers::pi_v<T>;

  AberthResult<T> out;
  out.roots.resize(d);
  out.done.assign(d, false);
  // Offset angles so the start is not symmetric under conjugation.
  for (std::size_t k = 0; k < d; ++k) {
    const T angle = T(2) * pi * T(k) / T(d) + T(0.4);
    out.roots[k] = std::polar(T(options.initial_radius), angle);
  }

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    out.iterations = iter;
    bool active = false;
    for (std::size_t k = 0; k < d; ++k) {
      if (out.done[k]) continue;
      C& z = out.roots[k];
      const Evaluation<T> ev = poly.at(z);
      if (ev.magnitude <= noise_factor * ev.noise || ev.newton == C(0)) {
        out.done[k] = true;
        continue;
      }
      C sum = 0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == k) continue;
        const C diff = z - out.roots[j];
        if (diff != C(0)) sum += T(1) / diff;
      }
      const C correction = ev.newton / (T(1) - ev.newton * sum);
      z -= correction;
      if (std::abs(correction) <= T(2) * eps * std::abs(z)) out.done[k] = true;
      active = true;
    }
    if (!active) break;
  }

  // Newton polishing; keep a step only if it lowers |Q| relative to its noise.
  for (std::size_t k = 0; k < d; ++k) {
    C& z = out.roots[k];
    for (int step = 0; step < 3; ++step) {
      const Evaluation<T> ev = poly.at(z);
      if (ev.newton == C(0)) break;
      const C candidate = z - ev.newton;
      const Evaluation<T> next = poly.at(candidate);
      if (next.magnitude / next.noise >= ev.magnitude / ev.noise) break;
      z = candidate;
    }
  }
  return out;
}

// Inclusion disc radii D (|Q| + noise) / |a_D prod (z_k - z_j)|, with |Q|
// inflated by its rounding noise. A numerically split multiple root gets
// discs about as wide as its spread, so the pieces overlap.
template <class T>
std::vector<double> inclusion_radii(const RealPolynomial<T>& poly, const std::vector<std::complex<T>>& roots,
                                    double leading) {
  const std::size_t d = roots.size();
  const T noise_factor = T(4) * T(d) * std::numeric_limits<T>::epsilon();
  std::vector<double> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    const Evaluation<T> ev = poly.at(roots[k]);
    T log_r = std::log(T(d)) + std::log(ev.magnitude + noise_factor * ev.noise) - std::log(std::abs(T(leading)));
    if (std::abs(roots[k]) > T(1)) log_r += T(d) * std::log(std::abs(roots[k]));
    bool coincident = false;
    for (std::size_t j = 0; j < d; ++j) {
      if (j == k) continue;
      const T gap = std::abs(roots[k] - roots[j]);
      if (gap == T(0)) coincident = true;
      else log_r -= std::log(gap);
    }
    out[k] = coincident ? std::numeric_limits<double>::infinity() : static_cast<double>(std::exp(log_r));
  }
  return out;
}

// An m-fold root of Q is a simple root of Q^(m-1); Newton on that derivative
// pins the cluster center far better than the mean of the split pieces.
template <class T>
std::complex<double> refine_center(std::span<const double> a, std::size_t multiplicity,
                                   std::complex<double> mean, double spread) {
  using C = std::complex<T>;
  const std::size_t shift = multiplicity - 1;
  if (shift + 1 >= a.size()) return mean;
  std::vector<T> logs(a.size() - shift);
  T top = -std::numeric_limits<T>::infinity();
  for (std::size_t k = 0; k < logs.size(); ++k) {
    logs[k] = a[k + shift] > 0 ? std::log(T(a[k + shift])) + std::lgamma(T(k + shift + 1)) - std::lgamma(T(k + 1))
                               : -std::numeric_limits<T>::infinity();
    top = std::max(top, logs[k]);
  }
  std::vector<double> b(logs.size());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = static_cast<double>(std::exp(logs[k] - top));
  const RealPolynomial<T> deriv(b);
  C z(mean.real(), mean.imag());
  const T eps = std::numeric_limits<T>::epsilon();
  for (int step = 0; step < 60; ++step) {
    const C dz = deriv.at(z).newton;
    z -= dz;
    if (std::abs(dz) <= T(4) * eps * std::abs(z)) break;
  }
  const std::complex<double> out(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  return std::abs(out - mean) <= 2 * spread + 1e-12 ? out : mean;
}

template <class T>
ZeroSet solve(const FugacityPolynomial& p, const ZeroFinderOptions& options) {
  const RealPolynomial<T> poly(p.coefficients());
  AberthResult<T> result = aberth(poly, options);
  const std::size_t d = poly.degree();

  ZeroSet zs;
  zs.iterations = result.iterations;
  zs.precision = options.precision;
  zs.roots.reserve(d);
  for (const auto& z : result.roots)
    zs.roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));

  // Union-find over near-coincident roots.
  std::vector<std::size_t> parent(d);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const std::vector<double> radius = inclusion_radii(poly, result.roots, p.coefficients().back());
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double gap = std::abs(zs.roots[i] - zs.roots[j]);
      if (gap < options.cluster_distance || gap <= radius[i] + radius[j]) parent[find(i)] = find(j);
    }
  std::vector<std::vector<std::size_t>> groups(d);
  for (std::size_t i = 0; i < d; ++i) groups[find(i)].push_back(i);
  std::vector<bool> clustered(d, false);
  for (const auto& g : groups) {
    if (g.size() < 2) continue;
    RootCluster cluster;
    cluster.members = g;
    for (std::size_t i : g) {
      cluster.center += zs.roots[i];
      clustered[i] = true;
    }
    cluster.center /= static_cast<double>(g.size());
    double spread = 0.0;
    for (std::size_t i : g) spread = std::max(spread, std::abs(zs.roots[i] - cluster.center));
    cluster.center = refine_center<T>(p.coefficients(), g.size(), cluster.center, spread);
    zs.clusters.push_back(std::move(cluster));
  }
  std::sort(zs.clusters.begin(), zs.clusters.end(),
            [](const RootCluster& a, const RootCluster& b) { return a.members < b.members; });

  double residual = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    if (clustered[k]) continue;
    residual = std::max(residual, static_cast<double>(std::abs(poly.at(result.roots[k]).newton)));
  }
  zs.residual = residual;

  const bool converged = std::all_of(result.done.begin(), result.done.end(), [](bool b) { return b; });
  if (!converged)
    throw RootFindingError("root finder did not converge after " +
                               std::to_string(options.max_iterations) + " iterations",
                           zs.roots, residual);
  return zs;
}

}  // namespace

std::string to_string(Precision precision) {
  return precision == Precision::Double ? "double" : "extended";
}

Precision precision_from_string(const std::string& name) {
  if (name == "double") return Precision::Double;
  if (name == "extended") return Precision::Extended;
  throw std::invalid_argument("unknown precision '" + name + "'");
}

ZeroSet find_zeros(const FugacityPolynomial& p, const ZeroFinderOptions& options) {
  if (p.degree() < 1) throw std::invalid_argument("find_zeros needs a polynomial of degree >= 1");
  if (options.precision == Precision::Extended) return solve<long double>(p, options);
  return solve<double>(p, options);
}

LeeYangVerdict classify(const ZeroSet& zeros, const FugacityPolynomial& p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("circle tolerance must be positive");
  if (zeros.roots.size() != static_cast<std::size_t>(2 * p.degree()))
    throw std::invalid_argument("zero set does not belong to this polynomial");
  LeeYangVerdict v;
  v.tolerance = tol;
  // Members of a cluster are judged by the cluster mean, which is far more
  // accurate than the split roots of a numerical multiple root.
  std::vector<std::complex<double>> judged = zeros.roots;
  for (const RootCluster& c : zeros.clusters)
    for (std::size_t k : c.members)
      if (k < judged.size()) judged[k] = c.center;
  for (std::size_t k = 0; k < judged.size(); ++k) {
    const double dev = std::abs(std::abs(judged[k]) - 1.0);
    v.max_radial_deviation = std::max(v.max_radial_deviation, dev);
    if (dev > tol / 10.0 && dev <= tol * 10.0) v.borderline.push_back(k);
  }
  v.holds = v.max_radial_deviation <= tol;
  if (!v.holds) return v;

  // Conjugate roots share |arg|; after sorting, every other entry is one pair.
  std::vector<double> abs_phases;
  abs_phases.reserve(zeros.roots.size());
  for (const auto& z : judged) abs_phases.push_back(std::abs(std::arg(z)));
  std::sort(abs_phases.begin(), abs_phases.end());
  for (std::size_t k = 0; k < abs_phases.size(); k += 2) v.phases.push_back(abs_phases[k]);
  for (double phi : v.phases) v.gammas.push_back(1.0 / (phi * phi));
  if (!v.phases.empty()) v.first_zero_phase = v.phases.front();
  return v;
}

std::complex<double> field_zero(std::complex<double> z) { return std::log(z); }

std::vector<TrajectoryPoint> zero_trajectory(const PolynomialFamily& family,
                                             std::span<const double> grid,
                                             const TrajectoryOptions& options) {
  if (grid.empty()) throw std::invalid_argument("parameter grid is empty");
  const bool increasing = std::is_sorted(grid.begin(), grid.end());
  const bool decreasing = std::is_sorted(grid.begin(), grid.end(), std::greater<>());
  if (!increasing && !decreasing) throw std::invalid_argument("parameter grid is not monotone");

  const std::size_t count = grid.size();
  std::vector<std::optional<TrajectoryPoint>> points(count);
  std::vector<std::exception_ptr> errors(count);
  auto evaluate = [&](std::size_t i) {
    try {
      const FugacityPolynomial p = family(grid[i]);
      ZeroSet zs = find_zeros(p, options.finder);
      LeeYangVerdict verdict = classify(zs, p, options.tolerance);
      points[i] = TrajectoryPoint{grid[i], std::move(zs), std::move(verdict)};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) evaluate(i);
      });
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw TrajectoryError("grid point " + std::to_string(i) + ": " + e.what(), i);
    }
  }

  std::vector<TrajectoryPoint> out;
  out.reserve(count);
  for (auto& p : points) out.push_back(std::move(*p));

  // Continuation: greedy nearest matching to the previous point's order.
  for (std::size_t i = 1; i < count; ++i) {
    const auto& prev = out[i - 1].zeros.roots;
    auto& cur = out[i].zeros.roots;
    if (prev.size() != cur.size()) continue;
    const std::size_t d = cur.size();
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    candidates.reserve(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) candidates.emplace_back(std::abs(prev[a] - cur[b]), a, b);
    std::sort(candidates.begin(), candidates.end());
    std::vector<bool> used_prev(d, false);
    std::vector<bool> used_cur(d, false);
    std::vector<std::complex<double>> ordered(d);
    std::vector<std::size_t> moved_to(d);
    for (const auto& [dist, a, b] : candidates) {
      if (used_prev[a] || used_cur[b]) continue;
      used_prev[a] = used_cur[b] = true;
      ordered[a] = cur[b];
      moved_to[b] = a;
    }
    cur = std::move(ordered);
    for (auto& cluster : out[i].zeros.clusters) {
      for (auto& k : cluster.members) k = moved_to[k];
      std::sort(cluster.members.begin(), cluster.members.end());
    }
  }
  return out;
}

nlohmann::json to_json(const ZeroSet& zeros) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& z : zeros.roots) {
    const double phase = std::arg(z);
    const std::complex<double> field = field_zero(z);
    roots.push_back({{"re_z", z.real()},
                     {"im_z", z.imag()},
                     {"abs_z_minus_1", std::abs(std::abs(z) - 1.0)},
                     {"phase", phase},
                     {"re_beta_h", field.real()},
                     {"im_beta_h", field.imag()}});
  }
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : zeros.clusters)
    clusters.push_back({{"members", c.members}, {"re", c.center.real()}, {"im", c.center.imag()}});
  return {{"roots", roots},
          {"residual", zeros.residual},
          {"clusters", clusters},
          {"iterations", zeros.iterations},
          {"precision", to_string(zeros.precision)}};
}

nlohmann::json to_json(const LeeYangVerdict& v) {
  nlohmann::json j;
  j["holds"] = v.holds;
  j["max_radial_deviation"] = v.max_radial_deviation;
  j["tolerance"] = v.tolerance;
  j["first_zero_phase"] = v.first_zero_phase ? nlohmann::json(*v.first_zero_phase) : nlohmann::json();
  j["phases"] = v.phases;
  j["gammas"] = v.gammas;
  j["borderline"] = v.borderline;
  return j;
}

}  // namespace lyzero
