#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

namespace lyzero::cli {

namespace {

using nlohmann::json;

bool needs_model(Command c) { return c != Command::Bounds; }

std::string format_number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

// Tiny imaginary parts of real roots carry an arbitrary sign.
std::complex<double> snap(std::complex<double> z) {
  if (std::abs(z.imag()) <= 1e-14 * std::abs(z)) return {z.real(), 0.0};
  return z;
}

// Phase, then modulus.
std::vector<std::size_t> report_order(const std::vector<std::complex<double>>& roots) {
  std::vector<std::size_t> order(roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double pa = std::arg(snap(roots[a]));
    const double pb = std::arg(snap(roots[b]));
    if (std::abs(pa - pb) > 1e-12) return pa < pb;
    return std::abs(roots[a]) < std::abs(roots[b]);
  });
  return order;
}

struct Loaded {
  ModelSpec spec;
  ModelInstance instance;
};

Loaded load(const RunConfig& c) {
  ModelSpec spec = load_model_spec(c.model_path);
  ModelInstance instance = spec.instantiate();
  return {std::move(spec), std::move(instance)};
}

EngineOptions engine_options(const RunConfig& c) {
  EngineOptions o;
  o.threads = c.threads;
  return o;
}

ZeroFinderOptions finder_options(const RunConfig& c) {
  ZeroFinderOptions o;
  o.precision = c.precision;
  return o;
}

Engine resolved_engine(const Loaded& m, Engine requested) {
  if (requested != Engine::Auto) return requested;
  if (m.spec.hierarchy()) return Engine::Hierarchical;
  if (detect_chain(m.instance.coupling)) return Engine::Transfer;
  return Engine::Brute;
}

std::string partition_command(const RunConfig& c) {
  const Loaded m = load(c);
  const Engine engine = resolved_engine(m, c.engine);
  const FugacityPolynomial p = compute_partition(m.instance, engine, m.spec.hierarchy(), engine_options(c));
  const double dropped = log_dropped_prefactor(m.instance.measure, m.instance.site_count());
  if (c.format == Format::Csv) {
    std::ostringstream s;
    s << "# log_scale " << format_number(p.log_scale()) << "\n";
    s << "# log_dropped_prefactor " << format_number(dropped) << "\n";
    s << "m,coefficient\n";
    for (int k = -p.degree(); k <= p.degree(); ++k) s << k << "," << format_number(p.coefficient(k)) << "\n";
    return s.str();
  }
  json j;
  j["model"] = to_json(m.spec);
  j["engine"] = to_string(engine);
  j["polynomial"] = to_json(p);
  j["log_dropped_prefactor"] = dropped;
  j["log_z_zero_field"] = p.log_value_at_one();
  return j.dump(2) + "\n";
}

std::string zeros_csv(const ZeroSet& zs, const LeeYangVerdict& v) {
  std::ostringstream s;
  s << "re_z,im_z,abs_z_minus_1,phase,gamma\n";
  for (std::size_t k : report_order(zs.roots)) {
    const std::complex<double> z = snap(zs.roots[k]);
    const double phase = std::arg(z);
    s << format_number(z.real()) << "," << format_number(z.imag()) << ","
      << format_number(std::abs(std::abs(z) - 1.0)) << "," << format_number(phase) << ",";
    if (v.holds && phase != 0.0) s << format_number(1.0 / (phase * phase));
    s << "\n";
  }
  return s.str();
}

std::string zeros_command(const RunConfig& c) {
  const Loaded m = load(c);
  const FugacityPolynomial p =
      compute_partition(m.instance, resolved_engine(m, c.engine), m.spec.hierarchy(), engine_options(c));
  const ZeroSet zs = find_zeros(p, finder_options(c));
  const LeeYangVerdict v = classify(zs, p, c.tolerance);
  if (c.format == Format::Csv) return zeros_csv(zs, v);
  json j;
  j["model"] = to_json(m.spec);
  j["zeros"] = to_json(zs);
  j["verdict"] = to_json(v);
  return j.dump(2) + "\n";
}

std::string structure_command(const RunConfig& c) {
  const Loaded m = load(c);
  const MatchingReport r = analyze_structure(m.instance.coupling);
  if (c.format == Format::Csv) {
    std::ostringstream s;
    s << "i,j,K_ij\n";
    for (const auto& [i, j] : r.matching) s << i << "," << j << "," << format_number(m.instance.coupling(i, j)) << "\n";
    return s.str();
  }
  json j = to_json(r);
  j["site_count"] = m.instance.site_count();
  return j.dump(2) + "\n";
}

std::string bounds_command(const RunConfig& c) {
  if (!(c.beta > 0.0)) throw std::invalid_argument("--beta must be positive");
  if (!(c.kappa >= 0.0)) throw std::invalid_argument("--kappa must be nonnegative");
  const double bk = c.beta * c.kappa;
  const double bi = bound_condition_i(bk);
  const double bii = bound_condition_ii(bk);
  std::optional<CorollaryBounds> cor;
  if (c.kappa > 0.0) cor = corollary_bounds(c.beta, c.kappa);
  if (c.format == Format::Json) {
    json j{{"beta", c.beta}, {"kappa", c.kappa}, {"theta_bound_i", bi}, {"theta_bound_ii", bii}};
    if (cor) {
      j["delta_max"] = cor->delta_max;
      j["q_max"] = cor->q_max;
      j["delta_max_below_half_kappa"] = cor->delta_max_below_half_kappa;
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream s;
  if (c.format == Format::Csv) {
    s << "beta,kappa,theta_bound_i,theta_bound_ii\n"
      << format_number(c.beta) << "," << format_number(c.kappa) << "," << format_number(bi) << ","
      << format_number(bii) << "\n";
    return s.str();
  }
  s << std::fixed << std::setprecision(4);
  s << "theta_bound_i  " << bi << "\n";
  s << "theta_bound_ii " << bii << "\n";
  if (cor) {
    s << "delta_max      " << cor->delta_max << "\n";
    s << "q_max          " << cor->q_max << "\n";
  }
  return s.str();
}

std::string verify_command(const RunConfig& c, bool& mismatch) {
  const Loaded m = load(c);
  VerifyOptions o;
  o.engine = c.engine;
  o.hierarchy = m.spec.hierarchy();
  o.engine_options = engine_options(c);
  o.finder = finder_options(c);
  o.tolerance = c.tolerance;
  const VerificationRecord r = verify_theorem1(m.instance, o);
  mismatch = r.mismatch();
  if (c.format == Format::Csv) {
    std::ostringstream s;
    s << "theta,beta,kappa,branch,bound,predicted,observed,max_radial_deviation\n";
    s << format_number(r.theta) << "," << format_number(r.beta) << "," << format_number(r.bounds.kappa)
      << "," << to_string(r.bounds.applicable) << "," << format_number(r.bounds.best_bound()) << ","
      << (r.predicted ? (*r.predicted ? "true" : "false") : "silent") << ","
      << (r.observed.holds ? "true" : "false") << "," << format_number(r.observed.max_radial_deviation)
      << "\n";
    return s.str();
  }
  json j = to_json(r);
  j["model"] = to_json(m.spec);
  return j.dump(2) + "\n";
}

std::vector<double> scan_grid(const RunConfig& c) {
  if (c.steps == 0) throw std::invalid_argument("--steps must be at least 1");
  if (c.steps == 1) return {c.from};
  std::vector<double> grid(c.steps);
  for (std::size_t i = 0; i < c.steps; ++i)
    grid[i] = c.from + (c.to - c.from) * static_cast<double>(i) / static_cast<double>(c.steps - 1);
  grid.back() = c.to;
  return grid;
}

std::string scan_command(const RunConfig& c) {
  const ModelSpec base = load_model_spec(c.model_path);
  base.instantiate();
  const std::vector<double> grid = scan_grid(c);
  const EngineOptions eo = engine_options(c);
  const Engine engine = c.engine;
  const PolynomialFamily family = [base, engine, eo, name = c.param](double value) {
    const ModelSpec s = with_parameter(base, name, value);
    return compute_partition(s.instantiate(), engine, s.hierarchy(), eo);
  };
  TrajectoryOptions to;
  to.finder = finder_options(c);
  to.tolerance = c.tolerance;
  to.threads = c.threads;
  const std::vector<TrajectoryPoint> points = zero_trajectory(family, grid, to);

  std::optional<SharpnessResult> sharp;
  if (c.param == "theta" && std::is_sorted(grid.begin(), grid.end())) {
    const ModelInstance m = base.instantiate();
    const BoundReport b = bound_report(analyze_structure(m.coupling), m.beta, 1.0);
    SharpnessOptions so;
    so.tolerance = c.tolerance;
    sharp = sharpness_scan(family, grid, b.best_bound(), so);
  }

  if (c.format == Format::Csv) {
    std::ostringstream s;
    s << c.param << ",root,re_z,im_z,abs_z_minus_1,phase,holds\n";
    for (const TrajectoryPoint& pt : points) {
      for (std::size_t k = 0; k < pt.zeros.roots.size(); ++k) {
        const std::complex<double> z = snap(pt.zeros.roots[k]);
        s << format_number(pt.parameter) << "," << k << "," << format_number(z.real()) << ","
          << format_number(z.imag()) << "," << format_number(std::abs(std::abs(z) - 1.0)) << ","
          << format_number(std::arg(z)) << "," << (pt.verdict.holds ? 1 : 0) << "\n";
      }
    }
    if (sharp) {
      s << "# sharpness bracketed=" << sharp->bracketed << " lower=" << format_number(sharp->lower)
        << " upper=" << format_number(sharp->upper) << " theta_bound=" << format_number(sharp->theta_bound)
        << " gap=" << format_number(sharp->gap) << " non_monotone=" << sharp->non_monotone << "\n";
    }
    return s.str();
  }
  json j;
  j["model"] = to_json(base);
  j["param"] = c.param;
  json pts = json::array();
  for (const TrajectoryPoint& pt : points)
    pts.push_back({{"value", pt.parameter}, {"zeros", to_json(pt.zeros)}, {"verdict", to_json(pt.verdict)}});
  j["points"] = pts;
  if (sharp) j["sharpness"] = to_json(*sharp);
  return j.dump(2) + "\n";
}

std::string gnuplot_script(const RunConfig& c, const std::filesystem::path& csv) {
  std::ostringstream s;
  s << "set datafile separator ','\n";
  s << "set key autotitle columnhead\n";
  s << "set size ratio -1\n";
  s << "set xlabel 'Re z'\nset ylabel 'Im z'\n";
  s << "set parametric\nset trange [0:2*pi]\n";
  const std::string file = csv.filename().string();
  if (c.command == Command::Scan) {
    s << "plot cos(t), sin(t) title 'unit circle' lc rgb 'gray', \\\n"
      << "     '" << file << "' using 3:4:1 with points pt 7 ps 0.5 palette title '" << c.param << "'\n";
  } else {
    s << "plot cos(t), sin(t) title 'unit circle' lc rgb 'gray', \\\n"
      << "     '" << file << "' using 1:2 with points pt 7 title 'zeros'\n";
  }
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void validate(const RunConfig& c) {
  if (!(c.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (c.threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (needs_model(c.command)) {
    if (c.model_path.empty()) throw std::invalid_argument("a model file is required");
    if (!std::filesystem::exists(c.model_path))
      throw std::invalid_argument("model file not found: " + c.model_path.string());
  }
  if (c.gnuplot) {
    if (c.format != Format::Csv) throw std::invalid_argument("--gnuplot needs --out csv");
    if (!c.output) throw std::invalid_argument("--gnuplot needs --output");
    if (c.command != Command::Zeros && c.command != Command::Scan)
      throw std::invalid_argument("--gnuplot applies to zeros and scan");
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    bool mismatch = false;
    std::string text;
    switch (config.command) {
      case Command::Partition:
        text = partition_command(config);
        break;
      case Command::Zeros:
        text = zeros_command(config);
        break;
      case Command::Structure:
        text = structure_command(config);
        break;
      case Command::Bounds:
        text = bounds_command(config);
        break;
      case Command::Verify:
        text = verify_command(config, mismatch);
        break;
      case Command::Scan:
        text = scan_command(config);
        break;
    }
    if (config.output) {
      write_file(*config.output, text);
      if (config.gnuplot) {
        std::filesystem::path script = *config.output;
        script += ".gp";
        write_file(script, gnuplot_script(config, *config.output));
      }
    } else {
      out << text;
    }
    if (mismatch) {
      err << "verify: theorem predicted the Lee-Yang property but it was not observed\n";
      return kExitMismatch;
    }
    return kExitOk;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Exact Lee-Yang zeros of Blume-Capel and dilute Ising ferromagnets", "lyzero"};
  app.require_subcommand(1);

  RunConfig config;
  std::string engine = "auto";
  std::string format;
  std::string precision = "double";
  std::string output;

  auto add_common = [&](CLI::App* sub, bool model, const std::string& default_format) {
    if (model) sub->add_option("--model", config.model_path, "model file (JSON)")->required();
    sub->add_option("--out", format, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->default_str(default_format);
    sub->add_option("--output", output, "write results to this file");
    sub->add_option("--threads", config.threads, "worker threads (LYZERO_THREADS overrides)")
        ->check(CLI::PositiveNumber);
  };
  auto add_engine = [&](CLI::App* sub) {
    sub->add_option("--engine", engine, "partition engine")
        ->check(CLI::IsMember({"auto", "brute", "operator", "transfer", "hierarchical"}));
  };
  auto add_zero_options = [&](CLI::App* sub) {
    sub->add_option("--tol", config.tolerance, "tolerance on ||z| - 1|")->check(CLI::PositiveNumber);
    sub->add_option("--precision", precision, "root finder precision")
        ->check(CLI::IsMember({"double", "extended"}));
  };

  CLI::App* partition = app.add_subcommand("partition", "fugacity polynomial Z(z)");
  add_common(partition, true, "json");
  add_engine(partition);

  CLI::App* zeros = app.add_subcommand("zeros", "zeros and Lee-Yang verdict");
  add_common(zeros, true, "json");
  add_engine(zeros);
  add_zero_options(zeros);
  zeros->add_flag("--gnuplot", config.gnuplot, "also write <output>.gp");

  CLI::App* structure = app.add_subcommand("structure", "bottleneck matching and condition (ii)");
  add_common(structure, true, "json");

  CLI::App* bounds = app.add_subcommand("bounds", "theta bounds for given beta and kappa");
  add_common(bounds, false, "text");
  bounds->add_option("--beta", config.beta, "inverse temperature")->required();
  bounds->add_option("--kappa", config.kappa, "bottleneck coupling")->required();

  CLI::App* verify = app.add_subcommand("verify", "compare predicted and observed zeros");
  add_common(verify, true, "json");
  add_engine(verify);
  add_zero_options(verify);

  CLI::App* scan = app.add_subcommand("scan", "zero trajectory over a parameter");
  add_common(scan, false, "csv");
  scan->add_option("--family", config.model_path, "base model file")->required();
  scan->add_option("--param", config.param, "theta, q, beta or J")
      ->check(CLI::IsMember({"theta", "q", "beta", "J"}));
  scan->add_option("--from", config.from, "first value")->required();
  scan->add_option("--to", config.to, "last value")->required();
  scan->add_option("--steps", config.steps, "number of grid points")->required();
  add_engine(scan);
  add_zero_options(scan);
  scan->add_flag("--gnuplot", config.gnuplot, "also write <output>.gp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  const std::pair<CLI::App*, Command> table[] = {
      {partition, Command::Partition}, {zeros, Command::Zeros}, {structure, Command::Structure},
      {bounds, Command::Bounds},       {verify, Command::Verify}, {scan, Command::Scan}};
  std::string default_format = "json";
  for (const auto& [sub, cmd] : table) {
    if (sub->parsed()) {
      config.command = cmd;
      if (cmd == Command::Bounds) default_format = "text";
      if (cmd == Command::Scan) default_format = "csv";
    }
  }
  const std::string f = format.empty() ? default_format : format;
  config.format = f == "csv" ? Format::Csv : f == "text" ? Format::Text : Format::Json;
  try {
    config.engine = engine_from_string(engine);
    config.precision = precision_from_string(precision);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (!output.empty()) config.output = output;
  if (const char* env = std::getenv("LYZERO_THREADS")) {
    try {
      const long t = std::stol(env);
      if (t < 1) throw std::invalid_argument("LYZERO_THREADS must be at least 1");
      config.threads = static_cast<unsigned>(t);
    } catch (const std::exception&) {
      std::cerr << "error: LYZERO_THREADS must be a positive integer\n";
      return kExitError;
    }
  }
  return run(config, std::cout, std::cerr);
}

}  // namespace lyzero::cli
