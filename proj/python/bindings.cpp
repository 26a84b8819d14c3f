#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lyzero/lyzero.hpp"

namespace py = pybind11;
using namespace lyzero;

namespace {

py::object to_python(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& x : j) out.append(to_python(x));
      return out;
    }
    default: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
  }
}

struct Model {
  ModelSpec spec;

  ModelInstance instance() const { return spec.instantiate(); }

  FugacityPolynomial partition(const std::string& engine, unsigned threads) const {
    EngineOptions opts;
    opts.threads = threads;
    return compute_partition(instance(), engine_from_string(engine), spec.hierarchy(), opts);
  }
};

}  // namespace

PYBIND11_MODULE(_lyzero, m) {
  m.doc() = "Lee-Yang zeros of Blume-Capel and dilute ferromagnets";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<RootFindingError>(m, "RootFindingError", PyExc_RuntimeError);
  py::register_exception<ProblemTooLarge>(m, "ProblemTooLarge", PyExc_RuntimeError);

  m.def("bound_condition_i", &bound_condition_i, py::arg("beta_kappa"));
  m.def("bound_condition_ii", &bound_condition_ii, py::arg("beta_kappa"));
  m.def("theta_from_delta", &theta_from_delta, py::arg("beta"), py::arg("delta"));
  m.def("theta_from_q", &theta_from_q, py::arg("q"));
  m.def("omega_pm", [](double kappa) {
    const OmegaPair w = omega_pm(kappa);
    return py::make_tuple(w.minus, w.plus);
  }, py::arg("kappa"));
  m.def("epsilon_pm", [](double K, double theta) {
    const EpsilonPair e = epsilon_pm(K, theta);
    return py::make_tuple(e.minus, e.plus);
  }, py::arg("K"), py::arg("theta"));
  m.def("corollary_bounds", [](double beta, double kappa) {
    const CorollaryBounds c = corollary_bounds(beta, kappa);
    py::dict out;
    out["delta_max"] = c.delta_max;
    out["q_max"] = c.q_max;
    out["delta_max_below_half_kappa"] = c.delta_max_below_half_kappa;
    return out;
  }, py::arg("beta"), py::arg("kappa"));

  py::class_<FugacityPolynomial>(m, "Polynomial")
      .def(py::init<std::vector<double>, double, double>(), py::arg("coefficients"), py::arg("beta"),
           py::arg("log_scale") = 0.0)
      .def_property_readonly("coefficients", [](const FugacityPolynomial& p) {
        return std::vector<double>(p.coefficients().begin(), p.coefficients().end());
      })
      .def_property_readonly("degree", &FugacityPolynomial::degree)
      .def_property_readonly("beta", &FugacityPolynomial::beta)
      .def_property_readonly("log_scale", &FugacityPolynomial::log_scale)
      .def("coefficient", &FugacityPolynomial::coefficient, py::arg("m"))
      .def("evaluate", &FugacityPolynomial::evaluate, py::arg("z"))
      .def("log_value_at_one", &FugacityPolynomial::log_value_at_one)
      .def("zeros", [](const FugacityPolynomial& p, const std::string& precision) {
        ZeroFinderOptions opts;
        opts.precision = precision_from_string(precision);
        return find_zeros(p, opts).roots;
      }, py::arg("precision") = "double")
      .def("verdict", [](const FugacityPolynomial& p, double tol, const std::string& precision) {
        ZeroFinderOptions opts;
        opts.precision = precision_from_string(precision);
        return to_python(to_json(classify(find_zeros(p, opts), p, tol)));
      }, py::arg("tol") = kDefaultCircleTolerance, py::arg("precision") = "double")
      .def("to_dict", [](const FugacityPolynomial& p) { return to_python(to_json(p)); });

  py::class_<Model>(m, "Model")
      .def_static("from_json", [](const std::string& text) { return Model{parse_model_spec(text)}; },
                  py::arg("text"))
      .def_static("load", [](const std::filesystem::path& path) { return Model{load_model_spec(path)}; },
                  py::arg("path"))
      .def_property_readonly("beta", [](const Model& self) { return self.spec.beta; })
      .def_property_readonly("site_count", [](const Model& self) { return self.instance().site_count(); })
      .def("with_parameter", [](const Model& self, const std::string& name, double value) {
        return Model{with_parameter(self.spec, name, value)};
      }, py::arg("name"), py::arg("value"))
      .def("canonical_json", [](const Model& self) { return canonical_json(self.spec); })
      .def("coupling", [](const Model& self) {
        const CouplingMatrix K = self.spec.build_coupling();
        return std::vector<double>(K.entries().begin(), K.entries().end());
      })
      .def("partition", &Model::partition, py::arg("engine") = "auto", py::arg("threads") = 1)
      .def("log_dropped_prefactor", [](const Model& self) {
        const ModelInstance inst = self.instance();
        return log_dropped_prefactor(inst.measure, inst.site_count());
      })
      .def("structure", [](const Model& self) {
        return to_python(to_json(analyze_structure(self.spec.build_coupling())));
      })
      .def("verify", [](const Model& self, double tol) {
        VerifyOptions opts;
        opts.hierarchy = self.spec.hierarchy();
        opts.tolerance = tol;
        return to_python(to_json(verify_theorem1(self.instance(), opts)));
      }, py::arg("tol") = kDefaultCircleTolerance);
}
