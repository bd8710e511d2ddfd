#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "weylsys/cli.hpp"
#include "weylsys/counting.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/expsum.hpp"
#include "weylsys/hardy_littlewood.hpp"
#include "weylsys/json_io.hpp"
#include "weylsys/parser.hpp"
#include "weylsys/pencil.hpp"
#include "weylsys/system_file.hpp"

namespace py = pybind11;
using namespace weylsys;

namespace {

// Results cross the boundary as the same documents the CLI writes.
py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Rational rational_arg(const py::handle& v) { return parse_rational(py::str(v).cast<std::string>()); }

Budget budget_of(double ceiling, unsigned workers) {
  Budget b;
  b.ceiling = ceiling;
  b.workers = workers;
  return b;
}

LatticeBox box_or_unit(const FormSystem& sys, const std::optional<std::vector<std::pair<py::object, py::object>>>& box) {
  if (!box) return LatticeBox::unit(sys.num_vars());
  std::vector<std::pair<Rational, Rational>> iv;
  for (const auto& [lo, hi] : *box) iv.emplace_back(rational_arg(lo), rational_arg(hi));
  return LatticeBox(std::move(iv));
}

std::vector<std::string> strings(const std::vector<py::object>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(py::str(x).cast<std::string>());
  return out;
}

FormSystem make_system(const std::vector<std::string>& forms, int num_vars) {
  if (forms.empty()) throw InputError("need at least one form");
  std::vector<Form> fs;
  for (const auto& f : forms) fs.push_back(parse_polynomial(f, num_vars));
  return FormSystem(std::move(fs));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact counting, Weyl sums and pencil invariants for systems of integral forms";
  m.attr("__version__") = WEYLSYS_VERSION;

  py::register_exception<FeasibilityError>(m, "FeasibilityError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Form>(m, "Form")
      .def(py::init([](const std::string& text, int num_vars) { return parse_polynomial(text, num_vars); }),
           py::arg("text"), py::arg("num_vars"))
      .def_property_readonly("num_vars", &Form::num_vars)
      .def_property_readonly("degree", &Form::degree)
      .def("__call__", [](const Form& f, const std::vector<std::int64_t>& x) {
        if (static_cast<int>(x.size()) != f.num_vars()) throw InputError("point length does not match variable count");
        return py::int_(py::str(f.eval(std::span<const std::int64_t>(x)).get_str()));
      })
      .def("__str__", &format_polynomial)
      .def("__repr__", [](const Form& f) { return "Form('" + format_polynomial(f) + "', " + std::to_string(f.num_vars()) + ")"; })
      .def(py::self == py::self);

  py::class_<FormSystem>(m, "FormSystem")
      .def(py::init(&make_system), py::arg("forms"), py::arg("num_vars"))
      .def_static("load", [](const std::string& path) { return SystemFile::load(path).system(); })
      .def_property_readonly("num_vars", &FormSystem::num_vars)
      .def_property_readonly("degree", &FormSystem::degree)
      .def_property_readonly("num_forms", &FormSystem::num_forms)
      .def("__len__", &FormSystem::num_forms)
      .def("__getitem__", [](const FormSystem& s, std::size_t i) { return s[i]; })
      .def("__repr__", [](const FormSystem& s) {
        std::ostringstream os;
        os << "FormSystem([";
        for (int i = 0; i < s.num_forms(); ++i) os << (i ? ", '" : "'") << format_polynomial(s[static_cast<std::size_t>(i)]) << "'";
        os << "], " << s.num_vars() << ")";
        return os.str();
      });

  m.def(
      "count_zeros",
      [](const FormSystem& sys, const py::object& P, std::optional<std::vector<std::pair<py::object, py::object>>> box,
         double ceiling, unsigned workers) {
        return to_py(to_json(count_zeros(sys, box_or_unit(sys, box), rational_arg(P), budget_of(ceiling, workers))));
      },
      py::arg("system"), py::arg("P"), py::arg("box") = py::none(), py::arg("ceiling") = 1e9, py::arg("workers") = 1);

  m.def(
      "count_zeros_mod",
      [](const FormSystem& sys, std::int64_t modulus, double ceiling, unsigned workers) {
        return to_py(to_json(count_zeros_mod(sys, modulus, budget_of(ceiling, workers))));
      },
      py::arg("system"), py::arg("modulus"), py::arg("ceiling") = 1e9, py::arg("workers") = 1);

  m.def(
      "weyl_sum",
      [](const FormSystem& sys, const std::vector<py::object>& alpha, const py::object& P,
         std::optional<std::vector<std::pair<py::object, py::object>>> box, double ceiling, unsigned workers) {
        return to_py(to_json(weyl_sum(sys, Alpha::parse(strings(alpha)), box_or_unit(sys, box), rational_arg(P),
                                      budget_of(ceiling, workers))));
      },
      py::arg("system"), py::arg("alpha"), py::arg("P"), py::arg("box") = py::none(), py::arg("ceiling") = 1e9,
      py::arg("workers") = 1);

  m.def(
      "dichotomy",
      [](const FormSystem& sys, const std::vector<py::object>& alpha, const py::object& P, const py::object& theta,
         std::optional<double> k, double ceiling) {
        DichotomyOptions opt;
        opt.k = k;
        return to_py(to_json(dichotomy_experiment(sys, Alpha::parse(strings(alpha)), rational_arg(theta), rational_arg(P),
                                                  LatticeBox::unit(sys.num_vars()), opt, budget_of(ceiling, 1))));
      },
      py::arg("system"), py::arg("alpha"), py::arg("P"), py::arg("theta") = "1/2", py::arg("k") = py::none(),
      py::arg("ceiling") = 1e9);

  m.def(
      "pencil_rank",
      [](const FormSystem& sys, int height, double ceiling) {
        return to_py(to_json(min_pencil_rank_search(sys, height, 0, budget_of(ceiling, 1))));
      },
      py::arg("system"), py::arg("height") = 3, py::arg("ceiling") = 1e9);

  m.def(
      "discriminant",
      [](const FormSystem& sys) {
        if (sys.num_forms() != 2 || sys.degree() != 2) throw InputError("discriminant needs two quadratic forms");
        return to_py(to_json(discriminant_binary_form(sys[0], sys[1])));
      },
      py::arg("system"));

  m.def(
      "singular_series",
      [](const FormSystem& sys, std::int64_t p_max, int k_max, double ceiling) {
        return to_py(to_json(singular_series(sys, p_max, k_max, budget_of(ceiling, 1))));
      },
      py::arg("system"), py::arg("p_max") = 50, py::arg("k_max") = 3, py::arg("ceiling") = 1e9);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit code, stdout, stderr).");
}
