#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lieosc/errors.hpp"
#include "lieosc/experiments.hpp"

namespace py = pybind11;
using namespace lieosc;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

// Holder for the immutable shared grid.
struct Grid {
  GridPtr ptr;
};

GridFunction to_grid_function(const Grid& g, const ComplexArray& values) {
  if (values.ndim() != 1 || static_cast<std::size_t>(values.shape(0)) != g.ptr->size())
    throw InvalidArgument("expected a 1-d array of " + std::to_string(g.ptr->size()) + " values");
  return GridFunction(g.ptr, std::vector<Complex>(values.data(), values.data() + values.shape(0)));
}

ComplexArray to_array(const GridFunction& f) {
  return ComplexArray(static_cast<py::ssize_t>(f.size()), f.values().data());
}

py::array_t<double> point_array(const QuadratureGrid& g) {
  const std::size_t cols = g.group().is_su2() ? 4 : static_cast<std::size_t>(g.group().dimension());
  py::array_t<double> out({static_cast<py::ssize_t>(g.size()), static_cast<py::ssize_t>(cols)});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& p = g.point(i);
    for (std::size_t k = 0; k < cols; ++k) v(i, k) = p.is_su2() ? p.as_su2().q[k] : p.as_torus().coords[k];
  }
  return out;
}

GroupPoint to_point(const GroupId& group, const std::vector<double>& c) {
  if (group.is_su2()) {
    if (c.size() != 4) throw InvalidArgument("SU2 points are quaternions [a, b, c, d]");
    return GroupPoint::su2(c[0], c[1], c[2], c[3]);
  }
  if (static_cast<int>(c.size()) != group.dimension()) throw InvalidArgument("coordinate count must match the torus");
  return GroupPoint::torus(c);
}

py::object index_to_py(const DualIndex& i) {
  if (const auto* t = std::get_if<TorusFreq>(&i)) return py::tuple(py::cast(t->ell));
  return py::float_(std::get<Su2Spin>(i).two_l / 2.0);
}

Regularization regularization(std::optional<double> sigma) {
  return sigma ? Regularization::gaussian(*sigma) : Regularization::none();
}

}  // namespace

PYBIND11_MODULE(_lieosc, m) {
  m.doc() = "Fourier analysis and oscillating multipliers on T^n and SU(2)";
  m.attr("__version__") = kLibraryVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init([](const std::string& group, int resolution) {
             return Grid{build_grid(GroupId::parse(group), resolution)};
           }),
           py::arg("group"), py::arg("resolution"))
      .def_property_readonly("group", [](const Grid& g) { return g.ptr->group().name(); })
      .def_property_readonly("resolution", [](const Grid& g) { return g.ptr->resolution(); })
      .def_property_readonly("band_limit", [](const Grid& g) { return g.ptr->band_limit(); })
      .def_property_readonly("spacing", [](const Grid& g) { return g.ptr->spacing(); })
      .def("__len__", [](const Grid& g) { return g.ptr->size(); })
      .def_property_readonly("points", [](const Grid& g) { return point_array(*g.ptr); },
                             "torus coordinates in [0, 1), or unit quaternions for SU2")
      .def_property_readonly("weights", [](const Grid& g) { return py::array(py::cast(g.ptr->weights())); })
      .def_property_readonly("norms", [](const Grid& g) { return py::array(py::cast(g.ptr->norms())); })
      .def("supports_bandwidth", [](const Grid& g, double L) { return g.ptr->supports_bandwidth(L); })
      .def("__repr__", [](const Grid& g) {
        return "Grid('" + g.ptr->group().name() + "', " + std::to_string(g.ptr->resolution()) + ")";
      });

  m.def("diameter", [](const std::string& g) { return GroupId::parse(g).diameter(); });
  m.def("ball_volume", [](const std::string& g, double r) { return ball_volume(GroupId::parse(g), r); });
  m.def("distance", [](const std::string& g, const std::vector<double>& x, const std::vector<double>& y) {
    const auto id = GroupId::parse(g);
    return distance(to_point(id, x), to_point(id, y));
  });

  py::class_<FourierCoefficients>(m, "Coefficients")
      .def_property_readonly("group", [](const FourierCoefficients& c) { return c.group().name(); })
      .def_property_readonly("bandwidth", &FourierCoefficients::bandwidth)
      .def("__len__", &FourierCoefficients::size)
      .def("indices", [](const FourierCoefficients& c) {
        py::list out;
        for (const auto& i : c.indices()) out.append(index_to_py(i));
        return out;
      })
      .def("block", [](const FourierCoefficients& c, std::size_t i) -> Matrix {
        if (i >= c.size()) throw py::index_error();
        return c.block(i);
      })
      .def("energy", &plancherel_energy)
      .def("to_json", [](const FourierCoefficients& c) { return c.to_json().dump(); })
      .def_static("from_json",
                  [](const std::string& s) { return FourierCoefficients::from_json(nlohmann::json::parse(s)); });

  m.def("forward_transform",
        [](const Grid& g, const ComplexArray& values, double bandwidth) {
          return forward_transform(to_grid_function(g, values), bandwidth);
        },
        py::arg("grid"), py::arg("values"), py::arg("bandwidth"));
  m.def("inverse_transform",
        [](const FourierCoefficients& c, const Grid& g) { return to_array(inverse_transform(c, g.ptr)); },
        py::arg("coefficients"), py::arg("grid"));
  m.def("integral", [](const Grid& g, const ComplexArray& v) { return to_grid_function(g, v).integral(); });

  py::class_<MultiplierSymbol>(m, "Symbol")
      .def_property_readonly("label", &MultiplierSymbol::label)
      .def("__call__", [](const MultiplierSymbol& s, double spin) {
        if (!s.group().is_su2()) throw InvalidArgument("use call_torus for torus symbols");
        return s(Su2Spin{static_cast<int>(std::lround(2 * spin))});
      }, py::arg("spin"))
      .def("call_torus", [](const MultiplierSymbol& s, std::vector<int> ell) { return s(TorusFreq{std::move(ell)}); })
      .def("__mul__", &MultiplierSymbol::product);

  m.def("oscillating_symbol", [](const std::string& g, double theta) { return oscillating_symbol(GroupId::parse(g), theta); });
  m.def("bessel_symbol", [](const std::string& g, double s) { return bessel_symbol(GroupId::parse(g), s); });
  m.def("pure_oscillation_symbol",
        [](const std::string& g, double theta) { return pure_oscillation_symbol(GroupId::parse(g), theta); });
  m.def("heat_symbol", [](const std::string& g, double t) { return heat_symbol(GroupId::parse(g), t); });
  m.def("identity_symbol", [](const std::string& g) { return identity_symbol(GroupId::parse(g)); });

  m.def("apply_multiplier",
        [](const MultiplierSymbol& s, const Grid& g, const ComplexArray& v, double bandwidth) {
          return to_array(apply_multiplier(s, to_grid_function(g, v), bandwidth));
        },
        py::arg("symbol"), py::arg("grid"), py::arg("values"), py::arg("bandwidth"));

  py::class_<KernelSynthesis>(m, "Kernel")
      .def_property_readonly("values", [](const KernelSynthesis& k) { return to_array(k.kernel); })
      .def_readonly("coefficients", &KernelSynthesis::coefficients)
      .def_readonly("bandwidth", &KernelSynthesis::bandwidth)
      .def_readonly("label", &KernelSynthesis::label)
      .def("envelope_slope", [](const KernelSynthesis& k, double lo, double hi) {
        return envelope_slope(k, {lo, hi});
      });
  m.def("synthesize_kernel",
        [](const MultiplierSymbol& s, const Grid& g, double bandwidth, std::optional<double> sigma) {
          return synthesize_kernel(s, g.ptr, bandwidth, regularization(sigma));
        },
        py::arg("symbol"), py::arg("grid"), py::arg("bandwidth"), py::arg("sigma") = py::none(),
        "sigma=None synthesizes without damping");

  m.def("decay_constant",
        [](const MultiplierSymbol& s, double theta, double bandwidth) {
          const auto r = verify_decay(s, theta, bandwidth);
          return py::make_tuple(r.constant, r.admissible);
        },
        py::arg("symbol"), py::arg("theta"), py::arg("bandwidth"));

  m.def("estimate_seminorm",
        [](const KernelSynthesis& k, double theta, const std::vector<double>& radii, int y_samples,
           std::uint64_t seed) {
          const auto e = estimate_seminorm(BandLimitedKernel::from_synthesis(k), theta, radii, y_samples, seed);
          std::vector<double> per_r;
          for (const auto& r : e.per_r) per_r.push_back(r.sup_y);
          return py::make_tuple(e.value, per_r);
        },
        py::arg("kernel"), py::arg("theta"), py::arg("radii"), py::arg("y_samples") = 8, py::arg("seed") = 0);
  m.def("log_spaced", &log_spaced);

  m.def("cz_decompose",
        [](const Grid& g, const ComplexArray& v, double altitude, int depth) {
          const auto f = to_grid_function(g, v);
          const auto d = decompose(f, altitude, build_dyadic_system(g.ptr, depth));
          const auto report = verify_properties(d, f);
          py::list cells;
          for (const auto& b : d.bad) {
            py::dict c;
            c["level"] = b.level;
            c["cell"] = b.cell;
            c["measure"] = b.measure;
            c["diameter"] = b.diameter;
            c["mean"] = b.mean;
            cells.append(c);
          }
          py::dict checks;
          for (const auto& c : report.checks) checks[py::str(c.name)] = py::make_tuple(c.passed, c.measured, c.bound);
          return py::make_tuple(to_array(d.good), cells, checks);
        },
        py::arg("grid"), py::arg("values"), py::arg("altitude"), py::arg("depth"),
        "returns (good part, bad cells, {property: (passed, measured, bound)})");

  m.def("run_config",
        [](const std::filesystem::path& config, const std::filesystem::path& out, std::optional<std::uint64_t> seed) {
          const auto r = run_config_file(config, out, seed);
          py::dict d;
          d["code"] = static_cast<int>(r.code);
          d["message"] = r.message;
          d["warnings"] = r.warnings;
          d["artifacts"] = r.artifacts;
          return d;
        },
        py::arg("config"), py::arg("out_dir"), py::arg("seed") = py::none());
}
