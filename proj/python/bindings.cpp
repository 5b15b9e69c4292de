// Python module: JSON documents in and out, errors mapped to Python exceptions.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "torelli/errors.hpp"
#include "torelli/io.hpp"

namespace py = pybind11;
using namespace torelli;
using io::Json;

namespace {

MonodromyCertificate certificate(const std::optional<std::string>& text, std::uint64_t seed) {
  if (text) return io::certificate_from_json(Json::parse(*text));
  ContinuationOptions opt;
  opt.seed = seed;
  return derive_certificate(opt);
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

std::string derive(std::uint64_t seed) { return io::dump(io::certificate_to_json(certificate(std::nullopt, seed))); }

void validate(const std::string& text) { io::certificate_from_json(parse(text)); }

std::string group_audit(const std::optional<std::string>& cert, std::uint64_t seed) {
  return io::dump(io::group_audit_to_json(io::run_group_audit(certificate(cert, seed))));
}

std::string check(const std::string& a, const std::string& b, const std::optional<std::string>& cert, int depth,
                  std::uint64_t seed) {
  const PointConfig pa = io::point_config_from_json(parse(a));
  const PointConfig pb = io::point_config_from_json(parse(b));
  TorelliOptions opt;
  opt.depth = depth;
  opt.continuation.seed = seed;
  return io::dump(io::to_json(torelli_check(pa, pb, certificate(cert, seed), opt), pa, pb));
}

std::string period(const std::string& config, const std::optional<std::string>& cert, std::uint64_t seed) {
  const Json j = parse(config);
  const MonodromyCertificate c = certificate(cert, seed);
  const PeriodPoint p = io::is_arrangement(j) ? period_point(io::arrangement_from_json(j), c)
                                               : period_point(io::point_config_from_json(j), c);
  Json out = io::to_json(p);
  out["h_vv"] = c.form().norm(p.periods.values);
  return io::dump(out);
}

std::string hodge(int k) { return io::dump(io::to_json(hodge_numbers(k))); }

std::string appendix(const std::optional<std::string>& manifest, std::uint64_t seed, int triples, int samples) {
  CheckOptions opt;
  opt.seed = seed;
  opt.triples = triples;
  opt.samples = samples;
  const Manifest m = manifest ? parse_manifest(*manifest) : builtin_manifest();
  return io::dump(io::to_json(run_manifest(m, opt)));
}

bool moduli_equivalent(const std::string& a, const std::string& b) {
  return is_equivalent(io::point_config_from_json(parse(a)), io::point_config_from_json(parse(b))).has_value();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "period map, monodromy and Torelli checks for six points on the line";

  auto base = py::register_exception<Error>(m, "TorelliError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<VerificationError>(m, "VerificationError", base.ptr());
  py::register_exception<PrecisionError>(m, "PrecisionError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const OverflowError& e) {
      PyErr_SetString(PyExc_OverflowError, e.what());
    }
  });

  const auto none = py::none();
  m.def("derive_certificate", &derive, py::arg("seed") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("validate_certificate", &validate, py::arg("certificate"));
  m.def("group_audit", &group_audit, py::arg("certificate") = none, py::arg("seed") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("torelli_check", &check, py::arg("a"), py::arg("b"), py::arg("certificate") = none, py::arg("depth") = 6,
        py::arg("seed") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("period_point", &period, py::arg("config"), py::arg("certificate") = none, py::arg("seed") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("hodge_numbers", &hodge, py::arg("k"));
  m.def("appendix_verify", &appendix, py::arg("manifest") = none, py::arg("seed") = 1, py::arg("triples") = 100,
        py::arg("samples") = 100, py::call_guard<py::gil_scoped_release>());
  m.def("moduli_equivalent", &moduli_equivalent, py::arg("a"), py::arg("b"));
}
