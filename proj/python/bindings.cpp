#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>

#include "subdiff/app.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/forward_solver.hpp"
#include "subdiff/inverse_solver.hpp"
#include "subdiff/kernel.hpp"
#include "subdiff/oracles.hpp"
#include "subdiff/special_functions.hpp"

namespace py = pybind11;
using namespace subdiff;

namespace {

BoxDomain domain_of(const std::vector<double>& lengths) {
    if (lengths.size() == 1) return BoxDomain::interval(lengths[0]);
    if (lengths.size() == 2) return BoxDomain::rectangle(lengths[0], lengths[1]);
    throw PreconditionError("lengths: one or two entries");
}

SpectralCoeffs coeffs_of(const BoxDomain& d, int count, const std::vector<double>& values) {
    SpectralCoeffs c(d, count);
    if (values.size() > c.size()) throw PreconditionError("more coefficients than retained modes");
    for (std::size_t i = 0; i < values.size(); ++i) c[i] = values[i];
    return c;
}

std::vector<double> to_vector(const SpectralCoeffs& c) { return {c.values().begin(), c.values().end()}; }

// None, a constant, polynomial coefficients, or {"kind": "example1", "rho", "b", "lambda"}.
TimeProfile profile_of(py::object g) {
    if (g.is_none()) return TimeProfile::constant(1.0);
    if (py::isinstance<py::dict>(g)) {
        const auto d = g.cast<py::dict>();
        if (!d.contains("kind") || d["kind"].cast<std::string>() != "example1")
            throw PreconditionError("profile dict must have kind 'example1'");
        return TimeProfile::example1(d["rho"].cast<double>(), d.contains("b") ? d["b"].cast<double>() : 0.1,
                                     d.contains("lambda") ? d["lambda"].cast<double>() : 1.0);
    }
    if (py::isinstance<py::float_>(g) || py::isinstance<py::int_>(g)) return TimeProfile::constant(g.cast<double>());
    return TimeProfile::polynomial(g.cast<std::vector<double>>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral solver for forward and inverse source problems of subdiffusion";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<NoSolutionError>(m, "NoSolutionError", PyExc_RuntimeError);
    py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_ArithmeticError);

    m.def("version", &app::version);
    m.def("gamma", [](double x) { return subdiff::gamma(x); }, py::arg("x"));
    m.def("ml", [](double rho, double mu, double z) { return ml(MLParams{rho, mu}, z); }, py::arg("rho"),
          py::arg("mu") = 1.0, py::arg("z"));

    m.def(
        "duhamel",
        [](py::object g, double rho, double lam, double t) {
            const auto v = duhamel(profile_of(g), rho, lam, t);
            return py::make_tuple(v.value, v.error);
        },
        py::arg("g"), py::arg("rho"), py::arg("lam"), py::arg("t"),
        "b(t) for one mode; g is a constant or polynomial coefficients. Returns (value, error).");

    m.def(
        "null_modes",
        [](py::object g, double rho, double t0, int modes, std::vector<double> lengths) {
            const SpectralCoeffs basis(domain_of(lengths), modes);
            const auto cls = classify(profile_of(g), rho, basis.eigenvalues(), t0);
            std::vector<std::string> out;
            for (std::size_t i : cls.null_modes) out.push_back(basis.modes()[i].to_string(basis.domain().dim));
            return out;
        },
        py::arg("g"), py::arg("rho"), py::arg("t0"), py::arg("modes") = 64,
        py::arg("lengths") = std::vector<double>{std::numbers::pi});

    m.def(
        "forward",
        [](std::vector<double> phi, std::vector<double> f, py::object g, double rho, double t, int modes,
           std::vector<double> lengths) {
            ForwardProblem p;
            p.domain = domain_of(lengths);
            p.rho = rho;
            p.phi = coeffs_of(p.domain, modes, phi);
            p.f = coeffs_of(p.domain, modes, f);
            p.g = profile_of(g);
            p.horizon = t;
            return to_vector(ForwardSolution(p).coefficients(t));
        },
        py::arg("phi"), py::arg("f"), py::arg("g") = py::none(), py::arg("rho"), py::arg("t"), py::arg("modes") = 64,
        py::arg("lengths") = std::vector<double>{std::numbers::pi},
        "Spectral coefficients of u(., t) in mode order.");

    m.def(
        "invert",
        [](std::vector<double> phi, std::vector<double> psi, py::object g, double rho, double t0, int modes,
           std::vector<double> lengths) {
            InverseProblem p;
            p.domain = domain_of(lengths);
            p.rho = rho;
            p.phi = coeffs_of(p.domain, modes, phi);
            p.psi = coeffs_of(p.domain, modes, psi);
            p.g = profile_of(g);
            p.t0 = t0;
            p.horizon = t0;
            const auto r = recover(p);
            return py::make_tuple(to_vector(r.f), to_string(r.report.verdict));
        },
        py::arg("phi"), py::arg("psi"), py::arg("g") = py::none(), py::arg("rho"), py::arg("t0"),
        py::arg("modes") = 64, py::arg("lengths") = std::vector<double>{std::numbers::pi},
        "Recover f from the snapshot; returns (coefficients, verdict).");

    m.def(
        "roundtrip",
        [](std::vector<double> phi, std::vector<double> f, double rho, double t0, int modes) {
            const auto d = BoxDomain::interval(std::numbers::pi);
            const auto r =
                roundtrip(coeffs_of(d, modes, phi), coeffs_of(d, modes, f), TimeProfile::constant(1.0), rho, t0);
            return py::make_tuple(r.rel_l2_error, to_string(r.verdict));
        },
        py::arg("phi"), py::arg("f"), py::arg("rho"), py::arg("t0") = 1.0, py::arg("modes") = 64);

    m.def(
        "example1",
        [](double rho, double b) {
            const auto s = oracle::example1_scenario(rho, b);
            py::dict d;
            d["lambda"] = s.lambda;
            d["g0"] = s.g_start;
            d["g1"] = s.g_end;
            d["T_half"] = s.time_factor(0.5);
            return d;
        },
        py::arg("rho") = 0.5, py::arg("b") = 0.1);

    m.def(
        "run",
        [](const std::string& kind, const std::string& config_json) {
            const auto cfg = app::parse_config(app::Json::parse(config_json), kind);
            const auto out = app::run(cfg);
            return py::make_tuple(out.exit_code, out.message);
        },
        py::arg("kind"), py::arg("config_json") = "{}",
        "Run a CLI command from a JSON config string; returns (exit_code, message).");
}
