#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mahler/jobspec.hpp"

namespace py = pybind11;
using namespace mahler;

namespace {

// exceptions map onto the CLI exit-code scheme through dedicated types
void translate(const MahlerError& e) {
    if (dynamic_cast<const UnsupportedFieldError*>(&e))
        PyErr_SetString(PyExc_NotImplementedError, e.what());
    else if (dynamic_cast<const InputError*>(&e))
        PyErr_SetString(PyExc_ValueError, e.what());
    else
        PyErr_SetString(PyExc_RuntimeError, e.what());
}

std::string solve_json(const std::string& job_json) {
    JobSpec spec = parse_job(job_json);
    BasisResult res = solve_equation(spec.equation(), spec.order);
    return basis_to_json(res).dump();
}

std::string solve_text(const std::string& job_json) {
    JobSpec spec = parse_job(job_json);
    BasisResult res = solve_equation(spec.equation(), spec.order);
    return basis_to_text(res);
}

std::string verify_json(const std::string& job_json, const std::string& basis_json) {
    JobSpec spec = parse_job(job_json);
    BasisResult res = basis_from_json(Json::parse(basis_json));
    VerifyReport rep = verify_basis(spec.equation(), res);
    return verify_report_to_json(rep).dump();
}

std::string entry_equation_json(const std::string& job_json, long i, long j) {
    JobSpec spec = parse_job(job_json);
    MahlerEquation eq = spec.equation();
    long d = ramification_index(newton_slopes(eq), eq.p);
    MahlerEquation eqd = d == 1 ? eq : eq.substitute_power(d);
    MahlerSystem sys = build_companion(eqd);
    WindowContext ctx(sys);
    AdmissiblePair pair = admissible_pair(ctx);
    return equation_to_json(entry_equation(pair, sys, i, j)).dump();
}

std::vector<std::string> newton_slopes_py(const std::string& job_json) {
    JobSpec spec = parse_job(job_json);
    std::vector<std::string> out;
    for (const auto& s : newton_slopes(spec.equation())) out.push_back(rat_to_string(s));
    return out;
}

long ramification_index_py(const std::string& job_json) {
    JobSpec spec = parse_job(job_json);
    MahlerEquation eq = spec.equation();
    return ramification_index(newton_slopes(eq), eq.p);
}

} // namespace

PYBIND11_MODULE(_mahler, m) {
    m.doc() = "exact solver for linear Mahler equations";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const MahlerError& e) {
            translate(e);
        }
    });

    m.def("solve", &solve_json, py::arg("job_json"),
          "Solve the job (JSON string) and return the basis result as JSON.");
    m.def("solve_text", &solve_text, py::arg("job_json"),
          "Solve the job and return a human-readable rendering of the basis.");
    m.def("verify", &verify_json, py::arg("job_json"), py::arg("basis_json"),
          "Verify a basis (JSON) against the job's equation; returns a JSON report.");
    m.def("entry_equation", &entry_equation_json, py::arg("job_json"), py::arg("i"), py::arg("j"),
          "Mahler equation annihilating the (i, j) entry of P, as JSON.");
    m.def("newton_slopes", &newton_slopes_py, py::arg("job_json"),
          "Finite Newton-polygon slopes of the job's equation.");
    m.def("ramification_index", &ramification_index_py, py::arg("job_json"),
          "The index d(A) of the job's equation.");
}
