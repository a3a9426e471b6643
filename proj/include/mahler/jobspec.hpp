#pragma once

#include <json.hpp>

#include "mahler/solver.hpp"

namespace mahler {

using Json = nlohmann::json;

/// Parsed CLI job: radix, coefficient field, equation coefficients, order and
/// requested output.
struct JobSpec {
    long p = 2;
    FieldPtr field;
    std::vector<RationalFunction> coeffs;
    long order = 0;
    std::string output = "basis"; // basis | entry-equations | verify
    std::string format = "json";  // text | json
    long entry_i = 0, entry_j = 1;

    MahlerEquation equation() const { return MahlerEquation::make(p, field, coeffs); }
};

/// Recursive-descent parser for coefficient expressions over `field`:
/// integer/rational literals, z, the field's own symbols (theta, g),
/// + - * / ^ and parentheses. Errors carry a character position.
RationalFunction parse_coefficient(const FieldPtr& field, long p, const std::string& text);

FieldPtr field_from_json(const Json& j);
Json field_to_json(const FieldPtr& f);

FieldElement fe_from_json(const FieldPtr& f, const Json& j);
Json fe_to_json(const FieldElement& e);

PuiseuxTruncation pt_from_json(const FieldPtr& f, const Json& j);
Json pt_to_json(const PuiseuxTruncation& t);

Json omega_to_json(const std::vector<Rational>& a, const ExpPolySeq& seq);
std::pair<std::vector<Rational>, ExpPolySeq> omega_from_json(const FieldPtr& f, const Json& j);

Json const_elem_to_json(const ConstElem& e);

Json basis_to_json(const BasisResult& res);
/// Rebuilds the solution payload (summary + solutions); provenance fields are
/// left empty, which is all verification needs.
BasisResult basis_from_json(const Json& j);

std::string basis_to_text(const BasisResult& res);
Json equation_to_json(const MahlerEquation& eq);
std::string equation_to_text(const MahlerEquation& eq);
Json verify_report_to_json(const VerifyReport& rep);

JobSpec parse_job(const std::string& json_text);

struct RunResult {
    int exit_code = 0;
    std::string output;      // primary payload (result JSON or text)
    std::string diagnostics; // human-readable status / error messages
};

/// Runs the requested pipeline; exit code 0 on success, 1 on input or
/// verification errors, 2 on unsupported-extension errors.
RunResult run_and_emit(const JobSpec& spec, const std::string& basis_json = "");

} // namespace mahler
