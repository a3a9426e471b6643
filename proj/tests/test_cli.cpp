#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace mahler;
using namespace mahler::test;

namespace {

const char* RS_JOB = R"({
  "p": 2,
  "field": {"kind": "rationals"},
  "coeffs": ["1", "z-1", "-2*z"],
  "order": 9
})";

} // namespace

TEST_CASE("parse_job on the Rudin-Shapiro fixture") {
    JobSpec spec = parse_job(RS_JOB);
    CHECK(spec.p == 2);
    CHECK(spec.order == 9);
    REQUIRE(spec.coeffs.size() == 3);
    CHECK(spec.coeffs[0] == parse_rf(spec.field, "1"));
    CHECK(spec.coeffs[1] == parse_rf(spec.field, "z-1"));
    CHECK(spec.coeffs[2] == parse_rf(spec.field, "-2*z"));
}

TEST_CASE("parse_job rejections") {
    CHECK_THROWS_AS(parse_job("{not json"), InputError);
    CHECK_THROWS_AS(parse_job(R"({"p":2,"coeffs":["0","1","1"]})"), InputError);
    CHECK_THROWS_AS(parse_job(R"({"p":2,"coeffs":["1","1","0"]})"), InputError);
    CHECK_THROWS_AS(parse_job(R"({"p":1,"coeffs":["1","1"]})"), InputError);
    CHECK_THROWS_AS(parse_job(R"({"coeffs":["1","1"]})"), InputError);
}

TEST_CASE("coefficient expressions simplify") {
    FieldPtr q = Field::rationals();
    RationalFunction v = parse_coefficient(q, 2, "(z^2-1)/(z-1)");
    CHECK(v == parse_rf(q, "z+1"));
    CHECK(parse_coefficient(q, 2, "1/2 + 1/3") == parse_rf(q, "5/6"));
    CHECK(parse_coefficient(q, 2, "z^-1") == parse_rf(q, "1/z"));
    CHECK_THROWS_AS(parse_coefficient(q, 2, "z +"), InputError);
    CHECK_THROWS_AS(parse_coefficient(q, 2, "w"), InputError);
    FieldPtr f3 = Field::fp_function(3);
    CHECK(parse_coefficient(f3, 3, "theta^2*z - 2") ==
          parse_rf(f3, "theta*theta*z+1"));
}

TEST_CASE("field descriptor round trip") {
    for (const char* txt :
         {R"({"kind":"rationals"})", R"({"kind":"fp_function","char":3,"var":"theta"})",
          R"({"kind":"extension","minpoly":["1","0","1"]})"}) {
        FieldPtr f = field_from_json(Json::parse(txt));
        FieldPtr g = field_from_json(field_to_json(f));
        CHECK(field_equal(f, g));
    }
    CHECK_THROWS_AS(field_from_json(Json::parse(R"({"kind":"extension","minpoly":["-1","0","1"]})")),
                    InputError); // reducible
    CHECK_THROWS_AS(
        field_from_json(Json::parse(R"({"kind":"extension","minpoly":["-2","0","0","1"]})")),
        UnsupportedFieldError); // cubic without assertion
    FieldPtr cubic = field_from_json(
        Json::parse(R"({"kind":"extension","minpoly":["-2","0","0","1"],"assert_irreducible":true})"));
    CHECK(cubic->ext_degree() == 3);
}

TEST_CASE("element JSON round trips") {
    FieldPtr q = Field::rationals();
    FieldPtr f3 = Field::fp_function(3);
    auto [qi, i0] = adjoin_root(q, poly_make(q, {fe_one(q), fe_zero(q), fe_one(q)}));
    for (const FieldPtr& f : {q, f3, qi})
        for (int t = 0; t < 40; ++t) {
            FieldElement e = rand_element(f);
            CHECK(fe_equal(fe_from_json(f, fe_to_json(e)), e));
        }
}

TEST_CASE("truncation JSON round trip") {
    FieldPtr q = Field::rationals();
    PuiseuxTruncation t = expand_rational(parse_rf(q, "(1+z)/(z*(1-z))"), 7);
    PuiseuxTruncation back = pt_from_json(q, pt_to_json(t));
    CHECK(back.ram == t.ram);
    CHECK(back.order == t.order);
    CHECK(pt_equal_up_to(back, t, Rational(7)));
    PuiseuxTruncation r = ramify(t, 2);
    PuiseuxTruncation back2 = pt_from_json(q, pt_to_json(r));
    CHECK(back2.ram == 2);
    CHECK(pt_equal_up_to(back2, r, Rational(7, 2)));
}

TEST_CASE("basis JSON round trip preserves every payload field") {
    MahlerEquation eq = rs_equation();
    BasisResult res = solve_equation(eq, 6);
    Json j = basis_to_json(res);
    BasisResult back = basis_from_json(j);
    CHECK(back.p == res.p);
    CHECK(back.d == res.d);
    CHECK(back.v == res.v);
    CHECK(back.j0 == res.j0);
    CHECK(back.n == res.n);
    CHECK(back.K0.size() == res.K0.size());
    CHECK(back.Omega1.size() == res.Omega1.size());
    REQUIRE(back.solutions.size() == res.solutions.size());
    for (size_t i = 0; i < res.solutions.size(); ++i) {
        REQUIRE(back.solutions[i].terms.size() == res.solutions[i].terms.size());
        for (size_t t = 0; t < res.solutions[i].terms.size(); ++t) {
            const auto& [k1, f1] = res.solutions[i].terms[t];
            const auto& [k2, f2] = back.solutions[i].terms[t];
            CHECK(solution_key_cmp(k1, k2) == 0);
            REQUIRE(f1.order.has_value());
            CHECK(pt_equal_up_to(f1, f2, *f1.order));
        }
    }
    // a parsed basis still verifies
    CHECK(verify_basis(eq, back).ok);
}

TEST_CASE("run_and_emit solve and verify flows") {
    JobSpec spec = parse_job(RS_JOB);
    RunResult solved = run_and_emit(spec);
    REQUIRE(solved.exit_code == 0);
    Json payload = Json::parse(solved.output);
    CHECK(payload.at("d").get<long>() == 1);
    CHECK(payload.at("v").get<long>() == 1);
    CHECK(payload.at("j0").get<long>() == 0);
    CHECK(payload.at("K0").size() == 2);
    CHECK(payload.at("Omega1").size() == 2);

    JobSpec vspec = spec;
    vspec.output = "verify";
    RunResult verified = run_and_emit(vspec, solved.output);
    CHECK(verified.exit_code == 0);
    CHECK(verified.diagnostics.find("residual 0 through order 9") != std::string::npos);

    // text format carries the same leading coefficients
    JobSpec tspec = spec;
    tspec.format = "text";
    RunResult text = run_and_emit(tspec);
    CHECK(text.exit_code == 0);
    // the e_{-1/2} group combines (2/3) f_1 + g, so its z^8 coefficient is 1/24
    CHECK(text.output.find("1/24") != std::string::npos);
    CHECK(text.output.find("e_(-1/2)") != std::string::npos);
    CHECK(text.output.find("xi{seq=1*(-2)^k1; a=(1)}") != std::string::npos);
}

TEST_CASE("text and JSON outputs agree on sampled coefficients") {
    JobSpec spec = parse_job(RS_JOB);
    BasisResult res = solve_equation(spec.equation(), 9);
    Json j = basis_to_json(res);
    std::string text = basis_to_text(res);
    // the f_1 series appears identically in both renderings
    const Json& term = j.at("solutions").at(0).at("terms").at(0);
    CHECK(term.at("f").at("coeffs").at("3").get<std::string>() == "-1");
    CHECK(text.find("z^2 - z^3 + z^4") != std::string::npos);
}

TEST_CASE("run_and_emit entry equation flow") {
    JobSpec spec = parse_job(RS_JOB);
    spec.output = "entry-equations";
    spec.entry_i = 0;
    spec.entry_j = 1;
    RunResult r = run_and_emit(spec);
    REQUIRE(r.exit_code == 0);
    Json eqj = Json::parse(r.output);
    CHECK(eqj.at("coeffs").size() == 5);
}

TEST_CASE("exit codes") {
    // malformed JSON -> 1
    try {
        parse_job("{");
        FAIL("expected throw");
    } catch (const InputError&) {
    }
    JobSpec bad;
    bad.p = 2;
    bad.field = Field::rationals();
    bad.coeffs = {parse_rf(bad.field, "1"), parse_rf(bad.field, "1")};
    bad.output = "nope";
    CHECK(run_and_emit(bad).exit_code == 1);

    // cubic extension requirement surfaces exit code 2
    JobSpec cubic = parse_job(R"({"p":2,"coeffs":["-2","0","0","1"],"order":3})");
    RunResult r = run_and_emit(cubic);
    CHECK(r.exit_code == 2);
}
