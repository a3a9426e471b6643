#include "mahler/jobspec.hpp"

#include <cctype>
#include <sstream>

namespace mahler {

// ---------------------------------------------------------------------------
// coefficient expression parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    const FieldPtr& field;
    const std::string& text;
    size_t pos = 0;

    [[noreturn]] void die(const std::string& why) const {
        throw InputError("parse error at position " + std::to_string(pos) + ": " + why + " in '" +
                         text + "'");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    RationalFunction parse_expr() {
        RationalFunction v = parse_term();
        while (true) {
            if (eat('+'))
                v = v + parse_term();
            else if (eat('-'))
                v = v - parse_term();
            else
                return v;
        }
    }

    RationalFunction parse_term() {
        RationalFunction v = parse_unary();
        while (true) {
            if (eat('*'))
                v = v * parse_unary();
            else if (eat('/')) {
                RationalFunction d = parse_unary();
                if (d.is_zero()) die("division by zero");
                v = v / d;
            } else
                return v;
        }
    }

    RationalFunction parse_unary() {
        if (eat('-')) return -parse_unary();
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    RationalFunction parse_power() {
        RationalFunction base = parse_atom();
        if (!eat('^')) return base;
        skip_ws();
        bool neg = eat('-');
        skip_ws();
        if (pos >= text.size() || !std::isdigit((unsigned char)text[pos])) die("expected integer exponent");
        long e = 0;
        while (pos < text.size() && std::isdigit((unsigned char)text[pos])) {
            e = e * 10 + (text[pos] - '0');
            if (e > 100000) die("exponent too large");
            ++pos;
        }
        RationalFunction r = RationalFunction::one(field);
        for (long i = 0; i < e; ++i) r = r * base;
        if (neg) {
            if (r.is_zero()) die("zero to a negative power");
            r = rf_inv(r);
        }
        return r;
    }

    RationalFunction parse_atom() {
        skip_ws();
        if (pos >= text.size()) die("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            RationalFunction v = parse_expr();
            if (!eat(')')) die("expected ')'");
            return v;
        }
        if (std::isdigit((unsigned char)c)) {
            Integer n = 0;
            while (pos < text.size() && std::isdigit((unsigned char)text[pos])) {
                n = n * 10 + (text[pos] - '0');
                ++pos;
            }
            return RationalFunction::constant(fe_from_rational(field, Rational(n)));
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum((unsigned char)text[pos]) || text[pos] == '_'))
                ++pos;
            std::string name = text.substr(start, pos - start);
            if (name == "z") return RationalFunction::from_poly(poly_x(field));
            for (FieldPtr f = field; f;) {
                if (f->kind == FieldKind::FpFunction && name == f->var_name) {
                    FieldElement th = fe_zero(f);
                    th.fn.num = FpPoly{f->char_p, {0, 1}};
                    th.fn.den = FpPoly{f->char_p, {1}};
                    return RationalFunction::constant(lift_to(th, field));
                }
                if (f->kind == FieldKind::Extension && name == f->gen_name) {
                    FieldElement g = fe_zero(f);
                    g.coords[1] = fe_one(f->base);
                    return RationalFunction::constant(lift_to(g, field));
                }
                if (f->kind != FieldKind::Extension) break;
                f = f->base;
            }
            die("unknown symbol '" + name + "'");
        }
        die(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

RationalFunction parse_coefficient(const FieldPtr& field, long /*p*/, const std::string& text) {
    Parser parser{field, text};
    RationalFunction v = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.die("trailing input");
    return v;
}

namespace {

/// Parses an expression that must not involve z, returning a field element.
FieldElement parse_element_expr(const FieldPtr& f, const std::string& text) {
    RationalFunction v = parse_coefficient(f, 0, text);
    if (v.num.degree() > 0 || v.den.degree() > 0)
        throw InputError("expected a constant, found a function of z: " + text);
    if (v.is_zero()) return fe_zero(f);
    return fe_div(v.num.c[0], v.den.c[0]);
}

} // namespace

// ---------------------------------------------------------------------------
// field / element JSON
// ---------------------------------------------------------------------------

FieldPtr field_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) throw InputError("field descriptor must have a kind");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "rationals") return Field::rationals();
    if (kind == "fp_function") {
        if (!j.contains("char")) throw InputError("fp_function needs \"char\"");
        long p0 = j.at("char").get<long>();
        std::string var = j.value("var", std::string("theta"));
        return Field::fp_function((unsigned long)p0, var);
    }
    if (kind == "extension") {
        FieldPtr base = j.contains("base") ? field_from_json(j.at("base")) : Field::rationals();
        if (!j.contains("minpoly")) throw InputError("extension needs \"minpoly\"");
        std::vector<FieldElement> mc;
        for (const auto& c : j.at("minpoly")) mc.push_back(fe_from_json(base, c));
        FPoly mp = poly_make(base, mc);
        bool asserted = j.value("assert_irreducible", false);
        std::string gen = j.value("gen", std::string("g"));
        auto [ext, root] = adjoin_root(base, mp, asserted, gen);
        if (field_equal(ext, base)) throw InputError("minimal polynomial of degree 1 is not an extension");
        return ext;
    }
    throw InputError("unknown field kind: " + kind);
}

Json field_to_json(const FieldPtr& f) {
    switch (f->kind) {
    case FieldKind::Rationals: return Json{{"kind", "rationals"}};
    case FieldKind::FpFunction:
        return Json{{"kind", "fp_function"}, {"char", (long)f->char_p}, {"var", f->var_name}};
    case FieldKind::Extension: {
        Json mp = Json::array();
        for (const auto& c : f->minpoly) mp.push_back(fe_to_json(c));
        Json r{{"kind", "extension"}, {"minpoly", mp}, {"gen", f->gen_name}};
        if (f->base->kind != FieldKind::Rationals) r["base"] = field_to_json(f->base);
        return r;
    }
    }
    throw MahlerError("bad field kind");
}

FieldElement fe_from_json(const FieldPtr& f, const Json& j) {
    switch (f->kind) {
    case FieldKind::Rationals: {
        if (j.is_number_integer()) return fe_from_int(f, j.get<long>());
        if (j.is_string()) return parse_element_expr(f, j.get<std::string>());
        throw InputError("rational element must be a string or integer");
    }
    case FieldKind::FpFunction: {
        if (j.is_number_integer()) return fe_from_int(f, j.get<long>());
        if (j.is_string()) return parse_element_expr(f, j.get<std::string>());
        if (j.is_object()) {
            FieldElement n = parse_element_expr(f, j.at("num").get<std::string>());
            FieldElement d = j.contains("den") ? parse_element_expr(f, j.at("den").get<std::string>())
                                               : fe_one(f);
            return fe_div(n, d);
        }
        throw InputError("function-field element must be an object, string or integer");
    }
    case FieldKind::Extension: {
        if (j.is_number_integer()) return fe_from_int(f, j.get<long>());
        if (j.is_string()) return parse_element_expr(f, j.get<std::string>());
        if (j.is_array()) {
            FieldElement e = fe_zero(f);
            size_t i = 0;
            for (const auto& c : j) {
                if ((long)i >= f->ext_degree()) throw InputError("too many extension coordinates");
                e.coords[i++] = fe_from_json(f->base, c);
            }
            return e;
        }
        throw InputError("extension element must be an array, string or integer");
    }
    }
    throw MahlerError("bad field kind");
}

Json fe_to_json(const FieldElement& e) {
    switch (e.field->kind) {
    case FieldKind::Rationals: return rat_to_string(e.rat);
    case FieldKind::FpFunction: {
        Json r;
        r["num"] = fp_poly_to_string(e.fn.num, e.field->var_name);
        r["den"] = fp_poly_to_string(e.fn.den, e.field->var_name);
        return r;
    }
    case FieldKind::Extension: {
        Json arr = Json::array();
        for (const auto& c : e.coords) arr.push_back(fe_to_json(c));
        return arr;
    }
    }
    throw MahlerError("bad field kind");
}

PuiseuxTruncation pt_from_json(const FieldPtr& f, const Json& j) {
    PuiseuxTruncation t = pt_zero(f);
    t.ram = j.value("d", 1);
    if (j.contains("order") && !j.at("order").is_null()) {
        const auto& o = j.at("order");
        t.order = o.is_string() ? rat_from_string(o.get<std::string>()) : Rational(o.get<long>());
    }
    if (j.contains("val")) {
        const auto& v = j.at("val");
        t.vbound = v.is_string() ? rat_from_string(v.get<std::string>()) : Rational(v.get<long>());
    }
    if (j.contains("coeffs"))
        for (const auto& [k, v] : j.at("coeffs").items()) {
            Rational e = rat_from_string(k);
            Rational idx = e * t.ram;
            if (!is_integer(idx)) throw InputError("coefficient exponent off the 1/d grid");
            FieldElement c = fe_from_json(f, v);
            if (!fe_is_zero(c)) t.c[to_long(idx.get_num())] = c;
        }
    return t;
}

Json pt_to_json(const PuiseuxTruncation& t) {
    Json r;
    r["d"] = t.ram;
    if (is_integer(t.vbound))
        r["val"] = to_long(t.vbound.get_num());
    else
        r["val"] = rat_to_string(t.vbound);
    if (t.order) {
        if (is_integer(*t.order))
            r["order"] = to_long(t.order->get_num());
        else
            r["order"] = rat_to_string(*t.order);
    } else {
        r["order"] = nullptr;
    }
    Json coeffs = Json::object();
    for (const auto& [k, v] : t.c) coeffs[rat_to_string(make_rational(k, t.ram))] = fe_to_json(v);
    r["coeffs"] = coeffs;
    return r;
}

Json omega_to_json(const std::vector<Rational>& a, const ExpPolySeq& seq) {
    Json r;
    Json aj = Json::array();
    for (const auto& ai : a) aj.push_back(rat_to_string(ai));
    r["a"] = aj;
    Json terms = Json::array();
    for (const auto& t : seq.terms) {
        Json tj;
        tj["c"] = fe_to_json(t.coeff);
        tj["alpha"] = t.alpha;
        Json lj = Json::array();
        for (const auto& l : t.lambda) lj.push_back(fe_to_json(l));
        tj["lambda"] = lj;
        terms.push_back(tj);
    }
    r["seq"] = terms;
    return r;
}

std::pair<std::vector<Rational>, ExpPolySeq> omega_from_json(const FieldPtr& f, const Json& j) {
    std::vector<Rational> a;
    for (const auto& ai : j.at("a"))
        a.push_back(ai.is_string() ? rat_from_string(ai.get<std::string>())
                                   : Rational(ai.get<long>()));
    ExpPolySeq seq{f, (long)a.size(), {}};
    for (const auto& tj : j.at("seq")) {
        ExpPolyTerm t;
        t.coeff = fe_from_json(f, tj.at("c"));
        for (const auto& al : tj.at("alpha")) t.alpha.push_back(al.get<long>());
        for (const auto& l : tj.at("lambda")) t.lambda.push_back(fe_from_json(f, l));
        seq.terms.push_back(std::move(t));
    }
    return {std::move(a), eps_normalize(std::move(seq))};
}

Json const_elem_to_json(const ConstElem& e) {
    Json arr = Json::array();
    for (const auto& t : e.terms)
        arr.push_back(Json{{"c", fe_to_json(t.c)}, {"k", t.k}, {"coeff", fe_to_json(t.coeff)}});
    return arr;
}

namespace {

// one xi term coeff-in-seq * z^gamma * xi_(seq, a)
Json hterm_to_json(const HTerm& t) {
    Json r = omega_to_json(t.a, t.seq);
    r["gamma"] = rat_to_string(t.gamma);
    return r;
}

Json hahn_to_json(const HahnExpression& h) {
    Json arr = Json::array();
    for (const auto& t : h.terms) arr.push_back(hterm_to_json(t));
    return arr;
}

} // namespace

// ---------------------------------------------------------------------------
// basis result JSON / text
// ---------------------------------------------------------------------------

Json basis_to_json(const BasisResult& res) {
    Json r;
    r["p"] = res.p;
    r["m"] = res.m;
    r["d"] = res.d;
    r["v"] = res.v;
    r["j0"] = res.j0;
    r["order"] = res.n;
    r["field"] = field_to_json(res.field);
    Json k0 = Json::array();
    for (const auto& c : res.K0) k0.push_back(fe_to_json(c));
    r["K0"] = k0;
    Json om = Json::array();
    for (const auto& [a, seq] : res.Omega1) om.push_back(omega_to_json(a, seq));
    r["Omega1"] = om;
    Json sols = Json::array();
    for (const auto& sol : res.solutions) {
        Json terms = Json::array();
        for (const auto& [key, f] : sol.terms) {
            Json t;
            t["c"] = fe_to_json(key.c);
            t["j"] = key.j;
            t["omega"] = omega_to_json(key.a, key.seq);
            t["f"] = pt_to_json(f);
            terms.push_back(t);
        }
        sols.push_back(Json{{"terms", terms}});
    }
    r["solutions"] = sols;
    // provenance: the factors behind the assembled basis (emit-only)
    if (res.H.rows() > 0) {
        Json prov;
        Json hm = Json::array(), em = Json::array(), qm = Json::array(), tm = Json::array();
        for (long i = 0; i < res.H.rows(); ++i) {
            Json hrow = Json::array(), erow = Json::array(), qrow = Json::array(), trow = Json::array();
            for (long j = 0; j < res.H.cols(); ++j) {
                hrow.push_back(hahn_to_json(res.H.at(i, j)));
                erow.push_back(const_elem_to_json(res.eC.at(i, j)));
                qrow.push_back(fe_to_json(res.gaugeQ.at(i, j)));
                trow.push_back(lp_to_string(res.theta_tri.at(i, j)));
            }
            hm.push_back(hrow);
            em.push_back(erow);
            qm.push_back(qrow);
            tm.push_back(trow);
        }
        prov["H"] = hm;
        prov["eC"] = em;
        prov["Q"] = qm;
        prov["theta"] = tm;
        r["provenance"] = prov;
    }
    return r;
}

BasisResult basis_from_json(const Json& j) {
    BasisResult res;
    res.field = field_from_json(j.at("field"));
    res.p = j.at("p").get<long>();
    res.m = j.at("m").get<long>();
    res.d = j.at("d").get<long>();
    res.v = j.at("v").get<long>();
    res.j0 = j.at("j0").get<long>();
    res.n = j.at("order").get<long>();
    for (const auto& c : j.at("K0")) res.K0.push_back(fe_from_json(res.field, c));
    for (const auto& o : j.at("Omega1")) res.Omega1.push_back(omega_from_json(res.field, o));
    for (const auto& sj : j.at("solutions")) {
        SolutionExpression sol;
        sol.field = res.field;
        sol.p = res.p;
        sol.d = res.d;
        for (const auto& tj : sj.at("terms")) {
            SolutionKey key;
            key.c = fe_from_json(res.field, tj.at("c"));
            key.j = tj.at("j").get<long>();
            auto [a, seq] = omega_from_json(res.field, tj.at("omega"));
            key.a = std::move(a);
            key.seq = std::move(seq);
            sol.terms.push_back({std::move(key), pt_from_json(res.field, tj.at("f"))});
        }
        res.solutions.push_back(std::move(sol));
    }
    return res;
}

namespace {

std::string omega_to_text(const std::vector<Rational>& a, const ExpPolySeq& seq) {
    if (a.empty()) return "";
    std::ostringstream os;
    os << "xi{seq=" << eps_to_string(seq) << "; a=(";
    for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << rat_to_string(a[i]);
    os << ")}";
    return os.str();
}

} // namespace

std::string basis_to_text(const BasisResult& res) {
    std::ostringstream os;
    os << "basis of " << res.solutions.size() << " solutions (p=" << res.p << ", d=" << res.d
       << ", v=" << res.v << ", j0=" << res.j0 << ", truncation order " << res.n << ")\n";
    for (size_t i = 0; i < res.solutions.size(); ++i) {
        os << "y_" << (i + 1) << " = ";
        const auto& sol = res.solutions[i];
        if (sol.terms.empty()) os << "0";
        bool first = true;
        for (const auto& [key, f] : sol.terms) {
            if (!first) os << "\n      + ";
            first = false;
            os << "(" << pt_to_string(f) << ")";
            std::string om = omega_to_text(key.a, key.seq);
            if (!om.empty()) os << " * " << om;
            if (!fe_is_one(key.c)) os << " * e_(" << fe_to_string(key.c) << ")";
            if (key.j > 0) os << " * l^[" << key.j << "]";
        }
        os << "\n";
    }
    return os.str();
}

Json equation_to_json(const MahlerEquation& eq) {
    Json r;
    r["p"] = eq.p;
    r["field"] = field_to_json(eq.field);
    Json cs = Json::array();
    for (const auto& c : eq.coeffs) cs.push_back(rf_to_string(c));
    r["coeffs"] = cs;
    return r;
}

std::string equation_to_text(const MahlerEquation& eq) {
    std::ostringstream os;
    bool first = true;
    Integer pk = 1;
    for (size_t k = 0; k < eq.coeffs.size(); ++k, pk *= eq.p) {
        if (eq.coeffs[k].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << rf_to_string(eq.coeffs[k]) << ")*y(z";
        if (pk != 1) os << "^" << pk.get_str();
        os << ")";
    }
    os << " = 0";
    return os.str();
}

Json verify_report_to_json(const VerifyReport& rep) {
    Json r;
    r["ok"] = rep.ok;
    Json per = Json::array();
    for (const auto& s : rep.per_solution) {
        Json sj;
        sj["ok"] = s.ok;
        sj["verified_order"] = rat_to_string(s.verified_order);
        if (!s.first_failure.empty()) sj["first_failure"] = s.first_failure;
        per.push_back(sj);
    }
    r["solutions"] = per;
    return r;
}

// ---------------------------------------------------------------------------
// job parsing and the driver
// ---------------------------------------------------------------------------

JobSpec parse_job(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const std::exception& e) {
        throw InputError(std::string("bad job JSON: ") + e.what());
    }
    try {
        JobSpec spec;
        if (!j.contains("p")) throw InputError("job needs \"p\"");
        spec.p = j.at("p").get<long>();
        if (spec.p < 2) throw InputError("p < 2");
        spec.field = j.contains("field") ? field_from_json(j.at("field")) : Field::rationals();
        if (!j.contains("coeffs")) throw InputError("job needs \"coeffs\"");
        for (const auto& c : j.at("coeffs")) {
            if (c.is_string())
                spec.coeffs.push_back(parse_coefficient(spec.field, spec.p, c.get<std::string>()));
            else if (c.is_number_integer())
                spec.coeffs.push_back(
                    RationalFunction::constant(fe_from_int(spec.field, c.get<long>())));
            else
                throw InputError("coefficients must be strings or integers");
        }
        if (spec.coeffs.size() < 2) throw InputError("equation needs order >= 1");
        if (spec.coeffs.front().is_zero()) throw InputError("a_0 = 0");
        if (spec.coeffs.back().is_zero()) throw InputError("a_m = 0");
        spec.order = j.value("order", 5l);
        if (spec.order < 0) throw InputError("order must be >= 0");
        spec.output = j.value("output", std::string("basis"));
        spec.format = j.value("format", std::string("json"));
        spec.entry_i = j.value("entry_i", 0l);
        spec.entry_j = j.value("entry_j", 1l);
        return spec;
    } catch (const Json::exception& e) {
        throw InputError(std::string("bad job JSON: ") + e.what());
    }
}

RunResult run_and_emit(const JobSpec& spec, const std::string& basis_json) {
    RunResult out;
    try {
        MahlerEquation eq = spec.equation();
        if (spec.output == "basis") {
            BasisResult res = solve_equation(eq, spec.order);
            out.output = spec.format == "text" ? basis_to_text(res) : basis_to_json(res).dump(2);
            out.diagnostics = "solved: m=" + std::to_string(res.m) + " d=" + std::to_string(res.d);
        } else if (spec.output == "entry-equations") {
            MahlerEquation eqd = eq;
            auto slopes = newton_slopes(eq);
            long d = ramification_index(slopes, eq.p);
            if (d != 1) eqd = eq.substitute_power(d);
            MahlerSystem sys = build_companion(eqd);
            WindowContext ctx(sys);
            AdmissiblePair pair = admissible_pair(ctx);
            MahlerEquation ent = entry_equation(pair, sys, spec.entry_i, spec.entry_j);
            out.output = spec.format == "text" ? equation_to_text(ent) : equation_to_json(ent).dump(2);
            out.diagnostics = "entry equation of order " + std::to_string(ent.order());
        } else if (spec.output == "verify") {
            if (basis_json.empty()) throw InputError("verify needs a basis payload");
            Json bj;
            try {
                bj = Json::parse(basis_json);
            } catch (const std::exception& e) {
                throw InputError(std::string("bad basis JSON: ") + e.what());
            }
            BasisResult res = basis_from_json(bj);
            VerifyReport rep = verify_basis(eq, res);
            out.output = verify_report_to_json(rep).dump(2);
            if (rep.ok) {
                Rational vo = rep.per_solution.empty() ? Rational(0)
                                                       : rep.per_solution.front().verified_order;
                for (const auto& s : rep.per_solution) vo = std::min(vo, s.verified_order);
                out.diagnostics = "residual 0 through order " + rat_to_string(vo);
            } else {
                out.diagnostics = "verification FAILED";
                out.exit_code = 1;
            }
        } else {
            throw InputError("unknown output kind: " + spec.output);
        }
    } catch (const UnsupportedFieldError& e) {
        out.exit_code = 2;
        out.diagnostics = std::string("unsupported extension: ") + e.what();
    } catch (const InputError& e) {
        out.exit_code = 1;
        out.diagnostics = std::string("input error: ") + e.what();
    } catch (const MahlerError& e) {
        out.exit_code = 1;
        out.diagnostics = std::string("error: ") + e.what();
    }
    return out;
}

} // namespace mahler
