#include "mahler/series.hpp"

#include <algorithm>
#include <sstream>

namespace mahler {

// ---------------------------------------------------------------------------
// LaurentPoly
// ---------------------------------------------------------------------------

LaurentPoly LaurentPoly::constant(const FieldElement& a) { return monomial(a, 0); }

LaurentPoly LaurentPoly::monomial(const FieldElement& a, long e) {
    LaurentPoly r{a.field, {}};
    if (!fe_is_zero(a)) r.c[e] = a;
    return r;
}

long LaurentPoly::val() const {
    if (c.empty()) throw MahlerError("valuation of zero Laurent polynomial");
    return c.begin()->first;
}

long LaurentPoly::deg() const {
    if (c.empty()) throw MahlerError("degree of zero Laurent polynomial");
    return c.rbegin()->first;
}

FieldElement LaurentPoly::coeff(long e) const {
    auto it = c.find(e);
    if (it == c.end()) return fe_zero(field);
    return it->second;
}

LaurentPoly lp_add(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    for (const auto& [e, v] : b.c) {
        auto it = r.c.find(e);
        if (it == r.c.end()) {
            r.c[e] = v;
        } else {
            it->second = fe_add(it->second, v);
            if (fe_is_zero(it->second)) r.c.erase(it);
        }
    }
    return r;
}

LaurentPoly lp_neg(const LaurentPoly& a) {
    LaurentPoly r = a;
    for (auto& [e, v] : r.c) v = fe_neg(v);
    return r;
}

LaurentPoly lp_sub(const LaurentPoly& a, const LaurentPoly& b) { return lp_add(a, lp_neg(b)); }

LaurentPoly lp_mul(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r{a.field, {}};
    for (const auto& [ea, va] : a.c)
        for (const auto& [eb, vb] : b.c) {
            FieldElement prod = fe_mul(va, vb);
            if (fe_is_zero(prod)) continue;
            auto it = r.c.find(ea + eb);
            if (it == r.c.end())
                r.c[ea + eb] = prod;
            else {
                it->second = fe_add(it->second, prod);
                if (fe_is_zero(it->second)) r.c.erase(it);
            }
        }
    return r;
}

LaurentPoly lp_scale(const LaurentPoly& a, const FieldElement& s) {
    if (fe_is_zero(s)) return LaurentPoly::zero(a.field);
    LaurentPoly r = a;
    for (auto& [e, v] : r.c) v = fe_mul(v, s);
    return r;
}

LaurentPoly lp_substitute_power(const LaurentPoly& a, long e) {
    LaurentPoly r{a.field, {}};
    for (const auto& [ea, va] : a.c) r.c[ea * e] = va;
    return r;
}

bool lp_equal(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.c.size() != b.c.size()) return false;
    auto ia = a.c.begin();
    auto ib = b.c.begin();
    for (; ia != a.c.end(); ++ia, ++ib)
        if (ia->first != ib->first || !fe_equal(ia->second, ib->second)) return false;
    return true;
}

LaurentPoly lp_lift(const LaurentPoly& a, const FieldPtr& target) {
    LaurentPoly r{target, {}};
    for (const auto& [e, v] : a.c) r.c[e] = lift_to(v, target);
    return r;
}

std::string lp_to_string(const LaurentPoly& a, const std::string& var) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, v] : a.c) {
        std::string cs = fe_to_string(v);
        bool negated = false;
        if (!first && cs.size() && cs[0] == '-' && cs.find_first_of("+- ", 1) == std::string::npos) {
            negated = true;
            cs = cs.substr(1);
        }
        if (!first) os << (negated ? " - " : " + ");
        first = false;
        bool atom = cs.find_first_of("+- ") == std::string::npos;
        if (e == 0) {
            os << cs;
            continue;
        }
        if (cs != "1") os << (atom ? cs : "(" + cs + ")") << "*";
        os << var;
        if (e != 1) os << "^" << e;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// RationalFunction
// ---------------------------------------------------------------------------

namespace {

RationalFunction rf_canonical(const FieldPtr& f, FPoly n, FPoly d) {
    if (d.is_zero()) throw MahlerError("rational function with zero denominator");
    if (n.is_zero()) return RationalFunction{f, poly_zero(f), poly_const(fe_one(f))};
    FPoly g = poly_gcd(n, d);
    if (g.degree() > 0) {
        n = poly_divmod(n, g).first;
        d = poly_divmod(d, g).first;
    }
    FieldElement lead_inv = fe_inv(d.lead());
    n = poly_scale(n, lead_inv);
    d = poly_scale(d, lead_inv);
    return RationalFunction{f, n, d};
}

long poly_val(const FPoly& p) {
    for (long i = 0; i <= p.degree(); ++i)
        if (!fe_is_zero(p.c[(size_t)i])) return i;
    throw MahlerError("valuation of zero polynomial");
}

} // namespace

RationalFunction RationalFunction::zero(const FieldPtr& f) {
    return RationalFunction{f, poly_zero(f), poly_const(fe_one(f))};
}

RationalFunction RationalFunction::one(const FieldPtr& f) { return constant(fe_one(f)); }

RationalFunction RationalFunction::constant(const FieldElement& a) {
    return RationalFunction{a.field, poly_const(a), poly_const(fe_one(a.field))};
}

RationalFunction RationalFunction::from_poly(const FPoly& p) {
    return RationalFunction{p.field, p, poly_const(fe_one(p.field))};
}

RationalFunction RationalFunction::from_fraction(const FPoly& n, const FPoly& d) {
    return rf_canonical(n.field, n, d);
}

RationalFunction RationalFunction::from_laurent(const LaurentPoly& l) {
    if (l.is_zero()) return zero(l.field);
    long v = std::min(0l, l.val());
    FPoly n{l.field, std::vector<FieldElement>((size_t)(l.deg() - v + 1), fe_zero(l.field))};
    for (const auto& [e, c] : l.c) n.c[(size_t)(e - v)] = c;
    FPoly d{l.field, std::vector<FieldElement>((size_t)(-v + 1), fe_zero(l.field))};
    d.c[(size_t)(-v)] = fe_one(l.field);
    return rf_canonical(l.field, n, d);
}

long RationalFunction::val() const {
    if (is_zero()) throw MahlerError("valuation of zero rational function");
    return poly_val(num) - poly_val(den);
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
    return rf_canonical(field, poly_add(poly_mul(num, o.den), poly_mul(o.num, den)), poly_mul(den, o.den));
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
    return *this + (-o);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
    return rf_canonical(field, poly_mul(num, o.num), poly_mul(den, o.den));
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
    return *this * rf_inv(o);
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction r = *this;
    r.num = poly_scale(r.num, fe_from_int(field, -1));
    return r;
}

bool RationalFunction::operator==(const RationalFunction& o) const {
    return poly_equal(num, o.num) && poly_equal(den, o.den);
}

RationalFunction rf_inv(const RationalFunction& a) {
    if (a.is_zero()) throw MahlerError("inverse of zero rational function");
    return rf_canonical(a.field, a.den, a.num);
}

namespace {
FPoly poly_substitute_power(const FPoly& p, long e) {
    if (p.is_zero()) return p;
    FPoly r{p.field, std::vector<FieldElement>((size_t)(p.degree() * e + 1), fe_zero(p.field))};
    for (long i = 0; i <= p.degree(); ++i) r.c[(size_t)(i * e)] = p.c[(size_t)i];
    return r;
}
} // namespace

RationalFunction rf_substitute_power(const RationalFunction& a, long e) {
    return RationalFunction::from_fraction(poly_substitute_power(a.num, e),
                                           poly_substitute_power(a.den, e));
}

RationalFunction rf_lift(const RationalFunction& a, const FieldPtr& target) {
    return RationalFunction{target, poly_lift(a.num, target), poly_lift(a.den, target)};
}

std::optional<LaurentPoly> rf_to_laurent(const RationalFunction& a) {
    if (a.is_zero()) return LaurentPoly::zero(a.field);
    long nz = 0;
    for (long i = 0; i <= a.den.degree(); ++i)
        if (!fe_is_zero(a.den.c[(size_t)i])) ++nz;
    if (nz != 1) return std::nullopt;
    long shift = poly_val(a.den);
    FieldElement dinv = fe_inv(a.den.c[(size_t)shift]);
    LaurentPoly r{a.field, {}};
    for (long i = 0; i <= a.num.degree(); ++i)
        if (!fe_is_zero(a.num.c[(size_t)i])) r.c[i - shift] = fe_mul(a.num.c[(size_t)i], dinv);
    return r;
}

std::string rf_to_string(const RationalFunction& a, const std::string& var) {
    auto l = rf_to_laurent(a);
    if (l) return lp_to_string(*l, var);
    std::string n = poly_to_string(a.num, var);
    std::string d = poly_to_string(a.den, var);
    bool n_atom = n.find_first_of("+- ") == std::string::npos;
    bool d_atom = d.find_first_of("+- ") == std::string::npos;
    return (n_atom ? n : "(" + n + ")") + "/" + (d_atom ? d : "(" + d + ")");
}

// ---------------------------------------------------------------------------
// PuiseuxTruncation
// ---------------------------------------------------------------------------

namespace {

void pt_insert(PuiseuxTruncation& p, long key, const FieldElement& v) {
    if (fe_is_zero(v)) return;
    auto it = p.c.find(key);
    if (it == p.c.end())
        p.c[key] = v;
    else {
        it->second = fe_add(it->second, v);
        if (fe_is_zero(it->second)) p.c.erase(it);
    }
}

void pt_drop_beyond_order(PuiseuxTruncation& p) {
    if (!p.order) return;
    while (!p.c.empty()) {
        auto it = std::prev(p.c.end());
        if (make_rational(it->first, p.ram) > *p.order)
            p.c.erase(it);
        else
            break;
    }
}

PuiseuxTruncation pt_rebase(const PuiseuxTruncation& a, long new_ram) {
    if (new_ram == a.ram) return a;
    if (new_ram % a.ram != 0) throw MahlerError("ramification rebase must refine the grid");
    long k = new_ram / a.ram;
    PuiseuxTruncation r = a;
    r.ram = new_ram;
    r.c.clear();
    for (const auto& [key, v] : a.c) r.c[key * k] = v;
    r.source = nullptr;
    return r;
}

std::optional<Rational> order_min(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

} // namespace

std::optional<Rational> PuiseuxTruncation::min_exponent() const {
    if (c.empty()) return std::nullopt;
    return make_rational(c.begin()->first, ram);
}

FieldElement PuiseuxTruncation::coeff(const Rational& e) const {
    auto v = coeff_known(e);
    if (!v) throw MahlerError("coefficient beyond guaranteed order");
    return *v;
}

std::optional<FieldElement> PuiseuxTruncation::coeff_known(const Rational& e) const {
    if (order && e > *order) return std::nullopt;
    Rational key = e * ram;
    if (!is_integer(key)) return fe_zero(field);
    auto it = c.find(to_long(key.get_num()));
    if (it == c.end()) return fe_zero(field);
    return it->second;
}

PuiseuxTruncation pt_zero(const FieldPtr& f) {
    PuiseuxTruncation r;
    r.field = f;
    return r;
}

PuiseuxTruncation pt_const(const FieldElement& a) {
    PuiseuxTruncation r = pt_zero(a.field);
    if (!fe_is_zero(a)) r.c[0] = a;
    return r;
}

PuiseuxTruncation pt_from_laurent(const LaurentPoly& a) {
    PuiseuxTruncation r = pt_zero(a.field);
    for (const auto& [e, v] : a.c) r.c[e] = v;
    if (!a.is_zero()) r.vbound = a.val();
    return r;
}

PuiseuxTruncation pt_add(const PuiseuxTruncation& a, const PuiseuxTruncation& b) {
    long ram = lcm_long(a.ram, b.ram);
    PuiseuxTruncation x = pt_rebase(a, ram), y = pt_rebase(b, ram);
    PuiseuxTruncation r = x;
    r.source = nullptr;
    r.order = order_min(x.order, y.order);
    r.vbound = std::min(x.vbound, y.vbound);
    for (const auto& [k, v] : y.c) pt_insert(r, k, v);
    pt_drop_beyond_order(r);
    return r;
}

PuiseuxTruncation pt_neg(const PuiseuxTruncation& a) {
    PuiseuxTruncation r = a;
    for (auto& [k, v] : r.c) v = fe_neg(v);
    return r;
}

PuiseuxTruncation pt_sub(const PuiseuxTruncation& a, const PuiseuxTruncation& b) {
    return pt_add(a, pt_neg(b));
}

PuiseuxTruncation pt_scale(const PuiseuxTruncation& a, const FieldElement& s) {
    PuiseuxTruncation r = a;
    if (fe_is_zero(s)) {
        r.c.clear();
        r.source = nullptr;
        return r;
    }
    for (auto& [k, v] : r.c) v = fe_mul(v, s);
    r.source = nullptr;
    return r;
}

PuiseuxTruncation pt_mul(const PuiseuxTruncation& a, const PuiseuxTruncation& b) {
    long ram = lcm_long(a.ram, b.ram);
    PuiseuxTruncation x = pt_rebase(a, ram), y = pt_rebase(b, ram);
    PuiseuxTruncation r = pt_zero(a.field);
    r.ram = ram;
    r.vbound = x.vbound + y.vbound;
    std::optional<Rational> ord;
    if (x.order) ord = *x.order + y.vbound;
    if (y.order) ord = order_min(ord, *y.order + x.vbound);
    r.order = ord;
    for (const auto& [ka, va] : x.c)
        for (const auto& [kb, vb] : y.c) pt_insert(r, ka + kb, fe_mul(va, vb));
    pt_drop_beyond_order(r);
    return r;
}

PuiseuxTruncation pt_mul_monomial(const PuiseuxTruncation& a, const FieldElement& s, const Rational& gamma) {
    long ram = lcm_long(a.ram, to_long(gamma.get_den()));
    PuiseuxTruncation x = pt_rebase(a, ram);
    long shift = to_long(Rational(gamma * ram).get_num());
    PuiseuxTruncation r = pt_zero(a.field);
    r.ram = ram;
    r.vbound = x.vbound + gamma;
    if (x.order) r.order = *x.order + gamma;
    if (!fe_is_zero(s))
        for (const auto& [k, v] : x.c) {
            FieldElement prod = fe_mul(v, s);
            if (!fe_is_zero(prod)) r.c[k + shift] = prod;
        }
    return r;
}

PuiseuxTruncation pt_mul_laurent(const PuiseuxTruncation& a, const LaurentPoly& l) {
    PuiseuxTruncation r = pt_zero(a.field);
    r.ram = a.ram;
    bool first = true;
    for (const auto& [e, v] : l.c) {
        PuiseuxTruncation term = pt_mul_monomial(a, v, Rational(e));
        r = first ? term : pt_add(r, term);
        first = false;
    }
    return r;
}

PuiseuxTruncation substitute_power(const PuiseuxTruncation& a, long e) {
    PuiseuxTruncation r = a;
    r.c.clear();
    r.source = nullptr;
    for (const auto& [k, v] : a.c) r.c[k * e] = v;
    if (r.order) r.order = *r.order * e;
    r.vbound = a.vbound * e;
    return r;
}

PuiseuxTruncation ramify(const PuiseuxTruncation& a, long d) {
    if (d <= 0) throw MahlerError("ramification index must be positive");
    PuiseuxTruncation r = a;
    r.ram = a.ram * d;
    if (r.order) r.order = *r.order / d;
    r.vbound = a.vbound / d;
    r.source = nullptr;
    return r;
}

PuiseuxTruncation pt_truncate(const PuiseuxTruncation& a, const Rational& order) {
    PuiseuxTruncation r = a;
    r.order = order_min(a.order, order);
    pt_drop_beyond_order(r);
    return r;
}

PuiseuxTruncation pt_extend(const PuiseuxTruncation& a, const Rational& order) {
    if (!a.order || *a.order >= order) return a;
    if (!a.source) throw MahlerError("cannot extend truncation without a lazy source");
    PuiseuxTruncation r = a.source->expand(order);
    r.source = a.source;
    return r;
}

PuiseuxTruncation pt_lift(const PuiseuxTruncation& a, const FieldPtr& target) {
    PuiseuxTruncation r = a;
    r.field = target;
    r.source = nullptr;
    for (auto& [k, v] : r.c) v = lift_to(v, target);
    return r;
}

bool pt_is_zero_up_to_order(const PuiseuxTruncation& a) { return a.c.empty(); }

bool pt_equal_up_to(const PuiseuxTruncation& a, const PuiseuxTruncation& b, const Rational& order) {
    PuiseuxTruncation d = pt_sub(a, b);
    if (d.order && *d.order < order) throw MahlerError("comparison order exceeds guaranteed order");
    for (const auto& [k, v] : d.c)
        if (make_rational(k, d.ram) <= order && !fe_is_zero(v)) return false;
    return true;
}

std::string pt_to_string(const PuiseuxTruncation& a, const std::string& var) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : a.c) {
        std::string cs = fe_to_string(v);
        bool negated = false;
        if (!first && cs.size() && cs[0] == '-' && cs.find_first_of("+- ", 1) == std::string::npos) {
            negated = true;
            cs = cs.substr(1);
        }
        if (!first) os << (negated ? " - " : " + ");
        first = false;
        bool atom = cs.find_first_of("+- ") == std::string::npos;
        Rational e = make_rational(k, a.ram);
        if (e == 0) {
            os << cs;
            continue;
        }
        if (cs != "1") os << (atom ? cs : "(" + cs + ")") << "*";
        os << var;
        if (e != 1) os << "^" << (is_integer(e) ? rat_to_string(e) : "(" + rat_to_string(e) + ")");
    }
    if (first) os << "0";
    if (a.order) {
        Rational next = *a.order + make_rational(1, a.ram);
        os << " + O(" << var << "^" << (is_integer(next) ? rat_to_string(next) : "(" + rat_to_string(next) + ")") << ")";
    }
    return os.str();
}

namespace {

struct RationalSource : LazySeriesSource {
    RationalFunction r;
    explicit RationalSource(RationalFunction rf) : r(std::move(rf)) {}
    PuiseuxTruncation expand(const Rational& order) const override {
        return expand_rational(r, rat_floor_long(order));
    }
};

} // namespace

PuiseuxTruncation expand_rational(const RationalFunction& r, long order) {
    PuiseuxTruncation out = pt_zero(r.field);
    out.order = Rational(order);
    out.source = std::make_shared<RationalSource>(r);
    if (r.is_zero()) {
        out.order = std::nullopt; // exactly zero
        return out;
    }
    long vnum = 0;
    while (fe_is_zero(r.num.c[(size_t)vnum])) ++vnum;
    long vden = 0;
    while (fe_is_zero(r.den.c[(size_t)vden])) ++vden;
    long v = vnum - vden;
    out.vbound = v;
    if (v > order) return out;
    // num = z^vnum * n1, den = z^vden * d1 with d1(0) != 0; invert d1 as a power series
    std::vector<FieldElement> n1, d1;
    for (long i = vnum; i <= r.num.degree(); ++i) n1.push_back(r.num.c[(size_t)i]);
    for (long i = vden; i <= r.den.degree(); ++i) d1.push_back(r.den.c[(size_t)i]);
    long terms = order - v + 1;
    FieldElement d0inv = fe_inv(d1[0]);
    std::vector<FieldElement> s((size_t)terms, fe_zero(r.field));
    for (long n = 0; n < terms; ++n) {
        FieldElement acc = n < (long)n1.size() ? n1[(size_t)n] : fe_zero(r.field);
        for (long k = 1; k <= n && k < (long)d1.size(); ++k)
            acc = fe_sub(acc, fe_mul(d1[(size_t)k], s[(size_t)(n - k)]));
        s[(size_t)n] = fe_mul(acc, d0inv);
    }
    for (long n = 0; n < terms; ++n)
        if (!fe_is_zero(s[(size_t)n])) out.c[v + n] = s[(size_t)n];
    return out;
}

// ---------------------------------------------------------------------------
// rational-function matrices
// ---------------------------------------------------------------------------

RFMat rfmat_zero(const FieldPtr& f, long r, long c) { return RFMat(r, c, RationalFunction::zero(f)); }

RFMat rfmat_identity(const FieldPtr& f, long n) {
    RFMat m = rfmat_zero(f, n, n);
    for (long i = 0; i < n; ++i) m.at(i, i) = RationalFunction::one(f);
    return m;
}

RFMat rfmat_mul(const RFMat& a, const RFMat& b) {
    if (a.cols() != b.rows()) throw MahlerError("matrix dimension mismatch");
    FieldPtr f = a.at(0, 0).field;
    return mat_mul(a, b, RationalFunction::zero(f));
}

RFMat rfmat_inverse(const RFMat& a) {
    if (a.rows() != a.cols()) throw MahlerError("inverse of non-square matrix");
    FieldPtr f = a.at(0, 0).field;
    long n = a.rows();
    RFMat aug = hstack(a, rfmat_identity(f, n), RationalFunction::zero(f));
    long row = 0;
    for (long col = 0; col < n; ++col) {
        long sel = -1;
        for (long i = row; i < n; ++i)
            if (!aug.at(i, col).is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) throw MahlerError("singular matrix over K(z)");
        if (sel != row)
            for (long j = 0; j < 2 * n; ++j) std::swap(aug.at(sel, j), aug.at(row, j));
        RationalFunction inv = rf_inv(aug.at(row, col));
        for (long j = 0; j < 2 * n; ++j) aug.at(row, j) = aug.at(row, j) * inv;
        for (long i = 0; i < n; ++i) {
            if (i == row || aug.at(i, col).is_zero()) continue;
            RationalFunction factor = aug.at(i, col);
            for (long j = 0; j < 2 * n; ++j)
                aug.at(i, j) = aug.at(i, j) - factor * aug.at(row, j);
        }
        ++row;
    }
    RFMat inv = rfmat_zero(f, n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
    return inv;
}

RationalFunction rfmat_det(const RFMat& a) {
    if (a.rows() != a.cols()) throw MahlerError("det of non-square matrix");
    FieldPtr f = a.at(0, 0).field;
    RFMat r = a;
    long n = a.rows();
    RationalFunction d = RationalFunction::one(f);
    for (long col = 0; col < n; ++col) {
        long sel = -1;
        for (long i = col; i < n; ++i)
            if (!r.at(i, col).is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) return RationalFunction::zero(f);
        if (sel != col) {
            for (long j = 0; j < n; ++j) std::swap(r.at(sel, j), r.at(col, j));
            d = -d;
        }
        d = d * r.at(col, col);
        RationalFunction inv = rf_inv(r.at(col, col));
        for (long i = col + 1; i < n; ++i) {
            if (r.at(i, col).is_zero()) continue;
            RationalFunction factor = r.at(i, col) * inv;
            for (long j = col; j < n; ++j) r.at(i, j) = r.at(i, j) - factor * r.at(col, j);
        }
    }
    return d;
}

RFMat rfmat_substitute_power(const RFMat& a, long e) {
    return a.map([&](const RationalFunction& x) { return rf_substitute_power(x, e); });
}

RFMat rfmat_lift(const RFMat& a, const FieldPtr& target) {
    return a.map([&](const RationalFunction& x) { return rf_lift(x, target); });
}

std::optional<long> rfmat_val(const RFMat& a) {
    std::optional<long> v;
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) {
            if (a.at(i, j).is_zero()) continue;
            long e = a.at(i, j).val();
            if (!v || e < *v) v = e;
        }
    return v;
}

std::optional<std::vector<FPoly>> left_kernel_rational(const RFMat& m) {
    FieldPtr f = m.at(0, 0).field;
    // right kernel of the transpose
    RFMat t = m.transpose();
    long rows = t.rows(), cols = t.cols();
    RFMat r = t;
    std::vector<long> pivots;
    long row = 0;
    for (long col = 0; col < cols && row < rows; ++col) {
        long sel = -1;
        for (long i = row; i < rows; ++i)
            if (!r.at(i, col).is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != row)
            for (long j = 0; j < cols; ++j) std::swap(r.at(sel, j), r.at(row, j));
        RationalFunction inv = rf_inv(r.at(row, col));
        for (long j = col; j < cols; ++j) r.at(row, j) = r.at(row, j) * inv;
        for (long i = 0; i < rows; ++i) {
            if (i == row || r.at(i, col).is_zero()) continue;
            RationalFunction factor = r.at(i, col);
            for (long j = col; j < cols; ++j) r.at(i, j) = r.at(i, j) - factor * r.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    long first_free = -1;
    {
        size_t pi = 0;
        for (long c2 = 0; c2 < cols; ++c2) {
            if (pi < pivots.size() && pivots[pi] == c2) {
                ++pi;
                continue;
            }
            first_free = c2;
            break;
        }
    }
    if (first_free < 0) return std::nullopt;
    std::vector<RationalFunction> v((size_t)cols, RationalFunction::zero(f));
    v[(size_t)first_free] = RationalFunction::one(f);
    for (size_t rr = 0; rr < pivots.size(); ++rr)
        v[(size_t)pivots[rr]] = -r.at((long)rr, first_free);
    // clear denominators, remove content, make the first nonzero entry monic
    FPoly den_lcm = poly_const(fe_one(f));
    for (const auto& x : v)
        if (!x.is_zero()) {
            FPoly g = poly_gcd(den_lcm, x.den);
            den_lcm = poly_mul(den_lcm, poly_divmod(x.den, g).first);
        }
    std::vector<FPoly> cleared;
    for (const auto& x : v) {
        FPoly t2 = poly_mul(x.num, poly_divmod(den_lcm, x.den).first);
        cleared.push_back(t2);
    }
    FPoly content = poly_zero(f);
    for (const auto& x : cleared)
        if (!x.is_zero()) content = content.is_zero() ? x : poly_gcd(content, x);
    if (content.degree() > 0)
        for (auto& x : cleared) x = poly_divmod(x, content).first;
    FieldElement lead = fe_one(f);
    for (const auto& x : cleared)
        if (!x.is_zero()) {
            lead = x.lead();
            break;
        }
    FieldElement scale = fe_inv(lead);
    for (auto& x : cleared) x = poly_scale(x, scale);
    return cleared;
}

} // namespace mahler
