#include "mahler/field.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace mahler {

// ---------------------------------------------------------------------------
// F_p scalar helpers
// ---------------------------------------------------------------------------

namespace {

unsigned long fp_add(unsigned long a, unsigned long b, unsigned long p) { return (a + b) % p; }
unsigned long fp_sub(unsigned long a, unsigned long b, unsigned long p) { return (a + p - b % p) % p; }
unsigned long fp_mul(unsigned long a, unsigned long b, unsigned long p) { return (a * b) % p; }

unsigned long fp_pow(unsigned long a, unsigned long e, unsigned long p) {
    unsigned long r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = fp_mul(r, a, p);
        a = fp_mul(a, a, p);
        e >>= 1;
    }
    return r;
}

unsigned long fp_inv(unsigned long a, unsigned long p) {
    a %= p;
    if (a == 0) throw MahlerError("division by zero in F_p");
    return fp_pow(a, p - 2, p);
}

std::optional<unsigned long> fp_sqrt(unsigned long a, unsigned long p) {
    a %= p;
    // p is small in this library; brute force keeps this exact and simple.
    for (unsigned long s = 0; s < p; ++s)
        if (fp_mul(s, s, p) == a) return s;
    return std::nullopt;
}

} // namespace

// ---------------------------------------------------------------------------
// FpPoly
// ---------------------------------------------------------------------------

namespace {

void fpp_trim(FpPoly& a) {
    while (!a.c.empty() && a.c.back() == 0) a.c.pop_back();
}

FpPoly fpp_make(unsigned long p, std::vector<unsigned long> c) {
    FpPoly r{p, std::move(c)};
    for (auto& x : r.c) x %= p;
    fpp_trim(r);
    return r;
}

FpPoly fpp_zero(unsigned long p) { return FpPoly{p, {}}; }
FpPoly fpp_const(unsigned long p, unsigned long v) { return fpp_make(p, {v}); }

FpPoly fpp_add(const FpPoly& a, const FpPoly& b) {
    FpPoly r{a.p, {}};
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i) {
        unsigned long x = i < a.c.size() ? a.c[i] : 0;
        unsigned long y = i < b.c.size() ? b.c[i] : 0;
        r.c[i] = fp_add(x, y, a.p);
    }
    fpp_trim(r);
    return r;
}

FpPoly fpp_sub(const FpPoly& a, const FpPoly& b) {
    FpPoly r{a.p, {}};
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i) {
        unsigned long x = i < a.c.size() ? a.c[i] : 0;
        unsigned long y = i < b.c.size() ? b.c[i] : 0;
        r.c[i] = fp_sub(x, y, a.p);
    }
    fpp_trim(r);
    return r;
}

FpPoly fpp_mul(const FpPoly& a, const FpPoly& b) {
    if (a.is_zero() || b.is_zero()) return fpp_zero(a.p);
    FpPoly r{a.p, std::vector<unsigned long>(a.c.size() + b.c.size() - 1, 0)};
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = fp_add(r.c[i + j], fp_mul(a.c[i], b.c[j], a.p), a.p);
    fpp_trim(r);
    return r;
}

FpPoly fpp_scale(const FpPoly& a, unsigned long s) {
    FpPoly r = a;
    for (auto& x : r.c) x = fp_mul(x, s, a.p);
    fpp_trim(r);
    return r;
}

std::pair<FpPoly, FpPoly> fpp_divmod(const FpPoly& a, const FpPoly& b) {
    if (b.is_zero()) throw MahlerError("FpPoly division by zero");
    FpPoly rem = a;
    FpPoly quo{a.p, {}};
    unsigned long lead_inv = fp_inv(b.c.back(), a.p);
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        long shift = rem.degree() - b.degree();
        unsigned long q = fp_mul(rem.c.back(), lead_inv, a.p);
        if ((long)quo.c.size() < shift + 1) quo.c.resize(shift + 1, 0);
        quo.c[shift] = fp_add(quo.c[shift], q, a.p);
        for (long i = 0; i <= b.degree(); ++i)
            rem.c[i + shift] = fp_sub(rem.c[i + shift], fp_mul(q, b.c[i], a.p), a.p);
        fpp_trim(rem);
    }
    fpp_trim(quo);
    return {quo, rem};
}

FpPoly fpp_monic(const FpPoly& a) {
    if (a.is_zero()) return a;
    return fpp_scale(a, fp_inv(a.c.back(), a.p));
}

FpPoly fpp_gcd(FpPoly a, FpPoly b) {
    while (!b.is_zero()) {
        FpPoly r = fpp_divmod(a, b).second;
        a = b;
        b = r;
    }
    return fpp_monic(a);
}

bool fpp_equal(const FpPoly& a, const FpPoly& b) { return a.c == b.c; }

int fpp_cmp(const FpPoly& a, const FpPoly& b) {
    if (a.c.size() != b.c.size()) return a.c.size() < b.c.size() ? -1 : 1;
    for (size_t i = a.c.size(); i-- > 0;)
        if (a.c[i] != b.c[i]) return a.c[i] < b.c[i] ? -1 : 1;
    return 0;
}

std::string fpp_to_string(const FpPoly& a, const std::string& var) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (long i = a.degree(); i >= 0; --i) {
        if (a.c[i] == 0) continue;
        if (!first) os << "+";
        first = false;
        if (i == 0 || a.c[i] != 1) os << a.c[i];
        if (i > 0) {
            if (a.c[i] != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

} // namespace

std::string fp_poly_to_string(const FpPoly& p, const std::string& var) {
    return fpp_to_string(p, var);
}

namespace {

FpRat fprat_canonical(FpPoly num, FpPoly den) {
    if (den.is_zero()) throw MahlerError("division by zero in F_p(theta)");
    if (num.is_zero()) return FpRat{fpp_zero(num.p), fpp_const(num.p, 1)};
    FpPoly g = fpp_gcd(num, den);
    if (g.degree() > 0) {
        num = fpp_divmod(num, g).first;
        den = fpp_divmod(den, g).first;
    }
    unsigned long lead_inv = fp_inv(den.c.back(), den.p);
    num = fpp_scale(num, lead_inv);
    den = fpp_scale(den, lead_inv);
    return FpRat{num, den};
}

} // namespace

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

FieldPtr Field::rationals() {
    static FieldPtr q = [] {
        auto f = std::make_shared<Field>();
        f->kind = FieldKind::Rationals;
        return FieldPtr(f);
    }();
    return q;
}

FieldPtr Field::fp_function(unsigned long p, const std::string& var) {
    if (!is_prime(Integer((long)p))) throw InputError("function-field characteristic must be prime");
    if (p >= (1ul << 31)) throw InputError("characteristic too large");
    auto f = std::make_shared<Field>();
    f->kind = FieldKind::FpFunction;
    f->char_p = p;
    f->var_name = var;
    return f;
}

unsigned long Field::characteristic() const {
    switch (kind) {
    case FieldKind::Rationals: return 0;
    case FieldKind::FpFunction: return char_p;
    case FieldKind::Extension: return base->characteristic();
    }
    return 0;
}

std::string Field::describe() const {
    switch (kind) {
    case FieldKind::Rationals: return "Q";
    case FieldKind::FpFunction: return "F_" + std::to_string(char_p) + "(" + var_name + ")";
    case FieldKind::Extension: {
        FPoly mp{base, minpoly};
        return base->describe() + "[" + gen_name + "]/(" + poly_to_string(mp, gen_name) + ")";
    }
    }
    return "?";
}

bool field_equal(const FieldPtr& a, const FieldPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
    case FieldKind::Rationals: return true;
    case FieldKind::FpFunction: return a->char_p == b->char_p && a->var_name == b->var_name;
    case FieldKind::Extension: {
        if (!field_equal(a->base, b->base)) return false;
        if (a->minpoly.size() != b->minpoly.size()) return false;
        for (size_t i = 0; i < a->minpoly.size(); ++i)
            if (!fe_equal(a->minpoly[i], b->minpoly[i])) return false;
        return true;
    }
    }
    return false;
}

bool field_extends(const FieldPtr& f, const FieldPtr& ancestor) {
    if (field_equal(f, ancestor)) return true;
    if (f->kind == FieldKind::Extension) return field_extends(f->base, ancestor);
    return false;
}

// ---------------------------------------------------------------------------
// FieldElement construction
// ---------------------------------------------------------------------------

FieldElement fe_zero(const FieldPtr& f) {
    FieldElement e;
    e.field = f;
    switch (f->kind) {
    case FieldKind::Rationals: e.rat = 0; break;
    case FieldKind::FpFunction: e.fn = FpRat{fpp_zero(f->char_p), fpp_const(f->char_p, 1)}; break;
    case FieldKind::Extension: e.coords.assign(f->ext_degree(), fe_zero(f->base)); break;
    }
    return e;
}

FieldElement fe_one(const FieldPtr& f) { return fe_from_int(f, 1); }

FieldElement fe_from_int(const FieldPtr& f, long n) {
    FieldElement e = fe_zero(f);
    switch (f->kind) {
    case FieldKind::Rationals: e.rat = n; break;
    case FieldKind::FpFunction: {
        long m = n % (long)f->char_p;
        if (m < 0) m += (long)f->char_p;
        e.fn.num = fpp_const(f->char_p, (unsigned long)m);
        break;
    }
    case FieldKind::Extension: e.coords[0] = fe_from_int(f->base, n); break;
    }
    return e;
}

FieldElement fe_from_rational(const FieldPtr& f, const Rational& q) {
    switch (f->kind) {
    case FieldKind::Rationals: {
        FieldElement e;
        e.field = f;
        e.rat = q;
        return e;
    }
    case FieldKind::FpFunction: {
        if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p())
            throw MahlerError("rational literal too large for F_p");
        FieldElement n = fe_from_int(f, q.get_num().get_si());
        FieldElement d = fe_from_int(f, q.get_den().get_si());
        return fe_div(n, d);
    }
    case FieldKind::Extension: {
        FieldElement e = fe_zero(f);
        e.coords[0] = fe_from_rational(f->base, q);
        return e;
    }
    }
    throw MahlerError("bad field kind");
}

// ---------------------------------------------------------------------------
// FieldElement arithmetic
// ---------------------------------------------------------------------------

namespace {

void check_same_field(const FieldElement& a, const FieldElement& b) {
    if (!field_equal(a.field, b.field)) throw MahlerError("field descriptor mismatch");
}

// coords (length may differ from degree) -> canonical fixed-size vector
std::vector<FieldElement> ext_fix(const FieldPtr& f, std::vector<FieldElement> v) {
    v.resize(f->ext_degree(), fe_zero(f->base));
    return v;
}

// product of coordinate vectors reduced modulo the minimal polynomial
std::vector<FieldElement> ext_mul_mod(const FieldPtr& f, const std::vector<FieldElement>& a,
                                      const std::vector<FieldElement>& b) {
    long d = f->ext_degree();
    std::vector<FieldElement> prod(2 * d - 1, fe_zero(f->base));
    for (long i = 0; i < d; ++i) {
        if (fe_is_zero(a[i])) continue;
        for (long j = 0; j < d; ++j) {
            if (fe_is_zero(b[j])) continue;
            prod[i + j] = fe_add(prod[i + j], fe_mul(a[i], b[j]));
        }
    }
    // reduce: x^d = -(m_0 + m_1 x + ... + m_{d-1} x^{d-1}), minpoly monic
    for (long k = 2 * d - 2; k >= d; --k) {
        if (fe_is_zero(prod[k])) continue;
        FieldElement top = prod[k];
        prod[k] = fe_zero(f->base);
        for (long i = 0; i < d; ++i)
            prod[k - d + i] = fe_sub(prod[k - d + i], fe_mul(top, f->minpoly[i]));
    }
    prod.resize(d, fe_zero(f->base));
    return prod;
}

} // namespace

bool fe_is_zero(const FieldElement& a) {
    switch (a.field->kind) {
    case FieldKind::Rationals: return a.rat == 0;
    case FieldKind::FpFunction: return a.fn.num.is_zero();
    case FieldKind::Extension:
        for (const auto& c : a.coords)
            if (!fe_is_zero(c)) return false;
        return true;
    }
    return false;
}

bool fe_is_one(const FieldElement& a) { return fe_equal(a, fe_one(a.field)); }

bool fe_equal(const FieldElement& a, const FieldElement& b) {
    check_same_field(a, b);
    switch (a.field->kind) {
    case FieldKind::Rationals: return a.rat == b.rat;
    case FieldKind::FpFunction: return fpp_equal(a.fn.num, b.fn.num) && fpp_equal(a.fn.den, b.fn.den);
    case FieldKind::Extension:
        for (size_t i = 0; i < a.coords.size(); ++i)
            if (!fe_equal(a.coords[i], b.coords[i])) return false;
        return true;
    }
    return false;
}

int fe_cmp(const FieldElement& a, const FieldElement& b) {
    check_same_field(a, b);
    switch (a.field->kind) {
    case FieldKind::Rationals: return mpq_cmp(a.rat.get_mpq_t(), b.rat.get_mpq_t());
    case FieldKind::FpFunction: {
        int c = fpp_cmp(a.fn.den, b.fn.den);
        if (c != 0) return c;
        return fpp_cmp(a.fn.num, b.fn.num);
    }
    case FieldKind::Extension:
        for (size_t i = 0; i < a.coords.size(); ++i) {
            int c = fe_cmp(a.coords[i], b.coords[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    return 0;
}

FieldElement fe_add(const FieldElement& a, const FieldElement& b) {
    check_same_field(a, b);
    FieldElement r = a;
    switch (a.field->kind) {
    case FieldKind::Rationals: r.rat = a.rat + b.rat; break;
    case FieldKind::FpFunction: {
        FpPoly n = fpp_add(fpp_mul(a.fn.num, b.fn.den), fpp_mul(b.fn.num, a.fn.den));
        r.fn = fprat_canonical(n, fpp_mul(a.fn.den, b.fn.den));
        break;
    }
    case FieldKind::Extension:
        for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] = fe_add(a.coords[i], b.coords[i]);
        break;
    }
    return r;
}

FieldElement fe_sub(const FieldElement& a, const FieldElement& b) { return fe_add(a, fe_neg(b)); }

FieldElement fe_neg(const FieldElement& a) {
    FieldElement r = a;
    switch (a.field->kind) {
    case FieldKind::Rationals: r.rat = -a.rat; break;
    case FieldKind::FpFunction: r.fn.num = fpp_sub(fpp_zero(a.field->char_p), a.fn.num); break;
    case FieldKind::Extension:
        for (auto& c : r.coords) c = fe_neg(c);
        break;
    }
    return r;
}

FieldElement fe_mul(const FieldElement& a, const FieldElement& b) {
    check_same_field(a, b);
    FieldElement r = a;
    switch (a.field->kind) {
    case FieldKind::Rationals: r.rat = a.rat * b.rat; break;
    case FieldKind::FpFunction:
        r.fn = fprat_canonical(fpp_mul(a.fn.num, b.fn.num), fpp_mul(a.fn.den, b.fn.den));
        break;
    case FieldKind::Extension: r.coords = ext_mul_mod(a.field, a.coords, b.coords); break;
    }
    return r;
}

FieldElement fe_inv(const FieldElement& a) {
    if (fe_is_zero(a)) throw MahlerError("division by zero");
    FieldElement r = a;
    switch (a.field->kind) {
    case FieldKind::Rationals: r.rat = 1 / a.rat; break;
    case FieldKind::FpFunction: r.fn = fprat_canonical(a.fn.den, a.fn.num); break;
    case FieldKind::Extension: {
        // extended Euclid in base[x] against the minimal polynomial
        FPoly m{a.field->base, a.field->minpoly};
        FPoly u = poly_make(a.field->base, a.coords);
        FPoly r0 = m, r1 = u;
        FPoly s0 = poly_zero(a.field->base), s1 = poly_const(fe_one(a.field->base));
        while (!r1.is_zero()) {
            auto [q, rem] = poly_divmod(r0, r1);
            FPoly s2 = poly_sub(s0, poly_mul(q, s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        if (r0.degree() != 0) throw MahlerError("non-invertible element (reducible minimal polynomial?)");
        FPoly inv = poly_scale(s0, fe_inv(r0.c[0]));
        r.coords = ext_fix(a.field, inv.c);
        break;
    }
    }
    return r;
}

FieldElement fe_div(const FieldElement& a, const FieldElement& b) { return fe_mul(a, fe_inv(b)); }

FieldElement fe_pow(const FieldElement& a, long e) {
    if (e < 0) return fe_pow(fe_inv(a), -e);
    FieldElement r = fe_one(a.field);
    FieldElement base = a;
    unsigned long u = (unsigned long)e;
    while (u) {
        if (u & 1) r = fe_mul(r, base);
        base = fe_mul(base, base);
        u >>= 1;
    }
    return r;
}

std::string fe_to_string(const FieldElement& a) {
    switch (a.field->kind) {
    case FieldKind::Rationals: return rat_to_string(a.rat);
    case FieldKind::FpFunction: {
        std::string n = fpp_to_string(a.fn.num, a.field->var_name);
        if (a.fn.den.degree() == 0 && a.fn.den.c[0] == 1) return n;
        bool n_atom = a.fn.num.degree() <= 0 || a.fn.num.c.size() == 1;
        std::string d = fpp_to_string(a.fn.den, a.field->var_name);
        std::string res = n_atom ? n : "(" + n + ")";
        res += "/";
        res += (a.fn.den.degree() <= 0) ? d : "(" + d + ")";
        return res;
    }
    case FieldKind::Extension: {
        std::ostringstream os;
        bool first = true;
        for (size_t i = 0; i < a.coords.size(); ++i) {
            if (fe_is_zero(a.coords[i])) continue;
            if (!first) os << " + ";
            first = false;
            os << fe_to_string(a.coords[i]);
            if (i >= 1) {
                os << "*" << a.field->gen_name;
                if (i >= 2) os << "^" << i;
            }
        }
        if (first) return "0";
        return os.str();
    }
    }
    return "?";
}

FieldElement lift_to(const FieldElement& x, const FieldPtr& target) {
    if (field_equal(x.field, target)) {
        FieldElement r = x;
        r.field = target;
        return r;
    }
    if (target->kind == FieldKind::Extension) {
        FieldElement r = fe_zero(target);
        r.coords[0] = lift_to(x, target->base);
        return r;
    }
    throw MahlerError("cannot lift element into unrelated field");
}

FieldElement FieldElement::operator+(const FieldElement& o) const { return fe_add(*this, o); }
FieldElement FieldElement::operator-(const FieldElement& o) const { return fe_sub(*this, o); }
FieldElement FieldElement::operator*(const FieldElement& o) const { return fe_mul(*this, o); }
FieldElement FieldElement::operator/(const FieldElement& o) const { return fe_div(*this, o); }
FieldElement FieldElement::operator-() const { return fe_neg(*this); }
bool FieldElement::operator==(const FieldElement& o) const { return fe_equal(*this, o); }

// ---------------------------------------------------------------------------
// FPoly
// ---------------------------------------------------------------------------

FieldElement FPoly::coeff(long i) const {
    if (i < 0 || i >= (long)c.size()) return fe_zero(field);
    return c[i];
}

FieldElement FPoly::lead() const {
    if (c.empty()) return fe_zero(field);
    return c.back();
}

static void poly_trim(FPoly& a) {
    while (!a.c.empty() && fe_is_zero(a.c.back())) a.c.pop_back();
}

FPoly poly_make(const FieldPtr& f, std::vector<FieldElement> coeffs) {
    FPoly r{f, std::move(coeffs)};
    poly_trim(r);
    return r;
}

FPoly poly_zero(const FieldPtr& f) { return FPoly{f, {}}; }

FPoly poly_const(const FieldElement& a) {
    FPoly r{a.field, {a}};
    poly_trim(r);
    return r;
}

FPoly poly_x(const FieldPtr& f) { return FPoly{f, {fe_zero(f), fe_one(f)}}; }

FPoly poly_add(const FPoly& a, const FPoly& b) {
    FPoly r{a.field, {}};
    size_t n = std::max(a.c.size(), b.c.size());
    r.c.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        FieldElement x = i < a.c.size() ? a.c[i] : fe_zero(a.field);
        if (i < b.c.size()) x = fe_add(x, b.c[i]);
        r.c.push_back(x);
    }
    poly_trim(r);
    return r;
}

FPoly poly_sub(const FPoly& a, const FPoly& b) { return poly_add(a, poly_scale(b, fe_from_int(a.field, -1))); }

FPoly poly_mul(const FPoly& a, const FPoly& b) {
    if (a.is_zero() || b.is_zero()) return poly_zero(a.field);
    FPoly r{a.field, std::vector<FieldElement>(a.c.size() + b.c.size() - 1, fe_zero(a.field))};
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (fe_is_zero(a.c[i])) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = fe_add(r.c[i + j], fe_mul(a.c[i], b.c[j]));
    }
    poly_trim(r);
    return r;
}

FPoly poly_scale(const FPoly& a, const FieldElement& s) {
    FPoly r = a;
    for (auto& x : r.c) x = fe_mul(x, s);
    poly_trim(r);
    return r;
}

std::pair<FPoly, FPoly> poly_divmod(const FPoly& a, const FPoly& b) {
    if (b.is_zero()) throw MahlerError("polynomial division by zero");
    FPoly rem = a;
    FPoly quo = poly_zero(a.field);
    FieldElement lead_inv = fe_inv(b.c.back());
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        long shift = rem.degree() - b.degree();
        FieldElement q = fe_mul(rem.c.back(), lead_inv);
        if ((long)quo.c.size() < shift + 1) quo.c.resize(shift + 1, fe_zero(a.field));
        quo.c[shift] = fe_add(quo.c[shift], q);
        for (long i = 0; i <= b.degree(); ++i)
            rem.c[i + shift] = fe_sub(rem.c[i + shift], fe_mul(q, b.c[i]));
        poly_trim(rem);
    }
    poly_trim(quo);
    return {quo, rem};
}

FPoly poly_gcd(const FPoly& a, const FPoly& b) {
    FPoly r0 = a, r1 = b;
    while (!r1.is_zero()) {
        FPoly r2 = poly_divmod(r0, r1).second;
        r0 = r1;
        r1 = r2;
    }
    return poly_monic(r0);
}

PolyEgcd poly_egcd(const FPoly& a, const FPoly& b) {
    const FieldPtr& f = a.field;
    FPoly r0 = a, r1 = b;
    FPoly s0 = poly_const(fe_one(f)), s1 = poly_zero(f);
    FPoly t0 = poly_zero(f), t1 = poly_const(fe_one(f));
    while (!r1.is_zero()) {
        auto [q, rem] = poly_divmod(r0, r1);
        FPoly s2 = poly_sub(s0, poly_mul(q, s1));
        FPoly t2 = poly_sub(t0, poly_mul(q, t1));
        r0 = r1; r1 = rem;
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    if (!r0.is_zero()) {
        FieldElement inv = fe_inv(r0.lead());
        r0 = poly_scale(r0, inv);
        s0 = poly_scale(s0, inv);
        t0 = poly_scale(t0, inv);
    }
    return PolyEgcd{r0, s0, t0};
}

FPoly poly_derivative(const FPoly& a) {
    FPoly r{a.field, {}};
    for (long i = 1; i <= a.degree(); ++i) r.c.push_back(fe_mul(a.c[i], fe_from_int(a.field, i)));
    poly_trim(r);
    return r;
}

FPoly poly_pow(const FPoly& a, long e) {
    FPoly r = poly_const(fe_one(a.field));
    FPoly base = a;
    while (e) {
        if (e & 1) r = poly_mul(r, base);
        base = poly_mul(base, base);
        e >>= 1;
    }
    return r;
}

FieldElement poly_eval(const FPoly& a, const FieldElement& x) {
    FieldElement r = fe_zero(a.field);
    for (size_t i = a.c.size(); i-- > 0;) r = fe_add(fe_mul(r, x), a.c[i]);
    return r;
}

FPoly poly_monic(const FPoly& a) {
    if (a.is_zero()) return a;
    return poly_scale(a, fe_inv(a.c.back()));
}

bool poly_equal(const FPoly& a, const FPoly& b) {
    if (a.c.size() != b.c.size()) return false;
    for (size_t i = 0; i < a.c.size(); ++i)
        if (!fe_equal(a.c[i], b.c[i])) return false;
    return true;
}

FPoly poly_lift(const FPoly& a, const FieldPtr& target) {
    FPoly r{target, {}};
    r.c.reserve(a.c.size());
    for (const auto& x : a.c) r.c.push_back(lift_to(x, target));
    return r;
}

std::string poly_to_string(const FPoly& a, const std::string& var) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (long i = 0; i <= a.degree(); ++i) {
        if (fe_is_zero(a.c[i])) continue;
        if (!first) os << " + ";
        first = false;
        std::string cs = fe_to_string(a.c[i]);
        bool atom = cs.find_first_of("+- ") == std::string::npos || (cs[0] == '-' && cs.find_first_of("+- ", 1) == std::string::npos);
        if (i == 0) {
            os << cs;
        } else {
            if (!fe_is_one(a.c[i])) os << (atom ? cs : "(" + cs + ")") << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Square roots
// ---------------------------------------------------------------------------

bool sqrt_decidable(const FieldPtr& f) {
    switch (f->kind) {
    case FieldKind::Rationals:
    case FieldKind::FpFunction: return true;
    case FieldKind::Extension: return f->ext_degree() == 2 && sqrt_decidable(f->base);
    }
    return false;
}

namespace {

std::optional<FpPoly> fpp_sqrt_poly(const FpPoly& a) {
    if (a.is_zero()) return a;
    if (a.degree() % 2 != 0) return std::nullopt;
    unsigned long p = a.p;
    if (p == 2) {
        // (sum c_i x^i)^2 = sum c_i x^{2i} over F_2
        FpPoly g{p, std::vector<unsigned long>(a.degree() / 2 + 1, 0)};
        for (long i = 0; i <= a.degree(); ++i) {
            if (a.c[i] == 0) continue;
            if (i % 2 != 0) return std::nullopt;
            g.c[i / 2] = a.c[i];
        }
        fpp_trim(g);
        if (fpp_equal(fpp_mul(g, g), a)) return g;
        return std::nullopt;
    }
    auto lead_sqrt = fp_sqrt(a.c.back(), p);
    if (!lead_sqrt || *lead_sqrt == 0) return std::nullopt;
    long dg = a.degree() / 2;
    FpPoly g{p, std::vector<unsigned long>(dg + 1, 0)};
    g.c[dg] = *lead_sqrt;
    unsigned long inv2lead = fp_inv(fp_mul(2, g.c[dg], p), p);
    // (g^2)_{k+dg} = 2 g_k g_dg + sum_{k<i<dg} g_i g_{k+dg-i}
    for (long k = dg - 1; k >= 0; --k) {
        unsigned long acc = 0;
        for (long i = k + 1; i <= dg - 1; ++i)
            acc = fp_add(acc, fp_mul(g.c[i], g.c[k + dg - i], p), p);
        unsigned long target = ((size_t)(k + dg) < a.c.size()) ? a.c[k + dg] : 0;
        g.c[k] = fp_mul(fp_sub(target, acc, p), inv2lead, p);
    }
    fpp_trim(g);
    if (fpp_equal(fpp_mul(g, g), a)) return g;
    return std::nullopt;
}

// roots of a*t^2 + b*t + c over f (char != 2), no field extension
std::optional<std::pair<FieldElement, FieldElement>> quadratic_roots_in_field(const FieldElement& a,
                                                                              const FieldElement& b,
                                                                              const FieldElement& c) {
    const FieldPtr& f = a.field;
    if (fe_is_zero(a)) {
        if (fe_is_zero(b)) return std::nullopt;
        FieldElement r = fe_neg(fe_div(c, b));
        return std::make_pair(r, r);
    }
    if (f->characteristic() == 2) throw UnsupportedFieldError("quadratic roots unsupported in characteristic 2");
    FieldElement disc = fe_sub(fe_mul(b, b), fe_mul(fe_mul(fe_from_int(f, 4), a), c));
    auto s = fe_sqrt(disc);
    if (!s) return std::nullopt;
    FieldElement inv2a = fe_inv(fe_mul(fe_from_int(f, 2), a));
    FieldElement r1 = fe_mul(fe_sub(fe_neg(b), *s), inv2a);
    FieldElement r2 = fe_mul(fe_add(fe_neg(b), *s), inv2a);
    if (fe_cmp(r2, r1) < 0) std::swap(r1, r2);
    return std::make_pair(r1, r2);
}

} // namespace

std::optional<FieldElement> fe_sqrt(const FieldElement& a) {
    const FieldPtr& f = a.field;
    switch (f->kind) {
    case FieldKind::Rationals: {
        if (a.rat < 0) return std::nullopt;
        Integer n = a.rat.get_num(), d = a.rat.get_den();
        if (mpz_perfect_square_p(n.get_mpz_t()) == 0 || mpz_perfect_square_p(d.get_mpz_t()) == 0)
            return std::nullopt;
        Integer sn, sd;
        mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
        mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
        FieldElement r = fe_zero(f);
        r.rat = Rational(sn, sd);
        r.rat.canonicalize();
        return r;
    }
    case FieldKind::FpFunction: {
        if (fe_is_zero(a)) return fe_zero(f);
        auto ns = fpp_sqrt_poly(fpp_monic(a.fn.num));
        auto ds = fpp_sqrt_poly(a.fn.den); // canonical form keeps den monic
        if (!ns || !ds) return std::nullopt;
        auto lead = fp_sqrt(a.fn.num.c.back(), f->char_p);
        if (!lead) return std::nullopt;
        FieldElement r = fe_zero(f);
        r.fn = fprat_canonical(fpp_scale(*ns, *lead), *ds);
        if (fe_equal(fe_mul(r, r), a)) return r;
        return std::nullopt;
    }
    case FieldKind::Extension: {
        if (f->ext_degree() != 2) return std::nullopt;
        if (f->characteristic() == 2) throw UnsupportedFieldError("sqrt unsupported in characteristic-2 extension");
        // minpoly x^2 + e1 x + e0, g^2 = -e0 - e1 g; solve (u + v g)^2 = a
        const FieldPtr& B = f->base;
        FieldElement e0 = f->minpoly[0], e1 = f->minpoly[1];
        FieldElement d0 = a.coords[0], d1 = a.coords[1];
        // v = 0 branch
        if (fe_is_zero(d1)) {
            auto u = fe_sqrt(d0);
            if (u) {
                FieldElement r = fe_zero(f);
                r.coords[0] = *u;
                return r;
            }
        }
        // v != 0: (u+vg)^2 = u^2 - v^2 e0 + (2uv - v^2 e1) g
        // 2uv - v^2 e1 = d1  =>  u = (d1 + v^2 e1) / (2v)
        // substitute into u^2 - v^2 e0 = d0 with t := v^2:
        // (e1^2 - 4 e0) t^2 + (2 d1 e1 - 4 d0) t + d1^2 = 0
        FieldElement A = fe_sub(fe_mul(e1, e1), fe_mul(fe_from_int(B, 4), e0));
        FieldElement Bc = fe_sub(fe_mul(fe_mul(fe_from_int(B, 2), d1), e1), fe_mul(fe_from_int(B, 4), d0));
        FieldElement Cc = fe_mul(d1, d1);
        auto ts = quadratic_roots_in_field(A, Bc, Cc);
        if (ts) {
            for (const FieldElement& t : {ts->first, ts->second}) {
                auto v = fe_sqrt(t);
                if (!v || fe_is_zero(*v)) continue;
                FieldElement u = fe_div(fe_add(d1, fe_mul(t, e1)), fe_mul(fe_from_int(B, 2), *v));
                FieldElement r = fe_zero(f);
                r.coords[0] = u;
                r.coords[1] = *v;
                if (fe_equal(fe_mul(r, r), a)) return r;
            }
        }
        return std::nullopt;
    }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// adjoin_root / find_roots
// ---------------------------------------------------------------------------

std::pair<FieldPtr, FieldElement> adjoin_root(const FieldPtr& f, const FPoly& minpoly,
                                              bool assert_irreducible, const std::string& gen_name) {
    FPoly m = minpoly;
    if (m.is_zero() || m.degree() < 1) throw InputError("minimal polynomial must have degree >= 1");
    if (!fe_is_one(m.lead())) throw InputError("minimal polynomial must be monic");
    if (m.degree() == 1) return {f, fe_neg(m.c[0])};
    if (m.degree() == 2) {
        if (!sqrt_decidable(f))
            throw UnsupportedFieldError("unverified irreducibility: cannot test squares in this field");
        if (f->characteristic() == 2) {
            // pure quadratics x^2 - c are decidable through fe_sqrt
            if (!fe_is_zero(m.c[1]))
                throw UnsupportedFieldError("unverified irreducibility in characteristic 2");
            if (fe_sqrt(fe_neg(m.c[0]))) throw InputError("reducible minimal polynomial");
        } else {
            auto rr = quadratic_roots_in_field(fe_one(f), m.c[1], m.c[0]);
            if (rr) throw InputError("reducible minimal polynomial");
        }
    } else if (!assert_irreducible) {
        throw UnsupportedFieldError("unverified irreducibility: degree >= 3 requires caller assertion");
    }
    auto ext = std::make_shared<Field>();
    ext->kind = FieldKind::Extension;
    ext->base = f;
    ext->minpoly = m.c;
    ext->gen_name = gen_name;
    FieldPtr extp = ext;
    FieldElement g = fe_zero(extp);
    g.coords[1] = fe_one(f);
    return {extp, g};
}

namespace {

// small-integer divisor enumeration for the rational root theorem
std::optional<std::vector<Integer>> bounded_divisors(Integer n, size_t max_count = 4096) {
    n = abs(n);
    if (n == 0) return std::nullopt;
    std::vector<Integer> divs;
    // factor by trial division; abort on large leftover cofactors
    std::vector<std::pair<Integer, unsigned>> fac;
    for (Integer d = 2; d * d <= n && d < 1000000; ++d) {
        if (!divisible(n, d)) continue;
        unsigned e = 0;
        while (divisible(n, d)) {
            n /= d;
            ++e;
        }
        fac.push_back({d, e});
    }
    if (n > 1) {
        if (n >= 1000000 && !is_prime(n)) return std::nullopt;
        fac.push_back({n, 1});
    }
    divs.push_back(1);
    for (auto& [pr, e] : fac) {
        size_t old = divs.size();
        Integer pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= pr;
            for (size_t i = 0; i < old; ++i) {
                divs.push_back(divs[i] * pk);
                if (divs.size() > max_count) return std::nullopt;
            }
        }
    }
    return divs;
}

// one rational root of a polynomial over Q, if any
std::optional<FieldElement> rational_root(const FPoly& f) {
    const FieldPtr& F = f.field;
    if (fe_is_zero(f.c[0])) return fe_zero(F);
    // clear denominators to integer coefficients
    Integer den_lcm = 1;
    for (const auto& c : f.c) den_lcm = lcm(den_lcm, c.rat.get_den());
    std::vector<Integer> ic;
    for (const auto& c : f.c) {
        Rational t = c.rat * Rational(den_lcm);
        ic.push_back(t.get_num());
    }
    auto d0 = bounded_divisors(ic.front());
    auto dl = bounded_divisors(ic.back());
    if (!d0 || !dl) return std::nullopt;
    for (const Integer& a : *d0)
        for (const Integer& b : *dl) {
            for (int sign = 1; sign >= -1; sign -= 2) {
                Rational cand(sign * a, b);
                cand.canonicalize();
                FieldElement x = fe_from_rational(F, cand);
                if (fe_is_zero(poly_eval(f, x))) return x;
            }
        }
    return std::nullopt;
}

// one root lying in F_p inside F_p(theta), if any
std::optional<FieldElement> fp_constant_root(const FPoly& f) {
    const FieldPtr& F = f.field;
    for (unsigned long v = 0; v < F->char_p; ++v) {
        FieldElement x = fe_from_int(F, (long)v);
        if (fe_is_zero(poly_eval(f, x))) return x;
    }
    // candidates c*theta + d for tiny cases keep Carlitz-style polynomials splittable
    FieldElement theta = fe_zero(F);
    theta.fn.num = FpPoly{F->char_p, {0, 1}};
    theta.fn.den = FpPoly{F->char_p, {1}};
    for (unsigned long cc = 1; cc < F->char_p; ++cc)
        for (unsigned long dd = 0; dd < F->char_p; ++dd) {
            FieldElement x = fe_add(fe_mul(fe_from_int(F, (long)cc), theta), fe_from_int(F, (long)dd));
            if (fe_is_zero(poly_eval(f, x))) return x;
        }
    return std::nullopt;
}

std::optional<FieldElement> find_one_root_in_field(const FPoly& f) {
    if (f.degree() == 1) return fe_neg(fe_div(f.c[0], f.c[1]));
    switch (f.field->kind) {
    case FieldKind::Rationals: {
        auto r = rational_root(f);
        if (r) return r;
        break;
    }
    case FieldKind::FpFunction: {
        auto r = fp_constant_root(f);
        if (r) return r;
        break;
    }
    case FieldKind::Extension: break;
    }
    if (f.degree() == 2 && sqrt_decidable(f.field) && f.field->characteristic() != 2) {
        auto rr = quadratic_roots_in_field(f.c[2], f.c[1], f.c[0]);
        if (rr) return rr->first;
    }
    return std::nullopt;
}

} // namespace

RootsResult find_roots_partial(const FieldPtr& f, const FPoly& poly, bool allow_extend) {
    if (poly.is_zero()) throw InputError("find_roots: zero polynomial");
    FieldPtr cur = f;
    FPoly rem = poly_monic(poly);
    std::vector<std::pair<FieldElement, long>> roots;
    FPoly stuck = poly_const(fe_one(cur));

    while (rem.degree() >= 1) {
        auto root = find_one_root_in_field(rem);
        if (!root && rem.degree() == 2 && allow_extend && sqrt_decidable(cur) &&
            cur->characteristic() != 2) {
            // irreducible quadratic: adjoin one of its roots
            auto [ext, gen] = adjoin_root(cur, rem, false);
            cur = ext;
            for (auto& [r, m] : roots) r = lift_to(r, cur);
            rem = poly_lift(rem, cur);
            stuck = poly_lift(stuck, cur);
            root = gen;
        }
        if (!root) {
            // peel off any factor we cannot split and keep scanning the rest
            stuck = poly_mul(stuck, rem);
            break;
        }
        long mult = 0;
        FPoly lin = poly_make(cur, {fe_neg(*root), fe_one(cur)});
        while (true) {
            auto [q, r] = poly_divmod(rem, lin);
            if (!r.is_zero()) break;
            rem = q;
            ++mult;
        }
        roots.push_back({*root, mult});
    }

    std::sort(roots.begin(), roots.end(),
              [](const auto& a, const auto& b) { return fe_cmp(a.first, b.first) < 0; });
    return RootsResult{cur, std::move(roots), stuck};
}

RootsResult find_roots(const FieldPtr& f, const FPoly& poly, bool allow_extend) {
    RootsResult r = find_roots_partial(f, poly, allow_extend);
    if (r.cofactor.degree() > 0) throw UnsupportedFieldError("unsupported factor degree");
    return r;
}

} // namespace mahler
