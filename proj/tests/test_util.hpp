#pragma once

#include <random>

#include "mahler/jobspec.hpp"

namespace mahler::test {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(0x5eed5eedULL);
    return gen;
}

inline long rand_int(long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    return d(rng());
}

inline FieldElement parse_element_theta(const FieldPtr& f) {
    FieldElement th = fe_zero(f);
    th.fn.num = FpPoly{f->char_p, {0, 1}};
    th.fn.den = FpPoly{f->char_p, {1}};
    return th;
}

inline FieldElement rand_element(const FieldPtr& f) {
    switch (f->kind) {
    case FieldKind::Rationals: {
        long n = rand_int(-9, 9);
        long d = rand_int(1, 7);
        return fe_from_rational(f, make_rational(n, d));
    }
    case FieldKind::FpFunction: {
        FieldElement th = parse_element_theta(f);
        FieldElement acc = fe_zero(f);
        for (long i = 0; i <= rand_int(0, 2); ++i)
            acc = fe_add(acc, fe_mul(fe_from_int(f, rand_int(0, (long)f->char_p - 1)), fe_pow(th, i)));
        long dq = rand_int(0, 1);
        if (dq) {
            FieldElement den = fe_add(th, fe_from_int(f, rand_int(1, (long)f->char_p - 1)));
            acc = fe_div(acc, den);
        }
        return acc;
    }
    case FieldKind::Extension: {
        FieldElement e = fe_zero(f);
        for (long i = 0; i < f->ext_degree(); ++i) e.coords[(size_t)i] = rand_element(f->base);
        return e;
    }
    }
    return fe_zero(f);
}

inline FieldElement rand_nonzero(const FieldPtr& f) {
    for (int i = 0; i < 100; ++i) {
        FieldElement e = rand_element(f);
        if (!fe_is_zero(e)) return e;
    }
    return fe_one(f);
}

inline RationalFunction parse_rf(const FieldPtr& f, const std::string& s) {
    return parse_coefficient(f, 2, s);
}

inline MahlerEquation rs_equation() {
    FieldPtr q = Field::rationals();
    return MahlerEquation::make(2, q, {parse_rf(q, "1"), parse_rf(q, "z-1"), parse_rf(q, "-2*z")});
}

inline MahlerEquation carlitz_equation(long p0 = 3) {
    FieldPtr f = Field::fp_function((unsigned long)p0, "theta");
    std::string zp = "z^" + std::to_string(p0);
    std::string zp2 = "z^" + std::to_string(p0 * p0);
    std::string a0 = "(" + zp + "-theta)*(" + zp2 + "-theta)";
    std::string a1 = "-(" + zp + "-theta-1)*(" + zp2 + "-theta)";
    std::string a2 = "-(" + zp + "-theta)";
    return MahlerEquation::make(p0, f, {parse_rf(f, a0), parse_rf(f, a1), parse_rf(f, a2)});
}

inline PuiseuxTruncation parse_series(const FieldPtr& f, const std::string& s, long order) {
    return pt_truncate(expand_rational(parse_rf(f, s), order + 1), Rational(order));
}

} // namespace mahler::test
