#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "mahler/errors.hpp"

namespace mahler {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Integer num(const Rational& q) { return q.get_num(); }
inline Integer den(const Rational& q) { return q.get_den(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Integer rat_floor(const Rational& q) { return floor_div(q.get_num(), q.get_den()); }

inline Integer rat_ceil(const Rational& q) {
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return c;
}

inline long to_long(const Integer& z) {
    if (!z.fits_slong_p()) throw MahlerError("integer overflow converting to long");
    return z.get_si();
}

inline long rat_ceil_long(const Rational& q) { return to_long(rat_ceil(q)); }
inline long rat_floor_long(const Rational& q) { return to_long(rat_floor(q)); }

inline Integer int_pow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational rat_pow(const Rational& base, long e) {
    if (e >= 0) {
        Rational r(int_pow(base.get_num(), (unsigned long)e), int_pow(base.get_den(), (unsigned long)e));
        r.canonicalize();
        return r;
    }
    if (base == 0) throw MahlerError("rational 0^negative");
    Rational r(int_pow(base.get_den(), (unsigned long)(-e)), int_pow(base.get_num(), (unsigned long)(-e)));
    r.canonicalize();
    return r;
}

/// "num" when den == 1, otherwise "num/den".
inline std::string rat_to_string(const Rational& q) {
    if (is_integer(q)) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses "num" or "num/den" with optional leading sign.
inline Rational rat_from_string(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw InputError("bad rational literal: " + s);
    q.canonicalize();
    return q;
}

inline bool divisible(const Integer& a, const Integer& b) {
    return mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()) != 0;
}

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Integer lcm(const Integer& a, const Integer& b) {
    Integer l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

inline long lcm_long(long a, long b) { return to_long(lcm(Integer(a), Integer(b))); }

inline bool is_prime(const Integer& n) { return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0; }

} // namespace mahler
