#pragma once

#include <map>
#include <memory>
#include <optional>

#include "mahler/matrix.hpp"

namespace mahler {

/// Finitely supported map exponent -> coefficient; no stored zeros.
class LaurentPoly {
public:
    FieldPtr field;
    std::map<long, FieldElement> c;

    static LaurentPoly zero(const FieldPtr& f) { return LaurentPoly{f, {}}; }
    static LaurentPoly constant(const FieldElement& a);
    static LaurentPoly monomial(const FieldElement& a, long e);

    bool is_zero() const { return c.empty(); }
    long val() const;
    long deg() const;
    FieldElement coeff(long e) const;
    FieldElement constant_term() const { return coeff(0); }
};

LaurentPoly lp_add(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly lp_sub(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly lp_mul(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly lp_neg(const LaurentPoly& a);
LaurentPoly lp_scale(const LaurentPoly& a, const FieldElement& s);
LaurentPoly lp_substitute_power(const LaurentPoly& a, long e);
bool lp_equal(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly lp_lift(const LaurentPoly& a, const FieldPtr& target);
std::string lp_to_string(const LaurentPoly& a, const std::string& var = "z");

/// num/den with den monic and gcd(num, den) = 1; zero is 0/1.
class RationalFunction {
public:
    FieldPtr field;
    FPoly num, den;

    static RationalFunction zero(const FieldPtr& f);
    static RationalFunction one(const FieldPtr& f);
    static RationalFunction constant(const FieldElement& a);
    static RationalFunction from_poly(const FPoly& p);
    static RationalFunction from_fraction(const FPoly& n, const FPoly& d);
    static RationalFunction from_laurent(const LaurentPoly& l);

    bool is_zero() const { return num.is_zero(); }
    long val() const; // val num - val den; requires nonzero

    RationalFunction operator+(const RationalFunction& o) const;
    RationalFunction operator-(const RationalFunction& o) const;
    RationalFunction operator*(const RationalFunction& o) const;
    RationalFunction operator/(const RationalFunction& o) const;
    RationalFunction operator-() const;
    bool operator==(const RationalFunction& o) const;
    bool operator!=(const RationalFunction& o) const { return !(*this == o); }
};

RationalFunction rf_inv(const RationalFunction& a);
RationalFunction rf_substitute_power(const RationalFunction& a, long e);
RationalFunction rf_lift(const RationalFunction& a, const FieldPtr& target);
std::optional<LaurentPoly> rf_to_laurent(const RationalFunction& a); // only when den is a monomial
std::string rf_to_string(const RationalFunction& a, const std::string& var = "z");

class PuiseuxTruncation;

/// Pure, reentrant generator contract: expand(order) returns the same prefix
/// on every call.
struct LazySeriesSource {
    virtual ~LazySeriesSource() = default;
    virtual PuiseuxTruncation expand(const Rational& order) const = 0;
};

/// Finite Laurent expansion in z^(1/ram): coefficient at exponent n/ram is
/// stored under key n. Coefficients are exact for exponents <= `order`
/// (all orders when `order` is empty) and vanish below `vbound`.
class PuiseuxTruncation {
public:
    FieldPtr field;
    long ram = 1;
    std::optional<Rational> order; // nullopt: exact at all orders
    Rational vbound = 0;
    std::map<long, FieldElement> c;
    std::shared_ptr<const LazySeriesSource> source;

    bool known_zero() const { return c.empty() && !order; }
    std::optional<Rational> min_exponent() const; // smallest stored exponent
    Rational exponent_of(long key) const { return make_rational(key, ram); }
    FieldElement coeff(const Rational& e) const; // throws past the guaranteed order
    std::optional<FieldElement> coeff_known(const Rational& e) const;
};

PuiseuxTruncation pt_zero(const FieldPtr& f);
PuiseuxTruncation pt_const(const FieldElement& a);
PuiseuxTruncation pt_from_laurent(const LaurentPoly& a);
PuiseuxTruncation pt_add(const PuiseuxTruncation& a, const PuiseuxTruncation& b);
PuiseuxTruncation pt_sub(const PuiseuxTruncation& a, const PuiseuxTruncation& b);
PuiseuxTruncation pt_neg(const PuiseuxTruncation& a);
PuiseuxTruncation pt_scale(const PuiseuxTruncation& a, const FieldElement& s);
PuiseuxTruncation pt_mul(const PuiseuxTruncation& a, const PuiseuxTruncation& b);
PuiseuxTruncation pt_mul_monomial(const PuiseuxTruncation& a, const FieldElement& s, const Rational& gamma);
PuiseuxTruncation pt_mul_laurent(const PuiseuxTruncation& a, const LaurentPoly& l);

/// z -> z^e: exponents, order and valuation bound all scale by e.
PuiseuxTruncation substitute_power(const PuiseuxTruncation& a, long e);

/// z -> z^{1/d}: exponents divide by d, ramification multiplies by d.
PuiseuxTruncation ramify(const PuiseuxTruncation& a, long d);

PuiseuxTruncation pt_truncate(const PuiseuxTruncation& a, const Rational& order);
PuiseuxTruncation pt_extend(const PuiseuxTruncation& a, const Rational& order);
PuiseuxTruncation pt_lift(const PuiseuxTruncation& a, const FieldPtr& target);
bool pt_is_zero_up_to_order(const PuiseuxTruncation& a);
bool pt_equal_up_to(const PuiseuxTruncation& a, const PuiseuxTruncation& b, const Rational& order);
std::string pt_to_string(const PuiseuxTruncation& a, const std::string& var = "z");

/// Laurent expansion of a rational function, exact through `order`, with a
/// lazy source for further coefficients.
PuiseuxTruncation expand_rational(const RationalFunction& r, long order);

// --- matrices over rational functions -------------------------------------

using RFMat = Mat<RationalFunction>;

RFMat rfmat_zero(const FieldPtr& f, long r, long c);
RFMat rfmat_identity(const FieldPtr& f, long n);
RFMat rfmat_mul(const RFMat& a, const RFMat& b);
RFMat rfmat_inverse(const RFMat& a);
RationalFunction rfmat_det(const RFMat& a);
RFMat rfmat_substitute_power(const RFMat& a, long e);
RFMat rfmat_lift(const RFMat& a, const FieldPtr& target);
std::optional<long> rfmat_val(const RFMat& a); // min valuation over nonzero entries

/// A nonzero v with v M = 0 (entries cleared to polynomials, content removed,
/// first nonzero entry monic), or nullopt when the rows are independent.
std::optional<std::vector<FPoly>> left_kernel_rational(const RFMat& m);

} // namespace mahler
