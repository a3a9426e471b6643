#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/rational.hpp"

namespace mahler {

enum class FieldKind { Rationals, Extension, FpFunction };

class Field;
using FieldPtr = std::shared_ptr<const Field>;

/// Dense univariate polynomial over F_p, lowest degree first, no trailing zeros.
struct FpPoly {
    unsigned long p = 0;
    std::vector<unsigned long> c;

    bool is_zero() const { return c.empty(); }
    long degree() const { return (long)c.size() - 1; } // -1 for zero
};

/// Reduced ratio of F_p[theta] polynomials; denominator monic, gcd(num, den) = 1.
struct FpRat {
    FpPoly num, den;
};

std::string fp_poly_to_string(const FpPoly& p, const std::string& var);

class FieldElement {
public:
    FieldElement() = default;

    FieldPtr field;
    Rational rat;                     // FieldKind::Rationals payload
    std::vector<FieldElement> coords; // FieldKind::Extension payload, size = extension degree
    FpRat fn;                         // FieldKind::FpFunction payload

    bool valid() const { return field != nullptr; }

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator/(const FieldElement& o) const;
    FieldElement operator-() const;
    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }
};

/// Immutable description of an effective field. Always held through FieldPtr.
class Field {
public:
    FieldKind kind;

    // Extension payload
    FieldPtr base;
    std::vector<FieldElement> minpoly; // monic, coefficients in base, degree >= 2
    std::string gen_name = "g";

    // FpFunction payload
    unsigned long char_p = 0;
    std::string var_name = "theta";

    static FieldPtr rationals();
    static FieldPtr fp_function(unsigned long p, const std::string& var = "theta");

    unsigned long characteristic() const;
    long ext_degree() const { return (long)minpoly.size() - 1; }
    std::string describe() const;
};

bool field_equal(const FieldPtr& a, const FieldPtr& b);

FieldElement fe_zero(const FieldPtr& f);
FieldElement fe_one(const FieldPtr& f);
FieldElement fe_from_int(const FieldPtr& f, long n);
FieldElement fe_from_rational(const FieldPtr& f, const Rational& q);

FieldElement fe_add(const FieldElement& a, const FieldElement& b);
FieldElement fe_sub(const FieldElement& a, const FieldElement& b);
FieldElement fe_mul(const FieldElement& a, const FieldElement& b);
FieldElement fe_div(const FieldElement& a, const FieldElement& b);
FieldElement fe_neg(const FieldElement& a);
FieldElement fe_inv(const FieldElement& a);
FieldElement fe_pow(const FieldElement& a, long e);
bool fe_is_zero(const FieldElement& a);
bool fe_is_one(const FieldElement& a);
bool fe_equal(const FieldElement& a, const FieldElement& b);

/// Canonical total order on elements of one field; used to make every
/// set/map/eigenvalue ordering in the pipeline deterministic.
int fe_cmp(const FieldElement& a, const FieldElement& b);

std::string fe_to_string(const FieldElement& a);

/// Embeds an element into `target`, which must be the element's field or an
/// extension tower built on top of it.
FieldElement lift_to(const FieldElement& x, const FieldPtr& target);

/// True when `ancestor` appears in the base chain of `f` (or equals it).
bool field_extends(const FieldPtr& f, const FieldPtr& ancestor);

/// Polynomial over an arbitrary effective field, lowest degree first.
struct FPoly {
    FieldPtr field;
    std::vector<FieldElement> c; // no trailing zeros; empty = 0

    bool is_zero() const { return c.empty(); }
    long degree() const { return (long)c.size() - 1; }
    FieldElement coeff(long i) const;
    FieldElement lead() const;
};

FPoly poly_make(const FieldPtr& f, std::vector<FieldElement> coeffs);
FPoly poly_zero(const FieldPtr& f);
FPoly poly_const(const FieldElement& a);
FPoly poly_x(const FieldPtr& f); // the monomial x
FPoly poly_add(const FPoly& a, const FPoly& b);
FPoly poly_sub(const FPoly& a, const FPoly& b);
FPoly poly_mul(const FPoly& a, const FPoly& b);
FPoly poly_scale(const FPoly& a, const FieldElement& s);
std::pair<FPoly, FPoly> poly_divmod(const FPoly& a, const FPoly& b);
FPoly poly_gcd(const FPoly& a, const FPoly& b); // monic

struct PolyEgcd {
    FPoly g, s, t; // s*a + t*b = g, g monic
};
PolyEgcd poly_egcd(const FPoly& a, const FPoly& b);
FPoly poly_derivative(const FPoly& a);
FPoly poly_pow(const FPoly& a, long e);
FieldElement poly_eval(const FPoly& a, const FieldElement& x);
FPoly poly_monic(const FPoly& a);
bool poly_equal(const FPoly& a, const FPoly& b);
FPoly poly_lift(const FPoly& a, const FieldPtr& target);
std::string poly_to_string(const FPoly& a, const std::string& var = "x");

/// True when square roots in f are decidable by this library (Q, F_p(theta),
/// and quadratic towers over these).
bool sqrt_decidable(const FieldPtr& f);

/// Exact square root when one exists in the field itself.
std::optional<FieldElement> fe_sqrt(const FieldElement& a);

/// adjoin_root: degree 1 returns (base, root); degree >= 2 returns the
/// extension and its generator. Degree-2 irreducibility is machine-verified;
/// degree >= 3 requires assert_irreducible.
std::pair<FieldPtr, FieldElement> adjoin_root(const FieldPtr& f, const FPoly& minpoly,
                                              bool assert_irreducible = false,
                                              const std::string& gen_name = "g");

struct RootsResult {
    FieldPtr field;                                 // possibly an extension of the input field
    std::vector<std::pair<FieldElement, long>> roots; // (root, multiplicity), canonically ordered
    FPoly cofactor;                                 // unfactored part, lifted to `field`
};

/// Splits off linear factors, extracting rational/base roots and quadratic
/// roots (adjoining one quadratic extension per irreducible quadratic when
/// allow_extend is set). Degree >= 3 irreducible factors stay in `cofactor`.
RootsResult find_roots_partial(const FieldPtr& f, const FPoly& poly, bool allow_extend = true);

/// As find_roots_partial but the polynomial must split completely; otherwise
/// throws UnsupportedFieldError("unsupported factor degree").
RootsResult find_roots(const FieldPtr& f, const FPoly& poly, bool allow_extend = true);

} // namespace mahler
