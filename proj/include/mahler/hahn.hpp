#pragma once

#include "mahler/series.hpp"

namespace mahler {

/// One term coeff * k_1^{alpha_1}...k_s^{alpha_s} * lambda_1^{k_1}...lambda_s^{k_s}
/// of an exponential-polynomial multi-sequence.
struct ExpPolyTerm {
    FieldElement coeff;
    std::vector<long> alpha;
    std::vector<FieldElement> lambda; // entries nonzero
};

/// Multi-linear recurrence sequence in the exponential-polynomial basis;
/// canonical form: terms sorted on (alpha, lambda), merged, no zero
/// coefficients, so equality is decidable.
class ExpPolySeq {
public:
    FieldPtr field;
    long arity = 0;
    std::vector<ExpPolyTerm> terms;

    static ExpPolySeq zero(const FieldPtr& f, long arity);
    static ExpPolySeq constant(const FieldElement& c); // arity 0
    static ExpPolySeq single(const FieldElement& coeff, std::vector<long> alpha,
                             std::vector<FieldElement> lambda);

    bool is_zero() const { return terms.empty(); }
};

ExpPolySeq eps_normalize(ExpPolySeq raw);
ExpPolySeq eps_add(const ExpPolySeq& a, const ExpPolySeq& b);
ExpPolySeq eps_scale(const ExpPolySeq& a, const FieldElement& s);
bool eps_equal(const ExpPolySeq& a, const ExpPolySeq& b);
int eps_cmp(const ExpPolySeq& a, const ExpPolySeq& b);
ExpPolySeq eps_lift(const ExpPolySeq& a, const FieldPtr& target);
std::string eps_to_string(const ExpPolySeq& a);

/// Value u(k) for a concrete index tuple (entries >= 0).
FieldElement eps_value_at(const ExpPolySeq& a, const std::vector<long>& k);

/// Fix index `pos` to the integer v >= 0; arity drops by one.
ExpPolySeq eps_slice(const ExpPolySeq& a, long pos, long v);

/// Reindex k_pos -> k_pos + delta with delta in {-1, +1}.
ExpPolySeq eps_shift(const ExpPolySeq& a, long pos, long delta);

/// v_{k_0,k} = lambda0^{k_0} u_k; arity grows by one in front.
ExpPolySeq eps_prepend_geometric(const ExpPolySeq& a, const FieldElement& lambda0);

/// u^[theta]: closed form of l -> sum_{k_1=1}^{l-1} u_{k_1,...} theta^{l-k_1}
/// (Faulhaber for lambda_1 = theta, geometric-derivative formula otherwise).
ExpPolySeq seq_partial_sum(const ExpPolySeq& u, const FieldElement& theta);

/// A term coeff-folded-in-seq * z^gamma * xi_{(seq, a)}; `a` entries positive,
/// empty tuple means xi = 1 (a plain monomial).
struct HTerm {
    Rational gamma;
    std::vector<Rational> a;
    ExpPolySeq seq;
};

/// Finite sum of HTerms, canonical: sorted on (gamma, a), merged by adding
/// sequences, zero sequences dropped.
class HahnExpression {
public:
    FieldPtr field;
    long p = 2;
    std::vector<HTerm> terms;

    static HahnExpression zero(const FieldPtr& f, long p);
    static HahnExpression monomial(const FieldElement& coeff, const Rational& gamma, long p);
    static HahnExpression xi(const ExpPolySeq& seq, std::vector<Rational> a, long p,
                             const Rational& gamma = 0);

    bool is_zero() const { return terms.empty(); }
};

HahnExpression h_merge(HahnExpression raw); // sort + merge, no rewriting
HahnExpression h_add(const HahnExpression& x, const HahnExpression& y);
HahnExpression h_sub(const HahnExpression& x, const HahnExpression& y);
HahnExpression h_neg(const HahnExpression& x);
HahnExpression h_scale(const HahnExpression& x, const FieldElement& s);
HahnExpression h_mul_monomial(const HahnExpression& x, const FieldElement& s, const Rational& gamma);
HahnExpression h_mul_laurent(const HahnExpression& x, const LaurentPoly& l);
bool h_equal(const HahnExpression& x, const HahnExpression& y);
HahnExpression h_lift(const HahnExpression& x, const FieldPtr& target);
std::string h_to_string(const HahnExpression& x);

/// phi_p applied to the expression: z^gamma -> z^{p gamma} and the slice/shift
/// split of each xi.
HahnExpression xi_phi(const HahnExpression& x);

/// Standard form: every tuple entry with denominator coprime to p and
/// numerator not divisible by p, terms merged. Index-shift rewriting emits
/// boundary terms of lower arity which are processed recursively.
HahnExpression normalize_xi(const HahnExpression& x);

/// z -> z^{1/d}: gamma and all tuple entries divide by d; then standardized.
HahnExpression h_ramify(const HahnExpression& x, long d);

/// Exact coefficient of z^gamma (gamma <= 0) by bounded index enumeration.
FieldElement coefficient_at(const HahnExpression& x, const Rational& gamma);

/// Solves kappa h(z^p) - eta h(z) = rhs for the three supported right-hand
/// shapes (monomial, monomial*xi, pure xi).
HahnExpression solve_basic(const FieldElement& kappa, const FieldElement& eta, const HTerm& rhs,
                           long p);

/// The unitriangular matrix H with phi_p(H) C = Theta H for an upper
/// triangular Theta with constant nonzero diagonal and support in S_p.
Mat<HahnExpression> compute_H(const Mat<LaurentPoly>& theta, long p);

} // namespace mahler
