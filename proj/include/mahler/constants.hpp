#pragma once

#include "mahler/matrix.hpp"

namespace mahler {

/// One basis term coeff * e_c * l^[k] with l^[k] = l(l-1)...(l-k+1)/k!.
struct ConstTerm {
    FieldElement c; // nonzero
    long k = 0;
    FieldElement coeff;
};

/// Element of K[(e_c)_c, l] in the falling-factorial basis; canonical:
/// terms sorted on (c, k), merged, zero coefficients dropped; e_1 = 1.
class ConstElem {
public:
    FieldPtr field;
    std::vector<ConstTerm> terms;

    static ConstElem zero(const FieldPtr& f) { return ConstElem{f, {}}; }
    static ConstElem scalar(const FieldElement& v);
    static ConstElem make(const FieldElement& c, long k, const FieldElement& coeff);

    bool is_zero() const { return terms.empty(); }
};

ConstElem ce_normalize(ConstElem raw);
ConstElem ce_add(const ConstElem& a, const ConstElem& b);
ConstElem ce_scale(const ConstElem& a, const FieldElement& s);
ConstElem ce_neg(const ConstElem& a);

/// Product; rejects l^[a] * l^[b] with a, b >= 1 (not needed and not defined
/// in this basis).
ConstElem ce_mul(const ConstElem& a, const ConstElem& b);

bool ce_equal(const ConstElem& a, const ConstElem& b);
ConstElem ce_lift(const ConstElem& a, const FieldPtr& target);
std::string ce_to_string(const ConstElem& a);

/// phi_p: e_c l^[k] -> c e_c (l^[k] + l^[k-1]).
ConstElem phi_const(const ConstElem& a);

/// Monomial-basis view (characteristic 0 only): map (c, j) -> coefficient of
/// e_c l^j, as a canonical term list with k reused as the monomial degree.
std::vector<ConstTerm> ce_to_monomial(const ConstElem& a);
ConstElem ce_from_monomial(const FieldPtr& f, const std::vector<ConstTerm>& monomial_terms);

struct DunfordResult {
    FieldPtr field; // possibly extended
    FMat C;         // input lifted to `field`
    FMat D, U;      // C = D U = U D, D semisimple, U unipotent
    std::vector<std::pair<FieldElement, long>> spectrum; // eigenvalues with multiplicity
    std::vector<FMat> projectors;                        // spectral projectors of D
};

/// Multiplicative Dunford-Jordan decomposition through spectral projectors
/// (CRT interpolation on the characteristic polynomial).
DunfordResult dunford(const FMat& C);

struct ExpConstantResult {
    FieldPtr field;
    DunfordResult dj;
    Mat<ConstElem> eC;
};

/// Fundamental matrix e_C = e_D e_U with phi_p(e_C) = C e_C.
ExpConstantResult exp_constant(const FMat& C);

using CMat = Mat<ConstElem>;

CMat cmat_mul(const CMat& a, const CMat& b);
CMat cmat_phi(const CMat& a);
CMat cmat_scale_left(const FMat& s, const CMat& a); // s * a with s constant
bool cmat_equal(const CMat& a, const CMat& b);
CMat cmat_lift(const CMat& a, const FieldPtr& target);

} // namespace mahler
