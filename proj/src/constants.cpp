#include "mahler/constants.hpp"

#include <algorithm>
#include <sstream>

namespace mahler {

namespace {

int ct_key_cmp(const ConstTerm& x, const ConstTerm& y) {
    int c = fe_cmp(x.c, y.c);
    if (c != 0) return c;
    if (x.k != y.k) return x.k < y.k ? -1 : 1;
    return 0;
}

} // namespace

ConstElem ConstElem::scalar(const FieldElement& v) {
    return make(fe_one(v.field), 0, v);
}

ConstElem ConstElem::make(const FieldElement& c, long k, const FieldElement& coeff) {
    if (fe_is_zero(c)) throw MahlerError("e_c requires c != 0");
    ConstElem r{c.field, {}};
    if (!fe_is_zero(coeff)) r.terms.push_back(ConstTerm{c, k, coeff});
    return r;
}

ConstElem ce_normalize(ConstElem raw) {
    std::sort(raw.terms.begin(), raw.terms.end(),
              [](const ConstTerm& x, const ConstTerm& y) { return ct_key_cmp(x, y) < 0; });
    std::vector<ConstTerm> merged;
    for (auto& t : raw.terms) {
        if (!merged.empty() && ct_key_cmp(merged.back(), t) == 0)
            merged.back().coeff = fe_add(merged.back().coeff, t.coeff);
        else
            merged.push_back(std::move(t));
    }
    raw.terms.clear();
    for (auto& t : merged)
        if (!fe_is_zero(t.coeff)) raw.terms.push_back(std::move(t));
    return raw;
}

ConstElem ce_add(const ConstElem& a, const ConstElem& b) {
    ConstElem r = a;
    for (const auto& t : b.terms) r.terms.push_back(t);
    return ce_normalize(std::move(r));
}

ConstElem ce_scale(const ConstElem& a, const FieldElement& s) {
    if (fe_is_zero(s)) return ConstElem::zero(a.field);
    ConstElem r = a;
    for (auto& t : r.terms) t.coeff = fe_mul(t.coeff, s);
    return r;
}

ConstElem ce_neg(const ConstElem& a) { return ce_scale(a, fe_from_int(a.field, -1)); }

ConstElem ce_mul(const ConstElem& a, const ConstElem& b) {
    ConstElem r = ConstElem::zero(a.field);
    for (const auto& x : a.terms)
        for (const auto& y : b.terms) {
            if (x.k > 0 && y.k > 0)
                throw MahlerError("products l^[a] * l^[b] are rejected in this basis");
            ConstTerm t;
            t.c = fe_mul(x.c, y.c);
            t.k = x.k + y.k;
            t.coeff = fe_mul(x.coeff, y.coeff);
            r.terms.push_back(std::move(t));
        }
    return ce_normalize(std::move(r));
}

bool ce_equal(const ConstElem& a, const ConstElem& b) {
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        if (ct_key_cmp(a.terms[i], b.terms[i]) != 0) return false;
        if (!fe_equal(a.terms[i].coeff, b.terms[i].coeff)) return false;
    }
    return true;
}

ConstElem ce_lift(const ConstElem& a, const FieldPtr& target) {
    ConstElem r{target, {}};
    for (const auto& t : a.terms)
        r.terms.push_back(ConstTerm{lift_to(t.c, target), t.k, lift_to(t.coeff, target)});
    return ce_normalize(std::move(r));
}

std::string ce_to_string(const ConstElem& a) {
    if (a.terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : a.terms) {
        if (!first) os << " + ";
        first = false;
        std::string cs = fe_to_string(t.coeff);
        bool atom = cs.find_first_of("+- ") == std::string::npos;
        bool is_unit = fe_is_one(t.c) && t.k == 0;
        if (cs == "1" && !is_unit) {
            // skip the unit coefficient
        } else {
            os << (atom ? cs : "(" + cs + ")");
            if (!is_unit) os << "*";
        }
        if (!fe_is_one(t.c)) {
            std::string c = fe_to_string(t.c);
            bool catom = c.find_first_of("+- /") == std::string::npos;
            os << "e_" << (catom ? c : "(" + c + ")");
            if (t.k > 0) os << "*";
        }
        if (t.k > 0) os << "l^[" << t.k << "]";
    }
    return os.str();
}

ConstElem phi_const(const ConstElem& a) {
    ConstElem r{a.field, {}};
    for (const auto& t : a.terms) {
        FieldElement coeff = fe_mul(t.coeff, t.c);
        r.terms.push_back(ConstTerm{t.c, t.k, coeff});
        if (t.k >= 1) r.terms.push_back(ConstTerm{t.c, t.k - 1, coeff});
    }
    return ce_normalize(std::move(r));
}

// ---------------------------------------------------------------------------
// falling factorial <-> monomial basis (characteristic 0)
// ---------------------------------------------------------------------------

namespace {

// coefficients of l^[k] as a polynomial in l
std::vector<Rational> falling_to_monomial(long k) {
    std::vector<Rational> poly{1};
    for (long t = 0; t < k; ++t) {
        // multiply by (l - t)
        std::vector<Rational> next(poly.size() + 1, Rational(0));
        for (size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += poly[i];
            next[i] -= poly[i] * t;
        }
        poly = std::move(next);
    }
    Integer fact = 1;
    for (long t = 2; t <= k; ++t) fact *= t;
    for (auto& c : poly) c /= Rational(fact);
    return poly;
}

} // namespace

std::vector<ConstTerm> ce_to_monomial(const ConstElem& a) {
    if (a.field->characteristic() != 0)
        throw UnsupportedFieldError("monomial basis conversion requires characteristic 0");
    ConstElem acc{a.field, {}};
    for (const auto& t : a.terms) {
        auto poly = falling_to_monomial(t.k);
        for (size_t j = 0; j < poly.size(); ++j) {
            if (poly[j] == 0) continue;
            FieldElement cf = fe_mul(t.coeff, fe_from_rational(a.field, poly[j]));
            acc.terms.push_back(ConstTerm{t.c, (long)j, cf});
        }
    }
    return ce_normalize(std::move(acc)).terms;
}

ConstElem ce_from_monomial(const FieldPtr& f, const std::vector<ConstTerm>& monomial_terms) {
    if (f->characteristic() != 0)
        throw UnsupportedFieldError("monomial basis conversion requires characteristic 0");
    // l^j = sum_k S2(j, k) k! l^[k]
    long jmax = 0;
    for (const auto& t : monomial_terms) jmax = std::max(jmax, t.k);
    std::vector<std::vector<Integer>> s2((size_t)jmax + 1, std::vector<Integer>((size_t)jmax + 1, 0));
    s2[0][0] = 1;
    for (long j = 1; j <= jmax; ++j)
        for (long k = 1; k <= j; ++k) s2[(size_t)j][(size_t)k] = s2[(size_t)(j - 1)][(size_t)(k - 1)] + Integer(k) * s2[(size_t)(j - 1)][(size_t)k];
    ConstElem acc{f, {}};
    for (const auto& t : monomial_terms) {
        Integer fact = 1;
        for (long k = 0; k <= t.k; ++k) {
            if (k >= 2) fact *= k;
            if (s2[(size_t)t.k][(size_t)k] == 0) continue;
            FieldElement cf =
                fe_mul(t.coeff, fe_from_rational(f, Rational(s2[(size_t)t.k][(size_t)k] * fact)));
            acc.terms.push_back(ConstTerm{t.c, k, cf});
        }
    }
    return ce_normalize(std::move(acc));
}

// ---------------------------------------------------------------------------
// Dunford-Jordan and e_C
// ---------------------------------------------------------------------------

DunfordResult dunford(const FMat& C) {
    const FieldPtr& f0 = C.at(0, 0).field;
    long n = C.rows();
    if (fe_is_zero(det(C))) throw MahlerError("dunford requires an invertible matrix");
    FPoly chi = charpoly(C);
    RootsResult rr = find_roots(f0, chi);
    DunfordResult res;
    res.field = rr.field;
    res.C = fmat_lift(C, res.field);
    res.spectrum = rr.roots;

    FPoly chi_l = poly_lift(chi, res.field);
    std::vector<FPoly> factors;
    for (const auto& [lam, mult] : res.spectrum) {
        FPoly lin = poly_make(res.field, {fe_neg(lam), fe_one(res.field)});
        factors.push_back(poly_pow(lin, mult));
    }
    // spectral projectors: pi_i = (R_i Q_i)(C) with Q_i = chi/(x-lam_i)^{m_i},
    // R_i = Q_i^{-1} mod (x-lam_i)^{m_i}
    auto eval_poly_at_matrix = [&](const FPoly& p, const FMat& M) {
        FMat acc = fmat_zero(res.field, n, n);
        for (long i = p.degree(); i >= 0; --i) {
            acc = fmat_mul(acc, M);
            if (!fe_is_zero(p.c[(size_t)i]))
                acc = mat_add(acc, fmat_scale(fmat_identity(res.field, n), p.c[(size_t)i]));
        }
        return acc;
    };
    FMat D = fmat_zero(res.field, n, n);
    for (size_t i = 0; i < res.spectrum.size(); ++i) {
        FPoly Qi = poly_divmod(chi_l, factors[i]).first;
        PolyEgcd e = poly_egcd(Qi, factors[i]);
        if (e.g.degree() != 0) throw MahlerError("projector interpolation failed");
        FPoly Ri = e.s; // s*Qi = 1 mod (x-lam)^m (after monic normalization g = 1)
        FPoly proj_poly = poly_divmod(poly_mul(Ri, Qi), chi_l).second;
        FMat pi = eval_poly_at_matrix(proj_poly, res.C);
        res.projectors.push_back(pi);
        D = mat_add(D, fmat_scale(pi, res.spectrum[i].first));
    }
    res.D = D;
    res.U = fmat_mul(inverse(D), res.C);

    // structural checks: commuting factors, semisimple D, unipotent U
    if (!fmat_equal(fmat_mul(res.D, res.U), res.C) || !fmat_equal(fmat_mul(res.U, res.D), res.C))
        throw MahlerError("dunford factors do not commute to C");
    FMat minD = fmat_identity(res.field, n);
    for (const auto& [lam, mult] : res.spectrum) {
        FMat shifted = mat_add(res.D, fmat_scale(fmat_identity(res.field, n), fe_neg(lam)));
        minD = fmat_mul(minD, shifted);
    }
    if (!fmat_is_zero(minD)) throw MahlerError("D is not semisimple");
    FMat nil = mat_add(res.U, fmat_scale(fmat_identity(res.field, n), fe_from_int(res.field, -1)));
    FMat pow = fmat_identity(res.field, n);
    for (long i = 0; i < n; ++i) pow = fmat_mul(pow, nil);
    if (!fmat_is_zero(pow)) throw MahlerError("U is not unipotent");
    return res;
}

ExpConstantResult exp_constant(const FMat& C) {
    DunfordResult dj = dunford(C);
    long n = C.rows();
    const FieldPtr& f = dj.field;
    ExpConstantResult out;
    out.dj = dj;
    out.field = f;

    CMat eD(n, n, ConstElem::zero(f));
    for (size_t i = 0; i < dj.spectrum.size(); ++i)
        for (long r = 0; r < n; ++r)
            for (long c = 0; c < n; ++c)
                eD.at(r, c) = ce_add(eD.at(r, c),
                                     ConstElem::make(dj.spectrum[i].first, 0,
                                                     dj.projectors[i].at(r, c)));

    CMat eU(n, n, ConstElem::zero(f));
    FMat nil = mat_add(dj.U, fmat_scale(fmat_identity(f, n), fe_from_int(f, -1)));
    FMat pow = fmat_identity(f, n);
    for (long k = 0; k < n; ++k) {
        for (long r = 0; r < n; ++r)
            for (long c = 0; c < n; ++c)
                eU.at(r, c) = ce_add(eU.at(r, c), ConstElem::make(fe_one(f), k, pow.at(r, c)));
        pow = fmat_mul(pow, nil);
    }
    out.eC = cmat_mul(eD, eU);
    // phi_p(e_C) must equal C e_C
    if (!cmat_equal(cmat_phi(out.eC), cmat_scale_left(dj.C, out.eC)))
        throw MahlerError("phi(e_C) != C e_C");
    return out;
}

CMat cmat_mul(const CMat& a, const CMat& b) {
    const FieldPtr& f = a.at(0, 0).field;
    CMat r(a.rows(), b.cols(), ConstElem::zero(f));
    for (long i = 0; i < a.rows(); ++i)
        for (long k = 0; k < a.cols(); ++k)
            for (long j = 0; j < b.cols(); ++j)
                r.at(i, j) = ce_add(r.at(i, j), ce_mul(a.at(i, k), b.at(k, j)));
    return r;
}

CMat cmat_phi(const CMat& a) {
    return a.map([](const ConstElem& x) { return phi_const(x); });
}

CMat cmat_scale_left(const FMat& s, const CMat& a) {
    const FieldPtr& f = a.at(0, 0).field;
    CMat r(s.rows(), a.cols(), ConstElem::zero(f));
    for (long i = 0; i < s.rows(); ++i)
        for (long k = 0; k < s.cols(); ++k)
            for (long j = 0; j < a.cols(); ++j)
                r.at(i, j) = ce_add(r.at(i, j), ce_scale(a.at(k, j), s.at(i, k)));
    return r;
}

bool cmat_equal(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            if (!ce_equal(a.at(i, j), b.at(i, j))) return false;
    return true;
}

CMat cmat_lift(const CMat& a, const FieldPtr& target) {
    return a.map([&](const ConstElem& x) { return ce_lift(x, target); });
}

} // namespace mahler
