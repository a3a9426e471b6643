#include "mahler/solver.hpp"

#include <algorithm>
#include <sstream>

namespace mahler {

int solution_key_cmp(const SolutionKey& x, const SolutionKey& y) {
    int c = fe_cmp(x.c, y.c);
    if (c != 0) return c;
    if (x.j != y.j) return x.j < y.j ? -1 : 1;
    if (x.a.size() != y.a.size()) return x.a.size() < y.a.size() ? -1 : 1;
    for (size_t i = 0; i < x.a.size(); ++i)
        if (x.a[i] != y.a[i]) return x.a[i] < y.a[i] ? -1 : 1;
    return eps_cmp(x.seq, y.seq);
}

namespace {

SolutionExpression solution_normalize(SolutionExpression s) {
    std::sort(s.terms.begin(), s.terms.end(), [](const auto& x, const auto& y) {
        return solution_key_cmp(x.first, y.first) < 0;
    });
    std::vector<std::pair<SolutionKey, PuiseuxTruncation>> merged;
    for (auto& t : s.terms) {
        if (!merged.empty() && solution_key_cmp(merged.back().first, t.first) == 0)
            merged.back().second = pt_add(merged.back().second, t.second);
        else
            merged.push_back(std::move(t));
    }
    s.terms.clear();
    for (auto& t : merged) {
        // keep terms whose truncation is zero so far only if they are exactly zero
        if (t.second.c.empty() && !t.second.order) continue;
        s.terms.push_back(std::move(t));
    }
    return s;
}

// The uniqueness of standard decompositions applies to xi's indexed by single
// basis sequences k^alpha lambda^k, so every Hahn term is split into one
// (scalar, unit basis sequence) summand per sequence term.
struct SplitPart {
    FieldElement scalar;
    ExpPolySeq key_seq;
};

std::vector<SplitPart> split_basis_terms(const ExpPolySeq& seq) {
    std::vector<SplitPart> out;
    for (const auto& t : seq.terms) {
        ExpPolySeq unit{seq.field, seq.arity, {ExpPolyTerm{fe_one(seq.field), t.alpha, t.lambda}}};
        out.push_back(SplitPart{t.coeff, eps_normalize(std::move(unit))});
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// triangularize_theta
// ---------------------------------------------------------------------------

namespace {

// upper-triangularization of one constant block; may extend the field
struct BlockGauge {
    FieldPtr field;
    FMat Q, Qinv;
};

bool is_upper_triangular(const FMat& b) {
    for (long i = 0; i < b.rows(); ++i)
        for (long j = 0; j < i; ++j)
            if (!fe_is_zero(b.at(i, j))) return false;
    return true;
}

// eigenvector columns for one eigenvalue, first nonzero coordinate scaled to 1
std::vector<std::vector<FieldElement>> eigenvectors(const FMat& b, const FieldElement& lam) {
    const FieldPtr& f = lam.field;
    long n = b.rows();
    FMat shifted = mat_add(b, fmat_scale(fmat_identity(f, n), fe_neg(lam)));
    FMat K = kernel(f, shifted);
    std::vector<std::vector<FieldElement>> out;
    for (long r = 0; r < K.rows(); ++r) {
        std::vector<FieldElement> v;
        for (long c = 0; c < n; ++c) v.push_back(K.at(r, c));
        FieldElement pivot = fe_zero(f);
        for (const auto& x : v)
            if (!fe_is_zero(x)) {
                pivot = x;
                break;
            }
        FieldElement inv = fe_inv(pivot);
        for (auto& x : v) x = fe_mul(x, inv);
        out.push_back(std::move(v));
    }
    return out;
}

BlockGauge triangularize_block(const FieldPtr& f0, const FMat& block) {
    long n = block.rows();
    if (n == 1 || is_upper_triangular(block)) {
        return BlockGauge{f0, fmat_identity(f0, n), fmat_identity(f0, n)};
    }
    RootsResult rr = find_roots(f0, charpoly(block));
    FieldPtr f = rr.field;
    FMat b = fmat_lift(block, f);
    // try a full eigenbasis first
    std::vector<std::vector<FieldElement>> cols;
    for (const auto& [lam, mult] : rr.roots) {
        auto vs = eigenvectors(b, lam);
        for (auto& v : vs) cols.push_back(std::move(v));
    }
    if ((long)cols.size() == n) {
        FMat Qinv(n, n, fe_zero(f));
        for (long c = 0; c < n; ++c)
            for (long r = 0; r < n; ++r) Qinv.at(r, c) = cols[(size_t)c][(size_t)r];
        return BlockGauge{f, inverse(Qinv), Qinv};
    }
    // defective: deflate with one eigenvector and recurse
    auto vs = eigenvectors(b, rr.roots.front().first);
    if (vs.empty()) throw MahlerError("eigenvalue without eigenvector in triangularization");
    const std::vector<FieldElement>& v = vs.front();
    long lead = 0;
    while (fe_is_zero(v[(size_t)lead])) ++lead;
    FMat T(n, n, fe_zero(f));
    for (long r = 0; r < n; ++r) T.at(r, 0) = v[(size_t)r];
    long col = 1;
    for (long q = 0; q < n; ++q) {
        if (q == lead) continue;
        T.at(q, col) = fe_one(f);
        ++col;
    }
    FMat Tinv = inverse(T);
    FMat conj = fmat_mul(fmat_mul(Tinv, b), T);
    FMat sub(n - 1, n - 1, fe_zero(f));
    for (long r = 1; r < n; ++r)
        for (long c = 1; c < n; ++c) sub.at(r - 1, c - 1) = conj.at(r, c);
    BlockGauge g = triangularize_block(f, sub);
    FMat Tl = fmat_lift(T, g.field);
    FMat Sfull = fmat_identity(g.field, n);
    for (long r = 1; r < n; ++r)
        for (long c = 1; c < n; ++c) Sfull.at(r, c) = g.Qinv.at(r - 1, c - 1);
    FMat Qinv = fmat_mul(Tl, Sfull);
    return BlockGauge{g.field, inverse(Qinv), Qinv};
}

Mat<LaurentPoly> lmat_lift(const Mat<LaurentPoly>& a, const FieldPtr& target) {
    return a.map([&](const LaurentPoly& x) { return lp_lift(x, target); });
}

// constants * Laurent matrix products for the gauge conjugation
Mat<LaurentPoly> lmat_mul_left(const FMat& s, const Mat<LaurentPoly>& a) {
    Mat<LaurentPoly> r(s.rows(), a.cols(), LaurentPoly::zero(a.at(0, 0).field));
    for (long i = 0; i < s.rows(); ++i)
        for (long k = 0; k < s.cols(); ++k) {
            if (fe_is_zero(s.at(i, k))) continue;
            for (long j = 0; j < a.cols(); ++j)
                r.at(i, j) = lp_add(r.at(i, j), lp_scale(a.at(k, j), s.at(i, k)));
        }
    return r;
}

Mat<LaurentPoly> lmat_mul_right(const Mat<LaurentPoly>& a, const FMat& s) {
    Mat<LaurentPoly> r(a.rows(), s.cols(), LaurentPoly::zero(a.at(0, 0).field));
    for (long i = 0; i < a.rows(); ++i)
        for (long k = 0; k < a.cols(); ++k)
            for (long j = 0; j < s.cols(); ++j) {
                if (fe_is_zero(s.at(k, j))) continue;
                r.at(i, j) = lp_add(r.at(i, j), lp_scale(a.at(i, k), s.at(k, j)));
            }
    return r;
}

} // namespace

GaugeResult triangularize_theta(const Mat<LaurentPoly>& theta, const std::vector<long>& block_sizes) {
    const FieldPtr& f0 = theta.at(0, 0).field;
    long m = theta.rows();
    std::vector<long> offs(1, 0);
    for (long b : block_sizes) offs.push_back(offs.back() + b);
    if (offs.back() != m) throw MahlerError("block sizes do not sum to matrix size");

    FieldPtr f = f0;
    std::vector<BlockGauge> gauges;
    for (size_t bi = 0; bi < block_sizes.size(); ++bi) {
        long sz = block_sizes[bi];
        FMat blk(sz, sz, fe_zero(f));
        for (long r = 0; r < sz; ++r)
            for (long c = 0; c < sz; ++c) {
                const LaurentPoly& e = theta.at(offs[bi] + r, offs[bi] + c);
                for (const auto& [ex, v] : e.c)
                    if (ex != 0) throw MahlerError("diagonal block is not constant");
                blk.at(r, c) = lift_to(e.constant_term(), f);
            }
        BlockGauge g = triangularize_block(f, blk);
        f = g.field;
        gauges.push_back(std::move(g));
    }
    FMat Q = fmat_identity(f, m), Qinv = fmat_identity(f, m);
    for (size_t bi = 0; bi < block_sizes.size(); ++bi) {
        FMat bq = fmat_lift(gauges[bi].Q, f);
        FMat bqi = fmat_lift(gauges[bi].Qinv, f);
        for (long r = 0; r < block_sizes[bi]; ++r)
            for (long c = 0; c < block_sizes[bi]; ++c) {
                Q.at(offs[bi] + r, offs[bi] + c) = bq.at(r, c);
                Qinv.at(offs[bi] + r, offs[bi] + c) = bqi.at(r, c);
            }
    }
    Mat<LaurentPoly> tl = lmat_lift(theta, f);
    Mat<LaurentPoly> tri = lmat_mul_right(lmat_mul_left(Q, tl), Qinv);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < i; ++j)
            if (!tri.at(i, j).is_zero()) throw MahlerError("gauge failed to triangularize theta");
    return GaugeResult{f, std::move(Q), std::move(Qinv), std::move(tri)};
}

// ---------------------------------------------------------------------------
// solve_equation
// ---------------------------------------------------------------------------

namespace {

Mat<PuiseuxTruncation> ptmat_lift(const Mat<PuiseuxTruncation>& a, const FieldPtr& target) {
    return a.map([&](const PuiseuxTruncation& x) { return pt_lift(x, target); });
}

Mat<PuiseuxTruncation> ptmat_mul_const(const Mat<PuiseuxTruncation>& a, const FMat& s) {
    Mat<PuiseuxTruncation> r(a.rows(), s.cols(), pt_zero(a.at(0, 0).field));
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < s.cols(); ++j) {
            PuiseuxTruncation acc = pt_zero(a.at(0, 0).field);
            for (long k = 0; k < a.cols(); ++k)
                acc = pt_add(acc, pt_scale(a.at(i, k), s.at(k, j)));
            r.at(i, j) = acc;
        }
    return r;
}

Mat<HahnExpression> hmat_lift(const Mat<HahnExpression>& a, const FieldPtr& target) {
    return a.map([&](const HahnExpression& x) { return h_lift(x, target); });
}

} // namespace

FundamentalMatrix solve_system(const MahlerSystem& sys, long n) {
    if (n < 0) throw InputError("truncation order must be >= 0");
    long m = sys.size();
    WindowContext ctx(sys);
    AdmissiblePair pair = admissible_pair(ctx);
    extend_P(ctx, pair, std::max(n, pair.order));

    GaugeResult gauge = triangularize_theta(pair.theta(), pair.b);
    Mat<PuiseuxTruncation> P1 = ptmat_mul_const(ptmat_lift(pair.P(), gauge.field), gauge.Qinv);
    Mat<HahnExpression> H = compute_H(gauge.theta, sys.p);

    FMat C(m, m, fe_zero(gauge.field));
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) C.at(i, j) = gauge.theta.at(i, j).constant_term();
    ExpConstantResult ec = exp_constant(C);

    const FieldPtr& F = ec.field;
    FundamentalMatrix fm;
    fm.field = F;
    fm.p = sys.p;
    fm.m = m;
    fm.n = n;
    fm.pair = pair;
    fm.gaugeQ = fmat_lift(gauge.Q, F);
    fm.gaugeQinv = fmat_lift(gauge.Qinv, F);
    fm.P_gauged = ptmat_lift(P1, F);
    fm.theta_tri = gauge.theta.map([&](const LaurentPoly& x) { return lp_lift(x, F); });
    fm.H = hmat_lift(H, F);
    fm.eC = ec.eC;

    SolutionExpression proto;
    proto.field = F;
    proto.p = sys.p;
    proto.d = 1;
    fm.W = Mat<SolutionExpression>(m, m, proto);
    for (long row = 0; row < m; ++row)
        for (long t = 0; t < m; ++t) {
            SolutionExpression sol = proto;
            for (long s = 0; s < m; ++s) {
                const PuiseuxTruncation& ps = fm.P_gauged.at(row, s);
                for (long u = 0; u < m; ++u) {
                    const HahnExpression& hsu = fm.H.at(s, u);
                    const ConstElem& cu = fm.eC.at(u, t);
                    if (cu.is_zero() || hsu.is_zero()) continue;
                    for (const auto& ht : hsu.terms)
                        for (const auto& part : split_basis_terms(ht.seq))
                            for (const auto& ct : cu.terms) {
                                SolutionKey key{ct.c, ct.k, ht.a, part.key_seq};
                                PuiseuxTruncation f =
                                    pt_mul_monomial(ps, fe_mul(part.scalar, ct.coeff), ht.gamma);
                                sol.terms.push_back({std::move(key), std::move(f)});
                            }
                }
            }
            fm.W.at(row, t) = solution_normalize(std::move(sol));
        }
    return fm;
}

BasisResult solve_equation(const MahlerEquation& eq, long n) {
    if (n < 0) throw InputError("truncation order must be >= 0");
    long m = eq.order();
    auto slopes = newton_slopes(eq);
    long d = ramification_index(slopes, eq.p);
    {
        Integer pm = int_pow(Integer(eq.p), (unsigned long)m) - 1;
        if (!divisible(pm, Integer(d))) throw MahlerError("d(A) does not divide p^m - 1");
    }
    MahlerEquation eqd = d == 1 ? eq : eq.substitute_power(d);
    MahlerSystem sys = build_companion(eqd);
    FundamentalMatrix fm = solve_system(sys, d * n);

    const FieldPtr& F = fm.field;
    BasisResult res;
    res.field = F;
    res.p = eq.p;
    res.m = m;
    res.d = d;
    res.n = n;
    res.pair = fm.pair;
    res.gaugeQ = fm.gaugeQ;
    res.gaugeQinv = fm.gaugeQinv;
    res.P_gauged = fm.P_gauged;
    res.theta_tri = fm.theta_tri;
    res.H = fm.H;
    res.eC = fm.eC;

    // first row of the fundamental matrix, with z -> z^{1/d}
    for (long t = 0; t < m; ++t) {
        SolutionExpression sol;
        sol.field = F;
        sol.p = eq.p;
        sol.d = d;
        for (const auto& [key, f] : fm.W.at(0, t).terms) {
            SolutionKey nk = key;
            for (auto& ai : nk.a) ai /= d;
            PuiseuxTruncation nf = ramify(f, d);
            if (nf.c.empty()) continue; // drop keys with no nonzero coefficient
            sol.terms.push_back({std::move(nk), std::move(nf)});
        }
        sol = solution_normalize(std::move(sol));
        res.solutions.push_back(std::move(sol));
    }

    // support summary
    std::vector<FieldElement> k0;
    std::vector<std::pair<std::vector<Rational>, ExpPolySeq>> omega1;
    Rational minexp = 0;
    for (const auto& sol : res.solutions)
        for (const auto& [key, f] : sol.terms) {
            bool found = false;
            for (const auto& c : k0)
                if (fe_equal(c, key.c)) found = true;
            if (!found) k0.push_back(key.c);
            res.j0 = std::max(res.j0, key.j);
            bool ofound = false;
            for (const auto& [a, sq] : omega1)
                if (a == key.a && eps_equal(sq, key.seq)) ofound = true;
            if (!ofound) omega1.push_back({key.a, key.seq});
            // v certifies membership in z^{-v} K[[z^{1/d}]] through the
            // propagated valuation bounds, not just the observed support
            if (f.vbound < minexp) minexp = f.vbound;
        }
    std::sort(k0.begin(), k0.end(), [](const FieldElement& a, const FieldElement& b) {
        return fe_cmp(a, b) < 0;
    });
    res.K0 = std::move(k0);
    res.Omega1 = std::move(omega1);
    res.v = minexp < 0 ? rat_ceil_long(-minexp) : 0;
    return res;
}

// ---------------------------------------------------------------------------
// verify_basis
// ---------------------------------------------------------------------------

SolutionExpression solution_phi(const SolutionExpression& s) {
    SolutionExpression out;
    out.field = s.field;
    out.p = s.p;
    out.d = s.d;
    for (const auto& [key, f] : s.terms) {
        PuiseuxTruncation fp = substitute_power(f, s.p);
        HahnExpression xi = HahnExpression::xi(key.seq, key.a, s.p);
        HahnExpression xip = normalize_xi(xi_phi(xi));
        ConstElem ce = phi_const(ConstElem::make(key.c, key.j, fe_one(s.field)));
        for (const auto& ht : xip.terms)
            for (const auto& part : split_basis_terms(ht.seq))
                for (const auto& ct : ce.terms) {
                    SolutionKey nk{ct.c, ct.k, ht.a, part.key_seq};
                    out.terms.push_back(
                        {std::move(nk),
                         pt_mul_monomial(fp, fe_mul(part.scalar, ct.coeff), ht.gamma)});
                }
    }
    return solution_normalize(std::move(out));
}

SolutionExpression solution_mul_rf(const SolutionExpression& s, const RationalFunction& rf,
                                   long fallback_order) {
    SolutionExpression out = s;
    if (rf.is_zero()) {
        out.terms.clear();
        return out;
    }
    for (auto& [key, f] : out.terms) {
        Rational top = f.order ? *f.order : Rational(fallback_order);
        long need = rat_ceil_long(top - f.vbound) + std::abs(rf.val()) + 2;
        f = pt_mul(f, expand_rational(rf, need));
    }
    return out;
}

SolutionExpression solution_add(const SolutionExpression& x, const SolutionExpression& y) {
    SolutionExpression r = x;
    for (const auto& t : y.terms) r.terms.push_back(t);
    return solution_normalize(std::move(r));
}

VerifyReport verify_basis(const MahlerEquation& eq, const BasisResult& res) {
    VerifyReport rep;
    for (const auto& sol : res.solutions) {
        VerifySolutionReport sr;
        SolutionExpression residual;
        residual.field = sol.field;
        residual.p = sol.p;
        residual.d = sol.d;
        SolutionExpression phik = sol;
        for (long k = 0; k <= eq.order(); ++k) {
            if (k > 0) phik = solution_phi(phik);
            RationalFunction ak = rf_lift(eq.coeffs[(size_t)k], sol.field);
            if (ak.is_zero()) continue;
            residual = solution_add(residual, solution_mul_rf(phik, ak, res.n * res.d + 1));
        }
        std::optional<Rational> minorder;
        for (const auto& [key, f] : residual.terms) {
            if (f.order && (!minorder || *f.order < *minorder)) minorder = *f.order;
            for (const auto& [idx, v] : f.c) {
                if (f.order && make_rational(idx, f.ram) > *f.order) continue;
                if (!fe_is_zero(v)) {
                    sr.ok = false;
                    if (sr.first_failure.empty()) {
                        std::ostringstream os;
                        os << "nonzero residual coefficient at z^(" << rat_to_string(make_rational(idx, f.ram))
                           << ") in group (c=" << fe_to_string(key.c) << ", j=" << key.j << ")";
                        sr.first_failure = os.str();
                    }
                }
            }
        }
        sr.verified_order = minorder ? *minorder : Rational(res.n);
        // characteristic p: the key-wise grouping above could in principle
        // miss cancellations between symbolically distinct sequences, so also
        // sample total coefficients of each (c, j) group directly
        if (sr.ok && sol.field->characteristic() != 0) {
            std::vector<std::pair<std::pair<std::string, long>, std::vector<size_t>>> groups;
            for (size_t ti = 0; ti < residual.terms.size(); ++ti) {
                std::pair<std::string, long> gk{fe_to_string(residual.terms[ti].first.c),
                                                residual.terms[ti].first.j};
                bool found = false;
                for (auto& g : groups)
                    if (g.first == gk) {
                        g.second.push_back(ti);
                        found = true;
                    }
                if (!found) groups.push_back({gk, {ti}});
            }
            for (const auto& g : groups) {
                std::vector<Rational> samples;
                for (size_t ti : g.second) {
                    const auto& f = residual.terms[ti].second;
                    Rational asum = 0;
                    for (const auto& ai : residual.terms[ti].first.a) asum += ai;
                    for (const auto& [idx, v] : f.c) {
                        if (samples.size() >= 3) break;
                        Rational e = make_rational(idx, f.ram) - asum / sol.p;
                        if (e <= 0 && (!f.order || e + asum <= *f.order)) samples.push_back(e);
                    }
                }
                for (const Rational& e : samples) {
                    FieldElement tot = fe_zero(sol.field);
                    for (size_t ti : g.second) {
                        const auto& key = residual.terms[ti].first;
                        const auto& f = residual.terms[ti].second;
                        HahnExpression xi = HahnExpression::xi(key.seq, key.a, sol.p);
                        for (const auto& [fi, fv] : f.c) {
                            Rational rest = e - make_rational(fi, f.ram);
                            if (rest > 0) continue;
                            tot = fe_add(tot, fe_mul(fv, coefficient_at(xi, rest)));
                        }
                    }
                    if (!fe_is_zero(tot)) {
                        sr.ok = false;
                        sr.first_failure = "characteristic-p coefficient sample nonzero at z^(" +
                                           rat_to_string(e) + ")";
                        break;
                    }
                }
            }
        }
        rep.ok = rep.ok && sr.ok;
        rep.per_solution.push_back(std::move(sr));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// entry_equation
// ---------------------------------------------------------------------------

MahlerEquation entry_equation(const AdmissiblePair& pair, const MahlerSystem& sys, long i, long j,
                              long kmax) {
    long m = sys.size();
    if (kmax < 0) kmax = m * m;
    if (i < 0 || i >= m || j < 0 || j >= m) throw InputError("entry index out of range");
    const FieldPtr& F = sys.field;

    // Theta as a rational-function matrix, then T_k = Theta^{-1} ... phi^{k-1}(Theta)^{-1}
    Mat<LaurentPoly> theta = pair.theta();
    RFMat thetaR = rfmat_zero(F, m, m);
    for (long r = 0; r < m; ++r)
        for (long c = 0; c < m; ++c)
            thetaR.at(r, c) = RationalFunction::from_laurent(theta.at(r, c));
    RFMat thetaInv = rfmat_inverse(thetaR);

    RFMat G = rfmat_identity(F, m);
    RFMat T = rfmat_identity(F, m);
    std::vector<std::vector<RationalFunction>> rows;
    long pk = 1;
    for (long k = 0; k <= kmax; ++k) {
        if (k > 0) {
            G = rfmat_mul(rfmat_substitute_power(sys.A, pk), G);
            T = rfmat_mul(T, rfmat_substitute_power(thetaInv, pk));
            pk *= sys.p;
        }
        std::vector<RationalFunction> row;
        for (long a = 0; a < m; ++a)
            for (long b = 0; b < m; ++b) row.push_back(G.at(i, a) * T.at(b, j));
        rows.push_back(std::move(row));
        if (k == 0) continue;
        RFMat stacked = rfmat_zero(F, (long)rows.size(), m * m);
        for (size_t r = 0; r < rows.size(); ++r)
            for (long c = 0; c < m * m; ++c) stacked.at((long)r, c) = rows[r][(size_t)c];
        auto kern = left_kernel_rational(stacked);
        if (kern) {
            std::vector<RationalFunction> coeffs;
            for (const auto& poly : *kern) coeffs.push_back(RationalFunction::from_poly(poly));
            return MahlerEquation::make_relaxed(sys.p, F, std::move(coeffs));
        }
    }
    throw MahlerError("entry_equation found no annihilator within the k bound");
}

} // namespace mahler
