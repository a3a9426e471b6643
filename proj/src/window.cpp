#include "mahler/window.hpp"
#include <functional>

#include <sstream>

namespace mahler {

namespace {

bool in_Sp(long s, long p) { return s == 0 || (s < 0 && s % p != 0); }

} // namespace

WindowParams window_params(const MahlerSystem& sys) {
    WindowParams w;
    w.m = sys.size();
    w.p = sys.p;
    auto va = rfmat_val(sys.A);
    if (!va) throw InputError("zero system matrix");
    RFMat ainv = rfmat_inverse(sys.A);
    auto vai = rfmat_val(ainv);
    RationalFunction dA = rfmat_det(sys.A);
    w.val_A = *va;
    w.val_Ainv = *vai;
    w.val_detA = dA.val();

    long p = w.p, m = w.m;
    w.nuP = rat_ceil_long(make_rational(w.val_A, p - 1));
    Rational theta_bound = make_rational(p * m * w.val_A - p * w.val_detA, p - 1);
    long v = rat_ceil_long(theta_bound);
    while (!in_Sp(v, p)) ++v;
    if (v > 0) throw MahlerError("nuTheta > 0: system violates d(A) = 1 preconditions");
    w.nuTheta = v;
    w.nu = std::min(w.nuP, p * w.nuP + w.val_Ainv) + w.nuTheta;
    Rational mu1 = -make_rational(w.val_Ainv + w.nuTheta, p - 1);
    Rational mu2 = make_rational(w.val_detA, p - 1) - Rational((m - 1) * w.nuP);
    Rational mu = std::max(Rational(rat_ceil(mu1)), mu2);
    if (!is_integer(mu)) throw MahlerError("window bound mu is not an integer: is d(A) = 1?");
    w.mu = to_long(mu.get_num());
    if (w.mu < w.nuP) throw MahlerError("empty window (mu < nuP): is d(A) = 1?");
    w.N = m * (w.mu - w.nu + 1);
    for (long l = w.nuTheta; l <= 0; ++l)
        if (in_Sp(l, p)) w.Sp_window.push_back(l);
    return w;
}

WindowContext::WindowContext(MahlerSystem s)
    : sys(std::move(s)), wp(window_params(sys)), ainv_(rfmat_inverse(sys.A)), expanded_to_(0) {
    long m = wp.m;
    ainv_series_ = Mat<PuiseuxTruncation>(m, m, pt_zero(sys.field));
    expanded_to_ = wp.mu - wp.nuTheta - wp.p * wp.nu + 8;
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            ainv_series_.at(i, j) = expand_rational(ainv_.at(i, j), expanded_to_);
}

void WindowContext::ensure_expanded(long order) const {
    if (order <= expanded_to_) return;
    long target = std::max(order, 2 * expanded_to_);
    for (long i = 0; i < wp.m; ++i)
        for (long j = 0; j < wp.m; ++j)
            ainv_series_.at(i, j) = pt_extend(ainv_series_.at(i, j), Rational(target));
    expanded_to_ = target;
}

FMat WindowContext::B(long k) const {
    if (k < wp.val_Ainv) return fmat_zero(sys.field, wp.m, wp.m);
    ensure_expanded(k);
    FMat b = fmat_zero(sys.field, wp.m, wp.m);
    for (long i = 0; i < wp.m; ++i)
        for (long j = 0; j < wp.m; ++j) b.at(i, j) = ainv_series_.at(i, j).coeff(Rational(k));
    return b;
}

const FMat& WindowContext::Ml(long l) const {
    auto it = ml_cache_.find(l);
    if (it != ml_cache_.end()) return it->second;
    FMat m = build_Ml(*this, l);
    return ml_cache_.emplace(l, std::move(m)).first->second;
}

Subspace WindowContext::V0() const {
    return Subspace::coordinate_span(sys.field, wp.N, wp.m * (wp.nuP - wp.nu), wp.N);
}

FMat build_Ml(const WindowContext& ctx, long l) {
    const WindowParams& w = ctx.wp;
    if (l < w.nuTheta || l > 0 || !in_Sp(l, w.p))
        throw MahlerError("build_Ml: l outside S'_p");
    long R = w.mu - w.nu + 1; // number of m x m blocks per side
    FMat M = fmat_zero(ctx.sys.field, w.N, w.N);
    for (long bi = 1; bi <= R; ++bi)
        for (long bj = w.nuP - w.nu + 1; bj <= R; ++bj) {
            long k = bi + w.nu - l - 1 - w.p * (bj + w.nu - 1);
            if (k < w.val_Ainv) continue;
            FMat blk = ctx.B(k);
            if (fmat_is_zero(blk)) continue;
            for (long i = 0; i < w.m; ++i)
                for (long j = 0; j < w.m; ++j)
                    M.at((bi - 1) * w.m + i, (bj - 1) * w.m + j) = blk.at(i, j);
        }
    return M;
}

// ---------------------------------------------------------------------------
// Algorithm: admissible pair via the fixpoint spaces
// ---------------------------------------------------------------------------

namespace {

// columns of a subspace basis (basis rows transposed), ordered by pivot
FMat basis_columns(const Subspace& s) { return s.basis().transpose(); }

} // namespace

Mat<LaurentPoly> AdmissiblePair::theta() const {
    long m = wp.m;
    Mat<LaurentPoly> t(m, m, LaurentPoly::zero(field));
    std::vector<long> offs(1, 0);
    for (long j = 0; j < r; ++j) offs.push_back(offs.back() + b[(size_t)j]);
    for (long j = 0; j < r; ++j)
        for (long a = 0; a < b[(size_t)j]; ++a)
            for (long c = 0; c < b[(size_t)j]; ++c)
                t.at(offs[(size_t)j] + a, offs[(size_t)j] + c) =
                    LaurentPoly::constant(theta_diag[(size_t)j].at(a, c));
    for (const auto& [key, blk] : theta_off) {
        auto [i, j, l] = key;
        for (long a = 0; a < blk.rows(); ++a)
            for (long c = 0; c < blk.cols(); ++c) {
                LaurentPoly& cur = t.at(offs[(size_t)(i - 1)] + a, offs[(size_t)(j - 1)] + c);
                cur = lp_add(cur, LaurentPoly::monomial(blk.at(a, c), l));
            }
    }
    return t;
}

Mat<PuiseuxTruncation> AdmissiblePair::P() const {
    long m = wp.m;
    Mat<PuiseuxTruncation> pm(m, m, pt_zero(field));
    long col0 = 0;
    for (long j = 0; j < r; ++j) {
        for (long col = 0; col < b[(size_t)j]; ++col) {
            for (long row = 0; row < m; ++row) {
                PuiseuxTruncation t = pt_zero(field);
                t.order = Rational(order);
                t.vbound = wp.nuP;
                for (const auto& [n, mat] : Q[(size_t)j]) {
                    const FieldElement& v = mat.at(row, col);
                    if (!fe_is_zero(v)) t.c[n] = v;
                }
                pm.at(row, col0 + col) = std::move(t);
            }
        }
        col0 += b[(size_t)j];
    }
    return pm;
}

AdmissiblePair admissible_pair(const WindowContext& ctx) {
    const WindowParams& w = ctx.wp;
    const FieldPtr& F = ctx.sys.field;
    long m = w.m;
    const FMat& M = ctx.Ml(0);

    Subspace X = Subspace::zero(F, w.N);
    Subspace V0 = ctx.V0();
    std::vector<FMat> E_list;
    std::vector<long> y_list; // number of E_Y columns per block
    std::vector<Subspace> U_list;
    long fixpoint_cap = m * (w.mu - w.nuP + 1) + 1;

    while (X.dim() < m) {
        Subspace U = Subspace::zero(F, w.N);
        for (long l : w.Sp_window) U = subspace_sum(U, image(ctx.Ml(l), X));
        Subspace Fsp = V0;
        long iter = 0;
        while (true) {
            Subspace G = subspace_intersect(
                subspace_intersect(Fsp, preimage(M, subspace_sum(Fsp, U))),
                subspace_sum(image(M, Fsp), U));
            if (G.equals(Fsp)) break;
            Fsp = G;
            if (++iter > fixpoint_cap)
                throw MahlerError("window fixpoint exceeded its iteration bound");
        }
        if (Fsp.equals(X))
            throw MahlerError("ramification insufficient: spaces stabilized below dimension m");
        if (!Fsp.contains(X)) throw MahlerError("window spaces are not nested");
        Subspace Y = complement(X, subspace_intersect(U, Fsp));
        Subspace XY = subspace_sum(X, Y);
        Subspace Z = complement(XY, Fsp);
        FMat Ej = hstack(basis_columns(Y), basis_columns(Z), fe_zero(F));
        E_list.push_back(Ej);
        y_list.push_back(Y.dim());
        U_list.push_back(U);
        X = Fsp;
        if ((long)E_list.size() > m) throw MahlerError("dimension overflow: more than m blocks");
    }
    if (X.dim() > m) throw MahlerError("dimension overflow: dim X exceeds m");

    AdmissiblePair pair;
    pair.p = w.p;
    pair.field = F;
    pair.wp = w;
    pair.r = (long)E_list.size();
    pair.order = w.mu;

    for (long j = 0; j < pair.r; ++j) {
        const FMat& Ej = E_list[(size_t)j];
        long mj = Ej.cols();
        pair.b.push_back(mj);
        const Subspace& U = U_list[(size_t)j];
        FMat MEj = fmat_mul(M, Ej);

        // R with M E_j = E_Z R (mod U_{j-1}); E_Z columns are the trailing
        // complement columns of E_j
        long yj = y_list[(size_t)j];
        long zj = mj - yj;
        FMat EZ(w.N, zj, fe_zero(F));
        for (long i2 = 0; i2 < w.N; ++i2)
            for (long c = 0; c < zj; ++c) EZ.at(i2, c) = Ej.at(i2, yj + c);
        FMat gens = hstack(EZ, basis_columns(U), fe_zero(F));
        auto sol = solve_in_span(MEj, gens);
        if (!sol) throw MahlerError("M E_j is not contained in E_Z + U_{j-1}");
        FMat R(zj, mj, fe_zero(F));
        for (long i2 = 0; i2 < zj; ++i2)
            for (long c = 0; c < mj; ++c) R.at(i2, c) = sol->at(i2, c);
        // complete R to an invertible V with standard-basis rows at the
        // non-pivot columns of R, stacked above R
        std::vector<long> rpiv = rref(R).pivots;
        FMat V(mj, mj, fe_zero(F));
        long vr = 0;
        for (long c = 0; c < mj; ++c) {
            if (std::find(rpiv.begin(), rpiv.end(), c) != rpiv.end()) continue;
            V.at(vr, c) = fe_one(F);
            ++vr;
        }
        if (vr != yj) throw MahlerError("completion row count mismatch in Theta_j construction");
        for (long i2 = 0; i2 < zj; ++i2)
            for (long c = 0; c < mj; ++c) V.at(yj + i2, c) = R.at(i2, c);
        FMat Tj = inverse(V);
        pair.theta_diag.push_back(Tj);

        // Theta_{i,j,l} from E_j - M E_j Theta_j over the generators M_l E_i
        FMat target = Ej;
        {
            FMat METj = fmat_mul(MEj, Tj);
            for (long i2 = 0; i2 < w.N; ++i2)
                for (long c = 0; c < mj; ++c)
                    target.at(i2, c) = fe_sub(target.at(i2, c), METj.at(i2, c));
        }
        if (j == 0) {
            if (!fmat_is_zero(target)) throw MahlerError("E_1 - M E_1 Theta_1 != 0");
        } else {
            FMat G(w.N, 0, fe_zero(F));
            for (long i1 = 0; i1 < j; ++i1)
                for (long l : w.Sp_window) {
                    FMat cols = fmat_mul(ctx.Ml(l), E_list[(size_t)i1]);
                    G = hstack(G, cols, fe_zero(F));
                }
            auto X2 = solve_in_span(target, G);
            if (!X2) throw MahlerError("E_j - M E_j Theta_j is not in U_{j-1}");
            long rowoff = 0;
            for (long i1 = 0; i1 < j; ++i1)
                for (long l : w.Sp_window) {
                    long bi = E_list[(size_t)i1].cols();
                    FMat blk(bi, mj, fe_zero(F));
                    bool nonzero = false;
                    for (long a = 0; a < bi; ++a)
                        for (long c = 0; c < mj; ++c) {
                            blk.at(a, c) = X2->at(rowoff + a, c);
                            nonzero = nonzero || !fe_is_zero(blk.at(a, c));
                        }
                    if (nonzero) pair.theta_off[{i1 + 1, j + 1, l}] = blk;
                    rowoff += bi;
                }
        }

        // window coefficients Q_{j,n} for n in [nuP, mu] from E_j
        std::map<long, FMat> qj;
        for (long n = w.nuP; n <= w.mu; ++n) {
            FMat qn(m, mj, fe_zero(F));
            bool nonzero = false;
            for (long row = 0; row < m; ++row)
                for (long c = 0; c < mj; ++c) {
                    qn.at(row, c) = Ej.at((n - w.nu) * m + row, c);
                    nonzero = nonzero || !fe_is_zero(qn.at(row, c));
                }
            if (nonzero) qj[n] = qn;
        }
        pair.Q.push_back(std::move(qj));
    }
    return pair;
}

void extend_P(const WindowContext& ctx, AdmissiblePair& pair, long order) {
    const WindowParams& w = ctx.wp;
    long m = w.m, p = w.p;
    auto getQ = [&](long j, long t) -> std::optional<FMat> {
        if (t < w.nuP) return std::nullopt;
        auto it = pair.Q[(size_t)j].find(t);
        if (it == pair.Q[(size_t)j].end()) return std::nullopt;
        return it->second;
    };
    for (long n = pair.order + 1; n <= order; ++n) {
        for (long j = 0; j < pair.r; ++j) {
            long mj = pair.b[(size_t)j];
            FMat acc = fmat_zero(pair.field, m, mj);
            bool nonzero = false;
            // diagonal part: sum_k B_k Q_{j,(n-k)/p} Theta_j
            for (long k = w.val_Ainv; k <= n - p * w.nuP; ++k) {
                if ((n - k) % p != 0) continue;
                auto q = getQ(j, (n - k) / p);
                if (!q) continue;
                FMat term = fmat_mul(fmat_mul(ctx.B(k), *q), pair.theta_diag[(size_t)j]);
                if (fmat_is_zero(term)) continue;
                nonzero = true;
                for (long a = 0; a < m; ++a)
                    for (long c = 0; c < mj; ++c) acc.at(a, c) = fe_add(acc.at(a, c), term.at(a, c));
            }
            // off-diagonal part: sum_{i<j} sum_l sum_k B_k Q_{i,(n-k-l)/p} Theta_{i,j,l}
            for (long i1 = 0; i1 < j; ++i1)
                for (long l : w.Sp_window) {
                    auto itoff = pair.theta_off.find({i1 + 1, j + 1, l});
                    if (itoff == pair.theta_off.end()) continue;
                    for (long k = w.val_Ainv; k <= n - l - p * w.nuP; ++k) {
                        if ((n - k - l) % p != 0) continue;
                        auto q = getQ(i1, (n - k - l) / p);
                        if (!q) continue;
                        FMat term = fmat_mul(fmat_mul(ctx.B(k), *q), itoff->second);
                        if (fmat_is_zero(term)) continue;
                        nonzero = true;
                        for (long a = 0; a < m; ++a)
                            for (long c = 0; c < mj; ++c)
                                acc.at(a, c) = fe_add(acc.at(a, c), term.at(a, c));
                    }
                }
            if (nonzero) pair.Q[(size_t)j][n] = std::move(acc);
        }
    }
    if (order > pair.order) pair.order = order;
}

// ---------------------------------------------------------------------------
// check_admissible
// ---------------------------------------------------------------------------

AdmissibleReport check_admissible(const MahlerSystem& sys, const Mat<PuiseuxTruncation>& P,
                                  const Mat<LaurentPoly>& theta, const std::vector<long>& block_sizes) {
    AdmissibleReport rep;
    auto fail = [&](const std::string& why) {
        rep.ok = false;
        rep.first_violation = why;
        return rep;
    };
    WindowParams w = window_params(sys);
    long m = w.m;
    const FieldPtr& F = sys.field;

    // support(theta) in S_p
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            for (const auto& [e, v] : theta.at(i, j).c)
                if (!in_Sp(e, w.p)) return fail("support not in S_p");

    // block upper triangular, constant invertible diagonal blocks
    std::vector<long> offs(1, 0);
    for (long bsz : block_sizes) offs.push_back(offs.back() + bsz);
    if (offs.back() != m) return fail("block sizes do not sum to m");
    for (long bi = 0; bi < (long)block_sizes.size(); ++bi) {
        FMat diag(block_sizes[(size_t)bi], block_sizes[(size_t)bi], fe_zero(F));
        for (long a = 0; a < block_sizes[(size_t)bi]; ++a)
            for (long c = 0; c < block_sizes[(size_t)bi]; ++c) {
                const LaurentPoly& e = theta.at(offs[(size_t)bi] + a, offs[(size_t)bi] + c);
                for (const auto& [ex, v] : e.c)
                    if (ex != 0) return fail("diagonal block is not constant");
                diag.at(a, c) = e.constant_term();
            }
        if (fe_is_zero(det(diag))) return fail("diagonal block is singular");
        for (long bj = 0; bj < bi; ++bj)
            for (long a = 0; a < block_sizes[(size_t)bi]; ++a)
                for (long c = 0; c < block_sizes[(size_t)bj]; ++c)
                    if (!theta.at(offs[(size_t)bi] + a, offs[(size_t)bj] + c).is_zero())
                        return fail("theta is not block upper triangular");
    }

    // valuations
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) {
            auto me = P.at(i, j).min_exponent();
            if (me && *me < w.nuP) return fail("val P < nuP");
            if (!theta.at(i, j).is_zero() && theta.at(i, j).val() < w.nuTheta)
                return fail("val theta < nuTheta");
        }

    // det theta constant nonzero
    {
        FieldElement dt = fe_one(F);
        for (long bi = 0; bi < (long)block_sizes.size(); ++bi) {
            FMat diag(block_sizes[(size_t)bi], block_sizes[(size_t)bi], fe_zero(F));
            for (long a = 0; a < block_sizes[(size_t)bi]; ++a)
                for (long c = 0; c < block_sizes[(size_t)bi]; ++c)
                    diag.at(a, c) = theta.at(offs[(size_t)bi] + a, offs[(size_t)bi] + c).constant_term();
            dt = fe_mul(dt, det(diag));
        }
        if (fe_is_zero(dt)) return fail("det theta vanishes");
    }

    // phi_p(P) theta = A P up to the guaranteed order
    std::optional<Rational> pord;
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            if (P.at(i, j).order) pord = pord ? std::min(*pord, *P.at(i, j).order) : *P.at(i, j).order;
    long aexp_order = pord ? rat_ceil_long(*pord) * w.p + std::abs(w.nuTheta) + std::abs(w.val_A) + 8
                           : 32;
    Mat<PuiseuxTruncation> APexp(m, m, pt_zero(F));
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) {
            PuiseuxTruncation acc = pt_zero(F);
            for (long k = 0; k < m; ++k) {
                PuiseuxTruncation a_ik = expand_rational(sys.A.at(i, k), aexp_order);
                acc = pt_add(acc, pt_mul(a_ik, P.at(k, j)));
            }
            APexp.at(i, j) = acc;
        }
    Rational min_checked = pord ? *pord : Rational(aexp_order);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) {
            PuiseuxTruncation lhs = pt_zero(F);
            for (long k = 0; k < m; ++k)
                lhs = pt_add(lhs, pt_mul_laurent(substitute_power(P.at(i, k), w.p), theta.at(k, j)));
            PuiseuxTruncation resid = pt_sub(lhs, APexp.at(i, j));
            if (resid.order && *resid.order < min_checked) min_checked = *resid.order;
            for (const auto& [key, v] : resid.c) {
                if (resid.order && make_rational(key, resid.ram) > *resid.order) continue;
                if (!fe_is_zero(v)) return fail("phi_p(P) theta != A P");
            }
        }
    rep.verified_order = min_checked;

    // columns of pi(P) linearly independent
    FMat piP(w.N, m, fe_zero(F));
    for (long col = 0; col < m; ++col)
        for (long n = w.nu; n <= w.mu; ++n)
            for (long row = 0; row < m; ++row) {
                auto cv = P.at(row, col).coeff_known(Rational(n));
                piP.at((n - w.nu) * m + row, col) = cv ? *cv : fe_zero(F);
            }
    if ((long)rref(piP).pivots.size() != m) return fail("columns of pi(P) are dependent");

    // val(det P) = val(det A)/(p-1): the lowest coefficient of det P-bar sits
    // exactly there and is nonzero
    {
        std::function<PuiseuxTruncation(std::vector<long>, long)> pdet =
            [&](std::vector<long> cols, long row) -> PuiseuxTruncation {
            if (cols.empty()) return pt_const(fe_one(F));
            PuiseuxTruncation acc = pt_zero(F);
            bool neg = false;
            for (size_t k = 0; k < cols.size(); ++k) {
                std::vector<long> rest;
                for (size_t t = 0; t < cols.size(); ++t)
                    if (t != k) rest.push_back(cols[t]);
                PuiseuxTruncation term = pt_mul(P.at(row, cols[k]), pdet(rest, row + 1));
                if (neg) term = pt_neg(term);
                acc = pt_add(acc, term);
                neg = !neg;
            }
            return acc;
        };
        std::vector<long> cols(m);
        for (long c2 = 0; c2 < m; ++c2) cols[(size_t)c2] = c2;
        PuiseuxTruncation detP = pdet(cols, 0);
        Rational target = make_rational(w.val_detA, w.p - 1);
        if (detP.order && *detP.order < target) return fail("order too small to check val(det P)");
        auto me = detP.min_exponent();
        if (!me || *me != target) return fail("val(det P) != val(det A)/(p-1)");
    }

    return rep;
}

} // namespace mahler
