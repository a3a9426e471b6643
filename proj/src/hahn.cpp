#include "mahler/hahn.hpp"

#include <algorithm>
#include <sstream>

namespace mahler {

// ---------------------------------------------------------------------------
// ExpPolySeq
// ---------------------------------------------------------------------------

namespace {

int term_key_cmp(const ExpPolyTerm& x, const ExpPolyTerm& y) {
    if (x.alpha != y.alpha) return x.alpha < y.alpha ? -1 : 1;
    for (size_t i = 0; i < x.lambda.size(); ++i) {
        int c = fe_cmp(x.lambda[i], y.lambda[i]);
        if (c != 0) return c;
    }
    return 0;
}

FieldElement fe_from_integer(const FieldPtr& f, const Integer& n) {
    return fe_from_rational(f, Rational(n));
}

FieldElement fe_binomial(const FieldPtr& f, long n, long k) {
    Integer b;
    mpz_bin_uiui(b.get_mpz_t(), (unsigned long)n, (unsigned long)k);
    return fe_from_integer(f, b);
}

} // namespace

ExpPolySeq ExpPolySeq::zero(const FieldPtr& f, long arity) { return ExpPolySeq{f, arity, {}}; }

ExpPolySeq ExpPolySeq::constant(const FieldElement& c) {
    ExpPolySeq r{c.field, 0, {}};
    if (!fe_is_zero(c)) r.terms.push_back(ExpPolyTerm{c, {}, {}});
    return r;
}

ExpPolySeq ExpPolySeq::single(const FieldElement& coeff, std::vector<long> alpha,
                              std::vector<FieldElement> lambda) {
    ExpPolySeq r{coeff.field, (long)alpha.size(), {}};
    r.terms.push_back(ExpPolyTerm{coeff, std::move(alpha), std::move(lambda)});
    return eps_normalize(r);
}

ExpPolySeq eps_normalize(ExpPolySeq raw) {
    for (const auto& t : raw.terms) {
        if ((long)t.alpha.size() != raw.arity || (long)t.lambda.size() != raw.arity)
            throw MahlerError("ExpPolySeq term arity mismatch");
        for (const auto& l : t.lambda)
            if (fe_is_zero(l)) throw MahlerError("ExpPolySeq lambda must be nonzero");
    }
    std::sort(raw.terms.begin(), raw.terms.end(),
              [](const ExpPolyTerm& x, const ExpPolyTerm& y) { return term_key_cmp(x, y) < 0; });
    std::vector<ExpPolyTerm> merged;
    for (auto& t : raw.terms) {
        if (!merged.empty() && term_key_cmp(merged.back(), t) == 0)
            merged.back().coeff = fe_add(merged.back().coeff, t.coeff);
        else
            merged.push_back(std::move(t));
    }
    raw.terms.clear();
    for (auto& t : merged)
        if (!fe_is_zero(t.coeff)) raw.terms.push_back(std::move(t));
    return raw;
}

ExpPolySeq eps_add(const ExpPolySeq& a, const ExpPolySeq& b) {
    if (a.arity != b.arity) throw MahlerError("ExpPolySeq arity mismatch");
    ExpPolySeq r = a;
    for (const auto& t : b.terms) r.terms.push_back(t);
    return eps_normalize(std::move(r));
}

ExpPolySeq eps_scale(const ExpPolySeq& a, const FieldElement& s) {
    if (fe_is_zero(s)) return ExpPolySeq::zero(a.field, a.arity);
    ExpPolySeq r = a;
    for (auto& t : r.terms) t.coeff = fe_mul(t.coeff, s);
    return r;
}

bool eps_equal(const ExpPolySeq& a, const ExpPolySeq& b) { return eps_cmp(a, b) == 0; }

int eps_cmp(const ExpPolySeq& a, const ExpPolySeq& b) {
    if (a.arity != b.arity) return a.arity < b.arity ? -1 : 1;
    if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        int c = term_key_cmp(a.terms[i], b.terms[i]);
        if (c != 0) return c;
        c = fe_cmp(a.terms[i].coeff, b.terms[i].coeff);
        if (c != 0) return c;
    }
    return 0;
}

ExpPolySeq eps_lift(const ExpPolySeq& a, const FieldPtr& target) {
    ExpPolySeq r{target, a.arity, {}};
    for (const auto& t : a.terms) {
        ExpPolyTerm nt;
        nt.coeff = lift_to(t.coeff, target);
        nt.alpha = t.alpha;
        for (const auto& l : t.lambda) nt.lambda.push_back(lift_to(l, target));
        r.terms.push_back(std::move(nt));
    }
    return eps_normalize(std::move(r));
}

std::string eps_to_string(const ExpPolySeq& a) {
    if (a.terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : a.terms) {
        if (!first) os << " + ";
        first = false;
        os << fe_to_string(t.coeff);
        for (long i = 0; i < a.arity; ++i) {
            if (t.alpha[(size_t)i] > 0) {
                os << "*k" << (i + 1);
                if (t.alpha[(size_t)i] > 1) os << "^" << t.alpha[(size_t)i];
            }
            if (!fe_is_one(t.lambda[(size_t)i]))
                os << "*(" << fe_to_string(t.lambda[(size_t)i]) << ")^k" << (i + 1);
        }
    }
    return os.str();
}

FieldElement eps_value_at(const ExpPolySeq& a, const std::vector<long>& k) {
    if ((long)k.size() != a.arity) throw MahlerError("eps_value_at index arity mismatch");
    FieldElement acc = fe_zero(a.field);
    for (const auto& t : a.terms) {
        FieldElement v = t.coeff;
        for (long i = 0; i < a.arity; ++i) {
            long ki = k[(size_t)i];
            if (ki < 0) throw MahlerError("eps_value_at negative index");
            if (t.alpha[(size_t)i] > 0)
                v = fe_mul(v, fe_pow(fe_from_int(a.field, ki), t.alpha[(size_t)i]));
            v = fe_mul(v, fe_pow(t.lambda[(size_t)i], ki));
        }
        acc = fe_add(acc, v);
    }
    return acc;
}

ExpPolySeq eps_slice(const ExpPolySeq& a, long pos, long v) {
    ExpPolySeq r{a.field, a.arity - 1, {}};
    for (const auto& t : a.terms) {
        FieldElement c = t.coeff;
        long al = t.alpha[(size_t)pos];
        if (al > 0) {
            if (v == 0) continue; // 0^alpha = 0 for alpha >= 1
            c = fe_mul(c, fe_pow(fe_from_int(a.field, v), al));
        }
        c = fe_mul(c, fe_pow(t.lambda[(size_t)pos], v));
        if (fe_is_zero(c)) continue;
        ExpPolyTerm nt;
        nt.coeff = c;
        for (long i = 0; i < a.arity; ++i) {
            if (i == pos) continue;
            nt.alpha.push_back(t.alpha[(size_t)i]);
            nt.lambda.push_back(t.lambda[(size_t)i]);
        }
        r.terms.push_back(std::move(nt));
    }
    return eps_normalize(std::move(r));
}

ExpPolySeq eps_shift(const ExpPolySeq& a, long pos, long delta) {
    if (delta != 1 && delta != -1) throw MahlerError("eps_shift delta must be +-1");
    ExpPolySeq r{a.field, a.arity, {}};
    for (const auto& t : a.terms) {
        long al = t.alpha[(size_t)pos];
        FieldElement lam = t.lambda[(size_t)pos];
        FieldElement scale = delta == 1 ? lam : fe_inv(lam);
        // (k + delta)^al expanded in powers of k
        for (long tdeg = 0; tdeg <= al; ++tdeg) {
            FieldElement coef = fe_mul(t.coeff, fe_mul(scale, fe_binomial(a.field, al, tdeg)));
            if (delta == -1 && (al - tdeg) % 2 == 1) coef = fe_neg(coef);
            if (fe_is_zero(coef)) continue;
            ExpPolyTerm nt = t;
            nt.coeff = coef;
            nt.alpha[(size_t)pos] = tdeg;
            r.terms.push_back(std::move(nt));
        }
    }
    return eps_normalize(std::move(r));
}

ExpPolySeq eps_prepend_geometric(const ExpPolySeq& a, const FieldElement& lambda0) {
    if (fe_is_zero(lambda0)) throw MahlerError("geometric ratio must be nonzero");
    ExpPolySeq r{a.field, a.arity + 1, {}};
    for (const auto& t : a.terms) {
        ExpPolyTerm nt;
        nt.coeff = t.coeff;
        nt.alpha.push_back(0);
        nt.lambda.push_back(lambda0);
        for (size_t i = 0; i < t.alpha.size(); ++i) {
            nt.alpha.push_back(t.alpha[i]);
            nt.lambda.push_back(t.lambda[i]);
        }
        r.terms.push_back(std::move(nt));
    }
    return eps_normalize(std::move(r));
}

ExpPolySeq seq_partial_sum(const ExpPolySeq& u, const FieldElement& theta) {
    if (u.arity < 1) throw MahlerError("seq_partial_sum needs arity >= 1");
    if (fe_is_zero(theta)) throw MahlerError("seq_partial_sum theta must be nonzero");
    const FieldPtr& F = u.field;
    unsigned long charp = F->characteristic();
    ExpPolySeq out{F, u.arity, {}};
    for (const auto& t : u.terms) {
        long al = t.alpha[0];
        FieldElement lam = t.lambda[0];
        auto push = [&](const FieldElement& coeff, long new_alpha0, const FieldElement& new_lambda0) {
            if (fe_is_zero(coeff)) return;
            ExpPolyTerm nt = t;
            nt.coeff = coeff;
            nt.alpha[0] = new_alpha0;
            nt.lambda[0] = new_lambda0;
            out.terms.push_back(std::move(nt));
        };
        if (fe_equal(lam, theta)) {
            // sum_{k=1}^{l-1} k^al = F(l), the Faulhaber polynomial
            if (charp != 0 && (unsigned long)(al + 1) >= charp)
                throw UnsupportedFieldError("partial sum unsupported in characteristic p");
            std::vector<FieldElement> f((size_t)(al + 2), fe_zero(F));
            for (long tt = al; tt >= 0; --tt) {
                // sum_{j > tt} f_j C(j, tt) = [tt == al]
                FieldElement rhs = tt == al ? fe_one(F) : fe_zero(F);
                for (long j = tt + 2; j <= al + 1; ++j)
                    rhs = fe_sub(rhs, fe_mul(f[(size_t)j], fe_binomial(F, j, tt)));
                f[(size_t)(tt + 1)] = fe_div(rhs, fe_from_int(F, tt + 1));
            }
            FieldElement f0 = fe_zero(F);
            for (long j = 1; j <= al + 1; ++j) f0 = fe_sub(f0, f[(size_t)j]);
            f[0] = f0;
            for (long j = 0; j <= al + 1; ++j) push(fe_mul(t.coeff, f[(size_t)j]), j, theta);
        } else {
            // sum_{k=1}^{l-1} k^al x^k = sum_t c_t l^t x^l + g, x = lam/theta != 1
            FieldElement x = fe_div(lam, theta);
            FieldElement xm1 = fe_sub(x, fe_one(F));
            std::vector<FieldElement> c((size_t)(al + 1), fe_zero(F));
            for (long tt = al; tt >= 0; --tt) {
                FieldElement rhs = tt == al ? fe_one(F) : fe_zero(F);
                for (long j = tt + 1; j <= al; ++j)
                    rhs = fe_sub(rhs, fe_mul(fe_mul(x, c[(size_t)j]), fe_binomial(F, j, tt)));
                c[(size_t)tt] = fe_div(rhs, xm1);
            }
            FieldElement g = fe_zero(F);
            for (long j = 0; j <= al; ++j) g = fe_add(g, c[(size_t)j]);
            g = fe_neg(fe_mul(x, g));
            // theta^l * (c_t l^t x^l) = c_t l^t lam^l ; theta^l * g stays with base theta
            for (long j = 0; j <= al; ++j) push(fe_mul(t.coeff, c[(size_t)j]), j, lam);
            push(fe_mul(t.coeff, g), 0, theta);
        }
    }
    return eps_normalize(std::move(out));
}

// ---------------------------------------------------------------------------
// HahnExpression
// ---------------------------------------------------------------------------

namespace {

int hterm_key_cmp(const HTerm& x, const HTerm& y) {
    if (x.gamma != y.gamma) return x.gamma < y.gamma ? -1 : 1;
    if (x.a.size() != y.a.size()) return x.a.size() < y.a.size() ? -1 : 1;
    for (size_t i = 0; i < x.a.size(); ++i)
        if (x.a[i] != y.a[i]) return x.a[i] < y.a[i] ? -1 : 1;
    return 0;
}

} // namespace

HahnExpression HahnExpression::zero(const FieldPtr& f, long p) { return HahnExpression{f, p, {}}; }

HahnExpression HahnExpression::monomial(const FieldElement& coeff, const Rational& gamma, long p) {
    HahnExpression r{coeff.field, p, {}};
    if (!fe_is_zero(coeff)) r.terms.push_back(HTerm{gamma, {}, ExpPolySeq::constant(coeff)});
    return r;
}

HahnExpression HahnExpression::xi(const ExpPolySeq& seq, std::vector<Rational> a, long p,
                                  const Rational& gamma) {
    if ((long)a.size() != seq.arity) throw MahlerError("xi tuple arity mismatch");
    for (const auto& ai : a)
        if (ai <= 0) throw MahlerError("xi tuple entries must be positive");
    HahnExpression r{seq.field, p, {}};
    if (!seq.is_zero()) r.terms.push_back(HTerm{gamma, std::move(a), seq});
    return r;
}

HahnExpression h_merge(HahnExpression raw) {
    std::sort(raw.terms.begin(), raw.terms.end(),
              [](const HTerm& x, const HTerm& y) { return hterm_key_cmp(x, y) < 0; });
    std::vector<HTerm> merged;
    for (auto& t : raw.terms) {
        if (t.seq.is_zero()) continue;
        if (!merged.empty() && hterm_key_cmp(merged.back(), t) == 0) {
            merged.back().seq = eps_add(merged.back().seq, t.seq);
            if (merged.back().seq.is_zero()) merged.pop_back();
        } else {
            merged.push_back(std::move(t));
        }
    }
    raw.terms = std::move(merged);
    return raw;
}

HahnExpression h_add(const HahnExpression& x, const HahnExpression& y) {
    HahnExpression r = x;
    for (const auto& t : y.terms) r.terms.push_back(t);
    return h_merge(std::move(r));
}

HahnExpression h_neg(const HahnExpression& x) { return h_scale(x, fe_from_int(x.field, -1)); }

HahnExpression h_sub(const HahnExpression& x, const HahnExpression& y) { return h_add(x, h_neg(y)); }

HahnExpression h_scale(const HahnExpression& x, const FieldElement& s) {
    if (fe_is_zero(s)) return HahnExpression::zero(x.field, x.p);
    HahnExpression r = x;
    for (auto& t : r.terms) t.seq = eps_scale(t.seq, s);
    return r;
}

HahnExpression h_mul_monomial(const HahnExpression& x, const FieldElement& s, const Rational& gamma) {
    HahnExpression r = h_scale(x, s);
    for (auto& t : r.terms) t.gamma += gamma;
    return h_merge(std::move(r));
}

HahnExpression h_mul_laurent(const HahnExpression& x, const LaurentPoly& l) {
    HahnExpression r = HahnExpression::zero(x.field, x.p);
    for (const auto& [e, c] : l.c) r = h_add(r, h_mul_monomial(x, c, Rational(e)));
    return r;
}

bool h_equal(const HahnExpression& x, const HahnExpression& y) {
    return normalize_xi(h_sub(x, y)).is_zero();
}

HahnExpression h_lift(const HahnExpression& x, const FieldPtr& target) {
    HahnExpression r{target, x.p, {}};
    for (const auto& t : x.terms) r.terms.push_back(HTerm{t.gamma, t.a, eps_lift(t.seq, target)});
    return r;
}

std::string h_to_string(const HahnExpression& x) {
    if (x.terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : x.terms) {
        if (!first) os << " + ";
        first = false;
        bool has_factor = false;
        if (t.gamma != 0) {
            os << "z^(" << rat_to_string(t.gamma) << ")";
            has_factor = true;
        }
        if (t.a.empty()) {
            std::string c = t.seq.is_zero() ? "0" : fe_to_string(t.seq.terms[0].coeff);
            os << (has_factor ? "*" : "") << (has_factor && c == "1" ? "" : c);
            if (has_factor && c != "1") os << "";
            if (!has_factor) os << "";
            if (has_factor && c == "1") continue;
            continue;
        }
        if (has_factor) os << "*";
        os << "xi{seq=" << eps_to_string(t.seq) << "; a=(";
        for (size_t i = 0; i < t.a.size(); ++i) os << (i ? "," : "") << rat_to_string(t.a[i]);
        os << ")}";
    }
    return os.str();
}

HahnExpression xi_phi(const HahnExpression& x) {
    HahnExpression r = HahnExpression::zero(x.field, x.p);
    for (const auto& t : x.terms) {
        if (t.a.empty()) {
            r.terms.push_back(HTerm{t.gamma * x.p, {}, t.seq});
            continue;
        }
        // slice k_1 = 1 gives z^{-a_1} xi over the tail; the rest reindexes
        ExpPolySeq sliced = eps_slice(t.seq, 0, 1);
        if (!sliced.is_zero()) {
            std::vector<Rational> tail(t.a.begin() + 1, t.a.end());
            r.terms.push_back(HTerm{t.gamma * x.p - t.a[0], std::move(tail), std::move(sliced)});
        }
        ExpPolySeq shifted = eps_shift(t.seq, 0, 1);
        if (!shifted.is_zero()) r.terms.push_back(HTerm{t.gamma * x.p, t.a, std::move(shifted)});
    }
    return h_merge(std::move(r));
}

namespace {

bool den_coprime_to_p(const Rational& a, long p) {
    return gcd(a.get_den(), Integer(p)) == 1;
}

bool num_divisible_by_p(const Rational& a, long p) {
    return divisible(a.get_num(), Integer(p));
}

} // namespace

HahnExpression normalize_xi(const HahnExpression& x) {
    long p = x.p;
    std::vector<HTerm> work(x.terms.begin(), x.terms.end());
    std::vector<HTerm> done;
    size_t guard = 0;
    while (!work.empty()) {
        if (++guard > 200000) throw MahlerError("normalize_xi failed to terminate");
        HTerm t = std::move(work.back());
        work.pop_back();
        if (t.seq.is_zero()) continue;
        long s = (long)t.a.size();
        bool rewritten = false;
        for (long i = 0; i < s && !rewritten; ++i) {
            if (!den_coprime_to_p(t.a[(size_t)i], p)) {
                // clear one p-factor from the denominator by extending the sum
                HTerm main = t;
                for (long j = i; j < s; ++j) main.a[(size_t)j] = t.a[(size_t)j] * p;
                main.seq = eps_shift(t.seq, i, -1);
                work.push_back(std::move(main));
                // boundary k_i = 0, subtracted
                HTerm bd;
                bd.seq = eps_scale(eps_slice(t.seq, i, 0), fe_from_int(x.field, -1));
                if (!bd.seq.is_zero()) {
                    bd.gamma = t.gamma;
                    for (long j = 0; j < s; ++j) {
                        if (j == i) continue;
                        bd.a.push_back(t.a[(size_t)j]);
                    }
                    if (i == 0)
                        bd.gamma -= t.a[0];
                    else
                        bd.a[(size_t)(i - 1)] += t.a[(size_t)i];
                    work.push_back(std::move(bd));
                }
                rewritten = true;
            } else if (num_divisible_by_p(t.a[(size_t)i], p)) {
                // extract one p-factor from the numerator by shifting the sum
                Rational b = t.a[(size_t)i] / p;
                HTerm main = t;
                main.a[(size_t)i] = b;
                for (long j = i + 1; j < s; ++j) main.a[(size_t)j] = t.a[(size_t)j] / p;
                main.seq = eps_shift(t.seq, i, 1);
                work.push_back(std::move(main));
                // boundary k_i = 1, added
                HTerm bd;
                bd.seq = eps_slice(t.seq, i, 1);
                if (!bd.seq.is_zero()) {
                    bd.gamma = t.gamma;
                    for (long j = 0; j < s; ++j) {
                        if (j == i) continue;
                        bd.a.push_back(j < i ? t.a[(size_t)j] : t.a[(size_t)j] / p);
                    }
                    if (i == 0)
                        bd.gamma -= b;
                    else
                        bd.a[(size_t)(i - 1)] += b;
                    work.push_back(std::move(bd));
                }
                rewritten = true;
            }
        }
        if (!rewritten) done.push_back(std::move(t));
    }
    HahnExpression r{x.field, p, std::move(done)};
    return h_merge(std::move(r));
}

HahnExpression h_ramify(const HahnExpression& x, long d) {
    if (d <= 0) throw MahlerError("ramification index must be positive");
    HahnExpression r = x;
    for (auto& t : r.terms) {
        t.gamma /= d;
        for (auto& ai : t.a) ai /= d;
    }
    return normalize_xi(r);
}

namespace {

void coeff_dfs(const HTerm& t, const std::vector<Rational>& tails, long p, size_t i, Rational g,
               std::vector<long>& ks, FieldElement& acc) {
    size_t s = t.a.size();
    if (i == s) {
        if (g == 0) acc = fe_add(acc, eps_value_at(t.seq, ks));
        return;
    }
    if (g >= 0) return;
    Rational pk = 1;
    for (long k = 1;; ++k) {
        pk *= p;
        Rational g2 = g * pk + t.a[i];
        if (g2 > 0) continue; // this k gives exponents below the target
        if (i + 1 == s) {
            if (g2 == 0) {
                ks.push_back(k);
                coeff_dfs(t, tails, p, i + 1, g2, ks, acc);
                ks.pop_back();
            }
            break; // g2 only decreases with k
        }
        if (g2 <= -tails[i]) break;
        ks.push_back(k);
        coeff_dfs(t, tails, p, i + 1, g2, ks, acc);
        ks.pop_back();
    }
}

} // namespace

FieldElement coefficient_at(const HahnExpression& x, const Rational& gamma) {
    if (gamma > 0) throw MahlerError("coefficient_at expects gamma <= 0");
    FieldElement acc = fe_zero(x.field);
    for (const auto& t : x.terms) {
        Rational g = gamma - t.gamma;
        if (t.a.empty()) {
            if (g == 0 && !t.seq.is_zero()) acc = fe_add(acc, t.seq.terms[0].coeff);
            continue;
        }
        // tails[i] = a_{i+1} + ... + a_{s-1}
        std::vector<Rational> tails(t.a.size(), Rational(0));
        for (size_t i = t.a.size(); i-- > 1;) tails[i - 1] = tails[i] + t.a[i];
        std::vector<long> ks;
        coeff_dfs(t, tails, x.p, 0, g, ks, acc);
    }
    return acc;
}

HahnExpression solve_basic(const FieldElement& kappa, const FieldElement& eta, const HTerm& rhs,
                           long p) {
    if (fe_is_zero(kappa) || fe_is_zero(eta)) throw MahlerError("solve_basic needs nonzero kappa, eta");
    const FieldPtr& F = kappa.field;
    if (rhs.seq.is_zero()) return HahnExpression::zero(F, p);
    FieldElement ratio = fe_div(eta, kappa);
    FieldElement inv_eta = fe_inv(eta);
    if (rhs.gamma < 0) {
        // kappa h(z^p) - eta h(z) = z^{-gamma} xi_(u,a): prepend a geometric index
        std::vector<Rational> a;
        a.push_back(-rhs.gamma);
        for (const auto& ai : rhs.a) a.push_back(ai);
        ExpPolySeq v = eps_scale(eps_prepend_geometric(rhs.seq, ratio), inv_eta);
        return HahnExpression::xi(v, std::move(a), p);
    }
    if (rhs.gamma == 0 && !rhs.a.empty()) {
        ExpPolySeq v = eps_scale(seq_partial_sum(rhs.seq, ratio), inv_eta);
        return HahnExpression::xi(v, rhs.a, p);
    }
    throw MahlerError("solve_basic: right-hand side has no solution of the assumed support");
}

Mat<HahnExpression> compute_H(const Mat<LaurentPoly>& theta, long p) {
    long m = theta.rows();
    const FieldPtr& F = theta.at(0, 0).field;
    std::vector<FieldElement> diag;
    for (long i = 0; i < m; ++i) {
        const LaurentPoly& d = theta.at(i, i);
        for (const auto& [e, v] : d.c)
            if (e != 0) throw MahlerError("compute_H: diagonal entries must be constant");
        FieldElement cv = d.constant_term();
        if (fe_is_zero(cv)) throw MahlerError("compute_H: zero diagonal entry");
        diag.push_back(cv);
        for (long j = 0; j < i; ++j)
            if (!theta.at(i, j).is_zero()) throw MahlerError("compute_H: theta not upper triangular");
    }
    Mat<HahnExpression> H(m, m, HahnExpression::zero(F, p));
    for (long i = 0; i < m; ++i) H.at(i, i) = HahnExpression::monomial(fe_one(F), 0, p);

    // scan (i,j) left to right and bottom to top within each column
    for (long j = 1; j < m; ++j) {
        for (long i = j - 1; i >= 0; --i) {
            HahnExpression rhs = HahnExpression::zero(F, p);
            for (long k = i + 1; k <= j - 1; ++k)
                rhs = h_add(rhs, h_mul_laurent(H.at(k, j), theta.at(i, k)));
            {
                LaurentPoly tij = theta.at(i, j);
                tij.c.erase(0); // subtract the constant term c_{i,j}
                for (const auto& [e, v] : tij.c)
                    rhs = h_add(rhs, HahnExpression::monomial(v, Rational(e), p));
            }
            for (long l = i + 1; l <= j - 1; ++l) {
                FieldElement clj = theta.at(l, j).constant_term();
                if (fe_is_zero(clj)) continue;
                rhs = h_sub(rhs, h_scale(xi_phi(H.at(i, l)), clj));
            }
            rhs = normalize_xi(rhs);
            HahnExpression h = HahnExpression::zero(F, p);
            for (const auto& t : rhs.terms) {
                if (t.gamma > 0 || (t.gamma == 0 && t.a.empty()))
                    throw MahlerError("compute_H: nonnegative support in RHS");
                h = h_add(h, solve_basic(diag[(size_t)j], diag[(size_t)i], t, p));
            }
            H.at(i, j) = normalize_xi(h);
        }
    }
    // phi_p(H) C = Theta H must hold as an exact symbolic identity
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) {
            HahnExpression lhs = HahnExpression::zero(F, p);
            for (long k = 0; k < m; ++k) {
                FieldElement ckj = theta.at(k, j).constant_term();
                if (fe_is_zero(ckj)) continue;
                lhs = h_add(lhs, h_scale(xi_phi(H.at(i, k)), ckj));
            }
            HahnExpression rhs = HahnExpression::zero(F, p);
            for (long k = 0; k < m; ++k) rhs = h_add(rhs, h_mul_laurent(H.at(k, j), theta.at(i, k)));
            if (!h_equal(lhs, rhs)) throw MahlerError("compute_H: phi(H) C != Theta H");
        }
    return H;
}

} // namespace mahler
