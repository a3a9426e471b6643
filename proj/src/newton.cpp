#include "mahler/newton.hpp"

namespace mahler {

MahlerEquation MahlerEquation::make(long p, const FieldPtr& f, std::vector<RationalFunction> coeffs) {
    if (p < 2) throw InputError("radix p must be >= 2");
    if (coeffs.size() < 2) throw InputError("Mahler equation needs order >= 1");
    if (coeffs.front().is_zero()) throw InputError("a_0 = 0");
    if (coeffs.back().is_zero()) throw InputError("a_m = 0");
    return MahlerEquation{p, f, std::move(coeffs)};
}

MahlerEquation MahlerEquation::make_relaxed(long p, const FieldPtr& f,
                                            std::vector<RationalFunction> coeffs) {
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
    if (coeffs.empty()) throw InputError("zero equation");
    return MahlerEquation{p, f, std::move(coeffs)};
}

MahlerEquation MahlerEquation::substitute_power(long d) const {
    MahlerEquation r = *this;
    for (auto& c : r.coeffs) c = rf_substitute_power(c, d);
    return r;
}

MahlerSystem MahlerSystem::make(long p, const FieldPtr& f, RFMat A, bool companion) {
    if (p < 2) throw InputError("radix p must be >= 2");
    if (A.rows() != A.cols() || A.rows() == 0) throw InputError("system matrix must be square");
    if (rfmat_det(A).is_zero()) throw InputError("singular system matrix");
    return MahlerSystem{p, f, std::move(A), companion};
}

MahlerSystem MahlerSystem::substitute_power(long d) const {
    MahlerSystem r = *this;
    r.A = rfmat_substitute_power(r.A, d);
    return r;
}

MahlerSystem build_companion(const MahlerEquation& eq) {
    long m = eq.order();
    RFMat A = rfmat_zero(eq.field, m, m);
    for (long i = 0; i + 1 < m; ++i) A.at(i, i + 1) = RationalFunction::one(eq.field);
    for (long j = 0; j < m; ++j) A.at(m - 1, j) = -(eq.coeffs[(size_t)j] / eq.coeffs[(size_t)m]);
    return MahlerSystem::make(eq.p, eq.field, std::move(A), true);
}

std::vector<Rational> newton_slopes(const MahlerEquation& eq) {
    // points (p^i, val a_i) for nonzero a_i; lower convex hull, left to right
    std::vector<std::pair<Integer, Rational>> pts;
    Integer x = 1;
    for (size_t i = 0; i < eq.coeffs.size(); ++i, x *= eq.p)
        if (!eq.coeffs[i].is_zero()) pts.push_back({x, Rational(eq.coeffs[i].val())});
    std::vector<std::pair<Integer, Rational>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // keep b only if it lies strictly below segment a-pt
            Rational lhs = (b.second - a.second) * Rational(pt.first - a.first);
            Rational rhs = (pt.second - a.second) * Rational(b.first - a.first);
            if (lhs < rhs) break;
            hull.pop_back();
        }
        hull.push_back(pt);
    }
    std::vector<Rational> slopes;
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        Rational s = (hull[i + 1].second - hull[i].second) / Rational(hull[i + 1].first - hull[i].first);
        if (slopes.empty() || slopes.back() != s) slopes.push_back(s);
    }
    return slopes;
}

long ramification_index(const std::vector<Rational>& slopes, long p) {
    Integer d = 1;
    for (const Rational& s : slopes) {
        Integer b = s.get_den();
        while (divisible(b, Integer(p))) b /= p;
        d = lcm(d, b);
    }
    return to_long(d);
}

} // namespace mahler
