#pragma once

#include "mahler/series.hpp"

namespace mahler {

/// a_0 y + a_1 y(z^p) + ... + a_m y(z^{p^m}) = 0 with a_0 a_m != 0.
class MahlerEquation {
public:
    long p = 2;
    FieldPtr field;
    std::vector<RationalFunction> coeffs; // a_0 ... a_m

    long order() const { return (long)coeffs.size() - 1; }

    /// Validating constructor for solver input.
    static MahlerEquation make(long p, const FieldPtr& f, std::vector<RationalFunction> coeffs);
    /// Relaxed variant for derived annihilators (a_0 may vanish).
    static MahlerEquation make_relaxed(long p, const FieldPtr& f, std::vector<RationalFunction> coeffs);

    MahlerEquation substitute_power(long d) const;
};

/// phi_p(Y) = A Y with A invertible over K(z).
class MahlerSystem {
public:
    long p = 2;
    FieldPtr field;
    RFMat A;
    bool companion = false;

    long size() const { return A.rows(); }

    static MahlerSystem make(long p, const FieldPtr& f, RFMat A, bool companion = false);

    MahlerSystem substitute_power(long d) const;
};

MahlerSystem build_companion(const MahlerEquation& eq);

/// Finite slopes of the Newton polygon (lower hull of {(p^i, val a_i)}),
/// ascending, duplicates collapsed.
std::vector<Rational> newton_slopes(const MahlerEquation& eq);

/// Least d coprime to p with every slope in d^{-1} Z[p^{-1}].
long ramification_index(const std::vector<Rational>& slopes, long p);

} // namespace mahler
