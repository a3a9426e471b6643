#pragma once

#include "mahler/constants.hpp"
#include "mahler/hahn.hpp"
#include "mahler/window.hpp"

namespace mahler {

/// Grouping key of one summand f(z) xi_omega e_c l^[j]; the sequence is
/// unit-normalized (its first canonical term has coefficient 1) so equal Hahn
/// factors share a key.
struct SolutionKey {
    FieldElement c;
    long j = 0;
    std::vector<Rational> a;
    ExpPolySeq seq;
};

int solution_key_cmp(const SolutionKey& x, const SolutionKey& y);

/// y = sum over keys of f_key(z) xi_omega e_c l^[j] with shared ramification d.
struct SolutionExpression {
    FieldPtr field;
    long p = 2;
    long d = 1;
    std::vector<std::pair<SolutionKey, PuiseuxTruncation>> terms; // canonically ordered
};

struct GaugeResult {
    FieldPtr field; // possibly extended
    FMat Q, Qinv;
    Mat<LaurentPoly> theta; // Q Theta Q^{-1}, upper triangular
};

/// Constant gauge bringing a block-upper-triangular Theta (constant diagonal
/// blocks) to upper triangular form; diagonalizes each block when possible,
/// Schur-style deflation otherwise. Eigenvalues are ordered canonically.
GaugeResult triangularize_theta(const Mat<LaurentPoly>& theta, const std::vector<long>& block_sizes);

/// Fundamental matrix P H e_C of a system with d(A) = 1 (caller-asserted),
/// entries grouped as solution expressions, plus the factors themselves.
struct FundamentalMatrix {
    FieldPtr field;
    long p = 2;
    long m = 0;
    long n = 0; // guaranteed coefficient order
    Mat<SolutionExpression> W;

    AdmissiblePair pair;             // over the base field, before the gauge
    FMat gaugeQ, gaugeQinv;          // over `field`
    Mat<PuiseuxTruncation> P_gauged; // P-bar Q^{-1}, ramification 1
    Mat<LaurentPoly> theta_tri;
    Mat<HahnExpression> H;
    CMat eC;
};

/// Window construction, gauge, H and e_C for a system with d(A) = 1,
/// assembled into the fundamental matrix with coefficients through z^n.
FundamentalMatrix solve_system(const MahlerSystem& sys, long n);

struct BasisResult {
    FieldPtr field; // final field (after all extensions)
    long p = 2;
    long m = 0;
    long d = 1;
    long v = 0;
    long j0 = 0;
    long n = 0; // requested truncation order
    std::vector<SolutionExpression> solutions;
    std::vector<FieldElement> K0;
    std::vector<std::pair<std::vector<Rational>, ExpPolySeq>> Omega1;

    // provenance
    AdmissiblePair pair;            // over the base field, before the gauge
    FMat gaugeQ, gaugeQinv;         // over `field`
    Mat<PuiseuxTruncation> P_gauged; // P-bar Q^{-1}, ramification 1, order d*n
    Mat<LaurentPoly> theta_tri;
    Mat<HahnExpression> H;          // before the z -> z^{1/d} substitution
    CMat eC;
};

/// Full pipeline: companion matrix, d(A), z -> z^d, window construction,
/// coefficient extension to order d*n, gauge, H, e_C, and the assembled first
/// row of P(z^{1/d}) H(z^{1/d}) e_C.
BasisResult solve_equation(const MahlerEquation& eq, long n);

struct VerifySolutionReport {
    bool ok = true;
    Rational verified_order = 0;
    std::string first_failure;
};

struct VerifyReport {
    bool ok = true;
    std::vector<VerifySolutionReport> per_solution;
};

/// Applies the equation's operator symbolically to every solution and checks
/// that each grouped Puiseux coefficient vanishes up to its guaranteed order.
VerifyReport verify_basis(const MahlerEquation& eq, const BasisResult& res);

/// A p-Mahler equation annihilating the (i, j) entry of P (0-based indices),
/// found incrementally through left kernels of the iterated gauge identity.
MahlerEquation entry_equation(const AdmissiblePair& pair, const MahlerSystem& sys, long i, long j,
                              long kmax = -1);

/// phi_p applied to a solution expression.
SolutionExpression solution_phi(const SolutionExpression& s);

/// Multiplies every Puiseux coefficient by a rational function (expanded as
/// far as the truncation orders require, or to fallback_order for exact terms).
SolutionExpression solution_mul_rf(const SolutionExpression& s, const RationalFunction& rf,
                                   long fallback_order);

SolutionExpression solution_add(const SolutionExpression& x, const SolutionExpression& y);

} // namespace mahler
