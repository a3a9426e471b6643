#pragma once

#include "mahler/newton.hpp"
#include "mahler/subspace.hpp"

namespace mahler {

struct WindowParams {
    long m = 0, p = 2;
    long val_A = 0, val_Ainv = 0, val_detA = 0;
    long nuP = 0, nuTheta = 0, nu = 0, mu = 0;
    long N = 0;                  // m * (mu - nu + 1)
    std::vector<long> Sp_window; // S'_p = S_p cap [nuTheta, 0], ascending
};

/// Window data derived from a system with d(A) = 1: the valuation parameters,
/// cached Laurent coefficients B_k of A^{-1}, and the window matrices M_l.
class WindowContext {
public:
    explicit WindowContext(MahlerSystem sys);

    const MahlerSystem sys;
    const WindowParams wp;

    /// Coefficient of z^k in A^{-1}.
    FMat B(long k) const;

    /// M_l for l in S'_p.
    const FMat& Ml(long l) const;

    Subspace V0() const;

private:
    RFMat ainv_;
    mutable Mat<PuiseuxTruncation> ainv_series_;
    mutable long expanded_to_;
    mutable std::map<long, FMat> ml_cache_;
    void ensure_expanded(long order) const;
};

WindowParams window_params(const MahlerSystem& sys);

/// Dense N x N matrix of the map pi(f) -> pi(z^l A^{-1}(z) f(z^p)), zero on
/// the complement of V_0.
FMat build_Ml(const WindowContext& ctx, long l);

struct AdmissiblePair {
    long p = 2;
    FieldPtr field;
    WindowParams wp;
    long r = 0;
    std::vector<long> b;                              // block sizes b_1..b_r
    std::vector<FMat> theta_diag;                     // constant invertible blocks
    std::map<std::tuple<long, long, long>, FMat> theta_off; // (i, j, l) -> b_i x b_j
    std::vector<std::map<long, FMat>> Q;              // per block: n -> m x b_j coefficient
    long order = 0;                                   // coefficients known through z^order

    Mat<LaurentPoly> theta() const;
    Mat<PuiseuxTruncation> P() const;                 // ramification 1, guaranteed order `order`
};

/// Algorithm: nested fixpoint construction of the spaces X_j / U_j / F_{j,l},
/// canonical block bases, Theta blocks and the window truncation of P.
AdmissiblePair admissible_pair(const WindowContext& ctx);

/// Extends the stored coefficients of P through z^order using the block
/// recurrence; no-op when order <= pair.order.
void extend_P(const WindowContext& ctx, AdmissiblePair& pair, long order);

struct AdmissibleReport {
    bool ok = true;
    std::string first_violation;
    Rational verified_order = 0;
};

/// Verifies every admissible-pair invariant up to the guaranteed order of P.
AdmissibleReport check_admissible(const MahlerSystem& sys, const Mat<PuiseuxTruncation>& P,
                                  const Mat<LaurentPoly>& theta, const std::vector<long>& block_sizes);

} // namespace mahler
