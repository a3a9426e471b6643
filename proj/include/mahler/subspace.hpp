#pragma once

#include "mahler/matrix.hpp"

namespace mahler {

/// Finite-dimensional subspace of K^N in canonical reduced-row-echelon basis
/// form: one basis vector per row, strictly increasing pivot columns, pivots 1,
/// no zero rows. Two subspaces are equal iff their basis matrices coincide.
class Subspace {
public:
    Subspace(FieldPtr field, long ambient, FMat rref_basis, std::vector<long> pivots)
        : field_(std::move(field)), ambient_(ambient), basis_(std::move(rref_basis)),
          pivots_(std::move(pivots)) {}

    static Subspace zero(const FieldPtr& f, long ambient);
    static Subspace full(const FieldPtr& f, long ambient);
    static Subspace from_rows(const FieldPtr& f, const FMat& rows);
    /// span{e_lo, ..., e_{hi-1}} of standard basis vectors.
    static Subspace coordinate_span(const FieldPtr& f, long ambient, long lo, long hi);

    long dim() const { return basis_.rows(); }
    long ambient() const { return ambient_; }
    const FieldPtr& field() const { return field_; }
    const FMat& basis() const { return basis_; }
    const std::vector<long>& pivots() const { return pivots_; }

    bool contains(const std::vector<FieldElement>& v) const;
    bool contains(const Subspace& other) const;
    bool equals(const Subspace& other) const;

    /// Rows E with this = {x : E x = 0}; one row per non-pivot column.
    FMat constraints() const;

private:
    FieldPtr field_;
    long ambient_;
    FMat basis_;
    std::vector<long> pivots_;
};

Subspace subspace_sum(const Subspace& u, const Subspace& w);
Subspace subspace_intersect(const Subspace& u, const Subspace& w);

/// {v : M v in W}.
Subspace preimage(const FMat& m, const Subspace& w);

/// span{M v : v in X}.
Subspace image(const FMat& m, const Subspace& x);

/// Deterministic complement: the RREF basis rows of `outer` whose pivot
/// columns are not pivot columns of `inner` span the returned space.
Subspace complement(const Subspace& inner, const Subspace& outer);

/// X with generators * X = targets (columns solved independently, free
/// variables zero); nullopt when some target column is outside the span.
std::optional<FMat> solve_in_span(const FMat& targets, const FMat& generators);

} // namespace mahler
