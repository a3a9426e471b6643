#include "mahler/subspace.hpp"

#include <algorithm>

namespace mahler {

Subspace Subspace::zero(const FieldPtr& f, long ambient) {
    return Subspace(f, ambient, FMat(0, ambient, fe_zero(f)), {});
}

Subspace Subspace::full(const FieldPtr& f, long ambient) {
    std::vector<long> piv(ambient);
    for (long i = 0; i < ambient; ++i) piv[i] = i;
    return Subspace(f, ambient, fmat_identity(f, ambient), piv);
}

Subspace Subspace::from_rows(const FieldPtr& f, const FMat& rows) {
    if (rows.rows() == 0) return zero(f, rows.cols());
    auto [R, piv] = rref(rows);
    return Subspace(f, rows.cols(), R, piv);
}

Subspace Subspace::coordinate_span(const FieldPtr& f, long ambient, long lo, long hi) {
    long n = std::max(0l, hi - lo);
    FMat b(n, ambient, fe_zero(f));
    std::vector<long> piv;
    for (long i = 0; i < n; ++i) {
        b.at(i, lo + i) = fe_one(f);
        piv.push_back(lo + i);
    }
    return Subspace(f, ambient, b, piv);
}

bool Subspace::contains(const std::vector<FieldElement>& v) const {
    std::vector<FieldElement> r = v;
    for (long i = 0; i < basis_.rows(); ++i) {
        FieldElement c = r[(size_t)pivots_[(size_t)i]]; // copy: the loop rewrites r
        if (fe_is_zero(c)) continue;
        for (long j = 0; j < ambient_; ++j) r[(size_t)j] = fe_sub(r[(size_t)j], fe_mul(c, basis_.at(i, j)));
    }
    for (const auto& x : r)
        if (!fe_is_zero(x)) return false;
    return true;
}

bool Subspace::contains(const Subspace& other) const {
    for (long i = 0; i < other.basis_.rows(); ++i) {
        std::vector<FieldElement> v;
        for (long j = 0; j < ambient_; ++j) v.push_back(other.basis_.at(i, j));
        if (!contains(v)) return false;
    }
    return true;
}

bool Subspace::equals(const Subspace& other) const {
    return ambient_ == other.ambient_ && fmat_equal(basis_, other.basis_);
}

FMat Subspace::constraints() const {
    std::vector<long> free_cols;
    {
        size_t pi = 0;
        for (long c = 0; c < ambient_; ++c) {
            if (pi < pivots_.size() && pivots_[pi] == c) {
                ++pi;
                continue;
            }
            free_cols.push_back(c);
        }
    }
    FMat e((long)free_cols.size(), ambient_, fe_zero(field_));
    for (size_t k = 0; k < free_cols.size(); ++k) {
        e.at((long)k, free_cols[k]) = fe_one(field_);
        for (size_t r = 0; r < pivots_.size(); ++r)
            e.at((long)k, pivots_[r]) = fe_neg(basis_.at((long)r, free_cols[k]));
    }
    return e;
}

Subspace subspace_sum(const Subspace& u, const Subspace& w) {
    if (u.ambient() != w.ambient()) throw MahlerError("subspace ambient mismatch");
    FMat stacked = vstack(u.basis(), w.basis(), fe_zero(u.field()));
    return Subspace::from_rows(u.field(), stacked);
}

Subspace subspace_intersect(const Subspace& u, const Subspace& w) {
    if (u.ambient() != w.ambient()) throw MahlerError("subspace ambient mismatch");
    FMat e = vstack(u.constraints(), w.constraints(), fe_zero(u.field()));
    if (e.rows() == 0) return Subspace::full(u.field(), u.ambient());
    FMat k = kernel(u.field(), e);
    return Subspace::from_rows(u.field(), k);
}

Subspace preimage(const FMat& m, const Subspace& w) {
    if (m.cols() != w.ambient() || m.rows() != w.ambient())
        throw MahlerError("preimage dimension mismatch");
    FMat e = w.constraints();
    if (e.rows() == 0) return Subspace::full(w.field(), w.ambient());
    FMat em = fmat_mul(e, m);
    FMat k = kernel(w.field(), em);
    return Subspace::from_rows(w.field(), k);
}

Subspace image(const FMat& m, const Subspace& x) {
    // rows of basis * m^T are the images of the basis vectors
    FMat imgs = fmat_mul(x.basis(), m.transpose());
    return Subspace::from_rows(x.field(), imgs);
}

Subspace complement(const Subspace& inner, const Subspace& outer) {
    if (!outer.contains(inner)) throw MahlerError("complement: inner not contained in outer");
    std::vector<long> keep;
    for (size_t r = 0; r < outer.pivots().size(); ++r) {
        long p = outer.pivots()[r];
        if (std::find(inner.pivots().begin(), inner.pivots().end(), p) == inner.pivots().end())
            keep.push_back((long)r);
    }
    FMat rows((long)keep.size(), outer.ambient(), fe_zero(outer.field()));
    std::vector<long> piv;
    for (size_t k = 0; k < keep.size(); ++k) {
        for (long j = 0; j < outer.ambient(); ++j) rows.at((long)k, j) = outer.basis().at(keep[k], j);
        piv.push_back(outer.pivots()[(size_t)keep[k]]);
    }
    // a subset of RREF rows is again an RREF basis
    return Subspace(outer.field(), outer.ambient(), rows, piv);
}

std::optional<FMat> solve_in_span(const FMat& targets, const FMat& generators) {
    if (targets.rows() != generators.rows()) throw MahlerError("solve_in_span row mismatch");
    FieldPtr f;
    if (!generators.empty())
        f = generators.at(0, 0).field;
    else if (!targets.empty())
        f = targets.at(0, 0).field;
    else
        throw MahlerError("solve_in_span on empty matrices");
    FMat x(generators.cols(), targets.cols(), fe_zero(f));
    for (long j = 0; j < targets.cols(); ++j) {
        std::vector<FieldElement> b;
        for (long i = 0; i < targets.rows(); ++i) b.push_back(targets.at(i, j));
        auto sol = solve_linear(generators, b);
        if (!sol) return std::nullopt;
        for (long i = 0; i < generators.cols(); ++i) x.at(i, j) = (*sol)[(size_t)i];
    }
    return x;
}

} // namespace mahler
