#include "mahler/matrix.hpp"

#include <sstream>

namespace mahler {

FMat fmat_zero(const FieldPtr& f, long r, long c) { return FMat(r, c, fe_zero(f)); }

FMat fmat_identity(const FieldPtr& f, long n) {
    FMat m(n, n, fe_zero(f));
    for (long i = 0; i < n; ++i) m.at(i, i) = fe_one(f);
    return m;
}

FMat fmat_mul(const FMat& a, const FMat& b) {
    if (a.cols() != b.rows()) throw MahlerError("matrix dimension mismatch");
    FieldPtr f = a.empty() ? (b.empty() ? nullptr : b.at(0, 0).field) : a.at(0, 0).field;
    if (!f) throw MahlerError("cannot multiply fully empty matrices");
    FMat r(a.rows(), b.cols(), fe_zero(f));
    for (long i = 0; i < a.rows(); ++i)
        for (long k = 0; k < a.cols(); ++k) {
            if (fe_is_zero(a.at(i, k))) continue;
            for (long j = 0; j < b.cols(); ++j)
                r.at(i, j) = fe_add(r.at(i, j), fe_mul(a.at(i, k), b.at(k, j)));
        }
    return r;
}

FMat fmat_scale(const FMat& a, const FieldElement& s) {
    return a.map([&](const FieldElement& x) { return fe_mul(x, s); });
}

bool fmat_equal(const FMat& a, const FMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            if (!fe_equal(a.at(i, j), b.at(i, j))) return false;
    return true;
}

bool fmat_is_zero(const FMat& a) {
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            if (!fe_is_zero(a.at(i, j))) return false;
    return true;
}

FMat fmat_lift(const FMat& a, const FieldPtr& target) {
    return a.map([&](const FieldElement& x) { return lift_to(x, target); });
}

std::string fmat_to_string(const FMat& a) {
    std::ostringstream os;
    os << "[";
    for (long i = 0; i < a.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (long j = 0; j < a.cols(); ++j) os << (j ? ", " : "") << fe_to_string(a.at(i, j));
        os << "]";
    }
    os << "]";
    return os.str();
}

RrefResult rref(const FMat& m) {
    FMat r = m;
    std::vector<long> pivots;
    long row = 0;
    for (long col = 0; col < r.cols() && row < r.rows(); ++col) {
        long sel = -1;
        for (long i = row; i < r.rows(); ++i)
            if (!fe_is_zero(r.at(i, col))) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != row)
            for (long j = 0; j < r.cols(); ++j) std::swap(r.at(sel, j), r.at(row, j));
        FieldElement inv = fe_inv(r.at(row, col));
        for (long j = col; j < r.cols(); ++j) r.at(row, j) = fe_mul(r.at(row, j), inv);
        for (long i = 0; i < r.rows(); ++i) {
            if (i == row || fe_is_zero(r.at(i, col))) continue;
            FieldElement factor = r.at(i, col);
            for (long j = col; j < r.cols(); ++j)
                r.at(i, j) = fe_sub(r.at(i, j), fe_mul(factor, r.at(row, j)));
        }
        pivots.push_back(col);
        ++row;
    }
    // drop zero rows
    FMat out(row, r.cols(), row && r.cols() ? fe_zero(m.at(0, 0).field) : FieldElement{});
    if (row && r.cols())
        for (long i = 0; i < row; ++i)
            for (long j = 0; j < r.cols(); ++j) out.at(i, j) = r.at(i, j);
    return RrefResult{out, pivots};
}

FMat kernel(const FieldPtr& f, const FMat& m) {
    auto [R, pivots] = rref(m);
    std::vector<long> free_cols;
    {
        size_t pi = 0;
        for (long c = 0; c < m.cols(); ++c) {
            if (pi < pivots.size() && pivots[pi] == c) {
                ++pi;
                continue;
            }
            free_cols.push_back(c);
        }
    }
    FMat K((long)free_cols.size(), m.cols(), fe_zero(f));
    for (size_t k = 0; k < free_cols.size(); ++k) {
        long fc = free_cols[k];
        K.at((long)k, fc) = fe_one(f);
        for (size_t r = 0; r < pivots.size(); ++r)
            K.at((long)k, pivots[r]) = fe_neg(R.at((long)r, fc));
    }
    return K;
}

std::optional<std::vector<FieldElement>> solve_linear(const FMat& m, const std::vector<FieldElement>& b) {
    FieldPtr f = m.empty() ? b.at(0).field : m.at(0, 0).field;
    FMat aug(m.rows(), m.cols() + 1, fe_zero(f));
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols()) = b[(size_t)i];
    }
    auto [R, pivots] = rref(aug);
    std::vector<FieldElement> x((size_t)m.cols(), fe_zero(f));
    for (size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == m.cols()) return std::nullopt; // pivot in the augmented column
        x[(size_t)pivots[r]] = R.at((long)r, m.cols());
    }
    return x;
}

FMat inverse(const FMat& m) {
    if (m.rows() != m.cols()) throw MahlerError("inverse of non-square matrix");
    FieldPtr f = m.at(0, 0).field;
    long n = m.rows();
    FMat aug = hstack(m, fmat_identity(f, n), fe_zero(f));
    auto [R, pivots] = rref(aug);
    if ((long)pivots.size() != n || pivots.back() != n - 1) throw MahlerError("singular matrix");
    FMat inv(n, n, fe_zero(f));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) inv.at(i, j) = R.at(i, n + j);
    return inv;
}

FieldElement det(const FMat& m) {
    if (m.rows() != m.cols()) throw MahlerError("det of non-square matrix");
    FieldPtr f = m.at(0, 0).field;
    FMat r = m;
    long n = m.rows();
    FieldElement d = fe_one(f);
    for (long col = 0; col < n; ++col) {
        long sel = -1;
        for (long i = col; i < n; ++i)
            if (!fe_is_zero(r.at(i, col))) {
                sel = i;
                break;
            }
        if (sel < 0) return fe_zero(f);
        if (sel != col) {
            for (long j = 0; j < n; ++j) std::swap(r.at(sel, j), r.at(col, j));
            d = fe_neg(d);
        }
        d = fe_mul(d, r.at(col, col));
        FieldElement inv = fe_inv(r.at(col, col));
        for (long i = col + 1; i < n; ++i) {
            if (fe_is_zero(r.at(i, col))) continue;
            FieldElement factor = fe_mul(r.at(i, col), inv);
            for (long j = col; j < n; ++j)
                r.at(i, j) = fe_sub(r.at(i, j), fe_mul(factor, r.at(col, j)));
        }
    }
    return d;
}

namespace {

FPoly polymat_det(const std::vector<std::vector<FPoly>>& m, std::vector<long> cols, long row,
                  const FieldPtr& f) {
    if (cols.empty()) return poly_const(fe_one(f));
    FPoly acc = poly_zero(f);
    bool neg = false;
    for (size_t k = 0; k < cols.size(); ++k) {
        const FPoly& e = m[(size_t)row][(size_t)cols[k]];
        if (!e.is_zero()) {
            std::vector<long> rest;
            for (size_t t = 0; t < cols.size(); ++t)
                if (t != k) rest.push_back(cols[t]);
            FPoly sub = polymat_det(m, rest, row + 1, f);
            FPoly term = poly_mul(e, sub);
            acc = neg ? poly_sub(acc, term) : poly_add(acc, term);
        }
        neg = !neg;
    }
    return acc;
}

} // namespace

FPoly charpoly(const FMat& m) {
    FieldPtr f = m.at(0, 0).field;
    long n = m.rows();
    std::vector<std::vector<FPoly>> xm((size_t)n, std::vector<FPoly>((size_t)n, poly_zero(f)));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            if (i == j)
                xm[i][j] = poly_make(f, {fe_neg(m.at(i, j)), fe_one(f)});
            else
                xm[i][j] = poly_const(fe_neg(m.at(i, j)));
        }
    std::vector<long> cols(n);
    for (long i = 0; i < n; ++i) cols[i] = i;
    return polymat_det(xm, cols, 0, f);
}

} // namespace mahler
