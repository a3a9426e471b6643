#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mahler/field.hpp"

namespace mahler {

/// Dense rectangular matrix. Dimensions may be zero; entries are owned.
template <typename T>
class Mat {
public:
    Mat() = default;
    Mat(long r, long c, const T& init) : rows_(r), cols_(c), data_((size_t)(r * c), init) {}

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& at(long i, long j) { return data_[(size_t)(i * cols_ + j)]; }
    const T& at(long i, long j) const { return data_[(size_t)(i * cols_ + j)]; }

    Mat<T> transpose() const {
        if (empty()) {
            Mat<T> t;
            t.rows_ = cols_;
            t.cols_ = rows_;
            return t;
        }
        Mat<T> t(cols_, rows_, data_[0]);
        for (long i = 0; i < rows_; ++i)
            for (long j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    template <typename F>
    auto map(F&& fn) const -> Mat<decltype(fn(std::declval<const T&>()))> {
        using U = decltype(fn(std::declval<const T&>()));
        Mat<U> r;
        r.resize_raw(rows_, cols_);
        for (const auto& x : data_) r.push_raw(fn(x));
        return r;
    }

    // internal helpers for map()
    void resize_raw(long r, long c) {
        rows_ = r;
        cols_ = c;
        data_.clear();
        data_.reserve((size_t)(r * c));
    }
    void push_raw(T v) { data_.push_back(std::move(v)); }

private:
    long rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

template <typename T>
Mat<T> mat_mul(const Mat<T>& a, const Mat<T>& b, const T& zero) {
    Mat<T> r(a.rows(), b.cols(), zero);
    for (long i = 0; i < a.rows(); ++i)
        for (long k = 0; k < a.cols(); ++k)
            for (long j = 0; j < b.cols(); ++j) r.at(i, j) = r.at(i, j) + a.at(i, k) * b.at(k, j);
    return r;
}

template <typename T>
Mat<T> mat_add(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> r = a;
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j) + b.at(i, j);
    return r;
}

template <typename T>
Mat<T> hstack(const Mat<T>& a, const Mat<T>& b, const T& zero) {
    Mat<T> r(std::max(a.rows(), b.rows()), a.cols() + b.cols(), zero);
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
    for (long i = 0; i < b.rows(); ++i)
        for (long j = 0; j < b.cols(); ++j) r.at(i, a.cols() + j) = b.at(i, j);
    return r;
}

template <typename T>
Mat<T> vstack(const Mat<T>& a, const Mat<T>& b, const T& zero) {
    Mat<T> r(a.rows() + b.rows(), std::max(a.cols(), b.cols()), zero);
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
    for (long i = 0; i < b.rows(); ++i)
        for (long j = 0; j < b.cols(); ++j) r.at(a.rows() + i, j) = b.at(i, j);
    return r;
}

using FMat = Mat<FieldElement>;

FMat fmat_zero(const FieldPtr& f, long r, long c);
FMat fmat_identity(const FieldPtr& f, long n);
FMat fmat_mul(const FMat& a, const FMat& b);
FMat fmat_scale(const FMat& a, const FieldElement& s);
bool fmat_equal(const FMat& a, const FMat& b);
bool fmat_is_zero(const FMat& a);
FMat fmat_lift(const FMat& a, const FieldPtr& target);
std::string fmat_to_string(const FMat& a);

struct RrefResult {
    FMat R;
    std::vector<long> pivots;
};

/// Reduced row echelon form with natural column order and first-nonzero pivoting.
RrefResult rref(const FMat& m);

/// Basis of {x : M x = 0}, one row per free column (ascending).
FMat kernel(const FieldPtr& f, const FMat& m);

/// Solves M x = b with free variables set to zero; nullopt when inconsistent.
std::optional<std::vector<FieldElement>> solve_linear(const FMat& m, const std::vector<FieldElement>& b);

FMat inverse(const FMat& m);
FieldElement det(const FMat& m);

/// Characteristic polynomial det(x I - M).
FPoly charpoly(const FMat& m);

} // namespace mahler
