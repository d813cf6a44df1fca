#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "ttcone/errors.hpp"

namespace ttcone {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<Index>;

inline Index element_count(const Dims& dims) {
    Index count = 1;
    for (Index d : dims) count *= d;
    return count;
}

inline std::string dims_to_string(const Dims& dims) {
    std::string out = "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(dims[i]);
    }
    return out + ")";
}

/// Order-d array of reals, flat storage in lexicographic order with the last
/// index varying fastest. Physical mode sizes are positive; zero-sized
/// dimensions are allowed so that TT cores with collapsed bonds stay
/// representable.
class DenseTensor {
public:
    DenseTensor() = default;

    explicit DenseTensor(Dims dims) : dims_(std::move(dims)) {
        data_.assign(static_cast<std::size_t>(checked_count(dims_)), 0.0);
    }

    DenseTensor(Dims dims, std::vector<double> data)
        : dims_(std::move(dims)), data_(std::move(data)) {
        if (static_cast<Index>(data_.size()) != checked_count(dims_))
            throw DimsMismatch("data length " + std::to_string(data_.size()) +
                               " does not match dims " + dims_to_string(dims_));
    }

    Index order() const { return static_cast<Index>(dims_.size()); }
    const Dims& dims() const { return dims_; }
    Index dim(Index i) const { return dims_[static_cast<std::size_t>(i)]; }
    Index size() const { return static_cast<Index>(data_.size()); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double operator[](Index flat) const { return data_[static_cast<std::size_t>(flat)]; }
    double& operator[](Index flat) { return data_[static_cast<std::size_t>(flat)]; }

    /// Flat offset of a multi-index, last index fastest.
    Index flat_index(std::initializer_list<Index> idx) const {
        if (static_cast<Index>(idx.size()) != order())
            throw DimsMismatch("multi-index order mismatch for dims " + dims_to_string(dims_));
        Index flat = 0;
        Index axis = 0;
        for (Index j : idx) {
            const Index n = dims_[static_cast<std::size_t>(axis)];
            if (j < 0 || j >= n)
                throw DimsMismatch("multi-index out of range for dims " + dims_to_string(dims_));
            flat = flat * n + j;
            ++axis;
        }
        return flat;
    }

    double at(std::initializer_list<Index> idx) const {
        return data_[static_cast<std::size_t>(flat_index(idx))];
    }
    double& at(std::initializer_list<Index> idx) {
        return data_[static_cast<std::size_t>(flat_index(idx))];
    }

private:
    static Index checked_count(const Dims& dims) {
        if (dims.empty()) throw DimsMismatch("tensor order must be at least 1");
        for (Index d : dims)
            if (d < 0) throw DimsMismatch("negative dimension in " + dims_to_string(dims));
        return element_count(dims);
    }

    Dims dims_;
    std::vector<double> data_;
};

inline void check_same_dims(const DenseTensor& a, const DenseTensor& b, const char* op) {
    if (a.dims() != b.dims())
        throw DimsMismatch(std::string(op) + ": dims " + dims_to_string(a.dims()) +
                           " vs " + dims_to_string(b.dims()));
}

inline DenseTensor operator+(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "tensor sum");
    DenseTensor out = a;
    for (Index i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

inline DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "tensor difference");
    DenseTensor out = a;
    for (Index i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

inline DenseTensor operator*(double c, const DenseTensor& t) {
    DenseTensor out = t;
    for (Index i = 0; i < out.size(); ++i) out[i] *= c;
    return out;
}

inline DenseTensor operator*(const DenseTensor& t, double c) { return c * t; }

/// Standard scalar product on the flat data.
inline double inner(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "inner product");
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const DenseTensor& t) { return std::sqrt(inner(t, t)); }

/// A tensor regrouped into the matrix whose rows enumerate the first `split`
/// indices and whose columns enumerate the rest. Pure reindexing, no
/// arithmetic.
struct Matricization {
    Matrix matrix;
    Dims source_dims;
    Index split = 0;

    Index rows() const { return matrix.rows(); }
    Index cols() const { return matrix.cols(); }
};

inline Matricization matricize(const DenseTensor& t, Index split) {
    if (split < 1 || split >= t.order())
        throw DimsMismatch("split index " + std::to_string(split) +
                           " out of range for order " + std::to_string(t.order()));
    Index rows = 1;
    Index cols = 1;
    for (Index i = 0; i < split; ++i) rows *= t.dim(i);
    for (Index i = split; i < t.order(); ++i) cols *= t.dim(i);
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            m(r, c) = t[r * cols + c];
    return {std::move(m), t.dims(), split};
}

/// Exact inverse of matricize for any split of the given dims.
inline DenseTensor tensorize(const Matrix& m, Dims dims) {
    if (m.rows() * m.cols() != element_count(dims))
        throw DimsMismatch("matrix with " + std::to_string(m.rows() * m.cols()) +
                           " entries cannot fill dims " + dims_to_string(dims));
    DenseTensor out(std::move(dims));
    const Index cols = m.cols();
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < cols; ++c)
            out[r * cols + c] = m(r, c);
    return out;
}

inline DenseTensor tensorize(const Matricization& m) { return tensorize(m.matrix, m.source_dims); }

/// Regroup a matrix into new rows/cols keeping the row-major entry order.
inline Matrix reshape_rowmajor(const Matrix& m, Index rows, Index cols) {
    if (m.rows() * m.cols() != rows * cols)
        throw DimsMismatch("reshape from " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           " to " + std::to_string(rows) + "x" + std::to_string(cols));
    Matrix out(rows, cols);
    const Index src_cols = m.cols();
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < src_cols; ++c) {
            const Index linear = r * src_cols + c;
            out(linear / cols, linear % cols) = m(r, c);
        }
    return out;
}

} // namespace ttcone
