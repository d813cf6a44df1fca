#pragma once

#include <algorithm>
#include <vector>

#include "ttcone/dense_tensor.hpp"

namespace ttcone {

/// Tolerance record threaded through every rank decision. `rank` is the
/// relative cutoff; `scale` optionally pins the reference magnitude
/// (0 means "largest singular value of the matrix under test").
struct Tolerance {
    double rank = 1e-12;
    double scale = 0.0;
};

struct ThinSvd {
    Matrix U;
    Vector sigma;
    Matrix V;  // m = U * sigma.asDiagonal() * V^T
};

inline ThinSvd thin_svd(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0)
        return {Matrix(m.rows(), 0), Vector(0), Matrix(m.cols(), 0)};
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline Index rank_from_spectrum(const Vector& sigma, Index rows, Index cols,
                                const Tolerance& tol = {}) {
    if (sigma.size() == 0) return 0;
    const double scale = tol.scale > 0.0 ? tol.scale : sigma(0);
    const double cutoff = tol.rank * scale * static_cast<double>(std::max(rows, cols));
    Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
    return rank;
}

/// Count of singular values above tol.rank * sigma_1 * max(rows, cols).
/// The zero matrix has rank 0.
inline Index numerical_rank(const Matrix& m, const Tolerance& tol = {}) {
    const ThinSvd svd = thin_svd(m);
    return rank_from_spectrum(svd.sigma, m.rows(), m.cols(), tol);
}

/// SVD pseudoinverse truncated at the numerical rank. Never formed through
/// normal equations.
inline Matrix pseudoinverse(const Matrix& m, const Tolerance& tol = {}) {
    const ThinSvd svd = thin_svd(m);
    const Index r = rank_from_spectrum(svd.sigma, m.rows(), m.cols(), tol);
    if (r == 0) return Matrix::Zero(m.cols(), m.rows());
    return svd.V.leftCols(r) * svd.sigma.head(r).cwiseInverse().asDiagonal() *
           svd.U.leftCols(r).transpose();
}

/// Orthogonal projector onto range(m).
inline Matrix projector_onto_range(const Matrix& m, const Tolerance& tol = {}) {
    const ThinSvd svd = thin_svd(m);
    const Index r = rank_from_spectrum(svd.sigma, m.rows(), m.cols(), tol);
    if (r == 0) return Matrix::Zero(m.rows(), m.rows());
    const Matrix u = svd.U.leftCols(r);
    return u * u.transpose();
}

/// Numerical ranks of all d-1 matricizations under one tolerance.
struct RankProfile {
    std::vector<Index> ranks;
    double tolerance = 0.0;
};

inline RankProfile rank_profile(const DenseTensor& t, const Tolerance& tol = {}) {
    if (t.order() < 2) throw DimsMismatch("rank profile requires order >= 2");
    RankProfile out;
    out.tolerance = tol.rank;
    out.ranks.reserve(static_cast<std::size_t>(t.order() - 1));
    for (Index i = 1; i < t.order(); ++i)
        out.ranks.push_back(numerical_rank(matricize(t, i).matrix, tol));
    return out;
}

} // namespace ttcone
