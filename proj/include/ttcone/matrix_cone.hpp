#pragma once

#include <string>

#include "ttcone/linalg.hpp"

namespace ttcone {

/// The matrix-case split X = A1*Y + Xhat*A2 + U*V at the rank-k point A1*A2.
/// Xhat and U are orthogonal to A1, V is orthogonal to the rows of A2, and
/// U carries orthonormal columns (the SVD gauge of the projected residual)
/// with V = sigma * (right vectors)^T.
struct MatrixSDecomposition {
    Matrix Y;     // k x m
    Matrix Xhat;  // n x k
    Matrix U;     // n x s~, orthonormal columns
    Matrix V;     // s~ x m
    Index effective_slack = 0;
    Vector residual_spectrum;  // singular values of (I-P) X (I-Q), for audit

    Matrix reconstruct(const Matrix& A1, const Matrix& A2) const {
        return A1 * Y + Xhat * A2 + U * V;
    }
};

/// Membership verdict for one split together with the audit spectrum.
struct ConeSplitTest {
    bool member = false;
    Index residual_rank = 0;
    Index slack_bound = 0;
    Vector spectrum;
};

namespace detail {

inline void check_split_inputs(const Matrix& X, const Matrix& A1, const Matrix& A2,
                               Index s, const Tolerance& tol) {
    if (A1.rows() != X.rows() || A2.cols() != X.cols() || A1.cols() != A2.rows())
        throw DimsMismatch("s-decomposition shapes: X " + std::to_string(X.rows()) + "x" +
                           std::to_string(X.cols()) + ", A1 " + std::to_string(A1.rows()) + "x" +
                           std::to_string(A1.cols()) + ", A2 " + std::to_string(A2.rows()) + "x" +
                           std::to_string(A2.cols()));
    if (s < 0) throw DimsMismatch("slack bound must be nonnegative");
    const Index k = A1.cols();
    if (numerical_rank(A1, tol) != k)
        throw RankDeficientBase("left factor is rank-deficient (expected rank " +
                                std::to_string(k) + ")");
    if (numerical_rank(A2, tol) != k)
        throw RankDeficientBase("right factor is rank-deficient (expected rank " +
                                std::to_string(k) + ")");
}

struct ResidualSplit {
    Matrix A1p;   // pinv(A1)
    Matrix A2p;   // pinv(A2)
    Matrix XP;    // (I - P) X
    Matrix Rres;  // (I - P) X (I - Q)
    ThinSvd svd;
    Index rank = 0;
};

// Rank decisions on the projected residual are measured against the scale of
// the input matrix, not the residual's own leading singular value: a vector
// that sits exactly in the cone leaves a residual at floating noise, which
// must count as rank zero.
inline ResidualSplit residual_split(const Matrix& X, const Matrix& A1, const Matrix& A2,
                                    const Tolerance& tol) {
    ResidualSplit out;
    out.A1p = pseudoinverse(A1, tol);
    out.A2p = pseudoinverse(A2, tol);
    out.XP = X - A1 * (out.A1p * X);
    out.Rres = out.XP - (out.XP * out.A2p) * A2;
    out.svd = thin_svd(out.Rres);
    Tolerance rt = tol;
    if (rt.scale == 0.0) rt.scale = X.norm();
    out.rank = rank_from_spectrum(out.svd.sigma, out.Rres.rows(), out.Rres.cols(), rt);
    return out;
}

} // namespace detail

/// s-decomposition of X at the point A1*A2. Throws NotInCone when the
/// projected residual has rank above s, RankDeficientBase when a base factor
/// lacks full rank.
inline MatrixSDecomposition s_decompose(const Matrix& X, const Matrix& A1, const Matrix& A2,
                                        Index s, const Tolerance& tol = {}) {
    detail::check_split_inputs(X, A1, A2, s, tol);
    const detail::ResidualSplit r = detail::residual_split(X, A1, A2, tol);
    if (r.rank > s)
        throw NotInCone("projected residual rank " + std::to_string(r.rank) +
                        " exceeds slack " + std::to_string(s),
                        -1, r.rank, s);
    MatrixSDecomposition out;
    out.Y = r.A1p * X;
    out.Xhat = r.XP * r.A2p;
    out.effective_slack = r.rank;
    out.residual_spectrum = r.svd.sigma;
    out.U = r.svd.U.leftCols(r.rank);
    out.V = r.svd.sigma.head(r.rank).asDiagonal() * r.svd.V.leftCols(r.rank).transpose();
    return out;
}

/// Implicit membership test: rank((I-P) X (I-Q)) <= s. Agrees with
/// s_decompose success on every input.
inline ConeSplitTest matrix_cone_membership(const Matrix& X, const Matrix& A1, const Matrix& A2,
                                            Index s, const Tolerance& tol = {}) {
    detail::check_split_inputs(X, A1, A2, s, tol);
    const detail::ResidualSplit r = detail::residual_split(X, A1, A2, tol);
    return ConeSplitTest{r.rank <= s, r.rank, s, r.svd.sigma};
}

} // namespace ttcone
