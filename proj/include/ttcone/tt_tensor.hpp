#pragma once

#include <utility>
#include <vector>

#include "ttcone/linalg.hpp"
#include "ttcone/rng.hpp"

namespace ttcone {

enum class Orthogonality { none, left };

/// Chain of cores A1 (n1 x k1), A2 (k1 x n2 x k2), ..., Ad (k_{d-1} x nd)
/// representing their TT product. Bond sizes may be zero; a zero bond makes
/// the represented tensor zero.
class TTTensor {
public:
    TTTensor() = default;

    explicit TTTensor(std::vector<DenseTensor> cores, Orthogonality flag = Orthogonality::none)
        : cores_(std::move(cores)), flag_(flag) {
        validate_chain();
    }

    Index order() const { return static_cast<Index>(cores_.size()); }
    bool empty() const { return cores_.empty(); }
    const DenseTensor& core(Index i) const { return cores_[static_cast<std::size_t>(i)]; }
    const std::vector<DenseTensor>& cores() const { return cores_; }
    Orthogonality flag() const { return flag_; }

    /// Physical mode sizes (n1, ..., nd).
    Dims dims() const {
        Dims out;
        out.reserve(static_cast<std::size_t>(order()));
        for (Index i = 0; i < order(); ++i) out.push_back(core(i).dim(i == 0 ? 0 : 1));
        return out;
    }

    /// Bond sizes (k1, ..., k_{d-1}).
    Dims ranks() const {
        Dims out;
        out.reserve(static_cast<std::size_t>(order() > 0 ? order() - 1 : 0));
        for (Index i = 0; i + 1 < order(); ++i) out.push_back(core(i).dims().back());
        return out;
    }

private:
    void validate_chain() const {
        if (cores_.size() < 2) throw DimsMismatch("TT tensor needs at least two cores");
        const Index d = static_cast<Index>(cores_.size());
        for (Index i = 0; i < d; ++i) {
            const Index want = (i == 0 || i == d - 1) ? 2 : 3;
            if (core(i).order() != want)
                throw DimsMismatch("core " + std::to_string(i + 1) + " must have order " +
                                   std::to_string(want) + ", got dims " + dims_to_string(core(i).dims()));
            if (core(i).dim(i == 0 ? 0 : 1) < 1)
                throw DimsMismatch("core " + std::to_string(i + 1) + " has an empty physical mode");
        }
        for (Index i = 0; i + 1 < d; ++i)
            if (core(i).dims().back() != core(i + 1).dims().front())
                throw DimsMismatch("bond mismatch between cores " + std::to_string(i + 1) +
                                   " and " + std::to_string(i + 2));
    }

    std::vector<DenseTensor> cores_;
    Orthogonality flag_ = Orthogonality::none;
};

/// Unfolding keeping the trailing index as columns.
inline Matrix right_unfolding(const DenseTensor& core) {
    return matricize(core, core.order() - 1).matrix;
}

/// Unfolding keeping the leading index as rows.
inline Matrix left_unfolding(const DenseTensor& core) {
    return matricize(core, 1).matrix;
}

/// Contraction over the bond shared by the trailing index of `a` and the
/// leading index of `b`.
inline DenseTensor tt_product(const DenseTensor& a, const DenseTensor& b) {
    if (a.order() < 2 || b.order() < 2)
        throw DimsMismatch("TT product operands need a bond index");
    if (a.dims().back() != b.dims().front())
        throw DimsMismatch("bond mismatch: " + std::to_string(a.dims().back()) + " vs " +
                           std::to_string(b.dims().front()));
    const Matrix prod = right_unfolding(a) * left_unfolding(b);
    Dims out(a.dims().begin(), a.dims().end() - 1);
    out.insert(out.end(), b.dims().begin() + 1, b.dims().end());
    return tensorize(prod, std::move(out));
}

/// Left-to-right fold of tt_product over the cores.
inline DenseTensor tt_evaluate(const TTTensor& tt) {
    if (tt.empty()) throw DimsMismatch("cannot evaluate an empty TT tensor");
    DenseTensor acc = tt.core(0);
    for (Index i = 1; i < tt.order(); ++i) acc = tt_product(acc, tt.core(i));
    return acc;
}

/// Largest deviation of A1^T A1 = I and (Ai^R)^T Ai^R = I over the first
/// d-1 cores, in the Frobenius norm.
inline double left_orthogonality_residual(const TTTensor& tt) {
    double worst = 0.0;
    for (Index i = 0; i + 1 < tt.order(); ++i) {
        const Matrix q = right_unfolding(tt.core(i));
        if (q.cols() == 0) continue;
        const Matrix gram = q.transpose() * q - Matrix::Identity(q.cols(), q.cols());
        worst = std::max(worst, gram.norm());
    }
    return worst;
}

/// QR sweep making every core but the last left-orthonormal. Evaluation is
/// preserved; a bond exceeding the rows of its unfolding shrinks to the
/// feasible size.
inline TTTensor left_orthogonalize(const TTTensor& tt) {
    if (tt.empty()) throw DimsMismatch("cannot orthogonalize an empty TT tensor");
    std::vector<DenseTensor> cores = tt.cores();
    const Index d = tt.order();
    for (Index i = 0; i + 1 < d; ++i) {
        const Matrix unf = right_unfolding(cores[static_cast<std::size_t>(i)]);
        const Index rows = unf.rows();
        const Index bond = unf.cols();
        const Index thin = std::min(rows, bond);
        Dims cur = cores[static_cast<std::size_t>(i)].dims();
        Dims next = cores[static_cast<std::size_t>(i + 1)].dims();
        cur.back() = thin;
        next.front() = thin;
        if (thin == 0) {
            cores[static_cast<std::size_t>(i)] = DenseTensor(cur);
            cores[static_cast<std::size_t>(i + 1)] = DenseTensor(next);
            continue;
        }
        Eigen::HouseholderQR<Matrix> qr(unf);
        const Matrix q = qr.householderQ() * Matrix::Identity(rows, thin);
        const Matrix rfac = qr.matrixQR().topRows(thin).triangularView<Eigen::Upper>();
        const Matrix folded = rfac * left_unfolding(cores[static_cast<std::size_t>(i + 1)]);
        cores[static_cast<std::size_t>(i)] = tensorize(q, std::move(cur));
        cores[static_cast<std::size_t>(i + 1)] = tensorize(folded, std::move(next));
    }
    return TTTensor(std::move(cores), Orthogonality::left);
}

inline TTTensor ensure_left_orthogonal(const TTTensor& tt) {
    return tt.flag() == Orthogonality::left ? tt : left_orthogonalize(tt);
}

struct TTSvdInfo {
    std::vector<Index> ranks;
    std::vector<double> discarded;  // Frobenius mass dropped per split
};

/// Sequential-SVD construction of a left-orthogonal TT representation with
/// bond sizes capped by max_ranks. Truncation is silent; per-split discarded
/// mass lands in `info` when given.
inline TTTensor tt_svd(const DenseTensor& t, const std::vector<Index>& max_ranks,
                       const Tolerance& tol = {}, TTSvdInfo* info = nullptr) {
    const Index d = t.order();
    if (d < 2) throw DimsMismatch("tt_svd needs order >= 2");
    if (static_cast<Index>(max_ranks.size()) != d - 1)
        throw DimsMismatch("max_ranks must have length d-1");
    for (Index r : max_ranks)
        if (r < 0) throw DimsMismatch("negative rank bound");
    if (info) {
        info->ranks.clear();
        info->discarded.clear();
    }

    std::vector<DenseTensor> cores(static_cast<std::size_t>(d));
    Matrix carry(1, t.size());
    for (Index i = 0; i < t.size(); ++i) carry(0, i) = t[i];
    Index lead = 1;

    for (Index i = 0; i + 1 < d; ++i) {
        const Index n = t.dim(i);
        const Index rows = lead * n;
        const Index cols = carry.cols() / n;
        const Matrix m = reshape_rowmajor(carry, rows, cols);
        const ThinSvd svd = thin_svd(m);
        Index r = rank_from_spectrum(svd.sigma, rows, cols, tol);
        r = std::min(r, max_ranks[static_cast<std::size_t>(i)]);
        if (info) {
            double dropped = 0.0;
            for (Index j = r; j < svd.sigma.size(); ++j) dropped += svd.sigma(j) * svd.sigma(j);
            info->ranks.push_back(r);
            info->discarded.push_back(std::sqrt(dropped));
        }
        const Matrix u = svd.U.leftCols(r);
        cores[static_cast<std::size_t>(i)] =
            (i == 0) ? tensorize(u, {n, r}) : tensorize(u, {lead, n, r});
        carry = svd.sigma.head(r).asDiagonal() * svd.V.leftCols(r).transpose();
        lead = r;
    }
    cores[static_cast<std::size_t>(d - 1)] = tensorize(carry, {lead, t.dim(d - 1)});
    return TTTensor(std::move(cores), Orthogonality::left);
}

/// Gaussian cores with the given mode sizes and bond sizes; not orthogonal.
inline TTTensor tt_random(const Dims& dims, const std::vector<Index>& ranks, RandomStream& rng) {
    const Index d = static_cast<Index>(dims.size());
    if (d < 2) throw DimsMismatch("TT tensor needs order >= 2");
    if (static_cast<Index>(ranks.size()) != d - 1)
        throw DimsMismatch("ranks must have length d-1");
    std::vector<DenseTensor> cores;
    cores.reserve(static_cast<std::size_t>(d));
    cores.push_back(rng.gaussian_tensor({dims[0], ranks[0]}));
    for (Index i = 1; i + 1 < d; ++i)
        cores.push_back(rng.gaussian_tensor({ranks[static_cast<std::size_t>(i - 1)], dims[static_cast<std::size_t>(i)],
                                             ranks[static_cast<std::size_t>(i)]}));
    cores.push_back(rng.gaussian_tensor({ranks[static_cast<std::size_t>(d - 2)], dims[static_cast<std::size_t>(d - 1)]}));
    return TTTensor(std::move(cores));
}

} // namespace ttcone
