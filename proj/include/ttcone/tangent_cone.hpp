#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ttcone/matrix_cone.hpp"
#include "ttcone/tt_tensor.hpp"

namespace ttcone {

/// Element of the tangent cone at a left-orthogonal TT point with exact
/// ranks, stored as the block cores of the upper-triangular parametrization
///
///   (A1 U1 X1) (A2 U2 X2; 0 Z2 V2; 0 0 A2) ... (Xd; Vd; Ad).
///
/// Block arrays are position-aligned: X[p-1] is the X block of core p for
/// p = 1..d, U[p-1] covers p = 1..d-1, V[p-2] covers p = 2..d and Z[p-2]
/// covers p = 2..d-1. Channel widths are the effective slacks, never padded
/// to the declared bounds.
struct TangentConeVector {
    TTTensor base;
    std::vector<Index> slack;            // declared bounds s_i, length d-1
    std::vector<Index> effective_slack;  // realized widths s~_i, length d-1
    std::vector<DenseTensor> X;          // d blocks
    std::vector<DenseTensor> U;          // d-1 blocks
    std::vector<DenseTensor> V;          // d-1 blocks
    std::vector<DenseTensor> Z;          // d-2 blocks

    Index order() const { return base.order(); }

    const DenseTensor& x_at(Index pos) const { return X[static_cast<std::size_t>(pos - 1)]; }
    const DenseTensor& u_at(Index pos) const { return U[static_cast<std::size_t>(pos - 1)]; }
    const DenseTensor& v_at(Index pos) const { return V[static_cast<std::size_t>(pos - 2)]; }
    const DenseTensor& z_at(Index pos) const { return Z[static_cast<std::size_t>(pos - 2)]; }

    /// Shape chaining against the base and the effective slacks.
    void validate() const {
        const Index d = base.order();
        if (d < 2) throw DimsMismatch("cone vector base must have order >= 2");
        if (base.flag() != Orthogonality::left)
            throw DimsMismatch("cone vector base must be left-orthogonal");
        const Dims dims = base.dims();
        const Dims ranks = base.ranks();
        auto need = [d](std::size_t got, Index want, const char* what) {
            if (static_cast<Index>(got) != want)
                throw DimsMismatch(std::string(what) + ": expected " + std::to_string(want) +
                                   " entries for order " + std::to_string(d) + ", got " +
                                   std::to_string(got));
        };
        need(slack.size(), d - 1, "slack bounds");
        need(effective_slack.size(), d - 1, "effective slacks");
        need(X.size(), d, "X blocks");
        need(U.size(), d - 1, "U blocks");
        need(V.size(), d - 1, "V blocks");
        need(Z.size(), d >= 3 ? d - 2 : 0, "Z blocks");
        for (Index i = 0; i + 1 < d; ++i) {
            const Index s = slack[static_cast<std::size_t>(i)];
            const Index es = effective_slack[static_cast<std::size_t>(i)];
            if (s < 0 || es < 0 || es > s)
                throw DimsMismatch("effective slack " + std::to_string(es) +
                                   " violates bound " + std::to_string(s) + " at split " +
                                   std::to_string(i + 1));
        }
        auto expect = [](const DenseTensor& t, Dims want, const std::string& what) {
            if (t.dims() != want)
                throw DimsMismatch(what + " has dims " + dims_to_string(t.dims()) +
                                   ", expected " + dims_to_string(want));
        };
        const auto es = [this](Index split) {
            return effective_slack[static_cast<std::size_t>(split - 1)];
        };
        expect(x_at(1), {dims[0], ranks[0]}, "X block 1");
        expect(u_at(1), {dims[0], es(1)}, "U block 1");
        for (Index p = 2; p <= d - 1; ++p) {
            const Index kp = ranks[static_cast<std::size_t>(p - 2)];
            const Index kc = ranks[static_cast<std::size_t>(p - 1)];
            const Index n = dims[static_cast<std::size_t>(p - 1)];
            const std::string at = " block " + std::to_string(p);
            expect(x_at(p), {kp, n, kc}, "X" + at);
            expect(u_at(p), {kp, n, es(p)}, "U" + at);
            expect(v_at(p), {es(p - 1), n, kc}, "V" + at);
            expect(z_at(p), {es(p - 1), n, es(p)}, "Z" + at);
        }
        expect(x_at(d), {ranks[static_cast<std::size_t>(d - 2)], dims[static_cast<std::size_t>(d - 1)]},
               "X block " + std::to_string(d));
        expect(v_at(d), {es(d - 1), dims[static_cast<std::size_t>(d - 1)]},
               "V block " + std::to_string(d));
    }
};

namespace detail {

/// Right interfaces (A_i ... A_d)^L for i = 2..d, indexed by i.
inline std::vector<Matrix> right_interfaces(const TTTensor& tt) {
    const Index d = tt.order();
    std::vector<Matrix> right(static_cast<std::size_t>(d + 1));
    DenseTensor suffix = tt.core(d - 1);
    right[static_cast<std::size_t>(d)] = left_unfolding(suffix);
    for (Index i = d - 1; i >= 2; --i) {
        suffix = tt_product(tt.core(i - 1), suffix);
        right[static_cast<std::size_t>(i)] = matricize(suffix, 1).matrix;
    }
    return right;
}

inline DenseTensor cone_first_factor(const TangentConeVector& v) {
    const Index n = v.base.dims()[0];
    const Index k = v.base.ranks()[0];
    const Index s = v.effective_slack[0];
    DenseTensor out({n, k + s + k});
    const DenseTensor& a = v.base.core(0);
    for (Index j = 0; j < n; ++j) {
        for (Index b = 0; b < k; ++b) {
            out.at({j, b}) = a.at({j, b});
            out.at({j, k + s + b}) = v.x_at(1).at({j, b});
        }
        for (Index b = 0; b < s; ++b) out.at({j, k + b}) = v.u_at(1).at({j, b});
    }
    return out;
}

inline DenseTensor cone_middle_factor(const TangentConeVector& v, Index pos) {
    const Dims dims = v.base.dims();
    const Dims ranks = v.base.ranks();
    const Index kp = ranks[static_cast<std::size_t>(pos - 2)];
    const Index kc = ranks[static_cast<std::size_t>(pos - 1)];
    const Index sp = v.effective_slack[static_cast<std::size_t>(pos - 2)];
    const Index sc = v.effective_slack[static_cast<std::size_t>(pos - 1)];
    const Index n = dims[static_cast<std::size_t>(pos - 1)];
    const DenseTensor& a = v.base.core(pos - 1);
    DenseTensor out({kp + sp + kp, n, kc + sc + kc});
    for (Index j = 0; j < n; ++j) {
        for (Index r = 0; r < kp; ++r) {
            for (Index c = 0; c < kc; ++c) {
                out.at({r, j, c}) = a.at({r, j, c});
                out.at({r, j, kc + sc + c}) = v.x_at(pos).at({r, j, c});
                out.at({kp + sp + r, j, kc + sc + c}) = a.at({r, j, c});
            }
            for (Index c = 0; c < sc; ++c) out.at({r, j, kc + c}) = v.u_at(pos).at({r, j, c});
        }
        for (Index r = 0; r < sp; ++r) {
            for (Index c = 0; c < sc; ++c) out.at({kp + r, j, kc + c}) = v.z_at(pos).at({r, j, c});
            for (Index c = 0; c < kc; ++c)
                out.at({kp + r, j, kc + sc + c}) = v.v_at(pos).at({r, j, c});
        }
    }
    return out;
}

inline DenseTensor cone_last_factor(const TangentConeVector& v) {
    const Index d = v.base.order();
    const Index n = v.base.dims()[static_cast<std::size_t>(d - 1)];
    const Index k = v.base.ranks()[static_cast<std::size_t>(d - 2)];
    const Index s = v.effective_slack[static_cast<std::size_t>(d - 2)];
    DenseTensor out({k + s + k, n});
    const DenseTensor& a = v.base.core(d - 1);
    for (Index j = 0; j < n; ++j) {
        for (Index r = 0; r < k; ++r) {
            out.at({r, j}) = v.x_at(d).at({r, j});
            out.at({k + s + r, j}) = a.at({r, j});
        }
        for (Index r = 0; r < s; ++r) out.at({k + r, j}) = v.v_at(d).at({r, j});
    }
    return out;
}

} // namespace detail

/// Block cores of the evaluated chain, bond sizes k_i + s~_i + k_i.
inline std::vector<DenseTensor> cone_block_cores(const TangentConeVector& v) {
    const Index d = v.base.order();
    std::vector<DenseTensor> cores;
    cores.reserve(static_cast<std::size_t>(d));
    cores.push_back(detail::cone_first_factor(v));
    for (Index pos = 2; pos <= d - 1; ++pos) cores.push_back(detail::cone_middle_factor(v, pos));
    cores.push_back(detail::cone_last_factor(v));
    return cores;
}

/// Ambient tensor represented by the block parametrization.
inline DenseTensor tc_evaluate(const TangentConeVector& v) {
    v.validate();
    return tt_evaluate(TTTensor(cone_block_cores(v)));
}

/// Every summand of the expansion of the block chain, ordered by the number
/// of slack-channel factors (1 + how many of U, Z, V appear) and then by the
/// position of the first non-base block. Line 1 holds the d single-X terms,
/// line l >= 2 the terms U_p Z_{p+1} ... Z_{p+l-2} V_{p+l-1}. The summands
/// are pairwise orthogonal and add up to tc_evaluate.
inline std::vector<DenseTensor> tc_orthogonal_terms(const TangentConeVector& v) {
    v.validate();
    const Index d = v.base.order();
    auto fold = [](const std::vector<const DenseTensor*>& chain) {
        DenseTensor acc = *chain.front();
        for (std::size_t i = 1; i < chain.size(); ++i) acc = tt_product(acc, *chain[i]);
        return acc;
    };
    std::vector<DenseTensor> terms;
    terms.reserve(static_cast<std::size_t>(d * (d + 1) / 2));
    for (Index p = 1; p <= d; ++p) {
        std::vector<const DenseTensor*> chain;
        for (Index q = 1; q <= d; ++q)
            chain.push_back(q == p ? &v.x_at(q) : &v.base.core(q - 1));
        terms.push_back(fold(chain));
    }
    for (Index len = 2; len <= d; ++len) {
        for (Index p = 1; p + len - 1 <= d; ++p) {
            std::vector<const DenseTensor*> chain;
            for (Index q = 1; q < p; ++q) chain.push_back(&v.base.core(q - 1));
            chain.push_back(&v.u_at(p));
            for (Index q = p + 1; q <= p + len - 2; ++q) chain.push_back(&v.z_at(q));
            chain.push_back(&v.v_at(p + len - 1));
            for (Index q = p + len; q <= d; ++q) chain.push_back(&v.base.core(q - 1));
            terms.push_back(fold(chain));
        }
    }
    return terms;
}

/// Zero cone vector at a base: all blocks zero, all channel widths zero.
inline TangentConeVector zero_cone_vector(const TTTensor& base_in, std::vector<Index> slack) {
    TangentConeVector v;
    v.base = ensure_left_orthogonal(base_in);
    const Index d = v.base.order();
    if (static_cast<Index>(slack.size()) != d - 1)
        throw DimsMismatch("slack must have length d-1");
    const Dims dims = v.base.dims();
    const Dims ranks = v.base.ranks();
    v.slack = std::move(slack);
    v.effective_slack.assign(static_cast<std::size_t>(d - 1), 0);
    v.X.resize(static_cast<std::size_t>(d));
    v.U.resize(static_cast<std::size_t>(d - 1));
    v.V.resize(static_cast<std::size_t>(d - 1));
    if (d >= 3) v.Z.resize(static_cast<std::size_t>(d - 2));
    v.X[0] = DenseTensor({dims[0], ranks[0]});
    v.U[0] = DenseTensor({dims[0], 0});
    for (Index p = 2; p <= d - 1; ++p) {
        const Index kp = ranks[static_cast<std::size_t>(p - 2)];
        const Index kc = ranks[static_cast<std::size_t>(p - 1)];
        const Index n = dims[static_cast<std::size_t>(p - 1)];
        v.X[static_cast<std::size_t>(p - 1)] = DenseTensor({kp, n, kc});
        v.U[static_cast<std::size_t>(p - 1)] = DenseTensor({kp, n, 0});
        v.V[static_cast<std::size_t>(p - 2)] = DenseTensor({0, n, kc});
        v.Z[static_cast<std::size_t>(p - 2)] = DenseTensor({0, n, 0});
    }
    v.X[static_cast<std::size_t>(d - 1)] =
        DenseTensor({ranks[static_cast<std::size_t>(d - 2)], dims[static_cast<std::size_t>(d - 1)]});
    v.V[static_cast<std::size_t>(d - 2)] = DenseTensor({0, dims[static_cast<std::size_t>(d - 1)]});
    v.validate();
    return v;
}

/// X and V blocks scaled by a factor; matches the t-placement of the curve,
/// so the represented vector scales by the same factor.
inline TangentConeVector scale(const TangentConeVector& v, double factor) {
    TangentConeVector out = v;
    for (auto& block : out.X)
        for (auto& x : block.data()) x *= factor;
    for (auto& block : out.V)
        for (auto& x : block.data()) x *= factor;
    return out;
}

/// Largest normalized residuals of the three orthogonality constraint
/// families of the parametrization.
struct ConstraintResiduals {
    double u_channel = 0.0;  // (Ai^R)^T Ui^R = 0,  i = 1..d-1
    double x_channel = 0.0;  // (Ai^R)^T Xi^R = 0,  i = 1..d-1
    double v_channel = 0.0;  // (Vi A_{i+1}..A_d)^L ((A_i..A_d)^L)^T = 0,  i = 2..d

    double max() const { return std::max(u_channel, std::max(x_channel, v_channel)); }
};

inline ConstraintResiduals tc_constraint_residuals(const TangentConeVector& v) {
    v.validate();
    const Index d = v.base.order();
    const std::vector<Matrix> right = detail::right_interfaces(v.base);
    ConstraintResiduals out;

    // Residuals are measured against the overall block magnitude of the
    // vector, not each block's own norm: a block that is forced to zero by
    // its constraint (empty orthogonal complement) carries only floating
    // noise, and noise over noise would read as a full violation.
    double scale = 0.0;
    for (const auto* family : {&v.X, &v.U, &v.V, &v.Z})
        for (const auto& block : *family) scale = std::max(scale, norm(block));
    if (scale == 0.0) return out;

    for (Index p = 1; p <= d - 1; ++p) {
        const Matrix ar = right_unfolding(v.base.core(p - 1));
        const Matrix ur = right_unfolding(v.u_at(p));
        const Matrix xr = right_unfolding(v.x_at(p));
        if (ur.cols() > 0)
            out.u_channel = std::max(out.u_channel, (ar.transpose() * ur).norm() / scale);
        out.x_channel = std::max(out.x_channel, (ar.transpose() * xr).norm() / scale);
    }
    for (Index p = 2; p <= d; ++p) {
        const Matrix& ri = right[static_cast<std::size_t>(p)];
        Matrix w;
        if (p < d) {
            const DenseTensor& vb = v.v_at(p);
            const Matrix flat = right_unfolding(vb) * right[static_cast<std::size_t>(p + 1)];
            w = reshape_rowmajor(flat, vb.dim(0), vb.dim(1) * right[static_cast<std::size_t>(p + 1)].cols());
        } else {
            w = left_unfolding(v.v_at(d));
        }
        if (w.rows() == 0 || ri.norm() == 0.0) continue;
        out.v_channel = std::max(out.v_channel, (w * ri.transpose()).norm() / (scale * ri.norm()));
    }
    return out;
}

/// Per-split certificate of the implicit membership test.
struct SplitCertificate {
    Index split = 0;
    Index slack_bound = 0;
    Index residual_rank = 0;
    bool member = false;
    Vector spectrum;
};

struct ConeMembership {
    bool member = true;
    std::vector<SplitCertificate> splits;
};

/// Implicit membership test: at every split i the residual
/// (I - P_i) X^(i) (I - Q_i) must have rank at most s_i, where P_i and Q_i
/// project onto the column and row space of the i-th matricization of the
/// base point. Never calls the extraction path.
inline ConeMembership tc_membership(const TTTensor& base, const DenseTensor& x,
                                    const std::vector<Index>& slack, const Tolerance& tol = {}) {
    const Index d = base.order();
    if (x.dims() != base.dims())
        throw DimsMismatch("vector dims " + dims_to_string(x.dims()) + " do not match base dims " +
                           dims_to_string(base.dims()));
    if (static_cast<Index>(slack.size()) != d - 1)
        throw DimsMismatch("slack must have length d-1");
    for (Index s : slack)
        if (s < 0) throw DimsMismatch("slack bounds must be nonnegative");

    const DenseTensor base_dense = tt_evaluate(base);
    const Dims ranks = base.ranks();
    const double scale_x = norm(x);

    ConeMembership out;
    for (Index i = 1; i <= d - 1; ++i) {
        const Matrix amat = matricize(base_dense, i).matrix;
        if (numerical_rank(amat, tol) != ranks[static_cast<std::size_t>(i - 1)])
            throw RankDeficientBase("base matricization " + std::to_string(i) +
                                    " does not have the declared rank " +
                                    std::to_string(ranks[static_cast<std::size_t>(i - 1)]));
        const Matrix xmat = matricize(x, i).matrix;
        const Matrix ap = pseudoinverse(amat, tol);
        const Matrix xp = xmat - amat * (ap * xmat);
        const Matrix res = xp - (xp * ap) * amat;
        const ThinSvd svd = thin_svd(res);
        Tolerance rt = tol;
        if (rt.scale == 0.0) rt.scale = scale_x;
        const Index rank = rank_from_spectrum(svd.sigma, res.rows(), res.cols(), rt);
        const Index bound = slack[static_cast<std::size_t>(i - 1)];
        out.splits.push_back({i, bound, rank, rank <= bound, svd.sigma});
        out.member = out.member && rank <= bound;
    }
    return out;
}

/// Recover the block parametrization of an ambient vector at a base point:
/// one s-decomposition per split, swept left to right. The sweep carries the
/// orthonormal slack channel O, the through-rows T and the slack rows P of
/// the most recent split; the blocks of core p come out as U_p = L^T O,
/// X_p = L^T S, V_p = P R^+ and Z_p = O_prev^+ (O - L L^T O), with L and R
/// the left/right interfaces next to the split.
inline TangentConeVector tc_extract(const TTTensor& base_in, const DenseTensor& x,
                                    std::vector<Index> slack, const Tolerance& tol = {}) {
    const TTTensor base = ensure_left_orthogonal(base_in);
    const Index d = base.order();
    if (x.dims() != base.dims())
        throw DimsMismatch("vector dims " + dims_to_string(x.dims()) + " do not match base dims " +
                           dims_to_string(base.dims()));
    if (static_cast<Index>(slack.size()) != d - 1)
        throw DimsMismatch("slack must have length d-1");
    for (Index s : slack)
        if (s < 0) throw DimsMismatch("slack bounds must be nonnegative");

    const Dims dims = base.dims();
    const Dims ranks = base.ranks();

    // the sweep assumes the base sits exactly at its declared ranks
    {
        const RankProfile profile = rank_profile(tt_evaluate(base), tol);
        if (profile.ranks != std::vector<Index>(ranks.begin(), ranks.end()))
            throw RankDeficientBase("base ranks are not exactly the declared bond sizes");
    }

    const std::vector<Matrix> right = detail::right_interfaces(base);
    const double scale_x = norm(x);
    constexpr double kChannelDefectTol = 1e-6;

    TangentConeVector v;
    v.base = base;
    v.slack = std::move(slack);
    v.effective_slack.assign(static_cast<std::size_t>(d - 1), 0);
    v.X.resize(static_cast<std::size_t>(d));
    v.U.resize(static_cast<std::size_t>(d - 1));
    v.V.resize(static_cast<std::size_t>(d - 1));
    if (d >= 3) v.Z.resize(static_cast<std::size_t>(d - 2));

    // split 1: plain matrix s-decomposition against the first core and the
    // right interface
    const Matrix a1 = left_unfolding(base.core(0));
    Matrix carried_u;  // orthonormal slack channel of the previous split
    Matrix carried_t;  // through-rows of the previous split
    Matrix carried_p;  // slack rows of the previous split
    {
        const Matrix xmat = matricize(x, 1).matrix;
        MatrixSDecomposition dec;
        try {
            dec = s_decompose(xmat, a1, right[2], v.slack[0], tol);
        } catch (const NotInCone& e) {
            throw NotInCone("split 1: " + std::string(e.what()), 1, e.residual_rank, e.slack_bound);
        }
        // a full first bond leaves no room orthogonal to A1; the block is
        // structurally zero and keeping the floating noise would break the
        // constraint families downstream
        v.X[0] = dims[0] == ranks[0] ? DenseTensor({dims[0], ranks[0]})
                                     : tensorize(dec.Xhat, {dims[0], ranks[0]});
        v.U[0] = tensorize(dec.U, {dims[0], dec.effective_slack});
        v.effective_slack[0] = dec.effective_slack;
        carried_u = dec.U;
        carried_t = dec.Y;
        carried_p = dec.V;
    }

    Matrix left = a1;        // (n1...n_{pos-1}) x k_{pos-1}
    Index prefix = dims[0];  // n1...n_{pos-1}

    for (Index pos = 2; pos <= d - 1; ++pos) {
        const Index n = dims[static_cast<std::size_t>(pos - 1)];
        const Index k_prev = ranks[static_cast<std::size_t>(pos - 2)];
        const Index k_cur = ranks[static_cast<std::size_t>(pos - 1)];
        const Index s_prev = v.effective_slack[static_cast<std::size_t>(pos - 2)];

        const Matrix lnext =
            reshape_rowmajor(left * left_unfolding(base.core(pos - 1)), prefix * n, k_cur);
        const Matrix xmat = matricize(x, pos).matrix;

        MatrixSDecomposition dec;
        try {
            dec = s_decompose(xmat, lnext, right[static_cast<std::size_t>(pos + 1)],
                              v.slack[static_cast<std::size_t>(pos - 1)], tol);
        } catch (const NotInCone& e) {
            throw NotInCone("split " + std::to_string(pos) + ": " + std::string(e.what()),
                            pos, e.residual_rank, e.slack_bound);
        }
        const Index s_cur = dec.effective_slack;
        v.effective_slack[static_cast<std::size_t>(pos - 1)] = s_cur;

        // structurally forced-zero blocks (no room orthogonal to the core)
        const bool x_forced_zero = k_prev * n == k_cur;
        const bool v_forced_zero = n * k_cur == k_prev;

        const Matrix oview = reshape_rowmajor(dec.U, prefix, n * s_cur);
        const Matrix udot = left.transpose() * oview;
        v.U[static_cast<std::size_t>(pos - 1)] =
            x_forced_zero ? DenseTensor({k_prev, n, s_cur}) : tensorize(udot, {k_prev, n, s_cur});

        const Matrix sview = reshape_rowmajor(dec.Xhat, prefix, n * k_cur);
        v.X[static_cast<std::size_t>(pos - 1)] =
            x_forced_zero ? DenseTensor({k_prev, n, k_cur})
                          : tensorize(left.transpose() * sview, {k_prev, n, k_cur});

        const Matrix pview = reshape_rowmajor(carried_p, s_prev * n, xmat.cols());
        v.V[static_cast<std::size_t>(pos - 2)] =
            v_forced_zero ? DenseTensor({s_prev, n, k_cur})
                          : tensorize(pview * pseudoinverse(right[static_cast<std::size_t>(pos + 1)], tol),
                                      {s_prev, n, k_cur});

        const Matrix ohat = oview - left * udot;
        const Matrix zflat = pseudoinverse(carried_u, tol) * ohat;
        const double defect = (ohat - carried_u * zflat).norm();
        if (defect > kChannelDefectTol * std::max(scale_x, 1e-300))
            throw DegenerateChannels(
                "slack channel carried from split " + std::to_string(pos - 1) +
                " cannot absorb the channel found at split " + std::to_string(pos) +
                " (defect " + std::to_string(defect) + ")");
        v.Z[static_cast<std::size_t>(pos - 2)] = tensorize(zflat, {s_prev, n, s_cur});

        carried_u = dec.U;
        carried_t = dec.Y;
        carried_p = dec.V;
        left = lnext;
        prefix *= n;
    }

    v.X[static_cast<std::size_t>(d - 1)] =
        tensorize(carried_t, {ranks[static_cast<std::size_t>(d - 2)], dims[static_cast<std::size_t>(d - 1)]});
    v.V[static_cast<std::size_t>(d - 2)] = tensorize(
        carried_p, {v.effective_slack[static_cast<std::size_t>(d - 2)], dims[static_cast<std::size_t>(d - 1)]});
    v.validate();
    return v;
}

/// Deterministic in-cone direction: Gaussian blocks pushed onto the
/// constraint set by projection. Channel widths are the slack bounds clamped
/// to the structural room at each split, so effective slacks equal the
/// bounds for feasible requests.
inline TangentConeVector random_cone_vector(const TTTensor& base_in,
                                            const std::vector<Index>& slack, std::uint64_t seed) {
    const TTTensor base = ensure_left_orthogonal(base_in);
    const Index d = base.order();
    if (static_cast<Index>(slack.size()) != d - 1)
        throw DimsMismatch("slack must have length d-1");
    for (Index s : slack)
        if (s < 0) throw DimsMismatch("slack bounds must be nonnegative");
    const Dims dims = base.dims();
    const Dims ranks = base.ranks();
    const Tolerance tol;

    // Realized channel widths: the U channel at split i lives in a space of
    // dimension (k_{i-1} + w_{i-1}) n_i - k_i and the V channel in one of
    // dimension (k_{i+1} + w_{i+1}) n_{i+1} - k_i (chain ends contribute
    // k_0 = k_d = 1, w_0 = w_d = 0). Widths are the fixed point of clamping
    // the requested slacks by both rooms; it is reached after at most d
    // sweeps since widths only shrink.
    std::vector<Index> widths(slack.begin(), slack.end());
    auto k_at = [&](Index i) { return (i == 0 || i == d) ? Index{1} : ranks[static_cast<std::size_t>(i - 1)]; };
    for (bool changed = true; changed;) {
        changed = false;
        for (Index i = 1; i <= d - 1; ++i) {
            const Index w_left = i >= 2 ? widths[static_cast<std::size_t>(i - 2)] : 0;
            const Index w_right = i <= d - 2 ? widths[static_cast<std::size_t>(i)] : 0;
            const Index left_room = (k_at(i - 1) + w_left) * dims[static_cast<std::size_t>(i - 1)] - k_at(i);
            const Index right_room = (k_at(i + 1) + w_right) * dims[static_cast<std::size_t>(i)] - k_at(i);
            const Index w = std::max<Index>(std::min({slack[static_cast<std::size_t>(i - 1)], left_room, right_room}), 0);
            if (w != widths[static_cast<std::size_t>(i - 1)]) {
                widths[static_cast<std::size_t>(i - 1)] = w;
                changed = true;
            }
        }
    }

    const std::vector<Matrix> right = detail::right_interfaces(base);
    RandomStream rng(seed);

    TangentConeVector v;
    v.base = base;
    v.slack = slack;
    v.effective_slack = widths;
    v.X.resize(static_cast<std::size_t>(d));
    v.U.resize(static_cast<std::size_t>(d - 1));
    v.V.resize(static_cast<std::size_t>(d - 1));
    if (d >= 3) v.Z.resize(static_cast<std::size_t>(d - 2));

    {
        const Matrix a1 = left_unfolding(base.core(0));
        Matrix x1 = rng.gaussian_matrix(dims[0], ranks[0]);
        x1 -= a1 * (a1.transpose() * x1);
        v.X[0] = dims[0] == ranks[0] ? DenseTensor({dims[0], ranks[0]})
                                     : tensorize(x1, {dims[0], ranks[0]});
        Matrix u1 = rng.gaussian_matrix(dims[0], widths[0]);
        u1 -= a1 * (a1.transpose() * u1);
        v.U[0] = tensorize(u1, {dims[0], widths[0]});
    }
    for (Index pos = 2; pos <= d - 1; ++pos) {
        const Index n = dims[static_cast<std::size_t>(pos - 1)];
        const Index k_prev = ranks[static_cast<std::size_t>(pos - 2)];
        const Index k_cur = ranks[static_cast<std::size_t>(pos - 1)];
        const Index s_prev = widths[static_cast<std::size_t>(pos - 2)];
        const Index s_cur = widths[static_cast<std::size_t>(pos - 1)];
        const Matrix ar = right_unfolding(base.core(pos - 1));
        const bool x_forced_zero = k_prev * n == k_cur;  // empty complement of A^R
        const bool v_forced_zero = n * k_cur == k_prev;

        Matrix xr = rng.gaussian_matrix(k_prev * n, k_cur);
        xr -= ar * (ar.transpose() * xr);
        v.X[static_cast<std::size_t>(pos - 1)] =
            x_forced_zero ? DenseTensor({k_prev, n, k_cur}) : tensorize(xr, {k_prev, n, k_cur});

        Matrix ur = rng.gaussian_matrix(k_prev * n, s_cur);
        ur -= ar * (ar.transpose() * ur);
        v.U[static_cast<std::size_t>(pos - 1)] =
            x_forced_zero ? DenseTensor({k_prev, n, s_cur}) : tensorize(ur, {k_prev, n, s_cur});

        DenseTensor vb = rng.gaussian_tensor({s_prev, n, k_cur});
        if (v_forced_zero) {
            vb = DenseTensor({s_prev, n, k_cur});
        } else if (s_prev > 0) {
            // push the rows of (V R_{pos+1}) out of the row space of R_pos
            const Matrix& rnext = right[static_cast<std::size_t>(pos + 1)];
            const Matrix w = reshape_rowmajor(right_unfolding(vb) * rnext, s_prev, n * rnext.cols());
            const Matrix corr =
                (w * pseudoinverse(right[static_cast<std::size_t>(pos)], tol)) * left_unfolding(base.core(pos - 1));
            vb = tensorize(left_unfolding(vb) - corr, {s_prev, n, k_cur});
        }
        v.V[static_cast<std::size_t>(pos - 2)] = std::move(vb);

        v.Z[static_cast<std::size_t>(pos - 2)] = rng.gaussian_tensor({s_prev, n, s_cur});
    }
    v.X[static_cast<std::size_t>(d - 1)] =
        rng.gaussian_tensor({ranks[static_cast<std::size_t>(d - 2)], dims[static_cast<std::size_t>(d - 1)]});
    {
        const Matrix ad = left_unfolding(base.core(d - 1));
        Matrix vd = rng.gaussian_matrix(widths[static_cast<std::size_t>(d - 2)],
                                        dims[static_cast<std::size_t>(d - 1)]);
        vd -= (vd * pseudoinverse(ad, tol)) * ad;
        v.V[static_cast<std::size_t>(d - 2)] =
            tensorize(vd, {widths[static_cast<std::size_t>(d - 2)], dims[static_cast<std::size_t>(d - 1)]});
    }
    v.validate();
    return v;
}

/// Column blocks of the partial chain contractions: after core i the chain
/// (A1 U1 X1)(...) contracts to (L_i | B_i | C_i) with L_i the base
/// interface, B_i the slack channel and C_i the X channel.
struct ChannelInterfaces {
    std::vector<Matrix> left;  // L_i, i = 1..d-1
    std::vector<Matrix> u;     // B_i
    std::vector<Matrix> x;     // C_i
};

inline ChannelInterfaces cone_channel_interfaces(const TangentConeVector& v) {
    v.validate();
    const Index d = v.base.order();
    const Dims ranks = v.base.ranks();
    ChannelInterfaces out;
    Matrix acc = left_unfolding(detail::cone_first_factor(v));
    Index prefix = v.base.dims()[0];
    for (Index i = 1; i <= d - 1; ++i) {
        const Index k = ranks[static_cast<std::size_t>(i - 1)];
        const Index s = v.effective_slack[static_cast<std::size_t>(i - 1)];
        out.left.push_back(acc.leftCols(k));
        out.u.push_back(acc.middleCols(k, s));
        out.x.push_back(acc.rightCols(k));
        if (i == d - 1) break;
        const DenseTensor factor = detail::cone_middle_factor(v, i + 1);
        const Index n = v.base.dims()[static_cast<std::size_t>(i)];
        const Index width = ranks[static_cast<std::size_t>(i)] + v.effective_slack[static_cast<std::size_t>(i)] +
                            ranks[static_cast<std::size_t>(i)];
        acc = reshape_rowmajor(acc * left_unfolding(factor), prefix * n, width);
        prefix *= n;
    }
    return out;
}

} // namespace ttcone
