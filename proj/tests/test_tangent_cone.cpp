#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace ttcone;

namespace {

TangentConeVector sample_vector(const Dims& dims, const std::vector<Index>& ranks,
                                const std::vector<Index>& slack, std::uint64_t seed) {
    const TTTensor base = ttt::random_left_orthogonal_base(dims, ranks, seed);
    return random_cone_vector(base, slack, seed + 1);
}

} // namespace

TEST(TcEvaluate, ZeroBlocksGiveZeroTensor) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 3, 3}, {1, 1}, 2);
    const TangentConeVector v = zero_cone_vector(base, {1, 1});
    const DenseTensor out = tc_evaluate(v);
    EXPECT_EQ(out.dims(), base.dims());
    EXPECT_EQ(norm(out), 0.0);
}

TEST(TcEvaluate, LastCoreScalingDirection) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 2, 3}, {2, 2}, 3);
    TangentConeVector v = zero_cone_vector(base, {0, 0});
    const double c = -1.75;
    v.X.back() = c * base.core(base.order() - 1);
    const DenseTensor got = tc_evaluate(v);
    const DenseTensor want = c * tt_evaluate(base);
    EXPECT_LE(ttt::rel_err(got, want), 1e-13);
}

TEST(TcEvaluate, MatchesTermByTermOracle) {
    const TangentConeVector v = sample_vector({3, 3, 3}, {1, 1}, {1, 1}, 10);
    // independent route: build each expansion term with the summation oracle
    const Index d = 3;
    std::vector<std::vector<const DenseTensor*>> chains;
    for (Index p = 1; p <= d; ++p) {
        std::vector<const DenseTensor*> chain;
        for (Index q = 1; q <= d; ++q) chain.push_back(q == p ? &v.x_at(q) : &v.base.core(q - 1));
        chains.push_back(chain);
    }
    for (Index len = 2; len <= d; ++len)
        for (Index p = 1; p + len - 1 <= d; ++p) {
            std::vector<const DenseTensor*> chain;
            for (Index q = 1; q < p; ++q) chain.push_back(&v.base.core(q - 1));
            chain.push_back(&v.u_at(p));
            for (Index q = p + 1; q <= p + len - 2; ++q) chain.push_back(&v.z_at(q));
            chain.push_back(&v.v_at(p + len - 1));
            for (Index q = p + len; q <= d; ++q) chain.push_back(&v.base.core(q - 1));
            chains.push_back(chain);
        }
    DenseTensor want(v.base.dims());
    for (const auto& chain : chains) {
        DenseTensor acc = *chain.front();
        for (std::size_t i = 1; i < chain.size(); ++i) acc = ttt::oracle_tt_product(acc, *chain[i]);
        want = want + acc;
    }
    EXPECT_LE(ttt::rel_err(tc_evaluate(v), want), 1e-12);
}

TEST(TcOrthogonalTerms, CountsAndSum) {
    const TangentConeVector v2 = sample_vector({4, 4}, {2}, {1}, 20);
    const auto terms2 = tc_orthogonal_terms(v2);
    EXPECT_EQ(terms2.size(), 3u);

    const TangentConeVector v3 = sample_vector({3, 3, 3}, {1, 1}, {1, 1}, 21);
    const auto terms3 = tc_orthogonal_terms(v3);
    EXPECT_EQ(terms3.size(), 6u);

    DenseTensor sum(v3.base.dims());
    for (const auto& t : terms3) sum = sum + t;
    EXPECT_LE(ttt::rel_err(sum, tc_evaluate(v3)), 1e-12);
}

TEST(TcOrthogonalTerms, PairwiseOrthogonal) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TangentConeVector v = sample_vector({3, 2, 3, 2}, {2, 2, 2}, {1, 1, 1}, 30 + seed);
        const auto terms = tc_orthogonal_terms(v);
        EXPECT_EQ(terms.size(), 10u);
        double top = 0.0;
        for (const auto& t : terms) top = std::max(top, norm(t));
        for (std::size_t i = 0; i < terms.size(); ++i)
            for (std::size_t j = i + 1; j < terms.size(); ++j) {
                const double ni = norm(terms[i]);
                const double nj = norm(terms[j]);
                if (ni <= 1e-12 * top || nj <= 1e-12 * top) continue;  // zero summands
                EXPECT_LE(std::abs(inner(terms[i], terms[j])), 1e-11 * ni * nj)
                    << "terms " << i << "," << j << " at seed " << seed;
            }
    }
}

TEST(RandomConeVector, ZeroSlackHasNoChannels) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 3, 3}, {2, 2}, 40);
    const TangentConeVector v = random_cone_vector(base, {0, 0}, 41);
    EXPECT_EQ(v.effective_slack, (std::vector<Index>{0, 0}));
    EXPECT_EQ(v.u_at(1).dims().back(), 0);
    EXPECT_EQ(v.u_at(2).dims().back(), 0);
    EXPECT_EQ(v.v_at(2).dims().front(), 0);
    EXPECT_EQ(v.v_at(3).dims().front(), 0);
    EXPECT_GT(norm(v.x_at(1)), 0.0);
}

TEST(RandomConeVector, DeterministicInSeed) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 2, 3}, {1, 1}, 42);
    const TangentConeVector a = random_cone_vector(base, {1, 1}, 99);
    const TangentConeVector b = random_cone_vector(base, {1, 1}, 99);
    EXPECT_EQ(ttt::max_abs_diff(tc_evaluate(a), tc_evaluate(b)), 0.0);
    for (std::size_t i = 0; i < a.X.size(); ++i)
        EXPECT_EQ(a.X[i].data(), b.X[i].data());
}

TEST(RandomConeVector, SatisfiesConstraintFamilies) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const TangentConeVector v = sample_vector({3, 3, 3}, {1, 2}, {2, 1}, 900 + seed);
        EXPECT_LE(tc_constraint_residuals(v).max(), 1e-11) << "seed " << seed;
    }
}

TEST(RandomConeVector, ClampsInfeasibleSlack) {
    // n1 - k1 = 1 leaves room for one channel column only
    const TTTensor base = ttt::random_left_orthogonal_base({2, 2, 2}, {1, 1}, 44);
    const TangentConeVector v = random_cone_vector(base, {2, 2}, 45);
    EXPECT_EQ(v.effective_slack[0], 1);
    EXPECT_EQ(v.effective_slack[1], 1);
    EXPECT_LE(tc_constraint_residuals(v).max(), 1e-11);
}

TEST(TcExtract, ZeroVector) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 2, 3}, {2, 1}, 50);
    const DenseTensor zero(base.dims());
    const TangentConeVector v = tc_extract(base, zero, {1, 1});
    EXPECT_EQ(v.effective_slack, (std::vector<Index>{0, 0}));
    for (const auto& block : v.X) EXPECT_EQ(norm(block), 0.0);
    EXPECT_EQ(norm(tc_evaluate(v)), 0.0);
}

TEST(TcExtract, BasePointIsItsOwnDirection) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 2, 3}, {2, 1}, 51);
    const DenseTensor a = tt_evaluate(base);
    const TangentConeVector v = tc_extract(base, a, {1, 1});
    EXPECT_EQ(v.effective_slack, (std::vector<Index>{0, 0}));
    const Index d = base.order();
    for (Index p = 1; p < d; ++p) EXPECT_LE(norm(v.x_at(p)), 1e-11 * norm(a));
    EXPECT_LE(norm(v.x_at(d) - base.core(d - 1)), 1e-11 * norm(a));
    EXPECT_LE(ttt::rel_err(tc_evaluate(v), a), 1e-10);
}

TEST(TcExtract, RoundTripWithGaugeInvariantChannels) {
    const Dims dims{3, 3, 3};
    const std::vector<Index> ranks{1, 1};
    const std::vector<Index> slack{1, 1};
    const TTTensor base = ttt::random_left_orthogonal_base(dims, ranks, 52);
    const TangentConeVector v0 = random_cone_vector(base, slack, 53);
    const DenseTensor x = tc_evaluate(v0);
    const TangentConeVector v = tc_extract(base, x, slack);
    EXPECT_LE(ttt::rel_err(tc_evaluate(v), x), 1e-9);
    EXPECT_EQ(v.effective_slack, v0.effective_slack);

    // channel subspaces are gauge-invariant: compare via projectors
    const ChannelInterfaces ci0 = cone_channel_interfaces(v0);
    const ChannelInterfaces ci = cone_channel_interfaces(v);
    for (std::size_t i = 0; i < ci.u.size(); ++i)
        EXPECT_LE(ttt::projector_gap(ci.u[i], ci0.u[i]), 1e-8) << "split " << (i + 1);
    EXPECT_LE(ttt::projector_gap(Matrix(left_unfolding(v.v_at(3)).transpose()),
                                 Matrix(left_unfolding(v0.v_at(3)).transpose())),
              1e-8);
    EXPECT_LE(tc_constraint_residuals(v).max(), 1e-11);
}

TEST(TcExtract, OutOfConeRaisesWithSplit) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 3, 3}, {1, 1}, 54);
    const DenseTensor g = ttt::gaussian_tensor({3, 3, 3}, 55);
    try {
        tc_extract(base, g, {0, 0});
        FAIL() << "expected NotInCone";
    } catch (const NotInCone& e) {
        EXPECT_EQ(e.split, 1);
        EXPECT_GT(e.residual_rank, 0);
    }
}

TEST(TcExtract, RejectsRankDeficientBase) {
    // bond says 2 but the second factor kills one direction
    RandomStream rng(56);
    std::vector<DenseTensor> cores;
    cores.push_back(rng.gaussian_tensor({3, 2}));
    DenseTensor middle = rng.gaussian_tensor({2, 3, 2});
    // make the right unfolding rank deficient: second bond column = first
    for (Index r = 0; r < 2; ++r)
        for (Index j = 0; j < 3; ++j) middle.at({r, j, 1}) = middle.at({r, j, 0});
    cores.push_back(middle);
    cores.push_back(rng.gaussian_tensor({2, 3}));
    const TTTensor degenerate = left_orthogonalize(TTTensor(std::move(cores)));
    const DenseTensor x = ttt::gaussian_tensor({3, 3, 3}, 57);
    EXPECT_THROW(tc_extract(degenerate, x, {2, 2}), RankDeficientBase);
}

TEST(TcExtract, DimsMismatchThrows) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 2, 3}, {1, 1}, 58);
    const DenseTensor x = ttt::gaussian_tensor({3, 3, 3}, 59);
    EXPECT_THROW(tc_extract(base, x, {1, 1}), DimsMismatch);
    const DenseTensor ok = ttt::gaussian_tensor({3, 2, 3}, 60);
    EXPECT_THROW(tc_extract(base, ok, {1}), DimsMismatch);
    EXPECT_THROW(tc_extract(base, ok, {-1, 1}), DimsMismatch);
}

TEST(TcMembership, CertificatesOnBothSides) {
    const Dims dims{3, 3, 3};
    const TTTensor base = ttt::random_left_orthogonal_base(dims, {1, 1}, 61);
    const TangentConeVector v0 = random_cone_vector(base, {1, 1}, 62);
    const DenseTensor x = tc_evaluate(v0);

    const ConeMembership in = tc_membership(base, x, {1, 1});
    EXPECT_TRUE(in.member);
    for (const auto& s : in.splits) {
        EXPECT_TRUE(s.member);
        EXPECT_LE(s.residual_rank, s.slack_bound);
    }

    const DenseTensor g = ttt::gaussian_tensor(dims, 63);
    const ConeMembership out = tc_membership(base, x + g, {1, 1});
    EXPECT_FALSE(out.member);
    // confirm with the independent residual oracle at split 1
    const Matrix amat = matricize(tt_evaluate(base), 1).matrix;
    const Matrix res = ttt::oracle_projected_residual(matricize(x + g, 1).matrix, amat);
    EXPECT_GT(ttt::oracle_rank(res, 1e-12, norm(x + g)), 1);

    // vacuous bounds accept anything
    EXPECT_TRUE(tc_membership(base, x + g, {3, 3}).member);
}

TEST(TcMembership, AgreesWithExtractionOn200Trials) {
    Index disagreements = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const Dims dims{3, 3, 3};
        const std::vector<Index> ranks{1, 1};
        const std::vector<Index> slack{static_cast<Index>(trial % 2), 1};
        const TTTensor base = ttt::random_left_orthogonal_base(dims, ranks, 5000 + 3 * trial);
        const TangentConeVector v0 = random_cone_vector(base, slack, 5001 + 3 * trial);
        DenseTensor x = tc_evaluate(v0);
        if (trial % 2 == 1) x = x + ttt::gaussian_tensor(dims, 5002 + 3 * trial);
        const bool member = tc_membership(base, x, slack).member;
        bool extracted = true;
        try {
            tc_extract(base, x, slack);
        } catch (const NotInCone&) {
            extracted = false;
        }
        if (member != extracted) ++disagreements;
    }
    EXPECT_EQ(disagreements, 0);
}

TEST(TcCone, ScalingStaysInside) {
    const TangentConeVector v = sample_vector({3, 3, 3}, {1, 1}, {1, 1}, 70);
    const DenseTensor x = tc_evaluate(v);
    const TTTensor& base = v.base;
    for (double lambda : {-1.0, 2.5}) {
        const ConeMembership mem = tc_membership(base, lambda * x, {1, 1});
        EXPECT_TRUE(mem.member) << "lambda " << lambda;
        const TangentConeVector w = tc_extract(base, lambda * x, {1, 1});
        EXPECT_EQ(w.effective_slack, v.effective_slack);
    }
    // scale() realizes the same directions
    EXPECT_LE(ttt::rel_err(tc_evaluate(scale(v, -1.0)), -1.0 * x), 1e-12);
    EXPECT_LE(ttt::rel_err(tc_evaluate(scale(v, 2.5)), 2.5 * x), 1e-12);
}

TEST(TcCone, VacuousSlackAcceptsArbitraryTensors) {
    // with s_i = min(rows, cols) at every split the cone is the whole space,
    // so extraction must round-trip any dense tensor
    const Dims dims{3, 2, 3, 2};
    const TTTensor base = ttt::random_left_orthogonal_base(dims, {1, 2, 1}, 71);
    std::vector<Index> slack;
    Index rows = 1;
    const Index total = element_count(dims);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        rows *= dims[i];
        slack.push_back(std::min(rows, total / rows));
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DenseTensor x = ttt::gaussian_tensor(dims, 7100 + seed);
        EXPECT_TRUE(tc_membership(base, x, slack).member);
        const TangentConeVector v = tc_extract(base, x, slack);
        EXPECT_LE(ttt::rel_err(tc_evaluate(v), x), 1e-9);
        EXPECT_LE(tc_constraint_residuals(v).max(), 1e-10);
    }
}

TEST(TcCone, MonotoneInSlack) {
    const TangentConeVector v = sample_vector({3, 3, 3}, {1, 1}, {1, 0}, 72);
    const DenseTensor x = tc_evaluate(v);
    EXPECT_TRUE(tc_membership(v.base, x, {1, 0}).member);
    EXPECT_TRUE(tc_membership(v.base, x, {1, 1}).member);
    EXPECT_TRUE(tc_membership(v.base, x, {2, 2}).member);
}

TEST(TcCone, ParameterCountMatchesBlockSizes) {
    const TangentConeVector v = sample_vector({3, 2, 4, 3}, {2, 2, 2}, {1, 2, 1}, 73);
    const Dims dims = v.base.dims();
    const Dims ranks = v.base.ranks();
    for (Index p = 2; p <= v.order() - 1; ++p) {
        const Index kp = ranks[p - 2];
        const Index kc = ranks[p - 1];
        const Index sp = v.effective_slack[p - 2];
        const Index sc = v.effective_slack[p - 1];
        const Index n = dims[p - 1];
        const Index have = v.x_at(p).size() + v.u_at(p).size() + v.v_at(p).size() + v.z_at(p).size();
        EXPECT_EQ(have, (kp + sp) * n * (kc + sc));
        // assembled block core: (k+s+k) x n x (k+s+k) with one repeated A
        // and two structural zero blocks
        const DenseTensor factor = cone_block_cores(v)[p - 1];
        EXPECT_EQ(factor.dims(), (Dims{kp + sp + kp, n, kc + sc + kc}));
        const Index zero_blocks = (sp + kp) * n * kc + kp * n * sc;
        EXPECT_EQ(factor.size(), have + 2 * v.base.core(p - 1).size() + zero_blocks);
    }
}

TEST(TcCone, MatrixCaseSpecialization) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Dims dims{4, 5};
        const std::vector<Index> ranks{2};
        const std::vector<Index> slack{1};
        const TTTensor base = ttt::random_left_orthogonal_base(dims, ranks, 6000 + seed);
        const TangentConeVector v0 = random_cone_vector(base, slack, 6100 + seed);
        const DenseTensor x = tc_evaluate(v0);

        const TangentConeVector v = tc_extract(base, x, slack);
        const Matrix a1 = left_unfolding(base.core(0));
        const Matrix a2 = left_unfolding(base.core(1));
        const MatrixSDecomposition dec = s_decompose(matricize(x, 1).matrix, a1, a2, slack[0]);

        EXPECT_EQ(v.effective_slack[0], dec.effective_slack);
        const Matrix recon_v = matricize(tc_evaluate(v), 1).matrix;
        const Matrix recon_m = dec.reconstruct(a1, a2);
        EXPECT_LE((recon_v - recon_m).norm(), 1e-12 * x.data().size() * norm(x));
    }
}
