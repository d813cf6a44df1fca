#include <gtest/gtest.h>

#include <array>

#include "test_support.hpp"

using namespace ttcone;

namespace {

TangentConeVector sample_vector(const Dims& dims, const std::vector<Index>& ranks,
                                const std::vector<Index>& slack, std::uint64_t seed) {
    const TTTensor base = ttt::random_left_orthogonal_base(dims, ranks, seed);
    return random_cone_vector(base, slack, seed + 1);
}

constexpr std::array<Index, 5> kDefaultSecants = {8, 16, 32, 64, 128};

} // namespace

TEST(SecantLimit, ZeroVectorIsDegenerateTrue) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 3, 3}, {1, 1}, 100);
    const TangentConeVector v = zero_cone_vector(base, {1, 1});
    const SecantReport rep = secant_limit_check(v, kDefaultSecants);
    EXPECT_TRUE(rep.verdict);
    EXPECT_TRUE(rep.degenerate);
    for (const auto& [m, err] : rep.errors) EXPECT_LE(err, 1e-12);
}

TEST(SecantLimit, GenericRatiosNearOneHalf) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TangentConeVector v = sample_vector({3, 3, 3}, {1, 1}, {1, 1}, 10100 + seed);
        const SecantReport rep = secant_limit_check(v, kDefaultSecants);
        EXPECT_TRUE(rep.verdict) << "seed " << seed;
        EXPECT_FALSE(rep.degenerate);
        for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i) {
            const double ratio = rep.errors[i + 1].second / rep.errors[i].second;
            EXPECT_NEAR(ratio, 0.5, 0.1) << "seed " << seed << " pair " << i;
        }
        EXPECT_NEAR(rep.estimated_rate, 1.0, 0.1);
    }
}

TEST(SecantLimit, LastCoreOnlyDirectionIsLinear) {
    // with only X_d set the curve is affine in t, so the secant error vanishes
    const TTTensor base = ttt::random_left_orthogonal_base({3, 2, 3}, {1, 1}, 102);
    TangentConeVector v = zero_cone_vector(base, {1, 1});
    v.X.back() = ttt::gaussian_tensor({1, 3}, 103);
    const SecantReport rep = secant_limit_check(v, kDefaultSecants);
    EXPECT_TRUE(rep.degenerate);
    EXPECT_TRUE(rep.verdict);
}

TEST(SecantLimit, RejectsBadInput) {
    const TangentConeVector v = sample_vector({3, 3}, {1}, {1}, 104);
    EXPECT_THROW(secant_limit_check(v, std::vector<Index>{8, 16}), std::invalid_argument);
    EXPECT_THROW(secant_limit_check(v, std::vector<Index>{16, 8, 32}), std::invalid_argument);
}

TEST(FirstDerivativeCertificate, HoldsForGeneratedVectors) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const TangentConeVector v = sample_vector({3, 2, 3}, {1, 1}, {1, 1}, 10500 + seed);
        EXPECT_TRUE(first_derivative_certificate(v)) << "seed " << seed;
    }
}

TEST(FirstDerivativeCertificate, HoldsForTheZeroVector) {
    const TTTensor base = ttt::random_left_orthogonal_base({3, 3, 3}, {2, 2}, 106);
    EXPECT_TRUE(first_derivative_certificate(zero_cone_vector(base, {1, 1})));
}

TEST(FirstDerivativeCertificate, OrthogonalityIsANormalFormNotMembership) {
    // skip every projection: the blocks violate the constraint families, yet
    // the curve argument still certifies a valid direction
    const TTTensor base = ttt::random_left_orthogonal_base({3, 3, 3}, {1, 1}, 107);
    TangentConeVector v = zero_cone_vector(base, {1, 1});
    RandomStream rng(108);
    v.effective_slack = {1, 1};
    v.X[0] = rng.gaussian_tensor({3, 1});
    v.U[0] = rng.gaussian_tensor({3, 1});
    v.X[1] = rng.gaussian_tensor({1, 3, 1});
    v.U[1] = rng.gaussian_tensor({1, 3, 1});
    v.V[0] = rng.gaussian_tensor({1, 3, 1});
    v.Z[0] = rng.gaussian_tensor({1, 3, 1});
    v.X[2] = rng.gaussian_tensor({1, 3});
    v.V[1] = rng.gaussian_tensor({1, 3});
    v.validate();

    EXPECT_TRUE(first_derivative_certificate(v));
    EXPECT_GT(tc_constraint_residuals(v).max(), 1e-3);  // the invariant suite flags it
}

TEST(ThreeRoutesAgree, GeneratedVectorsPassAllCertificates) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dims dims{3, 3, 3};
        const std::vector<Index> slack{1, 1};
        const TTTensor base = ttt::random_left_orthogonal_base(dims, {1, 1}, 10900 + seed);
        const TangentConeVector v = random_cone_vector(base, slack, 10950 + seed);
        const DenseTensor x = tc_evaluate(v);

        EXPECT_TRUE(tc_membership(base, x, slack).member);
        EXPECT_NO_THROW(tc_extract(base, x, slack));
        EXPECT_TRUE(secant_limit_check(v, kDefaultSecants).verdict);
        EXPECT_TRUE(first_derivative_certificate(v));
    }
}
