#include <gtest/gtest.h>

#include <cmath>

#include "pilotguard/adversary.hpp"
#include "pilotguard/channel.hpp"

using namespace pilotguard;

namespace {

ChannelStatistics correlated(int n, double zeta, double sigma_h2 = 0.5, double sigma_g2 = 0.5) {
    ChannelStatistics s;
    s.n = n;
    s.sigma_h2 = sigma_h2;
    s.sigma_g2 = sigma_g2;
    s.zeta = zeta;
    s.mode = CorrelationMode::scalar_diagonal;
    return s;
}

Complex sample_cross(const ComplexMatrix& x, const ComplexMatrix& y) {
    return (x.array() * y.conjugate().array()).sum() / static_cast<double>(x.size());
}

} // namespace

TEST(JointCovariance, IndependentModeIsDiagonal) {
    ChannelStatistics s = correlated(2, 0.7, 1.0, 0.5);
    s.mode = CorrelationMode::independent;
    const JointCovariance c = build_joint_covariance(s);
    Eigen::Matrix3cd want = Eigen::Matrix3cd::Zero();
    want.diagonal() << 1.0, 0.5, 0.5;
    EXPECT_EQ(c.block, want);
}

TEST(JointCovariance, ScalarDiagonalBlock) {
    const JointCovariance c = build_joint_covariance(correlated(2, 0.5));
    Eigen::Matrix3cd want;
    want << 0.5, 0.25, 0.25,
            0.25, 0.5, 0.0625,
            0.25, 0.0625, 0.5;
    EXPECT_LT((c.block - want).norm(), 1e-15);
    EXPECT_LT((c.factor * c.factor.adjoint() - want).norm(), 1e-14);
}

TEST(JointCovariance, ExpandIsKroneckerWithIdentity) {
    const JointCovariance c = build_joint_covariance(correlated(2, 0.3));
    const ComplexMatrix r = c.expand(2);
    ASSERT_EQ(r.rows(), 12);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const ComplexMatrix blk = r.block(4 * a, 4 * b, 4, 4);
            EXPECT_EQ(blk, c.block(a, b) * ComplexMatrix::Identity(4, 4));
        }
    }
}

TEST(JointCovariance, RejectsZetaBeyondPsdBoundary) {
    EXPECT_THROW(build_joint_covariance(correlated(2, 0.9)), NotPsdError);
    try {
        build_joint_covariance(correlated(2, 0.9));
    } catch (const NotPsdError& e) {
        EXPECT_NE(std::string(e.what()).find("zeta = 0.9"), std::string::npos) << e.what();
    }
}

TEST(JointCovariance, PsdBoundaryIsSqrtTwoThirds) {
    EXPECT_NEAR(psd_zeta_boundary(0.5, 0.5), std::sqrt(2.0 / 3.0), 1e-9);
    EXPECT_NO_THROW(build_joint_covariance(correlated(2, 0.8)));
}

TEST(ChannelStatistics, ValidationNamesTheField) {
    ChannelStatistics s = correlated(0, 0.1);
    try {
        s.validate();
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("n", 0), 0U) << e.what();
    }
    s = correlated(2, 0.1, -1.0);
    EXPECT_THROW(s.validate(), ParameterError);
    s = correlated(2, -0.1);
    EXPECT_THROW(s.validate(), ParameterError);
}

TEST(SampleChannelSet, SecondMomentsMatchBlock) {
    const ChannelStatistics s = correlated(100, 0.5);
    RngStream rng(11, 0);
    ComplexMatrix h(100, 1000), g1(100, 1000), g2(100, 1000);
    for (int rep = 0; rep < 10; ++rep) {
        const ChannelSet set = sample_channel_set(s, rng);
        h.middleCols(rep * 100, 100) = set.h;
        g1.middleCols(rep * 100, 100) = set.g1;
        g2.middleCols(rep * 100, 100) = set.g2;
    }
    // 1e5 products with sd below 0.6 each: 5 standard errors is 0.01
    const double tol = 0.01;
    EXPECT_NEAR(sample_cross(h, h).real(), 0.5, tol);
    EXPECT_NEAR(sample_cross(g1, g1).real(), 0.5, tol);
    EXPECT_NEAR(sample_cross(g2, g2).real(), 0.5, tol);
    EXPECT_NEAR(sample_cross(g1, h).real(), 0.25, tol);
    EXPECT_NEAR(sample_cross(g2, h).real(), 0.25, tol);
    EXPECT_NEAR(sample_cross(g1, g2).real(), 0.0625, tol);
    EXPECT_NEAR(sample_cross(g1, h).imag(), 0.0, tol);
    // circular symmetry: E[h g1] (no conjugate) vanishes
    EXPECT_NEAR(std::abs((h.array() * g1.array()).mean()), 0.0, tol);
}

TEST(SampleChannelSet, DeterministicPerStream) {
    const ChannelStatistics s = correlated(3, 0.4);
    RngStream a(5, stream_id(StreamTag::channel, 17));
    RngStream b(5, stream_id(StreamTag::channel, 17));
    const ChannelSet x = sample_channel_set(s, a);
    const ChannelSet y = sample_channel_set(s, b);
    EXPECT_EQ(x.h, y.h);
    EXPECT_EQ(x.g1, y.g1);
    EXPECT_EQ(x.g2, y.g2);
}

TEST(ObserveEstimates, NoAttackNoNoiseIsExact) {
    const ChannelStatistics s = correlated(3, 0.2);
    RngStream rng(1, 0);
    const ChannelSet set = sample_channel_set(s, rng);
    const EstimatePair est = observe_estimates(set, plan_passive(), 0.0, rng);
    EXPECT_EQ(est.h_a, set.h);
    EXPECT_EQ(est.h_b, set.h);
}

TEST(ObserveEstimates, BaselineAddsEveChannel) {
    const ChannelStatistics s = correlated(3, 0.2);
    RngStream rng(1, 0);
    const ChannelSet set = sample_channel_set(s, rng);
    const EstimatePair one = observe_estimates(set, plan_baseline(false, 3), 0.0, rng);
    EXPECT_LT((one.h_a - (set.h + set.g1)).norm(), 1e-15);
    EXPECT_EQ(one.h_b, set.h);
    const EstimatePair both = observe_estimates(set, plan_baseline(true, 3), 0.0, rng);
    EXPECT_LT((both.h_b - (set.h + set.g2)).norm(), 1e-15);
}

TEST(ObserveEstimates, FullKnowledgeEstimateIsEveChannel) {
    const ChannelStatistics s = correlated(4, 0.0);
    RngStream rng(2, 0);
    const ChannelSet set = sample_channel_set(s, rng);
    const EstimatePair est = observe_estimates(set, plan_full_knowledge(set.h, set.g1, set.g2), 0.0, rng);
    EXPECT_LT((est.h_a - set.g1).norm(), 1e-10);
    EXPECT_LT((est.h_b - set.g1).norm(), 1e-10);
}

TEST(ObserveEstimates, NoisePowerIsGamma) {
    ChannelSet set{ComplexMatrix::Zero(200, 200), ComplexMatrix::Zero(200, 200), ComplexMatrix::Zero(200, 200)};
    RngStream rng(3, 0);
    const EstimatePair est = observe_estimates(set, plan_passive(), 0.1, rng);
    EXPECT_NEAR(est.h_a.cwiseAbs2().mean(), 0.1, 5.0 * 0.1 / 200.0);
    EXPECT_NEAR(est.h_b.cwiseAbs2().mean(), 0.1, 5.0 * 0.1 / 200.0);
    EXPECT_NE(est.h_a, est.h_b);
}

TEST(ObserveEstimates, RejectsShapeMismatch) {
    ChannelSet set{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(2, 2)};
    RngStream rng(3, 0);
    EXPECT_THROW(observe_estimates(set, plan_passive(), 0.0, rng), ParameterError);
}

TEST(Correlation, ClosedForms) {
    EXPECT_DOUBLE_EQ(rho_no_attack(1.0, 0.0), 1.0);
    EXPECT_NEAR(rho_no_attack(1.0, 0.1), 1.0 / 1.1, 1e-15);
    EXPECT_NEAR(rho_random_q(1.0, 0.5, 0.1), 1.5 / 1.6, 1e-15);
    EXPECT_DOUBLE_EQ(rho_random_q(1.0, 0.0, 0.1), rho_no_attack(1.0, 0.1));
    EXPECT_THROW(rho_no_attack(0.0, 0.1), ParameterError);
}

TEST(Correlation, CapacityValuesAndDomain) {
    EXPECT_EQ(sk_capacity(0.0), 0.0);
    EXPECT_FALSE(std::signbit(sk_capacity(0.0)));
    EXPECT_NEAR(sk_capacity(0.5), std::log2(4.0 / 3.0), 1e-12);
    EXPECT_THROW(sk_capacity(1.0), DomainError);
    EXPECT_THROW(sk_capacity(-0.1), DomainError);
    double prev = -1.0;
    for (double rho = 0.0; rho < 0.999; rho += 0.01) {
        const double c = sk_capacity(rho);
        EXPECT_GT(c, prev);
        prev = c;
    }
}

TEST(Correlation, RandomQIncreasesCorrelation) {
    for (double sh : {0.5, 1.0, 2.0}) {
        for (double g : {0.01, 0.1, 1.0}) {
            EXPECT_GT(rho_random_q(sh, 0.5, g), rho_no_attack(sh, g));
        }
    }
}
