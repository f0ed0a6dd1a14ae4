#include <gtest/gtest.h>

#include <cmath>

#include "pilotguard/adversary.hpp"
#include "pilotguard/detector.hpp"

using namespace pilotguard;

namespace {

ChannelStatistics stats(int n, double gamma, double zeta = 0.0) {
    ChannelStatistics s;
    s.n = n;
    s.sigma_h2 = 0.5;
    s.sigma_g2 = 0.5;
    s.gamma = gamma;
    s.zeta = zeta;
    s.mode = CorrelationMode::scalar_diagonal;
    return s;
}

double alice_trace_pass_rate(const ChannelStatistics& s, AttackMode mode, std::size_t trials) {
    std::size_t pass = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream crng(31, stream_id(StreamTag::channel, t));
        RngStream arng(31, stream_id(StreamTag::attack, t));
        RngStream nrng(31, stream_id(StreamTag::noise, t));
        const ChannelSet set = sample_channel_set(s, crng);
        const AttackPlan plan = make_attack_plan(AttackSpec{mode, 0.5}, s, set, arng);
        const EstimatePair est = observe_estimates(set, plan, s.gamma, nrng);
        pass += trace_check(est.h_a, s, 0.2).verdict == Verdict::pass;
    }
    return static_cast<double>(pass) / static_cast<double>(trials);
}

} // namespace

TEST(TraceCheck, HandExamples) {
    const ChannelStatistics s = stats(2, 0.0);
    const TraceCheck ok = trace_check(ComplexMatrix::Identity(2, 2), s, 0.2);
    EXPECT_EQ(ok.verdict, Verdict::pass);
    EXPECT_DOUBLE_EQ(ok.measured, 2.0);
    EXPECT_DOUBLE_EQ(ok.expected, 2.0);
    const TraceCheck loud = trace_check(2.0 * ComplexMatrix::Identity(2, 2), s, 0.2);
    EXPECT_EQ(loud.verdict, Verdict::fail);
    EXPECT_DOUBLE_EQ(loud.measured, 8.0);
    EXPECT_EQ(trace_check(ComplexMatrix::Zero(2, 2), s, 0.2).verdict, Verdict::fail);
}

TEST(TraceCheck, ToleranceIsInclusive) {
    const ChannelStatistics s = stats(1, 0.0);
    ComplexMatrix h(1, 1);
    h(0, 0) = Complex(0.75, 0.25); // |h|^2 = 0.625 = 1.25 E exactly
    EXPECT_EQ(trace_check(h, s, 0.25).verdict, Verdict::pass);
    EXPECT_EQ(trace_check(h, s, 0.24).verdict, Verdict::fail);
    EXPECT_THROW(trace_check(h, s, 0.0), ParameterError);
}

TEST(TraceCheck, ExpectationIncludesNoise) {
    const TraceCheck c = trace_check(ComplexMatrix::Identity(4, 4), stats(4, 0.1), 0.2);
    EXPECT_NEAR(c.expected, 16.0 * 0.6, 1e-12);
}

TEST(TraceCheck, RandomPerturbationIsCaught) {
    EXPECT_LE(alice_trace_pass_rate(stats(8, 0.01), AttackMode::random_q, 1000), 0.01);
}

TEST(TraceCheck, CorrelatedAttackPassesLikeHonestChannel) {
    // h + q has i.i.d. entries of power sigma_h2, so trace/E ~ Gamma(64, 1/64):
    // P(|trace/E - 1| <= 0.2) = 0.8922613362811194
    const std::size_t trials = 4000;
    const double p = alice_trace_pass_rate(stats(8, 0.0, 0.5), AttackMode::correlated_ml, trials);
    const double se = std::sqrt(0.8922613362811194 * (1 - 0.8922613362811194) / trials);
    EXPECT_NEAR(p, 0.8922613362811194, 3.0 * se);
    const double honest = alice_trace_pass_rate(stats(8, 0.0, 0.5), AttackMode::passive, trials);
    EXPECT_NEAR(honest, 0.8922613362811194, 3.0 * se);
}

TEST(TraceCheck, StatisticConcentratesLikeOneOverN) {
    for (int n : {2, 4, 8}) {
        const ChannelStatistics s = stats(n, 0.0);
        double sum = 0.0;
        double sum2 = 0.0;
        const int draws = 4000;
        for (int i = 0; i < draws; ++i) {
            RngStream rng(32, static_cast<std::uint64_t>(i));
            const double x = trace_check(sample_complex_gaussian(n, n, 0.5, rng), s, 0.2).measured / (n * n * 0.5);
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / draws;
        const double sd = std::sqrt(sum2 / draws - mean * mean);
        // relative sd of a sample sd: sqrt((2 + excess kurtosis) / 4 draws), kurtosis 6 / n^2
        EXPECT_NEAR(sd * n, 1.0, 5.0 * std::sqrt((2.0 + 6.0 / (n * n)) / (4.0 * draws))) << "n " << n;
    }
}

TEST(PairingDecision, AllChecksMustPass) {
    EXPECT_TRUE(pairing_decision(Verdict::pass, Verdict::pass, Verdict::pass).pairing_succeeds);
    EXPECT_FALSE(pairing_decision(Verdict::fail, Verdict::pass, Verdict::pass).pairing_succeeds);
    EXPECT_FALSE(pairing_decision(Verdict::pass, Verdict::fail, Verdict::pass).pairing_succeeds);
    EXPECT_FALSE(pairing_decision(Verdict::pass, Verdict::pass, Verdict::fail).pairing_succeeds);
    const DetectionReport r = pairing_decision(Verdict::pass, TraceCheck{Verdict::pass, 1.0, 1.1},
                                               TraceCheck{Verdict::fail, 3.0, 1.1});
    EXPECT_EQ(r.trace_bob.measured, 3.0);
    EXPECT_FALSE(r.pairing_succeeds);
}
