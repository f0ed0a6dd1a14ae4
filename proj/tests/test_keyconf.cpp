#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "pilotguard/adversary.hpp"
#include "pilotguard/keyconf.hpp"

using namespace pilotguard;

namespace {

Bits bits_of(unsigned value, std::size_t m) {
    Bits out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = (value >> (m - 1 - i)) & 1U;
    return out;
}

SecretKey key(std::string_view s) { return SecretKey{bits_from_string(s)}; }

ChannelStatistics passive_stats(int n, double sigma_h2, double gamma) {
    ChannelStatistics s;
    s.n = n;
    s.sigma_h2 = sigma_h2;
    s.sigma_g2 = 0.5;
    s.gamma = gamma;
    return s;
}

struct Disagreement {
    double rate;
    double std_error;
};

// Alice quantizes her estimate, Bob follows her index list.
Disagreement measure_disagreement(double delta, std::size_t trials) {
    const ChannelStatistics s = passive_stats(8, 1.0, 0.1);
    std::size_t bits = 0;
    std::size_t errors = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream crng(21, stream_id(StreamTag::channel, t));
        RngStream nrng(21, stream_id(StreamTag::noise, t));
        const ChannelSet set = sample_channel_set(s, crng);
        const EstimatePair est = observe_estimates(set, plan_passive(), s.gamma, nrng);
        const KeyExtraction alice = extract_key(est.h_a, s, delta, 128);
        const SecretKey bob = extract_key_at(est.h_b, alice.indices, 128);
        for (std::size_t i = 0; i < bob.size(); ++i) errors += alice.key.bits[i] != bob.bits[i];
        bits += bob.size();
    }
    const double p = static_cast<double>(errors) / static_cast<double>(bits);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(bits))};
}

} // namespace

TEST(Bits, StringAndHexEncoding) {
    EXPECT_EQ(bits_to_string(bits_from_string("0110")), "0110");
    EXPECT_EQ(to_hex(bits_from_string("00011111")), "1f");
    EXPECT_EQ(to_hex(bits_from_string("101")), "5");
    EXPECT_EQ(to_hex(bits_from_string("")), "");
    EXPECT_THROW(bits_from_string("012"), ParameterError);
}

TEST(Bits, XorRequiresEqualLength) {
    EXPECT_EQ(xor_bits(bits_from_string("1100"), bits_from_string("1010")), bits_from_string("0110"));
    EXPECT_THROW(xor_bits(bits_from_string("1"), bits_from_string("10")), ParameterError);
}

TEST(HMap, HandExamples) {
    EXPECT_EQ(bits_to_string(h_map(bits_from_string("0000"))), "0001");
    EXPECT_EQ(bits_to_string(h_map(bits_from_string("1111"))), "1100");
    EXPECT_EQ(bits_to_string(h_map(bits_from_string("0100"))), "1001");
    EXPECT_EQ(bits_to_string(h_map(bits_from_string("0101"))), "1011");
    EXPECT_EQ(bits_to_string(h_map(bits_from_string("0"))), "1");
}

TEST(HMap, IsABijectionWithInverse) {
    for (std::size_t m : {1U, 2U, 5U, 8U}) {
        std::set<Bits> images;
        for (unsigned v = 0; v < (1U << m); ++v) {
            const Bits x = bits_of(v, m);
            const Bits y = h_map(x);
            EXPECT_EQ(h_map_inverse(y), x);
            images.insert(y);
        }
        EXPECT_EQ(images.size(), std::size_t{1} << m);
    }
}

TEST(Handshake, RespondAndVerifyHandExample) {
    const SecretKey a = key("0001");
    const SecretKey b = key("0000");
    const Bits r = bits_from_string("0101");
    const Bits x = xor_bits(a.bits, r);
    EXPECT_EQ(bits_to_string(x), "0100");
    const Bits y = respond(b, x);
    EXPECT_EQ(bits_to_string(y), "1001");
    EXPECT_EQ(verify(a, r, y), Verdict::fail);
    EXPECT_EQ(verify(a, r, respond(a, x)), Verdict::pass);
}

TEST(Handshake, EqualKeysAlwaysPass) {
    RngStream rng(1, 0);
    for (int i = 0; i < 200; ++i) {
        Bits k(64);
        for (auto& b : k) b = rng.bit();
        const SecretKey a{k};
        EXPECT_EQ(key_confirmation_round(a, a, rng).verdict, Verdict::pass);
    }
}

TEST(Handshake, ExhaustiveNoFalsePassAtEightBits) {
    const auto start = std::chrono::steady_clock::now();
    std::size_t false_passes = 0;
    for (unsigned av : {0U, 0x5aU, 0xffU}) {
        const SecretKey a{bits_of(av, 8)};
        for (unsigned d = 1; d < 256; ++d) {
            const SecretKey b{xor_bits(a.bits, bits_of(d, 8))};
            for (unsigned rv = 0; rv < 256; ++rv) {
                const Bits r = bits_of(rv, 8);
                false_passes += verify(a, r, respond(b, xor_bits(a.bits, r))) == Verdict::pass;
            }
        }
    }
    EXPECT_EQ(false_passes, 0U);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(Handshake, ChallengeIsUniformForFixedKey) {
    const SecretKey a{Bits(64, 1)};
    RngStream rng(2, 0);
    std::size_t ones = 0;
    const std::size_t rounds = 2000;
    for (std::size_t i = 0; i < rounds; ++i) {
        const Challenge c = challenge(a, rng);
        for (auto b : c.x) ones += b;
    }
    const double n = 64.0 * rounds;
    EXPECT_NEAR(ones / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}

TEST(Handshake, RejectsLengthMismatch) {
    RngStream rng(3, 0);
    EXPECT_THROW(key_confirmation_round(key("0101"), key("010"), rng), ParameterError);
}

TEST(ExtractKey, SignQuantizerIsOddSymmetric) {
    const ChannelStatistics s = passive_stats(4, 1.0, 0.0);
    RngStream rng(4, 0);
    const ComplexMatrix h = sample_complex_gaussian(4, 4, 1.0, rng);
    const KeyExtraction pos = extract_key(h, s, 0.5, 32);
    const KeyExtraction neg = extract_key(-h, s, 0.5, 32);
    EXPECT_EQ(pos.indices, neg.indices);
    ASSERT_EQ(pos.key.size(), neg.key.size());
    for (std::size_t i = 0; i < pos.key.size(); ++i) EXPECT_NE(pos.key.bits[i], neg.key.bits[i]);
}

TEST(ExtractKey, SampleOrderAndThreshold) {
    ChannelStatistics s = passive_stats(1, 2.0, 0.0);
    ComplexMatrix h(1, 1);
    h(0, 0) = Complex(1.5, -0.5); // threshold at delta = 1 is 1.0
    const KeyExtraction k = extract_key(h, s, 1.0, 8);
    EXPECT_EQ(k.indices, std::vector<std::size_t>{0});
    EXPECT_EQ(bits_to_string(k.key.bits), "1");
    const KeyExtraction all = extract_key(h, s, 0.0, 8);
    EXPECT_EQ(bits_to_string(all.key.bits), "10");
    h(0, 0) = Complex(0.1, 0.1);
    EXPECT_THROW(extract_key(h, s, 1.0, 8), InsufficientEntropyError);
}

TEST(ExtractKey, KeyStopsAtTargetLength) {
    const ChannelStatistics s = passive_stats(4, 1.0, 0.0);
    RngStream rng(5, 0);
    const ComplexMatrix h = sample_complex_gaussian(4, 4, 1.0, rng);
    const KeyExtraction k = extract_key(h, s, 0.0, 10);
    EXPECT_EQ(k.key.size(), 10U);
    EXPECT_EQ(extract_key_at(h, k.indices, 10), k.key);
}

TEST(ExtractKey, PassiveDisagreementMatchesBivariateGaussian) {
    // P(sign mismatch | |x_A| > sd_A) for Re parts with variance (1+0.1)/2
    // and correlation 1/1.1, by 2-D numerical integration.
    const Disagreement d = measure_disagreement(1.0, 3000);
    EXPECT_NEAR(d.rate, 0.0030755638241319236, 3.0 * d.std_error);
}

TEST(ExtractKey, DisagreementFallsWithGuardBand) {
    const double oracle[] = {0.13677765182587287, 0.03216655192928312, 0.0030755638241319236,
                             0.00010562468586905237};
    const double deltas[] = {0.0, 0.5, 1.0, 1.5};
    double prev = 1.0;
    for (int i = 0; i < 4; ++i) {
        const Disagreement d = measure_disagreement(deltas[i], 1500);
        EXPECT_NEAR(d.rate, oracle[i], 3.0 * std::max(d.std_error, 1e-5)) << "delta " << deltas[i];
        EXPECT_LT(d.rate, prev);
        prev = d.rate;
    }
}

TEST(ExtractKey, BaselineAttackBreaksKeyAgreement) {
    ChannelStatistics s = passive_stats(8, 0.5, 0.01);
    s.sigma_g2 = 0.5;
    std::size_t differ = 0;
    const std::size_t trials = 500;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng(22, t);
        const ChannelSet set = sample_channel_set(s, rng);
        const EstimatePair est = observe_estimates(set, plan_baseline(false, 8), s.gamma, rng);
        const KeyExtraction alice = extract_key(est.h_a, s, 1.0, 64);
        differ += !(alice.key == extract_key_at(est.h_b, alice.indices, 64));
    }
    EXPECT_GE(static_cast<double>(differ) / trials, 0.99);
}
