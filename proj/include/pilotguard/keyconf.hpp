#pragma once

// Secret-key extraction from a channel estimate and the one-time-pad key
// confirmation handshake between Alice (key a) and Bob (key b):
//
//   Alice:  r random, x = a ^ r              -> Bob
//   Bob:    r' = x ^ b, y = h(r') ^ b        -> Alice
//   Alice:  pass iff h(r) == y ^ a
//
// With d = a ^ b the check reads h(r) == h(r ^ d) ^ d.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pilotguard/channel.hpp"
#include "pilotguard/errors.hpp"
#include "pilotguard/numerics.hpp"

namespace pilotguard {

/// Bit sequence, one bit per element, index 0 is the most significant bit.
using Bits = std::vector<std::uint8_t>;

enum class Verdict { pass, fail };

inline std::string_view to_string(Verdict v) {
    return v == Verdict::pass ? "pass" : "fail";
}

struct SecretKey {
    Bits bits;

    std::size_t size() const noexcept { return bits.size(); }
    friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

struct KeyConfTranscript {
    Bits r;
    Bits x;
    Bits y;
    Verdict verdict = Verdict::fail;
};

/// Parses a string of '0'/'1' characters, most significant bit first.
inline Bits bits_from_string(std::string_view s) {
    Bits out;
    out.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw ParameterError("bits_from_string: expected only '0'/'1'");
        out.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return out;
}

inline std::string bits_to_string(const Bits& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

/// Hex encoding, most significant nibble first. Lengths that are not a
/// multiple of four are left-padded with zero bits.
inline std::string to_hex(const Bits& bits) {
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t pad = (4 - bits.size() % 4) % 4;
    std::string out;
    out.reserve((bits.size() + pad) / 4);
    unsigned nibble = 0;
    std::size_t filled = pad;
    for (auto b : bits) {
        nibble = (nibble << 1) | (b & 1U);
        if (++filled == 4) {
            out.push_back(digits[nibble]);
            nibble = 0;
            filled = 0;
        }
    }
    return out;
}

inline Bits xor_bits(const Bits& lhs, const Bits& rhs) {
    if (lhs.size() != rhs.size()) {
        throw ParameterError("xor_bits: length mismatch (" + std::to_string(lhs.size()) + " vs " +
                             std::to_string(rhs.size()) + ")");
    }
    Bits out(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) out[i] = lhs[i] ^ rhs[i];
    return out;
}

/// Public map h used by the handshake.
///
/// h(v) = x v mod (x^M + x + 1), then xor 1, with v read as a GF(2)
/// polynomial (last element is the constant coefficient). Multiplication by x
/// modulo a polynomial with odd weight and unit constant term is invertible
/// and has no non-zero fixed point, so h(r) ^ h(r ^ d) == d only when d == 0.
/// For M == 1 the only non-identity bijection is the complement.
inline Bits h_map(const Bits& v) {
    const std::size_t m = v.size();
    if (m == 0) return {};
    if (m == 1) return Bits{static_cast<std::uint8_t>(v[0] ^ 1U)};
    const std::uint8_t carry = v[0];
    Bits out(m);
    for (std::size_t i = 0; i + 1 < m; ++i) out[i] = v[i + 1];
    out[m - 1] = 0;
    if (carry) {
        out[m - 1] ^= 1U;
        out[m - 2] ^= 1U;
    }
    out[m - 1] ^= 1U;
    return out;
}

inline Bits h_map_inverse(const Bits& w) {
    const std::size_t m = w.size();
    if (m == 0) return {};
    if (m == 1) return Bits{static_cast<std::uint8_t>(w[0] ^ 1U)};
    Bits u = w;
    u[m - 1] ^= 1U;
    const std::uint8_t carry = u[m - 1];
    if (carry) {
        u[m - 1] ^= 1U;
        u[m - 2] ^= 1U;
    }
    Bits out(m);
    out[0] = carry;
    for (std::size_t i = 1; i < m; ++i) out[i] = u[i - 1];
    return out;
}

struct KeyExtraction {
    SecretKey key;
    std::vector<std::size_t> indices; // disclosed publicly so Bob can follow
};

namespace detail {

/// Real parts of the column-major entries, then imaginary parts.
inline RealVector real_samples(const ComplexMatrix& estimate) {
    const Eigen::Index count = estimate.size();
    RealVector out(2 * count);
    const ComplexVector v = vectorize(estimate);
    out.head(count) = v.real();
    out.tail(count) = v.imag();
    return out;
}

} // namespace detail

/// Guard-band sign quantizer. A sample is kept when its magnitude exceeds
/// delta * sqrt((sigma_h2 + gamma) / 2), the per-component standard deviation
/// of an honest estimate; the key holds the first min(target_m, kept) bits.
inline KeyExtraction extract_key(const ComplexMatrix& estimate, const ChannelStatistics& stats,
                                 double delta, std::size_t target_m) {
    if (estimate.rows() != stats.n || estimate.cols() != stats.n) {
        throw ParameterError("extract_key: estimate must be NxN with N = stats.n");
    }
    if (!(delta >= 0.0)) throw ParameterError("delta: guard band must be >= 0");
    if (target_m < 1) throw ParameterError("key_bits: target key length must be >= 1");
    const double threshold = delta * std::sqrt((stats.sigma_h2 + stats.gamma) / 2.0);
    const RealVector samples = detail::real_samples(estimate);

    KeyExtraction out;
    for (Eigen::Index i = 0; i < samples.size() && out.indices.size() < target_m; ++i) {
        const double v = samples(i);
        if (std::abs(v) > threshold) {
            out.indices.push_back(static_cast<std::size_t>(i));
            out.key.bits.push_back(v > 0.0 ? 1 : 0);
        }
    }
    if (out.indices.empty()) {
        throw InsufficientEntropyError("extract_key: no sample exceeds the guard band");
    }
    return out;
}

/// Sign-quantizes exactly the listed samples (Bob's side, following Alice's
/// disclosed index list).
inline SecretKey extract_key_at(const ComplexMatrix& estimate, const std::vector<std::size_t>& indices,
                                std::size_t target_m) {
    const RealVector samples = detail::real_samples(estimate);
    SecretKey key;
    for (std::size_t idx : indices) {
        if (key.bits.size() >= target_m) break;
        if (idx >= static_cast<std::size_t>(samples.size())) {
            throw ParameterError("extract_key_at: index " + std::to_string(idx) +
                                 " out of range for " + std::to_string(samples.size()) + " samples");
        }
        key.bits.push_back(samples(static_cast<Eigen::Index>(idx)) > 0.0 ? 1 : 0);
    }
    if (key.bits.empty()) throw InsufficientEntropyError("extract_key_at: empty index list");
    return key;
}

struct Challenge {
    Bits r;
    Bits x;
};

inline Challenge challenge(const SecretKey& a, RngStream& rng) {
    Challenge c;
    c.r.resize(a.size());
    for (auto& bit : c.r) bit = rng.bit() ? 1 : 0;
    c.x = xor_bits(a.bits, c.r);
    return c;
}

inline Bits respond(const SecretKey& b, const Bits& x) {
    const Bits r_prime = xor_bits(x, b.bits);
    return xor_bits(h_map(r_prime), b.bits);
}

inline Verdict verify(const SecretKey& a, const Bits& r, const Bits& y) {
    if (r.size() != a.size()) throw ParameterError("verify: challenge length differs from key length");
    return h_map(r) == xor_bits(y, a.bits) ? Verdict::pass : Verdict::fail;
}

inline KeyConfTranscript key_confirmation_round(const SecretKey& a, const SecretKey& b, RngStream& rng) {
    if (a.size() != b.size()) {
        throw ParameterError("key_confirmation_round: key lengths differ (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
    }
    KeyConfTranscript t;
    Challenge c = challenge(a, rng);
    t.y = respond(b, c.x);
    t.verdict = verify(a, c.r, t.y);
    t.r = std::move(c.r);
    t.x = std::move(c.x);
    return t;
}

} // namespace pilotguard
