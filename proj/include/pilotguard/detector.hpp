#pragma once

#include <cmath>

#include "pilotguard/channel.hpp"
#include "pilotguard/keyconf.hpp"
#include "pilotguard/numerics.hpp"

namespace pilotguard {

struct TraceCheck {
    Verdict verdict = Verdict::fail;
    double measured = 0.0;
    double expected = 0.0;
};

/// Power test on a channel estimate: trace(H H^H) against N^2 (sigma_h2 + gamma),
/// passing when the relative deviation is at most epsilon.
inline TraceCheck trace_check(const ComplexMatrix& estimate, const ChannelStatistics& stats,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw ParameterError("epsilon: trace tolerance must be > 0");
    TraceCheck out;
    out.measured = gram_trace(estimate);
    out.expected = static_cast<double>(stats.n) * stats.n * (stats.sigma_h2 + stats.gamma);
    out.verdict = std::abs(out.measured - out.expected) <= epsilon * out.expected ? Verdict::pass
                                                                                  : Verdict::fail;
    return out;
}

struct DetectionReport {
    Verdict keyconf = Verdict::fail;
    TraceCheck trace_alice;
    TraceCheck trace_bob;
    bool pairing_succeeds = false;
};

inline DetectionReport pairing_decision(Verdict keyconf, const TraceCheck& trace_alice,
                                        const TraceCheck& trace_bob) {
    DetectionReport r{keyconf, trace_alice, trace_bob, false};
    r.pairing_succeeds = keyconf == Verdict::pass && trace_alice.verdict == Verdict::pass &&
                         trace_bob.verdict == Verdict::pass;
    return r;
}

inline DetectionReport pairing_decision(Verdict keyconf, Verdict trace_alice, Verdict trace_bob) {
    return pairing_decision(keyconf, TraceCheck{trace_alice, 0.0, 0.0}, TraceCheck{trace_bob, 0.0, 0.0});
}

} // namespace pilotguard
