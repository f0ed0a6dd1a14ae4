#pragma once

// Eve's attack plans.
//
// Every precoded attack follows the same pattern: pick the perturbation Q that
// both legitimate estimates should see, then precode phase 1 by G2^{-1} Q and
// phase 2 by G1^{-1} Q so that H^(A) = H^(B) = H + Q (plus noise).
//
// The correlated-channel attack uses Eve's conditional-mean estimate of h
// from (g1, g2) and steers the induced channel toward g1:
//
//   q = -h_E + alpha g1,   h_E = A g1 + B g2,
//   E[(h+q)(h+q)^H] = M1 + alpha M2 + alpha^2 R1,
//
// where M1 is the estimation-error covariance, M2 the cross term that vanishes
// by orthogonality, and R1 = E[g1 g1^H]. alpha is set so the trace matches
// the trace of an honest channel, N^2 sigma_H^2.

#include <cmath>
#include <complex>
#include <sstream>

#include "pilotguard/attack_plan.hpp"
#include "pilotguard/channel.hpp"
#include "pilotguard/errors.hpp"
#include "pilotguard/numerics.hpp"

namespace pilotguard {

inline AttackPlan plan_passive() {
    return AttackPlan{};
}

inline AttackPlan plan_baseline(bool both_phases, int n) {
    if (n < 1) throw ParameterError("plan_baseline: n must be >= 1");
    AttackPlan plan;
    plan.mode = both_phases ? AttackMode::baseline_both : AttackMode::baseline_phase2;
    const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
    plan.p2 = eye;
    if (both_phases) plan.p1 = eye;
    return plan;
}

namespace detail {

inline AttackPlan precode_for(AttackMode mode, const ComplexMatrix& g1, const ComplexMatrix& g2,
                              ComplexMatrix q) {
    if (g1.rows() != q.rows() || g2.rows() != q.rows() || g1.cols() != q.rows() ||
        g2.cols() != q.rows() || q.rows() != q.cols()) {
        throw ParameterError("attack plan: G1, G2 and Q must all be NxN");
    }
    AttackPlan plan;
    plan.mode = mode;
    plan.p1 = inverse(g2) * q;
    plan.p2 = inverse(g1) * q;
    plan.q = std::move(q);
    return plan;
}

inline Complex adj(Complex x) { return std::conj(x); }
inline ComplexMatrix adj(const ComplexMatrix& x) { return x.adjoint(); }

} // namespace detail

inline AttackPlan plan_random_q(const ComplexMatrix& g1, const ComplexMatrix& g2, double sigma_q2,
                                RngStream& rng) {
    ComplexMatrix q = sample_complex_gaussian(g1.rows(), g1.cols(), sigma_q2, rng);
    return detail::precode_for(AttackMode::random_q, g1, g2, std::move(q));
}

inline AttackPlan plan_full_knowledge(const ComplexMatrix& h, const ComplexMatrix& g1,
                                      const ComplexMatrix& g2) {
    if (h.rows() != g1.rows() || h.cols() != g1.cols()) {
        throw ParameterError("plan_full_knowledge: H and G1 dimensions differ");
    }
    return detail::precode_for(AttackMode::full_knowledge, g1, g2, g1 - h);
}

/// Second-order description of the correlated-channel attack. `T` is Complex
/// on the scalar-diagonal path (every block is T times I_{N^2}) and
/// ComplexMatrix on the dense cross-check path.
template <typename T>
struct CorrelatedAttackTerms {
    T a;     // h_E = a g1 + b g2
    T b;
    T m1;    // error covariance E[(h - h_E)(h - h_E)^H]
    T m2;    // coefficient of alpha; zero by orthogonality
    T quad;  // coefficient of alpha^2, E[g1 g1^H]
};

/// Second moments of [h; g1; g2] in block form. On the scalar path each entry
/// is the per-index value; on the dense path each is an N^2 x N^2 block.
template <typename T>
struct CovarianceBlocks {
    T rh;  // E[h h^H]
    T k1;  // E[g1 h^H]
    T k2;  // E[g2 h^H]
    T r1;  // E[g1 g1^H]
    T r2;  // E[g2 g2^H]
    T r12; // E[g1 g2^H]
};

/// Expansion of E[(h+q)(h+q)^H] for q = -(a g1 + b g2) + alpha g1, evaluated
/// from second moments only. Valid for any a, b, not just the MMSE ones.
template <typename T>
CorrelatedAttackTerms<T> expand_induced_covariance(const CovarianceBlocks<T>& c, const T& a,
                                                   const T& b) {
    using detail::adj;
    CorrelatedAttackTerms<T> t{a, b, c.rh, c.rh, c.r1};
    // E[e e^H] with e = h - a g1 - b g2
    t.m1 = c.rh - adj(c.k1) * adj(a) - adj(c.k2) * adj(b) - a * c.k1 - b * c.k2 +
           a * c.r1 * adj(a) + a * c.r12 * adj(b) + b * adj(c.r12) * adj(a) + b * c.r2 * adj(b);
    // E[e g1^H] + E[g1 e^H]
    const T cross = adj(c.k1) - a * c.r1 - b * adj(c.r12);
    t.m2 = cross + adj(cross);
    t.quad = c.r1;
    return t;
}

inline CovarianceBlocks<Complex> scalar_blocks(const JointCovariance& cov) {
    const auto& c = cov.block;
    return {c(0, 0), c(1, 0), c(2, 0), c(1, 1), c(2, 2), c(1, 2)};
}

inline CovarianceBlocks<ComplexMatrix> dense_blocks(const ComplexMatrix& r, Eigen::Index m) {
    if (r.rows() != 3 * m || r.cols() != 3 * m) {
        throw ParameterError("dense_blocks: covariance must be 3N^2 x 3N^2");
    }
    return {r.block(0, 0, m, m), r.block(m, 0, m, m), r.block(2 * m, 0, m, m),
            r.block(m, m, m, m), r.block(2 * m, 2 * m, m, m), r.block(m, 2 * m, m, m)};
}

/// A = -S11^{-1} S12 and B = -S11^{-1} S13 from the precision matrix S = R^{-1}.
inline std::pair<ComplexMatrix, ComplexMatrix> precision_coefficients(const ComplexMatrix& r,
                                                                      Eigen::Index m) {
    const ComplexMatrix s = inverse(r);
    const ComplexMatrix s11_inv = inverse(s.block(0, 0, m, m));
    return {-s11_inv * s.block(0, m, m, m), -s11_inv * s.block(0, 2 * m, m, m)};
}

/// Scalar-diagonal fast path: a 3x3 precision matrix gives a, b directly.
inline CorrelatedAttackTerms<Complex> correlated_attack_terms(const ChannelStatistics& stats) {
    const JointCovariance cov = build_joint_covariance(stats);
    const auto [a, b] = precision_coefficients(ComplexMatrix(cov.block), 1);
    return expand_induced_covariance(scalar_blocks(cov), a(0, 0), b(0, 0));
}

/// Dense path over the full 3N^2 x 3N^2 covariance. Accepts any R with the
/// [h; g1; g2] block layout, not only the scalar-diagonal one.
inline CorrelatedAttackTerms<ComplexMatrix> correlated_attack_terms_dense(const ComplexMatrix& r,
                                                                         int n) {
    const Eigen::Index m = static_cast<Eigen::Index>(n) * n;
    const auto [a, b] = precision_coefficients(r, m);
    return expand_induced_covariance(dense_blocks(r, m), a, b);
}

/// Conditional-mean estimate of vec(H) given vec(G1), vec(G2).
inline ComplexVector eve_mmse_estimate(const ChannelStatistics& stats, const ComplexVector& g1,
                                       const ComplexVector& g2) {
    const auto m = static_cast<Eigen::Index>(stats.n) * stats.n;
    if (g1.size() != m || g2.size() != m) {
        throw ParameterError("eve_mmse_estimate: vectors must have N^2 entries");
    }
    const auto terms = correlated_attack_terms(stats);
    return terms.a * g1 + terms.b * g2;
}

inline ComplexVector eve_mmse_estimate_dense(const ComplexMatrix& r, const ComplexVector& g1,
                                             const ComplexVector& g2) {
    const Eigen::Index m = g1.size();
    if (g2.size() != m || r.rows() != 3 * m) {
        throw ParameterError("eve_mmse_estimate_dense: dimension mismatch");
    }
    const auto [a, b] = precision_coefficients(r, m);
    return a * g1 + b * g2;
}

/// Scaling of g1 that makes the induced trace equal N^2 sigma_H^2, assuming
/// the alpha-linear term vanishes.
inline double trace_matching_alpha(double target_trace, double trace_m1, double trace_quad) {
    const double slack = target_trace - trace_m1;
    if (slack < 0.0) {
        if (slack >= -1e-12 * std::abs(target_trace)) return 0.0;
        std::ostringstream msg;
        msg.precision(17);
        msg << "correlated attack infeasible: trace(M1) = " << trace_m1
            << " exceeds N^2 sigma_h2 = " << target_trace;
        throw AlphaInfeasibleError(target_trace, trace_m1, msg.str());
    }
    if (!(trace_quad > 0.0)) throw DegenerateError("trace_matching_alpha: E[g1 g1^H] has zero trace");
    return std::sqrt(slack / trace_quad);
}

inline double correlated_alpha(const ChannelStatistics& stats,
                               const CorrelatedAttackTerms<Complex>& terms) {
    const double entries = static_cast<double>(stats.n) * stats.n;
    return trace_matching_alpha(entries * stats.sigma_h2, entries * terms.m1.real(),
                                entries * terms.quad.real());
}

/// trace E[(h+q)(h+q)^H] = trace(M1) + alpha trace(M2) + alpha^2 trace(R1).
inline double induced_trace(const CorrelatedAttackTerms<Complex>& terms, int n, double alpha) {
    const double entries = static_cast<double>(n) * n;
    return entries * (terms.m1 + alpha * terms.m2 + alpha * alpha * terms.quad).real();
}

inline double induced_trace(const CorrelatedAttackTerms<ComplexMatrix>& terms, double alpha) {
    return (terms.m1.trace() + alpha * terms.m2.trace() + alpha * alpha * terms.quad.trace()).real();
}

inline AttackPlan plan_correlated_ml(const ChannelStatistics& stats, const ComplexMatrix& g1,
                                     const ComplexMatrix& g2) {
    if (g1.rows() != stats.n || g1.cols() != stats.n || g2.rows() != stats.n ||
        g2.cols() != stats.n) {
        throw ParameterError("plan_correlated_ml: G1 and G2 must be NxN with N = stats.n");
    }
    const auto terms = correlated_attack_terms(stats);
    const double alpha = correlated_alpha(stats, terms);
    ComplexMatrix q = -(terms.a * g1 + terms.b * g2) + alpha * g1;
    AttackPlan plan = detail::precode_for(AttackMode::correlated_ml, g1, g2, std::move(q));
    plan.alpha = alpha;
    return plan;
}

/// Attack selection for Monte Carlo drivers.
struct AttackSpec {
    AttackMode mode = AttackMode::passive;
    double sigma_q2 = 0.5;
};

inline AttackPlan make_attack_plan(const AttackSpec& spec, const ChannelStatistics& stats,
                                   const ChannelSet& set, RngStream& rng) {
    switch (spec.mode) {
    case AttackMode::passive: return plan_passive();
    case AttackMode::baseline_phase2: return plan_baseline(false, stats.n);
    case AttackMode::baseline_both: return plan_baseline(true, stats.n);
    case AttackMode::random_q: return plan_random_q(set.g1, set.g2, spec.sigma_q2, rng);
    case AttackMode::correlated_ml: return plan_correlated_ml(stats, set.g1, set.g2);
    case AttackMode::full_knowledge: return plan_full_knowledge(set.h, set.g1, set.g2);
    }
    throw ParameterError("make_attack_plan: unknown mode");
}

} // namespace pilotguard
