#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "pilotguard/attack_plan.hpp"
#include "pilotguard/errors.hpp"
#include "pilotguard/numerics.hpp"

namespace pilotguard {

enum class CorrelationMode { independent, scalar_diagonal };

/// Joint law of (H, G1, G2) plus the estimation-noise power.
///
/// In scalar-diagonal mode K1 = K2 = sigma_G^2 zeta I and R12 = K1 K2^H, so
/// every entry index carries the same 3x3 covariance block. Independent mode
/// ignores zeta.
struct ChannelStatistics {
    int n = 1;
    double sigma_h2 = 1.0;
    double sigma_g2 = 0.5;
    double zeta = 0.0;
    double gamma = 0.0;
    CorrelationMode mode = CorrelationMode::independent;

    double effective_zeta() const { return mode == CorrelationMode::independent ? 0.0 : zeta; }

    void validate() const {
        if (n < 1) throw ParameterError("n: antenna count must be >= 1");
        if (!(sigma_h2 > 0.0) || !std::isfinite(sigma_h2)) throw ParameterError("sigma_h2: must be > 0");
        if (!(sigma_g2 > 0.0) || !std::isfinite(sigma_g2)) throw ParameterError("sigma_g2: must be > 0");
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma: must be >= 0");
        if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw ParameterError("zeta: must be >= 0");
    }
};

struct ChannelSet {
    ComplexMatrix h;  // Alice-Bob
    ComplexMatrix g1; // Alice-Eve
    ComplexMatrix g2; // Bob-Eve
};

struct EstimatePair {
    ComplexMatrix h_a; // Alice's estimate (phase 2)
    ComplexMatrix h_b; // Bob's estimate (phase 1)
};

/// Per-entry covariance of (h_ij, g1_ij, g2_ij) and its Cholesky factor.
/// The full covariance of [vec H; vec G1; vec G2] is block kron I_{N^2}.
struct JointCovariance {
    Eigen::Matrix3cd block;
    Eigen::Matrix3cd factor;

    /// Dense 3N^2 x 3N^2 covariance in [h; g1; g2] stacking.
    ComplexMatrix expand(int n) const {
        const Eigen::Index m = static_cast<Eigen::Index>(n) * n;
        ComplexMatrix r = ComplexMatrix::Zero(3 * m, 3 * m);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                r.block(a * m, b * m, m, m).diagonal().setConstant(block(a, b));
            }
        }
        return r;
    }
};

inline JointCovariance build_joint_covariance(const ChannelStatistics& stats) {
    stats.validate();
    const double k = stats.sigma_g2 * stats.effective_zeta();
    Eigen::Matrix3cd c;
    c << stats.sigma_h2, k, k,
         k, stats.sigma_g2, k * k,
         k, k * k, stats.sigma_g2;
    try {
        ComplexMatrix l = cholesky(ComplexMatrix(c));
        return {c, Eigen::Matrix3cd(l)};
    } catch (const NotPsdError& e) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "joint channel covariance is not positive semidefinite at zeta = "
            << stats.effective_zeta() << " (sigma_h2 = " << stats.sigma_h2
            << ", sigma_g2 = " << stats.sigma_g2 << ")";
        throw NotPsdError(e.pivot(), msg.str());
    }
}

/// Largest zeta for which the scalar-diagonal block stays PSD, by bisection
/// on the Cholesky test.
inline double psd_zeta_boundary(double sigma_h2, double sigma_g2, double tol = 1e-13) {
    ChannelStatistics s;
    s.sigma_h2 = sigma_h2;
    s.sigma_g2 = sigma_g2;
    s.mode = CorrelationMode::scalar_diagonal;
    auto psd = [&](double zeta) {
        s.zeta = zeta;
        try {
            build_joint_covariance(s);
            return true;
        } catch (const NotPsdError&) {
            return false;
        }
    };
    double lo = 0.0;
    double hi = 1.0;
    while (psd(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (psd(mid) ? lo : hi) = mid;
    }
    return lo;
}

inline ChannelSet sample_channel_set(const ChannelStatistics& stats, RngStream& rng) {
    const JointCovariance cov = build_joint_covariance(stats);
    const ComplexMatrix z0 = sample_complex_gaussian(stats.n, stats.n, 1.0, rng);
    const ComplexMatrix z1 = sample_complex_gaussian(stats.n, stats.n, 1.0, rng);
    const ComplexMatrix z2 = sample_complex_gaussian(stats.n, stats.n, 1.0, rng);
    const Eigen::Matrix3cd& l = cov.factor;
    ChannelSet set;
    set.h = l(0, 0) * z0;
    set.g1 = l(1, 0) * z0 + l(1, 1) * z1;
    set.g2 = l(2, 0) * z0 + l(2, 1) * z1 + l(2, 2) * z2;
    return set;
}

/// Two-phase training: phase 1 Alice sends, Bob estimates H + G2 P1 + W_B;
/// phase 2 Bob sends, Alice estimates H + G1 P2 + W_A. Noise for phase 1 is
/// drawn before phase 2 and skipped entirely when gamma == 0.
inline EstimatePair observe_estimates(const ChannelSet& set, const AttackPlan& plan, double gamma,
                                      RngStream& rng) {
    const Eigen::Index n = set.h.rows();
    auto check = [n](const ComplexMatrix& m, const char* name) {
        if (m.rows() != n || m.cols() != n) {
            throw ParameterError(std::string("observe_estimates: ") + name + " must be " +
                                 std::to_string(n) + "x" + std::to_string(n));
        }
    };
    check(set.h, "H");
    check(set.g1, "G1");
    check(set.g2, "G2");
    if (plan.p1) check(*plan.p1, "P1");
    if (plan.p2) check(*plan.p2, "P2");
    if (!(gamma >= 0.0)) throw ParameterError("observe_estimates: gamma must be >= 0");

    EstimatePair est{set.h, set.h};
    if (plan.p1) est.h_b += set.g2 * *plan.p1;
    if (gamma > 0.0) est.h_b += sample_complex_gaussian(n, n, gamma, rng);
    if (plan.p2) est.h_a += set.g1 * *plan.p2;
    if (gamma > 0.0) est.h_a += sample_complex_gaussian(n, n, gamma, rng);
    return est;
}

inline double rho_no_attack(double sigma_h2, double gamma) {
    if (!(sigma_h2 > 0.0) || !(gamma >= 0.0)) {
        throw ParameterError("rho_no_attack: need sigma_h2 > 0 and gamma >= 0");
    }
    return sigma_h2 / (sigma_h2 + gamma);
}

inline double rho_random_q(double sigma_h2, double sigma_q2, double gamma) {
    if (!(sigma_h2 > 0.0) || !(sigma_q2 >= 0.0) || !(gamma >= 0.0)) {
        throw ParameterError("rho_random_q: need sigma_h2 > 0, sigma_q2 >= 0, gamma >= 0");
    }
    const double signal = sigma_h2 + sigma_q2;
    return signal / (signal + gamma);
}

/// Secret-key capacity log2(1 / (1 - rho^2)) in bits per observation.
inline double sk_capacity(double rho) {
    if (!(rho >= 0.0) || !(rho < 1.0)) {
        throw DomainError("sk_capacity: rho must lie in [0, 1), got " + std::to_string(rho));
    }
    return std::log2(1.0 / (1.0 - rho * rho));
}

} // namespace pilotguard
