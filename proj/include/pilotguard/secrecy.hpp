#pragma once

// Beamforming and secrecy-outage evaluation.
//
// Alice beamforms with B = V D, where H^(A) = U S V^H and D^2 is the
// water-filling allocation over |S_nn|^2 with unit total power. Noise is
// normalized to one per receive antenna, so a link C delivers
// log2 det(I + C B B^H C^H) bits. An outage occurs when Eve's rate eats into
// the secret margin: R0 - rate(G1, B) < R_S.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "pilotguard/adversary.hpp"
#include "pilotguard/channel.hpp"
#include "pilotguard/errors.hpp"
#include "pilotguard/numerics.hpp"
#include "pilotguard/parallel.hpp"

namespace pilotguard {

/// Water-filling p_n = max(0, mu - 1/g_n) with sum p_n = total_power.
///
/// Gains are ranked descending (ties by index) and the active set is the
/// longest prefix whose water level stays above every member's 1/g; mu then
/// follows in closed form.
inline std::vector<double> waterfill(const std::vector<double>& gains, double total_power) {
    if (!(total_power > 0.0) || !std::isfinite(total_power)) {
        throw ParameterError("waterfill: total power must be > 0");
    }
    for (double g : gains) {
        if (!(g >= 0.0) || !std::isfinite(g)) throw ParameterError("waterfill: gains must be finite and >= 0");
    }
    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return gains[l] > gains[r]; });
    const auto positive = static_cast<std::size_t>(
        std::count_if(gains.begin(), gains.end(), [](double g) { return g > 0.0; }));
    if (positive == 0) throw DegenerateError("waterfill: all channel gains are zero");

    std::size_t active = 0;
    double inv_sum = 0.0;
    double mu = 0.0;
    for (std::size_t k = 0; k < positive; ++k) {
        const double inv = 1.0 / gains[order[k]];
        const double level = (total_power + inv_sum + inv) / static_cast<double>(k + 1);
        if (level <= inv) break;
        inv_sum += inv;
        mu = level;
        active = k + 1;
    }
    std::vector<double> powers(gains.size(), 0.0);
    for (std::size_t k = 0; k < active; ++k) {
        powers[order[k]] = mu - 1.0 / gains[order[k]];
    }
    return powers;
}

inline ComplexMatrix beamformer(const ComplexMatrix& h_est) {
    const SvdResult dec = svd(h_est);
    std::vector<double> gains(static_cast<std::size_t>(dec.singular_values.size()));
    for (std::size_t i = 0; i < gains.size(); ++i) {
        const double s = dec.singular_values(static_cast<Eigen::Index>(i));
        gains[i] = s * s;
    }
    const std::vector<double> powers = waterfill(gains, 1.0);
    RealVector amp(static_cast<Eigen::Index>(powers.size()));
    for (std::size_t i = 0; i < powers.size(); ++i) amp(static_cast<Eigen::Index>(i)) = std::sqrt(powers[i]);
    return dec.v.leftCols(amp.size()) * amp.cast<Complex>().asDiagonal();
}

/// log2 det(I + C B B^H C^H).
inline double mutual_info_rate(const ComplexMatrix& channel, const ComplexMatrix& b) {
    if (channel.cols() != b.rows()) {
        throw ParameterError("mutual_info_rate: channel has " + std::to_string(channel.cols()) +
                             " columns but beamformer has " + std::to_string(b.rows()) + " rows");
    }
    const ComplexMatrix cb = channel * b;
    ComplexMatrix m = cb * cb.adjoint();
    m.diagonal().array() += 1.0;
    Eigen::LLT<ComplexMatrix> llt(m);
    if (llt.info() != Eigen::Success) throw NumericalError("mutual_info_rate: I + C B B^H C^H not PD");
    double log_det = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += std::log2(l(i, i).real());
    return 2.0 * log_det;
}

struct RateEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

/// R0 = E[log2 det(I + H B B^H H^H)] with B built from the true H.
inline RateEstimate estimate_r0(const ChannelStatistics& stats, std::size_t trials, std::uint64_t seed,
                                unsigned workers = 1) {
    stats.validate();
    if (trials < 100) throw ParameterError("trials_r0: need at least 100 trials for R0");
    std::vector<double> rates(trials);
    parallel_for(trials, workers, [&](std::size_t t) {
        RngStream rng(seed, stream_id(StreamTag::rate_reference, t));
        const ComplexMatrix h = sample_complex_gaussian(stats.n, stats.n, stats.sigma_h2, rng);
        rates[t] = mutual_info_rate(h, beamformer(h));
    });
    RateEstimate out;
    out.trials = trials;
    for (double r : rates) out.mean += r;
    out.mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (double r : rates) ss += (r - out.mean) * (r - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
    return out;
}

struct SopConfig {
    ChannelStatistics stats;
    AttackSpec attack;
    std::size_t trials = 10000;
    std::size_t trials_r0 = 10000;
    double rate_fraction = 0.2;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    void validate() const {
        stats.validate();
        if (trials < 1) throw ParameterError("trials: must be >= 1");
        if (!(rate_fraction > 0.0 && rate_fraction < 1.0)) {
            throw ParameterError("rate_fraction: must lie in (0, 1)");
        }
    }
};

/// Wald 95% half-width of a binomial proportion.
inline double binomial_half_width(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

struct SopArmResult {
    AttackMode mode = AttackMode::passive;
    double p_out = 0.0;
    double half_width = 0.0;
    std::size_t outages = 0;
    std::size_t valid_trials = 0;
    std::size_t infeasible = 0; // trials dropped because the attack had no real alpha
    double alpha_mean = 0.0;    // over trials that produced an alpha
};

/// Several attack arms over the same channel draws. Trial t uses streams
/// derived from (cfg.seed, t) only, so results are independent of the worker
/// count and arms see identical (H, G1, G2).
inline std::vector<SopArmResult> sop_monte_carlo_arms(const SopConfig& cfg,
                                                      const std::vector<AttackSpec>& arms, double r0) {
    cfg.validate();
    build_joint_covariance(cfg.stats);
    const double secret_rate = cfg.rate_fraction * r0;

    struct Outcome {
        std::uint8_t outage = 0;
        std::uint8_t infeasible = 0;
        std::uint8_t has_alpha = 0;
        double alpha = 0.0;
    };
    const std::size_t arm_count = arms.size();
    std::vector<Outcome> outcomes(cfg.trials * arm_count);

    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        RngStream channel_rng(cfg.seed, stream_id(StreamTag::channel, t));
        const ChannelSet set = sample_channel_set(cfg.stats, channel_rng);
        for (std::size_t a = 0; a < arm_count; ++a) {
            Outcome& o = outcomes[t * arm_count + a];
            RngStream attack_rng(cfg.seed, stream_id(StreamTag::attack, t));
            RngStream noise_rng(cfg.seed, stream_id(StreamTag::noise, t));
            AttackPlan plan;
            try {
                plan = make_attack_plan(arms[a], cfg.stats, set, attack_rng);
            } catch (const AlphaInfeasibleError&) {
                o.infeasible = 1;
                continue;
            }
            if (plan.alpha) {
                o.has_alpha = 1;
                o.alpha = *plan.alpha;
            }
            const EstimatePair est = observe_estimates(set, plan, cfg.stats.gamma, noise_rng);
            const double leak = mutual_info_rate(set.g1, beamformer(est.h_a));
            o.outage = (r0 - leak < secret_rate) ? 1 : 0;
        }
    });

    std::vector<SopArmResult> results(arm_count);
    for (std::size_t a = 0; a < arm_count; ++a) {
        SopArmResult& r = results[a];
        r.mode = arms[a].mode;
        std::size_t alpha_count = 0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const Outcome& o = outcomes[t * arm_count + a];
            if (o.infeasible) {
                ++r.infeasible;
                continue;
            }
            ++r.valid_trials;
            r.outages += o.outage;
            if (o.has_alpha) {
                ++alpha_count;
                r.alpha_mean += o.alpha;
            }
        }
        if (alpha_count > 0) r.alpha_mean /= static_cast<double>(alpha_count);
        if (r.valid_trials > 0) {
            r.p_out = static_cast<double>(r.outages) / static_cast<double>(r.valid_trials);
            r.half_width = binomial_half_width(r.p_out, r.valid_trials);
        }
    }
    return results;
}

struct SopResult {
    SopArmResult arm;
    RateEstimate r0;
};

inline SopResult sop_monte_carlo(const SopConfig& cfg) {
    cfg.validate();
    SopResult out;
    out.r0 = estimate_r0(cfg.stats, cfg.trials_r0, cfg.seed, cfg.workers);
    out.arm = sop_monte_carlo_arms(cfg, {cfg.attack}, out.r0.mean).front();
    return out;
}

} // namespace pilotguard
