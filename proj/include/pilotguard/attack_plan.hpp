#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pilotguard/errors.hpp"
#include "pilotguard/numerics.hpp"

namespace pilotguard {

enum class AttackMode {
    passive,
    baseline_phase2,
    baseline_both,
    random_q,
    correlated_ml,
    full_knowledge,
};

inline std::string_view to_string(AttackMode mode) {
    switch (mode) {
    case AttackMode::passive: return "passive";
    case AttackMode::baseline_phase2: return "baseline";
    case AttackMode::baseline_both: return "baseline-both";
    case AttackMode::random_q: return "random-q";
    case AttackMode::correlated_ml: return "correlated-ml";
    case AttackMode::full_knowledge: return "full-knowledge";
    }
    return "unknown";
}

inline AttackMode parse_attack_mode(std::string_view name) {
    if (name == "passive") return AttackMode::passive;
    if (name == "baseline" || name == "baseline-phase2") return AttackMode::baseline_phase2;
    if (name == "baseline-both") return AttackMode::baseline_both;
    if (name == "random-q") return AttackMode::random_q;
    if (name == "correlated-ml" || name == "corr-ml") return AttackMode::correlated_ml;
    if (name == "full-knowledge") return AttackMode::full_knowledge;
    throw ParameterError("unknown attack mode '" + std::string(name) + "'");
}

/// Eve's precoders for the two pilot phases.
///
/// Phase 1 (Alice -> Bob pilots) reaches Bob through G2, phase 2 (Bob -> Alice)
/// reaches Alice through G1. An absent precoder means Eve stays silent.
struct AttackPlan {
    AttackMode mode = AttackMode::passive;
    std::optional<ComplexMatrix> p1;
    std::optional<ComplexMatrix> p2;
    std::optional<ComplexMatrix> q;
    std::optional<double> alpha;
};

} // namespace pilotguard
