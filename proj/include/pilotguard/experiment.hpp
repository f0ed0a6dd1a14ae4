#pragma once

// Experiment runner behind the `pilotguard` CLI: configuration (flat key/value
// file with per-experiment sections, overridable from the command line), the
// three sweeps, and CSV output with a one-line JSON metadata header.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pilotguard/adversary.hpp"
#include "pilotguard/channel.hpp"
#include "pilotguard/detector.hpp"
#include "pilotguard/errors.hpp"
#include "pilotguard/keyconf.hpp"
#include "pilotguard/parallel.hpp"
#include "pilotguard/secrecy.hpp"

#ifndef PILOTGUARD_VERSION
#define PILOTGUARD_VERSION "0.0.0"
#endif

namespace pilotguard {

enum class ExperimentKind { fig1, fig2, detect };

inline std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::fig1: return "fig1";
    case ExperimentKind::fig2: return "fig2";
    case ExperimentKind::detect: return "detect";
    }
    return "unknown";
}

inline ExperimentKind parse_experiment_kind(std::string_view name) {
    if (name == "fig1") return ExperimentKind::fig1;
    if (name == "fig2") return ExperimentKind::fig2;
    if (name == "detect") return ExperimentKind::detect;
    throw ParameterError("experiment: unknown experiment '" + std::string(name) +
                         "' (expected fig1, fig2 or detect)");
}

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::fig1;
    std::uint64_t seed = 1;
    std::size_t trials = 10000;
    std::size_t trials_r0 = 10000;
    std::vector<int> n_list{2, 4, 6};      // fig1
    int n = 6;                             // fig2, detect
    std::vector<double> zeta_list{0.0, 0.2, 0.4, 0.6}; // fig2
    double zeta = 0.0;                     // detect (0 = independent channels)
    double sigma_h2 = 1.0;
    double sigma_g2 = 0.5;
    double sigma_q2 = 0.5;
    std::vector<double> gamma{0.0};
    std::vector<double> delta{1.0};
    double epsilon = 0.2;
    std::size_t key_bits = 64;
    double rate_fraction = 0.2;
    bool both_phases = false;
    std::vector<AttackMode> modes{AttackMode::passive, AttackMode::baseline_phase2, AttackMode::random_q,
                                  AttackMode::correlated_ml, AttackMode::full_knowledge};
    unsigned workers = 1; // execution detail, never echoed

    static ExperimentConfig defaults(ExperimentKind kind) {
        ExperimentConfig c;
        c.experiment = kind;
        switch (kind) {
        case ExperimentKind::fig1:
            c.sigma_h2 = 1.0;
            c.sigma_g2 = 0.5;
            break;
        case ExperimentKind::fig2:
            c.sigma_h2 = 0.5;
            c.sigma_g2 = 0.5;
            c.n = 6;
            break;
        case ExperimentKind::detect:
            c.sigma_h2 = 0.5;
            c.sigma_g2 = 0.5;
            c.n = 8;
            c.trials = 1000;
            c.gamma = {0.01};
            break;
        }
        return c;
    }
};

using RawConfig = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(first, last - first + 1));
    if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front()) {
        out = out.substr(1, out.size() - 2);
    }
    return out;
}

inline std::vector<std::string> split_list(std::string_view raw) {
    std::string s = trim(raw);
    if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

inline double parse_double(const std::string& key, std::string_view raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ParameterError(key + ": expected a number, got '" + s + "'");
    }
    return v;
}

inline std::uint64_t parse_uint(const std::string& key, std::string_view raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParameterError(key + ": expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& key, std::string_view raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ParameterError(key + ": expected true/false, got '" + s + "'");
}

template <typename T>
void require_increasing(const std::string& key, const std::vector<T>& values) {
    if (values.empty()) throw ParameterError(key + ": sweep list must not be empty");
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i - 1] < values[i])) throw ParameterError(key + ": values must be strictly increasing");
    }
}

} // namespace detail

/// Parses the flat config format:
///
///   # comment
///   seed = 7
///   [fig1]
///   n_list = 2, 4, 6
///
/// Top-level keys apply to every experiment; a section only applies when it
/// names the experiment being run. A file whose first character is '#' or
/// '{' is read as a previous output's JSON metadata and its "config" echo is
/// used instead.
inline RawConfig parse_config_text(std::string_view text, ExperimentKind kind) {
    RawConfig top;
    RawConfig section_values;
    const std::string wanted(to_string(kind));

    const std::string trimmed = detail::trim(text);
    if (trimmed.rfind("#{", 0) == 0 || trimmed.rfind("{", 0) == 0) {
        std::string first_line = trimmed.substr(0, trimmed.find('\n'));
        if (first_line.front() == '#') first_line.erase(0, 1);
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(first_line);
        } catch (const nlohmann::json::exception& e) {
            throw ParameterError(std::string("config: cannot parse JSON metadata: ") + e.what());
        }
        const nlohmann::json& cfg = meta.contains("config") ? meta["config"] : meta;
        if (!cfg.is_object()) throw ParameterError("config: JSON echo must be an object");
        RawConfig out;
        for (const auto& [key, value] : cfg.items()) {
            if (value.is_array()) {
                std::string joined;
                for (const auto& item : value) {
                    if (!joined.empty()) joined += ",";
                    joined += item.is_string() ? item.get<std::string>() : item.dump();
                }
                out[key] = joined;
            } else if (value.is_string()) {
                out[key] = value.get<std::string>();
            } else {
                out[key] = value.dump();
            }
        }
        return out;
    }

    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParameterError("config line " + std::to_string(lineno) + ": bad section header");
            section = detail::trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (section.empty()) {
            top[key] = value;
        } else if (section == wanted) {
            section_values[key] = value;
        }
    }
    for (auto& [k, v] : section_values) top[k] = v;
    return top;
}

inline RawConfig load_config_file(const std::string& path, ExperimentKind kind) {
    std::ifstream in(path);
    if (!in) throw ParameterError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), kind);
}

/// Applies raw key/value pairs on top of `cfg`. Unknown keys are rejected.
inline void apply_config(ExperimentConfig& cfg, const RawConfig& raw) {
    using namespace detail;
    for (const auto& [key, value] : raw) {
        if (key == "experiment") {
            if (parse_experiment_kind(trim(value)) != cfg.experiment) {
                throw ParameterError("experiment: config is for '" + trim(value) + "' but running '" +
                                     std::string(to_string(cfg.experiment)) + "'");
            }
        } else if (key == "seed") {
            cfg.seed = parse_uint(key, value);
        } else if (key == "trials") {
            cfg.trials = parse_uint(key, value);
        } else if (key == "trials_r0") {
            cfg.trials_r0 = parse_uint(key, value);
        } else if (key == "n_list") {
            cfg.n_list.clear();
            for (const auto& item : split_list(value)) {
                const auto v = parse_uint(key, item);
                if (v < 1 || v > 4096) throw ParameterError("n_list: antenna counts must lie in [1, 4096]");
                cfg.n_list.push_back(static_cast<int>(v));
            }
        } else if (key == "n") {
            const auto v = parse_uint(key, value);
            if (v < 1 || v > 4096) throw ParameterError("n: antenna count must lie in [1, 4096]");
            cfg.n = static_cast<int>(v);
        } else if (key == "zeta_list") {
            cfg.zeta_list.clear();
            for (const auto& item : split_list(value)) cfg.zeta_list.push_back(parse_double(key, item));
        } else if (key == "zeta") {
            cfg.zeta = parse_double(key, value);
        } else if (key == "sigma_h2") {
            cfg.sigma_h2 = parse_double(key, value);
        } else if (key == "sigma_g2") {
            cfg.sigma_g2 = parse_double(key, value);
        } else if (key == "sigma_q2") {
            cfg.sigma_q2 = parse_double(key, value);
        } else if (key == "gamma") {
            cfg.gamma.clear();
            for (const auto& item : split_list(value)) cfg.gamma.push_back(parse_double(key, item));
        } else if (key == "delta") {
            cfg.delta.clear();
            for (const auto& item : split_list(value)) cfg.delta.push_back(parse_double(key, item));
        } else if (key == "epsilon") {
            cfg.epsilon = parse_double(key, value);
        } else if (key == "key_bits") {
            cfg.key_bits = parse_uint(key, value);
        } else if (key == "rate_fraction") {
            cfg.rate_fraction = parse_double(key, value);
        } else if (key == "both_phases") {
            cfg.both_phases = parse_bool(key, value);
        } else if (key == "modes") {
            cfg.modes.clear();
            for (const auto& item : split_list(value)) {
                try {
                    cfg.modes.push_back(parse_attack_mode(item));
                } catch (const ParameterError& e) {
                    throw ParameterError(std::string("modes: ") + e.what());
                }
            }
        } else if (key == "workers") {
            const auto v = parse_uint(key, value);
            if (v < 1 || v > 1024) throw ParameterError("workers: must lie in [1, 1024]");
            cfg.workers = static_cast<unsigned>(v);
        } else {
            throw ParameterError(key + ": unknown configuration key");
        }
    }
}

inline void validate(const ExperimentConfig& cfg) {
    using detail::require_increasing;
    if (cfg.trials < 1) throw ParameterError("trials: must be >= 1");
    if (!(cfg.sigma_h2 > 0.0)) throw ParameterError("sigma_h2: must be > 0");
    if (!(cfg.sigma_g2 > 0.0)) throw ParameterError("sigma_g2: must be > 0");
    if (!(cfg.sigma_q2 >= 0.0)) throw ParameterError("sigma_q2: must be >= 0");
    require_increasing("gamma", cfg.gamma);
    for (double g : cfg.gamma) {
        if (!(g >= 0.0)) throw ParameterError("gamma: values must be >= 0");
    }
    switch (cfg.experiment) {
    case ExperimentKind::fig1:
    case ExperimentKind::fig2:
        if (cfg.trials_r0 < 100) throw ParameterError("trials_r0: must be >= 100");
        if (!(cfg.rate_fraction > 0.0 && cfg.rate_fraction < 1.0)) {
            throw ParameterError("rate_fraction: must lie in (0, 1)");
        }
        if (cfg.gamma.size() != 1) throw ParameterError("gamma: fig1/fig2 take a single value");
        if (cfg.experiment == ExperimentKind::fig1) {
            require_increasing("n_list", cfg.n_list);
        } else {
            require_increasing("zeta_list", cfg.zeta_list);
            for (double z : cfg.zeta_list) {
                if (!(z >= 0.0)) throw ParameterError("zeta_list: values must be >= 0");
            }
        }
        break;
    case ExperimentKind::detect:
        require_increasing("delta", cfg.delta);
        for (double d : cfg.delta) {
            if (!(d >= 0.0)) throw ParameterError("delta: values must be >= 0");
        }
        if (!(cfg.epsilon > 0.0)) throw ParameterError("epsilon: must be > 0");
        if (cfg.key_bits < 1) throw ParameterError("key_bits: must be >= 1");
        if (cfg.modes.empty()) throw ParameterError("modes: must list at least one attack mode");
        if (!(cfg.zeta >= 0.0)) throw ParameterError("zeta: must be >= 0");
        break;
    }
}

/// Resolved configuration as JSON; this is what every output echoes.
inline nlohmann::ordered_json config_echo(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["experiment"] = std::string(to_string(cfg.experiment));
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    j["sigma_h2"] = cfg.sigma_h2;
    j["sigma_g2"] = cfg.sigma_g2;
    j["gamma"] = cfg.gamma;
    switch (cfg.experiment) {
    case ExperimentKind::fig1:
        j["trials_r0"] = cfg.trials_r0;
        j["n_list"] = cfg.n_list;
        j["rate_fraction"] = cfg.rate_fraction;
        j["both_phases"] = cfg.both_phases;
        break;
    case ExperimentKind::fig2:
        j["trials_r0"] = cfg.trials_r0;
        j["n"] = cfg.n;
        j["zeta_list"] = cfg.zeta_list;
        j["rate_fraction"] = cfg.rate_fraction;
        j["both_phases"] = cfg.both_phases;
        break;
    case ExperimentKind::detect: {
        j["n"] = cfg.n;
        j["zeta"] = cfg.zeta;
        j["sigma_q2"] = cfg.sigma_q2;
        j["delta"] = cfg.delta;
        j["epsilon"] = cfg.epsilon;
        j["key_bits"] = cfg.key_bits;
        std::vector<std::string> modes;
        for (auto m : cfg.modes) modes.emplace_back(to_string(m));
        j["modes"] = modes;
        break;
    }
    }
    return j;
}

using Cell = std::variant<std::int64_t, double, std::string>;

struct ExperimentResult {
    ExperimentKind kind = ExperimentKind::fig1;
    nlohmann::ordered_json metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> warnings;

    std::size_t column(std::string_view name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw ParameterError("no column named '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    double number(std::size_t row, std::string_view name) const {
        const Cell& c = rows.at(row).at(column(name));
        if (const auto* d = std::get_if<double>(&c)) return *d;
        if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
        throw ParameterError("column '" + std::string(name) + "' is not numeric");
    }

    const std::string& text(std::size_t row, std::string_view name) const {
        return std::get<std::string>(rows.at(row).at(column(name)));
    }
};

/// Shortest exact form with up to 17 significant digits.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                         std::chars_format::general, 17);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

inline void write_csv(std::ostream& out, const ExperimentResult& result) {
    out << '#' << result.metadata.dump() << '\n';
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
        out << (i ? "," : "") << result.columns[i];
    }
    out << '\n';
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            std::visit(
                [&out](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        out << format_number(v);
                    } else {
                        out << v;
                    }
                },
                row[i]);
        }
        out << '\n';
    }
}

inline std::string to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    write_csv(out, result);
    return out.str();
}

using ProgressFn = std::function<void(const std::string&)>;

namespace detail {

inline ExperimentResult start_result(const ExperimentConfig& cfg, std::vector<std::string> columns) {
    ExperimentResult r;
    r.kind = cfg.experiment;
    r.columns = std::move(columns);
    r.metadata["kind"] = std::string(to_string(cfg.experiment));
    r.metadata["version"] = PILOTGUARD_VERSION;
    r.metadata["seed"] = cfg.seed;
    r.metadata["trials"] = cfg.trials;
    r.metadata["columns"] = r.columns;
    r.metadata["config"] = config_echo(cfg);
    return r;
}

inline void report(const ProgressFn& progress, const std::string& msg) {
    if (progress) progress(msg);
}

} // namespace detail

/// SOP versus antenna count, passive and baseline-attack arms.
inline ExperimentResult run_fig1(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
    if (cfg.experiment != ExperimentKind::fig1) throw ParameterError("experiment: run_fig1 needs experiment = fig1");
    validate(cfg);
    ExperimentResult result = detail::start_result(
        cfg, {"N", "sop_passive", "ci_passive", "sop_active", "ci_active", "R0", "R0_stderr"});
    const AttackMode active = cfg.both_phases ? AttackMode::baseline_both : AttackMode::baseline_phase2;
    for (int n : cfg.n_list) {
        SopConfig sop;
        sop.stats.n = n;
        sop.stats.sigma_h2 = cfg.sigma_h2;
        sop.stats.sigma_g2 = cfg.sigma_g2;
        sop.stats.gamma = cfg.gamma.front();
        sop.stats.mode = CorrelationMode::independent;
        sop.trials = cfg.trials;
        sop.trials_r0 = cfg.trials_r0;
        sop.rate_fraction = cfg.rate_fraction;
        sop.seed = cfg.seed;
        sop.workers = cfg.workers;
        const RateEstimate r0 = estimate_r0(sop.stats, cfg.trials_r0, cfg.seed, cfg.workers);
        const auto arms = sop_monte_carlo_arms(sop, {{AttackMode::passive}, {active}}, r0.mean);
        result.rows.push_back({std::int64_t{n}, arms[0].p_out, arms[0].half_width, arms[1].p_out,
                               arms[1].half_width, r0.mean, r0.std_error});
        detail::report(progress, "fig1: N = " + std::to_string(n) + " done");
    }
    return result;
}

/// SOP versus channel correlation, passive / baseline / correlated-ML arms.
inline ExperimentResult run_fig2(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
    if (cfg.experiment != ExperimentKind::fig2) throw ParameterError("experiment: run_fig2 needs experiment = fig2");
    validate(cfg);
    const double boundary = psd_zeta_boundary(cfg.sigma_h2, cfg.sigma_g2);
    for (double z : cfg.zeta_list) {
        ChannelStatistics s;
        s.n = cfg.n;
        s.sigma_h2 = cfg.sigma_h2;
        s.sigma_g2 = cfg.sigma_g2;
        s.zeta = z;
        s.mode = CorrelationMode::scalar_diagonal;
        try {
            build_joint_covariance(s);
        } catch (const NotPsdError& e) {
            std::ostringstream msg;
            msg.precision(10);
            msg << "zeta_list: zeta = " << z << " is beyond the PSD boundary zeta* = " << boundary;
            throw NotPsdError(e.pivot(), msg.str());
        }
    }

    ExperimentResult result = detail::start_result(
        cfg, {"zeta", "sop_passive", "sop_baseline", "sop_corr_ml", "ci_passive", "ci_baseline",
              "ci_corr_ml", "alpha_mean", "infeasible_count", "R0", "R0_stderr"});
    result.metadata["psd_boundary"] = boundary;

    ChannelStatistics base;
    base.n = cfg.n;
    base.sigma_h2 = cfg.sigma_h2;
    base.sigma_g2 = cfg.sigma_g2;
    base.gamma = cfg.gamma.front();
    const RateEstimate r0 = estimate_r0(base, cfg.trials_r0, cfg.seed, cfg.workers);
    const AttackMode baseline = cfg.both_phases ? AttackMode::baseline_both : AttackMode::baseline_phase2;

    for (double z : cfg.zeta_list) {
        SopConfig sop;
        sop.stats = base;
        sop.stats.zeta = z;
        sop.stats.mode = CorrelationMode::scalar_diagonal;
        sop.trials = cfg.trials;
        sop.trials_r0 = cfg.trials_r0;
        sop.rate_fraction = cfg.rate_fraction;
        sop.seed = cfg.seed;
        sop.workers = cfg.workers;
        const auto arms = sop_monte_carlo_arms(
            sop, {{AttackMode::passive}, {baseline}, {AttackMode::correlated_ml}}, r0.mean);
        result.rows.push_back({z, arms[0].p_out, arms[1].p_out, arms[2].p_out, arms[0].half_width,
                               arms[1].half_width, arms[2].half_width, arms[2].alpha_mean,
                               static_cast<std::int64_t>(arms[2].infeasible), r0.mean, r0.std_error});
        detail::report(progress, "fig2: zeta = " + format_number(z) + " done");
    }
    return result;
}

struct DetectionCounts {
    std::size_t keyconf_fail = 0;
    std::size_t trace_a_fail = 0;
    std::size_t trace_b_fail = 0;
    std::size_t pairing_fail = 0;
    std::size_t trials = 0;
};

/// One full protocol round: two-phase training under `spec`, key extraction
/// with public index disclosure, key confirmation and both trace checks.
inline DetectionReport run_protocol_trial(const ChannelStatistics& stats, const AttackSpec& spec,
                                          double delta, double epsilon, std::size_t key_bits,
                                          std::uint64_t seed, std::uint64_t trial) {
    RngStream channel_rng(seed, stream_id(StreamTag::channel, trial));
    RngStream attack_rng(seed, stream_id(StreamTag::attack, trial));
    RngStream noise_rng(seed, stream_id(StreamTag::noise, trial));
    RngStream challenge_rng(seed, stream_id(StreamTag::challenge, trial));

    const ChannelSet set = sample_channel_set(stats, channel_rng);
    const AttackPlan plan = make_attack_plan(spec, stats, set, attack_rng);
    const EstimatePair est = observe_estimates(set, plan, stats.gamma, noise_rng);

    Verdict keyconf = Verdict::fail;
    try {
        const KeyExtraction alice = extract_key(est.h_a, stats, delta, key_bits);
        const SecretKey bob = extract_key_at(est.h_b, alice.indices, key_bits);
        keyconf = key_confirmation_round(alice.key, bob, challenge_rng).verdict;
    } catch (const InsufficientEntropyError&) {
        keyconf = Verdict::fail; // nothing to confirm
    }
    return pairing_decision(keyconf, trace_check(est.h_a, stats, epsilon),
                            trace_check(est.h_b, stats, epsilon));
}

inline DetectionCounts run_detection_point(const ChannelStatistics& stats, const AttackSpec& spec,
                                           double delta, double epsilon, std::size_t key_bits,
                                           std::size_t trials, std::uint64_t seed, unsigned workers) {
    std::vector<DetectionReport> reports(trials);
    parallel_for(trials, workers, [&](std::size_t t) {
        reports[t] = run_protocol_trial(stats, spec, delta, epsilon, key_bits, seed, t);
    });
    DetectionCounts c;
    c.trials = trials;
    for (const auto& r : reports) {
        c.keyconf_fail += r.keyconf == Verdict::fail;
        c.trace_a_fail += r.trace_alice.verdict == Verdict::fail;
        c.trace_b_fail += r.trace_bob.verdict == Verdict::fail;
        c.pairing_fail += !r.pairing_succeeds;
    }
    return c;
}

/// Detection rates over attack mode x gamma x delta.
inline ExperimentResult run_detect(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
    if (cfg.experiment != ExperimentKind::detect) throw ParameterError("experiment: run_detect needs experiment = detect");
    validate(cfg);
    ExperimentResult result = detail::start_result(
        cfg, {"mode", "gamma", "delta", "keyconf_fail_rate", "traceA_fail_rate", "traceB_fail_rate",
              "pairing_fail_rate", "trials"});

    ChannelStatistics base;
    base.n = cfg.n;
    base.sigma_h2 = cfg.sigma_h2;
    base.sigma_g2 = cfg.sigma_g2;
    base.zeta = cfg.zeta;
    base.mode = cfg.zeta > 0.0 ? CorrelationMode::scalar_diagonal : CorrelationMode::independent;
    build_joint_covariance(base);

    const double samples = 2.0 * cfg.n * cfg.n;
    for (double gamma : cfg.gamma) {
        if (gamma > 0.0) {
            const double budget = sk_capacity(rho_no_attack(cfg.sigma_h2, gamma)) * samples;
            if (budget < static_cast<double>(cfg.key_bits)) {
                result.warnings.push_back("gamma = " + format_number(gamma) + ": SK capacity x 2N^2 = " +
                                          format_number(budget) + " bits is below key_bits = " +
                                          std::to_string(cfg.key_bits));
            }
        }
    }

    const auto rate = [](std::size_t k, std::size_t n) { return static_cast<double>(k) / static_cast<double>(n); };
    for (AttackMode mode : cfg.modes) {
        for (double gamma : cfg.gamma) {
            for (double delta : cfg.delta) {
                ChannelStatistics stats = base;
                stats.gamma = gamma;
                const DetectionCounts c = run_detection_point(stats, {mode, cfg.sigma_q2}, delta, cfg.epsilon,
                                                              cfg.key_bits, cfg.trials, cfg.seed, cfg.workers);
                result.rows.push_back({std::string(to_string(mode)), gamma, delta, rate(c.keyconf_fail, c.trials),
                                       rate(c.trace_a_fail, c.trials), rate(c.trace_b_fail, c.trials),
                                       rate(c.pairing_fail, c.trials), static_cast<std::int64_t>(c.trials)});
                detail::report(progress, "detect: " + std::string(to_string(mode)) + " gamma = " +
                                             format_number(gamma) + " delta = " + format_number(delta) + " done");
            }
        }
    }
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
    switch (cfg.experiment) {
    case ExperimentKind::fig1: return run_fig1(cfg, progress);
    case ExperimentKind::fig2: return run_fig2(cfg, progress);
    case ExperimentKind::detect: return run_detect(cfg, progress);
    }
    throw ParameterError("experiment: unknown kind");
}

} // namespace pilotguard
