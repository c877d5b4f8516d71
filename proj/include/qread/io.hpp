#pragma once

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qread/codes.hpp"
#include "qread/experiment.hpp"
#include "qread/version.hpp"

namespace qread {

using KeyValues = std::map<std::string, std::string>;

//! Serialize a double with 17 significant digits (lossless replay).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid numeric value '" + value +
                                    "' for key '" + key + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid integer value '" + value +
                                    "' for key '" + key + "'");
    }
}

}  // namespace detail

//! Parse the flat `key = value` format; '#' starts a comment line.
inline KeyValues parse_kv_text(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not of the form key=value: '" + t + "'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " has an empty key");
        if (kv.count(key))
            throw std::invalid_argument("duplicate config key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

inline KeyValues parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_kv_text(in);
}

//! Fully resolved run configuration with every default materialized.
struct RunConfig {
    std::string code_family;  // rs | bch | rm
    unsigned code_n = 0;
    unsigned code_k = 0;
    unsigned code_b = 1;
    unsigned code_delta = 0;
    unsigned code_r = 0;
    unsigned code_m = 0;
    double kappa0 = 0;
    double kappa1 = 0;
    std::string receiver_kind;  // heterodyne | dolinar
    double efficiency = 0.9;
    unsigned rounds = 2;
    double grid_start = 0;
    double grid_stop = 0;
    unsigned grid_points = 0;
    std::string grid_energy = "per-cell";  // per-cell | per-info-bit
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string metric = "info-bit";   // info-bit | block
    std::string baseline = "min";      // coherent | squeezed | min
    std::uint64_t min_error_events = 0;
    std::uint64_t trial_cap = 0;

    std::vector<double> grid() const {
        std::vector<double> g(grid_points);
        for (unsigned i = 0; i < grid_points; ++i)
            g[i] = grid_points == 1
                       ? grid_start
                       : grid_start + (grid_stop - grid_start) *
                                          static_cast<double>(i) /
                                          static_cast<double>(grid_points - 1);
        return g;
    }
};

//! Validate and type a raw key=value map. Unknown keys, missing keys and
//! out-of-range values are reported with the offending key's name. The
//! QREAD_SEED environment variable, when set, overrides the seed.
inline RunConfig resolve_config(const KeyValues& kv) {
    static const std::set<std::string> known = {
        "code.family", "code.n",        "code.k",
        "code.b",      "code.delta",    "code.r",
        "code.m",      "cells.kappa0",  "cells.kappa1",
        "receiver.kind", "receiver.efficiency", "receiver.rounds",
        "grid.start",  "grid.stop",     "grid.points",
        "grid.energy", "trials",        "seed",          "metric",
        "baseline",    "trials.min_errors", "trials.cap"};
    for (const auto& [key, value] : kv)
        if (!known.count(key))
            throw std::invalid_argument("unknown config key '" + key + "'");

    const auto require = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("missing required config key '" + key + "'");
        return it->second;
    };
    const auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    const auto reject = [&](const std::string& key, const std::string& family) {
        if (kv.count(key))
            throw std::invalid_argument("config key '" + key +
                                        "' does not apply to code.family=" + family);
    };

    RunConfig rc;
    rc.code_family = require("code.family");
    if (rc.code_family == "rs") {
        rc.code_n = static_cast<unsigned>(detail::parse_u64("code.n", require("code.n")));
        rc.code_k = static_cast<unsigned>(detail::parse_u64("code.k", require("code.k")));
        if (auto b = get("code.b"))
            rc.code_b = static_cast<unsigned>(detail::parse_u64("code.b", *b));
        reject("code.delta", "rs");
        reject("code.r", "rs");
        reject("code.m", "rs");
    } else if (rc.code_family == "bch") {
        rc.code_n = static_cast<unsigned>(detail::parse_u64("code.n", require("code.n")));
        rc.code_delta = static_cast<unsigned>(
            detail::parse_u64("code.delta", require("code.delta")));
        if (auto b = get("code.b"))
            rc.code_b = static_cast<unsigned>(detail::parse_u64("code.b", *b));
        reject("code.k", "bch");
        reject("code.r", "bch");
        reject("code.m", "bch");
    } else if (rc.code_family == "rm") {
        rc.code_r = static_cast<unsigned>(detail::parse_u64("code.r", require("code.r")));
        rc.code_m = static_cast<unsigned>(detail::parse_u64("code.m", require("code.m")));
        reject("code.n", "rm");
        reject("code.k", "rm");
        reject("code.b", "rm");
        reject("code.delta", "rm");
    } else {
        throw std::invalid_argument("config key 'code.family' must be rs, bch or rm, got '" +
                                    rc.code_family + "'");
    }

    rc.kappa0 = detail::parse_double("cells.kappa0", require("cells.kappa0"));
    rc.kappa1 = detail::parse_double("cells.kappa1", require("cells.kappa1"));
    if (!(rc.kappa0 >= 0.0 && rc.kappa0 <= 1.0))
        throw std::invalid_argument("config key 'cells.kappa0' must lie in [0,1], got " +
                                    kv.at("cells.kappa0"));
    if (!(rc.kappa1 >= 0.0 && rc.kappa1 <= 1.0))
        throw std::invalid_argument("config key 'cells.kappa1' must lie in [0,1], got " +
                                    kv.at("cells.kappa1"));

    rc.receiver_kind = require("receiver.kind");
    if (rc.receiver_kind != "heterodyne" && rc.receiver_kind != "dolinar")
        throw std::invalid_argument(
            "config key 'receiver.kind' must be heterodyne or dolinar, got '" +
            rc.receiver_kind + "'");
    if (auto e = get("receiver.efficiency")) {
        rc.efficiency = detail::parse_double("receiver.efficiency", *e);
        if (!(rc.efficiency >= 0.0 && rc.efficiency <= 1.0))
            throw std::invalid_argument(
                "config key 'receiver.efficiency' must lie in [0,1], got " + *e);
    }
    if (auto r = get("receiver.rounds")) {
        rc.rounds = static_cast<unsigned>(detail::parse_u64("receiver.rounds", *r));
        if (rc.rounds < 1)
            throw std::invalid_argument("config key 'receiver.rounds' must be >= 1");
    }

    rc.grid_start = detail::parse_double("grid.start", require("grid.start"));
    rc.grid_stop = detail::parse_double("grid.stop", require("grid.stop"));
    rc.grid_points =
        static_cast<unsigned>(detail::parse_u64("grid.points", require("grid.points")));
    if (rc.grid_points < 1)
        throw std::invalid_argument("config key 'grid.points' must be >= 1");
    if (rc.grid_start < 0)
        throw std::invalid_argument("config key 'grid.start' must be >= 0");
    if (rc.grid_points > 1 && !(rc.grid_stop > rc.grid_start))
        throw std::invalid_argument(
            "config key 'grid.stop' must exceed grid.start for multi-point grids");

    if (auto e = get("grid.energy")) {
        rc.grid_energy = *e;
        if (rc.grid_energy != "per-cell" && rc.grid_energy != "per-info-bit")
            throw std::invalid_argument(
                "config key 'grid.energy' must be per-cell or per-info-bit, got '" +
                *e + "'");
    }

    rc.trials = detail::parse_u64("trials", require("trials"));
    if (rc.trials < 1) throw std::invalid_argument("config key 'trials' must be >= 1");
    rc.seed = detail::parse_u64("seed", require("seed"));
    if (const char* env = std::getenv("QREAD_SEED"))
        rc.seed = detail::parse_u64("QREAD_SEED", env);

    if (auto m = get("metric")) {
        rc.metric = *m;
        if (rc.metric != "info-bit" && rc.metric != "block")
            throw std::invalid_argument(
                "config key 'metric' must be info-bit or block, got '" + *m + "'");
    }
    if (auto b = get("baseline")) {
        rc.baseline = *b;
        if (rc.baseline != "coherent" && rc.baseline != "squeezed" && rc.baseline != "min")
            throw std::invalid_argument(
                "config key 'baseline' must be coherent, squeezed or min, got '" + *b +
                "'");
    }
    if (auto v = get("trials.min_errors"))
        rc.min_error_events = detail::parse_u64("trials.min_errors", *v);
    if (auto v = get("trials.cap"))
        rc.trial_cap = detail::parse_u64("trials.cap", *v);
    return rc;
}

//! Canonical key=value view of a resolved configuration.
inline KeyValues materialize(const RunConfig& rc) {
    KeyValues kv;
    kv["code.family"] = rc.code_family;
    if (rc.code_family == "rs") {
        kv["code.n"] = std::to_string(rc.code_n);
        kv["code.k"] = std::to_string(rc.code_k);
        kv["code.b"] = std::to_string(rc.code_b);
    } else if (rc.code_family == "bch") {
        kv["code.n"] = std::to_string(rc.code_n);
        kv["code.delta"] = std::to_string(rc.code_delta);
        kv["code.b"] = std::to_string(rc.code_b);
    } else {
        kv["code.r"] = std::to_string(rc.code_r);
        kv["code.m"] = std::to_string(rc.code_m);
    }
    kv["cells.kappa0"] = fmt17(rc.kappa0);
    kv["cells.kappa1"] = fmt17(rc.kappa1);
    kv["receiver.kind"] = rc.receiver_kind;
    kv["receiver.efficiency"] = fmt17(rc.efficiency);
    kv["receiver.rounds"] = std::to_string(rc.rounds);
    kv["grid.start"] = fmt17(rc.grid_start);
    kv["grid.stop"] = fmt17(rc.grid_stop);
    kv["grid.points"] = std::to_string(rc.grid_points);
    kv["grid.energy"] = rc.grid_energy;
    kv["trials"] = std::to_string(rc.trials);
    kv["seed"] = std::to_string(rc.seed);
    kv["metric"] = rc.metric;
    kv["baseline"] = rc.baseline;
    kv["trials.min_errors"] = std::to_string(rc.min_error_events);
    kv["trials.cap"] = std::to_string(rc.trial_cap);
    return kv;
}

inline std::shared_ptr<const BlockCode> build_code(const RunConfig& rc) {
    const auto field_for_length = [](unsigned n, const char* key) {
        unsigned s = 0;
        while ((1u << (s + 1)) <= n + 1u && s < 17) ++s;
        if (s < 1 || s > 16 || (1u << s) != n + 1u)
            throw std::invalid_argument(std::string("config key '") + key +
                                        "' must be 2^s - 1 with 1 <= s <= 16, got " +
                                        std::to_string(n));
        return build_field(s);
    };
    if (rc.code_family == "rs")
        return rs_build(field_for_length(rc.code_n, "code.n"), rc.code_k, rc.code_b);
    if (rc.code_family == "bch")
        return bch_build(field_for_length(rc.code_n, "code.n"), rc.code_delta, rc.code_b);
    return rm_build(rc.code_r, rc.code_m);
}

inline BaselineKind baseline_kind(const std::string& name) {
    if (name == "coherent") return BaselineKind::OptimalCoherent;
    if (name == "squeezed") return BaselineKind::OptimalSqueezed;
    if (name == "min") return BaselineKind::MinOfBoth;
    throw std::invalid_argument("unknown baseline '" + name + "'");
}

inline ExperimentConfig build_experiment(const RunConfig& rc) {
    ExperimentConfig cfg;
    cfg.code = build_code(rc);
    cfg.receiver.kind = rc.receiver_kind == "dolinar" ? ReceiverKind::Dolinar
                                                      : ReceiverKind::Heterodyne;
    cfg.receiver.dolinar = DolinarConfig::from_efficiency(rc.efficiency, rc.rounds);
    cfg.cells = MemoryCellPair(rc.kappa0, rc.kappa1);
    cfg.n_bar_grid = rc.grid();
    cfg.trials = rc.trials;
    cfg.seed = rc.seed;
    cfg.metric = rc.metric == "block" ? Metric::BlockErrorRate
                                      : Metric::InfoBitErrorRate;
    cfg.min_error_events = rc.min_error_events;
    cfg.trial_cap = rc.trial_cap;
    cfg.energy_per_info_bit = rc.grid_energy == "per-info-bit";
    return cfg;
}

//! FNV-1a 64 over the sorted `key=value` lines of a configuration.
inline std::uint64_t manifest_hash(const KeyValues& kv) {
    std::uint64_t h = 14695981039346656037ull;
    const auto eat = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [key, value] : kv) {  // std::map iterates sorted
        eat(key);
        eat("=");
        eat(value);
        eat("\n");
    }
    return h;
}

inline std::string manifest_hash_hex(const KeyValues& kv) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(manifest_hash(kv)));
    return buf;
}

//! Write the resolved configuration as a replayable manifest. Comment
//! lines carry tool version and timestamp; they are ignored on load and
//! excluded from the hash, so a stored manifest re-runs byte-identically.
inline void write_manifest(std::ostream& out, const RunConfig& rc) {
    std::time_t now = std::time(nullptr);
    char stamp[32] = "unknown";
    if (std::tm* utc = std::gmtime(&now))
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", utc);
    const KeyValues kv = materialize(rc);
    out << "# qread run manifest\n";
    out << "# tool_version=" << kToolVersion << "\n";
    out << "# created=" << stamp << "\n";
    out << "# hash=" << manifest_hash_hex(kv) << "\n";
    for (const auto& [key, value] : kv) out << key << "=" << value << "\n";
}

inline const char* kCurveCsvHeader = "n_bar,p_err,ci_low,ci_high,errors,trials";

inline void emit_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
    out << kCurveCsvHeader << "\n";
    for (const auto& pt : curve) {
        out << fmt17(pt.n_bar) << ',' << fmt17(pt.p_hat) << ',' << fmt17(pt.ci_low)
            << ',' << fmt17(pt.ci_high) << ',' << pt.errors << ',' << pt.trials
            << "\n";
    }
}

inline std::vector<CurvePoint> parse_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kCurveCsvHeader)
        throw std::invalid_argument("curve CSV is missing the expected header '" +
                                    std::string(kCurveCsvHeader) + "'");
    std::vector<CurvePoint> curve;
    while (std::getline(in, line)) {
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(t);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.size() != 6)
            throw std::invalid_argument("curve CSV row has " +
                                        std::to_string(cols.size()) +
                                        " columns, expected 6: '" + t + "'");
        CurvePoint pt;
        pt.n_bar = detail::parse_double("n_bar", cols[0]);
        pt.p_hat = detail::parse_double("p_err", cols[1]);
        pt.ci_low = detail::parse_double("ci_low", cols[2]);
        pt.ci_high = detail::parse_double("ci_high", cols[3]);
        pt.errors = detail::parse_u64("errors", cols[4]);
        pt.trials = detail::parse_u64("trials", cols[5]);
        curve.push_back(pt);
    }
    return curve;
}

inline nlohmann::json curve_point_json(const CurvePoint& pt) {
    return {{"n_bar", pt.n_bar},   {"p_err", pt.p_hat},
            {"ci_low", pt.ci_low}, {"ci_high", pt.ci_high},
            {"errors", pt.errors}, {"trials", pt.trials}};
}

//! Threshold report with enough context to replay it: baseline and
//! metric names, code identity and rate, bracketing points, manifest
//! hash.
inline nlohmann::json threshold_json(const ThresholdReport& report,
                                     const RunConfig& rc,
                                     const std::string& code_name, double rate) {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["baseline"] = to_string(report.baseline);
    j["metric"] = rc.metric;
    j["code"] = code_name;
    j["rate"] = rate;
    j["receiver"] = rc.receiver_kind;
    if (report.threshold_n_bar)
        j["threshold"] = *report.threshold_n_bar;
    else
        j["threshold"] = nullptr;
    j["reason"] = report.note;
    j["left_censored"] = report.left_censored;
    j["low_resolution"] = report.low_resolution;
    j["bracket_low"] =
        report.bracket_low ? curve_point_json(*report.bracket_low) : nlohmann::json();
    j["bracket_high"] =
        report.bracket_high ? curve_point_json(*report.bracket_high) : nlohmann::json();
    j["manifest_hash"] = manifest_hash_hex(materialize(rc));
    return j;
}

}  // namespace qread
