#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qread/io.hpp"

namespace qread::cli {

namespace detail {

struct GridSpec {
    double start = 0;
    double stop = 0;
    unsigned points = 0;
};

//! Parse "start:stop:points" (e.g. "0:10:101").
inline GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("grid must be start:stop:points, got '" + text +
                                    "'");
    g.start = qread::detail::parse_double("grid.start", text.substr(0, c1));
    g.stop = qread::detail::parse_double("grid.stop", text.substr(c1 + 1, c2 - c1 - 1));
    g.points = static_cast<unsigned>(
        qread::detail::parse_u64("grid.points", text.substr(c2 + 1)));
    if (g.points < 1) throw std::invalid_argument("grid needs at least one point");
    if (g.points > 1 && !(g.stop > g.start))
        throw std::invalid_argument("grid stop must exceed start");
    return g;
}

inline std::vector<double> grid_values(const GridSpec& g) {
    std::vector<double> v(g.points);
    for (unsigned i = 0; i < g.points; ++i)
        v[i] = g.points == 1 ? g.start
                             : g.start + (g.stop - g.start) * static_cast<double>(i) /
                                             static_cast<double>(g.points - 1);
    return v;
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    fn(out);
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

inline PcExponent pc_exponent_from(const std::string& name) {
    if (name == "squared") return PcExponent::Squared;
    if (name == "paper") return PcExponent::Paper;
    throw std::invalid_argument("--pc-exponent must be squared or paper");
}

//! Option set shared by `curve` and `threshold`: a config file plus
//! per-key override flags. Only flags the user actually set override
//! file keys.
struct RunOptions {
    std::string config_path;
    std::string code_family, receiver, metric, baseline, grid;
    std::uint64_t code_n = 0, code_k = 0, code_b = 0, code_delta = 0, code_r = 0,
                  code_m = 0;
    double kappa0 = 0, kappa1 = 0, efficiency = 0, rounds = 0;
    std::uint64_t trials = 0, seed = 0, min_errors = 0, trial_cap = 0;
    unsigned workers = 0;
    bool per_info_bit = false;

    CLI::Option* o_family = nullptr;
    CLI::Option* o_n = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_b = nullptr;
    CLI::Option* o_delta = nullptr;
    CLI::Option* o_r = nullptr;
    CLI::Option* o_m = nullptr;
    CLI::Option* o_kappa0 = nullptr;
    CLI::Option* o_kappa1 = nullptr;
    CLI::Option* o_receiver = nullptr;
    CLI::Option* o_eff = nullptr;
    CLI::Option* o_rounds = nullptr;
    CLI::Option* o_grid = nullptr;
    CLI::Option* o_trials = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_metric = nullptr;
    CLI::Option* o_baseline = nullptr;
    CLI::Option* o_min_errors = nullptr;
    CLI::Option* o_trial_cap = nullptr;
    CLI::Option* o_per_info_bit = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "key=value config file (a stored manifest replays as-is)");
        o_family = cmd->add_option("--code-family", code_family,
                                   "code family: rs, bch or rm");
        o_n = cmd->add_option("--code-n", code_n, "block length (rs, bch)");
        o_k = cmd->add_option("--code-k", code_k, "dimension in symbols (rs)");
        o_b = cmd->add_option("--code-b", code_b, "first generator root exponent");
        o_delta = cmd->add_option("--code-delta", code_delta, "design distance (bch)");
        o_r = cmd->add_option("--code-r", code_r, "order (rm)");
        o_m = cmd->add_option("--code-m", code_m, "variables (rm)");
        o_kappa0 = cmd->add_option("--kappa0", kappa0, "transmissivity of channel 0");
        o_kappa1 = cmd->add_option("--kappa1", kappa1, "transmissivity of channel 1");
        o_receiver = cmd->add_option("--receiver", receiver,
                                     "receiver kind: heterodyne or dolinar");
        o_eff = cmd->add_option("--efficiency", efficiency,
                                "Dolinar photodetector efficiency (1 - eta)");
        o_rounds = cmd->add_option("--rounds", rounds, "Dolinar feedback rounds");
        o_grid = cmd->add_option("--grid", grid,
                                 "photon-number grid start:stop:points");
        o_trials = cmd->add_option("--trials", trials, "Monte Carlo trials per point");
        o_seed = cmd->add_option("--seed", seed, "64-bit master seed");
        o_metric = cmd->add_option("--metric", metric,
                                   "error metric: info-bit or block");
        o_baseline = cmd->add_option("--baseline", baseline,
                                     "threshold baseline: coherent, squeezed or min");
        o_min_errors = cmd->add_option(
            "--min-errors", min_errors,
            "extend each point until this many error events (0 = fixed trials)");
        o_trial_cap = cmd->add_option("--trial-cap", trial_cap,
                                      "trial cap for --min-errors extension");
        o_per_info_bit = cmd->add_flag(
            "--energy-per-info-bit", per_info_bit,
            "treat grid values as photons per information bit (scales the "
            "per-cell probe energy by K/N)");
        cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
    }

    KeyValues merged() const {
        KeyValues kv;
        if (!config_path.empty()) kv = parse_kv_file(config_path);
        const auto set = [&](CLI::Option* opt, const std::string& key,
                             const std::string& value) {
            if (opt && opt->count() > 0) kv[key] = value;
        };
        set(o_family, "code.family", code_family);
        set(o_n, "code.n", std::to_string(code_n));
        set(o_k, "code.k", std::to_string(code_k));
        set(o_b, "code.b", std::to_string(code_b));
        set(o_delta, "code.delta", std::to_string(code_delta));
        set(o_r, "code.r", std::to_string(code_r));
        set(o_m, "code.m", std::to_string(code_m));
        set(o_kappa0, "cells.kappa0", fmt17(kappa0));
        set(o_kappa1, "cells.kappa1", fmt17(kappa1));
        set(o_receiver, "receiver.kind", receiver);
        set(o_eff, "receiver.efficiency", fmt17(efficiency));
        set(o_rounds, "receiver.rounds", fmt17(rounds));
        set(o_trials, "trials", std::to_string(trials));
        set(o_seed, "seed", std::to_string(seed));
        set(o_metric, "metric", metric);
        set(o_baseline, "baseline", baseline);
        set(o_min_errors, "trials.min_errors", std::to_string(min_errors));
        set(o_trial_cap, "trials.cap", std::to_string(trial_cap));
        set(o_per_info_bit, "grid.energy",
            per_info_bit ? "per-info-bit" : "per-cell");
        if (o_grid && o_grid->count() > 0) {
            const GridSpec g = parse_grid(grid);
            kv["grid.start"] = fmt17(g.start);
            kv["grid.stop"] = fmt17(g.stop);
            kv["grid.points"] = std::to_string(g.points);
        }
        return kv;
    }
};

inline int run_baseline(double k0, double k1, const GridSpec& grid,
                        const std::string& pc_mode, const std::string& out_path) {
    const MemoryCellPair cells(k0, k1);
    const PcExponent pc = pc_exponent_from(pc_mode);
    with_output(out_path, [&](std::ostream& out) {
        out << "n_bar,p_c,p_s\n";
        for (double nb : grid_values(grid))
            out << fmt17(nb) << ',' << fmt17(optimal_coherent_error(cells, nb, pc))
                << ',' << fmt17(optimal_squeezed_error(cells, nb)) << "\n";
    });
    return 0;
}

inline int run_cell_error(double k0, double k1, const GridSpec& grid,
                          const std::string& receiver, double efficiency,
                          unsigned rounds, std::uint64_t trials, std::uint64_t seed,
                          const std::string& out_path) {
    const MemoryCellPair cells(k0, k1);
    std::vector<std::pair<std::string, ReceiverConfig>> receivers;
    if (receiver == "heterodyne" || receiver == "both")
        receivers.push_back({"heterodyne", {ReceiverKind::Heterodyne, {}}});
    if (receiver == "dolinar" || receiver == "both")
        receivers.push_back(
            {"dolinar",
             {ReceiverKind::Dolinar, DolinarConfig::from_efficiency(efficiency, rounds)}});
    if (receivers.empty())
        throw std::invalid_argument("--receiver must be heterodyne, dolinar or both");

    const auto grid_v = grid_values(grid);
    with_output(out_path, [&](std::ostream& out) {
        out << "n_bar,receiver,p_analytic,p_mc,ci_low,ci_high,errors,trials\n";
        for (std::size_t pi = 0; pi < grid_v.size(); ++pi) {
            const double nb = grid_v[pi];
            for (std::size_t ri = 0; ri < receivers.size(); ++ri) {
                const auto& [rname, rcfg] = receivers[ri];
                const double analytic =
                    rcfg.kind == ReceiverKind::Heterodyne
                        ? heterodyne_bit_error_analytic(cells, nb)
                        : dolinar_bit_error_analytic(cells, nb, rcfg.dolinar);
                const qread::detail::CellReader reader(rcfg, cells, nb);
                Rng rng(seed, static_cast<std::uint32_t>(pi), ri);
                std::uint64_t errors = 0;
                for (std::uint64_t t = 0; t < trials; ++t) {
                    const int bit = rng.next_bit();
                    errors += reader.read(bit, rng) != bit;
                }
                const auto ci = wilson_ci(errors, trials);
                out << fmt17(nb) << ',' << rname << ',' << fmt17(analytic) << ','
                    << fmt17(static_cast<double>(errors) / static_cast<double>(trials))
                    << ',' << fmt17(ci.first) << ',' << fmt17(ci.second) << ','
                    << errors << ',' << trials << "\n";
            }
        }
    });
    return 0;
}

//! Weight-w pattern sweep for one code. Exhaustive when the pattern
//! count fits the budget, sampled otherwise.
struct PatternSweep {
    std::uint64_t corrected = 0;
    std::uint64_t total = 0;
    bool sampled = false;
};

inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t w = idx.size();
    if (w == 0) return false;
    std::size_t i = w;
    while (i-- > 0) {
        if (idx[i] + (w - i) < n) {
            ++idx[i];
            for (std::size_t j = i + 1; j < w; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::uint64_t combinations_capped(std::size_t n, std::size_t w,
                                         std::uint64_t cap) {
    long double c = 1;
    for (std::size_t i = 0; i < w; ++i) {
        c = c * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
        if (c > static_cast<long double>(cap) * 2) return cap + 1;
    }
    return static_cast<std::uint64_t>(c + 0.5L);
}

inline int run_codec_test(const std::string& family, unsigned n, unsigned k,
                          unsigned b, unsigned delta, unsigned r, unsigned m,
                          unsigned max_weight, std::uint64_t patterns,
                          std::uint64_t exhaustive_limit, std::uint64_t seed) {
    KeyValues kv;
    kv["code.family"] = family;
    if (family == "rs") {
        kv["code.n"] = std::to_string(n);
        kv["code.k"] = std::to_string(k);
        kv["code.b"] = std::to_string(b);
    } else if (family == "bch") {
        kv["code.n"] = std::to_string(n);
        kv["code.delta"] = std::to_string(delta);
        kv["code.b"] = std::to_string(b);
    } else {
        kv["code.r"] = std::to_string(r);
        kv["code.m"] = std::to_string(m);
    }
    // Fill the remaining required keys; only the code matters here.
    kv["cells.kappa0"] = "0.1";
    kv["cells.kappa1"] = "0.95";
    kv["receiver.kind"] = "heterodyne";
    kv["grid.start"] = "1";
    kv["grid.stop"] = "2";
    kv["grid.points"] = "2";
    kv["trials"] = "1";
    kv["seed"] = std::to_string(seed);
    const RunConfig rc = resolve_config(kv);
    const auto code = build_code(rc);

    const std::size_t len = code->length();
    const std::size_t t = code->correctable();
    const unsigned wmax = max_weight ? max_weight : static_cast<unsigned>(t);
    std::cout << code->name() << ": n=" << len << " k=" << code->dimension()
              << " t=" << t << " cells=" << code->cell_length() << "\n";

    const auto* rs = dynamic_cast<const ReedSolomonCode*>(code.get());
    bool all_ok = true;
    Rng rng(seed, 0, 0);

    for (unsigned w = 0; w <= wmax; ++w) {
        PatternSweep sweep;
        const std::uint64_t exact = combinations_capped(len, w, exhaustive_limit);
        const bool exhaustive = patterns == 0 && exact <= exhaustive_limit;

        const auto run_one = [&](const std::vector<std::size_t>& positions) {
            bool ok;
            if (rs) {
                std::vector<Field::value_type> info(rs->dimension());
                for (auto& v : info)
                    v = static_cast<Field::value_type>(rng.next_u32() % rs->field().q());
                auto word = rs->encode(info);
                for (std::size_t p : positions) {
                    Field::value_type e = 0;
                    while (e == 0)
                        e = static_cast<Field::value_type>(rng.next_u32() %
                                                           rs->field().q());
                    word[p] = static_cast<Field::value_type>(word[p] ^ e);
                }
                const auto decoded = rs->decode(word);
                ok = decoded.has_value() && *decoded == info;
            } else {
                Bits info(code->info_bits()), word, decoded;
                for (auto& bit : info) bit = static_cast<std::uint8_t>(rng.next_bit());
                code->encode_bits(info, word);
                for (std::size_t p : positions) word[p] ^= 1;
                ok = code->decode_bits(word, decoded) && decoded == info;
            }
            sweep.corrected += ok;
            ++sweep.total;
        };

        if (exhaustive) {
            std::vector<std::size_t> idx(w);
            for (std::size_t i = 0; i < w; ++i) idx[i] = i;
            do {
                run_one(idx);
            } while (next_combination(idx, len));
        } else {
            sweep.sampled = true;
            const std::uint64_t count = patterns ? patterns : 1000;
            std::vector<std::size_t> pool(len);
            for (std::uint64_t c = 0; c < count; ++c) {
                for (std::size_t i = 0; i < len; ++i) pool[i] = i;
                for (unsigned i = 0; i < w; ++i) {
                    const std::size_t j =
                        i + rng.next_u32() % static_cast<std::uint32_t>(len - i);
                    std::swap(pool[i], pool[j]);
                }
                run_one({pool.begin(), pool.begin() + w});
            }
        }
        std::cout << sweep.corrected << "/" << sweep.total
                  << (sweep.sampled ? " random" : "") << " weight-" << w
                  << " patterns corrected\n";
        all_ok = all_ok && sweep.corrected == sweep.total;
    }
    std::cout << (all_ok ? "capability verified" : "capability FAILED") << "\n";
    return all_ok ? 0 : 1;
}

inline int run_curve_cmd(const RunOptions& opts, const std::string& out_path,
                         std::string manifest_path) {
    const RunConfig rc = resolve_config(opts.merged());
    ExperimentConfig cfg = build_experiment(rc);
    cfg.workers = opts.workers;
    const auto curve = run_curve(cfg);
    with_output(out_path, [&](std::ostream& out) { emit_curve_csv(out, curve); });
    if (manifest_path.empty() && !out_path.empty())
        manifest_path = out_path + ".manifest";
    if (!manifest_path.empty())
        with_output(manifest_path, [&](std::ostream& out) { write_manifest(out, rc); });
    return 0;
}

inline int run_threshold_cmd(const RunOptions& opts, const std::string& json_path,
                             const std::string& curve_path,
                             const std::string& pc_mode, double max_bracket) {
    const RunConfig rc = resolve_config(opts.merged());
    ExperimentConfig cfg = build_experiment(rc);
    cfg.workers = opts.workers;
    const auto curve = run_curve(cfg);
    if (!curve_path.empty())
        with_output(curve_path, [&](std::ostream& out) { emit_curve_csv(out, curve); });
    ThresholdOptions topt;
    topt.pc_exponent = pc_exponent_from(pc_mode);
    topt.max_bracket_width = max_bracket;
    const auto report =
        threshold_find(curve, cfg.cells, baseline_kind(rc.baseline), topt);
    const auto j = threshold_json(report, rc, cfg.code->name(), cfg.code->rate());
    with_output(json_path, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
    return 0;
}

}  // namespace detail

//! Entry point for the `qread` tool; returns the process exit code
//! (0 success, 1 validation error, 2 I/O error).
inline int run(int argc, const char* const* argv) {
    CLI::App app{"Coded quantum reading simulator: classical block codes written "
                 "onto binary lossy-channel memory cells and read back with "
                 "heterodyne or Dolinar receivers."};
    app.require_subcommand(1);

    // baseline
    auto* base = app.add_subcommand(
        "baseline", "Emit the optimal uncoded error-probability bounds as CSV");
    double b_k0 = 0.1, b_k1 = 0.95;
    std::string b_grid, b_pc = "squared", b_out;
    base->add_option("--kappa0", b_k0, "transmissivity of channel 0")->required();
    base->add_option("--kappa1", b_k1, "transmissivity of channel 1")->required();
    base->add_option("--grid", b_grid, "photon grid start:stop:points")->required();
    base->add_option("--pc-exponent", b_pc, "squared (default) or paper")
        ->check(CLI::IsMember({"squared", "paper"}));
    base->add_option("--out", b_out, "output CSV path (default stdout)");

    // cell-error
    auto* cell = app.add_subcommand(
        "cell-error", "Per-cell error vs photon number, analytic and Monte Carlo");
    double c_k0 = 0.1, c_k1 = 0.95, c_eff = 0.9;
    unsigned c_rounds = 2;
    std::uint64_t c_trials = 100000, c_seed = 1;
    std::string c_grid, c_receiver = "both", c_out;
    cell->add_option("--kappa0", c_k0, "transmissivity of channel 0")->required();
    cell->add_option("--kappa1", c_k1, "transmissivity of channel 1")->required();
    cell->add_option("--grid", c_grid, "photon grid start:stop:points")->required();
    cell->add_option("--receiver", c_receiver, "heterodyne, dolinar or both")
        ->check(CLI::IsMember({"heterodyne", "dolinar", "both"}));
    cell->add_option("--efficiency", c_eff, "Dolinar photodetector efficiency");
    cell->add_option("--rounds", c_rounds, "Dolinar feedback rounds");
    cell->add_option("--trials", c_trials, "Monte Carlo trials per point");
    cell->add_option("--seed", c_seed, "master seed");
    cell->add_option("--out", c_out, "output CSV path (default stdout)");

    // codec-test
    auto* codec = app.add_subcommand(
        "codec-test", "Encode -> corrupt -> decode capability sweep for one code");
    std::string t_family;
    unsigned t_n = 15, t_k = 9, t_b = 1, t_delta = 7, t_r = 1, t_m = 3, t_maxw = 0;
    std::uint64_t t_patterns = 0, t_limit = 200000, t_seed = 1;
    codec->add_option("--family", t_family, "rs, bch or rm")
        ->required()
        ->check(CLI::IsMember({"rs", "bch", "rm"}));
    codec->add_option("--n", t_n, "block length (rs, bch; default 15)");
    codec->add_option("--k", t_k, "dimension (rs; default 9)");
    codec->add_option("--b", t_b, "first generator root exponent (default 1)");
    codec->add_option("--delta", t_delta, "design distance (bch; default 7)");
    codec->add_option("--r", t_r, "order (rm; default 1)");
    codec->add_option("--m", t_m, "variables (rm; default 3)");
    codec->add_option("--max-weight", t_maxw,
                      "sweep error weights 0..W (default: correction capability)");
    codec->add_option("--patterns", t_patterns,
                      "random patterns per weight (0 = exhaustive when feasible)");
    codec->add_option("--exhaustive-limit", t_limit,
                      "largest pattern count enumerated exhaustively");
    codec->add_option("--seed", t_seed, "master seed");

    // curve
    auto* curve = app.add_subcommand(
        "curve", "Monte Carlo error-probability curve over a photon grid");
    detail::RunOptions curve_opts;
    curve_opts.attach(curve);
    std::string curve_out, curve_manifest;
    curve->add_option("--out", curve_out, "output CSV path (default stdout)");
    curve->add_option("--manifest-out", curve_manifest,
                      "manifest path (default <out>.manifest)");

    // threshold
    auto* thr = app.add_subcommand(
        "threshold", "Curve plus baseline-crossing threshold report (JSON)");
    detail::RunOptions thr_opts;
    thr_opts.attach(thr);
    std::string thr_json, thr_curve, thr_pc = "squared";
    double thr_bracket = 0.5;
    thr->add_option("--json", thr_json, "output JSON path (default stdout)");
    thr->add_option("--curve-out", thr_curve, "also write the curve CSV here");
    thr->add_option("--pc-exponent", thr_pc, "squared (default) or paper")
        ->check(CLI::IsMember({"squared", "paper"}));
    thr->add_option("--max-bracket", thr_bracket,
                    "bracket width that flags low resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (base->parsed())
            return detail::run_baseline(b_k0, b_k1, detail::parse_grid(b_grid), b_pc,
                                        b_out);
        if (cell->parsed())
            return detail::run_cell_error(c_k0, c_k1, detail::parse_grid(c_grid),
                                          c_receiver, c_eff, c_rounds, c_trials,
                                          c_seed, c_out);
        if (codec->parsed())
            return detail::run_codec_test(t_family, t_n, t_k, t_b, t_delta, t_r, t_m,
                                          t_maxw, t_patterns, t_limit, t_seed);
        if (curve->parsed())
            return detail::run_curve_cmd(curve_opts, curve_out, curve_manifest);
        if (thr->parsed())
            return detail::run_threshold_cmd(thr_opts, thr_json, thr_curve, thr_pc,
                                             thr_bracket);
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    }
}

//! Convenience wrapper used by tests.
inline int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("qread");
    for (const auto& a : args) full.push_back(a);
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& s : full) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qread::cli
