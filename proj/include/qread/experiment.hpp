#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qread/baselines.hpp"
#include "qread/code.hpp"
#include "qread/photonics.hpp"
#include "qread/rng.hpp"

namespace qread {

enum class Metric { InfoBitErrorRate, BlockErrorRate };

inline const char* to_string(Metric m) {
    return m == Metric::InfoBitErrorRate ? "info-bit" : "block";
}

enum class ReceiverKind { Heterodyne, Dolinar };

inline const char* to_string(ReceiverKind k) {
    return k == ReceiverKind::Heterodyne ? "heterodyne" : "dolinar";
}

struct ReceiverConfig {
    ReceiverKind kind = ReceiverKind::Heterodyne;
    DolinarConfig dolinar{};  // consulted only for the Dolinar receiver
};

struct ExperimentConfig {
    std::shared_ptr<const BlockCode> code;
    ReceiverConfig receiver;
    MemoryCellPair cells{0.1, 0.95};
    std::vector<double> n_bar_grid;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    Metric metric = Metric::InfoBitErrorRate;
    unsigned workers = 0;  // 0 picks hardware concurrency

    //! Sensitivity-study axis: interpret grid values as mean photons per
    //! information bit and scale the per-cell probe energy by K/N.
    bool energy_per_info_bit = false;

    //! Optional adaptive stopping: after each batch of `trials`, keep
    //! extending (up to trial_cap) until this many error events landed.
    //! Zero disables extension and every point runs exactly `trials`.
    std::uint64_t min_error_events = 0;
    std::uint64_t trial_cap = 0;
};

inline void validate(const ExperimentConfig& cfg) {
    if (!cfg.code) throw std::invalid_argument("experiment has no code");
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (cfg.n_bar_grid.empty())
        throw std::invalid_argument("photon-number grid is empty");
    for (std::size_t i = 0; i < cfg.n_bar_grid.size(); ++i) {
        if (cfg.n_bar_grid[i] < 0)
            throw std::invalid_argument("photon-number grid entries must be >= 0");
        if (i > 0 && !(cfg.n_bar_grid[i] > cfg.n_bar_grid[i - 1]))
            throw std::invalid_argument("photon-number grid must be strictly ascending");
    }
}

//! One grid point of an error-probability curve. `trials` is the
//! denominator of the estimate (block trials, or block trials times
//! information bits for the per-bit metric), so p_hat = errors / trials
//! holds exactly.
struct CurvePoint {
    double n_bar = 0;
    double p_hat = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
};

//! 95% Wilson score interval.
inline std::pair<double, double> wilson_ci(std::uint64_t errors,
                                           std::uint64_t trials) {
    if (trials < 1) throw std::invalid_argument("wilson_ci needs trials >= 1");
    if (errors > trials)
        throw std::invalid_argument("wilson_ci: errors exceed trials");
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2n = z * z / n;
    const double denom = 1.0 + z2n;
    const double centre = (p + z2n / 2.0) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / denom;
    // The score bounds are exactly 0/1 at the extremes; keep them there
    // instead of leaving rounding dust.
    const double low = errors == 0 ? 0.0 : std::max(0.0, centre - half);
    const double high = errors == trials ? 1.0 : std::min(1.0, centre + half);
    return {low, high};
}

namespace detail {

//! Per-point receiver frontend: reads one cell holding `true_bit`
//! through the configured receiver.
struct CellReader {
    ReceiverKind kind;
    CoherentState probe;
    MemoryCellPair cells;
    DolinarPlan plan{};

    CellReader(const ReceiverConfig& receiver, const MemoryCellPair& cell_pair,
               double n_bar)
        : kind(receiver.kind), probe(std::sqrt(n_bar)), cells(cell_pair) {
        if (kind == ReceiverKind::Dolinar)
            plan = make_dolinar_plan(probe, cells, receiver.dolinar);
    }

    int read(int true_bit, Rng& rng) const {
        if (kind == ReceiverKind::Heterodyne) {
            const CoherentState out = lossy_output(probe, cells.kappa(true_bit));
            return mle_decide(heterodyne_sample(out, rng), cells, probe).bit;
        }
        return dolinar_read_with(plan, true_bit, rng);
    }
};

struct TrialScratch {
    Bits info;
    Bits cells;
    Bits decoded;
};

struct TrialOutcome {
    std::uint64_t info_bit_errors = 0;
    bool block_error = false;
};

//! One full encode -> write -> probe -> decode -> score pass. The
//! random stream is fixed by (seed, point index, trial index) alone.
//! A decode failure scores every information bit as wrong.
inline TrialOutcome simulate_trial(const ExperimentConfig& cfg,
                                   const CellReader& reader,
                                   std::uint32_t point_index,
                                   std::uint64_t trial_index, TrialScratch& s) {
    Rng rng(cfg.seed, point_index, trial_index);
    const BlockCode& code = *cfg.code;
    const std::size_t K = code.info_bits();

    s.info.resize(K);
    for (auto& b : s.info) b = static_cast<std::uint8_t>(rng.next_bit());
    code.encode_bits(s.info, s.cells);
    for (auto& cell : s.cells)
        cell = static_cast<std::uint8_t>(reader.read(cell, rng));
    if (!code.decode_bits(s.cells, s.decoded)) return {K, true};

    std::uint64_t wrong = 0;
    for (std::size_t i = 0; i < K; ++i) wrong += s.info[i] != s.decoded[i];
    return {wrong, wrong > 0};
}

struct Tally {
    std::uint64_t bit_errors = 0;
    std::uint64_t block_errors = 0;
    std::uint64_t trials = 0;

    Tally& operator+=(const Tally& o) {
        bit_errors += o.bit_errors;
        block_errors += o.block_errors;
        trials += o.trials;
        return *this;
    }
};

//! Fan a contiguous trial range across workers. Chunks are fixed by
//! index arithmetic and tallies are summed in worker order, so the
//! result does not depend on scheduling.
inline Tally run_trials(const ExperimentConfig& cfg, const CellReader& reader,
                        std::uint32_t point_index, std::uint64_t first_trial,
                        std::uint64_t count, unsigned workers) {
    const auto work = [&](std::uint64_t lo, std::uint64_t hi, Tally& out) {
        TrialScratch scratch;
        for (std::uint64_t t = lo; t < hi; ++t) {
            const auto r = simulate_trial(cfg, reader, point_index, t, scratch);
            out.bit_errors += r.info_bit_errors;
            out.block_errors += r.block_error ? 1 : 0;
            ++out.trials;
        }
    };

    if (workers <= 1 || count < 2 * workers) {
        Tally t;
        work(first_trial, first_trial + count, t);
        return t;
    }

    std::vector<Tally> tallies(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t lo = first_trial + count * w / workers;
        const std::uint64_t hi = first_trial + count * (w + 1) / workers;
        pool.emplace_back([&, w, lo, hi] {
            try {
                work(lo, hi, tallies[w]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    Tally total;
    for (const auto& t : tallies) total += t;
    return total;
}

}  // namespace detail

//! Public single-trial entry point (the Monte Carlo workers run the
//! exact same path). Deterministic in (seed, point_index, trial_index).
inline double cell_energy(const ExperimentConfig& cfg, double grid_n_bar) {
    if (!cfg.energy_per_info_bit) return grid_n_bar;
    return grid_n_bar * static_cast<double>(cfg.code->info_bits()) /
           static_cast<double>(cfg.code->cell_length());
}

inline detail::TrialOutcome run_trial(const ExperimentConfig& cfg,
                                      std::size_t point_index,
                                      std::uint64_t trial_index) {
    validate(cfg);
    if (point_index >= cfg.n_bar_grid.size())
        throw std::invalid_argument("grid point index out of range");
    const detail::CellReader reader(cfg.receiver, cfg.cells,
                                    cell_energy(cfg, cfg.n_bar_grid[point_index]));
    detail::TrialScratch scratch;
    return detail::simulate_trial(cfg, reader,
                                  static_cast<std::uint32_t>(point_index),
                                  trial_index, scratch);
}

//! Monte Carlo error-probability curve over the configured grid.
//! Output is identical for any worker count.
inline std::vector<CurvePoint> run_curve(const ExperimentConfig& cfg) {
    validate(cfg);
    unsigned workers = cfg.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t K = cfg.code->info_bits();

    std::vector<CurvePoint> curve;
    curve.reserve(cfg.n_bar_grid.size());
    for (std::size_t pi = 0; pi < cfg.n_bar_grid.size(); ++pi) {
        const detail::CellReader reader(cfg.receiver, cfg.cells,
                                        cell_energy(cfg, cfg.n_bar_grid[pi]));
        detail::Tally total;
        const std::uint64_t cap =
            cfg.min_error_events == 0
                ? cfg.trials
                : std::max(cfg.trials, cfg.trial_cap ? cfg.trial_cap : cfg.trials);
        while (true) {
            const std::uint64_t batch = std::min(cfg.trials, cap - total.trials);
            if (batch == 0) break;
            total += detail::run_trials(cfg, reader,
                                        static_cast<std::uint32_t>(pi),
                                        total.trials, batch, workers);
            if (cfg.min_error_events == 0) break;
            const std::uint64_t events = cfg.metric == Metric::InfoBitErrorRate
                                             ? total.bit_errors
                                             : total.block_errors;
            if (events >= cfg.min_error_events) break;
        }

        CurvePoint pt;
        pt.n_bar = cfg.n_bar_grid[pi];
        pt.errors = cfg.metric == Metric::InfoBitErrorRate ? total.bit_errors
                                                           : total.block_errors;
        pt.trials = cfg.metric == Metric::InfoBitErrorRate ? total.trials * K
                                                           : total.trials;
        pt.p_hat = static_cast<double>(pt.errors) / static_cast<double>(pt.trials);
        const auto ci = wilson_ci(pt.errors, pt.trials);
        pt.ci_low = ci.first;
        pt.ci_high = ci.second;
        curve.push_back(pt);
    }
    return curve;
}

struct ThresholdOptions {
    PcExponent pc_exponent = PcExponent::Squared;
    //! Brackets wider than this flag the report as low-resolution.
    double max_bracket_width = 0.5;
};

//! Crossing of a measured coded curve below a closed-form baseline.
struct ThresholdReport {
    BaselineKind baseline = BaselineKind::MinOfBoth;
    std::optional<double> threshold_n_bar;
    std::optional<CurvePoint> bracket_low;
    std::optional<CurvePoint> bracket_high;
    bool left_censored = false;
    bool low_resolution = false;
    std::string note;
};

//! Locate the smallest crossing where the coded curve (piecewise linear
//! in log p over n_bar) drops below the baseline. Zero-error points are
//! clamped to half an event for interpolation.
inline ThresholdReport threshold_find(const std::vector<CurvePoint>& curve,
                                      const MemoryCellPair& cells,
                                      BaselineKind baseline,
                                      ThresholdOptions opts = {}) {
    if (curve.size() < 2)
        throw std::invalid_argument("threshold_find needs at least 2 curve points");
    ThresholdReport report;
    report.baseline = baseline;

    const auto coded_log = [&](const CurvePoint& pt) {
        const double floor_p = 0.5 / static_cast<double>(pt.trials);
        return std::log(std::max(pt.p_hat, floor_p));
    };
    const auto base_log = [&](double n_bar) {
        return std::log(baseline_error(baseline, cells, n_bar, opts.pc_exponent));
    };

    std::size_t first_below = curve.size();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (coded_log(curve[i]) < base_log(curve[i].n_bar)) {
            first_below = i;
            break;
        }
    }

    if (first_below == curve.size()) {
        report.note = "coded curve never drops below the baseline within the grid";
        return report;
    }
    if (first_below == 0) {
        report.threshold_n_bar = curve.front().n_bar;
        report.bracket_high = curve.front();
        report.left_censored = true;
        report.note = "coded curve is already below the baseline at the first "
                      "grid point; threshold is left-censored";
        return report;
    }

    const CurvePoint& lo = curve[first_below - 1];
    const CurvePoint& hi = curve[first_below];
    const double ylo = coded_log(lo);
    const double yhi = coded_log(hi);
    const auto gap = [&](double x) {
        const double t = (x - lo.n_bar) / (hi.n_bar - lo.n_bar);
        return (ylo + t * (yhi - ylo)) - base_log(x);
    };
    double a = lo.n_bar;
    double b = hi.n_bar;
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + b); ++it) {
        const double mid = 0.5 * (a + b);
        if (gap(mid) < 0)
            b = mid;
        else
            a = mid;
    }
    report.threshold_n_bar = 0.5 * (a + b);
    report.bracket_low = lo;
    report.bracket_high = hi;
    report.low_resolution = (hi.n_bar - lo.n_bar) > opts.max_bracket_width;
    report.note = report.low_resolution
                      ? "crossing bracket is wider than the configured resolution"
                      : "crossing interpolated between bracketing grid points";
    return report;
}

}  // namespace qread
