#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qread/rng.hpp"

namespace qread {

//! Gaussian upper tail Q(x) = P(N(0,1) > x).
inline double gaussian_tail(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

//! Single-mode coherent state |alpha>; mean photon number |alpha|^2.
struct CoherentState {
    std::complex<double> amplitude{0.0, 0.0};

    CoherentState() = default;
    explicit CoherentState(std::complex<double> a) : amplitude(a) {}
    explicit CoherentState(double a) : amplitude(a, 0.0) {}

    double mean_photons() const noexcept { return std::norm(amplitude); }
};

//! Binary ensemble of pure-lossy channels with transmissivities
//! kappa0/kappa1 and priors p0/p1 (p1 is fixed to 1 - p0, so the priors
//! always sum to one).
struct MemoryCellPair {
    double kappa0;
    double kappa1;
    double p0;
    double p1;

    MemoryCellPair(double k0, double k1, double prior0 = 0.5)
        : kappa0(k0), kappa1(k1), p0(prior0), p1(1.0 - prior0) {
        if (!(k0 >= 0.0 && k0 <= 1.0))
            throw std::invalid_argument("kappa0 = " + std::to_string(k0) +
                                        " outside [0,1]");
        if (!(k1 >= 0.0 && k1 <= 1.0))
            throw std::invalid_argument("kappa1 = " + std::to_string(k1) +
                                        " outside [0,1]");
        if (!(prior0 >= 0.0 && prior0 <= 1.0))
            throw std::invalid_argument("prior p0 = " + std::to_string(prior0) +
                                        " outside [0,1]");
    }

    double kappa(int bit) const noexcept { return bit ? kappa1 : kappa0; }
};

//! Heterodyne outcome beta, a point of the complex plane.
struct HeterodyneSample {
    std::complex<double> beta{0.0, 0.0};
};

enum class InitialGuess { MostLikelyPrior, FixedZero, Random };

//! Adaptive-receiver settings: l feedback rounds and the detector
//! parameter eta (detection efficiency is 1 - eta).
struct DolinarConfig {
    unsigned rounds = 2;
    double eta_det = 0.1;
    InitialGuess initial_guess = InitialGuess::MostLikelyPrior;

    DolinarConfig() = default;
    DolinarConfig(unsigned l, double eta,
                  InitialGuess guess = InitialGuess::MostLikelyPrior)
        : rounds(l), eta_det(eta), initial_guess(guess) {
        if (rounds < 1) throw std::invalid_argument("Dolinar rounds must be >= 1");
        if (!(eta >= 0.0 && eta <= 1.0))
            throw std::invalid_argument("detector eta = " + std::to_string(eta) +
                                        " outside [0,1]");
    }

    static DolinarConfig from_efficiency(double efficiency, unsigned l = 2,
                                         InitialGuess guess = InitialGuess::MostLikelyPrior) {
        if (!(efficiency >= 0.0 && efficiency <= 1.0))
            throw std::invalid_argument("detector efficiency = " +
                                        std::to_string(efficiency) +
                                        " outside [0,1]");
        return DolinarConfig(l, 1.0 - efficiency, guess);
    }

    double efficiency() const noexcept { return 1.0 - eta_det; }
};

//! Fock-basis coefficients <n|alpha> for n = 0..n_max.
inline std::vector<std::complex<double>> fock_amplitudes(const CoherentState& state,
                                                         unsigned n_max) {
    std::vector<std::complex<double>> c(n_max + 1);
    c[0] = std::exp(-0.5 * state.mean_photons());
    for (unsigned n = 1; n <= n_max; ++n)
        c[n] = c[n - 1] * state.amplitude / std::sqrt(static_cast<double>(n));
    return c;
}

//! Wigner function of a coherent state at the phase-space point (x, p):
//! a positive Gaussian peaking at 2/pi on r_bar = sqrt(2) (Re a, Im a)
//! and integrating to one over the (x, p) plane.
inline double wigner(const CoherentState& state, double x, double p) {
    const double rx = std::sqrt(2.0) * state.amplitude.real();
    const double rp = std::sqrt(2.0) * state.amplitude.imag();
    const double dx = x - rx;
    const double dp = p - rp;
    return (2.0 / 3.141592653589793238462643) * std::exp(-2.0 * (dx * dx + dp * dp));
}

//! Pure-loss channel output: coherent states stay coherent with the
//! amplitude scaled by sqrt(kappa).
inline CoherentState lossy_output(const CoherentState& state, double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw std::invalid_argument("transmissivity kappa = " + std::to_string(kappa) +
                                    " outside [0,1]");
    return CoherentState(std::sqrt(kappa) * state.amplitude);
}

//! Draw a heterodyne outcome around the (already lossy) state amplitude:
//! density (1/pi) exp(-|beta - mu|^2), i.e. quadrature variance 1/2.
inline HeterodyneSample heterodyne_sample(const CoherentState& mean, Rng& rng) {
    const auto z = rng.next_gaussian_pair();
    const double root_half = std::sqrt(0.5);
    return {mean.amplitude +
            std::complex<double>(z[0] * root_half, z[1] * root_half)};
}

struct MleDecision {
    int bit;
    //! Set when the two hypotheses coincide (kappa0 == kappa1 or a dark
    //! probe); the decision then falls back to the higher-prior bit.
    bool degenerate;
};

//! Likelihood-ratio decision between the two Gaussians centred at
//! sqrt(kappa_x) * alpha. Ties (ratio exactly at the prior threshold)
//! decide 1.
inline MleDecision mle_decide(const HeterodyneSample& sample,
                              const MemoryCellPair& cells,
                              const CoherentState& probe) {
    const std::complex<double> mu0 = std::sqrt(cells.kappa0) * probe.amplitude;
    const std::complex<double> mu1 = std::sqrt(cells.kappa1) * probe.amplitude;
    const double llr = std::norm(sample.beta - mu0) - std::norm(sample.beta - mu1);
    const double log_eta = std::log(cells.p0) - std::log(cells.p1);
    return {llr >= log_eta ? 1 : 0, mu0 == mu1};
}

//! Closed-form error probability of the heterodyne + likelihood-ratio
//! receiver; reduces to Q(Delta/sqrt(2)) with
//! Delta = |sqrt(kappa1) - sqrt(kappa0)| sqrt(n_bar) at equal priors.
inline double heterodyne_bit_error_analytic(const MemoryCellPair& cells,
                                            double n_bar) {
    if (n_bar < 0) throw std::invalid_argument("mean photon number must be >= 0");
    const double dist = std::abs(std::sqrt(cells.kappa1) - std::sqrt(cells.kappa0)) *
                        std::sqrt(n_bar);
    if (dist == 0.0) return std::min(cells.p0, cells.p1);
    const double log_eta = std::log(cells.p0) - std::log(cells.p1);
    const double boundary = 0.5 * dist + log_eta / (2.0 * dist);
    const double root_two = std::sqrt(2.0);
    return cells.p0 * gaussian_tail(root_two * boundary) +
           cells.p1 * gaussian_tail(root_two * (dist - boundary));
}

//! Click probability of the detector Q1 = sum_{n>=1} (1-eta)^n |n><n|
//! on a coherent state of the given displaced amplitude:
//! exp(-eta |d|^2) - exp(-|d|^2).
inline double click_probability(std::complex<double> displaced_amplitude,
                                double eta_det) {
    if (!(eta_det >= 0.0 && eta_det <= 1.0))
        throw std::invalid_argument("detector eta = " + std::to_string(eta_det) +
                                    " outside [0,1]");
    const double u = std::norm(displaced_amplitude);
    return std::exp(-eta_det * u) - std::exp(-u);
}

namespace detail {

//! Per-configuration Dolinar tables: residual click probabilities for
//! every (true bit, current guess) pair and the initial-guess rule.
struct DolinarPlan {
    unsigned rounds;
    double p_click[2][2];
    int initial_guess;  // -1 means draw a fair bit

    int draw_initial(Rng& rng) const {
        return initial_guess >= 0 ? initial_guess : rng.next_bit();
    }
};

inline DolinarPlan make_dolinar_plan(const CoherentState& probe,
                                     const MemoryCellPair& cells,
                                     const DolinarConfig& cfg) {
    DolinarPlan plan{};
    plan.rounds = cfg.rounds;
    const double slice = 1.0 / std::sqrt(static_cast<double>(cfg.rounds));
    for (int x = 0; x < 2; ++x) {
        for (int g = 0; g < 2; ++g) {
            const std::complex<double> residual =
                (std::sqrt(cells.kappa(x)) - std::sqrt(cells.kappa(g))) *
                probe.amplitude * slice;
            plan.p_click[x][g] = click_probability(residual, cfg.eta_det);
        }
    }
    switch (cfg.initial_guess) {
        case InitialGuess::FixedZero: plan.initial_guess = 0; break;
        case InitialGuess::Random: plan.initial_guess = -1; break;
        case InitialGuess::MostLikelyPrior:
        default: plan.initial_guess = cells.p0 >= cells.p1 ? 0 : 1; break;
    }
    return plan;
}

inline int dolinar_read_with(const DolinarPlan& plan, int true_bit, Rng& rng) {
    int guess = plan.draw_initial(rng);
    for (unsigned round = 0; round < plan.rounds; ++round) {
        const double p = plan.p_click[true_bit][guess];
        if (rng.next_unit() <= p) guess ^= 1;  // click flips the guess
    }
    return guess;
}

}  // namespace detail

//! Simulate one Dolinar read of a cell holding `true_bit`: per round
//! the receiver nulls its current hypothesis' slice amplitude, a click
//! on the residual flips the guess, and the surviving guess is
//! declared.
inline int dolinar_read(int true_bit, const CoherentState& probe,
                        const MemoryCellPair& cells, const DolinarConfig& cfg,
                        Rng& rng) {
    const auto plan = detail::make_dolinar_plan(probe, cells, cfg);
    return detail::dolinar_read_with(plan, true_bit, rng);
}

//! Exact error probability of the simulated Dolinar chain (probe
//! amplitude sqrt(n_bar)), obtained by propagating the guess
//! distribution through the l rounds for each stored bit.
inline double dolinar_bit_error_analytic(const MemoryCellPair& cells, double n_bar,
                                         const DolinarConfig& cfg) {
    if (n_bar < 0) throw std::invalid_argument("mean photon number must be >= 0");
    const auto plan = detail::make_dolinar_plan(
        CoherentState(std::sqrt(n_bar)), cells, cfg);
    double error = 0.0;
    const double priors[2] = {cells.p0, cells.p1};
    for (int x = 0; x < 2; ++x) {
        double w[2] = {0.0, 0.0};
        if (plan.initial_guess >= 0)
            w[plan.initial_guess] = 1.0;
        else
            w[0] = w[1] = 0.5;
        for (unsigned round = 0; round < plan.rounds; ++round) {
            double next[2] = {0.0, 0.0};
            for (int g = 0; g < 2; ++g) {
                const double p = plan.p_click[x][g];
                next[g] += w[g] * (1.0 - p);
                next[g ^ 1] += w[g] * p;
            }
            w[0] = next[0];
            w[1] = next[1];
        }
        error += priors[x] * w[x ^ 1];
    }
    return error;
}

}  // namespace qread
