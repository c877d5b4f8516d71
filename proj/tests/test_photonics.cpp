#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qread/photonics.hpp"
#include "qread/rng.hpp"

using namespace qread;
using Catch::Approx;

namespace {

//! Independent truncated-series oracle for the click operator.
double click_series(double abs2, double eta, int terms = 200) {
    double sum = 0;
    double log_term = -abs2;  // log of e^-u u^n / n! at n = 0
    for (int n = 1; n <= terms; ++n) {
        log_term += std::log(abs2) - std::log(static_cast<double>(n));
        sum += std::pow(1.0 - eta, n) * std::exp(log_term);
    }
    return sum;
}

//! Independent 2^l path enumeration of the Dolinar round chain.
double dolinar_error_paths(const MemoryCellPair& cells, double n_bar,
                           const DolinarConfig& cfg) {
    const double amp = std::sqrt(n_bar);
    const double slice = 1.0 / std::sqrt(static_cast<double>(cfg.rounds));
    const auto pclick = [&](int x, int g) {
        const double d = (std::sqrt(cells.kappa(x)) - std::sqrt(cells.kappa(g))) *
                         amp * slice;
        return click_probability({d, 0.0}, cfg.eta_det);
    };
    std::vector<std::pair<int, double>> initials;
    switch (cfg.initial_guess) {
        case InitialGuess::FixedZero: initials = {{0, 1.0}}; break;
        case InitialGuess::Random: initials = {{0, 0.5}, {1, 0.5}}; break;
        case InitialGuess::MostLikelyPrior:
            initials = {{cells.p0 >= cells.p1 ? 0 : 1, 1.0}};
            break;
    }
    double error = 0;
    const double priors[2] = {cells.p0, cells.p1};
    for (int x = 0; x < 2; ++x) {
        for (const auto& [g0, w0] : initials) {
            for (unsigned mask = 0; mask < (1u << cfg.rounds); ++mask) {
                int guess = g0;
                double prob = w0;
                for (unsigned round = 0; round < cfg.rounds; ++round) {
                    const double p = pclick(x, guess);
                    if ((mask >> round) & 1) {
                        prob *= p;
                        guess ^= 1;
                    } else {
                        prob *= 1.0 - p;
                    }
                }
                if (guess != x) error += priors[x] * prob;
            }
        }
    }
    return error;
}

}  // namespace

TEST_CASE("Fock expansion of coherent states", "[photonics]") {
    const auto vac = fock_amplitudes(CoherentState(0.0), 10);
    CHECK(std::abs(vac[0] - 1.0) < 1e-15);
    for (std::size_t n = 1; n < vac.size(); ++n) CHECK(std::abs(vac[n]) == 0.0);

    const CoherentState one(1.0);
    const auto c = fock_amplitudes(one, 20);
    double norm = 0;
    for (const auto& v : c) norm += std::norm(v);
    CHECK(norm == Approx(1.0).margin(1e-12));

    // |c_n|^2 is the Poisson mass at n with mean |alpha|^2.
    const CoherentState a(std::complex<double>(0.7, -1.1));
    const double lambda = a.mean_photons();
    const auto ca = fock_amplitudes(a, 30);
    for (int n = 0; n <= 30; ++n) {
        const double poisson =
            std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0));
        CHECK(std::norm(ca[n]) == Approx(poisson).margin(1e-14));
    }

    // Truncation defect is bounded by the Poisson tail mass.
    double head = 0;
    for (int n = 0; n <= 8; ++n) head += std::norm(fock_amplitudes(a, 8)[n]);
    double tail = 0;
    for (int n = 9; n <= 300; ++n)
        tail += std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0));
    CHECK(1.0 - head <= tail + 1e-12);
}

TEST_CASE("Wigner function peaks and normalizes", "[photonics]") {
    CHECK(wigner(CoherentState(0.0), 0, 0) == Approx(2.0 / M_PI));
    CHECK(wigner(CoherentState(1.0), std::sqrt(2.0), 0) == Approx(2.0 / M_PI));

    const CoherentState one(1.0);
    const double h = 0.05;
    double integral = 0;
    for (double x = -8.0; x <= 8.0; x += h)
        for (double p = -8.0; p <= 8.0; p += h) integral += wigner(one, x, p);
    integral *= h * h;
    CHECK(integral == Approx(1.0).margin(1e-6));

    // Coherent-state Wigner functions are everywhere positive.
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.next_unit() - 0.5) * 16;
        const double p = (rng.next_unit() - 0.5) * 16;
        REQUIRE(wigner(one, x, p) > 0.0);
    }
}

TEST_CASE("pure loss scales the amplitude by sqrt(kappa)", "[photonics]") {
    const CoherentState two(2.0);
    CHECK(lossy_output(two, 1.0).amplitude == two.amplitude);
    CHECK(std::abs(lossy_output(two, 0.0).amplitude) == 0.0);
    const auto kept = lossy_output(two, 0.25);
    CHECK(kept.amplitude.real() == Approx(1.0));
    CHECK(kept.mean_photons() == Approx(1.0));
    CHECK_THROWS_AS(lossy_output(two, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(lossy_output(two, -0.1), std::invalid_argument);
}

TEST_CASE("heterodyne sampler has the coherent-state statistics", "[photonics]") {
    Rng rng(99);
    const int n = 1000000;

    std::complex<double> mean{0, 0};
    double var_re = 0, var_im = 0;
    for (int i = 0; i < n; ++i) {
        const auto s = heterodyne_sample(CoherentState(0.0), rng);
        mean += s.beta;
        var_re += s.beta.real() * s.beta.real();
        var_im += s.beta.imag() * s.beta.imag();
    }
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 0.005);
    CHECK(var_re / n == Approx(0.5).margin(0.01));
    CHECK(var_im / n == Approx(0.5).margin(0.01));

    // Empirical density of Re(beta) at the mean of |3>: 1/sqrt(pi).
    const CoherentState three(3.0);
    const double w = 0.05;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const auto s = heterodyne_sample(three, rng);
        if (std::abs(s.beta.real() - 3.0) <= w / 2) ++hits;
    }
    const double density = hits / (n * w);
    CHECK(density == Approx(1.0 / std::sqrt(M_PI)).epsilon(0.02));
}

TEST_CASE("likelihood-ratio decision geometry", "[photonics]") {
    const MemoryCellPair cells(0.1, 0.95);
    const CoherentState probe(2.0);
    const std::complex<double> mu0 = std::sqrt(0.1) * probe.amplitude;
    const std::complex<double> mu1 = std::sqrt(0.95) * probe.amplitude;

    CHECK(mle_decide({mu0}, cells, probe).bit == 0);
    CHECK(mle_decide({mu1}, cells, probe).bit == 1);
    CHECK_FALSE(mle_decide({mu0}, cells, probe).degenerate);

    // Equal priors put the boundary at the midpoint; ">=" decides 1 there.
    // kappa values chosen so the means and midpoint are exact in binary.
    const MemoryCellPair exact(0.0625, 0.5625);  // means 0.25 and 0.75
    const CoherentState unit_probe(1.0);
    CHECK(mle_decide({{0.5, 0.0}}, exact, unit_probe).bit == 1);
    CHECK(mle_decide({{0.5, 0.3}}, exact, unit_probe).bit == 1);  // on the bisector
    CHECK(mle_decide({{0.49999, 0.0}}, exact, unit_probe).bit == 0);

    // Priors (0.9, 0.1) shift the boundary toward mu1 by ln(9)/(2 D).
    const MemoryCellPair skew(0.1, 0.95, 0.9);
    const double D = std::abs(mu1 - mu0);
    const double shift = std::log(9.0) / (2.0 * D);
    const std::complex<double> unit = (mu1 - mu0) / D;
    const auto at = [&](double t) {
        return HeterodyneSample{mu0 + (D / 2 + t) * unit};
    };
    CHECK(mle_decide(at(shift + 1e-9), skew, probe).bit == 1);
    CHECK(mle_decide(at(shift - 1e-9), skew, probe).bit == 0);
    CHECK(mle_decide(at(1e-9), skew, probe).bit == 0);  // old midpoint now says 0

    // Degenerate hypotheses: flagged, and the higher-prior bit is declared.
    const MemoryCellPair same(0.5, 0.5, 0.7);
    const auto d = mle_decide({{0.3, 0.1}}, same, probe);
    CHECK(d.degenerate);
    CHECK(d.bit == 0);
    const auto dark = mle_decide({{0.0, 0.0}}, cells, CoherentState(0.0));
    CHECK(dark.degenerate);
    CHECK(dark.bit == 1);  // equal priors tie decides 1 per ">="

    // Reflecting the outcome across the bisector flips the decision.
    Rng rng(3);
    const double mid = (mu0 + mu1).real() / 2.0;
    for (int i = 0; i < 2000; ++i) {
        const std::complex<double> beta{(rng.next_unit() - 0.5) * 6,
                                        (rng.next_unit() - 0.5) * 6};
        const std::complex<double> reflected{2 * mid - beta.real(), beta.imag()};
        if (std::abs(beta.real() - mid) < 1e-9) continue;
        const int b1 = mle_decide({beta}, cells, probe).bit;
        const int b2 = mle_decide({reflected}, cells, probe).bit;
        REQUIRE(b1 != b2);
    }
}

TEST_CASE("heterodyne error: closed form against quadrature", "[photonics]") {
    const MemoryCellPair cells(0.1, 0.95);
    CHECK(heterodyne_bit_error_analytic(cells, 0.0) == 0.5);
    CHECK(heterodyne_bit_error_analytic(MemoryCellPair(0.4, 0.4), 7.0) == 0.5);
    CHECK(heterodyne_bit_error_analytic(cells, 4.0) ==
          Approx(0.17587731392873).margin(1e-10));

    // Independent oracle: quadrature of min(p0 f0, p1 f1) over the
    // outcome plane equals the Bayes error of the decision rule (the
    // imaginary quadrature integrates out exactly).
    const auto quadrature = [](const MemoryCellPair& mc, double n_bar) {
        const double mu0 = std::sqrt(mc.kappa0 * n_bar);
        const double mu1 = std::sqrt(mc.kappa1 * n_bar);
        const double h = 0.001;
        double err = 0;
        for (double x = mu0 - 8; x <= mu1 + 8; x += h) {
            const double f0 = std::exp(-(x - mu0) * (x - mu0));
            const double f1 = std::exp(-(x - mu1) * (x - mu1));
            err += std::min(mc.p0 * f0, mc.p1 * f1);
        }
        return err * h / std::sqrt(M_PI);
    };
    for (const double n_bar : {1.0, 2.0, 4.0}) {
        CHECK(heterodyne_bit_error_analytic(cells, n_bar) ==
              Approx(quadrature(cells, n_bar)).margin(1e-6));
    }
    // Unequal priors shift the boundary but stay a Bayes rule.
    const MemoryCellPair skewed(0.1, 0.95, 0.8);
    for (const double n_bar : {0.5, 2.0, 6.0}) {
        CHECK(heterodyne_bit_error_analytic(skewed, n_bar) ==
              Approx(quadrature(skewed, n_bar)).margin(1e-6));
    }
}

TEST_CASE("click probability: closed form equals the operator series",
          "[photonics]") {
    CHECK(click_probability({0.0, 0.0}, 0.1) == 0.0);
    for (double u : {0.1, 0.5, 0.8671171994062047, 2.0, 5.0}) {
        const std::complex<double> d{std::sqrt(u), 0.0};
        CHECK(click_probability(d, 0.0) == Approx(1.0 - std::exp(-u)).margin(1e-12));
        for (double eta : {0.05, 0.1, 0.3}) {
            CHECK(click_probability(d, eta) ==
                  Approx(click_series(u, eta)).margin(1e-10));
        }
    }
    CHECK(click_probability({std::sqrt(0.8671171994062047), 0.0}, 0.1) ==
          Approx(0.4967803479014936).margin(1e-12));
    CHECK_THROWS_AS(click_probability({1.0, 0.0}, 1.5), std::invalid_argument);

    // Monotone up to the turnover point u* = ln(1/eta)/(1-eta).
    const double eta = 0.1;
    const double ustar = std::log(1.0 / eta) / (1.0 - eta);
    double prev = -1;
    for (double u = 0; u <= ustar; u += ustar / 200) {
        const double p = click_probability({std::sqrt(u), 0.0}, eta);
        REQUIRE(p >= prev);
        prev = p;
    }
    // ... and decreasing past it (the printed operator is not monotone).
    CHECK(click_probability({std::sqrt(ustar + 5), 0.0}, eta) <
          click_probability({std::sqrt(ustar), 0.0}, eta));
}

TEST_CASE("Dolinar read: degenerate regimes", "[photonics]") {
    const MemoryCellPair cells(0.1, 0.95);
    Rng rng(1);

    // A correct initial guess is never abandoned (zero residual, no dark
    // counts).
    const DolinarConfig fixed_zero(2, 0.1, InitialGuess::FixedZero);
    for (const double n_bar : {0.5, 2.0, 10.0}) {
        for (int i = 0; i < 2000; ++i)
            REQUIRE(dolinar_read(0, CoherentState(std::sqrt(n_bar)), cells,
                                 fixed_zero, rng) == 0);
    }

    // Zero probe energy: the initial guess is declared no matter the bit.
    for (int i = 0; i < 500; ++i) {
        REQUIRE(dolinar_read(1, CoherentState(0.0), cells, fixed_zero, rng) == 0);
        REQUIRE(dolinar_read(0, CoherentState(0.0), cells, fixed_zero, rng) == 0);
    }
    CHECK(dolinar_bit_error_analytic(cells, 0.0, fixed_zero) == Approx(0.5));
}

TEST_CASE("Dolinar analytic error equals path enumeration and Monte Carlo",
          "[photonics]") {
    const MemoryCellPair cells(0.1, 0.95);
    const DolinarConfig l2(2, 0.1);
    CHECK(dolinar_bit_error_analytic(cells, 4.0, l2) ==
          Approx(0.1266150091).margin(1e-9));

    // Path-enumeration oracle across rounds, efficiencies and policies.
    for (unsigned l : {1u, 2u, 3u, 5u}) {
        for (double eta : {0.0, 0.1, 0.35}) {
            for (auto guess : {InitialGuess::FixedZero, InitialGuess::Random,
                               InitialGuess::MostLikelyPrior}) {
                const DolinarConfig cfg(l, eta, guess);
                for (double n_bar : {0.3, 1.7, 6.0}) {
                    const double dp = dolinar_bit_error_analytic(cells, n_bar, cfg);
                    const double paths = dolinar_error_paths(cells, n_bar, cfg);
                    REQUIRE(dp == Approx(paths).margin(1e-12));
                }
            }
        }
    }

    // Unequal priors with the most-likely initial guess.
    const MemoryCellPair skew(0.1, 0.95, 0.8);
    const DolinarConfig ml(2, 0.1, InitialGuess::MostLikelyPrior);
    CHECK(dolinar_bit_error_analytic(skew, 2.5, ml) ==
          Approx(dolinar_error_paths(skew, 2.5, ml)).margin(1e-12));

    // Wrong initial guess fails with probability (1-p)^l.
    Rng rng(12);
    const double n_bar = 4.0;
    const double p =
        click_probability({(std::sqrt(0.95) - std::sqrt(0.1)) * 2.0 / std::sqrt(2.0),
                           0.0},
                          0.1);
    const double expect = (1 - p) * (1 - p);
    int wrong = 0;
    const int trials = 200000;
    const DolinarConfig fixed_zero(2, 0.1, InitialGuess::FixedZero);
    for (int i = 0; i < trials; ++i)
        wrong += dolinar_read(1, CoherentState(2.0), cells, fixed_zero, rng) != 1;
    const double se = std::sqrt(expect * (1 - expect) / trials);
    CHECK(std::abs(wrong / double(trials) - expect) < 4 * se);

    // Monte Carlo agreement for the full averaged error at n_bar = 4.
    int errors = 0;
    for (int i = 0; i < trials; ++i) {
        const int bit = rng.next_bit();
        errors += dolinar_read(bit, CoherentState(2.0), cells, l2, rng) != bit;
    }
    const double analytic = dolinar_bit_error_analytic(cells, 4.0, l2);
    const double se2 = std::sqrt(analytic * (1 - analytic) / trials);
    CHECK(std::abs(errors / double(trials) - analytic) < 4 * se2);
}

TEST_CASE("imperfect detection forces a positive Dolinar error floor",
          "[photonics]") {
    const MemoryCellPair cells(0.1, 0.95);
    const DolinarConfig l2 = DolinarConfig::from_efficiency(0.9, 2);
    CHECK(l2.eta_det == Approx(0.1));
    double floor = 1.0;
    double arg = 0;
    for (double n_bar = 0.05; n_bar <= 100.0; n_bar += 0.05) {
        const double e = dolinar_bit_error_analytic(cells, n_bar, l2);
        if (e < floor) {
            floor = e;
            arg = n_bar;
        }
    }
    CHECK(floor > 0.0);
    CHECK(floor == Approx(0.0459538).margin(1e-4));
    CHECK(arg == Approx(11.802).margin(0.1));
}
