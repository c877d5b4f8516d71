#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qread/photonics.hpp"

namespace qread {

enum class BaselineKind { OptimalCoherent, OptimalSqueezed, MinOfBoth };

inline const char* to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::OptimalCoherent: return "coherent";
        case BaselineKind::OptimalSqueezed: return "squeezed";
        case BaselineKind::MinOfBoth: return "min";
    }
    return "?";
}

//! Exponent convention for the optimal coherent-probe bound. The
//! squared difference equals the coherent-state fidelity exponent and
//! keeps the bound a probability for either kappa ordering; the
//! unsquared variant reproduces the raw printed formula for audit runs
//! (it goes out of range when kappa0 < kappa1).
enum class PcExponent { Squared, Paper };

//! Optimal error probability with coherent probes and unrestricted
//! measurements: [1 - sqrt(1 - e^(-n (sqrt k0 - sqrt k1)^2))] / 2.
inline double optimal_coherent_error(const MemoryCellPair& cells, double n_bar,
                                     PcExponent mode = PcExponent::Squared) {
    if (n_bar < 0) throw std::invalid_argument("mean photon number must be >= 0");
    const double diff = std::sqrt(cells.kappa0) - std::sqrt(cells.kappa1);
    const double exponent = mode == PcExponent::Squared ? diff * diff : diff;
    return (1.0 - std::sqrt(1.0 - std::exp(-n_bar * exponent))) / 2.0;
}

//! Decay rate of the optimal two-mode-squeezed-probe bound.
inline double squeezed_mu(const MemoryCellPair& cells) {
    return (cells.kappa0 + cells.kappa1 + 2.0) / 2.0 -
           2.0 * std::sqrt(cells.kappa0 * cells.kappa1) -
           std::sqrt((1.0 - cells.kappa0) * (1.0 - cells.kappa1));
}

//! Optimal error probability with the squeezed-probe transmitter:
//! exp(-mu n) / 2.
inline double optimal_squeezed_error(const MemoryCellPair& cells, double n_bar) {
    if (n_bar < 0) throw std::invalid_argument("mean photon number must be >= 0");
    return std::exp(-squeezed_mu(cells) * n_bar) / 2.0;
}

inline double baseline_error(BaselineKind kind, const MemoryCellPair& cells,
                             double n_bar, PcExponent mode = PcExponent::Squared) {
    switch (kind) {
        case BaselineKind::OptimalCoherent:
            return optimal_coherent_error(cells, n_bar, mode);
        case BaselineKind::OptimalSqueezed:
            return optimal_squeezed_error(cells, n_bar);
        case BaselineKind::MinOfBoth:
            return std::min(optimal_coherent_error(cells, n_bar, mode),
                            optimal_squeezed_error(cells, n_bar));
    }
    throw std::invalid_argument("unknown baseline kind");
}

}  // namespace qread
