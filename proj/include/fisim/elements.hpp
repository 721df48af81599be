#ifndef FISIM_ELEMENTS_HPP
#define FISIM_ELEMENTS_HPP

#include <variant>

#include "fisim/fock.hpp"

namespace fisim {

/// Nondegenerate photon-pair source. One application contributes the
/// no-emission branch plus, for every term below the truncation order, a
/// branch with one extra photon in each of the two modes, weighted by
/// gain_scale * exp(i*pump_phase).
struct PairSource {
    ModeId signal_mode;
    ModeId idler_mode;
    double pump_phase = 0.0;
    double gain_scale = 1.0; // relative pair amplitude, in [0,1]

    bool operator==(const PairSource&) const = default;
};

/// Multiplies each term by exp(i*n*phase), n being the photon count in
/// `mode`.
struct PhaseShift {
    ModeId mode;
    double phase = 0.0;

    bool operator==(const PhaseShift&) const = default;
};

/// Exchanges the occupations of two modes (a path crossing).
struct Swap {
    ModeId mode_a;
    ModeId mode_b;

    bool operator==(const Swap&) const = default;
};

/// Beam-splitter loss purified by a dedicated environment mode.
/// `transmissivity` is the single-photon survival probability: a term with
/// n photons in `mode` splits into branches keeping k of them, with
/// amplitude factor sqrt(C(n,k) T^k (1-T)^(n-k)) and n-k photons moved to
/// env_mode. Amplitudes into the same environment occupation still
/// interfere; decoherence appears only when detection marginalizes over
/// the environment.
struct Loss {
    ModeId mode;
    double transmissivity = 1.0;
    ModeId env_mode;

    /// Loss whose surviving single-photon *amplitude* is t, i.e. survival
    /// probability t^2. Closed-form visibility laws are written in terms
    /// of this amplitude.
    static Loss from_amplitude(ModeId mode, double t, ModeId env_mode);

    bool operator==(const Loss&) const = default;
};

using Element = std::variant<PairSource, PhaseShift, Swap, Loss>;

QuantumState apply_source(const QuantumState& state, const PairSource& src);
QuantumState apply_phase(const QuantumState& state, const PhaseShift& el);
QuantumState apply_swap(const QuantumState& state, const Swap& el);
QuantumState apply_loss(const QuantumState& state, const Loss& el);

QuantumState apply_element(const QuantumState& state, const Element& el);

} // namespace fisim

#endif
