#include "fisim/elements.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace fisim {

namespace {

double binomial(int n, int k) {
    double result = 1.0;
    for (int i = 1; i <= k; ++i)
        result *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return result;
}

} // namespace

Loss Loss::from_amplitude(ModeId mode, double t, ModeId env_mode) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("amplitude transmissivity outside [0,1]");
    return Loss{std::move(mode), t * t, std::move(env_mode)};
}

QuantumState apply_source(const QuantumState& state, const PairSource& src) {
    if (src.signal_mode == src.idler_mode)
        throw std::invalid_argument("pair source needs distinct signal and idler modes");
    if (!(src.gain_scale >= 0.0 && src.gain_scale <= 1.0))
        throw std::invalid_argument("gain_scale outside [0,1]");
    QuantumState out = state;
    const std::complex<double> factor = std::polar(src.gain_scale, src.pump_phase);
    for (const auto& term : state.terms) {
        if (term.pair_order >= state.max_pairs)
            continue;
        FockTerm branch =
            apply_creation(apply_creation(term, src.signal_mode), src.idler_mode);
        branch.amplitude *= factor;
        branch.pair_order = term.pair_order + 1;
        out.terms.push_back(std::move(branch));
    }
    return out;
}

QuantumState apply_phase(const QuantumState& state, const PhaseShift& el) {
    if (!std::isfinite(el.phase))
        throw std::invalid_argument("phase must be finite");
    QuantumState out = state;
    for (auto& term : out.terms) {
        const int n = occupation_of(term, el.mode);
        if (n != 0)
            term.amplitude *= std::polar(1.0, el.phase * n);
    }
    return out;
}

QuantumState apply_swap(const QuantumState& state, const Swap& el) {
    if (el.mode_a == el.mode_b)
        throw std::invalid_argument("swap needs distinct modes");
    QuantumState out = state;
    for (auto& term : out.terms) {
        const int na = occupation_of(term, el.mode_a);
        const int nb = occupation_of(term, el.mode_b);
        term.occupation.erase(el.mode_a);
        term.occupation.erase(el.mode_b);
        if (nb != 0)
            term.occupation[el.mode_a] = nb;
        if (na != 0)
            term.occupation[el.mode_b] = na;
    }
    return out;
}

QuantumState apply_loss(const QuantumState& state, const Loss& el) {
    if (!(el.transmissivity >= 0.0 && el.transmissivity <= 1.0))
        throw std::invalid_argument("transmissivity outside [0,1]");
    if (el.env_mode == el.mode)
        throw std::invalid_argument("loss environment mode must differ from the lossy mode");
    const double T = el.transmissivity;
    QuantumState out;
    out.max_pairs = state.max_pairs;
    out.terms.reserve(state.terms.size());
    for (const auto& term : state.terms) {
        const int n = occupation_of(term, el.mode);
        if (n == 0) {
            out.terms.push_back(term);
            continue;
        }
        for (int k = 0; k <= n; ++k) {
            const double weight =
                binomial(n, k) * std::pow(T, k) * std::pow(1.0 - T, n - k);
            if (weight == 0.0)
                continue;
            FockTerm branch = term;
            if (k == 0)
                branch.occupation.erase(el.mode);
            else
                branch.occupation[el.mode] = k;
            if (k < n)
                branch.occupation[el.env_mode] += n - k;
            branch.amplitude *= std::sqrt(weight);
            out.terms.push_back(std::move(branch));
        }
    }
    return out;
}

namespace {

struct Applier {
    const QuantumState& state;

    QuantumState operator()(const PairSource& e) const { return apply_source(state, e); }
    QuantumState operator()(const PhaseShift& e) const { return apply_phase(state, e); }
    QuantumState operator()(const Swap& e) const { return apply_swap(state, e); }
    QuantumState operator()(const Loss& e) const { return apply_loss(state, e); }
};

} // namespace

QuantumState apply_element(const QuantumState& state, const Element& el) {
    return std::visit(Applier{state}, el);
}

} // namespace fisim
