#include "fisim/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace fisim {

QuantumState vacuum(int max_pairs) {
    if (max_pairs < 0)
        throw std::invalid_argument("max_pairs must be >= 0");
    QuantumState state;
    state.max_pairs = max_pairs;
    state.terms.push_back(FockTerm{});
    return state;
}

FockTerm apply_creation(FockTerm term, const ModeId& mode) {
    int& n = term.occupation[mode];
    term.amplitude *= std::sqrt(static_cast<double>(n + 1));
    ++n;
    return term;
}

int total_photons(const FockTerm& term) {
    int total = 0;
    for (const auto& [mode, n] : term.occupation)
        total += n;
    return total;
}

int occupation_of(const FockTerm& term, const ModeId& mode) {
    auto it = term.occupation.find(mode);
    return it == term.occupation.end() ? 0 : it->second;
}

QuantumState merge_terms(const QuantumState& state, double epsilon) {
    if (epsilon < 0.0)
        throw std::invalid_argument("epsilon must be >= 0");
    std::map<Occupation, FockTerm> merged;
    for (const auto& term : state.terms) {
        auto [it, inserted] = merged.try_emplace(term.occupation, term);
        if (!inserted)
            it->second.amplitude += term.amplitude;
    }
    QuantumState out;
    out.max_pairs = state.max_pairs;
    for (auto& [occupation, term] : merged)
        if (std::abs(term.amplitude) > epsilon)
            out.terms.push_back(std::move(term));
    return out;
}

std::map<int, double> probability_by_order(const QuantumState& state) {
    std::map<int, double> by_order;
    for (const auto& term : state.terms)
        by_order[term.pair_order] += std::norm(term.amplitude);
    return by_order;
}

} // namespace fisim
