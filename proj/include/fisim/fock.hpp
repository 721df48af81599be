#ifndef FISIM_FOCK_HPP
#define FISIM_FOCK_HPP

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace fisim {

using ModeId = std::string;
using DetectorId = std::string;

/// Sparse photon-number assignment. Zero-count entries are never stored.
using Occupation = std::map<ModeId, int>;

/// One basis ket with its complex weight. pair_order counts how many
/// source emissions produced the term; the pair-generation amplitude p is
/// carried symbolically, so the term contributes
/// |amplitude|^2 * p^(2*pair_order) to any probability.
struct FockTerm {
    Occupation occupation;
    std::complex<double> amplitude{1.0, 0.0};
    int pair_order = 0;

    bool operator==(const FockTerm&) const = default;
};

/// Superposition of Fock terms, truncated at max_pairs emitted pairs.
struct QuantumState {
    std::vector<FockTerm> terms;
    int max_pairs = 2;
};

/// Single term with empty occupation and unit amplitude.
QuantumState vacuum(int max_pairs = 2);

/// Bosonic ladder action: adds one photon to `mode` and scales the
/// amplitude by sqrt(n+1), n being the prior occupation.
FockTerm apply_creation(FockTerm term, const ModeId& mode);

int total_photons(const FockTerm& term);

int occupation_of(const FockTerm& term, const ModeId& mode);

/// Sums amplitudes of terms sharing an occupation, drops terms with
/// |amplitude| <= epsilon, and returns the result canonically sorted by
/// occupation (lexicographic over the sparse map).
QuantumState merge_terms(const QuantumState& state, double epsilon = 1e-12);

/// Sum of |amplitude|^2 grouped by pair order. Diagnostic only: physical
/// probabilities also carry the p^(2*order) weight.
std::map<int, double> probability_by_order(const QuantumState& state);

} // namespace fisim

#endif
