#ifndef FISIM_PIPELINE_HPP
#define FISIM_PIPELINE_HPP

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fisim/detection.hpp"
#include "fisim/elements.hpp"

namespace fisim {

/// An ordered optical pipeline acting on vacuum, plus the detector wiring.
/// named_phases maps a scan target (e.g. "phi_i") to the pipeline elements
/// it drives; one name may drive several elements, which then always carry
/// the same value (a shared mirror).
struct Experiment {
    std::vector<ModeId> modes;
    std::vector<Element> pipeline;
    std::map<DetectorId, ModeId> detectors;
    int max_pairs = 2;
    std::map<std::string, std::vector<std::size_t>> named_phases;
    DetectorModel detector_model = DetectorModel::threshold;

    bool operator==(const Experiment&) const = default;
};

/// Checks mode references, environment-mode freshness, parameter ranges,
/// detector wiring and named-phase targets. Throws std::invalid_argument
/// describing the first violation.
void validate_experiment(const Experiment& exp);

/// Sets every element driven by `name`: the phase of a PhaseShift, the
/// pump phase of a PairSource.
void set_named_phase(Experiment& exp, const std::string& name, double value);

/// Folds the pipeline over vacuum, merges and prunes. Deterministic: the
/// result is canonically sorted by occupation.
QuantumState run_pipeline(const Experiment& exp, double epsilon = 1e-12);

/// Four cascaded pair sources pumped coherently, modes "1".."4".
///
/// The two front-pass crystals emit into (2,3) and (1,4); the signal
/// phases act on modes 2 and 4 and the shared idler phase on modes 1 and
/// 3; optional losses follow; the two return-pass crystals emit into (1,2)
/// and (3,4) carrying the pump phase. The idler-path crossing is realized
/// by this mode assignment itself: photons from the two groups land in the
/// same four detector modes, so only the group histories interfere.
///
/// Phase targets: "phi_s1", "phi_s2", "phi_i" (both idler shifters),
/// "phi_p" (both return-pass sources).
struct CanonicalParams {
    double signal1_phase = 0.0; // phi_s1
    double signal2_phase = 0.0; // phi_s2
    double idler_phase = 0.0;   // phi_i, shared by both idler paths
    double pump_phase = 0.0;    // phi_p, shared by both return-pass sources
    std::array<double, 4> q{1.0, 1.0, 1.0, 1.0}; // per-crystal intensity ratios; source amplitude is sqrt(q)
    std::vector<Loss> losses;   // inserted after the idler crossing, before the return pass
    int max_pairs = 2;
};

Experiment canonical_four_crystal(const CanonicalParams& params);

/// One pump path and its retro-reflected pass: two pair sources sharing
/// signal mode "s" and idler mode "i", with phase targets "phi_s", "phi_i",
/// "phi_p". Optional losses sit between the two sources.
struct TwoCrystalParams {
    double signal_phase = 0.0;
    double idler_phase = 0.0;
    double pump_phase = 0.0;
    std::array<double, 2> q{1.0, 1.0};
    std::vector<Loss> losses;
    int max_pairs = 2;
};

Experiment two_crystal(const TwoCrystalParams& params);

} // namespace fisim

#endif
