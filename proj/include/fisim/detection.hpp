#ifndef FISIM_DETECTION_HPP
#define FISIM_DETECTION_HPP

#include <map>
#include <set>

#include "fisim/fock.hpp"

namespace fisim {

/// Threshold detectors click on any photon number >= 1; number-resolving
/// detectors click on exactly one photon.
enum class DetectorModel { threshold, number_resolving };

/// Coincidence post-selection: `required` detectors must click, `forbidden`
/// must not, everything else (including environment modes) is marginalized.
struct ClickPattern {
    std::set<DetectorId> required;
    std::set<DetectorId> forbidden;

    bool operator==(const ClickPattern&) const = default;
};

/// Probability expressed per pair order: P(p) = sum coeff * p^(2*order).
struct OrderedProbability {
    std::map<int, double> per_order;

    double coeff(int order) const;
    double evaluate(double p) const;
};

/// Click-pattern probability of a merged state. Distinct occupations add
/// incoherently; terms sharing an occupation have already been summed
/// coherently by the merge.
OrderedProbability click_probability(const QuantumState& state,
                                     const ClickPattern& pattern,
                                     const std::map<DetectorId, ModeId>& detectors,
                                     DetectorModel model = DetectorModel::threshold);

OrderedProbability single_counts(const QuantumState& state,
                                 const DetectorId& detector,
                                 const std::map<DetectorId, ModeId>& detectors,
                                 DetectorModel model = DetectorModel::threshold);

} // namespace fisim

#endif
