#include "fisim/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace fisim {

double OrderedProbability::coeff(int order) const {
    auto it = per_order.find(order);
    return it == per_order.end() ? 0.0 : it->second;
}

double OrderedProbability::evaluate(double p) const {
    double total = 0.0;
    for (const auto& [order, coefficient] : per_order)
        total += coefficient * std::pow(p, 2 * order);
    return total;
}

OrderedProbability click_probability(const QuantumState& state,
                                     const ClickPattern& pattern,
                                     const std::map<DetectorId, ModeId>& detectors,
                                     DetectorModel model) {
    auto mode_of = [&detectors](const DetectorId& id) -> const ModeId& {
        auto it = detectors.find(id);
        if (it == detectors.end())
            throw std::invalid_argument("pattern references unknown detector '" + id + "'");
        return it->second;
    };
    for (const auto& id : pattern.required)
        if (pattern.forbidden.count(id) != 0)
            throw std::invalid_argument("detector '" + id + "' both required and forbidden");

    std::vector<const ModeId*> required_modes;
    std::vector<const ModeId*> forbidden_modes;
    for (const auto& id : pattern.required)
        required_modes.push_back(&mode_of(id));
    for (const auto& id : pattern.forbidden)
        forbidden_modes.push_back(&mode_of(id));

    auto clicks = [model](int n) {
        return model == DetectorModel::threshold ? n >= 1 : n == 1;
    };

    OrderedProbability result;
    for (const auto& term : state.terms) {
        bool selected = true;
        for (const ModeId* mode : required_modes) {
            if (!clicks(occupation_of(term, *mode))) {
                selected = false;
                break;
            }
        }
        if (selected) {
            for (const ModeId* mode : forbidden_modes) {
                if (occupation_of(term, *mode) != 0) {
                    selected = false;
                    break;
                }
            }
        }
        if (selected)
            result.per_order[term.pair_order] += std::norm(term.amplitude);
    }
    return result;
}

OrderedProbability single_counts(const QuantumState& state,
                                 const DetectorId& detector,
                                 const std::map<DetectorId, ModeId>& detectors,
                                 DetectorModel model) {
    ClickPattern pattern;
    pattern.required.insert(detector);
    return click_probability(state, pattern, detectors, model);
}

} // namespace fisim
