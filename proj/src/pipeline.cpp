#include "fisim/pipeline.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace fisim {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok)
        throw std::invalid_argument(message);
}

} // namespace

void validate_experiment(const Experiment& exp) {
    require(exp.max_pairs >= 0, "max_pairs must be >= 0");
    require(!exp.modes.empty(), "experiment declares no modes");

    std::set<ModeId> registered;
    for (const auto& mode : exp.modes) {
        require(!mode.empty(), "empty mode label");
        require(registered.insert(mode).second, "duplicate mode label '" + mode + "'");
    }

    // Environment modes become referenceable once their loss introduced them.
    std::set<ModeId> env_modes;
    auto known = [&](const ModeId& m) {
        return registered.count(m) != 0 || env_modes.count(m) != 0;
    };

    for (std::size_t i = 0; i < exp.pipeline.size(); ++i) {
        const std::string where = "pipeline element " + std::to_string(i);
        if (const auto* src = std::get_if<PairSource>(&exp.pipeline[i])) {
            require(known(src->signal_mode), where + ": unknown mode '" + src->signal_mode + "'");
            require(known(src->idler_mode), where + ": unknown mode '" + src->idler_mode + "'");
            require(src->signal_mode != src->idler_mode,
                    where + ": signal and idler modes must differ");
            require(src->gain_scale >= 0.0 && src->gain_scale <= 1.0,
                    where + ": gain_scale outside [0,1]");
            require(std::isfinite(src->pump_phase), where + ": pump_phase not finite");
        } else if (const auto* ph = std::get_if<PhaseShift>(&exp.pipeline[i])) {
            require(known(ph->mode), where + ": unknown mode '" + ph->mode + "'");
            require(std::isfinite(ph->phase), where + ": phase not finite");
        } else if (const auto* sw = std::get_if<Swap>(&exp.pipeline[i])) {
            require(known(sw->mode_a), where + ": unknown mode '" + sw->mode_a + "'");
            require(known(sw->mode_b), where + ": unknown mode '" + sw->mode_b + "'");
            require(sw->mode_a != sw->mode_b, where + ": swap modes must differ");
        } else if (const auto* loss = std::get_if<Loss>(&exp.pipeline[i])) {
            require(known(loss->mode), where + ": unknown mode '" + loss->mode + "'");
            require(loss->transmissivity >= 0.0 && loss->transmissivity <= 1.0,
                    where + ": transmissivity outside [0,1]");
            require(!loss->env_mode.empty(), where + ": missing environment mode");
            require(registered.count(loss->env_mode) == 0,
                    where + ": environment mode '" + loss->env_mode + "' collides with a registered mode");
            require(env_modes.insert(loss->env_mode).second,
                    where + ": environment mode '" + loss->env_mode + "' reused");
        }
    }

    require(!exp.detectors.empty(), "no detectors declared");
    std::set<ModeId> detector_modes;
    for (const auto& [id, mode] : exp.detectors) {
        require(registered.count(mode) != 0,
                "detector '" + id + "' watches unknown mode '" + mode + "'");
        require(detector_modes.insert(mode).second,
                "detector '" + id + "' shares mode '" + mode + "' with another detector");
    }

    for (const auto& [name, indices] : exp.named_phases) {
        require(!indices.empty(), "named phase '" + name + "' drives no elements");
        for (std::size_t idx : indices) {
            require(idx < exp.pipeline.size(),
                    "named phase '" + name + "' references element " + std::to_string(idx) +
                        " out of range");
            const bool ok = std::holds_alternative<PhaseShift>(exp.pipeline[idx]) ||
                            std::holds_alternative<PairSource>(exp.pipeline[idx]);
            require(ok, "named phase '" + name + "' must target a phase shifter or a source");
        }
    }
}

void set_named_phase(Experiment& exp, const std::string& name, double value) {
    auto it = exp.named_phases.find(name);
    if (it == exp.named_phases.end())
        throw std::invalid_argument("unknown phase target '" + name + "'");
    for (std::size_t idx : it->second) {
        if (auto* ph = std::get_if<PhaseShift>(&exp.pipeline[idx]))
            ph->phase = value;
        else if (auto* src = std::get_if<PairSource>(&exp.pipeline[idx]))
            src->pump_phase = value;
        else
            throw std::invalid_argument("named phase '" + name + "' targets a fixed element");
    }
}

QuantumState run_pipeline(const Experiment& exp, double epsilon) {
    validate_experiment(exp);
    QuantumState state = vacuum(exp.max_pairs);
    for (const auto& element : exp.pipeline)
        state = apply_element(state, element);
    return merge_terms(state, epsilon);
}

Experiment canonical_four_crystal(const CanonicalParams& params) {
    for (double qi : params.q)
        if (!(qi >= 0.0 && qi <= 1.0))
            throw std::invalid_argument("intensity ratio q outside [0,1]");

    Experiment exp;
    exp.modes = {"1", "2", "3", "4"};
    exp.max_pairs = params.max_pairs;

    auto add = [&exp](Element el) {
        exp.pipeline.push_back(std::move(el));
        return exp.pipeline.size() - 1;
    };

    // Front pass. Emission happens before the down-conversion phases, so
    // only these two sources' photons pick them up.
    add(PairSource{"2", "3", 0.0, std::sqrt(params.q[0])});
    add(PairSource{"4", "1", 0.0, std::sqrt(params.q[1])});

    exp.named_phases["phi_s1"] = {add(PhaseShift{"2", params.signal1_phase})};
    exp.named_phases["phi_s2"] = {add(PhaseShift{"4", params.signal2_phase})};
    exp.named_phases["phi_i"] = {add(PhaseShift{"1", params.idler_phase}),
                                 add(PhaseShift{"3", params.idler_phase})};

    std::size_t loss_index = 0;
    for (Loss loss : params.losses) {
        if (loss.env_mode.empty())
            loss.env_mode = "env:loss" + std::to_string(loss_index);
        ++loss_index;
        add(std::move(loss));
    }

    // Return pass: the same four detector modes, pump phase attached.
    exp.named_phases["phi_p"] = {
        add(PairSource{"2", "1", params.pump_phase, std::sqrt(params.q[2])}),
        add(PairSource{"4", "3", params.pump_phase, std::sqrt(params.q[3])})};

    exp.detectors = {{"1", "1"}, {"2", "2"}, {"3", "3"}, {"4", "4"}};
    validate_experiment(exp);
    return exp;
}

Experiment two_crystal(const TwoCrystalParams& params) {
    for (double qi : params.q)
        if (!(qi >= 0.0 && qi <= 1.0))
            throw std::invalid_argument("intensity ratio q outside [0,1]");

    Experiment exp;
    exp.modes = {"i", "s"};
    exp.max_pairs = params.max_pairs;

    auto add = [&exp](Element el) {
        exp.pipeline.push_back(std::move(el));
        return exp.pipeline.size() - 1;
    };

    add(PairSource{"s", "i", 0.0, std::sqrt(params.q[0])});
    exp.named_phases["phi_s"] = {add(PhaseShift{"s", params.signal_phase})};
    exp.named_phases["phi_i"] = {add(PhaseShift{"i", params.idler_phase})};

    std::size_t loss_index = 0;
    for (Loss loss : params.losses) {
        if (loss.env_mode.empty())
            loss.env_mode = "env:loss" + std::to_string(loss_index);
        ++loss_index;
        add(std::move(loss));
    }

    exp.named_phases["phi_p"] = {
        add(PairSource{"s", "i", params.pump_phase, std::sqrt(params.q[1])})};

    exp.detectors = {{"i", "i"}, {"s", "s"}};
    validate_experiment(exp);
    return exp;
}

} // namespace fisim
