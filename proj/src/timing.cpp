#include "fisim/timing.hpp"

#include <cmath>
#include <stdexcept>

namespace fisim {

namespace {

void validate(const Geometry& g) {
    const double lengths[] = {g.l_sp1, g.l_sp2, g.l_cp, g.l_si, g.l_ci,
                              g.l_ss,  g.l_ss1, g.l_ss2, g.l_bd};
    for (double l : lengths)
        if (!(l >= 0.0) || !std::isfinite(l))
            throw std::invalid_argument("geometry lengths must be finite and >= 0");
}

} // namespace

ArrivalReport arrival_times(const Geometry& g, bool swapped) {
    validate(g);
    constexpr double c = speed_of_light_mm_per_s;
    ArrivalReport report;
    report.swapped = swapped;

    // Layout-independent: the signal of the first source and the first
    // return pump travel the same legs either way.
    report.t_s1 = (g.l_sp1 + 2.0 * g.l_ss + 2.0 * g.l_ss1 + 2.0 * g.l_bd) / c;
    report.t_p3 = (g.l_sp1 + 2.0 * g.l_sp2 + 2.0 * g.l_cp + 2.0 * g.l_bd) / c;

    if (!swapped) {
        report.t_i1 = (g.l_sp1 + 2.0 * g.l_si + 2.0 * g.l_ci + 2.0 * g.l_bd) / c;
    } else {
        // Exchanging the idlers removes one displacer offset from i1 and
        // adds it to i2; the second return pump and second signal lose one
        // offset as well.
        report.t_i1_swapped = (g.l_sp1 + 2.0 * g.l_si + 2.0 * g.l_ci + g.l_bd) / c;
        report.t_i2_swapped = (g.l_sp1 + 2.0 * g.l_si + 2.0 * g.l_ci + 2.0 * g.l_bd) / c;
        report.t_s2 = (g.l_sp1 + 2.0 * g.l_ss + 2.0 * g.l_ss2 + g.l_bd) / c;
        report.t_p4 = (g.l_sp1 + 2.0 * g.l_sp2 + 2.0 * g.l_cp + g.l_bd) / c;
    }
    return report;
}

ArrivalReport check_alignment(const Geometry& g, double tolerance_mm) {
    if (!(tolerance_mm >= 0.0))
        throw std::invalid_argument("tolerance must be >= 0");

    ArrivalReport report = arrival_times(g, true);
    report.t_i1 = arrival_times(g, false).t_i1;

    const double pump_return = g.l_sp2 + g.l_cp;
    auto condition = [&](const char* name, double actual, double required) {
        AlignmentCondition cond;
        cond.name = name;
        cond.actual_mm = actual;
        cond.required_mm = required;
        cond.delta_mm = actual - required;
        cond.satisfied = std::abs(cond.delta_mm) <= tolerance_mm;
        report.conditions.push_back(cond);
    };
    condition("idler1_compensation", g.l_ci, pump_return - g.l_si);
    condition("signal1_compensation", g.l_ss1, pump_return - g.l_ss);
    condition("idler2_compensation", g.l_ci, pump_return - g.l_si);
    condition("signal2_compensation", g.l_ss2, pump_return - g.l_ss);

    const double tolerance_s = tolerance_mm / speed_of_light_mm_per_s;
    auto path = [&](const char* name, double t_photon, double t_pump) {
        PathMatch match;
        match.name = name;
        match.delta_seconds = t_photon - t_pump;
        match.matched = std::abs(match.delta_seconds) <= tolerance_s;
        report.path_matches.push_back(match);
    };
    path("idler2_pump3", report.t_i2_swapped, report.t_p3);
    path("signal1_pump3", report.t_s1, report.t_p3);
    path("idler1_pump4", report.t_i1_swapped, report.t_p4);
    path("signal2_pump4", report.t_s2, report.t_p4);

    report.all_conditions_satisfied = true;
    for (const auto& cond : report.conditions)
        report.all_conditions_satisfied &= cond.satisfied;
    report.all_paths_matched = true;
    for (const auto& match : report.path_matches)
        report.all_paths_matched &= match.matched;
    return report;
}

} // namespace fisim
