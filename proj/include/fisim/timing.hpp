#ifndef FISIM_TIMING_HPP
#define FISIM_TIMING_HPP

#include <string>
#include <vector>

namespace fisim {

inline constexpr double speed_of_light_mm_per_s = 2.99792458e11;

/// Interferometer path lengths in mm, measured from the pump splitter
/// ("start point"): l_sp1 pump to first splitter leg, l_sp2 crystal to pump
/// return splitter, l_cp pump compensating arm, l_si crystal to idler
/// splitter, l_ci idler compensating arm, l_ss crystal to signal splitter,
/// l_ss1/l_ss2 the two signal compensating arms, l_bd the beam-displacer
/// internal offset between its two parallel paths.
struct Geometry {
    double l_sp1 = 0.0;
    double l_sp2 = 0.0;
    double l_cp = 0.0;
    double l_si = 0.0;
    double l_ci = 0.0;
    double l_ss = 0.0;
    double l_ss1 = 0.0;
    double l_ss2 = 0.0;
    double l_bd = 0.0;

    bool operator==(const Geometry&) const = default;
};

struct AlignmentCondition {
    std::string name;
    double actual_mm = 0.0;
    double required_mm = 0.0;
    double delta_mm = 0.0;
    bool satisfied = false;
};

struct PathMatch {
    std::string name;
    double delta_seconds = 0.0;
    bool matched = false;
};

/// Arrival times (seconds from the pump splitting) of the relevant photons
/// and return pumps, for the fixed and the idler-exchanged layouts, plus
/// the alignment conditions and per-path simultaneity checks filled by
/// check_alignment. Absolute times are conventional; only differences
/// matter.
struct ArrivalReport {
    bool swapped = false;

    // fixed idler layout
    double t_i1 = 0.0;
    double t_s1 = 0.0;
    double t_p3 = 0.0;

    // idler-exchanged layout
    double t_i1_swapped = 0.0;
    double t_i2_swapped = 0.0;
    double t_s2 = 0.0;
    double t_p4 = 0.0;

    std::vector<AlignmentCondition> conditions;
    std::vector<PathMatch> path_matches;
    bool all_conditions_satisfied = false;
    bool all_paths_matched = false;
};

/// Computes the arrival times for one layout. swapped=false fills t_i1,
/// t_s1, t_p3; swapped=true fills the exchanged-idler set (t_s1 and t_p3
/// are layout-independent and always filled).
ArrivalReport arrival_times(const Geometry& geom, bool swapped);

/// Evaluates the four mirror-alignment conditions (compensating arm equals
/// pump return length, within tolerance_mm) and the four per-path
/// photon/pump simultaneity matches of the exchanged layout. When the
/// conditions hold the matches follow identically, even though the two
/// return pumps are not simultaneous (they differ by l_bd/c).
ArrivalReport check_alignment(const Geometry& geom, double tolerance_mm = 1e-3);

} // namespace fisim

#endif
