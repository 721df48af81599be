#ifndef FISIM_ANALYSIS_HPP
#define FISIM_ANALYSIS_HPP

#include <array>
#include <string>
#include <vector>

#include "fisim/detection.hpp"
#include "fisim/pipeline.hpp"

namespace fisim {

enum class XKind { position, phase };

/// One scanned fringe: x is mirror position (nm) or phase (rad), y is a
/// per-order probability coefficient or sampled counts.
struct ScanCurve {
    std::vector<double> x;
    std::vector<double> y;
    XKind x_kind = XKind::phase;
    ClickPattern pattern;
};

struct FitResult {
    double visibility = 0.0;       // A / C
    double period = 0.0;           // same units as x
    double phase_offset = 0.0;     // rad, in (-pi, pi]
    double baseline = 0.0;         // C
    double visibility_sigma = 0.0; // Poisson-propagated (treats y as counts)
};

struct FitOptions {
    double period_min = 0.0; // 0 = auto (2.5 * mean spacing)
    double period_max = 0.0; // 0 = auto (2 * span)
    int period_grid = 512;
};

struct DegenerateFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScanRequest {
    std::string target;       // named phase to drive
    std::vector<double> grid; // strictly increasing; phases (rad) or positions (nm)
    ClickPattern pattern;
    int order = 2;            // pair order whose coefficient is recorded
    XKind x_kind = XKind::phase;
    double wavelength = 0.0;  // nm; required for position scans
    int multiplicity = 1;     // photons sharing the scanned mirror
    int jobs = 1;             // grid points evaluated concurrently
};

/// Re-runs the pipeline for every grid value of the target phase. Position
/// grids are converted per point with position_to_phase (two passes, the
/// retro-reflecting geometry).
ScanCurve scan(const Experiment& exp, const ScanRequest& req);

/// Phase advance of a mirror displacement: 2*pi*passes*multiplicity*dx/wavelength.
double position_to_phase(double delta_x_nm, double wavelength_nm, int passes,
                         int multiplicity);

/// Least-squares fit of y = C + A*cos(2*pi*x/period + phase_offset): coarse
/// period grid, closed-form linear solve for (C, A cos, A sin) at each
/// period, golden-section refinement around the best grid point.
/// visibility_sigma propagates independent Poisson variances (var = y)
/// through the linear subproblem at the fitted period. Throws
/// DegenerateFitError when the baseline is nonpositive.
FitResult fit_sinusoid(const ScanCurve& curve, const FitOptions& options = {});

/// Four-fold visibility under an amplitude transmissivity T on one
/// interfering branch: 2*alpha*T / (1 + (alpha*T)^2).
double predicted_visibility_fourfold(double alpha, double T);

/// Three-fold visibility with the lossy branch and the double-emission
/// noise included: 2*alpha*T / (alpha^2 + 3). Linear in T.
double predicted_visibility_threefold(double alpha, double T);

/// Inverts V = 2T/(1+T^2) on (0,1]: T = (1 - sqrt(1-V^2)) / V.
double invert_visibility_to_T(double visibility);

/// Pair-coincidence rates of the four sources before (N1) and after (N2)
/// the idler-path exchange, and the amplitude transmissivities of the two
/// front-pass groups.
struct SourceRates {
    double before = 0.0; // N1
    double after = 0.0;  // N2
};

struct SourceImbalanceTable {
    std::array<SourceRates, 4> sources;
    double T1 = 1.0;
    double T2 = 1.0;
};

struct AlphaEstimate {
    double alpha = 0.0;
    double predicted_V = 0.0;
    std::array<double, 4> q{}; // N2/N1 per source
};

/// alpha = sqrt(q1*q2/(q3*q4)) * T1 * T2, with the visibility the two
/// interfering four-photon histories would give at that imbalance.
AlphaEstimate estimate_alpha(const SourceImbalanceTable& table);

/// Replaces each y by a Poisson draw with mean y*counts_scale.
/// Deterministic for a given seed.
ScanCurve sample_counts(const ScanCurve& curve, double counts_scale,
                        std::uint64_t seed);

/// Polarization-entangled reference: coincidence sin^2(a+b)/2 and the
/// phase-independent single-detector probability 1/2.
struct EntangledReference {
    double p_ab = 0.0;
    double p_a = 0.5;
};

EntangledReference entangled_reference(double alpha_angle, double beta_angle);

} // namespace fisim

#endif
