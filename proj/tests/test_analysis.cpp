#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fisim/analysis.hpp"
#include "fisim/io.hpp"
#include "fisim/rng.hpp"

using namespace fisim;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> linspace(double from, double to, int steps) {
    std::vector<double> grid(steps);
    for (int i = 0; i < steps; ++i)
        grid[i] = from + (to - from) * i / (steps - 1);
    return grid;
}

ClickPattern fourfold_pattern() {
    ClickPattern pattern;
    pattern.required = {"1", "2", "3", "4"};
    return pattern;
}

ScanRequest phase_scan(const std::string& target, const ClickPattern& pattern,
                       int order = 2, int steps = 64) {
    ScanRequest req;
    req.target = target;
    req.grid = linspace(0.0, 2.0 * pi, steps);
    req.pattern = pattern;
    req.order = order;
    return req;
}

// canonical layout whose gain scales realize a given branch imbalance: the
// second front-pass crystal carries all of it, which also leaves the
// double-emission noise terms at their ideal strength
CanonicalParams imbalanced_params(double alpha) {
    CanonicalParams params;
    params.q = {1.0, alpha * alpha, 1.0, 1.0};
    return params;
}

} // namespace

TEST_CASE("mirror displacement converts to phase") {
    CHECK(position_to_phase(404.0, 808.0, 2, 1) == doctest::Approx(2.0 * pi));
    CHECK(position_to_phase(202.0, 808.0, 2, 2) == doctest::Approx(2.0 * pi));
    CHECK(position_to_phase(0.0, 808.0, 2, 1) == 0.0);
    CHECK_THROWS_AS(position_to_phase(1.0, 0.0, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(position_to_phase(1.0, -5.0, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(position_to_phase(1.0, 808.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(position_to_phase(1.0, 808.0, 2, 0), std::invalid_argument);
}

TEST_CASE("scan evaluates the coefficient on the grid") {
    const Experiment exp = canonical_four_crystal({});
    ScanRequest req;
    req.target = "phi_s1";
    req.grid = {0.0, pi / 2.0, pi};
    req.pattern = fourfold_pattern();
    req.order = 2;
    const ScanCurve curve = scan(exp, req);
    REQUIRE(curve.y.size() == 3);
    CHECK(curve.y[0] == doctest::Approx(4.0));
    CHECK(curve.y[1] == doctest::Approx(2.0));
    CHECK(curve.y[2] == doctest::Approx(0.0));
}

TEST_CASE("single-point scans and input validation") {
    const Experiment exp = canonical_four_crystal({});
    ScanRequest req;
    req.target = "phi_s1";
    req.grid = {1.0};
    req.pattern = fourfold_pattern();
    CHECK(scan(exp, req).y.size() == 1);

    req.target = "nope";
    CHECK_THROWS_AS(scan(exp, req), std::invalid_argument);
    req.target = "phi_s1";
    req.grid = {1.0, 0.5};
    CHECK_THROWS_AS(scan(exp, req), std::invalid_argument);
    req.grid.clear();
    CHECK_THROWS_AS(scan(exp, req), std::invalid_argument);
}

TEST_CASE("parallel scans match the serial result") {
    const Experiment exp = canonical_four_crystal({});
    ScanRequest req = phase_scan("phi_s1", fourfold_pattern());
    const ScanCurve serial = scan(exp, req);
    req.jobs = 4;
    const ScanCurve parallel = scan(exp, req);
    CHECK(serial.y == parallel.y);
}

TEST_CASE("sinusoid fit recovers a synthetic fringe") {
    ScanCurve curve;
    curve.x = linspace(0.0, 1200.0, 64);
    for (double x : curve.x)
        curve.y.push_back(2.0 + 1.5 * std::cos(2.0 * pi * x / 403.5));
    const FitResult fit = fit_sinusoid(curve);
    CHECK(fit.visibility == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(fit.period == doctest::Approx(403.5).epsilon(1e-6));
    CHECK(fit.baseline == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("sinusoid fit recovers the phase offset") {
    ScanCurve curve;
    curve.x = linspace(0.0, 4.0 * pi, 48);
    for (double x : curve.x)
        curve.y.push_back(3.0 + 0.9 * std::cos(x + 0.7));
    const FitResult fit = fit_sinusoid(curve);
    CHECK(fit.period == doctest::Approx(2.0 * pi).epsilon(1e-7));
    CHECK(fit.phase_offset == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("constant data fits to zero visibility") {
    ScanCurve curve;
    curve.x = linspace(0.0, 10.0, 16);
    curve.y.assign(16, 5.0);
    CHECK(fit_sinusoid(curve).visibility == doctest::Approx(0.0));
}

TEST_CASE("degenerate fits are rejected distinctly") {
    ScanCurve negative;
    negative.x = linspace(0.0, 10.0, 16);
    negative.y.assign(16, -1.0);
    CHECK_THROWS_AS(fit_sinusoid(negative), DegenerateFitError);

    ScanCurve tiny;
    tiny.x = {0.0, 1.0, 2.0};
    tiny.y = {1.0, 2.0, 1.0};
    CHECK_THROWS_AS(fit_sinusoid(tiny), std::invalid_argument);
}

TEST_CASE("ideal four-fold fringe fits to unit visibility") {
    const Experiment exp = canonical_four_crystal({});
    const FitResult fit = fit_sinusoid(scan(exp, phase_scan("phi_s1", fourfold_pattern())));
    CHECK(fit.visibility == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.period == doctest::Approx(2.0 * pi).epsilon(1e-9));
}

TEST_CASE("idler scans run at twice the fringe frequency") {
    const Experiment exp = canonical_four_crystal({});
    const FitResult signal =
        fit_sinusoid(scan(exp, phase_scan("phi_s1", fourfold_pattern())));
    const FitResult idler =
        fit_sinusoid(scan(exp, phase_scan("phi_i", fourfold_pattern())));
    CHECK(idler.period == doctest::Approx(signal.period / 2.0).epsilon(1e-9));
}

TEST_CASE("position scans reproduce the retro-reflected mirror periods") {
    const Experiment exp = canonical_four_crystal({});
    ScanRequest req = phase_scan("phi_s1", fourfold_pattern());
    req.x_kind = XKind::position;
    req.wavelength = 808.0;
    req.grid = linspace(0.0, 808.0, 64);
    const FitResult signal = fit_sinusoid(scan(exp, req));
    CHECK(signal.period == doctest::Approx(404.0).epsilon(1e-9));

    req.target = "phi_i";
    const FitResult idler = fit_sinusoid(scan(exp, req));
    CHECK(idler.period == doctest::Approx(202.0).epsilon(1e-9));

    // measured mirror periods land within a percent of these
    CHECK(std::abs(signal.period - 403.5) / 403.5 < 0.01);
    CHECK(std::abs(idler.period - 200.9) / 200.9 < 0.01);
}

TEST_CASE("three-fold and two-fold fringes share the four-fold phase") {
    CanonicalParams params;
    params.signal2_phase = 0.31;
    params.idler_phase = 0.87;
    params.pump_phase = 0.12;
    const Experiment exp = canonical_four_crystal(params);

    ClickPattern threefold;
    threefold.required = {"1", "3", "4"};
    ClickPattern twofold;
    twofold.required = {"1", "3"};

    const double reference =
        fit_sinusoid(scan(exp, phase_scan("phi_s1", fourfold_pattern()))).phase_offset;
    CHECK(fit_sinusoid(scan(exp, phase_scan("phi_s1", threefold))).phase_offset ==
          doctest::Approx(reference).epsilon(1e-9));
    CHECK(fit_sinusoid(scan(exp, phase_scan("phi_s1", twofold))).phase_offset ==
          doctest::Approx(reference).epsilon(1e-9));
}

TEST_CASE("closed-form visibility predictors") {
    CHECK(predicted_visibility_fourfold(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(predicted_visibility_fourfold(0.521, 1.0) == doctest::Approx(0.819).epsilon(1e-3));
    CHECK(predicted_visibility_fourfold(0.411, 1.0) == doctest::Approx(0.7032).epsilon(1e-3));
    CHECK(predicted_visibility_threefold(1.0, 0.0) == doctest::Approx(0.0));
    CHECK(predicted_visibility_threefold(1.0, 1.0) == doctest::Approx(0.5));
    CHECK(predicted_visibility_threefold(0.42, 1.0) ==
          doctest::Approx(0.264450).epsilon(1e-5));
    CHECK_THROWS_AS(predicted_visibility_fourfold(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(predicted_visibility_threefold(1.0, 1.2), std::invalid_argument);
}

TEST_CASE("engine visibilities follow the closed forms under loss") {
    ClickPattern threefold;
    threefold.required = {"1", "2", "3"};

    for (double alpha : {0.42, 1.0}) {
        for (double T : {0.3, 0.7, 1.0}) {
            CanonicalParams params = imbalanced_params(alpha);
            params.losses = {Loss::from_amplitude("4", T, "env:s2")};
            const Experiment exp = canonical_four_crystal(params);

            const double v4 =
                fit_sinusoid(scan(exp, phase_scan("phi_s1", fourfold_pattern()))).visibility;
            CHECK(v4 == doctest::Approx(predicted_visibility_fourfold(alpha, T))
                            .epsilon(1e-9));

            const double v3 =
                fit_sinusoid(scan(exp, phase_scan("phi_s1", threefold))).visibility;
            CHECK(v3 == doctest::Approx(predicted_visibility_threefold(alpha, T))
                            .epsilon(1e-9));
        }
    }
}

TEST_CASE("two-source fringe visibility under loss") {
    for (double T : {0.3, 0.737, 0.9}) {
        TwoCrystalParams params;
        params.losses = {Loss::from_amplitude("s", T, "env:a")};
        const Experiment exp = two_crystal(params);

        ClickPattern pair;
        pair.required = {"i", "s"};
        ScanRequest req = phase_scan("phi_s", pair, 1);
        const double v_pair = fit_sinusoid(scan(exp, req)).visibility;
        CHECK(v_pair == doctest::Approx(2.0 * T / (1.0 + T * T)).epsilon(1e-9));

        ClickPattern single;
        single.required = {"s"};
        req.pattern = single;
        const double v_single = fit_sinusoid(scan(exp, req)).visibility;
        CHECK(v_single == doctest::Approx(2.0 * T / (1.0 + T * T)).epsilon(1e-9));
    }
}

TEST_CASE("visibility inversion") {
    CHECK(invert_visibility_to_T(0.955) == doctest::Approx(0.737).epsilon(0.003));
    CHECK(invert_visibility_to_T(0.950) == doctest::Approx(0.724).epsilon(0.003));
    CHECK(invert_visibility_to_T(1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(invert_visibility_to_T(0.0), std::invalid_argument);
    CHECK_THROWS_AS(invert_visibility_to_T(1.1), std::invalid_argument);

    // inversion composed with the forward law is the identity on (0,1]
    for (int i = 1; i <= 20; ++i) {
        const double T = i / 20.0;
        const double V = 2.0 * T / (1.0 + T * T);
        CHECK(invert_visibility_to_T(V) == doctest::Approx(T).epsilon(1e-12));
    }
}

TEST_CASE("imbalance estimate from measured pair rates") {
    SourceImbalanceTable table;
    table.sources = {{{1.75, 1.03}, {2.17, 2.16}, {3.27, 2.43}, {2.83, 2.34}}};
    table.T1 = 0.737;
    table.T2 = 0.724;
    const AlphaEstimate high = estimate_alpha(table);
    CHECK(high.alpha == doctest::Approx(0.521).epsilon(0.002));
    CHECK(high.predicted_V == doctest::Approx(0.819).epsilon(0.002));
    CHECK(high.q[0] == doctest::Approx(0.589).epsilon(1e-3));

    table.sources = {{{1.30, 0.53}, {1.21, 1.41}, {2.13, 2.14}, {2.24, 1.79}}};
    const AlphaEstimate low = estimate_alpha(table);
    CHECK(low.alpha == doctest::Approx(0.411).epsilon(0.002));
    CHECK(low.predicted_V == doctest::Approx(0.703).epsilon(0.002));

    // perfectly balanced sources at unit transmission
    table.sources = {{{2.0, 2.0}, {2.0, 2.0}, {2.0, 2.0}, {2.0, 2.0}}};
    table.T1 = table.T2 = 1.0;
    const AlphaEstimate ideal = estimate_alpha(table);
    CHECK(ideal.alpha == doctest::Approx(1.0));
    CHECK(ideal.predicted_V == doctest::Approx(1.0));

    table.sources[0].before = 0.0;
    CHECK_THROWS_AS(estimate_alpha(table), std::invalid_argument);
}

TEST_CASE("poisson sampling is seeded and unbiased") {
    ScanCurve curve;
    curve.x = linspace(0.0, 1.0, 64);
    curve.y.assign(64, 2.0);

    const ScanCurve a = sample_counts(curve, 50.0, 42);
    const ScanCurve b = sample_counts(curve, 50.0, 42);
    CHECK(a.y == b.y);
    const ScanCurve c = sample_counts(curve, 50.0, 43);
    CHECK(a.y != c.y);

    // mean of many draws at mean 100
    ScanCurve wide;
    wide.x = linspace(0.0, 1.0, 10000);
    wide.y.assign(10000, 1.0);
    const ScanCurve sampled = sample_counts(wide, 100.0, 7);
    double total = 0.0;
    for (double v : sampled.y)
        total += v;
    CHECK(total / 10000.0 == doctest::Approx(100.0).epsilon(0.05));

    // large-scale limit: counts/scale converges to the coefficient
    const ScanCurve large = sample_counts(curve, 1e6, 11);
    for (double v : large.y)
        CHECK(std::abs(v / 1e6 - 2.0) / 2.0 < 0.01);

    ScanCurve zero;
    zero.x = {0.0, 1.0};
    zero.y = {0.0, 0.0};
    const ScanCurve still_zero = sample_counts(zero, 1e9, 3);
    CHECK(still_zero.y == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(sample_counts(curve, 0.0, 1), std::invalid_argument);
}

TEST_CASE("xoshiro stream sanity") {
    Xoshiro256pp rng(123);
    Xoshiro256pp rng2(123);
    for (int i = 0; i < 16; ++i)
        CHECK(rng.next() == rng2.next());
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }

    // both sampler regimes track mean and variance
    for (double mean : {3.0, 40.0}) {
        double sum = 0.0, sum2 = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(poisson_sample(rng, mean));
            sum += k;
            sum2 += k * k;
        }
        const double avg = sum / n;
        const double var = sum2 / n - avg * avg;
        CHECK(avg == doctest::Approx(mean).epsilon(0.05));
        CHECK(var == doctest::Approx(mean).epsilon(0.1));
    }
}

TEST_CASE("entangled reference probabilities") {
    CHECK(entangled_reference(0.0, 0.0).p_ab == doctest::Approx(0.0));
    CHECK(entangled_reference(0.0, 0.0).p_a == doctest::Approx(0.5));
    CHECK(entangled_reference(0.0, pi / 2.0).p_ab == doctest::Approx(0.5));
    CHECK(entangled_reference(0.0, 0.0).p_a ==
          doctest::Approx(entangled_reference(0.0, 1.234).p_a));
}
