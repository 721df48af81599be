#include "fisim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "fisim/rng.hpp"

namespace fisim {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct LinearFit {
    double c = 0.0;  // baseline
    double b1 = 0.0; // cos coefficient
    double b2 = 0.0; // sin coefficient
    double sse = 0.0;
    bool ok = false;
};

// Solves the 3x3 normal equations for y = c + b1*cos(w x) + b2*sin(w x).
LinearFit solve_at_period(const std::vector<double>& x, const std::vector<double>& y,
                          double period) {
    const double w = two_pi / period;
    double s[3][3] = {};
    double rhs[3] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v[3] = {1.0, std::cos(w * x[i]), std::sin(w * x[i])};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += v[r] * y[i];
            for (int col = 0; col < 3; ++col)
                s[r][col] += v[r] * v[col];
        }
    }

    // Gaussian elimination with partial pivoting.
    double m[3][4];
    for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col)
            m[r][col] = s[r][col];
        m[r][3] = rhs[r];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col]))
                pivot = r;
        if (std::abs(m[pivot][col]) < 1e-300)
            return {};
        if (pivot != col)
            for (int k = 0; k < 4; ++k)
                std::swap(m[pivot][k], m[col][k]);
        for (int r = 0; r < 3; ++r) {
            if (r == col)
                continue;
            const double f = m[r][col] / m[col][col];
            for (int k = col; k < 4; ++k)
                m[r][k] -= f * m[col][k];
        }
    }

    LinearFit fit;
    fit.c = m[0][3] / m[0][0];
    fit.b1 = m[1][3] / m[1][1];
    fit.b2 = m[2][3] / m[2][2];
    fit.sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double model =
            fit.c + fit.b1 * std::cos(w * x[i]) + fit.b2 * std::sin(w * x[i]);
        const double r = y[i] - model;
        fit.sse += r * r;
    }
    fit.ok = true;
    return fit;
}

double sse_at(const std::vector<double>& x, const std::vector<double>& y, double period) {
    const LinearFit fit = solve_at_period(x, y, period);
    return fit.ok ? fit.sse : std::numeric_limits<double>::infinity();
}

// Poisson-propagated variance of V = A/C through the linear subproblem at
// fixed period: Cov(theta) = S^-1 M S^-1 with M = sum y_i v_i v_i^T.
double visibility_sigma(const std::vector<double>& x, const std::vector<double>& y,
                        double period, const LinearFit& fit) {
    const double w = two_pi / period;
    double s[3][3] = {};
    double m[3][3] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v[3] = {1.0, std::cos(w * x[i]), std::sin(w * x[i])};
        const double var = std::max(y[i], 0.0);
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col) {
                s[r][col] += v[r] * v[col];
                m[r][col] += var * v[r] * v[col];
            }
    }

    // invert s (symmetric 3x3) via adjugate
    double inv[3][3];
    const double det =
        s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) -
        s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0]) +
        s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
    if (std::abs(det) < 1e-300)
        return 0.0;
    inv[0][0] = (s[1][1] * s[2][2] - s[1][2] * s[2][1]) / det;
    inv[0][1] = (s[0][2] * s[2][1] - s[0][1] * s[2][2]) / det;
    inv[0][2] = (s[0][1] * s[1][2] - s[0][2] * s[1][1]) / det;
    inv[1][0] = (s[1][2] * s[2][0] - s[1][0] * s[2][2]) / det;
    inv[1][1] = (s[0][0] * s[2][2] - s[0][2] * s[2][0]) / det;
    inv[1][2] = (s[0][2] * s[1][0] - s[0][0] * s[1][2]) / det;
    inv[2][0] = (s[1][0] * s[2][1] - s[1][1] * s[2][0]) / det;
    inv[2][1] = (s[0][1] * s[2][0] - s[0][0] * s[2][1]) / det;
    inv[2][2] = (s[0][0] * s[1][1] - s[0][1] * s[1][0]) / det;

    double cov[3][3] = {};
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    acc += inv[r][a] * m[a][b] * inv[b][col];
            cov[r][col] = acc;
        }

    const double amplitude = std::hypot(fit.b1, fit.b2);
    double g[3];
    if (amplitude > 0.0) {
        g[0] = -amplitude / (fit.c * fit.c);
        g[1] = fit.b1 / (amplitude * fit.c);
        g[2] = fit.b2 / (amplitude * fit.c);
    } else {
        // flat curve: direction of the amplitude is undefined, report the
        // rms spread of the two quadratures
        return std::sqrt(std::max(cov[1][1] + cov[2][2], 0.0)) / fit.c;
    }
    double var = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col)
            var += g[r] * cov[r][col] * g[col];
    return std::sqrt(std::max(var, 0.0));
}

} // namespace

double position_to_phase(double delta_x_nm, double wavelength_nm, int passes,
                         int multiplicity) {
    if (!(wavelength_nm > 0.0))
        throw std::invalid_argument("wavelength must be positive");
    if (passes < 1)
        throw std::invalid_argument("passes must be >= 1");
    if (multiplicity < 1)
        throw std::invalid_argument("multiplicity must be >= 1");
    return two_pi * passes * multiplicity * delta_x_nm / wavelength_nm;
}

ScanCurve scan(const Experiment& exp, const ScanRequest& req) {
    if (req.grid.empty())
        throw std::invalid_argument("scan grid is empty");
    for (std::size_t i = 1; i < req.grid.size(); ++i)
        if (!(req.grid[i] > req.grid[i - 1]))
            throw std::invalid_argument("scan grid must be strictly increasing");
    if (exp.named_phases.find(req.target) == exp.named_phases.end())
        throw std::invalid_argument("unknown phase target '" + req.target + "'");
    if (req.x_kind == XKind::position && !(req.wavelength > 0.0))
        throw std::invalid_argument("position scans need a positive wavelength");

    ScanCurve curve;
    curve.x = req.grid;
    curve.x_kind = req.x_kind;
    curve.pattern = req.pattern;
    curve.y.resize(req.grid.size());

    auto evaluate = [&](double x) {
        const double phase = req.x_kind == XKind::position
                                 ? position_to_phase(x, req.wavelength, 2, req.multiplicity)
                                 : x;
        Experiment point = exp;
        set_named_phase(point, req.target, phase);
        const QuantumState state = run_pipeline(point);
        return click_probability(state, req.pattern, point.detectors, point.detector_model)
            .coeff(req.order);
    };

    const int jobs = std::max(1, req.jobs);
    if (jobs == 1 || req.grid.size() < 2) {
        for (std::size_t i = 0; i < req.grid.size(); ++i)
            curve.y[i] = evaluate(req.grid[i]);
        return curve;
    }

    std::vector<std::thread> workers;
    const std::size_t n = req.grid.size();
    const std::size_t chunk = (n + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
        const std::size_t begin = j * chunk;
        if (begin >= n)
            break;
        const std::size_t end = std::min(n, begin + chunk);
        workers.emplace_back([&, begin, end]() {
            for (std::size_t i = begin; i < end; ++i)
                curve.y[i] = evaluate(req.grid[i]);
        });
    }
    for (auto& worker : workers)
        worker.join();
    return curve;
}

FitResult fit_sinusoid(const ScanCurve& curve, const FitOptions& options) {
    const auto& x = curve.x;
    const auto& y = curve.y;
    if (x.size() != y.size())
        throw std::invalid_argument("curve x/y size mismatch");
    if (x.size() < 4)
        throw std::invalid_argument("sinusoid fit needs at least 4 points");
    const double span = x.back() - x.front();
    if (!(span > 0.0))
        throw std::invalid_argument("curve x must be increasing");

    const double mean_dx = span / static_cast<double>(x.size() - 1);
    double period_min = options.period_min > 0.0 ? options.period_min : 2.5 * mean_dx;
    double period_max = options.period_max > 0.0 ? options.period_max : 2.0 * span;
    if (!(period_max > period_min))
        throw std::invalid_argument("invalid period search range");
    const int grid = std::max(8, options.period_grid);

    int best = -1;
    double best_sse = std::numeric_limits<double>::infinity();
    std::vector<double> periods(grid);
    for (int i = 0; i < grid; ++i) {
        periods[i] = period_min + (period_max - period_min) * i / (grid - 1);
        const double sse = sse_at(x, y, periods[i]);
        if (sse < best_sse) {
            best_sse = sse;
            best = i;
        }
    }
    if (best < 0)
        throw DegenerateFitError("period search failed");

    // Golden-section refinement inside the bracketing grid interval.
    double lo = periods[std::max(0, best - 1)];
    double hi = periods[std::min(grid - 1, best + 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double p1 = hi - gr * (hi - lo);
    double p2 = lo + gr * (hi - lo);
    double f1 = sse_at(x, y, p1);
    double f2 = sse_at(x, y, p2);
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * hi; ++iter) {
        if (f1 < f2) {
            hi = p2;
            p2 = p1;
            f2 = f1;
            p1 = hi - gr * (hi - lo);
            f1 = sse_at(x, y, p1);
        } else {
            lo = p1;
            p1 = p2;
            f1 = f2;
            p2 = lo + gr * (hi - lo);
            f2 = sse_at(x, y, p2);
        }
    }
    const double period = 0.5 * (lo + hi);
    const LinearFit fit = solve_at_period(x, y, period);
    if (!fit.ok)
        throw DegenerateFitError("singular fit at refined period");
    if (!(fit.c > 0.0))
        throw DegenerateFitError("nonpositive fitted baseline");

    const double amplitude = std::hypot(fit.b1, fit.b2);
    double phase_offset = std::atan2(-fit.b2, fit.b1);

    FitResult result;
    result.visibility = amplitude / fit.c;
    result.period = period;
    result.phase_offset = phase_offset;
    result.baseline = fit.c;
    result.visibility_sigma = visibility_sigma(x, y, period, fit);
    return result;
}

double predicted_visibility_fourfold(double alpha, double T) {
    if (!(alpha >= 0.0))
        throw std::invalid_argument("alpha must be >= 0");
    if (!(T >= 0.0 && T <= 1.0))
        throw std::invalid_argument("T outside [0,1]");
    const double at = alpha * T;
    return 2.0 * at / (1.0 + at * at);
}

double predicted_visibility_threefold(double alpha, double T) {
    if (!(alpha >= 0.0))
        throw std::invalid_argument("alpha must be >= 0");
    if (!(T >= 0.0 && T <= 1.0))
        throw std::invalid_argument("T outside [0,1]");
    return 2.0 * alpha * T / (alpha * alpha + 3.0);
}

double invert_visibility_to_T(double visibility) {
    if (!(visibility > 0.0 && visibility <= 1.0))
        throw std::invalid_argument("visibility outside (0,1]");
    const double discriminant = std::max(0.0, 1.0 - visibility * visibility);
    return (1.0 - std::sqrt(discriminant)) / visibility;
}

AlphaEstimate estimate_alpha(const SourceImbalanceTable& table) {
    AlphaEstimate estimate;
    for (std::size_t i = 0; i < table.sources.size(); ++i) {
        const auto& rates = table.sources[i];
        if (!(rates.before > 0.0) || !(rates.after > 0.0))
            throw std::invalid_argument("source rates must be positive");
        estimate.q[i] = rates.after / rates.before;
    }
    if (!(table.T1 > 0.0 && table.T1 <= 1.0) || !(table.T2 > 0.0 && table.T2 <= 1.0))
        throw std::invalid_argument("T1/T2 outside (0,1]");
    estimate.alpha = std::sqrt(estimate.q[0] * estimate.q[1] /
                               (estimate.q[2] * estimate.q[3])) *
                     table.T1 * table.T2;
    estimate.predicted_V = predicted_visibility_fourfold(estimate.alpha, 1.0);
    return estimate;
}

ScanCurve sample_counts(const ScanCurve& curve, double counts_scale,
                        std::uint64_t seed) {
    if (!(counts_scale > 0.0))
        throw std::invalid_argument("counts_scale must be positive");
    Xoshiro256pp rng(seed);
    ScanCurve sampled = curve;
    for (auto& value : sampled.y)
        value = static_cast<double>(poisson_sample(rng, value * counts_scale));
    return sampled;
}

EntangledReference entangled_reference(double alpha_angle, double beta_angle) {
    const double s = std::sin(alpha_angle + beta_angle);
    return EntangledReference{0.5 * s * s, 0.5};
}

} // namespace fisim
