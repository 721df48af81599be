#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fisim/analysis.hpp"
#include "fisim/io.hpp"
#include "fisim/pipeline.hpp"
#include "fisim/timing.hpp"

namespace {

using namespace fisim;

std::vector<double> linspace(double from, double to, int steps) {
    if (steps < 1)
        throw std::invalid_argument("steps must be >= 1");
    if (steps == 1)
        return {from};
    if (!(to > from))
        throw std::invalid_argument("scan range needs to > from");
    std::vector<double> grid(steps);
    for (int i = 0; i < steps; ++i)
        grid[i] = from + (to - from) * i / (steps - 1);
    return grid;
}

std::set<DetectorId> split_ids(const std::string& csv) {
    std::set<DetectorId> ids;
    std::string token;
    for (char c : csv) {
        if (c == ',') {
            if (!token.empty())
                ids.insert(token);
            token.clear();
        } else {
            token += c;
        }
    }
    if (!token.empty())
        ids.insert(token);
    return ids;
}

int default_jobs() {
    if (const char* env = std::getenv("FISIM_JOBS")) {
        const int jobs = std::atoi(env);
        if (jobs >= 1)
            return jobs;
    }
    return 1;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

struct ScanArgs {
    std::string file;
    std::string target;
    std::string pattern;
    std::string forbid;
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
    int order = 0;
    bool positions = false;
    double wavelength = 0.0;
    int multiplicity = 0;
    double sample = 0.0;
    std::uint64_t seed = 0;
    int jobs = 0;
    std::string output;
    bool have_from = false;
    bool have_to = false;
};

ScanRequest build_scan_request(const ExperimentDoc& doc, const ScanArgs& args) {
    const ScanSpec spec = doc.scan.value_or(ScanSpec{});
    ScanRequest req;

    req.target = !args.target.empty() ? args.target : spec.target.value_or("");
    if (req.target.empty())
        throw std::invalid_argument("no scan target: pass --target or add one to the file");

    const double from = args.have_from ? args.from : spec.from.value_or(0.0);
    if (!args.have_from && !spec.from)
        throw std::invalid_argument("no scan start: pass --from or add one to the file");
    double to = args.have_to ? args.to : 0.0;
    if (!args.have_to) {
        if (!spec.to)
            throw std::invalid_argument("no scan end: pass --to or add one to the file");
        to = *spec.to;
    }
    const int steps = args.steps > 0 ? args.steps : spec.steps.value_or(0);
    if (steps < 1)
        throw std::invalid_argument("no step count: pass --steps or add one to the file");
    req.grid = linspace(from, to, steps);

    if (!args.pattern.empty())
        req.pattern.required = split_ids(args.pattern);
    else if (!spec.pattern.empty())
        req.pattern.required = {spec.pattern.begin(), spec.pattern.end()};
    else
        for (const auto& [id, mode] : doc.experiment.detectors)
            req.pattern.required.insert(id);
    if (!args.forbid.empty())
        req.pattern.forbidden = split_ids(args.forbid);
    else if (!spec.forbid.empty())
        req.pattern.forbidden = {spec.forbid.begin(), spec.forbid.end()};

    req.order = args.order > 0 ? args.order
                               : spec.order.value_or(doc.experiment.max_pairs);
    req.x_kind = (args.positions || spec.positions) ? XKind::position : XKind::phase;
    if (req.x_kind == XKind::position) {
        req.wavelength = args.wavelength > 0.0 ? args.wavelength
                                               : spec.wavelength.value_or(0.0);
        if (!(req.wavelength > 0.0))
            throw std::invalid_argument("position scans need --wavelength");
        req.multiplicity =
            args.multiplicity > 0 ? args.multiplicity : spec.multiplicity.value_or(1);
    }
    req.jobs = args.jobs > 0 ? args.jobs : default_jobs();
    return req;
}

int run(int argc, char** argv) {
    CLI::App app{"Perturbative Fock-space simulator for cascaded photon-pair "
                 "interference experiments"};
    app.require_subcommand(1);

    // state
    std::string state_file;
    double state_epsilon = 1e-12;
    auto* cmd_state = app.add_subcommand("state", "Run a pipeline and print its output state");
    cmd_state->add_option("file", state_file, "experiment file")->required();
    cmd_state->add_option("--epsilon", state_epsilon, "amplitude pruning threshold");

    // scan
    ScanArgs scan_args;
    auto* cmd_scan = app.add_subcommand("scan", "Scan a named phase and emit a CSV curve");
    cmd_scan->add_option("file", scan_args.file, "experiment file")->required();
    cmd_scan->add_option("--target", scan_args.target, "named phase to drive");
    cmd_scan->add_option("--pattern", scan_args.pattern, "required detectors, e.g. 1,2,3,4");
    cmd_scan->add_option("--forbid", scan_args.forbid, "forbidden detectors");
    cmd_scan->add_option("--from", scan_args.from, "grid start")
        ->each([&scan_args](const std::string&) { scan_args.have_from = true; });
    cmd_scan->add_option("--to", scan_args.to, "grid end")
        ->each([&scan_args](const std::string&) { scan_args.have_to = true; });
    cmd_scan->add_option("--steps", scan_args.steps, "grid points");
    cmd_scan->add_option("--order", scan_args.order, "pair order to record");
    cmd_scan->add_flag("--positions", scan_args.positions,
                       "grid is mirror position in nm (two passes)");
    cmd_scan->add_option("--wavelength", scan_args.wavelength, "photon wavelength in nm");
    cmd_scan->add_option("--multiplicity", scan_args.multiplicity,
                         "photons sharing the scanned mirror");
    cmd_scan->add_option("--sample", scan_args.sample,
                         "Poisson-sample counts at this scale");
    cmd_scan->add_option("--seed", scan_args.seed, "sampling seed");
    cmd_scan->add_option("--jobs", scan_args.jobs,
                         "worker threads (default $FISIM_JOBS or 1)");
    cmd_scan->add_option("--output,-o", scan_args.output, "output file (default stdout)");

    // fit
    std::string fit_file;
    FitOptions fit_options;
    auto* cmd_fit = app.add_subcommand("fit", "Fit a sinusoid to a CSV curve");
    cmd_fit->add_option("file", fit_file, "curve CSV")->required();
    cmd_fit->add_option("--period-min", fit_options.period_min, "period search lower bound");
    cmd_fit->add_option("--period-max", fit_options.period_max, "period search upper bound");

    // vt
    std::string vt_file;
    std::string vt_pattern;
    std::string vt_grid = "0.1:1.0:10";
    std::string vt_target = "phi_s1";
    std::string vt_loss_mode = "4";
    int vt_steps = 64;
    double vt_alpha = -1.0;
    std::string vt_output;
    auto* cmd_vt = app.add_subcommand(
        "vt", "Visibility vs transmissivity: engine fit and closed form side by side");
    cmd_vt->add_option("file", vt_file, "experiment file")->required();
    cmd_vt->add_option("--pattern", vt_pattern, "required detectors")->required();
    cmd_vt->add_option("--T-grid", vt_grid, "amplitude transmissivities, from:to:count");
    cmd_vt->add_option("--target", vt_target, "scanned phase");
    cmd_vt->add_option("--loss-mode", vt_loss_mode, "mode carrying the loss");
    cmd_vt->add_option("--steps", vt_steps, "scan points per T");
    cmd_vt->add_option("--alpha", vt_alpha,
                       "override the imbalance inferred from the gain scales");
    cmd_vt->add_option("--output,-o", vt_output, "output file (default stdout)");

    // timing
    std::string timing_file;
    double tolerance_um = 1.0;
    auto* cmd_timing = app.add_subcommand("timing", "Check temporal indistinguishability");
    cmd_timing->add_option("file", timing_file, "experiment file with a geometry section")
        ->required();
    cmd_timing->add_option("--tolerance-um", tolerance_um, "alignment tolerance in um");

    // alpha
    std::string alpha_file;
    auto* cmd_alpha = app.add_subcommand(
        "alpha", "Imbalance parameter and predicted visibility from source rates");
    cmd_alpha->add_option("file", alpha_file, "source-rate table JSON")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmd_state->parsed()) {
        const ExperimentDoc doc = load_experiment(state_file);
        std::cout << serialize_state(run_pipeline(doc.experiment, state_epsilon));
        return 0;
    }

    if (cmd_scan->parsed()) {
        const ExperimentDoc doc = load_experiment(scan_args.file);
        const ScanRequest req = build_scan_request(doc, scan_args);
        ScanCurve curve = scan(doc.experiment, req);
        if (scan_args.sample > 0.0)
            curve = sample_counts(curve, scan_args.sample, scan_args.seed);
        write_output(scan_args.output, curve_to_csv(curve));
        return 0;
    }

    if (cmd_fit->parsed()) {
        const ScanCurve curve = curve_from_csv(read_file(fit_file));
        std::cout << fit_result_to_json(fit_sinusoid(curve, fit_options));
        return 0;
    }

    if (cmd_vt->parsed()) {
        const ExperimentDoc doc = load_experiment(vt_file);

        double t_from = 0.0, t_to = 0.0;
        int t_count = 0;
        if (std::sscanf(vt_grid.c_str(), "%lf:%lf:%d", &t_from, &t_to, &t_count) != 3 ||
            t_count < 1)
            throw std::invalid_argument("--T-grid expects from:to:count");

        ClickPattern pattern;
        pattern.required = split_ids(vt_pattern);
        const bool fourfold = pattern.required.size() == 4;
        if (!fourfold && pattern.required.size() != 3)
            throw std::invalid_argument(
                "closed forms exist for 4-detector and 3-detector patterns only");

        // Imbalance from the gain scales: front-pass sources over return-pass.
        std::vector<const PairSource*> sources;
        std::vector<std::size_t> source_indices;
        for (std::size_t i = 0; i < doc.experiment.pipeline.size(); ++i)
            if (const auto* src = std::get_if<PairSource>(&doc.experiment.pipeline[i])) {
                sources.push_back(src);
                source_indices.push_back(i);
            }
        if (sources.size() != 4)
            throw std::invalid_argument("vt expects a four-source experiment");
        double alpha = vt_alpha;
        if (alpha < 0.0)
            alpha = sources[0]->gain_scale * sources[1]->gain_scale /
                    (sources[2]->gain_scale * sources[3]->gain_scale);

        std::ostringstream out;
        out << "T,engine_visibility,predicted_visibility\n";
        for (int i = 0; i < t_count; ++i) {
            const double T =
                t_count == 1 ? t_from : t_from + (t_to - t_from) * i / (t_count - 1);
            Experiment exp = doc.experiment;
            exp.pipeline.insert(exp.pipeline.begin() + source_indices[2],
                                Loss::from_amplitude(vt_loss_mode, T, "env:vt"));
            // shift named-phase indices past the inserted element
            for (auto& [name, indices] : exp.named_phases)
                for (auto& idx : indices)
                    if (idx >= source_indices[2])
                        ++idx;

            ScanRequest req;
            req.target = vt_target;
            req.grid = linspace(
                0.0, 2.0 * std::numbers::pi * (vt_steps - 1.0) / vt_steps, vt_steps);
            req.pattern = pattern;
            req.order = exp.max_pairs;
            req.jobs = default_jobs();
            const FitResult fit = fit_sinusoid(scan(exp, req));
            const double predicted = fourfold ? predicted_visibility_fourfold(alpha, T)
                                              : predicted_visibility_threefold(alpha, T);
            char row[96];
            std::snprintf(row, sizeof(row), "%.10g,%.12g,%.12g\n", T, fit.visibility,
                          predicted);
            out << row;
        }
        write_output(vt_output, out.str());
        return 0;
    }

    if (cmd_timing->parsed()) {
        const ExperimentDoc doc = load_experiment(timing_file);
        if (!doc.geometry)
            throw std::invalid_argument("experiment file has no geometry section");
        std::cout << arrival_report_to_json(
            check_alignment(*doc.geometry, tolerance_um * 1e-3));
        return 0;
    }

    if (cmd_alpha->parsed()) {
        const AlphaEstimate estimate = estimate_alpha(load_imbalance_table(alpha_file));
        nlohmann::json j;
        j["alpha"] = estimate.alpha;
        j["predicted_V"] = estimate.predicted_V;
        j["q"] = estimate.q;
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fisim::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
