#include "fisim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fisim {

namespace {

using nlohmann::json;

const json& field(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ValidationError(path + "." + key, "missing required field");
    return *it;
}

double as_number(const json& value, const std::string& path) {
    if (!value.is_number())
        throw ValidationError(path, "expected a number");
    return value.get<double>();
}

int as_int(const json& value, const std::string& path) {
    if (!value.is_number_integer())
        throw ValidationError(path, "expected an integer");
    return value.get<int>();
}

std::string as_string(const json& value, const std::string& path) {
    if (!value.is_string())
        throw ValidationError(path, "expected a string");
    return value.get<std::string>();
}

bool as_bool(const json& value, const std::string& path) {
    if (!value.is_boolean())
        throw ValidationError(path, "expected a boolean");
    return value.get<bool>();
}

Element parse_element(const json& jelem, const std::string& path,
                      std::size_t loss_count, std::string* name_out) {
    if (!jelem.is_object())
        throw ValidationError(path, "expected an object");
    const std::string type = as_string(field(jelem, path, "type"), path + ".type");

    if (auto it = jelem.find("name"); it != jelem.end()) {
        if (type != "source" && type != "phase")
            throw ValidationError(path + ".name",
                                  "only sources and phase shifters can be scan targets");
        *name_out = as_string(*it, path + ".name");
    }

    if (type == "source") {
        PairSource src;
        src.signal_mode = as_string(field(jelem, path, "signal_mode"), path + ".signal_mode");
        src.idler_mode = as_string(field(jelem, path, "idler_mode"), path + ".idler_mode");
        if (auto it = jelem.find("pump_phase"); it != jelem.end())
            src.pump_phase = as_number(*it, path + ".pump_phase");
        if (auto it = jelem.find("gain_scale"); it != jelem.end())
            src.gain_scale = as_number(*it, path + ".gain_scale");
        if (!(src.gain_scale >= 0.0 && src.gain_scale <= 1.0))
            throw ValidationError(path + ".gain_scale", "outside [0,1]");
        return src;
    }
    if (type == "phase") {
        PhaseShift shift;
        shift.mode = as_string(field(jelem, path, "mode"), path + ".mode");
        shift.phase = as_number(field(jelem, path, "phase"), path + ".phase");
        return shift;
    }
    if (type == "swap") {
        Swap swap;
        swap.mode_a = as_string(field(jelem, path, "mode_a"), path + ".mode_a");
        swap.mode_b = as_string(field(jelem, path, "mode_b"), path + ".mode_b");
        return swap;
    }
    if (type == "loss") {
        Loss loss;
        loss.mode = as_string(field(jelem, path, "mode"), path + ".mode");
        loss.transmissivity =
            as_number(field(jelem, path, "transmissivity"), path + ".transmissivity");
        if (!(loss.transmissivity >= 0.0 && loss.transmissivity <= 1.0))
            throw ValidationError(path + ".transmissivity", "outside [0,1]");
        if (auto it = jelem.find("env_mode"); it != jelem.end())
            loss.env_mode = as_string(*it, path + ".env_mode");
        else
            loss.env_mode = "env:loss" + std::to_string(loss_count);
        return loss;
    }
    throw ValidationError(path + ".type", "unknown element type '" + type + "'");
}

Geometry parse_geometry(const json& jgeom, const std::string& path) {
    if (!jgeom.is_object())
        throw ValidationError(path, "expected an object");
    Geometry geom;
    geom.l_sp1 = as_number(field(jgeom, path, "l_sp1"), path + ".l_sp1");
    geom.l_sp2 = as_number(field(jgeom, path, "l_sp2"), path + ".l_sp2");
    geom.l_cp = as_number(field(jgeom, path, "l_cp"), path + ".l_cp");
    geom.l_si = as_number(field(jgeom, path, "l_si"), path + ".l_si");
    geom.l_ci = as_number(field(jgeom, path, "l_ci"), path + ".l_ci");
    geom.l_ss = as_number(field(jgeom, path, "l_ss"), path + ".l_ss");
    geom.l_ss1 = as_number(field(jgeom, path, "l_ss1"), path + ".l_ss1");
    geom.l_ss2 = as_number(field(jgeom, path, "l_ss2"), path + ".l_ss2");
    geom.l_bd = as_number(field(jgeom, path, "l_BD"), path + ".l_BD");
    const double lengths[] = {geom.l_sp1, geom.l_sp2, geom.l_cp, geom.l_si, geom.l_ci,
                              geom.l_ss,  geom.l_ss1, geom.l_ss2, geom.l_bd};
    for (double l : lengths)
        if (!(l >= 0.0))
            throw ValidationError(path, "lengths must be >= 0");
    return geom;
}

ScanSpec parse_scan(const json& jscan, const std::string& path) {
    if (!jscan.is_object())
        throw ValidationError(path, "expected an object");
    ScanSpec spec;
    if (auto it = jscan.find("target"); it != jscan.end())
        spec.target = as_string(*it, path + ".target");
    if (auto it = jscan.find("from"); it != jscan.end())
        spec.from = as_number(*it, path + ".from");
    if (auto it = jscan.find("to"); it != jscan.end())
        spec.to = as_number(*it, path + ".to");
    if (auto it = jscan.find("steps"); it != jscan.end())
        spec.steps = as_int(*it, path + ".steps");
    if (auto it = jscan.find("order"); it != jscan.end())
        spec.order = as_int(*it, path + ".order");
    if (auto it = jscan.find("positions"); it != jscan.end())
        spec.positions = as_bool(*it, path + ".positions");
    if (auto it = jscan.find("wavelength"); it != jscan.end())
        spec.wavelength = as_number(*it, path + ".wavelength");
    if (auto it = jscan.find("multiplicity"); it != jscan.end())
        spec.multiplicity = as_int(*it, path + ".multiplicity");
    if (auto it = jscan.find("pattern"); it != jscan.end()) {
        if (!it->is_array())
            throw ValidationError(path + ".pattern", "expected an array");
        for (const auto& entry : *it)
            spec.pattern.push_back(as_string(entry, path + ".pattern"));
    }
    if (auto it = jscan.find("forbid"); it != jscan.end()) {
        if (!it->is_array())
            throw ValidationError(path + ".forbid", "expected an array");
        for (const auto& entry : *it)
            spec.forbid.push_back(as_string(entry, path + ".forbid"));
    }
    return spec;
}

json element_to_json(const Element& element, const std::string& name) {
    json j;
    if (const auto* src = std::get_if<PairSource>(&element)) {
        j["type"] = "source";
        j["signal_mode"] = src->signal_mode;
        j["idler_mode"] = src->idler_mode;
        j["pump_phase"] = src->pump_phase;
        j["gain_scale"] = src->gain_scale;
    } else if (const auto* ph = std::get_if<PhaseShift>(&element)) {
        j["type"] = "phase";
        j["mode"] = ph->mode;
        j["phase"] = ph->phase;
    } else if (const auto* sw = std::get_if<Swap>(&element)) {
        j["type"] = "swap";
        j["mode_a"] = sw->mode_a;
        j["mode_b"] = sw->mode_b;
    } else if (const auto* loss = std::get_if<Loss>(&element)) {
        j["type"] = "loss";
        j["mode"] = loss->mode;
        j["transmissivity"] = loss->transmissivity;
        j["env_mode"] = loss->env_mode;
    }
    if (!name.empty())
        j["name"] = name;
    return j;
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

} // namespace

ExperimentDoc parse_experiment(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ValidationError("$", "expected a top-level object");

    ExperimentDoc result;
    Experiment& exp = result.experiment;

    const json& jmodes = field(doc, "$", "modes");
    if (!jmodes.is_array() || jmodes.empty())
        throw ValidationError("$.modes", "expected a nonempty array");
    for (std::size_t i = 0; i < jmodes.size(); ++i)
        exp.modes.push_back(as_string(jmodes[i], "$.modes[" + std::to_string(i) + "]"));

    if (auto it = doc.find("max_pairs"); it != doc.end())
        exp.max_pairs = as_int(*it, "$.max_pairs");
    if (exp.max_pairs < 0)
        throw ValidationError("$.max_pairs", "must be >= 0");

    if (auto it = doc.find("detector_model"); it != doc.end()) {
        const std::string model = as_string(*it, "$.detector_model");
        if (model == "threshold")
            exp.detector_model = DetectorModel::threshold;
        else if (model == "number_resolving")
            exp.detector_model = DetectorModel::number_resolving;
        else
            throw ValidationError("$.detector_model",
                                  "expected 'threshold' or 'number_resolving'");
    }

    const json& jelements = field(doc, "$", "elements");
    if (!jelements.is_array())
        throw ValidationError("$.elements", "expected an array");
    std::size_t loss_count = 0;
    for (std::size_t i = 0; i < jelements.size(); ++i) {
        const std::string path = "$.elements[" + std::to_string(i) + "]";
        std::string name;
        Element element = parse_element(jelements[i], path, loss_count, &name);
        if (std::holds_alternative<Loss>(element))
            ++loss_count;
        exp.pipeline.push_back(std::move(element));
        if (!name.empty())
            exp.named_phases[name].push_back(i);
    }

    auto jdet = doc.find("detectors");
    if (jdet == doc.end() || !jdet->is_object() || jdet->empty())
        throw ValidationError("$.detectors", "no detectors declared");
    for (const auto& [id, jmode] : jdet->items())
        exp.detectors[id] = as_string(jmode, "$.detectors." + id);

    if (auto it = doc.find("geometry"); it != doc.end())
        result.geometry = parse_geometry(*it, "$.geometry");
    if (auto it = doc.find("scan"); it != doc.end())
        result.scan = parse_scan(*it, "$.scan");

    try {
        validate_experiment(exp);
    } catch (const std::invalid_argument& e) {
        throw ValidationError("$", e.what());
    }
    return result;
}

ExperimentDoc load_experiment(const std::string& file_path) {
    return parse_experiment(read_file(file_path));
}

std::string serialize_experiment(const ExperimentDoc& doc) {
    const Experiment& exp = doc.experiment;
    std::vector<std::string> names(exp.pipeline.size());
    for (const auto& [name, indices] : exp.named_phases)
        for (std::size_t idx : indices)
            names[idx] = name;

    json j;
    j["modes"] = exp.modes;
    j["max_pairs"] = exp.max_pairs;
    j["detector_model"] = exp.detector_model == DetectorModel::threshold
                              ? "threshold"
                              : "number_resolving";
    j["elements"] = json::array();
    for (std::size_t i = 0; i < exp.pipeline.size(); ++i)
        j["elements"].push_back(element_to_json(exp.pipeline[i], names[i]));
    j["detectors"] = json::object();
    for (const auto& [id, mode] : exp.detectors)
        j["detectors"][id] = mode;

    if (doc.geometry) {
        const Geometry& g = *doc.geometry;
        j["geometry"] = {{"l_sp1", g.l_sp1}, {"l_sp2", g.l_sp2}, {"l_cp", g.l_cp},
                         {"l_si", g.l_si},   {"l_ci", g.l_ci},   {"l_ss", g.l_ss},
                         {"l_ss1", g.l_ss1}, {"l_ss2", g.l_ss2}, {"l_BD", g.l_bd}};
    }
    if (doc.scan) {
        const ScanSpec& s = *doc.scan;
        json jscan = json::object();
        if (s.target)
            jscan["target"] = *s.target;
        if (s.from)
            jscan["from"] = *s.from;
        if (s.to)
            jscan["to"] = *s.to;
        if (s.steps)
            jscan["steps"] = *s.steps;
        if (s.order)
            jscan["order"] = *s.order;
        if (s.positions)
            jscan["positions"] = true;
        if (s.wavelength)
            jscan["wavelength"] = *s.wavelength;
        if (s.multiplicity)
            jscan["multiplicity"] = *s.multiplicity;
        if (!s.pattern.empty())
            jscan["pattern"] = s.pattern;
        if (!s.forbid.empty())
            jscan["forbid"] = s.forbid;
        j["scan"] = jscan;
    }
    return j.dump(2) + "\n";
}

std::string serialize_state(const QuantumState& state) {
    std::vector<const FockTerm*> sorted;
    sorted.reserve(state.terms.size());
    for (const auto& term : state.terms)
        sorted.push_back(&term);
    std::sort(sorted.begin(), sorted.end(),
              [](const FockTerm* a, const FockTerm* b) {
                  return a->occupation < b->occupation;
              });

    json j = json::array();
    for (const FockTerm* term : sorted) {
        json occupation = json::object();
        for (const auto& [mode, n] : term->occupation)
            occupation[mode] = n;
        j.push_back({{"occupation", occupation},
                     {"re", term->amplitude.real()},
                     {"im", term->amplitude.imag()},
                     {"order", term->pair_order}});
    }
    return j.dump(2) + "\n";
}

QuantumState parse_state(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_array())
        throw ValidationError("$", "expected an array of terms");
    QuantumState state;
    state.max_pairs = 0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "$[" + std::to_string(i) + "]";
        const json& jterm = j[i];
        FockTerm term;
        const json& occupation = field(jterm, path, "occupation");
        if (!occupation.is_object())
            throw ValidationError(path + ".occupation", "expected an object");
        for (const auto& [mode, count] : occupation.items()) {
            const int n = as_int(count, path + ".occupation." + mode);
            if (n <= 0)
                throw ValidationError(path + ".occupation." + mode,
                                      "photon numbers must be positive");
            term.occupation[mode] = n;
        }
        term.amplitude = {as_number(field(jterm, path, "re"), path + ".re"),
                          as_number(field(jterm, path, "im"), path + ".im")};
        term.pair_order = as_int(field(jterm, path, "order"), path + ".order");
        state.max_pairs = std::max(state.max_pairs, term.pair_order);
        state.terms.push_back(std::move(term));
    }
    return state;
}

std::string curve_to_csv(const ScanCurve& curve) {
    std::string pattern;
    bool first = true;
    for (const auto& id : curve.pattern.required) {
        if (!first)
            pattern += '+';
        pattern += id;
        first = false;
    }
    for (const auto& id : curve.pattern.forbidden)
        pattern += "-" + id;

    const char* kind = curve.x_kind == XKind::position ? "position" : "phase";
    std::ostringstream out;
    out << "x,x_kind,y,pattern\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        out << format_double(curve.x[i]) << ',' << kind << ','
            << format_double(curve.y[i]) << ',' << pattern << '\n';
    return out.str();
}

ScanCurve curve_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("line 1", "empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "x,x_kind,y,pattern")
        throw ValidationError("line 1", "expected header 'x,x_kind,y,pattern'");

    ScanCurve curve;
    bool have_kind = false;
    int line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(line_number);

        std::array<std::string, 4> cell;
        std::size_t start = 0;
        for (int c = 0; c < 4; ++c) {
            const std::size_t comma = line.find(',', start);
            if (c < 3 && comma == std::string::npos)
                throw ValidationError(where, "expected 4 comma-separated fields");
            cell[c] = line.substr(start, comma == std::string::npos
                                             ? std::string::npos
                                             : comma - start);
            start = comma + 1;
        }

        try {
            curve.x.push_back(std::stod(cell[0]));
            curve.y.push_back(std::stod(cell[2]));
        } catch (const std::exception&) {
            throw ValidationError(where, "x and y must be numbers");
        }

        XKind kind;
        if (cell[1] == "position")
            kind = XKind::position;
        else if (cell[1] == "phase")
            kind = XKind::phase;
        else
            throw ValidationError(where, "x_kind must be 'position' or 'phase'");
        if (!have_kind) {
            curve.x_kind = kind;
            have_kind = true;
            // pattern column: required ids joined by '+', forbidden after '-'
            const std::string& pat = cell[3];
            std::size_t pos = 0;
            bool forbidden = false;
            std::string token;
            auto flush = [&]() {
                if (token.empty())
                    return;
                if (forbidden)
                    curve.pattern.forbidden.insert(token);
                else
                    curve.pattern.required.insert(token);
                token.clear();
            };
            for (; pos < pat.size(); ++pos) {
                if (pat[pos] == '+') {
                    flush();
                } else if (pat[pos] == '-') {
                    flush();
                    forbidden = true;
                } else {
                    token += pat[pos];
                }
            }
            flush();
        } else if (kind != curve.x_kind) {
            throw ValidationError(where, "mixed x_kind values");
        }
    }
    if (curve.x.empty())
        throw ValidationError("$", "no data rows");
    return curve;
}

std::string fit_result_to_json(const FitResult& fit) {
    json j;
    j["visibility"] = fit.visibility;
    j["period"] = fit.period;
    j["phase_offset"] = fit.phase_offset;
    j["baseline"] = fit.baseline;
    j["visibility_sigma"] = fit.visibility_sigma;
    return j.dump(2) + "\n";
}

SourceImbalanceTable imbalance_table_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ValidationError("$", "expected a top-level object");
    const json& jsources = field(j, "$", "sources");
    if (!jsources.is_array() || jsources.size() != 4)
        throw ValidationError("$.sources", "expected an array of 4 sources");
    SourceImbalanceTable table;
    for (std::size_t i = 0; i < 4; ++i) {
        const std::string path = "$.sources[" + std::to_string(i) + "]";
        table.sources[i].before = as_number(field(jsources[i], path, "N1"), path + ".N1");
        table.sources[i].after = as_number(field(jsources[i], path, "N2"), path + ".N2");
        if (!(table.sources[i].before > 0.0) || !(table.sources[i].after > 0.0))
            throw ValidationError(path, "rates must be positive");
    }
    table.T1 = as_number(field(j, "$", "T1"), "$.T1");
    table.T2 = as_number(field(j, "$", "T2"), "$.T2");
    if (!(table.T1 > 0.0 && table.T1 <= 1.0) || !(table.T2 > 0.0 && table.T2 <= 1.0))
        throw ValidationError("$", "T1/T2 outside (0,1]");
    return table;
}

SourceImbalanceTable load_imbalance_table(const std::string& file_path) {
    return imbalance_table_from_json(read_file(file_path));
}

std::string arrival_report_to_json(const ArrivalReport& report) {
    json j;
    j["swapped"] = report.swapped;
    j["times"] = {{"t_i1", report.t_i1},
                  {"t_s1", report.t_s1},
                  {"t_p3", report.t_p3},
                  {"t_i1_swapped", report.t_i1_swapped},
                  {"t_i2_swapped", report.t_i2_swapped},
                  {"t_s2", report.t_s2},
                  {"t_p4", report.t_p4}};
    j["conditions"] = json::array();
    for (const auto& cond : report.conditions)
        j["conditions"].push_back({{"name", cond.name},
                                   {"actual_mm", cond.actual_mm},
                                   {"required_mm", cond.required_mm},
                                   {"delta_mm", cond.delta_mm},
                                   {"satisfied", cond.satisfied}});
    j["path_matches"] = json::array();
    for (const auto& match : report.path_matches)
        j["path_matches"].push_back({{"name", match.name},
                                     {"delta_seconds", match.delta_seconds},
                                     {"matched", match.matched}});
    j["all_conditions_satisfied"] = report.all_conditions_satisfied;
    j["all_paths_matched"] = report.all_paths_matched;
    return j.dump(2) + "\n";
}

std::string read_file(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in)
        throw ValidationError(file_path, "cannot read file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace fisim
