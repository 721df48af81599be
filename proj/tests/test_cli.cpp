#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fisim/io.hpp"

namespace {

const std::string cli = FISIM_CLI_PATH;
const std::string data_dir = FISIM_DATA_DIR;

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_command(const std::string& args, bool merge_stderr = false) {
    const std::string command = cli + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    std::array<char, 4096> buffer;
    std::size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
        result.output.append(buffer.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("state command prints the golden cascade state") {
    const CommandResult result = run_command("state " + data_dir + "/canonical.experiment.json");
    CHECK(result.exit_code == 0);
    CHECK(result.output == fisim::read_file(data_dir + "/golden/canonical_state.json"));
}

TEST_CASE("broken files exit nonzero with a validation report") {
    const std::string bad = temp_path("fisim_bad.experiment.json");
    std::ofstream(bad) << R"({"modes": ["1"], "elements": [], "detectors": {}})";
    const CommandResult result = run_command("state " + bad, true);
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("error:") != std::string::npos);
    CHECK(result.output.find("detectors") != std::string::npos);

    const CommandResult missing = run_command("state /no/such/file.json", true);
    CHECK(missing.exit_code == 1);
}

TEST_CASE("sampled scans are bit-identical for a fixed seed") {
    const std::string args = "scan " + data_dir +
                             "/canonical.experiment.json --sample 50 --seed 7";
    const CommandResult a = run_command(args);
    const CommandResult b = run_command(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.substr(0, 21) == "x,x_kind,y,pattern\n0");

    const CommandResult other = run_command(args + "7");
    CHECK(other.output != a.output);
}

TEST_CASE("scan piped into fit recovers the ideal fringe") {
    const std::string csv = temp_path("fisim_fourfold.csv");
    const CommandResult scan =
        run_command("scan " + data_dir + "/canonical.experiment.json -o " + csv);
    REQUIRE(scan.exit_code == 0);

    const CommandResult fit = run_command("fit " + csv);
    REQUIRE(fit.exit_code == 0);
    const auto j = nlohmann::json::parse(fit.output);
    CHECK(j.at("visibility").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j.at("period").get<double>() == doctest::Approx(6.283185307).epsilon(1e-6));
    CHECK(j.at("baseline").get<double>() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("three-fold scans fit to half visibility") {
    const std::string csv = temp_path("fisim_threefold.csv");
    const CommandResult scan = run_command(
        "scan " + data_dir + "/canonical.experiment.json --pattern 1,3,4 -o " + csv);
    REQUIRE(scan.exit_code == 0);
    const CommandResult fit = run_command("fit " + csv);
    REQUIRE(fit.exit_code == 0);
    const auto j = nlohmann::json::parse(fit.output);
    CHECK(j.at("visibility").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("vt reports engine and closed form side by side") {
    const CommandResult result = run_command(
        "vt " + data_dir +
        "/canonical.experiment.json --pattern 1,2,3,4 --T-grid 0.5:1.0:3 --steps 32");
    REQUIRE(result.exit_code == 0);
    std::istringstream lines(result.output);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "T,engine_visibility,predicted_visibility");
    int rows = 0;
    while (std::getline(lines, line)) {
        double T = 0.0, engine = 0.0, predicted = 0.0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &T, &engine, &predicted) == 3);
        CHECK(engine == doctest::Approx(predicted).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("timing reports an aligned bundled geometry") {
    const CommandResult result =
        run_command("timing " + data_dir + "/canonical.experiment.json");
    REQUIRE(result.exit_code == 0);
    const auto j = nlohmann::json::parse(result.output);
    CHECK(j.at("all_conditions_satisfied").get<bool>());
    CHECK(j.at("all_paths_matched").get<bool>());
}

TEST_CASE("alpha estimates the bundled rate table") {
    const CommandResult result =
        run_command("alpha " + data_dir + "/imbalance_example.json");
    REQUIRE(result.exit_code == 0);
    const auto j = nlohmann::json::parse(result.output);
    CHECK(j.at("alpha").get<double>() == doctest::Approx(0.521).epsilon(0.002));
    CHECK(j.at("predicted_V").get<double>() == doctest::Approx(0.819).epsilon(0.002));
}
