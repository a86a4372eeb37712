// Exercises the shared-library C interface end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hybridlab.h"

namespace {

const char* kReferenceText =
    "[scenario]\n"
    "h = 0, 0\n"
    "v = 1, -1\n"
    "H_cm = 0\n"
    "V_cm = q\n"
    "amplitudes = 0.7071067811865476, 0.7071067811865476\n"
    "pointer = 0, 0\n"
    "t_final = 1\n"
    "n_samples = 11\n"
    "mode = collapse\n"
    "[grid]\n"
    "n_q = 64\n"
    "n_p = 64\n"
    "[numerics]\n"
    "dt = 1e-3\n";

struct ConfigHandle {
    hl_config* ptr = nullptr;
    ~ConfigHandle() { hl_config_free(ptr); }
};

struct ReportHandle {
    hl_report* ptr = nullptr;
    ~ReportHandle() { hl_report_free(ptr); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "hybridlab_capi_test";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("version string is exposed") {
    CHECK(std::strlen(hl_version()) > 0);
}

TEST_CASE("config parse, override, serialize") {
    ConfigHandle cfg;
    REQUIRE(hl_config_parse_string(kReferenceText, &cfg.ptr) == HL_OK);
    CHECK(hl_config_set(cfg.ptr, "numerics.dt", "2e-3") == HL_OK);
    char* text = nullptr;
    REQUIRE(hl_config_serialize(cfg.ptr, &text) == HL_OK);
    CHECK(std::string(text).find("0.002") != std::string::npos);
    std::free(text);

    CHECK(hl_config_set(cfg.ptr, "numerics.typo", "1") == HL_ERR_CONFIG);
    CHECK(std::strlen(hl_last_error()) > 0);
}

TEST_CASE("malformed config yields HL_ERR_CONFIG with a message") {
    hl_config* cfg = nullptr;
    CHECK(hl_config_parse_string("[scenario]\nh = zero\n", &cfg) ==
          HL_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::strlen(hl_last_error()) > 0);
}

TEST_CASE("null arguments yield HL_ERR_INVALID") {
    CHECK(hl_config_parse_string(nullptr, nullptr) == HL_ERR_INVALID);
    CHECK(hl_scenario_run(nullptr, nullptr) == HL_ERR_INVALID);
    double v = 0.0;
    CHECK(hl_report_value(nullptr, "nine", 0, "t", &v) == HL_ERR_INVALID);
}

TEST_CASE("scenario run: verdict, samples, field access") {
    ConfigHandle cfg;
    REQUIRE(hl_config_parse_string(kReferenceText, &cfg.ptr) == HL_OK);
    ReportHandle report;
    REQUIRE(hl_scenario_run(cfg.ptr, &report.ptr) == HL_OK);

    CHECK(std::string(hl_report_verdict(report.ptr)) ==
          "seven_rejected_dynamics eight_rejected_positivity nine_accepted");

    size_t n = 0;
    REQUIRE(hl_report_num_samples(report.ptr, &n) == HL_OK);
    CHECK(n == 11);

    double value = 0.0;
    REQUIRE(hl_report_value(report.ptr, "nine", 10, "entropy", &value) == HL_OK);
    CHECK(value == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    REQUIRE(hl_report_value(report.ptr, "eight", 10, "min_eigenvalue", &value) ==
            HL_OK);
    CHECK(value == doctest::Approx(-32.0).epsilon(1e-8));
    REQUIRE(hl_report_value(report.ptr, "seven", 10, "residual", &value) ==
            HL_OK);
    CHECK(value >= 0.5);
    REQUIRE(hl_report_value(report.ptr, "nine", 5, "prob_outcome_2", &value) ==
            HL_OK);
    CHECK(value == doctest::Approx(0.5).epsilon(1e-10));

    CHECK(hl_report_value(report.ptr, "ten", 0, "t", &value) == HL_ERR_INVALID);
    CHECK(hl_report_value(report.ptr, "nine", 99, "t", &value) ==
          HL_ERR_INVALID);
    CHECK(hl_report_value(report.ptr, "nine", 0, "bogus", &value) ==
          HL_ERR_INVALID);
}

TEST_CASE("identical configs produce byte-identical CSV output") {
    const auto dir = temp_dir();
    for (int run = 0; run < 2; ++run) {
        ConfigHandle cfg;
        REQUIRE(hl_config_parse_string(kReferenceText, &cfg.ptr) == HL_OK);
        ReportHandle report;
        REQUIRE(hl_scenario_run(cfg.ptr, &report.ptr) == HL_OK);
        const auto path = dir / ("run" + std::to_string(run) + ".csv");
        REQUIRE(hl_report_write_csv(report.ptr, path.c_str()) == HL_OK);
    }
    const std::string a = slurp((dir / "run0.csv").string());
    const std::string b = slurp((dir / "run1.csv").string());
    REQUIRE(!a.empty());
    CHECK(a == b);
}

TEST_CASE("csv: header schema and the nan entropy sentinel") {
    const auto dir = temp_dir();
    ConfigHandle cfg;
    REQUIRE(hl_config_parse_string(kReferenceText, &cfg.ptr) == HL_OK);
    ReportHandle report;
    REQUIRE(hl_scenario_run(cfg.ptr, &report.ptr) == HL_OK);
    const auto path = dir / "schema.csv";
    REQUIRE(hl_report_write_csv(report.ptr, path.c_str()) == HL_OK);
    const std::string text = slurp(path.string());
    CHECK(text.rfind("t,candidate,residual,purity_defect,min_eigenvalue,"
                     "entropy,prob_outcome_1,prob_outcome_2\n",
                     0) == 0);
    // candidate eight at t > 0 has no defined entropy
    CHECK(text.find(",eight,") != std::string::npos);
    CHECK(text.find("nan") != std::string::npos);
}

TEST_CASE("json report carries verdict, config echo and version") {
    const auto dir = temp_dir();
    ConfigHandle cfg;
    REQUIRE(hl_config_parse_string(kReferenceText, &cfg.ptr) == HL_OK);
    ReportHandle report;
    REQUIRE(hl_scenario_run(cfg.ptr, &report.ptr) == HL_OK);
    const auto path = dir / "report.json";
    REQUIRE(hl_report_write_json(report.ptr, path.c_str()) == HL_OK);
    const std::string text = slurp(path.string());
    CHECK(text.find("\"nine_accepted\": true") != std::string::npos);
    CHECK(text.find("\"version\"") != std::string::npos);
    CHECK(text.find("\"n_q\": 64") != std::string::npos);
    // undefined entropy is JSON null, never NaN
    CHECK(text.find("\"entropy\": null") != std::string::npos);
    CHECK(text.find("nan") == std::string::npos);
}

TEST_CASE("hl_execute drives the non-scenario commands") {
    const auto dir = temp_dir() / "exec";
    const std::string classical_text =
        std::string(kReferenceText) +
        "[classical]\nH = 0.5*q^2 + 0.5*p^2\ninitial = gaussian\n"
        "t = 0.1\nsteps = 100\n";
    ConfigHandle cfg;
    REQUIRE(hl_config_parse_string(classical_text.c_str(), &cfg.ptr) == HL_OK);

    REQUIRE(hl_execute(cfg.ptr, "evolve-classical", dir.c_str()) == HL_OK);
    CHECK(std::filesystem::exists(dir / "classical_final.csv"));
    REQUIRE(hl_execute(cfg.ptr, "evolve-quantum", dir.c_str()) == HL_OK);
    CHECK(std::filesystem::exists(dir / "quantum_final.csv"));
    REQUIRE(hl_execute(cfg.ptr, "evolve-hybrid", dir.c_str()) == HL_OK);
    CHECK(std::filesystem::exists(dir / "hybrid_final.csv"));
    REQUIRE(hl_execute(cfg.ptr, "diagnose", dir.c_str()) == HL_OK);
    CHECK(std::filesystem::exists(dir / "report.json"));

    CHECK(hl_execute(cfg.ptr, "bogus", dir.c_str()) == HL_ERR_CONFIG);
}

TEST_CASE("numerical failures surface as HL_ERR_NUMERICS") {
    ConfigHandle cfg;
    REQUIRE(hl_config_parse_string(kReferenceText, &cfg.ptr) == HL_OK);
    REQUIRE(hl_config_set(cfg.ptr, "numerics.dt", "1.0") == HL_OK);
    ReportHandle report;
    CHECK(hl_scenario_run(cfg.ptr, &report.ptr) == HL_ERR_NUMERICS);
    CHECK(std::string(hl_last_error()).find("suggested") != std::string::npos);
}
