#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "xpm");
    std::ostringstream out, err;
    const int code = xpm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(XPM_CONFIG_DIR) + "/" + name; }

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("xpm_test_" + name);
}

} // namespace

TEST_CASE("sweep writes CSV") {
    const auto path = temp_file("fig4.csv");
    const auto r = run({"sweep", "--system", "1", "--case", "eit", "--config", config("fig4.toml"), "--out", path.string(),
                        "--range", "-5:5:11", "--method", "analytic"});
    CHECK(r.code == 0);
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "axis_mhz,field,method,branch,re,im");
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == 22);
    std::filesystem::remove(path);
}

TEST_CASE("sweep to stdout and JSON") {
    auto r = run({"sweep", "--range", "0:1:2"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("axis_mhz", 0) == 0);
    const auto path = temp_file("s.json");
    r = run({"sweep", "--range", "0:1:2", "--out", path.string()});
    CHECK(r.code == 0);
    std::ifstream is(path);
    const auto j = nlohmann::json::parse(is);
    CHECK(j.contains("metadata"));
    std::filesystem::remove(path);
}

TEST_CASE("flux reports equal photon rates") {
    const auto r = run({"flux", "--system", "1", "--config", config("fig4.toml")});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"] == "equal");
    CHECK(j["n_coupling"].get<double>() == doctest::Approx(j["n_signal"].get<double>()).epsilon(1e-12));
}

TEST_CASE("symmetry, classify, validate and compare") {
    auto r = run({"symmetry"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["verdict"] == "symmetric");

    r = run({"classify", "--system", "3"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["label"] == "type3");

    for (const char* sys : {"1", "2", "3"}) {
        r = run({"validate", "--system", sys});
        CHECK(r.code == 0);
        CHECK(nlohmann::json::parse(r.out)["verdict"] == "pass");
    }
    r = run({"validate", "--config", config("fig7.toml")});
    CHECK(r.code == 0);

    r = run({"compare", "--config", config("fig4.toml"), "--range", "-20:20:41"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["fields"].size() == 2);
    CHECK(j["fields"][0]["rel_l2_im"].get<double>() < 0.05);
}

TEST_CASE("flags override the config file") {
    const auto r = run({"sweep", "--config", config("fig4.toml"), "--axis", "probe", "--range", "0:10:3", "--method",
                        "oracle", "--set", "sweep.fields=[\"probe\"]"});
    CHECK(r.code == 0);
    CHECK(r.out.find(",probe,oracle,") != std::string::npos);
    CHECK(r.out.find("lindblad") == std::string::npos);
}

TEST_CASE("usage and validation errors") {
    CHECK(run({"sweep", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"sweep", "--system", "7"}).code == 2);
    CHECK(run({"sweep", "--range", "1:2"}).code == 2);
    CHECK(run({"sweep", "--config", "/nonexistent.toml"}).code == 2);
    CHECK(run({"sweep", "--set", "fields.probe.rabi=loud"}).code == 1);
    CHECK(run({"flux", "--case", "cpt"}).code == 1);
    const auto h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("sweep") != std::string::npos);
}
