#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "helmix");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = helmix::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Workspace {
    fs::path dir;
    fs::path model;
    Workspace() {
        dir = fs::temp_directory_path() / ("helmix_cli_unit_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        model = dir / "model.ini";
        std::ofstream(model) << "[model]\ntype = volume_additive\nM = 0.0180153, 0.04607\nv00 = 1.807e-5, 5.868e-5\n"
                                "[region]\nT_count = 3\np_count = 3\nx_per_edge = 3\n"
                                "[mixing]\npoints = 5\np = 1e5\n";
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string out(const std::string& sub) const { return (dir / sub).string(); }
};

}  // namespace

TEST_CASE("regime report values") {
    Workspace w;
    const Run r = invoke({"regime", "--model", w.model.string(), "--out", w.out("a")});
    REQUIRE(r.code == 0);
    const json j = json::parse(slurp(w.dir / "a" / "regime.json"));
    CHECK(j["header"]["command"] == "regime");
    CHECK(j["body"]["scaling"]["beta0"].get<double>() == doctest::Approx(6.0651).epsilon(1e-4));
    CHECK(j["body"]["scaling"]["alpha0"].get<double>() == doctest::Approx(0.4587).epsilon(1e-3));
    CHECK(j["body"]["inequality"]["margin"].get<double>() > 0.0);
}

TEST_CASE("excess volume vanishes without a volume change") {
    Workspace w;
    const Run r = invoke({"excess-volume", "--model", w.model.string(), "--out", w.out("b"), "--format", "csv", "--set",
                          "mixing.v_C=7.675e-5"});
    REQUIRE(r.code == 0);
    std::istringstream in(slurp(w.dir / "b" / "excess-volume.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("p_Pa", 0) == 0) continue;
        CHECK(line.substr(line.rfind(',') + 1) == "0");
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("exit codes") {
    Workspace w;
    CHECK(invoke({"eval", "--model", w.out("missing.ini"), "--out", w.out("c")}).code == 2);
    CHECK(invoke({"eval", "--model", w.model.string(), "--out", w.out("c"), "--set", "model.type=bogus"}).code == 2);
    CHECK(invoke({"eval", "--model", w.model.string(), "--out", w.out("c"), "--format", "xml"}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"eval", "--model", w.model.string(), "--out", w.out("c"), "--set", "states.T=-5"}).code == 3);
    const Run bad = invoke({"validate", "--model", w.model.string(), "--out", w.out("c"), "--set", "model.cp=-50,-50"});
    CHECK(bad.code == 4);
    CHECK(fs::exists(w.dir / "c" / "validate.json"));
    CHECK(invoke({"consistency", "--model", w.model.string(), "--out", w.out("c"), "--set", "model.cp=-50,-50"}).code ==
          4);
    const Run good = invoke({"consistency", "--model", w.model.string(), "--out", w.out("d")});
    CHECK(good.code == 0);
    CHECK(json::parse(slurp(w.dir / "d" / "consistency.json"))["body"]["verdict"] == "stable");
}

TEST_CASE("outputs are deterministic") {
    Workspace w;
    for (const char* cmd : {"eval", "consistency", "validate"})
        for (const char* fmt : {"csv", "json"}) {
            const std::string ext = fmt;
            const std::string base = std::string(cmd) + "." + ext;
            REQUIRE(invoke({cmd, "--model", w.model.string(), "--out", w.out("e1"), "--format", fmt, "--seed", "9"}).code == 0);
            REQUIRE(invoke({cmd, "--model", w.model.string(), "--out", w.out("e2"), "--format", fmt, "--seed", "9"}).code == 0);
            CHECK(slurp(w.dir / "e1" / base) == slurp(w.dir / "e2" / base));
        }
    const std::string csv = slurp(w.dir / "e1" / "eval.csv");
    CHECK(csv.rfind("# helmix ", 0) == 0);
    CHECK(csv.find("# seed: 9") != std::string::npos);
    CHECK(csv.find("# config_hash: 0x") != std::string::npos);
}

TEST_CASE("dump-config prints the resolved configuration") {
    Workspace w;
    const Run r = invoke({"regime", "--model", w.model.string(), "--out", w.out("f"), "--dump-config"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("[regime]") != std::string::npos);
    CHECK(r.out.find("epsilon = ") != std::string::npos);
}
