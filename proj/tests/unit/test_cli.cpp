#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kTmp = DDBST_TEST_TMP;

int run(const std::string& args) {
    const std::string cmd = std::string(DDBST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh(const std::string& name) {
    const fs::path p = kTmp / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_identity(const fs::path& dir, int d) {
    json entries = json::array();
    for (int k = 0; k < d; ++k) entries.push_back({k, k, 1.0, 0.0});
    const fs::path p = dir / "identity.json";
    std::ofstream(p) << json{{"dim", d}, {"entries", entries}}.dump();
    return p;
}

} // namespace

TEST_CASE("estimate: identity observable gives exactly one") {
    const fs::path dir = fresh("estimate");
    const fs::path obs = write_identity(dir, 6);
    REQUIRE(run("estimate --observable " + obs.string() + " --state haar --shots 500 --out " +
                (dir / "a").string()) == 0);
    const json rep = json::parse(slurp(dir / "a" / "report.json"));
    CHECK(rep["estimate"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fs::exists(dir / "a" / "manifest.json"));
    const json man = json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(man["command"] == "estimate");
    CHECK(man["outputs"][0]["path"] == "report.json");
}

TEST_CASE("estimate: same seed gives identical reports") {
    const fs::path dir = fresh("determinism");
    const fs::path obs = write_identity(dir, 4);
    const std::string base = "estimate --observable " + obs.string() +
                             " --state hs --shots 2000 --oracle --shadow-log --seed 9 --out ";
    REQUIRE(run(base + (dir / "a").string()) == 0);
    REQUIRE(run(base + (dir / "b").string() + " --workers 3") == 0);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(slurp(dir / "a" / "shadow.bin") == slurp(dir / "b" / "shadow.bin"));
}

TEST_CASE("exit codes") {
    const fs::path dir = fresh("codes");
    CHECK(run("fig1 --trials 0 --out " + dir.string()) == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("estimate --observable /nonexistent/obs.json --out " + dir.string()) == 3);
    std::ofstream(dir / "broken.json") << "{not json";
    CHECK(run("estimate --observable " + (dir / "broken.json").string() + " --out " + dir.string()) == 3);
    const fs::path obs = write_identity(dir, 4);
    CHECK(run("estimate --dim 5 --observable " + obs.string() + " --out " + dir.string()) == 4);
}

TEST_CASE("stabilizer: rank zero uses no shots") {
    const fs::path dir = fresh("stab");
    REQUIRE(run("stabilizer --n 5 --r 0 --out " + dir.string()) == 0);
    const json rep = json::parse(slurp(dir / "stabilizer.json"));
    CHECK(rep["shots"] == 0);
    CHECK(std::abs(rep["final_estimate"].get<double>() - rep["oracle"].get<double>()) < 1e-12);
}

TEST_CASE("CSV outputs carry the provenance comment") {
    const fs::path dir = fresh("csv");
    REQUIRE(run("fig1 --n-range 2..3 --trials 20 --seed 5 --out " + dir.string()) == 0);
    CHECK(slurp(dir / "fig1.csv").rfind("# ddbst ", 0) == 0);
    CHECK(slurp(dir / "fig1.csv").find("seed=5") != std::string::npos);
    REQUIRE(run("variance --dim 4 --states 5 --out " + dir.string()) == 0);
    CHECK(slurp(dir / "variance.csv").rfind("# ddbst ", 0) == 0);
    REQUIRE(run("ensemble --dim 5 --out " + dir.string()) == 0);
    CHECK(json::parse(slurp(dir / "ensemble.json"))["num_bases"] == 10);
}
