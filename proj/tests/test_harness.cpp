#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "torusdyn/harness/commands.hpp"
#include "torusdyn/harness/config.hpp"
#include "torusdyn/harness/output.hpp"

using namespace torusdyn;
using namespace torusdyn::harness;
namespace fs = std::filesystem;

namespace {

int line_of_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::current_path() / ("harness_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const auto c = parse_config("[map]\nmap = standard\nk = 2\n[run]\ncommand = rotset\n");
    CHECK(c.real("map", "k") == 2.0);
    CHECK(c.integer("rotation", "grid_nx") == 64);
    CHECK(c.integer("rotation", "grid_ny") == 64);
    CHECK(c.integer("rotation", "short_horizon") == 1000);
    CHECK(c.integer("rotation", "long_horizon") == 10000);
    CHECK(c.command() == "rotset");
    CHECK(c.warnings().empty());
    CHECK(!c.given("rotation", "grid_nx"));
}

TEST_CASE("config errors carry line numbers") {
    CHECK(line_of_error("[map]\nmap = standard\nk = abc\n[run]\ncommand = rotset\n") == 3);
    CHECK(line_of_error("[map]\nmap = standard\n\nbogus = 1\n[run]\ncommand = rotset\n") == 4);
    CHECK(line_of_error("[run]\ncommand = rotset\n") == 2);
    CHECK(line_of_error("[map]\nmap = standard\n[run]\ncommand = dance\n") == 4);
    CHECK(line_of_error("[map]\nmap = standard\n[nope]\n") == 3);
    CHECK(line_of_error("k = 2\n[map]\nmap = standard\n") == 1);
    CHECK(line_of_error("[map]\nmap = standard\n[rotation]\ngrid_nx = 6.5\n[run]\ncommand = rotset\n") == 4);
    CHECK(line_of_error("[map]\nk = 1\n[run]\ncommand = rotset\n") == 1);
}

TEST_CASE("duplicate keys: last wins with a warning") {
    const auto c = parse_config("[map]\nmap = standard\nk = 1\nk = 3 # again\n[run]\ncommand = vrotset\n");
    CHECK(c.real("map", "k") == 3.0);
    REQUIRE(c.warnings().size() == 1);
    CHECK(c.warnings()[0].find("line 4") != std::string::npos);
    CHECK(c.line_of("map", "k") == 4);
}

TEST_CASE("values are canonicalised") {
    const auto c = parse_config("[map]\nmap=standard\nk = 1/2\nepsilon=1e-2\n[run]\ncommand=sft-hull\n[sft]\nrho_x = 0.25\n");
    CHECK(c.text("map", "k") == "0.5");
    CHECK(c.text("map", "epsilon") == "0.01");
    CHECK(c.text("sft", "rho_x") == "1/4");
}

TEST_CASE("command requirements") {
    CHECK_THROWS_AS(validate(parse_config("[map]\nmap=standard\nk=1\n[run]\ncommand=rotset\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("[map]\nmap=custom\nbuiltin=identity\n[run]\ncommand=vrotset\n")), ConfigError);
    CHECK_THROWS_AS(
        validate(parse_config("[map]\nmap=standard\n[run]\ncommand=vrotset\n[rotation]\nshort_horizon=10\nlong_horizon=10\n")),
        ConfigError);
    CHECK_THROWS_AS(validate(parse_config("[map]\nmap=standard\n[run]\ncommand=sft-hull\n[sft]\ngraph=file\nfile=/no/such\n")),
                    ConfigError);
    CHECK_NOTHROW(validate(parse_config("[map]\nmap=custom\nbuiltin=translation\na=0.5\n[run]\ncommand=rotset\n")));
}

TEST_CASE("hash and number formatting") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(num(0.1) == "0.1");
    CHECK(num(-2.0) == "-2");
}

TEST_CASE("runs write a manifest that hashes every output") {
    const fs::path dir = fresh_dir("sft");
    std::ofstream(dir / "run.cfg") << "[map]\nmap = standard\nk = 2\nk = 2\n[run]\ncommand = sft-orbit\n[sft]\nrho_x = 1/3\nrho_y = 2/3\n";
    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = (dir / "out").string();
    REQUIRE(run_config_file((dir / "run.cfg").string(), opts, log) == kExitPass);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["command"] == "sft-orbit");
    CHECK(manifest["config"]["sft"]["rho_x"] == "1/3");
    CHECK(manifest["config"]["rotation"]["grid_nx"] == "64");
    CHECK(manifest["warnings"].size() == 1);
    std::size_t listed = 0;
    for (const auto& f : manifest["outputs"]) {
        const std::string body = slurp(dir / "out" / f["file"].get<std::string>());
        CHECK(body.size() == f["bytes"].get<std::size_t>());
        CHECK(fnv1a64_hex(body) == f["fnv1a64"].get<std::string>());
        ++listed;
    }
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(dir / "out")) on_disk += e.path().filename() != "manifest.json";
    CHECK(listed == on_disk);

    const auto orbit = nlohmann::json::parse(slurp(dir / "out" / "sft_orbit.json"));
    CHECK(orbit["word_length"] == 3);
}

TEST_CASE("seed override and graph file relative to the config") {
    const fs::path dir = fresh_dir("graph");
    std::ofstream(dir / "tri.txt") << "vertices 2\n0 0 1 0\n1 1 0 1\n0 1 0 0\n1 0 0 0\n";
    std::ofstream(dir / "run.cfg") << "[map]\nmap = standard\n[run]\ncommand = sft-hull\n[sft]\ngraph = file\nfile = tri.txt\n";
    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = (dir / "out").string();
    opts.seed = 99;
    REQUIRE(run_config_file((dir / "run.cfg").string(), opts, log) == kExitPass);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["seed"] == 99);
    const auto hull = nlohmann::json::parse(slurp(dir / "out" / "sft_hull.json"));
    CHECK(hull["dimension"] == 2);
}

TEST_CASE("bad config exits 2 and writes nothing") {
    const fs::path dir = fresh_dir("bad");
    std::ofstream(dir / "run.cfg") << "[map]\nmap = standard\nk = abc\n[run]\ncommand = check-all\n";
    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = (dir / "out").string();
    CHECK(run_config_file((dir / "run.cfg").string(), opts, log) == kExitUsage);
    CHECK(!fs::exists(dir / "out"));
    CHECK(log.str().find("line 3") != std::string::npos);
    CHECK(run_config_file((dir / "missing.cfg").string(), opts, log) == kExitUsage);
}

TEST_CASE("a failed precondition inside a command exits 1 with no outputs") {
    const fs::path dir = fresh_dir("nosaddle");
    std::ofstream(dir / "run.cfg") << "[map]\nmap = standard\nk = 0\n[run]\ncommand = grow\n";
    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = (dir / "out").string();
    CHECK(run_config_file((dir / "run.cfg").string(), opts, log) == kExitCheckFailure);
    CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("check-all on the integrable map skips the theorem rows") {
    OutputSet out;
    const auto rows = check_all(parse_config("[map]\nmap = standard\nk = 0\n[run]\ncommand = check-all\n"), out);
    bool saw_interval = false;
    std::size_t skipped = 0;
    for (const auto& r : rows) {
        if (r.check == "vertical rotation interval") {
            saw_interval = true;
            CHECK(r.value == "{0}");
        }
        if (r.status == "hypothesis not met, skipped") ++skipped;
        CHECK(r.status != "fail");
    }
    CHECK(saw_interval);
    CHECK(skipped >= 6);
    CHECK(format_checks(rows).find("hypothesis not met, skipped") != std::string::npos);
    CHECK(out.files().count("check_all.json") == 1);
}
