#include "doctest.h"

#include "support/oracles.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result tmkit(const std::string& args) {
    const std::string cmd = std::string(TMKIT_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tmkit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_CASE("validate reports clean models and broken ones") {
    for (const char* name : {"predator_prey", "tile", "coin"}) {
        Result r = tmkit(std::string("validate ") + name);
        CHECK(r.code == 0);
        CHECK(r.out == "no violations\n");
    }
    TempDir dir;
    spit(dir.path / "bad.tm", "model m { thimac A { create; release; } thimac B { receive; } flow A.release -> B.receive; }");
    Result bad = tmkit("validate " + (dir.path / "bad.tm").string());
    CHECK(bad.code == 1);
    CHECK(bad.out.rfind("TM08 cross-machine-flow", 0) == 0);

    spit(dir.path / "syntax.tm", "model m { thimac A { create }");
    CHECK(tmkit("validate " + (dir.path / "syntax.tm").string()).code == 2);
    CHECK(tmkit("validate /nonexistent/file.tm").code == 2);
}

TEST_CASE("decompose and behavior") {
    Result d = tmkit("decompose tile");
    CHECK(d.code == 0);
    CHECK(d.out.find("uncovered 0") != std::string::npos);

    Result b = tmkit("behavior tile");
    CHECK(b.code == 0);
    CHECK(b.out.find("runs 2\n") != std::string::npos);

    Result pp = tmkit("behavior predator_prey --max-recurrence 3");
    CHECK(pp.code == 0);
    CHECK(pp.out.find("runs 4\n") != std::string::npos);

    CHECK(tmkit("behavior coin --check \"E1 E2 E3 E5\"").code == 0);
    Result nc = tmkit("behavior coin --check \"E1 E2 E3 E4\"");
    CHECK(nc.code == 1);
    CHECK(nc.out.find("violation at 3") != std::string::npos);
    CHECK(tmkit("behavior predator_prey --max-recurrence 10 --max-runs 2").code == 3);
}

TEST_CASE("render writes DOT") {
    TempDir dir;
    Result r = tmkit("render coin --target behavior -o " + (dir.path / "b.dot").string());
    CHECK(r.code == 0);
    CHECK(slurp(dir.path / "b.dot").rfind("digraph behavior {", 0) == 0);
    CHECK(tmkit("render coin --target nonsense").code == 2);
    Result s = tmkit("render tile --no-triggers --no-clusters");
    CHECK(s.out.find("dashed") == std::string::npos);
    CHECK(s.out.find("cluster") == std::string::npos);
}

TEST_CASE("simulate writes a run directory") {
    TempDir dir;
    Result r = tmkit("simulate coin --seed 1 -o " + dir.path.string());
    CHECK(r.code == 0);
    for (const char* f : {"trace.tsv", "trace.jsonl", "events.txt", "verdict.txt", "variables.tsv", "summary.txt",
                          "info.txt", "info.json"})
        CHECK(fs::exists(dir.path / f));
    CHECK(slurp(dir.path / "verdict.txt") == "1\tconformant\n");
    CHECK(r.out.find("conformant\t1") != std::string::npos);
}

TEST_CASE("coin with seed 1 lands on exactly one face") {
    TempDir dir;
    CHECK(tmkit("simulate coin --seed 1 -o " + dir.path.string()).code == 0);
    std::istringstream events(slurp(dir.path / "events.txt"));
    std::string seed, word;
    events >> seed;
    int faces = 0;
    while (events >> word) faces += word == "E3" || word == "E4";
    CHECK(faces == 1);
}

TEST_CASE("tile outcomes over 1000 runs sum to 1000") {
    Result r = tmkit("simulate tile --runs 1000 --seed 7");
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    long total = 0;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("outcome\t", 0) != 0) continue;
        ++rows;
        total += std::stol(line.substr(line.rfind('\t') + 1));
    }
    CHECK(rows == 2);
    CHECK(total == 1000);
}

TEST_CASE("predator-prey table over 100 ticks equals direct iteration") {
    TempDir dir;
    CHECK(tmkit("simulate predator_prey --max-ticks 100 -o " + dir.path.string()).code == 0);
    const auto oracle = tmtest::predator_prey_direct({}, 99);
    std::istringstream table(slurp(dir.path / "variables.tsv"));
    std::string line;
    std::getline(table, line);
    CHECK(line == "tick\tH\tL");
    std::size_t k = 0;
    while (std::getline(table, line)) {
        CAPTURE(line);
        REQUIRE(k < oracle.size());
        std::istringstream row(line);
        std::string tick, h, l;
        std::getline(row, tick, '\t');
        std::getline(row, h, '\t');
        std::getline(row, l, '\t');
        CHECK(tick == std::to_string(k));
        const double hv = std::strtod(h.c_str(), nullptr), lv = std::strtod(l.c_str(), nullptr);
        CHECK(std::bit_cast<std::uint64_t>(hv) == std::bit_cast<std::uint64_t>(oracle[k].first));
        CHECK(std::bit_cast<std::uint64_t>(lv) == std::bit_cast<std::uint64_t>(oracle[k].second));
        ++k;
    }
    CHECK(k == 100);
}

TEST_CASE("manifests drive simulate and flags override them") {
    TempDir dir;
    spit(dir.path / "run.json", R"({"model": "predator_prey", "config": {"seed": 3, "max_ticks": 4,
      "set": {"H": 30}}, "output": "out"})");
    Result r = tmkit("simulate --manifest " + (dir.path / "run.json").string());
    CHECK(r.code == 0);
    const std::string vars = slurp(dir.path / "out" / "variables.tsv");
    CHECK(vars.rfind("tick\tH\tL\n0\t30\t10\n", 0) == 0);
    CHECK(slurp(dir.path / "out" / "trace.tsv").find("seed 3") != std::string::npos);

    Result o = tmkit("simulate --manifest " + (dir.path / "run.json").string() + " --seed 8 --max-ticks 2 -o " +
                     (dir.path / "flag").string());
    CHECK(o.code == 0);
    CHECK(slurp(dir.path / "flag" / "trace.tsv").find("seed 8") != std::string::npos);
    const std::string flagged = slurp(dir.path / "flag" / "variables.tsv");
    CHECK(flagged.rfind("tick\tH\tL\n0\t30\t10\n1\t", 0) == 0);
    CHECK(std::count(flagged.begin(), flagged.end(), '\n') == 3);

    spit(dir.path / "broken.json", "{ not json");
    CHECK(tmkit("simulate --manifest " + (dir.path / "broken.json").string()).code == 2);
    spit(dir.path / "order.json", R"({"model": "coin", "firing_order": "random"})");
    CHECK(tmkit("simulate --manifest " + (dir.path / "order.json").string()).code == 2);
}

TEST_CASE("rule overrides from a file") {
    TempDir dir;
    spit(dir.path / "rules.tm", "rule Population.process { H = H * 2; L = L; }\n");
    Result r = tmkit("simulate predator_prey --max-ticks 3 --rules " + (dir.path / "rules.tm").string() + " -o " +
                     dir.path.string());
    CHECK(r.code == 0);
    CHECK(slurp(dir.path / "variables.tsv") == "tick\tH\tL\n0\t20\t10\n1\t40\t10\n2\t80\t10\n");
}

TEST_CASE("engine errors exit with 3") {
    TempDir dir;
    spit(dir.path / "div.tm", R"(model m {
  thimac A { create; }
  var x = 1;
  var y = 0;
  rule A.create { x = x / y; }
  event E1 "divides" { A.create }
})");
    CHECK(tmkit("simulate " + (dir.path / "div.tm").string()).code == 3);
    CHECK(tmkit("simulate coin --set p_face=0.7 --set nothing=1").code == 2);
}

TEST_CASE("info from a distribution and from runs") {
    Result d = tmkit("info --dist face=0.5,tail=0.5");
    CHECK(d.code == 0);
    CHECK(d.out.find("entropy 1 bits") != std::string::npos);
    Result j = tmkit("info --dist a=0.25,b=0.75 --json");
    CHECK(j.out.find("\"unit\": \"bits\"") != std::string::npos);
    CHECK(tmkit("info --dist a=0.5,b=0.6").code == 2);
    CHECK(tmkit("info --dist a=0.5,b=0.5 --base 3").code == 2);
    Result runs = tmkit("info coin --runs 50 --outcomes E3,E4");
    CHECK(runs.code == 0);
    CHECK(runs.out.find("observations 50") != std::string::npos);
}

TEST_CASE("examples lists the bundled models") {
    Result r = tmkit("examples");
    CHECK(r.code == 0);
    CHECK(r.out.find("predator_prey") != std::string::npos);
    CHECK(r.out.find("tile") != std::string::npos);
    CHECK(r.out.find("coin") != std::string::npos);
    CHECK(tmkit("").code == 2);
    CHECK(tmkit("--version").out.find("0.1.0") != std::string::npos);
}
