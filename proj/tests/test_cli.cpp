#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <isoboltz/config.hpp>

using namespace isoboltz;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("isoboltz_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result cli(const std::string& args, const fs::path& dir) {
    fs::path out = dir / "stdout.txt";
    std::string cmd = std::string(ISOBOLTZ_BIN) + " " + args + " > " + out.string() + " 2> " + (dir / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::vector<std::string>& header) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<double> row;
        for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("constants at the threshold") {
    auto dir = scratch("constants");
    auto r = cli("constants --d 3 --gamma -2.0 --s 0.75", dir);
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(std::abs(j["ratio"].get<double>() - 1.0) <= 1e-10);
    CHECK(j["threshold"].get<double>() == Catch::Approx(-2.0));
    CHECK(j["a_landau"].is_null());
}

TEST_CASE("scan-phi finds the sign change") {
    auto dir = scratch("scan");
    auto r = cli("scan-phi --d 3 --s 0.85 --from -2.3 --to -1.9 --n 41 --out " + dir.string(), dir);
    REQUIRE(r.code == 0);
    std::vector<std::string> header;
    auto rows = read_csv(dir / "scan_phi.csv", header);
    REQUIRE(header == std::vector<std::string>{"gamma", "phi", "ratio"});
    REQUIRE(rows.size() == 41);
    double cross = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k)
        if ((rows[k - 1][1] - 1.0) * (rows[k][1] - 1.0) <= 0.0) cross = 0.5 * (rows[k - 1][0] + rows[k][0]);
    CHECK(std::abs(cross + 6.4 / 3.0) <= 1e-2);
    auto j = json::parse(r.out);
    CHECK(std::abs(j["root"].get<double>() + 6.4 / 3.0) <= 1e-8);

    auto none = cli("scan-phi --d 3 --s 0.85 --from -1.9 --to -1.8 --n 5 --out " + dir.string(), dir);
    CHECK(none.code == 1);
    CHECK(fs::exists(dir / "scan_phi.csv"));
}

TEST_CASE("exit codes for bad input") {
    auto dir = scratch("errors");
    CHECK(cli("", dir).code == 2);
    CHECK(cli("frobnicate", dir).code == 2);
    CHECK(cli("simulate --set params.typo=1 --out " + dir.string(), dir).code == 2);
    CHECK(cli("simulate --gamma -1.0 --out " + dir.string(), dir).code == 2);
    CHECK(cli("simulate --config /nonexistent.json", dir).code == 2);
    CHECK(cli("constants --d 3 --gamma -1.0 --s 0.5", dir).code == 2);
    CHECK(cli("constants --d 3 --gamma 0.5 --s 0.5", dir).code == 2);
    CHECK(cli("simulate --set ic={\\\"kind\\\":\\\"file\\\",\\\"path\\\":\\\"/nonexistent\\\"} --out " + dir.string(), dir).code == 2);
    CHECK(cli("--help", dir).code == 0);
}

TEST_CASE("blow-up exits with code 3 and keeps a snapshot") {
    auto dir = scratch("blowup");
    std::string args = "simulate --d 1 --gamma -0.8 --s 0.3 --set grid.n=32 --set grid.L=4 --set grid.center=[0] "
                       "--set ic.mean=[0] --set dt_policy={\\\"kind\\\":\\\"fixed\\\",\\\"dt\\\":200} "
                       "--set t_end=1e6 --out " + dir.string();
    auto r = cli(args, dir);
    CHECK(r.code == 3);
    bool snap = false;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().rfind("snap_", 0) == 0) snap = true;
    CHECK(snap);
}

TEST_CASE("simulate the default config and replay its echo") {
    auto dir = scratch("simulate");
    auto r = cli("simulate --config " + std::string(DEFAULT_CONFIG) + " --out " + (dir / "a").string(), dir);
    REQUIRE(r.code == 0);
    std::vector<std::string> header;
    auto rows = read_csv(dir / "a" / "diagnostics.csv", header);
    auto col = std::find(header.begin(), header.end(), "l2") - header.begin();
    REQUIRE(col < static_cast<long>(header.size()));
    REQUIRE(rows.size() > 2);
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k][col] <= rows[k - 1][col] * (1.0 + 1e-6));
    CHECK(fs::exists(dir / "a" / "verdicts.jsonl"));
    CHECK(fs::exists(dir / "a" / "snap_0.json"));
    CHECK(fs::exists(dir / "a" / "snap_0.f64"));

    auto resolved = read_json_file((dir / "a" / "resolved_config.json").string());
    CHECK(to_json(sim_config_from_json(resolved)) == resolved);
    auto again = cli("simulate --config " + (dir / "a" / "resolved_config.json").string() + " --out " + (dir / "b").string(), dir);
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "a" / "diagnostics.csv") == slurp(dir / "b" / "diagnostics.csv"));
    CHECK(slurp(dir / "a" / "verdicts.jsonl") == slurp(dir / "b" / "verdicts.jsonl"));
}

TEST_CASE("check subcommands on small problems") {
    auto dir = scratch("checks");
    auto op = cli("check-operator --d 2 --gamma -1.8 --s 0.5 --set grid.n=16 --set grid.L=5 --nodes 2 --samples 20000 --out " +
                      dir.string(),
                  dir);
    CHECK(op.code == 0);
    CHECK(fs::exists(dir / "check_operator.jsonl"));
    CHECK(fs::exists(dir / "resolved_config.json"));

    auto hardy = cli("check-hardy --d 2 --gamma -1.8 --s 0.6 --set grid.n=16 --pairs 3 --out " + dir.string(), dir);
    CHECK(hardy.code == 0);
    std::stringstream lines(slurp(dir / "check_hardy.jsonl"));
    int count = 0;
    for (std::string line; std::getline(lines, line);) {
        if (line.empty()) continue;
        ++count;
        CHECK(json::parse(line)["passed"].get<bool>());
    }
    CHECK(count == 3);

    auto landau = cli("landau-limit --set grid.n=16 --out " + dir.string(), dir);
    CHECK(landau.code == 0);
    CHECK(fs::exists(dir / "landau_limit.csv"));
}
