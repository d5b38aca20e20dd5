#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support.hpp"
#include "mdrscreen/cli.hpp"
#include "mdrscreen/io.hpp"
#include "mdrscreen/simulation.hpp"

using namespace mdr;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "mdrscreen");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "mdrscreen_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::filesystem::path write_m1_csv(std::size_t n, std::size_t p) {
    SimulationSpec spec;
    spec.model = Model::M1;
    spec.rho = 0.8;
    spec.n = n;
    spec.p = p;
    spec.seed = 100;
    const auto data = generate_dataset(spec, 0);
    const auto path = scratch("m1_" + std::to_string(n) + "_" + std::to_string(p) + ".csv");
    std::ofstream out(path);
    out << "time,status";
    for (std::size_t k = 1; k <= p; ++k) out << ",g" << k;
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        out << data.observed_time()[i] << "," << int(data.status()[i]);
        for (std::size_t k = 0; k < p; ++k) out << "," << data.covariates()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        out << "\n";
    }
    return path;
}

}  // namespace

TEST_CASE("screen --top 37 selects 37 covariates") {
    const auto csv = write_m1_csv(200, 100);
    const auto r = run({"--top", "37", "--format", "json", "screen", csv.string()});
    REQUIRE(r.code == 0);
    const auto result = parse_result(r.out);
    CHECK(result.selected.size() == 37);
    CHECK(result.method == Method::Sis);
    CHECK(result.config_echo["input"] == csv.string());

    const auto table = run({"screen", csv.string(), "--top", "37"});
    CHECK(table.code == 0);
    std::size_t marked = 0;
    std::istringstream in(table.out);
    std::string line;
    while (std::getline(in, line)) marked += !line.empty() && line.back() == '*';
    CHECK(marked == 37);
}

TEST_CASE("usage errors exit with 1") {
    const auto r = run({"--no-such-flag"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({}).code == 1);
    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(run({"simulate", "--model", "M9"}).code == 1);
    CHECK(run({"--top", "3", "--threshold", "0.1", "screen", "x.csv"}).code == 1);
}

TEST_CASE("input problems exit with 1, runtime failures with 2") {
    CHECK(run({"screen", scratch("absent.csv").string()}).code != 0);
    const auto bad = scratch("bad_status.csv");
    {
        std::ofstream out(bad);
        out << "time,status,g1\n1,2,3\n2,0,1\n3,1,2\n";
    }
    const auto r = run({"screen", bad.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("IllegalStatus") != std::string::npos);

    const auto csv = write_m1_csv(40, 10);
    CHECK(run({"--top", "11", "screen", csv.string()}).code == 1);
    CHECK(run({"--stability-ns", "1", "--stability-B", "5", "stability", csv.string()}).code == 2);
}

TEST_CASE("iterate and stability subcommands") {
    const auto csv = write_m1_csv(120, 40);
    const auto it = run({"--stages", "5,4", "--format", "json", "iterate", csv.string()});
    REQUIRE(it.code == 0);
    const auto ri = parse_result(it.out);
    CHECK(ri.selected.size() == 9);
    CHECK(ri.stage_sizes == std::vector<int>{5, 4});

    const auto auto_stages = parse_result(run({"--format", "json", "iterate", csv.string()}).out);
    CHECK(auto_stages.stage_sizes == default_stage_plan(default_dn(120)));

    const auto out = scratch("stability.jsonl");
    const auto st = run({"--stability-B", "10", "--seed", "3", "--format", "json", "--output", out.string(),
                         "stability", csv.string()});
    REQUIRE(st.code == 0);
    CHECK(st.out.empty());
    const auto rs = read_result(out);
    CHECK(rs.method == Method::Ss);
    CHECK(rs.frequencies.size() == 40);
    CHECK(run({"--stages", "5,x", "iterate", csv.string()}).code == 1);
}

TEST_CASE("simulate is byte-identical across runs and worker counts") {
    const std::vector<std::string> base{"--format", "json", "--seed", "7", "simulate", "--model", "M1", "--rho",
                                        "0.8", "--n", "200", "--p", "400", "--reps", "20"};
    auto with_threads = [&](const std::string& t) {
        auto args = base;
        args.insert(args.begin(), {"--threads", t});
        return run(args);
    };
    const auto a = with_threads("1");
    const auto b = with_threads("1");
    const auto c = with_threads("3");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const auto rep = parse_report(a.out);
    CHECK(rep.replications == 20);
}

TEST_CASE("stability output is byte-identical across worker counts") {
    const auto csv = write_m1_csv(100, 30);
    const auto a = run({"--threads", "1", "--stability-B", "12", "--seed", "5", "--format", "json", "stability",
                        csv.string()});
    const auto b = run({"--threads", "4", "--stability-B", "12", "--seed", "5", "--format", "json", "stability",
                        csv.string()});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("oracle-check") {
    const auto r = run({"oracle-check", "--datasets", "10"});
    CHECK(r.code == 0);
    const auto csv = write_m1_csv(60, 8);
    CHECK(run({"oracle-check", csv.string()}).code == 0);
}
