#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "smx/config.hpp"
#include "smx/mdp.hpp"
#include "smx/report.hpp"
#include "smx/run.hpp"

using namespace smx;
using doctest::Approx;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// CSV text with the wall_time_ms column (always last) removed per line.
std::string strip_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        const std::size_t cut = line.rfind(',');
        out += line.substr(0, cut);
        out += '\n';
    }
    return out;
}

const ResultRecord* find_metric(const std::vector<ResultRecord>& rs, const std::string& name) {
    for (const auto& r : rs)
        if (r.metric == name) return &r;
    return nullptr;
}

}  // namespace

TEST_CASE("parse_config: operator section and defaults") {
    const ExperimentConfig cfg = parse_config("[operator]\nalpha = 10\nomega = 5\n");
    CHECK(cfg.alpha == 10.0);
    CHECK(cfg.omega == 5.0);
    CHECK(cfg.op_kind == "sm2");
    const OperatorSpec spec = cfg.operator_spec();
    CHECK(spec.kind == OperatorKind::sm2);
    CHECK(cfg.tol == 1e-10);
    CHECK(cfg.samples == 100000);
    CHECK(cfg.seed == 0);
}

TEST_CASE("parse_config: bad omega is rejected by name") {
    ExperimentConfig cfg = parse_config("[operator]\nomega = -1\n");
    CHECK_THROWS_WITH_AS(cfg.operator_spec(), doctest::Contains("omega"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[run]\ncommand = bounds\n[operator]\nomega = -1\n"),
                    std::invalid_argument);
}

TEST_CASE("parse_config: malformed input carries the line number") {
    CHECK_THROWS_WITH_AS(parse_config("[operator]\nalpha 10\n"), doctest::Contains("line 2"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("alpha = 10\n"), doctest::Contains("line 1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[operator]\nalpha = ten\n"), doctest::Contains("alpha"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[operator\nalpha = 1\n"), doctest::Contains("line 1"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[operator]\nalpha = 1\nalpha = 2\n"),
                         doctest::Contains("duplicate"), ConfigError);
}

TEST_CASE("parse_config: unknown keys are listed") {
    CHECK_THROWS_WITH_AS(parse_config("[operator]\nalpa = 10\n"),
                         doctest::Contains("operator.alpa"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nosuch]\nalpha = 10\n"),
                         doctest::Contains("nosuch.alpha"), ConfigError);
}

TEST_CASE("parse_config: sweep requires non-empty grids") {
    CHECK_THROWS_WITH_AS(parse_config("[run]\ncommand = sweep\n"),
                         doctest::Contains("sweep.alphas"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\ncommand = sweep\n[sweep]\nalphas = 1,2\n"),
                         doctest::Contains("sweep.omegas"), ConfigError);
    const ExperimentConfig ok =
        parse_config("[run]\ncommand = sweep\n[sweep]\nalphas = 1,2\nomegas = 5\n");
    CHECK(ok.sweep_alphas == std::vector<double>{1.0, 2.0});
    CHECK(ok.sweep_omegas == std::vector<double>{5.0});
    CHECK_THROWS_AS(parse_config("[sweep]\nalphas = \n"), ConfigError);
}

TEST_CASE("parse_config: missing referenced mdp file") {
    CHECK_THROWS_WITH_AS(
        parse_config("[run]\ncommand = plan\n[mdp]\nfile = /no/such/file.json\n"),
        doctest::Contains("/no/such/file.json"), ConfigError);
}

TEST_CASE("run bounds: emits the closed-form records") {
    ExperimentConfig cfg;
    cfg.command = Command::bounds;
    cfg.command_set = true;
    cfg.alpha = 10.0;
    cfg.omega = 5.0;
    cfg.gamma = 0.9;
    cfg.r_max = 1.0;
    cfg.n = 10;
    const RunOutcome out = run(cfg);
    CHECK_FALSE(out.checks_failed);

    const ResultRecord* perf = find_metric(out.records, "performance_bound");
    REQUIRE(perf != nullptr);
    CHECK(perf->value == Approx(3.0685465660291654).epsilon(1e-13));
    CHECK(perf->params.find("alpha=10") != std::string::npos);

    const ResultRecord* range = find_metric(out.records, "alpha_in_contraction_range");
    REQUIRE(range != nullptr);
    CHECK(range->pass.has_value());
    CHECK_FALSE(*range->pass);
}

TEST_CASE("run contract: expansion pair flips the pass flag") {
    ExperimentConfig cfg;
    cfg.command = Command::contract;
    cfg.command_set = true;
    cfg.alpha = 1.0;
    cfg.omega = 1.0;
    cfg.c = 98.0;
    cfg.scan_n = 2;
    cfg.samples = 500;
    cfg.inject_q1 = {50.0, 1.0};
    cfg.inject_q2 = {5.0, 1.0};
    const RunOutcome out = run(cfg);
    CHECK(out.checks_failed);
    const ResultRecord* violations = find_metric(out.records, "violations");
    REQUIRE(violations != nullptr);
    CHECK(violations->value >= 1.0);
    REQUIRE(violations->pass.has_value());
    CHECK_FALSE(*violations->pass);
    const ResultRecord* worst = find_metric(out.records, "worst_ratio");
    REQUIRE(worst != nullptr);
    CHECK(worst->value > 1.0);
}

TEST_CASE("run plan: chain gap stays below the bound record") {
    ExperimentConfig cfg;
    cfg.command = Command::plan;
    cfg.command_set = true;
    cfg.generator = "chain";
    cfg.chain_length = 5;
    cfg.slip = 0.1;
    cfg.gamma = 0.9;
    cfg.alpha = 5.0;
    cfg.omega = 5.0;
    const RunOutcome out = run(cfg);
    const ResultRecord* gap = find_metric(out.records, "gap_sup");
    REQUIRE(gap != nullptr);
    REQUIRE(gap->bound.has_value());
    CHECK(gap->value <= *gap->bound);
    REQUIRE(gap->pass.has_value());
    CHECK(*gap->pass);
}

TEST_CASE("run sweep: one record per grid point per metric, grid order") {
    ExperimentConfig cfg;
    cfg.command = Command::sweep;
    cfg.command_set = true;
    cfg.sweep_alphas = {1.0, 5.0};
    cfg.sweep_omegas = {5.0, 10.0};
    cfg.gamma = 0.9;
    cfg.n = 10;
    const RunOutcome out = run(cfg);
    REQUIRE(out.records.size() == 8);  // 4 grid points x {xi_bound, performance_bound}
    CHECK(out.records[0].metric == "xi_bound");
    CHECK(out.records[0].params.find("alpha=1;omega=5") != std::string::npos);
    CHECK(out.records[7].params.find("alpha=5;omega=10") != std::string::npos);
}

TEST_CASE("write_csv: header-only for empty input, exact round-trip") {
    const auto path = temp_file("smx_records.csv");
    write_csv({}, path);
    CHECK(slurp(path) == "command,metric,value,std_error,bound,pass,params,wall_time_ms\n");

    std::vector<ResultRecord> rs(2);
    rs[0] = {"bounds", "xi_bound", 1.0 / 3.0, std::nullopt, std::nullopt, std::nullopt,
             "alpha=1", 0.5};
    rs[1] = {"overest", "theta", 0.123456789012345678, 1e-17, 2.0 / 7.0, true,
             "n=10;weights=1|2", 1.25};
    write_csv(rs, path);
    const std::string text = slurp(path);
    CHECK(text.back() == '\n');

    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);
    {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        CHECK(cell == "bounds");
        std::getline(row, cell, ',');
        CHECK(cell == "xi_bound");
        std::getline(row, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == 1.0 / 3.0);  // 17 digits round-trip
        std::getline(row, cell, ',');
        CHECK(cell.empty());
    }
    std::getline(in, line);
    {
        std::istringstream row(line);
        std::string cell;
        for (int i = 0; i < 3; ++i) std::getline(row, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == 0.123456789012345678);
        std::getline(row, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == 1e-17);
        std::getline(row, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == 2.0 / 7.0);
        std::getline(row, cell, ',');
        CHECK(cell == "true");
        std::getline(row, cell, ',');
        CHECK(cell == "n=10;weights=1|2");
    }
    std::filesystem::remove(path);
}

TEST_CASE("write_csv: params with a comma are quoted, wall time stays last") {
    std::vector<ResultRecord> rs(1);
    rs[0] = {"plan", "gap_sup", 1.5, std::nullopt, std::nullopt, std::nullopt,
             "mdp_file=/tmp/a,b.json", 2.0};
    const std::string text = to_csv(rs);
    CHECK(text.find("\"mdp_file=/tmp/a,b.json\"") != std::string::npos);
    // the wall-time strip rule (drop after the last comma) still works
    const std::string stripped = strip_wall_time(text);
    CHECK(stripped.find("\"mdp_file=/tmp/a,b.json\"") != std::string::npos);
    CHECK(stripped.find("2\n") == std::string::npos);
}

TEST_CASE("determinism: identical configs give identical CSV minus wall time") {
    ExperimentConfig cfg;
    cfg.command = Command::overest;
    cfg.command_set = true;
    cfg.alpha = 10.0;
    cfg.omega = 5.0;
    cfg.n = 5;
    cfg.samples = 20000;
    cfg.seed = 9;
    const std::string a = to_csv(run(cfg).records);
    const std::string b = to_csv(run(cfg).records);
    CHECK(strip_wall_time(a) == strip_wall_time(b));
}

TEST_CASE("emit_svg: corner mapping, legend order, well-formed markup") {
    const auto path = temp_file("smx_plot.svg");
    std::vector<Series> series;
    series.push_back({"identity", {{0.0, 0.0}, {1.0, 1.0}}});
    series.push_back({"flat", {{0.0, 0.5}, {1.0, 0.5}}});
    emit_svg(series, path, "x", "y");
    const std::string svg = slurp(path);

    // y = x spans the plot area corner to corner (70,430) -> (700,20)
    CHECK(svg.find("points=\"70,430 700,20\"") != std::string::npos);
    // legend entries appear in input order
    const std::size_t first = svg.find(">identity<");
    const std::size_t second = svg.find(">flat<");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    CHECK(first < second);
    // two polylines, one per series
    std::size_t count = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++count;
    CHECK(count == 2);
    // crude well-formedness: tags balance
    CHECK(svg.find("<?xml") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t opens = 0;
    std::size_t closes = 0;
    for (std::size_t pos = svg.find("<text"); pos != std::string::npos;
         pos = svg.find("<text", pos + 1))
        ++opens;
    for (std::size_t pos = svg.find("</text>"); pos != std::string::npos;
         pos = svg.find("</text>", pos + 1))
        ++closes;
    CHECK(opens == closes);
    std::filesystem::remove(path);
}

TEST_CASE("emit_svg: degenerate input errors") {
    std::vector<Series> vertical;
    vertical.push_back({"spike", {{1.0, 0.0}, {1.0, 2.0}}});
    CHECK_THROWS_AS(to_svg(vertical), std::invalid_argument);

    std::vector<Series> short_series;
    short_series.push_back({"dot", {{1.0, 0.0}}});
    CHECK_THROWS_AS(to_svg(short_series), std::invalid_argument);

    CHECK_THROWS_AS(to_svg({}), std::invalid_argument);

    // all-equal y is padded, not an error
    std::vector<Series> flat;
    flat.push_back({"flat", {{0.0, 1.0}, {2.0, 1.0}}});
    CHECK_FALSE(to_svg(flat).empty());
}

#ifdef SMX_CLI_PATH
namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SMX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli exit codes: 0 ok, 1 usage, 2 numeric, 3 failed check") {
    CHECK(run_cli("bounds --alpha 10 --omega 5 --gamma 0.9 --rmax 1 --n-actions 10") == 0);
    CHECK(run_cli("bounds --omega -3") == 1);
    CHECK(run_cli("nosuchcommand") == 1);
    CHECK(run_cli("plan --mdp /no/such/file.json") == 1);

    const auto cfgpath = temp_file("smx_cli_contract.cfg");
    {
        std::ofstream out(cfgpath);
        out << "[operator]\nalpha = 1\nomega = 1\n[mc]\nc = 98\nscan_n = 2\nsamples = 200\n"
            << "inject_q1 = 50,1\ninject_q2 = 5,1\n";
    }
    CHECK(run_cli("contract --config " + cfgpath.string()) == 3);
    CHECK(run_cli("contract --alpha 0 --omega 1 --samples 2000") == 0);
    std::filesystem::remove(cfgpath);

    // flags override config values: config says alpha=1 (expansive pair),
    // flag resets the scan to mellowmax which passes
    const auto cfg2 = temp_file("smx_cli_contract2.cfg");
    {
        std::ofstream out(cfg2);
        out << "[operator]\nalpha = 1\nomega = 1\n[mc]\nc = 98\nscan_n = 2\nsamples = 200\n"
            << "inject_q1 = 50,1\ninject_q2 = 5,1\n";
    }
    CHECK(run_cli("contract --config " + cfg2.string() + " --alpha 0") == 0);
    std::filesystem::remove(cfg2);
}

TEST_CASE("cli csv output is byte-stable modulo wall time") {
    const auto out1 = temp_file("smx_cli_a.csv");
    const auto out2 = temp_file("smx_cli_b.csv");
    const std::string args = "overest --alpha 10 --omega 5 --n-actions 5 --samples 5000 --seed 3";
    REQUIRE(run_cli(args + " --out " + out1.string()) == 0);
    REQUIRE(run_cli(args + " --out " + out2.string()) == 0);
    CHECK(strip_wall_time(slurp(out1)) == strip_wall_time(slurp(out2)));
    CHECK(strip_wall_time(slurp(out1)).find("theta_max_mc") != std::string::npos);
    std::filesystem::remove(out1);
    std::filesystem::remove(out2);
}
#endif
