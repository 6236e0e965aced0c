#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "billiards/config.hpp"
#include "billiards/output.hpp"
#include "billiards/run.hpp"
#include "billiards/table_io.hpp"

using namespace billiards;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("billiard-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int line_count(const fs::path& p) {
    std::ifstream in(p);
    int n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BILLIARD_EXE) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()) + " @" + e.field();
    }
    return "";
}

}  // namespace

TEST(TableIo, BuiltinsRoundTrip) {
    for (const Table& t : {make_square(1.5), make_sinai(1.0, {0.4, 0.6}, 0.15), make_stadium(2.0, 1.0),
                           make_stadium(0.0, 0.5)}) {
        const json doc = table_to_json(t);
        const Table back = table_from_json(json::parse(doc.dump()));
        EXPECT_EQ(table_to_json(back), doc);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(t.bounding_box().min.x, t.bounding_box().max.x);
        std::uniform_real_distribution<double> uy(t.bounding_box().min.y, t.bounding_box().max.y);
        for (int i = 0; i < 2000; ++i) {
            const Vec2 p{ux(rng), uy(rng)};
            ASSERT_EQ(contains(t, p), contains(back, p));
        }
    }
}

TEST(TableIo, FileFormat) {
    const json doc = table_to_json(make_sinai(1.0, {0.5, 0.5}, 0.2));
    ASSERT_EQ(doc.at("walls").size(), 5u);
    EXPECT_EQ(doc["walls"][0]["kind"], "segment");
    EXPECT_EQ(doc["walls"][4]["kind"], "arc");
    EXPECT_EQ(doc["walls"][4]["interior"], "outside");
    EXPECT_EQ(doc["walls"][4]["radius"], 0.2);
}

TEST(TableIo, RejectsMalformedTables) {
    EXPECT_THROW(table_from_json(json::parse(R"({"walls":[{"kind":"blob"}]})")), InvalidArgument);
    EXPECT_THROW(table_from_json(json::parse(R"({"walls":[{"kind":"segment","p0":[0,0],"p1":[1,0]}]})")),
                 InvalidArgument);
    EXPECT_THROW(table_from_json(json::parse(
                     R"({"walls":[{"kind":"arc","center":[0,0],"radius":1,"from":0,"to":7,"interior":"inside"}]})")),
                 InvalidArgument);
    EXPECT_THROW(table_from_json(json::parse(R"({"walls":[],"extra":1})")), InvalidArgument);
}

TEST(Config, MinimalSquare) {
    const auto cfg = parse_config(
        R"({"table":{"builtin":"square","side":1},"experiment":{"kind":"simulate","start":[0.3,0.3],"direction":[1,2],"bounces":300}})");
    EXPECT_EQ(cfg.kind, ExperimentKind::Simulate);
    EXPECT_EQ(cfg.bounces, 300);
    EXPECT_NEAR(cfg.initial.direction.norm(), 1.0, 1e-15);
    EXPECT_NEAR(cfg.initial.direction.x, 1.0 / std::sqrt(5.0), 1e-15);
    ASSERT_TRUE(cfg.table);
    EXPECT_EQ(cfg.table->size(), 4u);
}

TEST(Config, ForwardsTablePreconditions) {
    const auto msg = config_error(R"({"table":{"builtin":"sinai","side":1,"radius":0.6},"experiment":{"kind":"simulate"}})");
    EXPECT_NE(msg.find("@table"), std::string::npos) << msg;
}

TEST(Config, RejectsUnknownKeys) {
    auto msg = config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"simulate","bounce":3}})");
    EXPECT_NE(msg.find("bounce"), std::string::npos) << msg;
    msg = config_error(R"({"table":{"builtin":"square","radius":1},"experiment":{"kind":"simulate"}})");
    EXPECT_NE(msg.find("radius"), std::string::npos) << msg;
    msg = config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"simulate"},"output":"x"})");
    EXPECT_NE(msg.find("output"), std::string::npos) << msg;
}

TEST(Config, ParseErrorReportsLineAndColumn) {
    const auto msg = config_error("{\n  \"table\": {\"builtin\": \"square\"},\n  \"experiment\": {\"kind\": simulate}\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Config, ValidatesBeforeCompute) {
    EXPECT_FALSE(config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"simulate","bounces":-1}})").empty());
    EXPECT_FALSE(config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"simulate","start":[2,2]}})").empty());
    EXPECT_FALSE(config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"simulate","direction":[0,0]}})").empty());
    EXPECT_FALSE(config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"angles","wall":9}})").empty());
    EXPECT_FALSE(config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"lyapunov","renormalizations":5}})").empty());
    EXPECT_FALSE(config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"quantum","dt":0}})").empty());
    EXPECT_FALSE(config_error(R"({"table":{"builtin":"square"},"experiment":{"kind":"teleport"}})").empty());
    EXPECT_FALSE(config_error(R"({"table":{"file":"/nonexistent/table.json"},"experiment":{"kind":"simulate"}})").empty());
}

TEST(Config, ResolvedConfigIsAFixedPoint) {
    const auto cfg = parse_config(
        R"({"table":{"builtin":"stadium"},"experiment":{"kind":"lyapunov","direction":[3,1],"ensemble":[{"start":[0.1,0.2],"direction":[1,1]}]}})");
    const json resolved = to_json(cfg);
    const auto again = parse_config(resolved.dump());
    EXPECT_EQ(to_json(again), resolved);
    EXPECT_EQ(again.initial.direction, cfg.initial.direction);
    ASSERT_EQ(again.ensemble.size(), 1u);
    EXPECT_EQ(resolved["experiment"]["offset"], 1e-9);
}

TEST(Config, TableFileResolvesRelativeToConfig) {
    const auto dir = scratch_dir("table-file");
    save_table(make_stadium(1.0, 0.5), dir / "t.json");
    const auto cfg = parse_config(R"({"table":{"file":"t.json"},"experiment":{"kind":"simulate","start":[0,0]}})",
                                  std::nullopt, dir);
    EXPECT_EQ(cfg.table->size(), 4u);
    EXPECT_TRUE(cfg.table_spec.file.is_absolute());
}

TEST(Output, TrajectoryCsv) {
    const auto traj = simulate(make_square(1.0), {{0.3, 0.3}, Vec2{1, 2}.normalized()}, 3);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "index,x,y,wall_id,dir_in_x,dir_in_y,dir_out_x,dir_out_y,incidence_angle,path_length");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("0,0.29999999999999999,0.29999999999999999,,,,", 0), 0u) << line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(Output, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Output, PgmLayout) {
    RealGrid g{3, 2, {0.0, 1.0, 2.0, 3.0, 4.0, 8.0}};
    std::ostringstream os;
    write_density_pgm(os, g);
    const std::string s = os.str();
    const std::string header = "P5\n3 2\n65535\n";
    ASSERT_EQ(s.size(), header.size() + 12);
    EXPECT_EQ(s.substr(0, header.size()), header);
    auto px = [&](std::size_t k) {
        return (static_cast<unsigned char>(s[header.size() + 2 * k]) << 8) |
               static_cast<unsigned char>(s[header.size() + 2 * k + 1]);
    };
    // First image row is the largest y.
    EXPECT_EQ(px(0), std::lround(3.0 / 8.0 * 65535));
    EXPECT_EQ(px(2), 65535);
    EXPECT_EQ(px(3), 0);
}

TEST(Output, RawDumpRoundTripsLittleEndian) {
    RealGrid g{2, 2, {1.0, -0.5, 3.25, 1e-300}};
    std::ostringstream os;
    write_density_raw(os, g);
    const std::string s = os.str();
    ASSERT_EQ(s.size(), 32u);
    // 1.0 = 0x3FF0000000000000, least significant byte first.
    EXPECT_EQ(static_cast<unsigned char>(s[7]), 0x3F);
    EXPECT_EQ(static_cast<unsigned char>(s[6]), 0xF0);
    EXPECT_EQ(static_cast<unsigned char>(s[0]), 0x00);
    std::istringstream in(s);
    EXPECT_EQ(read_density_raw(in, 2, 2).values, g.values);
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override { dir = scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name()); }
    fs::path config(const std::string& text) {
        write_text_file(dir / "config.json", text);
        return dir / "config.json";
    }
};

TEST_F(Cli, SquareSimulateWritesAllRows) {
    const auto cfg = config(R"({"table":{"builtin":"square","side":1},"experiment":{"kind":"simulate","bounces":300}})");
    ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (dir / "out").string()), 0);
    EXPECT_EQ(line_count(dir / "out" / "trajectory.csv"), 302);
    EXPECT_TRUE(fs::exists(dir / "out" / "resolved-config.json"));
    EXPECT_FALSE(fs::exists(dir / "out" / "error.json"));
}

TEST_F(Cli, StadiumDivergeSeparates) {
    const auto cfg = config(R"({"table":{"builtin":"stadium"},"experiment":{"kind":"diverge"}})");
    ASSERT_EQ(run_cli("diverge --config " + cfg.string() + " --out " + (dir / "out").string()), 0);
    std::ifstream in(dir / "out" / "divergence.csv");
    std::string line, last;
    while (std::getline(in, line)) last = line;
    EXPECT_GT(std::stod(last.substr(last.find(',') + 1)), 0.5);
}

TEST_F(Cli, CornerHitExitsDistinctlyWithPartialTrajectory) {
    const auto cfg = config(
        R"({"table":{"builtin":"square"},"experiment":{"kind":"simulate","start":[0.25,0.5],"direction":[1,-2],"bounces":10}})");
    EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (dir / "out").string()), kExitCornerHit);
    const json err = json::parse(slurp(dir / "out" / "error.json"));
    EXPECT_EQ(err["error"], "corner_hit");
    EXPECT_EQ(err["event_index"], 2);
    EXPECT_EQ(line_count(dir / "out" / "trajectory.csv"), 3);
}

TEST_F(Cli, ConfigErrorsWriteRecord) {
    const auto cfg = config(R"({"table":{"builtin":"square"},"experiment":{"kind":"simulate","bogus":1}})");
    EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (dir / "out").string()), kExitConfig);
    const json err = json::parse(slurp(dir / "out" / "error.json"));
    EXPECT_EQ(err["error"], "config");
    EXPECT_EQ(err["field"], "experiment.bogus");
}

TEST_F(Cli, KindMismatchIsConfigError) {
    const auto cfg = config(R"({"table":{"builtin":"square"},"experiment":{"kind":"angles"}})");
    EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (dir / "out").string()), kExitConfig);
    EXPECT_TRUE(fs::exists(dir / "out" / "error.json"));
}

TEST_F(Cli, ErrorRecordIffNonZeroExit) {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"angles", R"({"table":{"builtin":"sinai"},"experiment":{"kind":"angles"}})"},
        {"coverage", R"({"table":{"builtin":"square"},"experiment":{"kind":"coverage","start":[0.3,0.1],"direction":[1,1],"bounces":50}})"},
        {"lyapunov", R"({"table":{"builtin":"square"},"experiment":{"kind":"lyapunov","start":[0.25,0.5],"direction":[1,-2]}})"},
        {"diverge", R"({"table":{"builtin":"stadium"},"experiment":{"kind":"diverge","offset":-1}})"},
        {"quantum", R"({"table":{"builtin":"square"},"experiment":{"kind":"quantum","spacing":0.05,"t_final":0.001,"dt":0.0005,"packet":{"center":[0.5,0.5],"sigma":0.1}}})"},
    };
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto out = dir / ("out" + std::to_string(i));
        const int code = run_cli(cases[i].first + " --config " + config(cases[i].second).string() + " --out " + out.string());
        EXPECT_EQ(code != 0, fs::exists(out / "error.json")) << cases[i].first << " exit " << code;
    }
    const auto out = dir / "missing";
    EXPECT_EQ(run_cli("simulate --config " + (dir / "nope.json").string() + " --out " + out.string()), kExitConfig);
    EXPECT_TRUE(fs::exists(out / "error.json"));
}

TEST_F(Cli, TableSubcommandFeedsConfigs) {
    ASSERT_EQ(run_cli("table --builtin sinai --radius 0.25 --out " + (dir / "sinai.json").string()), 0);
    const Table t = load_table(dir / "sinai.json");
    EXPECT_EQ(t.size(), 5u);
    EXPECT_FALSE(contains(t, {0.5, 0.74}));
    const auto cfg = config(R"({"table":{"file":"sinai.json"},"experiment":{"kind":"angles","start":[0.1,0.1]}})");
    EXPECT_EQ(run_cli("angles --config " + cfg.string() + " --out " + (dir / "out").string()), 0);
    EXPECT_EQ(run_cli("table --builtin hexagon --out " + (dir / "x.json").string()), kExitConfig);
}

TEST_F(Cli, ReproducibleFromResolvedConfig) {
    const auto cfg = config(R"({"table":{"builtin":"stadium"},"experiment":{"kind":"lyapunov","renormalizations":50,"ensemble":[{"start":[0.5,0.1],"direction":[2,1]},{"start":[-1.5,0.2],"direction":[0,1]}]}})");
    ASSERT_EQ(run_cli("lyapunov --jobs 3 --config " + cfg.string() + " --out " + (dir / "a").string()), 0);
    ASSERT_EQ(run_cli("lyapunov --config " + (dir / "a" / "resolved-config.json").string() + " --out " +
                      (dir / "b").string()),
              0);
    EXPECT_EQ(slurp(dir / "a" / "lyapunov.json"), slurp(dir / "b" / "lyapunov.json"));
    EXPECT_EQ(slurp(dir / "a" / "resolved-config.json"), slurp(dir / "b" / "resolved-config.json"));
    const json summary = json::parse(slurp(dir / "a" / "lyapunov.json"));
    EXPECT_EQ(summary["ensemble"].size(), 3u);
}

TEST_F(Cli, QuantumSnapshotsAndLog) {
    const auto cfg = config(R"({"table":{"builtin":"stadium"},"experiment":{"kind":"quantum","spacing":0.05,"dt":0.001,"t_final":0.05,"snapshot_every":10}})");
    ASSERT_EQ(run_cli("quantum --config " + cfg.string() + " --out " + (dir / "out").string()), 0);
    std::ifstream log(dir / "out" / "snapshots.jsonl");
    double prev = -1.0;
    int n = 0;
    for (std::string line; std::getline(log, line); ++n) {
        const json rec = json::parse(line);
        EXPECT_GT(rec["time"].get<double>(), prev);
        prev = rec["time"];
        const std::string base = rec["file"];
        EXPECT_TRUE(fs::exists(dir / "out" / (base + ".pgm")));
        const json side = json::parse(slurp(dir / "out" / (base + ".json")));
        EXPECT_EQ(fs::file_size(dir / "out" / (base + ".bin")), 8u * side["nx"].get<std::size_t>() * side["ny"].get<std::size_t>());
        EXPECT_NEAR(side["norm"].get<double>(), 1.0, 1e-10);
    }
    EXPECT_EQ(n, 6);
}
