// billiard: command line front end for the billiard simulation library.

#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "billiards/config.hpp"
#include "billiards/run.hpp"
#include "billiards/table_io.hpp"

namespace {

namespace fs = std::filesystem;

constexpr const char* kUnitsNote =
    "Coordinates are dimensionless table units; balls move at unit speed so path length is time.\n"
    "Quantum runs solve i dpsi/dt = -1/2 lap psi (hbar = m = 1) with hard walls, Crank-Nicolson in time.";

struct ExperimentArgs {
    std::string config;
    std::string out;
    int jobs{1};
};

}  // namespace

int main(int argc, char** argv) {
    using namespace billiards;

    CLI::App app{std::string("Classical and quantum billiard experiments.\n") + kUnitsNote, "billiard"};
    app.require_subcommand(1);

    const std::vector<std::pair<ExperimentKind, const char*>> experiments = {
        {ExperimentKind::Simulate, "Event-driven trajectory -> trajectory.csv"},
        {ExperimentKind::Angles, "Incidence angles on one wall -> angles.csv, angles-summary.json"},
        {ExperimentKind::Diverge, "Separation of two nearby balls -> divergence.csv"},
        {ExperimentKind::Lyapunov, "Finite-time Lyapunov exponent -> lyapunov.json"},
        {ExperimentKind::Coverage, "Grid coverage of a resampled path -> coverage.json"},
        {ExperimentKind::Quantum, "Wave-packet propagation -> density snapshots + snapshots.jsonl"},
    };
    std::vector<ExperimentArgs> args(experiments.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        auto* sub = app.add_subcommand(to_string(experiments[i].first), experiments[i].second);
        sub->add_option("--config", args[i].config, "JSON run configuration")->required();
        sub->add_option("--out", args[i].out, "Output directory")->required();
        sub->add_option("--jobs", args[i].jobs, "Worker threads for independent initial conditions")
            ->check(CLI::PositiveNumber);
        subs.push_back(sub);
    }

    std::string builtin;
    double side = 1.0;
    std::vector<double> center{SinaiDefaults::center.x, SinaiDefaults::center.y};
    double radius = -1.0;
    double straight = 2.0;
    std::string table_out;
    auto* table_cmd = app.add_subcommand("table", "Write a builtin table as a JSON table file");
    table_cmd->add_option("--builtin", builtin, "square | sinai | stadium")
        ->required()
        ->check(CLI::IsMember({"square", "sinai", "stadium"}));
    table_cmd->add_option("--side", side, "Square side length (square, sinai)");
    table_cmd->add_option("--center", center, "Obstacle centre x y (sinai)")->expected(2);
    table_cmd->add_option("--radius", radius, "Obstacle radius (sinai, default 0.2) or cap radius (stadium, default 1)");
    table_cmd->add_option("--straight", straight, "Straight section length (stadium)");
    table_cmd->add_option("--out", table_out, "Output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (app.exit(e) == 0) return kExitOk;
        // No output directory is known yet, so the record goes to stderr only.
        write_error_record({}, "usage", e.what());
        return kExitConfig;
    }

    if (table_cmd->parsed()) {
        try {
            Table table = builtin == "square"  ? make_square(side)
                          : builtin == "sinai" ? make_sinai(side, {center[0], center[1]},
                                                            radius > 0.0 ? radius : SinaiDefaults::radius)
                                               : make_stadium(straight, radius > 0.0 ? radius : 1.0);
            save_table(table, table_out);
            return kExitOk;
        } catch (const std::exception& e) {
            write_error_record(fs::path(table_out).parent_path(), "table", e.what());
            return kExitConfig;
        }
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        RunOptions options{args[i].out, args[i].jobs};
        return run_config_file(args[i].config, experiments[i].first, options);
    }
    return kExitConfig;
}
