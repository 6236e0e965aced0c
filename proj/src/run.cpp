#include "billiards/run.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "billiards/chaos.hpp"
#include "billiards/output.hpp"
#include "billiards/quantum.hpp"

namespace billiards {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// A truncated trajectory, already flushed to disk, that must surface as a failure.
struct Truncated {
    Truncation truncation;
};

void write_stream_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw Error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json truncation_json(const Truncation& t) {
    return {{"event_index", t.event_index}, {"point", {t.point.x, t.point.y}}, {"wall_id", t.wall_id}};
}

BallState state_of(const InitialCondition& ic) { return {ic.start, ic.direction}; }

void check(const Trajectory& traj) {
    if (traj.truncation) throw Truncated{*traj.truncation};
}

void run_simulate(const RunConfig& cfg, const fs::path& out) {
    const auto traj = simulate(*cfg.table, state_of(cfg.initial), cfg.bounces);
    write_stream_file(out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    check(traj);
}

void run_angles(const RunConfig& cfg, const fs::path& out) {
    const auto traj = simulate(*cfg.table, state_of(cfg.initial), cfg.bounces);
    const auto angles = incidence_angles(traj, cfg.wall);
    const auto indices = incidence_event_indices(traj, cfg.wall);
    write_stream_file(out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    write_stream_file(out / "angles.csv", [&](std::ostream& os) { write_angles_csv(os, indices, angles); });
    write_json(out / "angles-summary.json", {{"wall", cfg.wall},
                                             {"tolerance", cfg.tolerance},
                                             {"hits", angles.size()},
                                             {"distinct_angles", distinct_angle_count(angles, cfg.tolerance)},
                                             {"bounces", traj.events.size()}});
    check(traj);
}

void run_diverge(const RunConfig& cfg, const fs::path& out) {
    const BallState a = state_of(cfg.initial);
    const BallState b = transverse_offset(a, cfg.offset);
    const auto series = separation_series(*cfg.table, a, b, cfg.path_length, cfg.spacing);
    write_stream_file(out / "divergence.csv", [&](std::ostream& os) { write_divergence_csv(os, series); });
    write_json(out / "divergence-summary.json",
               {{"initial_offset", series.initial_offset},
                {"max_separation", series.max_separation()},
                {"final_separation", series.samples.empty() ? 0.0 : series.samples.back().separation},
                {"samples", series.samples.size()},
                {"truncated", series.truncated}});
    if (series.truncated) {
        // Re-run both legs to name the event that stopped the series.
        for (const BallState& s : {a, b}) check(simulate_path_length(*cfg.table, s, cfg.path_length));
    }
}

void run_lyapunov(const RunConfig& cfg, const fs::path& out, int jobs) {
    std::vector<InitialCondition> starts{cfg.initial};
    starts.insert(starts.end(), cfg.ensemble.begin(), cfg.ensemble.end());
    std::vector<LyapunovEstimate> results(starts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < starts.size(); i = next++) {
            results[i] = lyapunov_estimate(*cfg.table, state_of(starts[i]), cfg.offset, cfg.renormalizations);
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1 || starts.size() == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, starts.size()); ++t) pool.emplace_back(worker);
    }

    json summary = lyapunov_json(results.front());
    if (!cfg.ensemble.empty()) {
        json list = json::array();
        double sum = 0.0;
        for (std::size_t i = 0; i < results.size(); ++i) {
            json item = lyapunov_json(results[i]);
            item["start"] = {starts[i].start.x, starts[i].start.y};
            item["direction"] = {starts[i].direction.x, starts[i].direction.y};
            list.push_back(std::move(item));
            sum += results[i].exponent;
        }
        summary["ensemble"] = std::move(list);
        summary["mean_exponent"] = sum / static_cast<double>(results.size());
    }
    write_json(out / "lyapunov.json", summary);

    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].failure) throw Truncated{*results[i].failure};
    }
}

void run_coverage(const RunConfig& cfg, const fs::path& out) {
    const auto traj = simulate(*cfg.table, state_of(cfg.initial), cfg.bounces);
    const auto points = resample_path(traj, cfg.spacing);
    const double fraction = coverage_fraction(points, *cfg.table, cfg.resolution);
    write_json(out / "coverage.json", {{"fraction", fraction},
                                       {"resolution", cfg.resolution},
                                       {"points", points.size()},
                                       {"bounces", traj.events.size()},
                                       {"path_length", traj.path_length()}});
    check(traj);
}

void run_quantum(const RunConfig& cfg, const fs::path& out) {
    const auto grid = build_grid(*cfg.table, cfg.grid_spacing);
    const auto initial = gaussian_packet(grid, cfg.packet);
    EvolveOptions opts;
    opts.t_final = cfg.t_final;
    opts.dt = cfg.dt;
    opts.snapshot_every = cfg.snapshot_every;
    opts.include_initial = cfg.include_initial;
    opts.step.tolerance = cfg.solver_tolerance;

    std::ofstream log(out / "snapshots.jsonl", std::ios::binary);
    if (!log) throw Error("cannot open snapshots.jsonl for writing");
    evolve(initial, opts, [&](const WaveField& field, long step_index) {
        const auto rho = density(field);
        const auto base = snapshot_basename(field.time);
        write_stream_file(out / (base + ".pgm"), [&](std::ostream& os) { write_density_pgm(os, rho); });
        write_stream_file(out / (base + ".bin"), [&](std::ostream& os) { write_density_raw(os, rho); });
        write_json(out / (base + ".json"), density_sidecar(field));
        json record = snapshot_record(field);
        record["step"] = step_index;
        record["file"] = base;
        log << record.dump() << '\n';
        log.flush();
    });
    if (!log) throw Error("failed writing snapshots.jsonl");
}

}  // namespace

bool write_error_record(const fs::path& out_dir, const std::string& kind, const std::string& message,
                        const json& extra) {
    json record = extra;
    record["error"] = kind;
    record["message"] = message;
    std::cerr << record.dump() << '\n';
    try {
        if (out_dir.empty()) return false;
        fs::create_directories(out_dir);
        write_json(out_dir / "error.json", record);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

int run(const RunConfig& config, const RunOptions& options) {
    const fs::path& out = options.out_dir;
    try {
        fs::create_directories(out);
        fs::remove(out / "error.json");
        write_json(out / "resolved-config.json", to_json(config));
        switch (config.kind) {
            case ExperimentKind::Simulate: run_simulate(config, out); break;
            case ExperimentKind::Angles: run_angles(config, out); break;
            case ExperimentKind::Diverge: run_diverge(config, out); break;
            case ExperimentKind::Lyapunov: run_lyapunov(config, out, options.jobs); break;
            case ExperimentKind::Coverage: run_coverage(config, out); break;
            case ExperimentKind::Quantum: run_quantum(config, out); break;
        }
        return kExitOk;
    } catch (const Truncated& t) {
        const bool corner = t.truncation.kind == Truncation::Kind::CornerHit;
        write_error_record(out, to_string(t.truncation.kind), t.truncation.message, truncation_json(t.truncation));
        return corner ? kExitCornerHit : kExitLeakedBall;
    } catch (const ConfigError& e) {
        write_error_record(out, "config", e.what(), {{"field", e.field()}});
        return kExitConfig;
    } catch (const CornerHit& e) {
        write_error_record(out, "corner_hit", e.what(),
                           {{"event_index", e.event_index()}, {"point", {e.point().x, e.point().y}}});
        return kExitCornerHit;
    } catch (const LeakedBall& e) {
        write_error_record(out, "leaked_ball", e.what(), {{"event_index", e.event_index()}});
        return kExitLeakedBall;
    } catch (const TangentialHit& e) {
        write_error_record(out, "tangency", e.what());
        return kExitLeakedBall;
    } catch (const SolverError& e) {
        write_error_record(out, "solver", e.what(), {{"residual", e.residual()}, {"iterations", e.iterations()}});
        return kExitFailure;
    } catch (const std::exception& e) {
        write_error_record(out, "runtime", e.what());
        return kExitFailure;
    }
}

int run_config_file(const fs::path& config_path, ExperimentKind kind, const RunOptions& options) {
    RunConfig cfg;
    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw ConfigError("", "cannot read config file " + config_path.string());
        std::stringstream text;
        text << in.rdbuf();
        cfg = parse_config(text.str(), kind, fs::absolute(config_path).parent_path());
    } catch (const ConfigError& e) {
        write_error_record(options.out_dir, "config", e.what(), {{"field", e.field()}});
        return kExitConfig;
    }
    return run(cfg, options);
}

}  // namespace billiards
