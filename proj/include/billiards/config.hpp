#pragma once
/**
 * @file config.hpp
 * @brief Strict JSON run configuration for the `billiard` command line tool.
 *
 * A configuration names one table and one experiment:
 *
 *   {"table": {"builtin": "square", "side": 1},
 *    "experiment": {"kind": "simulate", "start": [0.3, 0.3], "direction": [1, 2], "bounces": 300}}
 *
 * Unknown keys are rejected. Every default is filled in and the resolved
 * document (to_json) reproduces the run exactly. Directions are normalized
 * once at parse time; an already-unit direction is kept bit-for-bit so that
 * re-parsing a resolved config is a fixed point.
 */

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "billiards/dynamics.hpp"
#include "billiards/errors.hpp"
#include "billiards/quantum.hpp"

namespace billiards {

/// Malformed or invalid configuration. `field` is a dotted path such as "experiment.bounces".
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class ExperimentKind { Simulate, Angles, Diverge, Lyapunov, Coverage, Quantum };

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

struct TableSpec {
    std::string builtin;  ///< "square", "sinai", "stadium"; empty when loaded from file
    std::filesystem::path file;
    double side{1.0};
    Vec2 center{SinaiDefaults::center};
    double radius{0.0};
    double straight_length{2.0};
};

struct InitialCondition {
    Vec2 start;
    Vec2 direction;
};

struct RunConfig {
    TableSpec table_spec;
    std::shared_ptr<const Table> table;
    ExperimentKind kind{ExperimentKind::Simulate};

    InitialCondition initial;
    std::vector<InitialCondition> ensemble;  ///< extra Lyapunov starts

    int bounces{300};
    int wall{2};
    double tolerance{1e-3};
    double offset{1e-6};
    double path_length{60.0};
    double spacing{0.01};
    int renormalizations{200};
    int resolution{32};

    // quantum
    double grid_spacing{0.02};
    PacketSpec packet;
    double dt{1e-4};
    double t_final{0.5};
    int snapshot_every{1000};
    bool include_initial{true};
    double solver_tolerance{1e-12};
};

/// Parses and validates. `expected` (from the subcommand) fills in or must match
/// experiment.kind. Relative table-file paths are resolved against `base_dir`.
RunConfig parse_config(std::string_view text, std::optional<ExperimentKind> expected = std::nullopt,
                       const std::filesystem::path& base_dir = {});

/// Resolved configuration with every default written out.
nlohmann::json to_json(const RunConfig& config);

}  // namespace billiards
