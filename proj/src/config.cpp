#include "billiards/config.hpp"

#include <cmath>
#include <set>

#include "billiards/chaos.hpp"
#include "billiards/table_io.hpp"

namespace billiards {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(where.empty() ? key : where + "." + key, "unknown key \"" + key + "\"");
        }
    }
}

const json& require_object(const json& parent, const std::string& key, const std::string& where) {
    if (!parent.contains(key)) throw ConfigError(where, "missing required key \"" + key + "\"");
    const auto& v = parent.at(key);
    if (!v.is_object()) throw ConfigError(where.empty() ? key : where + "." + key, "expected an object");
    return v;
}

double get_number(const json& obj, const std::string& key, double fallback, const std::string& field) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
    return d;
}

int get_int(const json& obj, const std::string& key, int fallback, const std::string& field) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
    const auto i = v.get<long long>();
    if (i < -2'000'000'000LL || i > 2'000'000'000LL) throw ConfigError(field, "integer out of range");
    return static_cast<int>(i);
}

bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& field) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
    return v.get<bool>();
}

Vec2 get_point(const json& obj, const std::string& key, Vec2 fallback, const std::string& field) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(field, "expected [x, y]");
    }
    const Vec2 p{v[0].get<double>(), v[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError(field, "must be finite");
    return p;
}

// Unit vectors pass through untouched so that resolved configs re-parse bit-exactly.
Vec2 normalize_direction(Vec2 d, const std::string& field) {
    const double n = d.norm();
    if (!(n > 0.0)) throw ConfigError(field, "direction must be non-zero");
    if (std::abs(n - 1.0) <= 1e-15) return d;
    return d / n;
}

void require(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) throw ConfigError(field, constraint);
}

TableSpec parse_table_spec(const json& t, const std::filesystem::path& base_dir) {
    TableSpec spec;
    if (t.contains("file")) {
        reject_unknown(t, {"file"}, "table");
        if (!t.at("file").is_string()) throw ConfigError("table.file", "expected a path string");
        std::filesystem::path p = t.at("file").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        spec.file = std::filesystem::absolute(p).lexically_normal();
        if (!std::filesystem::exists(spec.file)) throw ConfigError("table.file", "file not found: " + spec.file.string());
        return spec;
    }
    if (!t.contains("builtin") || !t.at("builtin").is_string()) {
        throw ConfigError("table", "expected \"builtin\" (square|sinai|stadium) or \"file\"");
    }
    spec.builtin = t.at("builtin").get<std::string>();
    if (spec.builtin == "square") {
        reject_unknown(t, {"builtin", "side"}, "table");
        spec.side = get_number(t, "side", 1.0, "table.side");
    } else if (spec.builtin == "sinai") {
        reject_unknown(t, {"builtin", "side", "center", "radius"}, "table");
        spec.side = get_number(t, "side", SinaiDefaults::side, "table.side");
        spec.center = get_point(t, "center", SinaiDefaults::center, "table.center");
        spec.radius = get_number(t, "radius", SinaiDefaults::radius, "table.radius");
    } else if (spec.builtin == "stadium") {
        reject_unknown(t, {"builtin", "straight_length", "radius"}, "table");
        spec.straight_length = get_number(t, "straight_length", 2.0, "table.straight_length");
        spec.radius = get_number(t, "radius", 1.0, "table.radius");
    } else {
        throw ConfigError("table.builtin", "expected square, sinai or stadium, got \"" + spec.builtin + "\"");
    }
    return spec;
}

Table build_table(const TableSpec& spec) {
    try {
        if (!spec.file.empty()) return load_table(spec.file);
        if (spec.builtin == "square") return make_square(spec.side);
        if (spec.builtin == "sinai") return make_sinai(spec.side, spec.center, spec.radius);
        return make_stadium(spec.straight_length, spec.radius);
    } catch (const InvalidArgument& e) {
        throw ConfigError(spec.file.empty() ? "table" : "table.file", e.what());
    }
}

json table_spec_json(const TableSpec& spec) {
    if (!spec.file.empty()) return {{"file", spec.file.string()}};
    if (spec.builtin == "square") return {{"builtin", "square"}, {"side", spec.side}};
    if (spec.builtin == "sinai") {
        return {{"builtin", "sinai"}, {"side", spec.side}, {"center", {spec.center.x, spec.center.y}}, {"radius", spec.radius}};
    }
    return {{"builtin", "stadium"}, {"straight_length", spec.straight_length}, {"radius", spec.radius}};
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

InitialCondition parse_initial(const json& obj, const std::string& where) {
    InitialCondition ic;
    ic.start = get_point(obj, "start", {0.3, 0.3}, where + ".start");
    ic.direction = normalize_direction(get_point(obj, "direction", {1.0, 2.0}, where + ".direction"),
                                       where + ".direction");
    return ic;
}

void check_start(const Table& table, const InitialCondition& ic, const std::string& where) {
    require(contains(table, ic.start), where + ".start", "start position must lie strictly inside the table");
}

}  // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Angles: return "angles";
        case ExperimentKind::Diverge: return "diverge";
        case ExperimentKind::Lyapunov: return "lyapunov";
        case ExperimentKind::Coverage: return "coverage";
        case ExperimentKind::Quantum: return "quantum";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
    for (auto k : {ExperimentKind::Simulate, ExperimentKind::Angles, ExperimentKind::Diverge, ExperimentKind::Lyapunov,
                   ExperimentKind::Coverage, ExperimentKind::Quantum}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

RunConfig parse_config(std::string_view text, std::optional<ExperimentKind> expected,
                       const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw ConfigError("", "parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                                  ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
    reject_unknown(doc, {"table", "experiment"}, "");

    RunConfig cfg;
    cfg.table_spec = parse_table_spec(require_object(doc, "table", ""), base_dir);

    json exp = json::object();
    if (doc.contains("experiment")) exp = require_object(doc, "experiment", "");
    else if (!expected) throw ConfigError("", "missing required key \"experiment\"");

    if (exp.contains("kind")) {
        if (!exp.at("kind").is_string()) throw ConfigError("experiment.kind", "expected a string");
        const auto name = exp.at("kind").get<std::string>();
        const auto kind = parse_experiment_kind(name);
        if (!kind) throw ConfigError("experiment.kind", "unknown experiment kind \"" + name + "\"");
        if (expected && *expected != *kind) {
            throw ConfigError("experiment.kind", "config describes \"" + name + "\" but the \"" +
                                                     to_string(*expected) + "\" subcommand was given");
        }
        cfg.kind = *kind;
    } else if (expected) {
        cfg.kind = *expected;
    } else {
        throw ConfigError("experiment", "missing required key \"kind\"");
    }

    const std::string e = "experiment";
    switch (cfg.kind) {
        case ExperimentKind::Simulate:
            reject_unknown(exp, {"kind", "start", "direction", "bounces"}, e);
            cfg.bounces = get_int(exp, "bounces", 300, e + ".bounces");
            break;
        case ExperimentKind::Angles:
            reject_unknown(exp, {"kind", "start", "direction", "bounces", "wall", "tolerance"}, e);
            cfg.bounces = get_int(exp, "bounces", 300, e + ".bounces");
            cfg.wall = get_int(exp, "wall", 2, e + ".wall");
            cfg.tolerance = get_number(exp, "tolerance", 1e-3, e + ".tolerance");
            break;
        case ExperimentKind::Diverge:
            reject_unknown(exp, {"kind", "start", "direction", "offset", "path_length", "spacing"}, e);
            cfg.offset = get_number(exp, "offset", 1e-6, e + ".offset");
            cfg.path_length = get_number(exp, "path_length", 60.0, e + ".path_length");
            cfg.spacing = get_number(exp, "spacing", 0.01, e + ".spacing");
            break;
        case ExperimentKind::Lyapunov:
            reject_unknown(exp, {"kind", "start", "direction", "offset", "renormalizations", "ensemble"}, e);
            cfg.offset = get_number(exp, "offset", kDefaultLyapunovOffset, e + ".offset");
            cfg.renormalizations = get_int(exp, "renormalizations", 200, e + ".renormalizations");
            if (exp.contains("ensemble")) {
                const auto& list = exp.at("ensemble");
                if (!list.is_array()) throw ConfigError(e + ".ensemble", "expected an array");
                for (std::size_t i = 0; i < list.size(); ++i) {
                    const std::string where = e + ".ensemble[" + std::to_string(i) + "]";
                    if (!list[i].is_object()) throw ConfigError(where, "expected an object");
                    reject_unknown(list[i], {"start", "direction"}, where);
                    cfg.ensemble.push_back(parse_initial(list[i], where));
                }
            }
            break;
        case ExperimentKind::Coverage:
            reject_unknown(exp, {"kind", "start", "direction", "bounces", "spacing", "resolution"}, e);
            cfg.bounces = get_int(exp, "bounces", 2000, e + ".bounces");
            cfg.spacing = get_number(exp, "spacing", 0.01, e + ".spacing");
            cfg.resolution = get_int(exp, "resolution", 32, e + ".resolution");
            break;
        case ExperimentKind::Quantum: {
            reject_unknown(exp, {"kind", "spacing", "packet", "dt", "t_final", "snapshot_every", "include_initial",
                                 "solver_tolerance"},
                           e);
            cfg.grid_spacing = get_number(exp, "spacing", 0.02, e + ".spacing");
            cfg.dt = get_number(exp, "dt", 1e-4, e + ".dt");
            cfg.t_final = get_number(exp, "t_final", 0.5, e + ".t_final");
            cfg.snapshot_every = get_int(exp, "snapshot_every", 1000, e + ".snapshot_every");
            cfg.include_initial = get_bool(exp, "include_initial", true, e + ".include_initial");
            cfg.solver_tolerance = get_number(exp, "solver_tolerance", 1e-12, e + ".solver_tolerance");
            json packet = json::object();
            if (exp.contains("packet")) packet = require_object(exp, "packet", e);
            reject_unknown(packet, {"center", "sigma", "k"}, e + ".packet");
            cfg.packet.sigma = get_number(packet, "sigma", 0.15, e + ".packet.sigma");
            cfg.packet.wavevector = get_point(packet, "k", {25.0, 0.0}, e + ".packet.k");
            // centre defaults to the bounding-box centre once the table is known
            if (packet.contains("center")) cfg.packet.center = get_point(packet, "center", {}, e + ".packet.center");
            else cfg.packet.center = {std::nan(""), std::nan("")};
            break;
        }
    }
    if (cfg.kind != ExperimentKind::Quantum) cfg.initial = parse_initial(exp, e);

    // Validation of every precondition happens here, before any compute.
    auto table = std::make_shared<const Table>(build_table(cfg.table_spec));
    cfg.table = table;
    switch (cfg.kind) {
        case ExperimentKind::Simulate:
            check_start(*table, cfg.initial, e);
            require(cfg.bounces >= 0, e + ".bounces", "must be >= 0");
            break;
        case ExperimentKind::Angles:
            check_start(*table, cfg.initial, e);
            require(cfg.bounces >= 0, e + ".bounces", "must be >= 0");
            require(cfg.wall >= 0 && static_cast<std::size_t>(cfg.wall) < table->size(), e + ".wall",
                    "must name a wall of the table (0.." + std::to_string(table->size() - 1) + ")");
            require(cfg.tolerance > 0.0, e + ".tolerance", "must be > 0");
            break;
        case ExperimentKind::Diverge:
            check_start(*table, cfg.initial, e);
            require(cfg.offset > 0.0, e + ".offset", "must be > 0");
            require(cfg.path_length > 0.0, e + ".path_length", "must be > 0");
            require(cfg.spacing > 0.0, e + ".spacing", "must be > 0");
            require(contains(*table, cfg.initial.start + cfg.offset * cfg.initial.direction.perp()), e + ".offset",
                    "displaced start must lie strictly inside the table");
            break;
        case ExperimentKind::Lyapunov:
            check_start(*table, cfg.initial, e);
            for (std::size_t i = 0; i < cfg.ensemble.size(); ++i) {
                check_start(*table, cfg.ensemble[i], e + ".ensemble[" + std::to_string(i) + "]");
            }
            require(cfg.offset > 0.0, e + ".offset", "must be > 0");
            require(cfg.renormalizations >= kMinRenormalizations, e + ".renormalizations",
                    "must be >= " + std::to_string(kMinRenormalizations));
            break;
        case ExperimentKind::Coverage:
            check_start(*table, cfg.initial, e);
            require(cfg.bounces >= 0, e + ".bounces", "must be >= 0");
            require(cfg.spacing > 0.0, e + ".spacing", "must be > 0");
            require(cfg.resolution >= 2, e + ".resolution", "must be >= 2");
            break;
        case ExperimentKind::Quantum: {
            const auto& box = table->bounding_box();
            if (std::isnan(cfg.packet.center.x)) cfg.packet.center = 0.5 * (box.min + box.max);
            require(cfg.grid_spacing > 0.0, e + ".spacing", "must be > 0");
            const double shorter = std::min(box.width(), box.height());
            require(std::ceil(shorter / cfg.grid_spacing - 1e-9) + 1 >= 5, e + ".spacing",
                    "too coarse: need at least 5 grid nodes across the table");
            require(cfg.packet.sigma > 0.0, e + ".packet.sigma", "must be > 0");
            require(contains(*table, cfg.packet.center), e + ".packet.center", "must lie strictly inside the table");
            require(cfg.dt > 0.0, e + ".dt", "must be > 0");
            require(cfg.t_final > 0.0, e + ".t_final", "must be > 0");
            require(cfg.snapshot_every >= 1, e + ".snapshot_every", "must be >= 1");
            require(cfg.solver_tolerance > 0.0, e + ".solver_tolerance", "must be > 0");
            break;
        }
    }
    return cfg;
}

json to_json(const RunConfig& cfg) {
    json exp{{"kind", to_string(cfg.kind)}};
    auto put_initial = [&](json& j, const InitialCondition& ic) {
        j["start"] = point_json(ic.start);
        j["direction"] = point_json(ic.direction);
    };
    switch (cfg.kind) {
        case ExperimentKind::Simulate:
            put_initial(exp, cfg.initial);
            exp["bounces"] = cfg.bounces;
            break;
        case ExperimentKind::Angles:
            put_initial(exp, cfg.initial);
            exp["bounces"] = cfg.bounces;
            exp["wall"] = cfg.wall;
            exp["tolerance"] = cfg.tolerance;
            break;
        case ExperimentKind::Diverge:
            put_initial(exp, cfg.initial);
            exp["offset"] = cfg.offset;
            exp["path_length"] = cfg.path_length;
            exp["spacing"] = cfg.spacing;
            break;
        case ExperimentKind::Lyapunov: {
            put_initial(exp, cfg.initial);
            exp["offset"] = cfg.offset;
            exp["renormalizations"] = cfg.renormalizations;
            if (!cfg.ensemble.empty()) {
                json list = json::array();
                for (const auto& ic : cfg.ensemble) {
                    json item;
                    put_initial(item, ic);
                    list.push_back(std::move(item));
                }
                exp["ensemble"] = std::move(list);
            }
            break;
        }
        case ExperimentKind::Coverage:
            put_initial(exp, cfg.initial);
            exp["bounces"] = cfg.bounces;
            exp["spacing"] = cfg.spacing;
            exp["resolution"] = cfg.resolution;
            break;
        case ExperimentKind::Quantum:
            exp["spacing"] = cfg.grid_spacing;
            exp["packet"] = {{"center", point_json(cfg.packet.center)},
                             {"sigma", cfg.packet.sigma},
                             {"k", point_json(cfg.packet.wavevector)}};
            exp["dt"] = cfg.dt;
            exp["t_final"] = cfg.t_final;
            exp["snapshot_every"] = cfg.snapshot_every;
            exp["include_initial"] = cfg.include_initial;
            exp["solver_tolerance"] = cfg.solver_tolerance;
            break;
    }
    return {{"table", table_spec_json(cfg.table_spec)}, {"experiment", std::move(exp)}};
}

}  // namespace billiards
