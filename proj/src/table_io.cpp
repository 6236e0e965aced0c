#include "billiards/table_io.hpp"

#include <fstream>
#include <set>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

using nlohmann::json;

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

Vec2 point_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InvalidArgument(field + ": expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

double number_from(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw InvalidArgument(where + ": missing \"" + key + "\"");
    if (!obj.at(key).is_number()) throw InvalidArgument(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw InvalidArgument(where + ": unknown key \"" + key + "\"");
    }
}

}  // namespace

json table_to_json(const Table& table) {
    json walls = json::array();
    for (const auto& w : table.walls()) {
        if (const auto* seg = std::get_if<Segment>(&w.shape)) {
            walls.push_back({{"kind", "segment"}, {"p0", point_json(seg->p0)}, {"p1", point_json(seg->p1)}});
        } else {
            const auto& arc = std::get<Arc>(w.shape);
            walls.push_back({{"kind", "arc"},
                             {"center", point_json(arc.center)},
                             {"radius", arc.radius},
                             {"from", arc.angle_start},
                             {"to", arc.angle_end},
                             {"interior", arc.interior == ArcInterior::Inside ? "inside" : "outside"}});
        }
    }
    return json{{"walls", std::move(walls)}};
}

Table table_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("walls") || !doc.at("walls").is_array()) {
        throw InvalidArgument("table: expected an object with a \"walls\" array");
    }
    reject_unknown(doc, {"walls"}, "table");
    std::vector<WallShape> shapes;
    std::size_t index = 0;
    for (const auto& w : doc.at("walls")) {
        const std::string where = "walls[" + std::to_string(index++) + "]";
        if (!w.is_object() || !w.contains("kind") || !w.at("kind").is_string()) {
            throw InvalidArgument(where + ": expected an object with a string \"kind\"");
        }
        const auto kind = w.at("kind").get<std::string>();
        if (kind == "segment") {
            reject_unknown(w, {"kind", "p0", "p1"}, where);
            if (!w.contains("p0") || !w.contains("p1")) throw InvalidArgument(where + ": segment needs p0 and p1");
            shapes.emplace_back(Segment{point_from(w.at("p0"), where + ".p0"), point_from(w.at("p1"), where + ".p1")});
        } else if (kind == "arc") {
            reject_unknown(w, {"kind", "center", "radius", "from", "to", "interior"}, where);
            if (!w.contains("center")) throw InvalidArgument(where + ": arc needs a center");
            Arc arc;
            arc.center = point_from(w.at("center"), where + ".center");
            arc.radius = number_from(w, "radius", where);
            arc.angle_start = number_from(w, "from", where);
            arc.angle_end = number_from(w, "to", where);
            const auto interior = w.value("interior", std::string{});
            if (interior == "inside") {
                arc.interior = ArcInterior::Inside;
            } else if (interior == "outside") {
                arc.interior = ArcInterior::Outside;
            } else {
                throw InvalidArgument(where + ".interior: expected \"inside\" or \"outside\"");
            }
            shapes.emplace_back(arc);
        } else {
            throw InvalidArgument(where + ".kind: expected \"segment\" or \"arc\", got \"" + kind + "\"");
        }
    }
    return Table(std::move(shapes));
}

Table load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open table file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("table file " + path.string() + ": " + e.what());
    }
    return table_from_json(doc);
}

void save_table(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write table file " + path.string());
    out << table_to_json(table).dump(2) << '\n';
}

}  // namespace billiards
