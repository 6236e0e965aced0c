#include "billiards/output.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "billiards/errors.hpp"

namespace billiards {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "index,x,y,wall_id,dir_in_x,dir_in_y,dir_out_x,dir_out_y,incidence_angle,path_length\n";
    const auto& s = trajectory.initial;
    out << fmt::format("0,{:.17g},{:.17g},,,,{:.17g},{:.17g},,0\n", s.position.x, s.position.y, s.direction.x,
                       s.direction.y);
    for (const auto& e : trajectory.events) {
        out << fmt::format("{},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", e.index,
                           e.point.x, e.point.y, e.wall_id, e.dir_in.x, e.dir_in.y, e.dir_out.x, e.dir_out.y,
                           e.incidence_angle, e.path_length);
    }
}

void write_angles_csv(std::ostream& out, std::span<const int> event_indices, std::span<const double> angles) {
    if (event_indices.size() != angles.size()) throw InvalidArgument("angle record size mismatch");
    out << "event_index,angle\n";
    for (std::size_t i = 0; i < angles.size(); ++i) out << fmt::format("{},{:.17g}\n", event_indices[i], angles[i]);
}

void write_divergence_csv(std::ostream& out, const DivergenceSeries& series) {
    out << "path_length,separation\n";
    for (const auto& s : series.samples) out << fmt::format("{:.17g},{:.17g}\n", s.path_length, s.separation);
}

nlohmann::json lyapunov_json(const LyapunovEstimate& estimate) {
    return {{"exponent", estimate.exponent},
            {"n_renormalizations", estimate.n_renormalizations},
            {"offset", estimate.offset},
            {"path_length", estimate.path_length},
            {"valid", estimate.valid}};
}

std::string snapshot_basename(double time) { return fmt::format("density_t{:.6f}", time); }

void write_density_pgm(std::ostream& out, const RealGrid& density) {
    out << "P5\n" << density.nx << ' ' << density.ny << "\n65535\n";
    const double peak = density.values.empty() ? 0.0 : *std::max_element(density.values.begin(), density.values.end());
    const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;
    std::string row(static_cast<std::size_t>(density.nx) * 2, '\0');
    for (int j = density.ny - 1; j >= 0; --j) {
        for (int i = 0; i < density.nx; ++i) {
            const auto v = static_cast<std::uint16_t>(std::lround(std::clamp(density.at(i, j) * scale, 0.0, 65535.0)));
            row[2 * static_cast<std::size_t>(i)] = static_cast<char>(v >> 8);
            row[2 * static_cast<std::size_t>(i) + 1] = static_cast<char>(v & 0xff);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

void write_density_raw(std::ostream& out, const RealGrid& density) {
    for (double v : density.values) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
        out.write(bytes, 8);
    }
}

RealGrid read_density_raw(std::istream& in, int nx, int ny) {
    RealGrid g{nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))};
    for (auto& v : g.values) {
        unsigned char bytes[8];
        if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error("raw density dump is truncated");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        v = std::bit_cast<double>(bits);
    }
    return g;
}

nlohmann::json density_sidecar(const WaveField& field) {
    const auto& g = *field.grid;
    return {{"nx", g.nx()},
            {"ny", g.ny()},
            {"h", g.spacing()},
            {"origin", {g.origin().x, g.origin().y}},
            {"time", field.time},
            {"norm", std::sqrt(norm_squared(field))}};
}

nlohmann::json snapshot_record(const WaveField& field) {
    const auto m = centroid_and_spread(field);
    return {{"time", field.time},
            {"norm", std::sqrt(norm_squared(field))},
            {"centroid", {m.centroid.x, m.centroid.y}},
            {"spread", m.spread}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace billiards
