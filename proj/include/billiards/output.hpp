#pragma once
/**
 * @file output.hpp
 * @brief Plain-data writers for trajectories, diagnostics and density snapshots.
 *
 * Doubles are written with 17 significant digits so files round-trip exactly
 * and identical inputs give byte-identical files.
 *
 *   trajectory.csv  index,x,y,wall_id,dir_in_x,dir_in_y,dir_out_x,dir_out_y,incidence_angle,path_length
 *                   row 0 is the initial state: its direction sits in dir_out_*,
 *                   wall/dir_in/angle fields are empty and path_length is 0.
 *   angles.csv      event_index,angle
 *   divergence.csv  path_length,separation
 *   density PGM     P5, maxval 65535, big-endian samples scaled to the snapshot maximum;
 *                   the first image row is the top (largest y) grid row.
 *   density raw     little-endian float64, row-major with row 0 at the smallest y,
 *                   plus a JSON sidecar {nx, ny, h, origin, time, norm}.
 */

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "billiards/chaos.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/quantum.hpp"

namespace billiards {

/// Shortest text that parses back to the same double (17 significant digits).
std::string format_double(double v);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_angles_csv(std::ostream& out, std::span<const int> event_indices, std::span<const double> angles);
void write_divergence_csv(std::ostream& out, const DivergenceSeries& series);

nlohmann::json lyapunov_json(const LyapunovEstimate& estimate);

/// "density_t<time>" with six decimals, e.g. density_t0.050000.
std::string snapshot_basename(double time);

void write_density_pgm(std::ostream& out, const RealGrid& density);
void write_density_raw(std::ostream& out, const RealGrid& density);
nlohmann::json density_sidecar(const WaveField& field);
/// One metadata-log record: {time, norm, centroid, spread}.
nlohmann::json snapshot_record(const WaveField& field);

/// Reads back a raw density dump written by write_density_raw.
RealGrid read_density_raw(std::istream& in, int nx, int ny);

/// Writes `content` to `path`, throwing Error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace billiards
