#pragma once
/**
 * @file chaos.hpp
 * @brief Diagnostics separating integrable from chaotic tables.
 *
 * Note on coverage: the grid-coverage fraction is a proxy for mixing, not a
 * test of it. An irrational-slope orbit in the square is dense (its coverage
 * tends to 1) without being mixing, so contrasts against the square should
 * use rational-slope (periodic) orbits.
 */

#include <optional>
#include <span>
#include <vector>

#include "billiards/dynamics.hpp"

namespace billiards {

/// Incidence angles of the events on one wall, in event order.
std::vector<double> incidence_angles(const Trajectory& trajectory, int wall_id);

/// Event indices matching incidence_angles(trajectory, wall_id).
std::vector<int> incidence_event_indices(const Trajectory& trajectory, int wall_id);

/// Number of single-linkage clusters: sorted values split wherever a gap exceeds tolerance.
int distinct_angle_count(std::span<const double> angles, double tolerance);

struct DivergenceSample {
    double path_length;
    double separation;
};

struct DivergenceSeries {
    std::vector<DivergenceSample> samples;
    double initial_offset{0.0};
    bool truncated{false};

    double max_separation() const;
};

/// Initial state displaced perpendicular to its direction by `offset`; direction unchanged.
BallState transverse_offset(const BallState& state, double offset);

/// Separation of two balls matched by path length (not bounce index) on a
/// common grid of spacing sample_spacing up to total_path_length. A truncated
/// trajectory cuts the series at the shorter valid path.
DivergenceSeries separation_series(const Table& table, const BallState& a, const BallState& b,
                                   double total_path_length, double sample_spacing);

struct LyapunovEstimate {
    double exponent{0.0};  ///< growth rate per unit path length
    int n_renormalizations{0};
    double offset{0.0};
    double path_length{0.0};
    bool valid{false};
    std::optional<Truncation> failure;  ///< set when a corner hit or leak ended the run
};

inline constexpr double kDefaultLyapunovOffset = 1e-9;
inline constexpr int kMinRenormalizations = 10;

/// Benettin-style finite-time Lyapunov exponent.
///
/// A reference ball and a transversely displaced companion are advanced by the
/// same path length. Each step carries the reference through its next bounce
/// and on to the middle of the following free flight, so both balls are in
/// flight with the same bounce history when compared. The phase-space
/// separation d = sqrt(|dx|^2 + |dv|^2) is logged as ln(d/offset) and the
/// companion is pulled back to distance `offset` along the same separation
/// vector. exponent = sum ln(d/offset) / reference path length.
///
/// A corner hit or leak ends the run early with valid = false.
LyapunovEstimate lyapunov_estimate(const Table& table, const BallState& initial,
                                   double offset = kDefaultLyapunovOffset,
                                   int n_renormalizations = 200);

/// Fraction of interior grid cells (centre strictly inside the table) visited by
/// at least one point, on a resolution x resolution grid over the bounding box.
double coverage_fraction(std::span<const Vec2> points, const Table& table, int grid_resolution);

}  // namespace billiards
