#pragma once
/**
 * @file dynamics.hpp
 * @brief Event-driven motion of a point ball: free flight plus specular reflection.
 *
 * The ball moves at unit speed, so path length doubles as time. Nothing in
 * here is random: identical inputs give bit-identical trajectories.
 */

#include <optional>
#include <string>
#include <vector>

#include "billiards/geometry.hpp"

namespace billiards {

struct BallState {
    Vec2 position;
    Vec2 direction;  ///< unit length
};

struct CollisionEvent {
    int index{0};  ///< 1-based bounce number
    Vec2 point;
    int wall_id{-1};
    Vec2 dir_in;
    Vec2 dir_out;
    double incidence_angle{0.0};  ///< radians in [0, pi/2], measured from the inward normal
    double path_length{0.0};      ///< total path travelled up to and including this bounce
};

/// Why a simulation stopped before producing every requested bounce.
struct Truncation {
    enum class Kind { CornerHit, LeakedBall, Tangency };
    Kind kind{Kind::CornerHit};
    int event_index{0};  ///< index the failed bounce would have had
    Vec2 point;
    int wall_id{-1};
    std::string message;
};

const char* to_string(Truncation::Kind kind);

struct Trajectory {
    BallState initial;
    std::vector<CollisionEvent> events;
    std::optional<Truncation> truncation;

    bool truncated() const { return truncation.has_value(); }
    double path_length() const { return events.empty() ? 0.0 : events.back().path_length; }
    /// Position and direction after the last recorded bounce.
    BallState final_state() const;
};

/// Specular reflection d' = d - 2(d.n)n. Throws TangentialHit unless d.n < 0.
Vec2 reflect(Vec2 direction, Vec2 inward_normal);

/// Angle between the outgoing ray and the inward normal (equivalently between -dir_in and it).
double incidence_angle(Vec2 dir_in, Vec2 inward_normal);

/// Throws InvalidArgument unless the direction is unit and the position strictly interior.
void validate_state(const Table& table, const BallState& state);

/// Nearest wall hit ahead of the ball. The wall just left is skipped if it is a
/// Segment; Arcs rely on t_min alone since a chord may legitimately re-hit them.
/// Throws LeakedBall when nothing is hit and CornerHit near a non-smooth junction.
Hit next_collision(const Table& table, const BallState& state, std::optional<int> previous_wall,
                   int event_index = 1);

/// Runs n_bounces collisions. A corner, leak or tangency stops the run early and is
/// recorded in Trajectory::truncation; the events produced so far are kept.
Trajectory simulate(const Table& table, const BallState& initial, int n_bounces);

/// Like simulate, but stops at the first bounce whose path length reaches min_path_length.
Trajectory simulate_path_length(const Table& table, const BallState& initial,
                                double min_path_length);

/// Points along the piecewise-linear path with gaps no larger than spacing.
/// Every collision point and both end points are included.
std::vector<Vec2> resample_path(const Trajectory& trajectory, double spacing);

/// Positions at path lengths 0, spacing, 2*spacing, ... up to max_length
/// (clamped to the trajectory's recorded path length).
std::vector<Vec2> positions_at_spacing(const Trajectory& trajectory, double spacing,
                                       double max_length);

/// A ball in flight, used for stepping by path length rather than by bounce.
struct Flight {
    BallState state;
    std::optional<int> last_wall;
    long bounces{0};
};

/// Moves the ball exactly `length` along its path, reflecting at every wall met.
/// Reaching a wall exactly at the end of the step counts as a bounce.
/// Throws CornerHit / LeakedBall / TangentialHit.
void advance(const Table& table, Flight& flight, double length);

}  // namespace billiards
