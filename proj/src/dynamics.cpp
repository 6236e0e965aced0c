#include "billiards/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

constexpr double kUnitTolerance = 1e-12;

// Shared bounce loop; `done` is checked after each recorded event.
template <typename Done>
Trajectory run(const Table& table, const BallState& initial, long max_events, Done done) {
    validate_state(table, initial);
    Trajectory traj;
    traj.initial = initial;
    if (max_events > 0 && max_events < 1'000'000) traj.events.reserve(static_cast<std::size_t>(max_events));

    BallState state = initial;
    std::optional<int> previous;
    double path = 0.0;
    for (long i = 1; i <= max_events; ++i) {
        const int index = static_cast<int>(i);
        try {
            const Hit hit = next_collision(table, state, previous, index);
            const Vec2 out = reflect(state.direction, hit.inward_normal);
            path += hit.t;
            traj.events.push_back(CollisionEvent{index, hit.point, hit.wall_id, state.direction, out,
                                                 incidence_angle(out, hit.inward_normal), path});
            state = {hit.point, out};
            previous = hit.wall_id;
        } catch (const CornerHit& e) {
            traj.truncation = Truncation{Truncation::Kind::CornerHit, index, e.point(), e.wall_id(), e.what()};
            break;
        } catch (const LeakedBall& e) {
            traj.truncation = Truncation{Truncation::Kind::LeakedBall, index, e.position(), -1, e.what()};
            break;
        } catch (const TangentialHit& e) {
            traj.truncation = Truncation{Truncation::Kind::Tangency, index, state.position, -1, e.what()};
            break;
        }
        if (done(traj.events.back())) break;
    }
    return traj;
}

}  // namespace

const char* to_string(Truncation::Kind kind) {
    switch (kind) {
        case Truncation::Kind::CornerHit: return "corner_hit";
        case Truncation::Kind::LeakedBall: return "leaked_ball";
        case Truncation::Kind::Tangency: return "tangency";
    }
    return "unknown";
}

BallState Trajectory::final_state() const {
    if (events.empty()) return initial;
    return {events.back().point, events.back().dir_out};
}

Vec2 reflect(Vec2 direction, Vec2 inward_normal) {
    const double dn = direction.dot(inward_normal);
    if (!(dn < 0.0)) {
        throw TangentialHit("reflection requires an incoming direction (d.n = " + std::to_string(dn) + ")");
    }
    return (direction - (2.0 * dn) * inward_normal).normalized();
}

double incidence_angle(Vec2 dir, Vec2 inward_normal) {
    // atan2 keeps full precision near normal incidence where acos would not.
    return std::atan2(std::abs(dir.cross(inward_normal)), std::abs(dir.dot(inward_normal)));
}

void validate_state(const Table& table, const BallState& state) {
    if (!(std::abs(state.direction.norm() - 1.0) <= kUnitTolerance)) {
        throw InvalidArgument("ball direction must be a unit vector");
    }
    if (!contains(table, state.position)) {
        throw InvalidArgument("ball position (" + std::to_string(state.position.x) + ", " +
                              std::to_string(state.position.y) + ") is not strictly inside the table");
    }
}

Hit next_collision(const Table& table, const BallState& state, std::optional<int> previous_wall,
                   int event_index) {
    std::optional<Hit> best;
    for (const auto& wall : table.walls()) {
        if (previous_wall && *previous_wall == wall.id && wall.is_segment()) continue;
        auto hit = ray_wall_intersect(state.position, state.direction, wall);
        if (hit && (!best || hit->t < best->t)) best = hit;
    }
    if (!best) throw LeakedBall(state.position, state.direction, event_index);
    for (Vec2 corner : table.corners()) {
        if (distance(corner, best->point) <= kCornerTolerance) {
            throw CornerHit(best->point, best->wall_id, event_index);
        }
    }
    return *best;
}

Trajectory simulate(const Table& table, const BallState& initial, int n_bounces) {
    if (n_bounces < 0) throw InvalidArgument("bounce count must be non-negative");
    return run(table, initial, n_bounces, [](const CollisionEvent&) { return false; });
}

Trajectory simulate_path_length(const Table& table, const BallState& initial, double min_path_length) {
    if (!(min_path_length >= 0.0) || !std::isfinite(min_path_length)) {
        throw InvalidArgument("path length must be finite and non-negative");
    }
    if (min_path_length == 0.0) return simulate(table, initial, 0);
    return run(table, initial, std::numeric_limits<long>::max(),
               [&](const CollisionEvent& e) { return e.path_length >= min_path_length; });
}

std::vector<Vec2> resample_path(const Trajectory& trajectory, double spacing) {
    if (!(spacing > 0.0)) throw InvalidArgument("resample spacing must be positive");
    std::vector<Vec2> points;
    Vec2 from = trajectory.initial.position;
    points.push_back(from);
    for (const auto& e : trajectory.events) {
        const Vec2 to = e.point;
        const double len = distance(from, to);
        const auto pieces = static_cast<long>(std::ceil(len / spacing));
        for (long k = 1; k < pieces; ++k) {
            const double u = static_cast<double>(k) / static_cast<double>(pieces);
            points.push_back(from + u * (to - from));
        }
        points.push_back(to);
        from = to;
    }
    return points;
}

std::vector<Vec2> positions_at_spacing(const Trajectory& trajectory, double spacing, double max_length) {
    if (!(spacing > 0.0)) throw InvalidArgument("sample spacing must be positive");
    const double limit = std::min(max_length, trajectory.path_length());
    const auto count = static_cast<long>(std::floor(limit / spacing * (1.0 + 1e-12))) + 1;
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count));

    std::size_t leg = 0;  // leg i runs from bounce i (0 = start) to bounce i+1
    auto leg_start = [&](std::size_t i) { return i == 0 ? trajectory.initial.position : trajectory.events[i - 1].point; };
    auto leg_dir = [&](std::size_t i) { return i == 0 ? trajectory.initial.direction : trajectory.events[i - 1].dir_out; };
    auto leg_begin = [&](std::size_t i) { return i == 0 ? 0.0 : trajectory.events[i - 1].path_length; };

    for (long k = 0; k < count; ++k) {
        const double s = std::min(static_cast<double>(k) * spacing, limit);
        while (leg < trajectory.events.size() && trajectory.events[leg].path_length < s) ++leg;
        out.push_back(leg_start(leg) + (s - leg_begin(leg)) * leg_dir(leg));
    }
    return out;
}

void advance(const Table& table, Flight& flight, double length) {
    if (!(length >= 0.0)) throw InvalidArgument("advance length must be non-negative");
    double remaining = length;
    while (remaining > 0.0) {
        const Hit hit = next_collision(table, flight.state, flight.last_wall, static_cast<int>(flight.bounces + 1));
        if (remaining < hit.t) {
            flight.state.position += remaining * flight.state.direction;
            return;
        }
        flight.state = {hit.point, reflect(flight.state.direction, hit.inward_normal)};
        flight.last_wall = hit.wall_id;
        ++flight.bounces;
        remaining -= hit.t;
    }
}

}  // namespace billiards
