#pragma once

#include <stdexcept>
#include <string>

#include "billiards/vec2.hpp"

namespace billiards {

/// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad side length, non-unit direction, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The ball struck a non-smooth junction of the boundary where no reflection rule exists.
class CornerHit : public Error {
public:
    CornerHit(Vec2 point, int wall_id, int event_index)
        : Error("corner hit at (" + std::to_string(point.x) + ", " + std::to_string(point.y) +
                ") on wall " + std::to_string(wall_id) + " at event " +
                std::to_string(event_index)),
          point_(point), wall_id_(wall_id), event_index_(event_index) {}

    Vec2 point() const { return point_; }
    int wall_id() const { return wall_id_; }
    int event_index() const { return event_index_; }

private:
    Vec2 point_;
    int wall_id_;
    int event_index_;
};

/// No wall was found ahead of the ball: the table geometry is inconsistent.
class LeakedBall : public Error {
public:
    LeakedBall(Vec2 position, Vec2 direction, int event_index)
        : Error("leaked ball: no wall ahead of (" + std::to_string(position.x) + ", " +
                std::to_string(position.y) + ") at event " + std::to_string(event_index)),
          position_(position), direction_(direction), event_index_(event_index) {}

    Vec2 position() const { return position_; }
    Vec2 direction() const { return direction_; }
    int event_index() const { return event_index_; }

private:
    Vec2 position_;
    Vec2 direction_;
    int event_index_;
};

/// Reflection requested for a direction that is not moving into the wall.
class TangentialHit : public Error {
public:
    using Error::Error;
};

/// Iterative linear solve failed to reach its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

}  // namespace billiards
