#pragma once
/**
 * @file geometry.hpp
 * @brief Wall primitives, billiard tables and exact ray queries.
 *
 * Conventions:
 *   - Coordinates are dimensionless table units.
 *   - A Segment's interior side is to the LEFT of p0 -> p1, so outer
 *     boundaries run counter-clockwise and obstacle loops run clockwise.
 *   - An Arc spans counter-clockwise from angle_start to angle_end
 *     (radians, span in (0, 2*pi]); its interior side is stated explicitly.
 *   - Wall ids are the wall's position in the table's wall list.
 *
 * Tables are immutable once built; every query here is a pure function.
 */

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "billiards/vec2.hpp"

namespace billiards {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Minimum ray parameter accepted for a hit; keeps the ball from re-hitting the wall it just left.
inline constexpr double kDefaultTMin = 1e-9;
/// A hit this close to a non-smooth boundary junction is reported as a corner.
inline constexpr double kCornerTolerance = 1e-9;
/// Points this close to a wall are classified as boundary (not interior).
inline constexpr double kBoundaryTolerance = 1e-12;

struct Segment {
    Vec2 p0;
    Vec2 p1;
};

enum class ArcInterior { Inside, Outside };

struct Arc {
    Vec2 center;
    double radius{1.0};
    double angle_start{0.0};
    double angle_end{kTwoPi};
    ArcInterior interior{ArcInterior::Inside};

    double span() const { return angle_end - angle_start; }
    bool full_circle() const { return span() >= kTwoPi; }
};

using WallShape = std::variant<Segment, Arc>;

struct Wall {
    int id{0};
    WallShape shape;

    bool is_segment() const { return std::holds_alternative<Segment>(shape); }
    bool is_arc() const { return std::holds_alternative<Arc>(shape); }

    /// Inward unit normal at a point on (or numerically near) the wall.
    Vec2 inward_normal_at(Vec2 point) const;
    /// End points of the wall; empty for a full circle.
    std::vector<Vec2> endpoints() const;
};

struct BoundingBox {
    Vec2 min;
    Vec2 max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
};

struct Hit {
    double t{0.0};
    Vec2 point;
    Vec2 inward_normal;
    int wall_id{-1};
};

/// A closed billiard domain. Construction validates closure and normal orientation.
class Table {
public:
    /// Throws InvalidArgument if a shape is degenerate, the boundary has a free
    /// end, or a wall's interior side does not face the enclosed region.
    explicit Table(std::vector<WallShape> shapes);

    std::span<const Wall> walls() const { return walls_; }
    const Wall& wall(int id) const { return walls_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return walls_.size(); }
    const BoundingBox& bounding_box() const { return bbox_; }
    /// Non-smooth junctions of the boundary (where neighbouring normals disagree).
    std::span<const Vec2> corners() const { return corners_; }

private:
    std::vector<Wall> walls_;
    BoundingBox bbox_;
    std::vector<Vec2> corners_;
};

/// Square [0, side] x [0, side]; wall ids 0=bottom, 1=right, 2=top, 3=left.
Table make_square(double side);

/// Square with a circular scatterer; walls 0-3 as make_square, wall 4 is the obstacle.
Table make_sinai(double side, Vec2 obstacle_center, double obstacle_radius);

/// Stadium centred at the origin: width straight_length + 2*radius, height 2*radius.
/// Wall ids 0=bottom, 1=right cap, 2=top, 3=left cap. straight_length == 0 gives a
/// single full-circle wall (id 0).
Table make_stadium(double straight_length, double radius);

/// Defaults used by the builders when no parameters are given.
struct SinaiDefaults {
    static constexpr double side = 1.0;
    static constexpr Vec2 center{0.5, 0.5};
    static constexpr double radius = 0.2;
};

/// First intersection of the ray origin + t*direction (t > t_min) with the wall.
/// Throws InvalidArgument if direction is not unit length within 1e-12 or t_min <= 0.
std::optional<Hit> ray_wall_intersect(Vec2 origin, Vec2 direction, const Wall& wall,
                                      double t_min = kDefaultTMin);

/// Strict interior membership: boundary points (within kBoundaryTolerance) are outside.
bool contains(const Table& table, Vec2 point);

/// Euclidean distance from a point to the wall's point set.
double distance_to_wall(const Wall& wall, Vec2 point);

/// Distance to the nearest wall of the table.
double distance_to_boundary(const Table& table, Vec2 point);

}  // namespace billiards
