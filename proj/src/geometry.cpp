#include "billiards/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

constexpr double kUnitTolerance = 1e-12;
// Slack on the segment parameter so that shared vertices are not missed by rounding.
constexpr double kSegmentSlack = 1e-12;
constexpr double kAngleSlack = 1e-12;
// Neighbouring walls whose normals differ by more than this at a junction form a corner.
constexpr double kSmoothJunction = 1e-9;

// Counter-clockwise angle of the point about the arc centre, measured from angle_start, in [0, 2*pi).
double angle_from_start(const Arc& arc, Vec2 point) {
    const Vec2 f = point - arc.center;
    double rel = std::atan2(f.y, f.x) - arc.angle_start;
    rel = std::fmod(rel, kTwoPi);
    if (rel < 0.0) rel += kTwoPi;
    return rel;
}

bool angle_in_span(const Arc& arc, Vec2 point, double slack) {
    if (arc.full_circle()) return true;
    const double rel = angle_from_start(arc, point);
    return rel <= arc.span() + slack || rel >= kTwoPi - slack;
}

Vec2 arc_point(const Arc& arc, double angle) {
    return arc.center + arc.radius * Vec2{std::cos(angle), std::sin(angle)};
}

double distance_to_segment(const Segment& s, Vec2 p) {
    const Vec2 e = s.p1 - s.p0;
    const double u = std::clamp((p - s.p0).dot(e) / e.norm2(), 0.0, 1.0);
    return distance(p, s.p0 + u * e);
}

void validate_shape(const WallShape& shape, std::size_t index) {
    const std::string where = "wall " + std::to_string(index) + ": ";
    if (const auto* seg = std::get_if<Segment>(&shape)) {
        if (!std::isfinite(seg->p0.x) || !std::isfinite(seg->p0.y) ||
            !std::isfinite(seg->p1.x) || !std::isfinite(seg->p1.y)) {
            throw InvalidArgument(where + "segment endpoints must be finite");
        }
        if (seg->p0 == seg->p1) throw InvalidArgument(where + "segment has zero length");
        return;
    }
    const auto& arc = std::get<Arc>(shape);
    if (!(arc.radius > 0.0) || !std::isfinite(arc.radius)) {
        throw InvalidArgument(where + "arc radius must be positive");
    }
    const double span = arc.span();
    if (!(span > 0.0) || span > kTwoPi + kAngleSlack) {
        throw InvalidArgument(where + "arc angular span must lie in (0, 2*pi]");
    }
}

// Even-odd crossing count of the ray p + t*dir (t > 0) with one wall.
int crossings(const Wall& wall, Vec2 p, Vec2 dir) {
    if (const auto* seg = std::get_if<Segment>(&wall.shape)) {
        const Vec2 e = seg->p1 - seg->p0;
        const double denom = dir.cross(e);
        if (denom == 0.0) return 0;
        const Vec2 w = seg->p0 - p;
        const double t = w.cross(e) / denom;
        const double s = w.cross(dir) / denom;
        return (t > 0.0 && s >= 0.0 && s < 1.0) ? 1 : 0;
    }
    const auto& arc = std::get<Arc>(wall.shape);
    const Vec2 f = p - arc.center;
    const double b = dir.dot(f);
    const double c = f.norm2() - arc.radius * arc.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return 0;
    const double sq = std::sqrt(disc);
    int count = 0;
    for (double t : {-b - sq, -b + sq}) {
        if (t <= 0.0) continue;
        const Vec2 q = p + t * dir;
        if (arc.full_circle()) {
            ++count;
            continue;
        }
        const double rel = angle_from_start(arc, q);
        if (rel < arc.span()) ++count;
    }
    return count;
}

}  // namespace

Vec2 Wall::inward_normal_at(Vec2 point) const {
    if (const auto* seg = std::get_if<Segment>(&shape)) {
        return (seg->p1 - seg->p0).perp().normalized();
    }
    const auto& arc = std::get<Arc>(shape);
    const Vec2 radial = (point - arc.center).normalized();
    return arc.interior == ArcInterior::Inside ? -radial : radial;
}

std::vector<Vec2> Wall::endpoints() const {
    if (const auto* seg = std::get_if<Segment>(&shape)) return {seg->p0, seg->p1};
    const auto& arc = std::get<Arc>(shape);
    if (arc.full_circle()) return {};
    return {arc_point(arc, arc.angle_start), arc_point(arc, arc.angle_end)};
}

Table::Table(std::vector<WallShape> shapes) {
    if (shapes.empty()) throw InvalidArgument("table has no walls");
    walls_.reserve(shapes.size());
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        validate_shape(shapes[i], i);
        walls_.push_back(Wall{static_cast<int>(i), std::move(shapes[i])});
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    Vec2 lo{inf, inf};
    Vec2 hi{-inf, -inf};
    auto grow = [&](Vec2 p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    };
    for (const auto& w : walls_) {
        for (Vec2 p : w.endpoints()) grow(p);
        if (const auto* arc = std::get_if<Arc>(&w.shape)) {
            for (int k = 0; k < 4; ++k) {
                const double a = k * kPi / 2.0;
                const Vec2 q = arc_point(*arc, a);
                if (angle_in_span(*arc, q, 0.0)) grow(q);
            }
        }
    }
    bbox_ = {lo, hi};

    // Every endpoint must meet another wall's endpoint; non-smooth meetings are corners.
    for (const auto& w : walls_) {
        for (Vec2 e : w.endpoints()) {
            bool joined = false;
            bool smooth = true;
            for (const auto& other : walls_) {
                if (other.id == w.id) continue;
                for (Vec2 oe : other.endpoints()) {
                    if (distance(e, oe) > kCornerTolerance) continue;
                    joined = true;
                    const Vec2 diff = w.inward_normal_at(e) - other.inward_normal_at(oe);
                    if (diff.norm() > kSmoothJunction) smooth = false;
                }
            }
            if (!joined) {
                throw InvalidArgument("boundary is not closed: wall " + std::to_string(w.id) +
                                      " has a free end at (" + std::to_string(e.x) + ", " +
                                      std::to_string(e.y) + ")");
            }
            if (!smooth) {
                const bool known = std::any_of(corners_.begin(), corners_.end(), [&](Vec2 c) {
                    return distance(c, e) <= kCornerTolerance;
                });
                if (!known) corners_.push_back(e);
            }
        }
    }

    // Each wall's stated interior side must face the enclosed region.
    const double probe = 1e-6 * std::max(1.0, std::hypot(bbox_.width(), bbox_.height()));
    for (const auto& w : walls_) {
        Vec2 mid;
        if (const auto* seg = std::get_if<Segment>(&w.shape)) {
            mid = 0.5 * (seg->p0 + seg->p1);
        } else {
            const auto& arc = std::get<Arc>(w.shape);
            mid = arc_point(arc, arc.angle_start + 0.5 * arc.span());
        }
        const Vec2 n = w.inward_normal_at(mid);
        if (!contains(*this, mid + probe * n) || contains(*this, mid - probe * n)) {
            throw InvalidArgument("wall " + std::to_string(w.id) +
                                  ": interior side does not face the enclosed region");
        }
    }
}

Table make_square(double side) {
    if (!(side > 0.0) || !std::isfinite(side)) {
        throw InvalidArgument("square side must be positive, got " + std::to_string(side));
    }
    return Table({
        Segment{{0.0, 0.0}, {side, 0.0}},
        Segment{{side, 0.0}, {side, side}},
        Segment{{side, side}, {0.0, side}},
        Segment{{0.0, side}, {0.0, 0.0}},
    });
}

Table make_sinai(double side, Vec2 obstacle_center, double obstacle_radius) {
    if (!(side > 0.0) || !std::isfinite(side)) {
        throw InvalidArgument("square side must be positive, got " + std::to_string(side));
    }
    if (!(obstacle_radius > 0.0) || !std::isfinite(obstacle_radius)) {
        throw InvalidArgument("obstacle radius must be positive, got " +
                              std::to_string(obstacle_radius));
    }
    const double clearance =
        std::min({obstacle_center.x, obstacle_center.y, side - obstacle_center.x,
                  side - obstacle_center.y}) -
        obstacle_radius;
    if (!(clearance > 0.0)) {
        throw InvalidArgument("obstacle must lie strictly inside the square (clearance " +
                              std::to_string(clearance) + ")");
    }
    return Table({
        Segment{{0.0, 0.0}, {side, 0.0}},
        Segment{{side, 0.0}, {side, side}},
        Segment{{side, side}, {0.0, side}},
        Segment{{0.0, side}, {0.0, 0.0}},
        Arc{obstacle_center, obstacle_radius, 0.0, kTwoPi, ArcInterior::Outside},
    });
}

Table make_stadium(double straight_length, double radius) {
    if (!(straight_length >= 0.0) || !std::isfinite(straight_length)) {
        throw InvalidArgument("stadium straight length must be non-negative, got " +
                              std::to_string(straight_length));
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("stadium radius must be positive, got " + std::to_string(radius));
    }
    if (straight_length == 0.0) {
        return Table({Arc{{0.0, 0.0}, radius, 0.0, kTwoPi, ArcInterior::Inside}});
    }
    const double a = 0.5 * straight_length;
    return Table({
        Segment{{-a, -radius}, {a, -radius}},
        Arc{{a, 0.0}, radius, -kPi / 2.0, kPi / 2.0, ArcInterior::Inside},
        Segment{{a, radius}, {-a, radius}},
        Arc{{-a, 0.0}, radius, kPi / 2.0, 3.0 * kPi / 2.0, ArcInterior::Inside},
    });
}

std::optional<Hit> ray_wall_intersect(Vec2 origin, Vec2 direction, const Wall& wall,
                                      double t_min) {
    if (std::abs(direction.norm() - 1.0) > kUnitTolerance) {
        throw InvalidArgument("ray direction must be a unit vector");
    }
    if (!(t_min > 0.0)) throw InvalidArgument("t_min must be positive");

    if (const auto* seg = std::get_if<Segment>(&wall.shape)) {
        const Vec2 e = seg->p1 - seg->p0;
        const double denom = direction.cross(e);
        if (std::abs(denom) <= 1e-14 * e.norm()) return std::nullopt;
        const Vec2 w = seg->p0 - origin;
        const double t = w.cross(e) / denom;
        const double s = w.cross(direction) / denom;
        if (!(t > t_min) || s < -kSegmentSlack || s > 1.0 + kSegmentSlack) return std::nullopt;
        return Hit{t, origin + t * direction, e.perp().normalized(), wall.id};
    }

    const auto& arc = std::get<Arc>(wall.shape);
    const Vec2 f = origin - arc.center;
    const double b = direction.dot(f);
    const double c = f.norm2() - arc.radius * arc.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Cancellation-free root pair.
    const double q = -b - std::copysign(sq, b);
    double roots[2];
    if (q == 0.0) {
        roots[0] = roots[1] = 0.0;
    } else {
        roots[0] = q;
        roots[1] = c / q;
    }
    if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    for (double t : roots) {
        if (!(t > t_min)) continue;
        const Vec2 p = origin + t * direction;
        if (!angle_in_span(arc, p, kAngleSlack)) continue;
        return Hit{t, p, wall.inward_normal_at(p), wall.id};
    }
    return std::nullopt;
}

double distance_to_wall(const Wall& wall, Vec2 point) {
    if (const auto* seg = std::get_if<Segment>(&wall.shape)) return distance_to_segment(*seg, point);
    const auto& arc = std::get<Arc>(wall.shape);
    if (angle_in_span(arc, point, 0.0)) return std::abs(distance(point, arc.center) - arc.radius);
    const auto ends = wall.endpoints();
    return std::min(distance(point, ends[0]), distance(point, ends[1]));
}

double distance_to_boundary(const Table& table, Vec2 point) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : table.walls()) best = std::min(best, distance_to_wall(w, point));
    return best;
}

bool contains(const Table& table, Vec2 point) {
    const auto& box = table.bounding_box();
    if (!(point.x > box.min.x && point.x < box.max.x && point.y > box.min.y &&
          point.y < box.max.y)) {
        return false;
    }
    if (distance_to_boundary(table, point) <= kBoundaryTolerance) return false;
    // Irrational-slope probe ray; vertices are hit with probability zero.
    static const Vec2 probe{std::cos(0.6180339887498949), std::sin(0.6180339887498949)};
    int count = 0;
    for (const auto& w : table.walls()) count += crossings(w, point, probe);
    return (count % 2) == 1;
}

}  // namespace billiards
