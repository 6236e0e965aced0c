#include "billiards/chaos.hpp"

#include <algorithm>
#include <cmath>

#include "billiards/errors.hpp"

namespace billiards {

std::vector<double> incidence_angles(const Trajectory& trajectory, int wall_id) {
    if (wall_id < 0) throw InvalidArgument("wall id must be non-negative");
    std::vector<double> out;
    for (const auto& e : trajectory.events) {
        if (e.wall_id == wall_id) out.push_back(e.incidence_angle);
    }
    return out;
}

std::vector<int> incidence_event_indices(const Trajectory& trajectory, int wall_id) {
    if (wall_id < 0) throw InvalidArgument("wall id must be non-negative");
    std::vector<int> out;
    for (const auto& e : trajectory.events) {
        if (e.wall_id == wall_id) out.push_back(e.index);
    }
    return out;
}

int distinct_angle_count(std::span<const double> angles, double tolerance) {
    if (!(tolerance > 0.0)) throw InvalidArgument("clustering tolerance must be positive");
    if (angles.empty()) return 0;
    std::vector<double> sorted(angles.begin(), angles.end());
    std::sort(sorted.begin(), sorted.end());
    int clusters = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] - sorted[i - 1] > tolerance) ++clusters;
    }
    return clusters;
}

double DivergenceSeries::max_separation() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.separation);
    return m;
}

BallState transverse_offset(const BallState& state, double offset) {
    return {state.position + offset * state.direction.perp(), state.direction};
}

DivergenceSeries separation_series(const Table& table, const BallState& a, const BallState& b,
                                   double total_path_length, double sample_spacing) {
    if (!(sample_spacing > 0.0)) throw InvalidArgument("sample spacing must be positive");
    if (!(total_path_length >= 0.0)) throw InvalidArgument("total path length must be non-negative");

    const Trajectory ta = simulate_path_length(table, a, total_path_length);
    const Trajectory tb = simulate_path_length(table, b, total_path_length);

    double limit = total_path_length;
    if (ta.truncated()) limit = std::min(limit, ta.path_length());
    if (tb.truncated()) limit = std::min(limit, tb.path_length());

    const auto pa = positions_at_spacing(ta, sample_spacing, limit);
    const auto pb = positions_at_spacing(tb, sample_spacing, limit);
    const std::size_t n = std::min(pa.size(), pb.size());

    DivergenceSeries series;
    series.initial_offset = distance(a.position, b.position);
    series.truncated = ta.truncated() || tb.truncated();
    series.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        series.samples.push_back({static_cast<double>(k) * sample_spacing, distance(pa[k], pb[k])});
    }
    return series;
}

LyapunovEstimate lyapunov_estimate(const Table& table, const BallState& initial, double offset,
                                   int n_renormalizations) {
    if (!(offset > 0.0)) throw InvalidArgument("Lyapunov offset must be positive");
    if (n_renormalizations < kMinRenormalizations) {
        throw InvalidArgument("at least " + std::to_string(kMinRenormalizations) + " renormalizations are required");
    }
    validate_state(table, initial);
    const BallState displaced = transverse_offset(initial, offset);
    validate_state(table, displaced);

    Flight ref{initial, std::nullopt, 0};
    Flight pert{displaced, std::nullopt, 0};
    LyapunovEstimate est;
    est.offset = offset;

    double log_sum = 0.0;
    double travelled = 0.0;
    try {
        for (int k = 0; k < n_renormalizations; ++k) {
            const double to_wall = next_collision(table, ref.state, ref.last_wall).t;
            advance(table, ref, to_wall);
            const double half_flight = 0.5 * next_collision(table, ref.state, ref.last_wall).t;
            advance(table, ref, half_flight);
            const double step = to_wall + half_flight;
            advance(table, pert, step);

            const Vec2 dx = pert.state.position - ref.state.position;
            const Vec2 dv = pert.state.direction - ref.state.direction;
            const double d = std::sqrt(dx.norm2() + dv.norm2());
            if (!(d > 0.0)) throw InvalidArgument("companion trajectory collapsed onto the reference; offset too small");
            log_sum += std::log(d / offset);
            travelled += step;

            const double scale = offset / d;
            pert.state.position = ref.state.position + scale * dx;
            pert.state.direction = (ref.state.direction + scale * dv).normalized();
            pert.last_wall = ref.last_wall;
            est.n_renormalizations = k + 1;
        }
        est.valid = true;
    } catch (const CornerHit& e) {
        est.failure = Truncation{Truncation::Kind::CornerHit, e.event_index(), e.point(), e.wall_id(), e.what()};
    } catch (const LeakedBall& e) {
        est.failure = Truncation{Truncation::Kind::LeakedBall, e.event_index(), e.position(), -1, e.what()};
    } catch (const TangentialHit& e) {
        est.failure = Truncation{Truncation::Kind::Tangency, est.n_renormalizations + 1, ref.state.position, -1, e.what()};
    }
    est.path_length = travelled;
    est.exponent = travelled > 0.0 ? log_sum / travelled : 0.0;
    return est;
}

double coverage_fraction(std::span<const Vec2> points, const Table& table, int grid_resolution) {
    if (grid_resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
    if (points.empty()) return 0.0;
    const auto& box = table.bounding_box();
    const auto res = static_cast<std::size_t>(grid_resolution);
    const double cw = box.width() / grid_resolution;
    const double ch = box.height() / grid_resolution;

    std::vector<char> interior(res * res, 0);
    std::size_t interior_count = 0;
    for (std::size_t j = 0; j < res; ++j) {
        for (std::size_t i = 0; i < res; ++i) {
            const Vec2 centre{box.min.x + (static_cast<double>(i) + 0.5) * cw,
                              box.min.y + (static_cast<double>(j) + 0.5) * ch};
            if (contains(table, centre)) {
                interior[j * res + i] = 1;
                ++interior_count;
            }
        }
    }
    if (interior_count == 0) return 0.0;

    auto cell = [&](double v, double lo, double size) {
        const double f = std::floor((v - lo) / size);
        return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(grid_resolution - 1)));
    };
    std::vector<char> visited(res * res, 0);
    std::size_t visited_count = 0;
    for (Vec2 p : points) {
        const std::size_t idx = cell(p.y, box.min.y, ch) * res + cell(p.x, box.min.x, cw);
        if (interior[idx] && !visited[idx]) {
            visited[idx] = 1;
            ++visited_count;
        }
    }
    return static_cast<double>(visited_count) / static_cast<double>(interior_count);
}

}  // namespace billiards
