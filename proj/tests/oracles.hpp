#pragma once
// Independent reference implementations used by the tests. None of these call
// into the library's geometry or solver code; they only read table parameters.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "billiards/geometry.hpp"

namespace oracle {

using billiards::Vec2;

struct Crossing {
    double t;
    Vec2 point;
    Vec2 normal;
    int wall;
};

// Signed distance to a wall's supporting line or circle, positive on the
// interior side. `within` reports whether the foot point lies on the wall.
inline double signed_distance(const billiards::Wall& wall, Vec2 p, bool& within) {
    constexpr double slack = 1e-9;
    if (const auto* s = std::get_if<billiards::Segment>(&wall.shape)) {
        const Vec2 e = s->p1 - s->p0;
        const double len = std::hypot(e.x, e.y);
        const Vec2 u{e.x / len, e.y / len};
        const Vec2 r = p - s->p0;
        const double along = (r.x * u.x + r.y * u.y) / len;
        within = along >= -slack && along <= 1.0 + slack;
        return u.x * r.y - u.y * r.x;
    }
    const auto& a = std::get<billiards::Arc>(wall.shape);
    const Vec2 r = p - a.center;
    const double dist = std::hypot(r.x, r.y);
    if (a.span() >= 2.0 * M_PI) {
        within = true;
    } else {
        double phi = std::atan2(r.y, r.x);
        while (phi < a.angle_start - slack) phi += 2.0 * M_PI;
        while (phi > a.angle_start + 2.0 * M_PI - slack) phi -= 2.0 * M_PI;
        within = phi <= a.angle_end + slack;
    }
    return a.interior == billiards::ArcInterior::Inside ? a.radius - dist : dist - a.radius;
}

inline Vec2 normal_at(const billiards::Wall& wall, Vec2 p) {
    if (const auto* s = std::get_if<billiards::Segment>(&wall.shape)) {
        const Vec2 e = s->p1 - s->p0;
        const double len = std::hypot(e.x, e.y);
        return {-e.y / len, e.x / len};
    }
    const auto& a = std::get<billiards::Arc>(wall.shape);
    const Vec2 r = p - a.center;
    const double dist = std::hypot(r.x, r.y);
    const Vec2 out{r.x / dist, r.y / dist};
    return a.interior == billiards::ArcInterior::Inside ? Vec2{-out.x, -out.y} : out;
}

// Marches the ray in steps of `step`, watching each wall's signed distance for
// a change from positive to non-positive on the wall itself, then bisects the
// bracket down to `resolution`.
inline std::optional<Crossing> march(const std::vector<const billiards::Wall*>& walls, Vec2 origin, Vec2 dir,
                                     double max_t, double step = 1e-5, double resolution = 1e-12) {
    auto at = [&](double t) { return Vec2{origin.x + t * dir.x, origin.y + t * dir.y}; };
    std::vector<double> prev(walls.size());
    for (std::size_t w = 0; w < walls.size(); ++w) {
        bool within = false;
        prev[w] = signed_distance(*walls[w], origin, within);
    }
    const long n = static_cast<long>(std::ceil(max_t / step));
    for (long k = 1; k <= n; ++k) {
        const double t0 = static_cast<double>(k - 1) * step;
        const double t1 = static_cast<double>(k) * step;
        std::optional<Crossing> best;
        for (std::size_t w = 0; w < walls.size(); ++w) {
            bool within = false;
            const double f1 = signed_distance(*walls[w], at(t1), within);
            const double f0 = prev[w];
            prev[w] = f1;
            if (!(f0 > 0.0 && f1 <= 0.0)) continue;
            double lo = t0, hi = t1;
            while (hi - lo > resolution) {
                const double mid = 0.5 * (lo + hi);
                bool unused = false;
                if (signed_distance(*walls[w], at(mid), unused) > 0.0) lo = mid;
                else hi = mid;
            }
            const double t = 0.5 * (lo + hi);
            bool on_wall = false;
            signed_distance(*walls[w], at(t), on_wall);
            if (!on_wall) continue;
            if (!best || t < best->t) best = Crossing{t, at(t), normal_at(*walls[w], at(t)), walls[w]->id};
        }
        if (best) return best;
    }
    return std::nullopt;
}

inline std::vector<const billiards::Wall*> all_walls(const billiards::Table& table) {
    std::vector<const billiards::Wall*> out;
    for (const auto& w : table.walls()) out.push_back(&w);
    return out;
}

// Bounce sequence produced by marching: reflect d - 2(d.n)n at each crossing.
inline std::vector<Crossing> marched_bounces(const billiards::Table& table, Vec2 start, Vec2 dir, int n) {
    const auto walls = all_walls(table);
    const auto& box = table.bounding_box();
    const double diag = std::hypot(box.width(), box.height());
    std::vector<Crossing> out;
    Vec2 p = start, d = dir;
    for (int i = 0; i < n; ++i) {
        auto c = march(walls, p, d, diag * 1.01);
        if (!c) break;
        out.push_back(*c);
        const double dn = d.x * c->normal.x + d.y * c->normal.y;
        d = Vec2{d.x - 2.0 * dn * c->normal.x, d.y - 2.0 * dn * c->normal.y};
        const double len = std::hypot(d.x, d.y);
        d = Vec2{d.x / len, d.y / len};
        p = c->point;
    }
    return out;
}

// Exact set of grid cells crossed by a polyline on a res x res grid over
// [x0, x0+w] x [y0, y0+h]: split each segment at every grid-line crossing and
// classify each piece by its midpoint.
inline std::set<std::pair<int, int>> cells_crossed(const std::vector<Vec2>& polyline, Vec2 lo, double w, double h,
                                                   int res) {
    std::set<std::pair<int, int>> cells;
    const double cw = w / res, ch = h / res;
    for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
        const Vec2 a = polyline[s], b = polyline[s + 1];
        std::vector<double> cuts{0.0, 1.0};
        for (int i = 0; i <= res; ++i) {
            const double gx = lo.x + i * cw, gy = lo.y + i * ch;
            if (b.x != a.x) {
                const double u = (gx - a.x) / (b.x - a.x);
                if (u > 0.0 && u < 1.0) cuts.push_back(u);
            }
            if (b.y != a.y) {
                const double u = (gy - a.y) / (b.y - a.y);
                if (u > 0.0 && u < 1.0) cuts.push_back(u);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (cuts[k + 1] - cuts[k] < 1e-14) continue;
            const double u = 0.5 * (cuts[k] + cuts[k + 1]);
            const double x = a.x + u * (b.x - a.x), y = a.y + u * (b.y - a.y);
            const int i = std::clamp(static_cast<int>(std::floor((x - lo.x) / cw)), 0, res - 1);
            const int j = std::clamp(static_cast<int>(std::floor((y - lo.y) / ch)), 0, res - 1);
            cells.insert({i, j});
        }
    }
    return cells;
}

// Dense Gaussian elimination with partial pivoting.
inline std::vector<std::complex<double>> dense_solve(std::vector<std::vector<std::complex<double>>> a,
                                                     std::vector<std::complex<double>> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const auto f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<std::complex<double>> x(n);
    for (std::size_t r = n; r-- > 0;) {
        auto s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace oracle
