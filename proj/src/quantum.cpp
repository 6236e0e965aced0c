#include "billiards/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "billiards/errors.hpp"
#include "billiards/krylov.hpp"

namespace billiards {

namespace {

constexpr int kMinNodesAcross = 5;

}  // namespace

Grid2D::Grid2D(Table table, int nx, int ny, double spacing, Vec2 origin)
    : table_(std::move(table)), nx_(nx), ny_(ny), h_(spacing), origin_(origin) {
    if (!(h_ > 0.0)) throw InvalidArgument("grid spacing must be positive");
    if (nx_ < kMinNodesAcross || ny_ < kMinNodesAcross) {
        throw InvalidArgument("grid needs at least " + std::to_string(kMinNodesAcross) + " nodes per side, got " +
                              std::to_string(nx_) + "x" + std::to_string(ny_));
    }
    mask_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0);
    unknown_of_node_.assign(mask_.size(), -1);
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            if (!contains(table_, position(i, j))) continue;
            const std::size_t n = node(i, j);
            mask_[n] = 1;
            unknown_of_node_[n] = static_cast<long>(interior_nodes_.size());
            interior_nodes_.push_back(n);
        }
    }
    if (interior_nodes_.empty()) throw InvalidArgument("grid has no interior nodes; spacing too coarse");

    neighbours_.resize(interior_nodes_.size());
    for (std::size_t k = 0; k < interior_nodes_.size(); ++k) {
        const auto n = interior_nodes_[k];
        const int i = static_cast<int>(n % static_cast<std::size_t>(nx_));
        const int j = static_cast<int>(n / static_cast<std::size_t>(nx_));
        auto at = [&](int ii, int jj) -> long {
            if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) return -1;
            return unknown_of_node_[node(ii, jj)];
        };
        neighbours_[k] = {at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1)};
    }
}

Vec2 Grid2D::interior_position(std::size_t k) const {
    const auto n = interior_nodes_[k];
    return position(static_cast<int>(n % static_cast<std::size_t>(nx_)),
                    static_cast<int>(n / static_cast<std::size_t>(nx_)));
}

std::shared_ptr<const Grid2D> build_grid(const Table& table, double spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidArgument("grid spacing must be positive");
    const auto& box = table.bounding_box();
    auto nodes = [&](double extent) {
        return static_cast<int>(std::ceil(extent / spacing - 1e-9)) + 1;
    };
    const int nx = nodes(box.width());
    const int ny = nodes(box.height());
    if (std::min(nx, ny) < kMinNodesAcross) {
        throw InvalidArgument("grid spacing " + std::to_string(spacing) + " is too coarse: only " +
                              std::to_string(std::min(nx, ny)) + " nodes across the table");
    }
    return std::make_shared<const Grid2D>(table, nx, ny, spacing, box.min);
}

WarningSink default_warning_sink() {
    return [](const std::string& msg) { std::clog << "warning: " << msg << '\n'; };
}

WaveField sample_field(std::shared_ptr<const Grid2D> grid, const std::function<Complex(Vec2)>& psi) {
    if (!grid) throw InvalidArgument("null grid");
    WaveField f;
    f.amplitudes.resize(grid->interior_count());
    for (std::size_t k = 0; k < f.amplitudes.size(); ++k) f.amplitudes[k] = psi(grid->interior_position(k));
    f.grid = std::move(grid);
    return f;
}

double norm_squared(const WaveField& field) {
    double s = 0.0;
    for (const auto& z : field.amplitudes) s += std::norm(z);
    const double h = field.grid->spacing();
    return h * h * s;
}

WaveField normalized(WaveField field) {
    const double n2 = norm_squared(field);
    if (!(n2 > 0.0)) throw InvalidArgument("cannot normalize a zero wave field");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& z : field.amplitudes) z *= scale;
    return field;
}

WaveField gaussian_packet(std::shared_ptr<const Grid2D> grid, const PacketSpec& spec, const WarningSink& warn) {
    if (!grid) throw InvalidArgument("null grid");
    if (!(spec.sigma > 0.0)) throw InvalidArgument("packet width sigma must be positive");
    if (!contains(grid->table(), spec.center)) throw InvalidArgument("packet centre is not inside the table");
    const double clearance = distance_to_boundary(grid->table(), spec.center);
    if (clearance < 3.0 * spec.sigma && warn) {
        warn("packet centre is " + std::to_string(clearance) + " from the nearest wall, less than 3 sigma (" +
             std::to_string(3.0 * spec.sigma) + ")");
    }
    const double inv4s2 = 1.0 / (4.0 * spec.sigma * spec.sigma);
    auto f = sample_field(std::move(grid), [&](Vec2 x) {
        const double envelope = std::exp(-(x - spec.center).norm2() * inv4s2);
        return envelope * std::polar(1.0, spec.wavevector.dot(x));
    });
    return normalized(std::move(f));
}

void apply_hamiltonian(const Grid2D& grid, std::span<const Complex> in, std::span<Complex> out) {
    const double h = grid.spacing();
    const double diag = 2.0 / (h * h);
    const double off = -0.5 / (h * h);
    for (std::size_t k = 0; k < in.size(); ++k) {
        Complex acc = diag * in[k];
        for (long nb : grid.neighbours(k)) {
            if (nb >= 0) acc += off * in[static_cast<std::size_t>(nb)];
        }
        out[k] = acc;
    }
}

WaveField step(const WaveField& field, double dt, const StepOptions& options) {
    if (!field.grid) throw InvalidArgument("wave field has no grid");
    if (!(dt != 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be finite and non-zero");
    const auto& grid = *field.grid;
    const std::size_t n = field.amplitudes.size();
    const Complex ia{0.0, 0.5 * dt};

    // rhs = (I - i dt/2 H) psi
    std::vector<Complex> hpsi(n);
    apply_hamiltonian(grid, field.amplitudes, hpsi);
    std::vector<Complex> rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = field.amplitudes[k] - ia * hpsi[k];

    std::vector<Complex> tmp(n);
    auto lhs = [&](std::span<const Complex> in, std::span<Complex> out) {
        apply_hamiltonian(grid, in, tmp);
        for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] + ia * tmp[k];
    };
    // H is real symmetric, so the adjoint of I + iaH is I - iaH.
    auto lhs_adjoint = [&](std::span<const Complex> in, std::span<Complex> out) {
        apply_hamiltonian(grid, in, tmp);
        for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] - ia * tmp[k];
    };

    WaveField next;
    next.grid = field.grid;
    next.amplitudes = field.amplitudes;
    next.time = field.time + dt;
    const int cap = options.max_iterations > 0
                        ? options.max_iterations
                        : std::max(10, static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(n)))));
    krylov::cgls(lhs, lhs_adjoint, std::span<const Complex>(rhs), std::span<Complex>(next.amplitudes), options.tolerance, cap);
    return next;
}

long step_count(double t_final, double dt) {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw InvalidArgument("t_final must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
    return std::max(1L, static_cast<long>(std::ceil(t_final / dt * (1.0 - 1e-9))));
}

void evolve(const WaveField& field, const EvolveOptions& options,
            const std::function<void(const WaveField&, long step)>& on_snapshot) {
    if (options.snapshot_every < 1) throw InvalidArgument("snapshot_every must be at least 1");
    const long steps = step_count(options.t_final, options.dt);
    const double t0 = field.time;
    if (options.include_initial) on_snapshot(field, 0);
    WaveField current = field;
    for (long s = 1; s <= steps; ++s) {
        try {
            current = step(current, options.dt, options.step);
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(s) + ": " + e.what(), e.residual(), e.iterations());
        }
        current.time = t0 + static_cast<double>(s) * options.dt;
        if (s % options.snapshot_every == 0 || s == steps) on_snapshot(current, s);
    }
}

std::vector<WaveField> evolve(const WaveField& field, const EvolveOptions& options) {
    std::vector<WaveField> out;
    evolve(field, options, [&](const WaveField& f, long) { out.push_back(f); });
    return out;
}

RealGrid density(const WaveField& field) {
    const auto& grid = *field.grid;
    RealGrid g{grid.nx(), grid.ny(), std::vector<double>(grid.node_count(), 0.0)};
    for (std::size_t k = 0; k < field.amplitudes.size(); ++k) {
        g.values[grid.interior_node(k)] = std::norm(field.amplitudes[k]);
    }
    return g;
}

Moments centroid_and_spread(const WaveField& field) {
    const auto& grid = *field.grid;
    double total = 0.0;
    Vec2 first{0.0, 0.0};
    for (std::size_t k = 0; k < field.amplitudes.size(); ++k) {
        const double rho = std::norm(field.amplitudes[k]);
        total += rho;
        first += rho * grid.interior_position(k);
    }
    if (!(total > 0.0)) throw InvalidArgument("moments of a zero wave field are undefined");
    const Vec2 c = first / total;
    double second = 0.0;
    for (std::size_t k = 0; k < field.amplitudes.size(); ++k) {
        second += std::norm(field.amplitudes[k]) * (grid.interior_position(k) - c).norm2();
    }
    return {c, std::sqrt(second / total)};
}

std::vector<char> wall_zone(const Grid2D& grid, int wall_id, double width) {
    if (wall_id < 0 || static_cast<std::size_t>(wall_id) >= grid.table().size()) {
        throw InvalidArgument("no wall with id " + std::to_string(wall_id));
    }
    const auto& wall = grid.table().wall(wall_id);
    std::vector<char> zone(grid.interior_count(), 0);
    for (std::size_t k = 0; k < zone.size(); ++k) {
        zone[k] = distance_to_wall(wall, grid.interior_position(k)) <= width ? 1 : 0;
    }
    return zone;
}

double zone_probability(const WaveField& field, const std::vector<char>& zone) {
    double s = 0.0;
    for (std::size_t k = 0; k < field.amplitudes.size(); ++k) {
        if (zone[k]) s += std::norm(field.amplitudes[k]);
    }
    const double h = field.grid->spacing();
    return h * h * s;
}

double occupied_fraction(const WaveField& field, double ratio) {
    const std::size_t n = field.amplitudes.size();
    if (n == 0) return 0.0;
    double total = 0.0;
    for (const auto& z : field.amplitudes) total += std::norm(z);
    const double threshold = ratio * total / static_cast<double>(n);
    std::size_t above = 0;
    for (const auto& z : field.amplitudes) {
        if (std::norm(z) > threshold) ++above;
    }
    return static_cast<double>(above) / static_cast<double>(n);
}

}  // namespace billiards
