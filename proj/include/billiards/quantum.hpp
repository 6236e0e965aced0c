#pragma once
/**
 * @file quantum.hpp
 * @brief Time-dependent Schroedinger propagation inside a billiard table.
 *
 * Units hbar = m = 1, so the equation is i dpsi/dt = -1/2 lap psi with
 * psi = 0 outside the table (hard walls). Space is a uniform grid over the
 * table's bounding box; a node belongs to the domain iff its centre is
 * strictly inside the table, which gives a staircase boundary with O(h)
 * geometric error. The Laplacian is the five-point stencil and time stepping
 * is Crank-Nicolson, solved with CG on the normal equations (CGLS).
 *
 * Amplitudes are stored only for interior nodes, so the Dirichlet condition
 * holds exactly.
 */

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "billiards/geometry.hpp"

namespace billiards {

using Complex = std::complex<double>;

class Grid2D {
public:
    Grid2D(Table table, int nx, int ny, double spacing, Vec2 origin);

    const Table& table() const { return table_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double spacing() const { return h_; }
    Vec2 origin() const { return origin_; }

    std::size_t node_count() const { return mask_.size(); }
    std::size_t interior_count() const { return interior_nodes_.size(); }
    bool interior(int i, int j) const { return mask_[node(i, j)] != 0; }
    std::size_t node(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }
    Vec2 position(int i, int j) const { return origin_ + h_ * Vec2{static_cast<double>(i), static_cast<double>(j)}; }

    /// Grid node index of interior unknown k.
    std::size_t interior_node(std::size_t k) const { return interior_nodes_[k]; }
    /// Position of interior unknown k.
    Vec2 interior_position(std::size_t k) const;
    /// Interior unknown at grid node, or -1.
    long unknown_at(std::size_t node) const { return unknown_of_node_[node]; }
    /// Interior neighbours (E, W, N, S) of unknown k; -1 where the neighbour is outside.
    const std::array<long, 4>& neighbours(std::size_t k) const { return neighbours_[k]; }

private:
    Table table_;
    int nx_;
    int ny_;
    double h_;
    Vec2 origin_;
    std::vector<char> mask_;
    std::vector<std::size_t> interior_nodes_;
    std::vector<long> unknown_of_node_;
    std::vector<std::array<long, 4>> neighbours_;
};

/// Grid over the bounding box with the box's lower-left corner as node (0,0).
/// Needs at least 5 nodes across the shorter side and one interior node.
std::shared_ptr<const Grid2D> build_grid(const Table& table, double spacing);

struct WaveField {
    std::shared_ptr<const Grid2D> grid;
    std::vector<Complex> amplitudes;  ///< one per interior unknown
    double time{0.0};
};

struct PacketSpec {
    Vec2 center;
    double sigma{0.15};
    Vec2 wavevector;
};

using WarningSink = std::function<void(const std::string&)>;

/// Writes warnings to std::clog.
WarningSink default_warning_sink();

/// psi ~ exp(-|x-c|^2 / (4 sigma^2)) exp(i k.x) on the interior, normalized to unit norm.
/// Throws InvalidArgument if the centre is not inside the table; warns when the
/// centre is closer than 3 sigma to a wall.
WaveField gaussian_packet(std::shared_ptr<const Grid2D> grid, const PacketSpec& spec,
                          const WarningSink& warn = default_warning_sink());

/// Arbitrary initial data sampled at interior nodes (not normalized).
WaveField sample_field(std::shared_ptr<const Grid2D> grid, const std::function<Complex(Vec2)>& psi);

/// Unit-norm copy; throws on a zero field.
WaveField normalized(WaveField field);

/// h^2 * sum |psi|^2 (the squared L2 norm).
double norm_squared(const WaveField& field);

/// Applies H = -1/2 * five-point Laplacian with Dirichlet exclusion.
void apply_hamiltonian(const Grid2D& grid, std::span<const Complex> in, std::span<Complex> out);

struct StepOptions {
    double tolerance{1e-12};
    /// 0 selects the default cap of 10*sqrt(N) iterations.
    int max_iterations{0};
};

/// One Crank-Nicolson step (I + i dt/2 H) psi' = (I - i dt/2 H) psi.
/// dt may be negative (exact time reversal of a forward step).
WaveField step(const WaveField& field, double dt, const StepOptions& options = {});

struct EvolveOptions {
    double t_final{0.0};
    double dt{1e-4};
    int snapshot_every{1};
    bool include_initial{false};
    StepOptions step;
};

/// Number of steps evolve takes: t_final/dt rounded up (within 1e-9 relative slack).
long step_count(double t_final, double dt);

/// Steps ceil(t_final/dt) times. `on_snapshot` sees the field after every
/// snapshot_every-th step and after the final step (plus the initial field when
/// requested). Times are initial time + k*dt. Step failures are rethrown as
/// SolverError naming the step index.
void evolve(const WaveField& field, const EvolveOptions& options,
            const std::function<void(const WaveField&, long step)>& on_snapshot);

/// Collecting form of evolve.
std::vector<WaveField> evolve(const WaveField& field, const EvolveOptions& options);

struct RealGrid {
    int nx{0};
    int ny{0};
    std::vector<double> values;  ///< row-major, row j = y index

    double at(int i, int j) const {
        return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)];
    }
};

/// |psi|^2 on the full grid; zero outside the domain.
RealGrid density(const WaveField& field);

struct Moments {
    Vec2 centroid;
    double spread{0.0};  ///< root-mean-square distance from the centroid
};

/// Throws InvalidArgument for a zero field.
Moments centroid_and_spread(const WaveField& field);

/// Interior nodes within `width` of a wall.
std::vector<char> wall_zone(const Grid2D& grid, int wall_id, double width);

/// Probability h^2 * sum |psi|^2 over the marked nodes.
double zone_probability(const WaveField& field, const std::vector<char>& zone);

/// Fraction of interior nodes whose density exceeds ratio * (mean interior density).
double occupied_fraction(const WaveField& field, double ratio = 0.1);

}  // namespace billiards
