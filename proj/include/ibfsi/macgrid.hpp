#pragma once

#include "ibfsi/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ibfsi {

/// 2D array of doubles with an index offset, so ghost layers can sit at
/// negative indices. Row-major with i (x) fastest.
class Array2D {
public:
    Array2D() = default;
    Array2D(int i0, int j0, int ni, int nj)
        : i0_(i0), j0_(j0), ni_(ni), nj_(nj), data_(static_cast<size_t>(ni) * nj, 0.0) {}

    double& operator()(int i, int j) {
        return data_[static_cast<size_t>(j - j0_) * ni_ + (i - i0_)];
    }
    double operator()(int i, int j) const {
        return data_[static_cast<size_t>(j - j0_) * ni_ + (i - i0_)];
    }

    int i_begin() const { return i0_; }
    int i_end() const { return i0_ + ni_; }
    int j_begin() const { return j0_; }
    int j_end() const { return j0_ + nj_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int i0_ = 0, j0_ = 0, ni_ = 0, nj_ = 0;
    std::vector<double> data_;
};

enum class SideBC : std::uint8_t { Periodic, NoSlipWall, Inflow, TractionOutflow };

enum Side : int { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

struct GridSpec {
    Vec2 origin{0.0, 0.0};
    Vec2 extent{1.0, 1.0};
    int nx = 0;
    int ny = 0;
    int ghost = 4;
    std::array<SideBC, 4> bc{SideBC::Periodic, SideBC::Periodic, SideBC::Periodic,
                             SideBC::Periodic};

    double h() const { return extent.x / nx; }
    bool periodic_x() const { return bc[kLeft] == SideBC::Periodic; }
    bool periodic_y() const { return bc[kBottom] == SideBC::Periodic; }
    bool fully_periodic() const { return periodic_x() && periodic_y(); }

    /// Canonical u-face count in x: boundary faces are DOFs on walls, the
    /// wrap image is a ghost on periodic sides.
    int nux() const { return periodic_x() ? nx : nx + 1; }
    int nvy() const { return periodic_y() ? ny : ny + 1; }

    Vec2 cell_center(int i, int j) const {
        return {origin.x + (i + 0.5) * h(), origin.y + (j + 0.5) * h()};
    }
    Vec2 u_face(int i, int j) const { return {origin.x + i * h(), origin.y + (j + 0.5) * h()}; }
    Vec2 v_face(int i, int j) const { return {origin.x + (i + 0.5) * h(), origin.y + j * h()}; }

    /// Throws ConfigError on anisotropic spacing, undersized ghost layers, or
    /// unpaired periodic sides.
    void validate() const;
};

/// MAC staggered field: u at vertical-face centers, v at horizontal-face
/// centers, p at cell centers, each with ghost layers.
struct StaggeredField {
    GridSpec spec;
    Array2D u, v, p;

    StaggeredField() = default;
    explicit StaggeredField(const GridSpec& s);
};

/// Boundary values used by the ghost fill. Velocity suppliers apply to
/// NoSlipWall (implicitly zero when unset) and Inflow sides; traction sides
/// impose `traction_pressure` as the boundary pressure value with zero normal
/// gradient of velocity (tangential value pinned to zero instead when
/// `traction_tangential_zero` is set).
struct BoundaryData {
    std::array<std::function<Vec2(Vec2, double)>, 4> velocity{};
    std::array<double, 4> traction_pressure{0.0, 0.0, 0.0, 0.0};
    std::array<bool, 4> traction_tangential_zero{false, false, false, false};
};

/// Fills u/v ghost layers (and boundary faces on Dirichlet sides) at time t.
void fill_velocity_ghosts(StaggeredField& f, const BoundaryData& bd, double t);

/// Fills pressure ghosts: Neumann at walls/inflow, Dirichlet at traction
/// sides (value = traction_pressure * scale), periodic wrap otherwise.
void fill_pressure_ghosts(StaggeredField& f, const BoundaryData& bd, double scale = 1.0);

/// Cell-centered discrete divergence (ghosts must be filled).
Array2D divergence(const StaggeredField& f);

/// Discrete pressure gradient evaluated on the velocity faces.
void pressure_gradient(const StaggeredField& f, Array2D& gu, Array2D& gv);

/// 5-point Laplacian of a cell-centered array with filled ghosts.
Array2D laplacian_cells(const Array2D& a, double h, int nx, int ny);

double max_abs_interior_divergence(const StaggeredField& f);
double max_abs_velocity(const StaggeredField& f);
bool field_is_finite(const StaggeredField& f);

/// Maximum |curl| over interior grid nodes.
double max_abs_vorticity(const StaggeredField& f);

/// Discretely divergence-free random velocity field on a periodic grid,
/// reproducible from the seed: the discrete curl of a dyadic-valued stream
/// function, so the divergence cancels exactly in floating point.
/// Throws ConfigError for non-periodic specs.
StaggeredField make_divfree(std::uint64_t seed, const GridSpec& spec);

/// Discrete curl of a given node-centered stream function (u = delta_y psi/h,
/// v = -delta_x psi/h with the /h folded into the stream values).
StaggeredField curl_of_stream(const Array2D& psi, const GridSpec& spec);

/// Text dump of the canonical field values; round-trips bit-exactly.
void write_field(const StaggeredField& f, const std::string& path);
StaggeredField read_field(const std::string& path);

} // namespace ibfsi
