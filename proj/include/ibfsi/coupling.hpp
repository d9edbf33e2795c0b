#pragma once

#include "ibfsi/geometry.hpp"
#include "ibfsi/kernels.hpp"
#include "ibfsi/macgrid.hpp"

#include <span>
#include <vector>

namespace ibfsi {

/// Pairs a regularized delta function with the grid it acts on.
struct CouplingContext {
    DeltaKernel delta;
    GridSpec spec;

    CouplingContext(DeltaKernel d, GridSpec s);
};

struct StencilEntry {
    int i, j;
    double w; // delta_h value; the entries sum to 1/h^2
};

/// Faces of velocity component `component` (0 = u, 1 = v) within kernel
/// support of `position`, with tensor-product weights (1/h^2) phi zeta.
/// Periodic indices are wrapped to the canonical range. Throws
/// StencilOverflowError when the support does not fit in interior + ghosts.
std::vector<StencilEntry> stencil(const DeltaKernel& delta, int component, Vec2 position,
                                  const GridSpec& spec);

/// Spreads Lagrangian force densities to the face lattices:
/// f_face += sum_l F_l delta_h(x_face - chi_l) w_l. Accumulates in node order
/// (deterministic); the caller zeroes the target arrays.
void spread(const CouplingContext& ctx, std::span<const Vec2> positions,
            std::span<const Vec2> forces, std::span<const double> weights, Array2D& fu,
            Array2D& fv);

/// Adjoint velocity interpolation: U_l = h^2 sum_faces u delta_h.
void interpolate(const CouplingContext& ctx, const StaggeredField& field,
                 std::span<const Vec2> positions, std::span<Vec2> out);

Vec2 interpolate_at(const CouplingContext& ctx, const StaggeredField& field, Vec2 position);

/// Analytic divergence of the kernel-interpolated velocity field at a point:
/// d(u_interp)/dx + d(v_interp)/dy via the 1D kernel derivatives.
double continuous_divergence(const CouplingContext& ctx, const StaggeredField& field, Vec2 point);

} // namespace ibfsi
