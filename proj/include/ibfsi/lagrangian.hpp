#pragma once

#include "ibfsi/geometry.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ibfsi {

enum class ElementType { Quad4, Segment2 };

/// Reference finite-element mesh: nodes, connectivity, and lumped nodal
/// quadrature weights (area for solids, arclength for fibers).
struct LagrangianMesh {
    ElementType type = ElementType::Quad4;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 4>> elements; // segments use the first two slots
    std::vector<double> weights;
    bool closed_fiber = false;
    /// Generators with a curved reference shape (circle fibers) record the
    /// true reference measure here; < 0 means "sum the element measures".
    double reference_measure = -1.0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }

    /// Recomputes lumped weights by nodal (corner) quadrature.
    void compute_weights();
    /// Checks positive element measures, full node coverage, and that the
    /// weights sum to the total reference measure.
    void validate() const;
    double total_measure() const;

    /// Structured quad grid on an axis-aligned rectangle.
    static LagrangianMesh rectangle(Vec2 lo, Vec2 hi, int ex, int ey);
    /// Quad grid through a bilinear-per-cell mapping of the unit square.
    static LagrangianMesh from_mapping(int ex, int ey,
                                       const std::function<Vec2(double, double)>& map);
    /// Closed circular fiber with m uniformly spaced markers.
    static LagrangianMesh circle_fiber(Vec2 center, double radius, int m);
    /// Open polyline fiber with m markers from a to b.
    static LagrangianMesh line_fiber(Vec2 a, Vec2 b, int m);
    /// The classic tapered-panel geometry (48 x 44/16 corners) scaled so its
    /// long side has length `side` and translated by `offset`, m x m elements.
    static LagrangianMesh cooks_trapezoid(Vec2 offset, double side, int m);
};

struct LagrangianState {
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    std::vector<Vec2> forces;

    static LagrangianState reference(const LagrangianMesh& mesh);
};

enum class MaterialLaw { NeoHookean, SaintVenantKirchhoff, MembraneSpring };

/// Constitutive description. `G` is the shear modulus (or the spring
/// stiffness for membrane fibers); `nu_stab` is the numerical Poisson ratio
/// controlling the volumetric penalty, disabled at -1.
///
/// Unmodified neo-Hookean comes in two flavors: the default stress-free
/// reference form P = G (F - F^-T), and with `deviatoric_only` the plain
/// energy derivative P = G F of W = G/2 (I1 - 3). The latter carries no
/// volumetric coupling at all (the fluid pressure is the only
/// incompressibility enforcement) and is the baseline the immersed benchmarks
/// use when stabilization treatments are switched off.
struct Material {
    MaterialLaw law = MaterialLaw::NeoHookean;
    double G = 1.0;
    double lambda = 0.0;
    bool modified_invariants = false;
    bool deviatoric_only = false;
    double nu_stab = -1.0;

    double kappa_stab() const;
    void validate() const;
};

/// Plane-strain strain energy density Psi(F) for the 2x2 deformation
/// gradient (out-of-plane stretch 1).
double strain_energy(const Material& mat, const Mat2& F);

/// First Piola-Kirchhoff stress dPsi/dF. Throws InvertedElementError when
/// det F <= 0 (element id unset; force assembly attaches it).
Mat2 first_pk_stress(const Material& mat, const Mat2& F);

/// F at a local point of the reference element (corners at (+-1, +-1)).
Mat2 deformation_gradient(const LagrangianMesh& mesh, const LagrangianState& state, int element,
                          Vec2 local);

/// Unified-formulation nodal force densities by nodal quadrature, written
/// into state.forces: F_m = -(1/w_m) sum_q P(X_q) grad phi_m(X_q) w_q.
/// Membrane fibers use kappa times the 3-point second difference instead.
void elastic_nodal_forces(const LagrangianMesh& mesh, LagrangianState& state,
                          const Material& mat);

struct TetherParams {
    double kappa = 0.0;
    double eta = 0.0;
    /// Targets as functions of the reference coordinate and time; defaults
    /// are the reference position itself and zero velocity.
    std::function<Vec2(Vec2, double)> target_position;
    std::function<Vec2(Vec2, double)> target_velocity;

    void validate() const;
};

/// Penalty force F_l = kappa (psi_l - chi_l) + eta (V_l - U_l).
void tether_nodal_forces(const LagrangianMesh& mesh, const LagrangianState& state,
                         const TetherParams& tp, double t, std::span<Vec2> out);

/// det F at each element centroid (negative values reported, not raised).
std::vector<double> element_jacobians(const LagrangianMesh& mesh, const LagrangianState& state);

/// Area-weighted L2 norm of (J - 1) over elements.
double jacobian_l2_error(const LagrangianMesh& mesh, const LagrangianState& state);

/// Shoelace area of an ordered closed polygon; at least 3 points.
double tracer_area(std::span<const Vec2> polygon);

void write_mesh(const LagrangianMesh& mesh, const std::string& path);
LagrangianMesh read_mesh(const std::string& path);

} // namespace ibfsi
