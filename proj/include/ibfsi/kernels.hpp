#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace ibfsi {

/// Maximum 1D support width (grid points) of any supported kernel.
inline constexpr int kMaxKernelPoints = 6;

enum class KernelFamily { IB, BS };

/// One member of a 1D regularized-delta kernel family.
///
/// `points` counts the grid points of support; the kernel is supported on
/// [-points/2, +points/2] in dimensionless (grid) units and is even.
/// Breakpoint evaluation is right-continuous.
struct Kernel1D {
    KernelFamily family = KernelFamily::BS;
    int points = 2;

    Kernel1D() = default;
    /// Throws ConfigError for unsupported (family, points) combinations.
    /// Supported: IB {3,4,5,6}, BS {1,...,6}.
    Kernel1D(KernelFamily f, int pts);

    double half_support() const { return 0.5 * points; }

    /// phi(r); zero outside support, even in r.
    double eval(double r) const;

    /// dphi/dr; right-sided value at non-differentiable breakpoints,
    /// zero outside support.
    double deriv(double r) const;

    std::string name() const;

    bool operator==(const Kernel1D& o) const {
        return family == o.family && points == o.points;
    }
};

/// Support nodes and weights of a 1D kernel about a position `xi` given in
/// grid units (nodes sit at the integers). Always exactly `points` entries;
/// weights at the support edge are zero.
struct AxisStencil {
    int first = 0;                                 // leftmost node index
    int count = 0;                                 // == kernel points
    std::array<double, kMaxKernelPoints> w{};      // w[k] = phi(xi - (first + k))
};

AxisStencil axis_stencil(const Kernel1D& k, double xi);

/// Same nodes, derivative weights d/dxi phi(xi - node).
AxisStencil axis_stencil_deriv(const Kernel1D& k, double xi);

/// A 2D regularized delta function: isotropic (one 1D kernel in both axes)
/// or composite (a one-order-higher B-spline along each velocity component's
/// own axis, the lower-order one along the other).
struct DeltaKernel {
    bool composite = false;
    Kernel1D normal;      // isotropic: the kernel; composite: higher-order member
    Kernel1D tangential;  // composite only: normal.points == tangential.points + 1

    std::string name;

    static DeltaKernel isotropic(Kernel1D k);
    static DeltaKernel make_composite(Kernel1D normal, Kernel1D tangential);

    /// Parses the selection grammar: IB3..IB6, BS1..BS6, CBS21..CBS65.
    static DeltaKernel parse(std::string_view spec);

    /// 1D kernel applied to velocity component `component` (0 = u, 1 = v)
    /// along axis `axis` (0 = x, 1 = y).
    const Kernel1D& kernel_for(int component, int axis) const {
        if (!composite) return normal;
        return (component == axis) ? normal : tangential;
    }

    int max_points() const { return normal.points; }
};

/// All kernel names accepted by DeltaKernel::parse.
const std::vector<std::string>& supported_kernel_names();

} // namespace ibfsi
