#include "ibfsi/coupling.hpp"

#include "ibfsi/errors.hpp"

#include <cmath>
#include <string>

namespace ibfsi {

namespace {

struct ComponentFrame {
    double xi, eta;          // position in grid units on the component lattice
    int ni, nj;              // canonical DOF counts (periodic wrap moduli)
    bool wrap_x, wrap_y;
    int max_i, max_j;        // largest canonical index (non-periodic)
};

ComponentFrame component_frame(const GridSpec& s, int component, Vec2 pos) {
    ComponentFrame f;
    const double h = s.h();
    if (component == 0) { // u: faces at (i h, (j+1/2) h)
        f.xi = (pos.x - s.origin.x) / h;
        f.eta = (pos.y - s.origin.y) / h - 0.5;
        f.ni = s.periodic_x() ? s.nx : s.nx + 1;
        f.nj = s.ny;
        f.max_i = s.nx;
        f.max_j = s.ny - 1;
    } else { // v: faces at ((i+1/2) h, j h)
        f.xi = (pos.x - s.origin.x) / h - 0.5;
        f.eta = (pos.y - s.origin.y) / h;
        f.ni = s.nx;
        f.nj = s.periodic_y() ? s.ny : s.ny + 1;
        f.max_i = s.nx - 1;
        f.max_j = s.ny;
    }
    f.wrap_x = s.periodic_x();
    f.wrap_y = s.periodic_y();
    return f;
}

void check_fit(const ComponentFrame& f, const GridSpec& s, const AxisStencil& sx,
               const AxisStencil& sy, Vec2 pos, long node) {
    const int g = s.ghost;
    const bool bad_x = !f.wrap_x && (sx.first < -g || sx.first + sx.count - 1 > f.max_i + g);
    const bool bad_y = !f.wrap_y && (sy.first < -g || sy.first + sy.count - 1 > f.max_j + g);
    if (bad_x || bad_y) {
        std::string msg = "kernel stencil does not fit at point (" + std::to_string(pos.x) +
                          ", " + std::to_string(pos.y) + ")";
        if (node >= 0) msg += " for node " + std::to_string(node);
        throw StencilOverflowError(msg, pos, node);
    }
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

} // namespace

CouplingContext::CouplingContext(DeltaKernel d, GridSpec s) : delta(std::move(d)), spec(s) {
    spec.validate();
    const int need = (delta.max_points() + 1) / 2;
    if (spec.ghost < need)
        throw ConfigError("ghost width " + std::to_string(spec.ghost) +
                          " too small for kernel " + delta.name);
}

std::vector<StencilEntry> stencil(const DeltaKernel& delta, int component, Vec2 position,
                                  const GridSpec& spec) {
    const ComponentFrame f = component_frame(spec, component, position);
    const Kernel1D& kx = delta.kernel_for(component, 0);
    const Kernel1D& ky = delta.kernel_for(component, 1);
    const AxisStencil sx = axis_stencil(kx, f.xi);
    const AxisStencil sy = axis_stencil(ky, f.eta);
    check_fit(f, spec, sx, sy, position, -1);

    const double inv_h2 = 1.0 / (spec.h() * spec.h());
    std::vector<StencilEntry> out;
    out.reserve(static_cast<size_t>(sx.count) * sy.count);
    for (int m = 0; m < sy.count; ++m) {
        const int j = f.wrap_y ? wrap(sy.first + m, f.nj) : sy.first + m;
        for (int k = 0; k < sx.count; ++k) {
            const int i = f.wrap_x ? wrap(sx.first + k, f.ni) : sx.first + k;
            out.push_back({i, j, sx.w[k] * sy.w[m] * inv_h2});
        }
    }
    return out;
}

void spread(const CouplingContext& ctx, std::span<const Vec2> positions,
            std::span<const Vec2> forces, std::span<const double> weights, Array2D& fu,
            Array2D& fv) {
    const GridSpec& s = ctx.spec;
    const double inv_h2 = 1.0 / (s.h() * s.h());
    for (size_t l = 0; l < positions.size(); ++l) {
        for (int component = 0; component < 2; ++component) {
            const double fc = (component == 0 ? forces[l].x : forces[l].y) * weights[l] * inv_h2;
            if (fc == 0.0) continue;
            const ComponentFrame f = component_frame(s, component, positions[l]);
            const AxisStencil sx = axis_stencil(ctx.delta.kernel_for(component, 0), f.xi);
            const AxisStencil sy = axis_stencil(ctx.delta.kernel_for(component, 1), f.eta);
            check_fit(f, s, sx, sy, positions[l], static_cast<long>(l));
            Array2D& target = component == 0 ? fu : fv;
            for (int m = 0; m < sy.count; ++m) {
                const int j = f.wrap_y ? wrap(sy.first + m, f.nj) : sy.first + m;
                const double fy = fc * sy.w[m];
                for (int k = 0; k < sx.count; ++k) {
                    const int i = f.wrap_x ? wrap(sx.first + k, f.ni) : sx.first + k;
                    target(i, j) += fy * sx.w[k];
                }
            }
        }
    }
}

Vec2 interpolate_at(const CouplingContext& ctx, const StaggeredField& field, Vec2 position) {
    const GridSpec& s = ctx.spec;
    Vec2 out{0.0, 0.0};
    for (int component = 0; component < 2; ++component) {
        const ComponentFrame f = component_frame(s, component, position);
        const AxisStencil sx = axis_stencil(ctx.delta.kernel_for(component, 0), f.xi);
        const AxisStencil sy = axis_stencil(ctx.delta.kernel_for(component, 1), f.eta);
        check_fit(f, s, sx, sy, position, -1);
        const Array2D& src = component == 0 ? field.u : field.v;
        double acc = 0.0;
        for (int m = 0; m < sy.count; ++m) {
            const int j = f.wrap_y ? wrap(sy.first + m, f.nj) : sy.first + m;
            double row = 0.0;
            for (int k = 0; k < sx.count; ++k) {
                const int i = f.wrap_x ? wrap(sx.first + k, f.ni) : sx.first + k;
                row += src(i, j) * sx.w[k];
            }
            acc += row * sy.w[m];
        }
        (component == 0 ? out.x : out.y) = acc;
    }
    return out;
}

void interpolate(const CouplingContext& ctx, const StaggeredField& field,
                 std::span<const Vec2> positions, std::span<Vec2> out) {
    for (size_t l = 0; l < positions.size(); ++l) {
        try {
            out[l] = interpolate_at(ctx, field, positions[l]);
        } catch (const StencilOverflowError& e) {
            throw StencilOverflowError(std::string(e.what()) + " for node " + std::to_string(l),
                                       e.position(), static_cast<long>(l));
        }
    }
}

double continuous_divergence(const CouplingContext& ctx, const StaggeredField& field,
                             Vec2 point) {
    const GridSpec& s = ctx.spec;
    const double inv_h = 1.0 / s.h();
    double div = 0.0;
    for (int component = 0; component < 2; ++component) {
        const ComponentFrame f = component_frame(s, component, point);
        const Kernel1D& kx = ctx.delta.kernel_for(component, 0);
        const Kernel1D& ky = ctx.delta.kernel_for(component, 1);
        // d/dx of the u-interpolant, d/dy of the v-interpolant
        const AxisStencil sx =
            component == 0 ? axis_stencil_deriv(kx, f.xi) : axis_stencil(kx, f.xi);
        const AxisStencil sy =
            component == 0 ? axis_stencil(ky, f.eta) : axis_stencil_deriv(ky, f.eta);
        check_fit(f, s, sx, sy, point, -1);
        const Array2D& src = component == 0 ? field.u : field.v;
        // measure against the stencil-center value: the derivative weights sum
        // to zero, so this is algebraically a no-op but keeps constants exact
        const int ci = f.wrap_x ? wrap(sx.first + sx.count / 2, f.ni) : sx.first + sx.count / 2;
        const int cj = f.wrap_y ? wrap(sy.first + sy.count / 2, f.nj) : sy.first + sy.count / 2;
        const double ref = src(ci, cj);
        double acc = 0.0;
        for (int m = 0; m < sy.count; ++m) {
            const int j = f.wrap_y ? wrap(sy.first + m, f.nj) : sy.first + m;
            double row = 0.0;
            for (int k = 0; k < sx.count; ++k) {
                const int i = f.wrap_x ? wrap(sx.first + k, f.ni) : sx.first + k;
                row += (src(i, j) - ref) * sx.w[k];
            }
            acc += row * sy.w[m];
        }
        div += acc * inv_h;
    }
    return div;
}

} // namespace ibfsi
