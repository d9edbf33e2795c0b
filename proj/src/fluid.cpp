#include "ibfsi/fluid.hpp"

#include "ibfsi/errors.hpp"

#include <cmath>
#include <limits>

namespace ibfsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DofRange {
    int i0, i1, j0, j1; // inclusive
};

bool dirichlet_like(SideBC bc) { return bc == SideBC::NoSlipWall || bc == SideBC::Inflow; }

// u-faces that the momentum update owns (boundary faces on velocity-Dirichlet
// sides are prescribed, traction-side boundary faces evolve)
DofRange u_dofs(const GridSpec& s) {
    DofRange r{0, s.nx, 0, s.ny - 1};
    if (s.periodic_x()) {
        r.i1 = s.nx - 1;
    } else {
        if (dirichlet_like(s.bc[kLeft])) r.i0 = 1;
        if (dirichlet_like(s.bc[kRight])) r.i1 = s.nx - 1;
    }
    return r;
}

DofRange v_dofs(const GridSpec& s) {
    DofRange r{0, s.nx - 1, 0, s.ny};
    if (s.periodic_y()) {
        r.j1 = s.ny - 1;
    } else {
        if (dirichlet_like(s.bc[kBottom])) r.j0 = 1;
        if (dirichlet_like(s.bc[kTop])) r.j1 = s.ny - 1;
    }
    return r;
}

double dot_range(const Array2D& a, const Array2D& b, const DofRange& r) {
    double s = 0.0;
    for (int j = r.j0; j <= r.j1; ++j)
        for (int i = r.i0; i <= r.i1; ++i) s += a(i, j) * b(i, j);
    return s;
}

double max_abs_range(const Array2D& a, const DofRange& r) {
    double m = 0.0;
    for (int j = r.j0; j <= r.j1; ++j)
        for (int i = r.i0; i <= r.i1; ++i) m = std::max(m, std::fabs(a(i, j)));
    return m;
}

// Unpreconditioned CG for (I - c Lap) on one velocity component; the
// Helmholtz operator is well conditioned for the time steps in play.
class HelmholtzCG {
public:
    HelmholtzCG(const GridSpec& spec, const BoundaryData& bd, int component, double c)
        : spec_(spec), component_(component), c_(c),
          dofs_(component == 0 ? u_dofs(spec) : v_dofs(spec)), scratch_(spec), zero_bd_() {
        // homogeneous version of the boundary data: zero velocity values,
        // same traction tangential convention
        zero_bd_.traction_tangential_zero = bd.traction_tangential_zero;
    }

    // x holds the initial guess with boundary values applied; b is the rhs.
    void solve(const BoundaryData& bd, double t, Array2D& x, const Array2D& b) {
        Array2D& comp = component_ == 0 ? scratch_.u : scratch_.v;
        Array2D r = b, p = b, q = b;

        // residual with the inhomogeneous boundary fill
        copy_into(x, comp);
        fill_velocity_ghosts(scratch_, bd, t);
        copy_from(comp, x); // boundary faces now carry the BC values
        apply(q);
        for (int j = dofs_.j0; j <= dofs_.j1; ++j)
            for (int i = dofs_.i0; i <= dofs_.i1; ++i) r(i, j) = b(i, j) - q(i, j);

        const double tol = 1e-12 * std::max(max_abs_range(b, dofs_), 1e-300);
        double rnorm = max_abs_range(r, dofs_);
        if (rnorm <= tol) return;

        Array2D e(x.i_begin(), x.j_begin(), x.i_end() - x.i_begin(), x.j_end() - x.j_begin());
        double rho = dot_range(r, r, dofs_);
        for (int j = dofs_.j0; j <= dofs_.j1; ++j)
            for (int i = dofs_.i0; i <= dofs_.i1; ++i) p(i, j) = r(i, j);

        std::vector<double> history{rnorm};
        for (int it = 0; it < 500; ++it) {
            copy_into(p, comp);
            fill_velocity_ghosts(scratch_, zero_bd_, t);
            copy_from(comp, p);
            apply(q);
            const double alpha = rho / dot_range(p, q, dofs_);
            for (int j = dofs_.j0; j <= dofs_.j1; ++j)
                for (int i = dofs_.i0; i <= dofs_.i1; ++i) {
                    e(i, j) += alpha * p(i, j);
                    r(i, j) -= alpha * q(i, j);
                }
            rnorm = max_abs_range(r, dofs_);
            history.push_back(rnorm);
            if (rnorm <= tol) {
                for (int j = dofs_.j0; j <= dofs_.j1; ++j)
                    for (int i = dofs_.i0; i <= dofs_.i1; ++i) x(i, j) += e(i, j);
                return;
            }
            const double rho_new = dot_range(r, r, dofs_);
            const double beta = rho_new / rho;
            rho = rho_new;
            for (int j = dofs_.j0; j <= dofs_.j1; ++j)
                for (int i = dofs_.i0; i <= dofs_.i1; ++i) p(i, j) = r(i, j) + beta * p(i, j);
        }
        throw SolverFailureError("viscous Helmholtz solve did not converge", history);
    }

private:
    void copy_into(const Array2D& src, Array2D& dst) {
        for (int j = dofs_.j0; j <= dofs_.j1; ++j)
            for (int i = dofs_.i0; i <= dofs_.i1; ++i) dst(i, j) = src(i, j);
    }
    void copy_from(const Array2D& src, Array2D& dst) {
        for (int j = src.j_begin(); j < src.j_end(); ++j)
            for (int i = src.i_begin(); i < src.i_end(); ++i) dst(i, j) = src(i, j);
    }
    void apply(Array2D& out) {
        const Array2D& w = component_ == 0 ? scratch_.u : scratch_.v;
        const double ch2 = c_ / (spec_.h() * spec_.h());
        for (int j = dofs_.j0; j <= dofs_.j1; ++j)
            for (int i = dofs_.i0; i <= dofs_.i1; ++i)
                out(i, j) = w(i, j) - ch2 * (w(i + 1, j) + w(i - 1, j) + w(i, j + 1) +
                                             w(i, j - 1) - 4.0 * w(i, j));
    }

    GridSpec spec_;
    int component_;
    double c_;
    DofRange dofs_;
    StaggeredField scratch_;
    BoundaryData zero_bd_;
};

} // namespace

void FluidParams::validate() const {
    if (rho <= 0.0) throw ConfigError("fluid density must be positive");
    if (mu < 0.0) throw ConfigError("fluid viscosity must be nonnegative");
    if (dt <= 0.0) throw ConfigError("time step must be positive");
}

FluidState::FluidState(const GridSpec& spec) : field(spec) {
    const int g = spec.ghost;
    adv_u_prev = Array2D(-g, -g, spec.nx + 1 + 2 * g, spec.ny + 2 * g);
    adv_v_prev = Array2D(-g, -g, spec.nx + 2 * g, spec.ny + 1 + 2 * g);
}

double stable_dt(const FluidState& state, const FluidParams& p, const GridSpec& spec) {
    const double h = spec.h();
    const double umax = max_abs_velocity(state.field);
    const double adv = umax > 0.0 ? p.cfl_safety * h / umax : kInf;
    double visc = kInf;
    if (p.viscous == ViscousScheme::Explicit && p.mu > 0.0)
        visc = 0.25 * p.rho * h * h / p.mu;
    return std::min(adv, visc);
}

FluidSolver::FluidSolver(const GridSpec& spec, BoundaryData bdata)
    : spec_(spec), bdata_(std::move(bdata)), poisson_(spec) {
    spec_.validate();
}

void FluidSolver::advection(const StaggeredField& f, Array2D& au, Array2D& av) const {
    const GridSpec& s = spec_;
    const double h = s.h();
    const Array2D div = divergence(f);
    auto cell_div = [&](int i, int j) -> double {
        if (s.periodic_x()) i = (i % s.nx + s.nx) % s.nx;
        if (s.periodic_y()) j = (j % s.ny + s.ny) % s.ny;
        if (i < 0 || i >= s.nx || j < 0 || j >= s.ny)
            return 0.0; // outside cells only border prescribed faces
        return div(i, j);
    };

    // conservative fluxes minus the velocity-times-divergence correction:
    // centered, second order, and advective-form consistent
    const DofRange ur = u_dofs(s);
    for (int j = ur.j0; j <= ur.j1; ++j)
        for (int i = ur.i0; i <= ur.i1; ++i) {
            const double ubar_r = 0.5 * (f.u(i, j) + f.u(i + 1, j));
            const double ubar_l = 0.5 * (f.u(i - 1, j) + f.u(i, j));
            const double vbar_t = 0.5 * (f.v(i - 1, j + 1) + f.v(i, j + 1));
            const double vbar_b = 0.5 * (f.v(i - 1, j) + f.v(i, j));
            const double ubar_t = 0.5 * (f.u(i, j) + f.u(i, j + 1));
            const double ubar_b = 0.5 * (f.u(i, j - 1) + f.u(i, j));
            const double flux = (ubar_r * ubar_r - ubar_l * ubar_l) / h +
                                (vbar_t * ubar_t - vbar_b * ubar_b) / h;
            const double dbar = 0.5 * (cell_div(i - 1, j) + cell_div(i, j));
            au(i, j) = flux - f.u(i, j) * dbar;
        }
    const DofRange vr = v_dofs(s);
    for (int j = vr.j0; j <= vr.j1; ++j)
        for (int i = vr.i0; i <= vr.i1; ++i) {
            const double vbar_t = 0.5 * (f.v(i, j) + f.v(i, j + 1));
            const double vbar_b = 0.5 * (f.v(i, j - 1) + f.v(i, j));
            const double ubar_r = 0.5 * (f.u(i + 1, j - 1) + f.u(i + 1, j));
            const double ubar_l = 0.5 * (f.u(i, j - 1) + f.u(i, j));
            const double vbar_r = 0.5 * (f.v(i, j) + f.v(i + 1, j));
            const double vbar_l = 0.5 * (f.v(i - 1, j) + f.v(i, j));
            const double flux = (ubar_r * vbar_r - ubar_l * vbar_l) / h +
                                (vbar_t * vbar_t - vbar_b * vbar_b) / h;
            const double dbar = 0.5 * (cell_div(i, j - 1) + cell_div(i, j));
            av(i, j) = flux - f.v(i, j) * dbar;
        }
}

StepReport FluidSolver::step(FluidState& state, const Array2D& fu, const Array2D& fv,
                             const FluidParams& p) {
    p.validate();
    const GridSpec& s = spec_;
    const double h = s.h();
    const double dt = p.dt;
    StepReport rep;

    StaggeredField& f = state.field;
    fill_velocity_ghosts(f, bdata_, state.time);
    fill_pressure_ghosts(f, bdata_, ramp_at(state.time));

    if (!field_is_finite(f)) {
        rep.status = StepStatus::Diverged;
        return rep;
    }
    const double dt_ok = stable_dt(state, p, s);
    if (dt > dt_ok * (1.0 + 1e-9)) {
        rep.status = StepStatus::RejectedCfl;
        rep.suggested_dt = 0.5 * dt;
        return rep;
    }

    if (!ws_ready_) {
        const int g = s.ghost;
        au_ = Array2D(-g, -g, s.nx + 1 + 2 * g, s.ny + 2 * g);
        av_ = Array2D(-g, -g, s.nx + 2 * g, s.ny + 1 + 2 * g);
        rhs_ = Array2D(0, 0, s.nx, s.ny);
        phi_ = Array2D(-1, -1, s.nx + 2, s.ny + 2);
        star_ = StaggeredField(s);
        next_ = StaggeredField(s);
        ws_ready_ = true;
    }
    Array2D& au = au_;
    Array2D& av = av_;
    advection(f, au, av);

    // AB2 weights collapse to forward Euler on the first step or a dt change
    const bool ab2 = state.have_prev_advection && state.prev_dt == dt;
    const double ca = ab2 ? 1.5 : 1.0;
    const double cb = ab2 ? -0.5 : 0.0;

    const double nu = p.mu / p.rho;
    const bool cn = p.viscous == ViscousScheme::CrankNicolson && p.mu > 0.0;
    const double visc_now = cn ? 0.5 * nu : nu;

    StaggeredField& star = star_;
    const DofRange ur = u_dofs(s);
    const DofRange vr = v_dofs(s);
    const double inv_h2 = 1.0 / (h * h);
    for (int j = ur.j0; j <= ur.j1; ++j)
        for (int i = ur.i0; i <= ur.i1; ++i) {
            const double lap = (f.u(i + 1, j) + f.u(i - 1, j) + f.u(i, j + 1) + f.u(i, j - 1) -
                                4.0 * f.u(i, j)) *
                               inv_h2;
            const double gradp = (f.p(i, j) - f.p(i - 1, j)) / h;
            star.u(i, j) = f.u(i, j) +
                           dt * (-(ca * au(i, j) + cb * state.adv_u_prev(i, j)) - gradp / p.rho +
                                 visc_now * lap + fu(i, j) / p.rho);
        }
    for (int j = vr.j0; j <= vr.j1; ++j)
        for (int i = vr.i0; i <= vr.i1; ++i) {
            const double lap = (f.v(i + 1, j) + f.v(i - 1, j) + f.v(i, j + 1) + f.v(i, j - 1) -
                                4.0 * f.v(i, j)) *
                               inv_h2;
            const double gradp = (f.p(i, j) - f.p(i, j - 1)) / h;
            star.v(i, j) = f.v(i, j) +
                           dt * (-(ca * av(i, j) + cb * state.adv_v_prev(i, j)) - gradp / p.rho +
                                 visc_now * lap + fv(i, j) / p.rho);
        }

    const double t_new = state.time + dt;
    if (cn) {
        Array2D rhs_u = star.u, rhs_v = star.v;
        HelmholtzCG hu(s, bdata_, 0, 0.5 * nu * dt);
        HelmholtzCG hv(s, bdata_, 1, 0.5 * nu * dt);
        hu.solve(bdata_, t_new, star.u, rhs_u);
        hv.solve(bdata_, t_new, star.v, rhs_v);
    }
    fill_velocity_ghosts(star, bdata_, t_new);

    // projection: Lap(phi) = (rho/dt) div(u*), phi Dirichlet at traction
    // sides carries the boundary-pressure increment over the step
    const Array2D div_star = divergence(star);
    Array2D& rhs = rhs_;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) rhs(i, j) = div_star(i, j) * (p.rho / dt);

    std::array<double, 4> phi_bc{};
    const double dramp = ramp_at(t_new) - ramp_at(state.time);
    for (int k = 0; k < 4; ++k)
        if (s.bc[k] == SideBC::TractionOutflow) phi_bc[k] = bdata_.traction_pressure[k] * dramp;

    const double star_max = std::max(max_abs_velocity(star), 1e-14);
    const double res_target = p.projection_tol * star_max / h * (p.rho / dt);
    Array2D& phi = phi_;
    const SolveReport prep = poisson_.solve(rhs, phi, phi_bc, 1e-13, res_target, 500);
    rep.poisson_iterations = prep.iterations;

    // correct and finalize
    StaggeredField& next = next_;
    next.p = f.p;
    // depth-1 ghost values of phi: Dirichlet reflection through the boundary
    // value at traction sides, Neumann copy elsewhere
    auto phi_at = [&](int i, int j) -> double {
        if (s.periodic_x()) i = (i % s.nx + s.nx) % s.nx;
        if (s.periodic_y()) j = (j % s.ny + s.ny) % s.ny;
        if (i < 0)
            return s.bc[kLeft] == SideBC::TractionOutflow ? 2.0 * phi_bc[kLeft] - phi(0, j)
                                                          : phi(0, j);
        if (i >= s.nx)
            return s.bc[kRight] == SideBC::TractionOutflow
                       ? 2.0 * phi_bc[kRight] - phi(s.nx - 1, j)
                       : phi(s.nx - 1, j);
        if (j < 0)
            return s.bc[kBottom] == SideBC::TractionOutflow ? 2.0 * phi_bc[kBottom] - phi(i, 0)
                                                            : phi(i, 0);
        if (j >= s.ny)
            return s.bc[kTop] == SideBC::TractionOutflow ? 2.0 * phi_bc[kTop] - phi(i, s.ny - 1)
                                                         : phi(i, s.ny - 1);
        return phi(i, j);
    };
    for (int j = ur.j0; j <= ur.j1; ++j)
        for (int i = ur.i0; i <= ur.i1; ++i)
            next.u(i, j) = star.u(i, j) - (dt / p.rho) * (phi_at(i, j) - phi_at(i - 1, j)) / h;
    for (int j = vr.j0; j <= vr.j1; ++j)
        for (int i = vr.i0; i <= vr.i1; ++i)
            next.v(i, j) = star.v(i, j) - (dt / p.rho) * (phi_at(i, j) - phi_at(i, j - 1)) / h;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) next.p(i, j) = f.p(i, j) + phi(i, j);

    f.u = next.u;
    f.v = next.v;
    f.p = next.p;
    fill_velocity_ghosts(f, bdata_, t_new);
    fill_pressure_ghosts(f, bdata_, ramp_at(t_new));

    state.adv_u_prev = au;
    state.adv_v_prev = av;
    state.have_prev_advection = true;
    state.prev_dt = dt;
    state.time = t_new;
    rep.max_divergence = max_abs_interior_divergence(f);
    return rep;
}

} // namespace ibfsi
