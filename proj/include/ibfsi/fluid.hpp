#pragma once

#include "ibfsi/macgrid.hpp"
#include "ibfsi/poisson.hpp"

namespace ibfsi {

enum class ViscousScheme { Explicit, CrankNicolson };

struct FluidParams {
    double rho = 1.0;        // g/cm^3
    double mu = 0.0;         // dyn s/cm^2
    double dt = 0.0;         // s
    double cfl_safety = 0.5; // advective CFL fraction
    ViscousScheme viscous = ViscousScheme::Explicit;
    double projection_tol = 1e-12; // post-step divergence target, times |u|/h

    void validate() const;
};

struct FluidState {
    StaggeredField field;
    double time = 0.0;

    // Adams-Bashforth history; reset whenever dt changes
    bool have_prev_advection = false;
    double prev_dt = 0.0;
    Array2D adv_u_prev, adv_v_prev;

    explicit FluidState(const GridSpec& spec);
};

enum class StepStatus { Ok, RejectedCfl, Diverged };

struct StepReport {
    StepStatus status = StepStatus::Ok;
    double max_divergence = 0.0;
    double suggested_dt = 0.0; // set when a step is rejected
    int poisson_iterations = 0;
};

/// Largest stable time step: min of the advective CFL bound and (for the
/// explicit scheme) the viscous bound 0.25 rho h^2 / mu.
double stable_dt(const FluidState& state, const FluidParams& p, const GridSpec& spec);

/// Incompressible Navier-Stokes stepper: AB2 centered advection, explicit or
/// Crank-Nicolson viscosity, incremental pressure-correction projection.
class FluidSolver {
public:
    FluidSolver(const GridSpec& spec, BoundaryData bdata);

    /// One projection step with the given face-centered body force density.
    /// Rejects (without touching the state) when dt violates the stability
    /// bounds; the caller decides how to shrink dt.
    StepReport step(FluidState& state, const Array2D& fu, const Array2D& fv,
                    const FluidParams& p);

    const BoundaryData& boundary() const { return bdata_; }
    /// Ramp factor applied to traction pressures (default 1).
    void set_traction_ramp(std::function<double(double)> ramp) { ramp_ = std::move(ramp); }

private:
    double ramp_at(double t) const { return ramp_ ? ramp_(t) : 1.0; }
    void advection(const StaggeredField& f, Array2D& au, Array2D& av) const;

    GridSpec spec_;
    BoundaryData bdata_;
    PoissonSolver poisson_;
    std::function<double(double)> ramp_;

    // step workspaces
    bool ws_ready_ = false;
    Array2D au_, av_, rhs_, phi_;
    StaggeredField star_, next_;
};

} // namespace ibfsi
