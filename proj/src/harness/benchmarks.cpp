#include "ibfsi/errors.hpp"
#include "ibfsi/harness.hpp"

#include <cmath>

namespace ibfsi {

namespace {

constexpr double kPi = 3.14159265358979323846;

int round_int(double x) { return static_cast<int>(std::lround(x)); }

/// Largest penalty stiffness that keeps the explicit tether update well
/// inside its stability bound, for nodes of typical weight w.
double tether_kappa(double rho, double h, double dt, double w, double alpha = 0.3) {
    return alpha * rho * h * h / (w * dt * dt);
}

double tether_eta(double rho, double h, double dt, double w, double beta = 0.3) {
    return beta * rho * h * h / (w * dt);
}

std::vector<int> nodes_where(const LagrangianMesh& mesh,
                             const std::function<bool(Vec2)>& pred) {
    std::vector<int> out;
    for (int l = 0; l < mesh.node_count(); ++l)
        if (pred(mesh.nodes[l])) out.push_back(l);
    return out;
}

/// Lumped boundary-length shares of the mesh nodes lying on a loaded portion
/// of a structured quad grid's edge. `edge_nodes` walks the edge in order.
std::vector<std::pair<int, double>> edge_shares(const LagrangianMesh& mesh,
                                                const std::vector<int>& edge_nodes,
                                                const std::function<bool(Vec2)>& loaded) {
    std::vector<std::pair<int, double>> shares;
    std::vector<double> acc(mesh.node_count(), 0.0);
    for (size_t k = 0; k + 1 < edge_nodes.size(); ++k) {
        const int a = edge_nodes[k], b = edge_nodes[k + 1];
        const Vec2 mid = (mesh.nodes[a] + mesh.nodes[b]) * 0.5;
        if (!loaded(mid)) continue;
        const double len = (mesh.nodes[b] - mesh.nodes[a]).norm();
        acc[a] += 0.5 * len;
        acc[b] += 0.5 * len;
    }
    for (int l = 0; l < mesh.node_count(); ++l)
        if (acc[l] > 0.0) shares.push_back({l, acc[l]});
    return shares;
}

SimSetup build_membrane(const BenchmarkConfig& cfg) {
    SimSetup s;
    const int n = cfg.resolution > 0 ? cfg.resolution : 64;
    s.grid.nx = s.grid.ny = n;
    s.grid.extent = {1.0, 1.0};
    const double h = s.grid.h();

    s.fluid.rho = 1.0;
    s.fluid.mu = 0.01; // quiescent background; viscosity only damps spurious modes
    s.fluid.dt = cfg.dt > 0.0 ? cfg.dt : h / 8.0;
    s.fluid.viscous = ViscousScheme::Explicit;

    const double R = 0.25;
    const Vec2 center{0.5, 0.5};
    const int markers = std::max(16, round_int(2.0 * kPi * R / (cfg.mfac * h)));

    Structure membrane;
    membrane.label = "membrane";
    membrane.mesh = LagrangianMesh::circle_fiber(center, R, markers);
    membrane.state = LagrangianState::reference(membrane.mesh);
    membrane.material.law = MaterialLaw::MembraneSpring;
    membrane.material.G = cfg.membrane_kappa;
    s.structures.push_back(std::move(membrane));

    const LagrangianMesh ring = LagrangianMesh::circle_fiber(center, R, cfg.membrane_tracers);
    s.tracers = ring.nodes;

    s.final_time = cfg.final_time >= 0.0 ? cfg.final_time : 1.0;
    s.load_time = 0.0;
    s.output_every = cfg.output_every > 0 ? cfg.output_every : 8;
    s.char_velocity = 1.0;
    s.steady_stop = cfg.steady_stop.value_or(false);
    return s;
}

SimSetup build_band(const BenchmarkConfig& cfg) {
    SimSetup s;
    const int n = cfg.resolution > 0 ? cfg.resolution : 64;
    s.grid.nx = 2 * n;
    s.grid.ny = n;
    s.grid.extent = {2.0, 1.0};
    s.grid.bc = {SideBC::TractionOutflow, SideBC::TractionOutflow, SideBC::NoSlipWall,
                 SideBC::NoSlipWall};
    const double h = s.grid.h();

    // differential pressure load: compression on the left face, suction on
    // the right, net drive in +x
    s.bdata.traction_pressure[kLeft] = cfg.band_traction;
    s.bdata.traction_pressure[kRight] = -cfg.band_traction;

    s.fluid.rho = 1.0;
    s.fluid.mu = 0.01;
    s.fluid.dt = cfg.dt > 0.0 ? cfg.dt : 1e-3 * h;
    s.fluid.viscous = ViscousScheme::Explicit;

    const double th = cfg.band_thickness;
    const int ex = std::max(2, round_int(th / (cfg.mfac * h)));
    const int ey = std::max(4, round_int(1.0 / (cfg.mfac * h)));

    Structure band;
    band.label = "band";
    band.mesh = LagrangianMesh::rectangle({1.0 - 0.5 * th, 0.0}, {1.0 + 0.5 * th, 1.0}, ex, ey);
    band.state = LagrangianState::reference(band.mesh);
    band.material.law = MaterialLaw::NeoHookean;
    band.material.G = 200.0;
    band.material.deviatoric_only = true;
    band.material.nu_stab = cfg.stab.nu_stab;
    band.material.modified_invariants = cfg.stab.modified_invariants;

    // the rigid end blocks: tether the outer tenth at each end
    Constraint ends;
    ends.nodes = nodes_where(band.mesh, [](Vec2 X) { return X.y <= 0.1 || X.y >= 0.9; });
    const double wbar = band.mesh.weights[ends.nodes.front()];
    ends.kappa = tether_kappa(s.fluid.rho, h, s.fluid.dt, wbar, 0.002);
    ends.eta = tether_eta(s.fluid.rho, h, s.fluid.dt, wbar, 0.01);
    band.constraints.push_back(std::move(ends));
    s.structures.push_back(std::move(band));

    s.final_time = cfg.final_time >= 0.0 ? cfg.final_time : 1.0;
    s.load_time = cfg.load_time >= 0.0 ? cfg.load_time : 0.0;
    s.output_every = cfg.output_every > 0 ? cfg.output_every : 400;
    s.char_velocity = 1.0;
    s.steady_stop = cfg.steady_stop.value_or(true);
    return s;
}

SimSetup build_block(const BenchmarkConfig& cfg) {
    SimSetup s;
    const int m = cfg.resolution > 0 ? cfg.resolution : 16;
    const int n = std::max(8, round_int(2.0 * m * cfg.mfac));
    s.grid.nx = s.grid.ny = n;
    s.grid.extent = {40.0, 40.0};
    s.grid.bc = {SideBC::NoSlipWall, SideBC::NoSlipWall, SideBC::NoSlipWall, SideBC::NoSlipWall};
    const double h = s.grid.h();

    s.fluid.rho = 1.0;
    s.fluid.mu = 0.16;
    s.fluid.dt = cfg.dt > 0.0 ? cfg.dt : 1e-3 * h;
    s.fluid.viscous = ViscousScheme::Explicit;
    if (s.fluid.dt > 0.2 * 0.25 * s.fluid.rho * h * h / s.fluid.mu)
        s.fluid.viscous = ViscousScheme::CrankNicolson;

    Structure block;
    block.label = "block";
    block.mesh = LagrangianMesh::rectangle({10.0, 15.0}, {30.0, 25.0}, m, std::max(1, m / 2));
    block.state = LagrangianState::reference(block.mesh);
    block.material.law = MaterialLaw::NeoHookean;
    block.material.G = 80.194;
    block.material.deviatoric_only = true;
    block.material.nu_stab = cfg.stab.nu_stab;
    block.material.modified_invariants = cfg.stab.modified_invariants;

    const double kappa_s = 2.5 * (2.5 * h / s.fluid.dt);
    Constraint bottom;
    bottom.nodes = nodes_where(block.mesh, [](Vec2 X) { return X.y <= 15.0 + 1e-9; });
    bottom.kappa = kappa_s;
    bottom.on_x = false; // vertical pin only
    block.constraints.push_back(std::move(bottom));
    Constraint top;
    top.nodes = nodes_where(block.mesh, [](Vec2 X) { return X.y >= 25.0 - 1e-9; });
    top.kappa = kappa_s;
    top.on_y = false; // horizontal pin only
    block.constraints.push_back(std::move(top));

    // downward traction over the central 10 cm of the top surface
    std::vector<int> top_edge = nodes_where(block.mesh, [](Vec2 X) { return X.y >= 25.0 - 1e-9; });
    SurfaceLoad press;
    press.traction = {0.0, -200.0};
    press.shares = edge_shares(block.mesh, top_edge,
                               [](Vec2 mid) { return mid.x >= 15.0 && mid.x <= 25.0; });
    block.loads.push_back(std::move(press));
    s.structures.push_back(std::move(block));

    s.final_time = cfg.final_time >= 0.0 ? cfg.final_time : 100.0;
    s.load_time = cfg.load_time >= 0.0 ? cfg.load_time : 40.0;
    s.output_every = cfg.output_every > 0 ? cfg.output_every : 200;
    s.char_velocity = 1.0;
    s.steady_stop = cfg.steady_stop.value_or(true);
    return s;
}

SimSetup build_cook(const BenchmarkConfig& cfg) {
    SimSetup s;
    const int m = cfg.resolution > 0 ? cfg.resolution : 16;
    const int n = static_cast<int>(std::ceil(m * cfg.mfac * 10.0 / 6.5));
    s.grid.nx = s.grid.ny = n;
    s.grid.extent = {13.0, 13.0};
    s.grid.bc = {SideBC::NoSlipWall, SideBC::NoSlipWall, SideBC::NoSlipWall, SideBC::NoSlipWall};
    const double h = s.grid.h();

    s.fluid.rho = 1.0;
    s.fluid.mu = 0.16;
    s.fluid.dt = cfg.dt > 0.0 ? cfg.dt : 1e-3 * h;
    s.fluid.viscous = ViscousScheme::Explicit;
    if (s.fluid.dt > 0.2 * 0.25 * s.fluid.rho * h * h / s.fluid.mu)
        s.fluid.viscous = ViscousScheme::CrankNicolson;

    Structure cook;
    cook.label = "cook";
    cook.mesh = LagrangianMesh::cooks_trapezoid({1.55, 1.375}, 6.5, m);
    cook.state = LagrangianState::reference(cook.mesh);
    cook.material.law = MaterialLaw::NeoHookean;
    cook.material.G = 83.333;
    cook.material.deviatoric_only = true;
    cook.material.nu_stab = cfg.stab.nu_stab;
    cook.material.modified_invariants = cfg.stab.modified_invariants;

    Constraint left;
    left.nodes = nodes_where(cook.mesh, [](Vec2 X) { return X.x <= 1.55 + 1e-9; });
    left.kappa = 0.125 * h / s.fluid.dt;
    cook.constraints.push_back(std::move(left));

    std::vector<int> right_edge =
        nodes_where(cook.mesh, [](Vec2 X) { return X.x >= 1.55 + 6.5 - 1e-9; });
    SurfaceLoad pull;
    pull.traction = {0.0, 6.25};
    pull.shares = edge_shares(cook.mesh, right_edge, [](Vec2) { return true; });
    cook.loads.push_back(std::move(pull));
    s.structures.push_back(std::move(cook));

    s.final_time = cfg.final_time >= 0.0 ? cfg.final_time : 50.0;
    s.load_time = cfg.load_time >= 0.0 ? cfg.load_time : 20.0;
    s.output_every = cfg.output_every > 0 ? cfg.output_every : 200;
    s.char_velocity = 1.0;
    s.steady_stop = cfg.steady_stop.value_or(true);
    return s;
}

SimSetup build_channel(const BenchmarkConfig& cfg) {
    SimSetup s;
    const int n = cfg.resolution > 0 ? cfg.resolution : 32;
    s.grid.nx = n;
    s.grid.ny = round_int(2.25 * n);
    s.grid.origin = {0.0, -0.25};
    s.grid.extent = {1.0, 2.25};
    s.grid.bc = {SideBC::Inflow, SideBC::Inflow, SideBC::Inflow, SideBC::Inflow};
    const double h = s.grid.h();

    s.fluid.rho = 1.0;
    s.fluid.mu = cfg.channel_mu;
    s.fluid.dt = cfg.dt > 0.0 ? cfg.dt : 0.1 * h; // firm plate tethers need the shorter step
    s.fluid.viscous = ViscousScheme::CrankNicolson;

    const BenchmarkConfig cfg_copy = cfg; // captured by the BC closure
    for (int side = 0; side < 4; ++side)
        s.bdata.velocity[side] = [cfg_copy](Vec2 pos, double) {
            return channel_exact_velocity(cfg_copy, pos);
        };

    const double theta = cfg.channel_theta;
    const double tn = std::tan(theta);
    const double sec = 1.0 / std::cos(theta);

    // trim the plates so every marker stencil stays interior: markers whose
    // support crosses the domain boundary cannot anchor (their spread force
    // would leak into the ghost region)
    const int pts = DeltaKernel::parse(cfg.kernel).max_points();
    const double margin = (0.5 * pts + 1.0) * h;
    const Vec2 tangent{std::cos(theta), std::sin(theta)};
    const double wall_len = std::sqrt(1.0 + tn * tn) - 2.0 * margin;
    const int markers = std::max(8, round_int(wall_len / (cfg.mfac * h))) + 1;

    Structure lower;
    lower.label = "wall_lower";
    lower.mesh = LagrangianMesh::line_fiber(tangent * margin,
                                            Vec2{1.0, tn} - tangent * margin, markers);
    lower.state = LagrangianState::reference(lower.mesh);
    lower.material.law = MaterialLaw::MembraneSpring;
    lower.elastic = false;
    Structure upper = lower;
    upper.label = "wall_upper";
    upper.mesh = LagrangianMesh::line_fiber(Vec2{0.0, sec} + tangent * margin,
                                            Vec2{1.0, tn + sec} - tangent * margin, markers);
    upper.state = LagrangianState::reference(upper.mesh);

    for (Structure* w : {&lower, &upper}) {
        Constraint pin;
        pin.nodes.resize(w->mesh.node_count());
        for (int l = 0; l < w->mesh.node_count(); ++l) pin.nodes[l] = l;
        const double wbar = w->mesh.weights[w->mesh.node_count() / 2];
        pin.kappa = tether_kappa(s.fluid.rho, h, s.fluid.dt, wbar, 0.3);
        pin.eta = tether_eta(s.fluid.rho, h, s.fluid.dt, wbar, 0.3);
        w->constraints.push_back(std::move(pin));
    }
    s.structures.push_back(std::move(lower));
    s.structures.push_back(std::move(upper));

    s.final_time = cfg.final_time >= 0.0 ? cfg.final_time : 3.0;
    s.load_time = 0.0;
    s.output_every = cfg.output_every > 0 ? cfg.output_every : 50;
    s.char_velocity = cfg.channel_dpdl / (8.0 * cfg.channel_mu);
    s.steady_stop = cfg.steady_stop.value_or(false);
    return s;
}

SimSetup build_turek(const BenchmarkConfig& cfg) {
    SimSetup s;
    int n = cfg.resolution > 0 ? cfg.resolution : 96;
    n = std::max(24, 6 * round_int(n / 6.0)); // H = L/6 needs a multiple of 6
    const double L = 2.46, H = 0.41;
    s.grid.nx = n;
    s.grid.ny = n / 6;
    s.grid.extent = {L, H};
    s.grid.bc = {SideBC::Inflow, SideBC::TractionOutflow, SideBC::NoSlipWall,
                 SideBC::NoSlipWall};
    s.bdata.traction_tangential_zero[kRight] = true; // outlet pins v = 0
    const double h = s.grid.h();

    s.fluid.rho = 1000.0;
    s.fluid.mu = 1.0;
    s.fluid.dt = cfg.dt > 0.0 ? cfg.dt : 0.00164 * h;
    s.fluid.viscous = ViscousScheme::Explicit;
    if (s.fluid.dt > 0.2 * 0.25 * s.fluid.rho * h * h / s.fluid.mu)
        s.fluid.viscous = ViscousScheme::CrankNicolson;

    const double ramp_time = cfg.turek_ramp;
    const double U = 2.0;
    s.bdata.velocity[kLeft] = [H, U, ramp_time](Vec2 pos, double t) {
        const double ramp =
            ramp_time > 0.0 && t < ramp_time ? 0.5 * (1.0 - std::cos(kPi * t / ramp_time)) : 1.0;
        const double y = pos.y;
        return Vec2{ramp * 1.5 * U * y * (H - y) / (0.25 * H * H), 0.0};
    };

    const Vec2 c{0.2, 0.2};
    const double R = 0.05;
    // nominal 5e4 dx/dt^2, capped at the explicit-tether stability bound of
    // each tethered structure (fiber weights are lengths, solid weights areas)
    const double kappa_nominal = 5.0e4 * h / (s.fluid.dt * s.fluid.dt);
    auto kappa_for = [&](double wbar) {
        return std::min(kappa_nominal, tether_kappa(s.fluid.rho, h, s.fluid.dt, wbar, 0.2));
    };

    Structure beam;
    beam.label = "beam";
    const int bex = std::max(8, round_int(0.4 / (cfg.mfac * h)));
    const int bey = std::max(2, round_int(0.02 / (cfg.mfac * h)));
    beam.mesh = LagrangianMesh::rectangle({0.2, 0.19}, {0.6, 0.21}, bex, bey);
    beam.state = LagrangianState::reference(beam.mesh);
    beam.material.law = MaterialLaw::SaintVenantKirchhoff;
    beam.material.G = 1.0e6;
    beam.material.lambda = 8.0e6;
    beam.material.nu_stab = cfg.stab.nu_stab;
    beam.material.modified_invariants = cfg.stab.modified_invariants;
    Constraint root;
    root.nodes = nodes_where(beam.mesh, [c, R](Vec2 X) { return (X - c).norm() <= R + 1e-12; });
    root.kappa = kappa_for(beam.mesh.weights[root.nodes.front()]);
    root.eta = tether_eta(s.fluid.rho, h, s.fluid.dt, beam.mesh.weights[root.nodes.front()], 0.1);
    beam.constraints.push_back(std::move(root));
    s.structures.push_back(std::move(beam));

    // rigid cylinder as tethered concentric rings
    const double dr = cfg.mfac * h;
    for (double r = R; r > 0.3 * dr; r -= dr) {
        Structure ring;
        ring.label = "cylinder";
        const int mk = std::max(6, round_int(2.0 * kPi * r / dr));
        ring.mesh = LagrangianMesh::circle_fiber(c, r, mk);
        ring.state = LagrangianState::reference(ring.mesh);
        ring.material.law = MaterialLaw::MembraneSpring;
        ring.elastic = false;
        Constraint pin;
        pin.nodes.resize(mk);
        for (int l = 0; l < mk; ++l) pin.nodes[l] = l;
        pin.kappa = kappa_for(ring.mesh.weights[0]);
        pin.eta = tether_eta(s.fluid.rho, h, s.fluid.dt, ring.mesh.weights[0], 0.1);
        ring.constraints.push_back(std::move(pin));
        s.structures.push_back(std::move(ring));
    }

    s.final_time = cfg.final_time >= 0.0 ? cfg.final_time : 0.8;
    s.load_time = 0.0;
    s.output_every = cfg.output_every > 0 ? cfg.output_every : 100;
    s.char_velocity = 3.0;
    s.steady_stop = cfg.steady_stop.value_or(false);
    return s;
}

} // namespace

SimSetup build_setup(const BenchmarkConfig& cfg) {
    cfg.validate();
    SimSetup s;
    switch (cfg.kind) {
    case BenchmarkKind::Membrane: s = build_membrane(cfg); break;
    case BenchmarkKind::Band: s = build_band(cfg); break;
    case BenchmarkKind::Block: s = build_block(cfg); break;
    case BenchmarkKind::Cook: s = build_cook(cfg); break;
    case BenchmarkKind::Channel: s = build_channel(cfg); break;
    case BenchmarkKind::TurekHron: s = build_turek(cfg); break;
    }
    s.grid.validate();
    for (const Structure& st : s.structures) {
        st.mesh.validate();
        if (st.elastic) st.material.validate();
    }
    return s;
}

Vec2 channel_exact_velocity(const BenchmarkConfig& cfg, Vec2 pos) {
    const double theta = cfg.channel_theta;
    const double d = pos.y * std::cos(theta) - pos.x * std::sin(theta);
    if (d <= 0.0 || d >= 1.0) return {0.0, 0.0};
    const double profile = -cfg.channel_dpdl / (2.0 * cfg.channel_mu) * d * (d - 1.0);
    return {profile * std::cos(theta), profile * std::sin(theta)};
}

BenchmarkConfig make_membrane_config(const std::string& kernel, int n, double mfac) {
    BenchmarkConfig cfg;
    cfg.kind = BenchmarkKind::Membrane;
    cfg.name = "membrane";
    cfg.kernel = kernel;
    cfg.resolution = n;
    cfg.mfac = mfac;
    return cfg;
}

BenchmarkConfig make_band_config(const std::string& kernel, int n, double mfac) {
    BenchmarkConfig cfg;
    cfg.kind = BenchmarkKind::Band;
    cfg.name = "band";
    cfg.kernel = kernel;
    cfg.resolution = n;
    cfg.mfac = mfac;
    return cfg;
}

BenchmarkConfig make_block_config(const std::string& kernel, int m, double mfac,
                                  StabilizationConfig stab) {
    BenchmarkConfig cfg;
    cfg.kind = BenchmarkKind::Block;
    cfg.name = "block";
    cfg.kernel = kernel;
    cfg.resolution = m;
    cfg.mfac = mfac;
    cfg.stab = stab;
    return cfg;
}

BenchmarkConfig make_cook_config(const std::string& kernel, int m, double mfac,
                                 StabilizationConfig stab) {
    BenchmarkConfig cfg;
    cfg.kind = BenchmarkKind::Cook;
    cfg.name = "cook";
    cfg.kernel = kernel;
    cfg.resolution = m;
    cfg.mfac = mfac;
    cfg.stab = stab;
    return cfg;
}

BenchmarkConfig make_channel_config(const std::string& kernel, int n) {
    BenchmarkConfig cfg;
    cfg.kind = BenchmarkKind::Channel;
    cfg.name = "channel";
    cfg.kernel = kernel;
    cfg.resolution = n;
    cfg.mfac = 0.25; // stationary rigid plates want dense markers
    return cfg;
}

BenchmarkConfig make_turek_config(const std::string& kernel, int n, double mfac) {
    BenchmarkConfig cfg;
    cfg.kind = BenchmarkKind::TurekHron;
    cfg.name = "turek";
    cfg.kernel = kernel;
    cfg.resolution = n;
    cfg.mfac = mfac;
    return cfg;
}

} // namespace ibfsi
