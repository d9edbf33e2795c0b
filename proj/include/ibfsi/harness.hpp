#pragma once

#include "ibfsi/coupling.hpp"
#include "ibfsi/fluid.hpp"
#include "ibfsi/lagrangian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ibfsi {

enum class BenchmarkKind { Membrane, Band, Block, Cook, Channel, TurekHron };

struct StabilizationConfig {
    double nu_stab = -1.0;
    bool modified_invariants = false;
};

/// Named measurement point; each probe adds <name>_u and <name>_v columns of
/// hat-sampled velocity to the time series.
struct ProbePoint {
    std::string name;
    Vec2 position;
};

/// Declarative description of one benchmark run. `resolution` is the fluid
/// cell count N for membrane/band/channel/turek and the solid element count M
/// along the longest edge for block/cook; negative values mean "benchmark
/// default", as do negative times.
struct BenchmarkConfig {
    BenchmarkKind kind = BenchmarkKind::Membrane;
    std::string name = "membrane";
    std::string kernel = "CBS32";
    double mfac = 0.5;
    int resolution = -1;
    double final_time = -1.0;
    double dt = -1.0;
    double load_time = -1.0;
    StabilizationConfig stab;
    std::string out_dir;
    int output_every = -1;
    std::optional<bool> steady_stop; // default depends on the benchmark
    std::uint64_t seed = 0;
    std::vector<ProbePoint> probes;

    double membrane_kappa = 1.0;
    int membrane_tracers = 10000;
    double band_thickness = 0.1;
    double band_traction = 5.0;
    double channel_theta = 0.52359877559829887; // pi/6
    double channel_mu = 0.5;
    double channel_dpdl = 1.0;
    double turek_ramp = 0.4;

    void validate() const;
    static BenchmarkConfig from_file(const std::string& path);
    static BenchmarkConfig from_json_text(const std::string& text);
};

struct TimeSeries {
    std::vector<std::string> columns; // "t" first
    std::vector<std::vector<double>> rows;

    void add_row(const std::vector<double>& row);
    int column(const std::string& name) const; // -1 when missing
    double last(const std::string& name) const;
    double max_abs(const std::string& name) const;
};

/// Tether/constraint attached to a node set; per-axis masks support the
/// roller-style boundary conditions of the solid benchmarks.
struct Constraint {
    std::vector<int> nodes;
    double kappa = 0.0;
    double eta = 0.0;
    bool on_x = true;
    bool on_y = true;
};

/// Reference-surface traction smeared onto boundary nodes: node l receives
/// force traction * ramp * share_l (share = lumped boundary length, cm).
struct SurfaceLoad {
    std::vector<std::pair<int, double>> shares;
    Vec2 traction{0.0, 0.0};
};

struct Structure {
    std::string label;
    LagrangianMesh mesh;
    LagrangianState state;
    Material material;
    bool elastic = true;
    std::vector<Constraint> constraints;
    std::vector<SurfaceLoad> loads;
};

struct SimSetup {
    GridSpec grid;
    BoundaryData bdata;
    FluidParams fluid;
    std::vector<Structure> structures;
    std::vector<Vec2> tracers;
    double final_time = 1.0;
    double load_time = 0.0;
    int output_every = 100;
    double char_velocity = 1.0;
    bool steady_stop = false;
    int primary = 0; // index of the structure the diagnostics probe
};

/// Resolved initial state of a benchmark (exposed for tests).
SimSetup build_setup(const BenchmarkConfig& cfg);

struct RunResult {
    TimeSeries series;
    bool completed = false;
    bool failed = false;
    std::string failure_reason;
    double failure_time = 0.0;
    bool reached_steady = false;
    double end_time = 0.0;

    std::vector<Structure> structures; // final configuration
    std::vector<Vec2> tracers;
    StaggeredField final_field;
    int primary = 0;
};

/// Executes the midpoint fluid-structure loop for one benchmark; on
/// unrecoverable solver failure or element inversion the result records the
/// failure instead of throwing. Writes CSV/plots/dumps when out_dir is set.
RunResult run(const BenchmarkConfig& cfg);

double load_ramp(double t, double t_load);

BenchmarkConfig make_membrane_config(const std::string& kernel, int n, double mfac);
BenchmarkConfig make_band_config(const std::string& kernel, int n, double mfac);
BenchmarkConfig make_block_config(const std::string& kernel, int m, double mfac,
                                  StabilizationConfig stab);
BenchmarkConfig make_cook_config(const std::string& kernel, int m, double mfac,
                                 StabilizationConfig stab);
BenchmarkConfig make_channel_config(const std::string& kernel, int n);
BenchmarkConfig make_turek_config(const std::string& kernel, int n, double mfac);

/// Exact slanted-channel solution at a point (zero outside the channel band).
Vec2 channel_exact_velocity(const BenchmarkConfig& cfg, Vec2 pos);

struct ChannelProfileSample {
    double y = 0.0;
    double d = 0.0;             // channel-width coordinate in [0, 1]
    double wall_distance = 0.0; // perpendicular distance to the nearest wall
    double speed_num = 0.0;
    double speed_exact = 0.0;
};

/// Velocity magnitude profile along the x = 0.5 measurement line.
std::vector<ChannelProfileSample> channel_profile(const BenchmarkConfig& cfg,
                                                  const RunResult& result);

/// Numerical boundary-layer width: the distance from the wall beyond which
/// the speed agrees with the analytic solution to within half the local
/// analytic speed (exterior points are held to the mirrored interior scale).
/// Averaged over measurement stations across the channel to suppress
/// staircase effects of the marker discretization.
double boundary_layer_width(const BenchmarkConfig& cfg, const RunResult& result);

void write_csv(const TimeSeries& series, const std::string& path);
void write_plot_svg(const TimeSeries& series, const std::vector<std::string>& ys,
                    const std::string& title, bool log_y, const std::string& path);
void emit_report(const RunResult& result, const BenchmarkConfig& cfg, const std::string& dir);

struct PropResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double tol = 0.0;
};

/// Kernel/coupling property suite: partition of unity, symmetry, moments,
/// derivative identity, continuity, adjointness, force conservation, and the
/// divergence-free interpolation contrast.
std::vector<PropResult> run_property_suite(int divfree_fields = 100, int divfree_points = 1000);

} // namespace ibfsi
