#include "ibfsi/macgrid.hpp"

#include "ibfsi/errors.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace ibfsi {

void GridSpec::validate() const {
    if (nx < 1 || ny < 1) throw ConfigError("grid must have at least one cell per direction");
    if (extent.x <= 0.0 || extent.y <= 0.0) throw ConfigError("grid extent must be positive");
    const double hx = extent.x / nx;
    const double hy = extent.y / ny;
    if (std::fabs(hx - hy) > 1e-12 * hx)
        throw ConfigError("grid cells must be square: hx=" + std::to_string(hx) +
                          " hy=" + std::to_string(hy));
    if (ghost < 1) throw ConfigError("ghost layer width must be at least 1");
    if ((bc[kLeft] == SideBC::Periodic) != (bc[kRight] == SideBC::Periodic) ||
        (bc[kBottom] == SideBC::Periodic) != (bc[kTop] == SideBC::Periodic))
        throw ConfigError("periodic sides must come in opposing pairs");
}

StaggeredField::StaggeredField(const GridSpec& s) : spec(s) {
    spec.validate();
    const int g = s.ghost;
    u = Array2D(-g, -g, s.nx + 1 + 2 * g, s.ny + 2 * g);
    v = Array2D(-g, -g, s.nx + 2 * g, s.ny + 1 + 2 * g);
    p = Array2D(-g, -g, s.nx + 2 * g, s.ny + 2 * g);
}

namespace {

Vec2 side_velocity(const BoundaryData& bd, int side, Vec2 pos, double t) {
    if (bd.velocity[side]) return bd.velocity[side](pos, t);
    return {0.0, 0.0};
}

} // namespace

void fill_velocity_ghosts(StaggeredField& f, const BoundaryData& bd, double t) {
    const GridSpec& s = f.spec;
    const int g = s.ghost;
    const int nx = s.nx, ny = s.ny;
    const double h = s.h();

    // x sweeps over interior rows
    for (int j = 0; j < ny; ++j) {
        switch (s.bc[kLeft]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.u(-k, j) = f.u(nx - k, j);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val = side_velocity(bd, kLeft, s.u_face(0, j), t).x;
            f.u(0, j) = val;
            for (int k = 1; k <= g; ++k) f.u(-k, j) = 2.0 * val - f.u(k, j);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k) f.u(-k, j) = f.u(k, j);
            break;
        }
        switch (s.bc[kRight]) {
        case SideBC::Periodic:
            for (int k = 0; k <= g; ++k) f.u(nx + k, j) = f.u(k, j);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val = side_velocity(bd, kRight, s.u_face(nx, j), t).x;
            f.u(nx, j) = val;
            for (int k = 1; k <= g; ++k) f.u(nx + k, j) = 2.0 * val - f.u(nx - k, j);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k) f.u(nx + k, j) = f.u(nx - k, j);
            break;
        }
    }
    for (int j = 0; j < s.nvy(); ++j) {
        switch (s.bc[kLeft]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.v(-k, j) = f.v(nx - k, j);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val = side_velocity(bd, kLeft, {s.origin.x, s.origin.y + j * h}, t).y;
            for (int k = 1; k <= g; ++k) f.v(-k, j) = 2.0 * val - f.v(k - 1, j);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.v(-k, j) = bd.traction_tangential_zero[kLeft] ? -f.v(k - 1, j) : f.v(k - 1, j);
            break;
        }
        switch (s.bc[kRight]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.v(nx - 1 + k, j) = f.v(k - 1, j);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val =
                side_velocity(bd, kRight, {s.origin.x + s.extent.x, s.origin.y + j * h}, t).y;
            for (int k = 1; k <= g; ++k) f.v(nx - 1 + k, j) = 2.0 * val - f.v(nx - k, j);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.v(nx - 1 + k, j) =
                    bd.traction_tangential_zero[kRight] ? -f.v(nx - k, j) : f.v(nx - k, j);
            break;
        }
    }

    // y sweeps over the full index range, so corners pick up the x fill
    for (int i = f.u.i_begin(); i < f.u.i_end(); ++i) {
        switch (s.bc[kBottom]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.u(i, -k) = f.u(i, ny - k);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val = side_velocity(bd, kBottom, {s.origin.x + i * h, s.origin.y}, t).x;
            for (int k = 1; k <= g; ++k) f.u(i, -k) = 2.0 * val - f.u(i, k - 1);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.u(i, -k) = bd.traction_tangential_zero[kBottom] ? -f.u(i, k - 1) : f.u(i, k - 1);
            break;
        }
        switch (s.bc[kTop]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.u(i, ny - 1 + k) = f.u(i, k - 1);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val =
                side_velocity(bd, kTop, {s.origin.x + i * h, s.origin.y + s.extent.y}, t).x;
            for (int k = 1; k <= g; ++k) f.u(i, ny - 1 + k) = 2.0 * val - f.u(i, ny - k);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.u(i, ny - 1 + k) =
                    bd.traction_tangential_zero[kTop] ? -f.u(i, ny - k) : f.u(i, ny - k);
            break;
        }
    }
    for (int i = f.v.i_begin(); i < f.v.i_end(); ++i) {
        switch (s.bc[kBottom]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.v(i, -k) = f.v(i, ny - k);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val =
                side_velocity(bd, kBottom, {s.origin.x + (i + 0.5) * h, s.origin.y}, t).y;
            f.v(i, 0) = val;
            for (int k = 1; k <= g; ++k) f.v(i, -k) = 2.0 * val - f.v(i, k);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k) f.v(i, -k) = f.v(i, k);
            break;
        }
        switch (s.bc[kTop]) {
        case SideBC::Periodic:
            for (int k = 0; k <= g; ++k) f.v(i, ny + k) = f.v(i, k);
            break;
        case SideBC::NoSlipWall:
        case SideBC::Inflow: {
            const double val = side_velocity(
                bd, kTop, {s.origin.x + (i + 0.5) * h, s.origin.y + s.extent.y}, t).y;
            f.v(i, ny) = val;
            for (int k = 1; k <= g; ++k) f.v(i, ny + k) = 2.0 * val - f.v(i, ny - k);
            break;
        }
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k) f.v(i, ny + k) = f.v(i, ny - k);
            break;
        }
    }
}

void fill_pressure_ghosts(StaggeredField& f, const BoundaryData& bd, double scale) {
    const GridSpec& s = f.spec;
    const int g = s.ghost;
    const int nx = s.nx, ny = s.ny;

    for (int j = 0; j < ny; ++j) {
        switch (s.bc[kLeft]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.p(-k, j) = f.p(nx - k, j);
            break;
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.p(-k, j) = 2.0 * bd.traction_pressure[kLeft] * scale - f.p(k - 1, j);
            break;
        default:
            for (int k = 1; k <= g; ++k) f.p(-k, j) = f.p(k - 1, j);
            break;
        }
        switch (s.bc[kRight]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.p(nx - 1 + k, j) = f.p(k - 1, j);
            break;
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.p(nx - 1 + k, j) = 2.0 * bd.traction_pressure[kRight] * scale - f.p(nx - k, j);
            break;
        default:
            for (int k = 1; k <= g; ++k) f.p(nx - 1 + k, j) = f.p(nx - k, j);
            break;
        }
    }
    for (int i = f.p.i_begin(); i < f.p.i_end(); ++i) {
        switch (s.bc[kBottom]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.p(i, -k) = f.p(i, ny - k);
            break;
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.p(i, -k) = 2.0 * bd.traction_pressure[kBottom] * scale - f.p(i, k - 1);
            break;
        default:
            for (int k = 1; k <= g; ++k) f.p(i, -k) = f.p(i, k - 1);
            break;
        }
        switch (s.bc[kTop]) {
        case SideBC::Periodic:
            for (int k = 1; k <= g; ++k) f.p(i, ny - 1 + k) = f.p(i, k - 1);
            break;
        case SideBC::TractionOutflow:
            for (int k = 1; k <= g; ++k)
                f.p(i, ny - 1 + k) = 2.0 * bd.traction_pressure[kTop] * scale - f.p(i, ny - k);
            break;
        default:
            for (int k = 1; k <= g; ++k) f.p(i, ny - 1 + k) = f.p(i, ny - k);
            break;
        }
    }
}

Array2D divergence(const StaggeredField& f) {
    const GridSpec& s = f.spec;
    const double h = s.h();
    Array2D d(0, 0, s.nx, s.ny);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            d(i, j) = (f.u(i + 1, j) - f.u(i, j) + f.v(i, j + 1) - f.v(i, j)) / h;
    return d;
}

void pressure_gradient(const StaggeredField& f, Array2D& gu, Array2D& gv) {
    const GridSpec& s = f.spec;
    const double h = s.h();
    gu = Array2D(0, 0, s.nux(), s.ny);
    gv = Array2D(0, 0, s.nx, s.nvy());
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nux(); ++i) gu(i, j) = (f.p(i, j) - f.p(i - 1, j)) / h;
    for (int j = 0; j < s.nvy(); ++j)
        for (int i = 0; i < s.nx; ++i) gv(i, j) = (f.p(i, j) - f.p(i, j - 1)) / h;
}

Array2D laplacian_cells(const Array2D& a, double h, int nx, int ny) {
    Array2D out(0, 0, nx, ny);
    const double inv_h2 = 1.0 / (h * h);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) =
                (a(i + 1, j) + a(i - 1, j) + a(i, j + 1) + a(i, j - 1) - 4.0 * a(i, j)) * inv_h2;
    return out;
}

double max_abs_interior_divergence(const StaggeredField& f) {
    const Array2D d = divergence(f);
    double m = 0.0;
    for (int j = 0; j < f.spec.ny; ++j)
        for (int i = 0; i < f.spec.nx; ++i) m = std::max(m, std::fabs(d(i, j)));
    return m;
}

double max_abs_velocity(const StaggeredField& f) {
    const GridSpec& s = f.spec;
    double m = 0.0;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nux(); ++i) m = std::max(m, std::fabs(f.u(i, j)));
    for (int j = 0; j < s.nvy(); ++j)
        for (int i = 0; i < s.nx; ++i) m = std::max(m, std::fabs(f.v(i, j)));
    return m;
}

bool field_is_finite(const StaggeredField& f) {
    const GridSpec& s = f.spec;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nux(); ++i)
            if (!std::isfinite(f.u(i, j))) return false;
    for (int j = 0; j < s.nvy(); ++j)
        for (int i = 0; i < s.nx; ++i)
            if (!std::isfinite(f.v(i, j))) return false;
    return true;
}

double max_abs_vorticity(const StaggeredField& f) {
    const GridSpec& s = f.spec;
    const double h = s.h();
    const int i0 = s.periodic_x() ? 0 : 1;
    const int j0 = s.periodic_y() ? 0 : 1;
    double m = 0.0;
    for (int j = j0; j < s.ny; ++j)
        for (int i = i0; i < s.nx; ++i) {
            const double w = (f.v(i, j) - f.v(i - 1, j) - f.u(i, j) + f.u(i, j - 1)) / h;
            m = std::max(m, std::fabs(w));
        }
    return m;
}

StaggeredField curl_of_stream(const Array2D& psi, const GridSpec& spec) {
    if (!spec.fully_periodic())
        throw ConfigError("stream-function fixtures require a fully periodic grid");
    StaggeredField f(spec);
    const int nx = spec.nx, ny = spec.ny;
    auto at = [&](int i, int j) { return psi((i % nx + nx) % nx, (j % ny + ny) % ny); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            f.u(i, j) = at(i, j + 1) - at(i, j);
            f.v(i, j) = -(at(i + 1, j) - at(i, j));
        }
    fill_velocity_ghosts(f, BoundaryData{}, 0.0);
    return f;
}

StaggeredField make_divfree(std::uint64_t seed, const GridSpec& spec) {
    if (!spec.fully_periodic())
        throw ConfigError("make_divfree requires a fully periodic grid");
    const int nx = spec.nx, ny = spec.ny;

    // node-centered stream values quantized to 2^-26 so the curl's
    // divergence cancels bitwise
    std::mt19937_64 rng(seed);
    Array2D psi(0, 0, nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::uint64_t r = rng() >> 37; // 27 bits
            psi(i, j) = static_cast<double>(static_cast<std::int64_t>(r) - (1 << 26)) * 0x1.0p-26;
        }
    return curl_of_stream(psi, spec);
}

namespace {

void write_block(std::FILE* fp, const char* tag, const Array2D& a, int ni, int nj) {
    std::fprintf(fp, "%s %d %d\n", tag, ni, nj);
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i)
            std::fprintf(fp, "%.17g%c", a(i, j), i + 1 == ni ? '\n' : ' ');
}

void read_block(std::istream& in, const std::string& tag, Array2D& a, int ni, int nj) {
    std::string got;
    int ri = 0, rj = 0;
    in >> got >> ri >> rj;
    if (got != tag || ri != ni || rj != nj) throw IoError("field dump: bad block header " + got);
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i)
            if (!(in >> a(i, j))) throw IoError("field dump: truncated " + tag + " block");
}

} // namespace

// Layout: header (dims, ghost width, per-side BC tags, origin, extent, h),
// then row-major value blocks U (x-face components), V (y-face components),
// P (cell centers), canonical entries only. %.17g round-trips doubles
// bit-exactly.
void write_field(const StaggeredField& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw IoError("cannot open " + path + " for writing");
    const GridSpec& s = f.spec;
    std::fprintf(fp, "IBFSI-FIELD 1\n");
    std::fprintf(fp, "%d %d %d %d %d %d %d\n", s.nx, s.ny, s.ghost, static_cast<int>(s.bc[0]),
                 static_cast<int>(s.bc[1]), static_cast<int>(s.bc[2]), static_cast<int>(s.bc[3]));
    std::fprintf(fp, "%.17g %.17g %.17g %.17g %.17g\n", s.origin.x, s.origin.y, s.extent.x,
                 s.extent.y, s.h());
    write_block(fp, "U", f.u, s.nux(), s.ny);
    write_block(fp, "V", f.v, s.nx, s.nvy());
    write_block(fp, "P", f.p, s.nx, s.ny);
    std::fclose(fp);
}

StaggeredField read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "IBFSI-FIELD" || version != "1") throw IoError("not a field dump: " + path);
    GridSpec s;
    int bci[4];
    double h = 0.0;
    in >> s.nx >> s.ny >> s.ghost >> bci[0] >> bci[1] >> bci[2] >> bci[3];
    for (int k = 0; k < 4; ++k) s.bc[k] = static_cast<SideBC>(bci[k]);
    in >> s.origin.x >> s.origin.y >> s.extent.x >> s.extent.y >> h;
    if (std::fabs(h - s.extent.x / s.nx) > 1e-12 * h)
        throw IoError("field dump: inconsistent spacing in " + path);
    StaggeredField f(s);
    read_block(in, "U", f.u, s.nux(), s.ny);
    read_block(in, "V", f.v, s.nx, s.nvy());
    read_block(in, "P", f.p, s.nx, s.ny);
    return f;
}

} // namespace ibfsi
