#include "ibfsi/poisson.hpp"

#include "ibfsi/errors.hpp"

#include <cmath>

namespace ibfsi {

namespace {

double cell_mean(const Array2D& a, int nx, int ny) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) s += a(i, j);
    return s / (static_cast<double>(nx) * ny);
}

void subtract_mean(Array2D& a, int nx, int ny, double m) {
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) a(i, j) -= m;
}

double dot_cells(const Array2D& a, const Array2D& b, int nx, int ny) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) s += a(i, j) * b(i, j);
    return s;
}

double max_abs_cells(const Array2D& a, int nx, int ny) {
    double m = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) m = std::max(m, std::fabs(a(i, j)));
    return m;
}

} // namespace

PoissonSolver::PoissonSolver(const GridSpec& spec) : spec_(spec) {
    for (int k = 0; k < 4; ++k) {
        switch (spec.bc[k]) {
        case SideBC::Periodic: bc_[k] = Bc::Periodic; break;
        case SideBC::TractionOutflow: bc_[k] = Bc::Dirichlet; break;
        default: bc_[k] = Bc::Neumann; break;
        }
    }
    singular_ = bc_[0] != Bc::Dirichlet && bc_[1] != Bc::Dirichlet && bc_[2] != Bc::Dirichlet &&
                bc_[3] != Bc::Dirichlet;

    int nx = spec.nx, ny = spec.ny;
    double h = spec.h();
    while (true) {
        Level lv;
        lv.nx = nx;
        lv.ny = ny;
        lv.h = h;
        lv.x = Array2D(-1, -1, nx + 2, ny + 2);
        lv.b = Array2D(0, 0, nx, ny);
        lv.r = Array2D(0, 0, nx, ny);
        lv.scratch = Array2D(-1, -1, nx + 2, ny + 2);
        levels_.push_back(std::move(lv));
        if (nx % 2 != 0 || ny % 2 != 0 || std::min(nx, ny) <= 4) break;
        nx /= 2;
        ny /= 2;
        h *= 2.0;
    }
}

void PoissonSolver::fill_ghosts(Array2D& a, int nx, int ny) const {
    for (int j = 0; j < ny; ++j) {
        a(-1, j) = bc_[kLeft] == Bc::Periodic    ? a(nx - 1, j)
                   : bc_[kLeft] == Bc::Neumann   ? a(0, j)
                                                 : -a(0, j);
        a(nx, j) = bc_[kRight] == Bc::Periodic  ? a(0, j)
                   : bc_[kRight] == Bc::Neumann ? a(nx - 1, j)
                                                : -a(nx - 1, j);
    }
    for (int i = -1; i <= nx; ++i) {
        a(i, -1) = bc_[kBottom] == Bc::Periodic    ? a(i, ny - 1)
                   : bc_[kBottom] == Bc::Neumann   ? a(i, 0)
                                                   : -a(i, 0);
        a(i, ny) = bc_[kTop] == Bc::Periodic  ? a(i, 0)
                   : bc_[kTop] == Bc::Neumann ? a(i, ny - 1)
                                              : -a(i, ny - 1);
    }
}

void PoissonSolver::apply(const Array2D& x, Array2D& out, int nx, int ny, double h) const {
    const double inv_h2 = 1.0 / (h * h);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) =
                (x(i + 1, j) + x(i - 1, j) + x(i, j + 1) + x(i, j - 1) - 4.0 * x(i, j)) * inv_h2;
}

void PoissonSolver::smooth(Level& lv, bool reverse) {
    const double h2 = lv.h * lv.h;
    const int colors[2] = {reverse ? 1 : 0, reverse ? 0 : 1};
    for (int c : colors) {
        fill_ghosts(lv.x, lv.nx, lv.ny);
        for (int j = 0; j < lv.ny; ++j)
            for (int i = (j + c) % 2; i < lv.nx; i += 2)
                lv.x(i, j) = 0.25 * (lv.x(i + 1, j) + lv.x(i - 1, j) + lv.x(i, j + 1) +
                                     lv.x(i, j - 1) - h2 * lv.b(i, j));
    }
}

void PoissonSolver::vcycle(int depth) {
    Level& lv = levels_[depth];
    if (depth + 1 == static_cast<int>(levels_.size())) {
        for (int s = 0; s < 40; ++s) smooth(lv, s % 2 == 1);
        return;
    }
    smooth(lv, false);
    smooth(lv, false);

    fill_ghosts(lv.x, lv.nx, lv.ny);
    apply(lv.x, lv.r, lv.nx, lv.ny, lv.h);
    Level& cl = levels_[depth + 1];
    for (int j = 0; j < cl.ny; ++j)
        for (int i = 0; i < cl.nx; ++i) {
            const double res00 = lv.b(2 * i, 2 * j) - lv.r(2 * i, 2 * j);
            const double res10 = lv.b(2 * i + 1, 2 * j) - lv.r(2 * i + 1, 2 * j);
            const double res01 = lv.b(2 * i, 2 * j + 1) - lv.r(2 * i, 2 * j + 1);
            const double res11 = lv.b(2 * i + 1, 2 * j + 1) - lv.r(2 * i + 1, 2 * j + 1);
            cl.b(i, j) = 0.25 * (res00 + res10 + res01 + res11);
            cl.x(i, j) = 0.0;
        }
    vcycle(depth + 1);
    for (int j = 0; j < lv.ny; ++j)
        for (int i = 0; i < lv.nx; ++i) lv.x(i, j) += cl.x(i / 2, j / 2);

    smooth(lv, true);
    smooth(lv, true);
}

void PoissonSolver::precondition(const Array2D& r, Array2D& z) {
    Level& top = levels_[0];
    for (int j = 0; j < top.ny; ++j)
        for (int i = 0; i < top.nx; ++i) {
            top.b(i, j) = r(i, j);
            top.x(i, j) = 0.0;
        }
    vcycle(0);
    for (int j = 0; j < top.ny; ++j)
        for (int i = 0; i < top.nx; ++i) z(i, j) = top.x(i, j);
    if (singular_) subtract_mean(z, top.nx, top.ny, cell_mean(z, top.nx, top.ny));
}

SolveReport PoissonSolver::solve(const Array2D& rhs, Array2D& x,
                                 const std::array<double, 4>& dirichlet_value, double tol_rel,
                                 double tol_abs, int max_iter) {
    const int nx = spec_.nx, ny = spec_.ny;
    const double h = spec_.h();
    SolveReport rep;
    rep.singular = singular_;

    // fold inhomogeneous Dirichlet values into the rhs: with the boundary
    // value g at a face, the ghost is 2g - interior, contributing 2g/h^2
    Array2D b(0, 0, nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) b(i, j) = rhs(i, j);
    const double inv_h2 = 1.0 / (h * h);
    if (bc_[kLeft] == Bc::Dirichlet)
        for (int j = 0; j < ny; ++j) b(0, j) -= 2.0 * dirichlet_value[kLeft] * inv_h2;
    if (bc_[kRight] == Bc::Dirichlet)
        for (int j = 0; j < ny; ++j) b(nx - 1, j) -= 2.0 * dirichlet_value[kRight] * inv_h2;
    if (bc_[kBottom] == Bc::Dirichlet)
        for (int i = 0; i < nx; ++i) b(i, 0) -= 2.0 * dirichlet_value[kBottom] * inv_h2;
    if (bc_[kTop] == Bc::Dirichlet)
        for (int i = 0; i < nx; ++i) b(i, ny - 1) -= 2.0 * dirichlet_value[kTop] * inv_h2;

    if (singular_) {
        rep.mean_shift = cell_mean(b, nx, ny);
        subtract_mean(b, nx, ny, rep.mean_shift);
    }

    // the homogeneous solve: x = e with boundary offsets applied afterwards
    Array2D e(-1, -1, nx + 2, ny + 2);
    Array2D r(0, 0, nx, ny), z(0, 0, nx, ny), q(0, 0, nx, ny);
    Array2D pdir(-1, -1, nx + 2, ny + 2);

    const double bnorm = max_abs_cells(b, nx, ny);
    const double tol = std::max(tol_rel * bnorm, tol_abs);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) r(i, j) = b(i, j);

    double rho = 0.0;
    int it = 0;
    double rnorm = bnorm;
    rep.history.push_back(rnorm);
    while (rnorm > tol && it < max_iter) {
        precondition(r, z);
        const double rho_new = dot_cells(r, z, nx, ny);
        if (it == 0) {
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) pdir(i, j) = z(i, j);
        } else {
            const double beta = rho_new / rho;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) pdir(i, j) = z(i, j) + beta * pdir(i, j);
        }
        rho = rho_new;
        fill_ghosts(pdir, nx, ny);
        apply(pdir, q, nx, ny, h);
        const double pq = dot_cells(pdir, q, nx, ny);
        if (pq == 0.0) break;
        const double alpha = rho / pq;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                e(i, j) += alpha * pdir(i, j);
                r(i, j) -= alpha * q(i, j);
            }
        rnorm = max_abs_cells(r, nx, ny);
        rep.history.push_back(rnorm);
        ++it;
    }
    rep.iterations = it;
    rep.residual = rnorm;
    if (rnorm > tol)
        throw SolverFailureError("pressure solve did not converge: residual " +
                                     std::to_string(rnorm) + " after " + std::to_string(it) +
                                     " iterations",
                                 rep.history);

    if (singular_) subtract_mean(e, nx, ny, cell_mean(e, nx, ny));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) x(i, j) = e(i, j);
    return rep;
}

} // namespace ibfsi
