#pragma once

#include "ibfsi/macgrid.hpp"

#include <array>
#include <vector>

namespace ibfsi {

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;   // final max-norm residual of the 5-point operator
    double mean_shift = 0.0; // mean subtracted from the rhs on singular problems
    bool singular = false;
    std::vector<double> history; // max-norm residual per iteration
};

/// Matrix-free conjugate gradient for the cell-centered 5-point Laplacian,
/// preconditioned with a geometric-multigrid V-cycle (red-black Gauss-Seidel
/// smoothing, 4-cell averaging restriction, constant prolongation).
///
/// Boundary handling follows the velocity BCs of the grid: periodic sides
/// wrap, wall/inflow sides are homogeneous Neumann, traction sides are
/// Dirichlet with a constant per-side value. All-Neumann/periodic problems
/// are singular: the rhs mean is subtracted (reported) and the solution is
/// returned mean-free.
class PoissonSolver {
public:
    explicit PoissonSolver(const GridSpec& spec);

    /// Solves Laplacian(x) = rhs; x is overwritten (including ghost layers of
    /// size 1 used internally; the caller's ghost cells are not required).
    /// Throws SolverFailureError when max_iter is exhausted.
    SolveReport solve(const Array2D& rhs, Array2D& x,
                      const std::array<double, 4>& dirichlet_value = {0, 0, 0, 0},
                      double tol_rel = 1e-10, double tol_abs = 0.0, int max_iter = 500);

    bool singular() const { return singular_; }

private:
    enum class Bc { Periodic, Neumann, Dirichlet };

    struct Level {
        int nx = 0, ny = 0;
        double h = 0.0;
        Array2D x, b, r, scratch;
    };

    void fill_ghosts(Array2D& a, int nx, int ny) const; // homogeneous BCs
    void apply(const Array2D& x, Array2D& out, int nx, int ny, double h) const;
    void smooth(Level& lv, bool reverse);
    void vcycle(int depth);
    void precondition(const Array2D& r, Array2D& z);

    std::array<Bc, 4> bc_{};
    bool singular_ = false;
    std::vector<Level> levels_;
    GridSpec spec_;
};

} // namespace ibfsi
