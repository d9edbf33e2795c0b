#include "ibfsi/coupling.hpp"
#include "ibfsi/harness.hpp"
#include "ibfsi/kernels.hpp"
#include "ibfsi/macgrid.hpp"

#include <cmath>
#include <random>

namespace ibfsi {

namespace {

double urand(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

PropResult make_result(std::string name, double worst, double tol) {
    return {std::move(name), worst < tol, worst, tol};
}

std::vector<Kernel1D> one_dim_kernels() {
    std::vector<Kernel1D> ks;
    for (int p = 3; p <= 6; ++p) ks.emplace_back(KernelFamily::IB, p);
    for (int p = 1; p <= 6; ++p) ks.emplace_back(KernelFamily::BS, p);
    return ks;
}

void kernel_properties(std::vector<PropResult>& out) {
    std::mt19937_64 rng(101);
    for (const Kernel1D& k : one_dim_kernels()) {
        double pou = 0.0, even = 0.0, moment = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = urand(rng);
            double sum = 0.0, m1 = 0.0;
            for (int j = -8; j <= 8; ++j) {
                const double w = k.eval(x - j);
                sum += w;
                m1 += (x - j) * w;
            }
            pou = std::max(pou, std::fabs(sum - 1.0));
            moment = std::max(moment, std::fabs(m1));
            const double r = (urand(rng) - 0.5) * (k.points + 1.0);
            even = std::max(even, std::fabs(k.eval(r) - k.eval(-r)));
        }
        out.push_back(make_result("partition-of-unity " + k.name(), pou, 1e-12));
        out.push_back(make_result("even-symmetry " + k.name(), even, 1.0000000000000002e-15));
        if (k.family == KernelFamily::IB)
            out.push_back(make_result("first-moment " + k.name(), moment, 1e-12));

        if (!(k.family == KernelFamily::BS && k.points == 1)) {
            double cont = 0.0;
            const double eps = 1e-7;
            for (double b = -k.half_support(); b <= k.half_support() + 1e-12; b += 0.5) {
                const double left = 2.0 * k.eval(b - eps) - k.eval(b - 2.0 * eps);
                const double right = 2.0 * k.eval(b + eps) - k.eval(b + 2.0 * eps);
                cont = std::max(cont, std::fabs(left - right));
            }
            out.push_back(make_result("continuity " + k.name(), cont, 1e-12));
        }
    }
    for (int n = 2; n <= 6; ++n) {
        const Kernel1D k(KernelFamily::BS, n);
        const Kernel1D km(KernelFamily::BS, n - 1);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double r = (urand(rng) - 0.5) * (n + 1.0);
            if (std::fabs(r * 2.0 - std::round(r * 2.0)) < 1e-6) continue;
            worst = std::max(worst,
                             std::fabs(k.deriv(r) - (km.eval(r + 0.5) - km.eval(r - 0.5))));
        }
        out.push_back(make_result("derivative-identity BS" + std::to_string(n), worst, 1e-13));
    }
}

void coupling_properties(std::vector<PropResult>& out) {
    GridSpec spec;
    spec.nx = spec.ny = 16;
    spec.extent = {1.0, 1.0};
    std::mt19937_64 rng(202);
    for (const std::string& name : supported_kernel_names()) {
        CouplingContext ctx(DeltaKernel::parse(name), spec);
        double adj = 0.0, cons = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const int M = 6;
            std::vector<Vec2> pos(M), force(M), vel(M);
            std::vector<double> w(M);
            Vec2 total{};
            for (int l = 0; l < M; ++l) {
                pos[l] = {urand(rng), urand(rng)};
                force[l] = {urand(rng) - 0.5, urand(rng) - 0.5};
                w[l] = 0.25 + urand(rng);
                total += force[l] * w[l];
            }
            StaggeredField u = make_divfree(5000 + trial, spec);
            StaggeredField f(spec);
            spread(ctx, pos, force, w, f.u, f.v);
            interpolate(ctx, u, pos, vel);

            double lhs = 0.0;
            Vec2 fsum{};
            for (int j = 0; j < spec.ny; ++j)
                for (int i = 0; i < spec.nx; ++i) {
                    lhs += f.u(i, j) * u.u(i, j) + f.v(i, j) * u.v(i, j);
                    fsum.x += f.u(i, j);
                    fsum.y += f.v(i, j);
                }
            const double h2 = spec.h() * spec.h();
            lhs *= h2;
            fsum = fsum * h2;
            double rhs = 0.0, scale = 0.0;
            for (int l = 0; l < M; ++l) {
                rhs += force[l].dot(vel[l]) * w[l];
                scale += force[l].norm() * vel[l].norm() * w[l];
            }
            adj = std::max(adj, std::fabs(lhs - rhs) / std::max(scale, 1e-30));
            cons = std::max(cons, (fsum - total).norm_inf() /
                                      std::max(total.norm_inf(), 1e-30));
        }
        out.push_back(make_result("adjointness " + name, adj, 1e-12));
        out.push_back(make_result("force-conservation " + name, cons, 1e-12));
    }
}

void divergence_free_properties(std::vector<PropResult>& out, int fields, int points) {
    const char* cbs_names[3] = {"CBS21", "CBS32", "CBS43"};
    const char* iso_names[2] = {"IB4", "BS3"};
    double cbs_worst[3] = {0.0, 0.0, 0.0};
    double iso_floor[2] = {1e300, 1e300};
    std::mt19937_64 rng(303);

    const int sizes[3] = {16, 32, 64};
    for (int f = 0; f < fields; ++f) {
        GridSpec spec;
        spec.nx = spec.ny = sizes[f % 3];
        spec.extent = {1.0, 1.0};
        const StaggeredField field = make_divfree(9000 + f, spec);
        const double scale = max_abs_velocity(field) / spec.h();
        std::vector<Vec2> pts(points);
        for (auto& p : pts) p = {urand(rng), urand(rng)};

        for (int k = 0; k < 3; ++k) {
            CouplingContext ctx(DeltaKernel::parse(cbs_names[k]), spec);
            for (const Vec2& p : pts)
                cbs_worst[k] =
                    std::max(cbs_worst[k], std::fabs(continuous_divergence(ctx, field, p)) / scale);
        }
        for (int k = 0; k < 2; ++k) {
            CouplingContext ctx(DeltaKernel::parse(iso_names[k]), spec);
            double m = 0.0;
            for (const Vec2& p : pts)
                m = std::max(m, std::fabs(continuous_divergence(ctx, field, p)) / scale);
            iso_floor[k] = std::min(iso_floor[k], m);
        }
    }
    double cbs_max = 0.0;
    for (int k = 0; k < 3; ++k) {
        out.push_back(make_result(std::string("divergence-free ") + cbs_names[k], cbs_worst[k],
                                  1e-12));
        cbs_max = std::max(cbs_max, cbs_worst[k]);
    }
    for (int k = 0; k < 2; ++k) {
        // negative control: the isotropic kernel's divergence must exceed the
        // composite one by at least 8 orders of magnitude
        const double ratio = iso_floor[k] / std::max(cbs_max, 1e-300);
        PropResult r;
        r.name = std::string("divergence-control ") + iso_names[k];
        r.worst = ratio;
        r.tol = 1e8;
        r.pass = ratio >= 1e8;
        out.push_back(r);
    }
}

} // namespace

std::vector<PropResult> run_property_suite(int divfree_fields, int divfree_points) {
    std::vector<PropResult> out;
    kernel_properties(out);
    coupling_properties(out);
    divergence_free_properties(out, divfree_fields, divfree_points);
    return out;
}

} // namespace ibfsi
