// Acceptance suite: one pass/fail line per criterion, nonzero exit when an
// executed criterion fails. Criteria 8 and the full Turek-Hron table are
// long-running reproduction runs, excluded unless --long is given.

#include "ibfsi/coupling.hpp"
#include "ibfsi/harness.hpp"
#include "ibfsi/kernels.hpp"
#include "ibfsi/lagrangian.hpp"
#include "ibfsi/macgrid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ibfsi;

namespace {

struct Check {
    std::string label;
    bool pass;
};

std::vector<Check> g_checks;
bool g_verbose = true;

void check(bool pass, const std::string& label) {
    g_checks.push_back({label, pass});
    if (g_verbose || !pass) std::printf("    [%s] %s\n", pass ? "ok" : "FAIL", label.c_str());
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double urand(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// --------------------------------------------------------------------------
// 1. kernel property suite
// --------------------------------------------------------------------------
bool criterion1() {
    bool all = true;
    for (const auto& r : run_property_suite(0, 0)) {
        if (r.name.rfind("adjointness", 0) == 0 || r.name.rfind("force-conservation", 0) == 0 ||
            r.name.rfind("divergence", 0) == 0)
            continue; // criteria 2 and 3 cover the coupling properties
        if (!r.pass) check(false, r.name + " worst " + fmt(r.worst) + " tol " + fmt(r.tol));
        all = all && r.pass;
    }
    check(all, "partition of unity, symmetry, moments, derivative identity, continuity");
    return all;
}

// --------------------------------------------------------------------------
// 2. divergence-free interpolation, with the isotropic negative control
// --------------------------------------------------------------------------
bool criterion2() {
    bool all = true;
    for (const auto& r : run_property_suite(100, 1000)) {
        if (r.name.rfind("divergence-free", 0) == 0) {
            check(r.pass, r.name + ": max |div| = " + fmt(r.worst) + " x |u|/h (tol 1e-12)");
            all = all && r.pass;
        } else if (r.name.rfind("divergence-control", 0) == 0) {
            check(r.pass, r.name + ": isotropic/composite ratio " + fmt(r.worst) + " (>= 1e8)");
            all = all && r.pass;
        }
    }
    return all;
}

// --------------------------------------------------------------------------
// 3. adjointness and force conservation
// --------------------------------------------------------------------------
bool criterion3() {
    bool all = true;
    double worst_adj = 0.0, worst_cons = 0.0;
    for (const auto& r : run_property_suite(0, 0)) {
        if (r.name.rfind("adjointness", 0) == 0) {
            worst_adj = std::max(worst_adj, r.worst);
            all = all && r.pass;
        } else if (r.name.rfind("force-conservation", 0) == 0) {
            worst_cons = std::max(worst_cons, r.worst);
            all = all && r.pass;
        }
    }
    check(all, "adjointness worst " + fmt(worst_adj) + ", conservation worst " + fmt(worst_cons) +
                   " (tol 1e-12, 200 trials x 15 kernels)");
    return all;
}

// --------------------------------------------------------------------------
// 4. stress-energy consistency and the printed bulk moduli
// --------------------------------------------------------------------------
bool criterion4() {
    std::mt19937_64 rng(77);
    auto fd_stress = [](const Material& mat, const Mat2& F) {
        const double eps = 1e-6;
        Mat2 P{};
        double* out[4] = {&P.a11, &P.a12, &P.a21, &P.a22};
        for (int k = 0; k < 4; ++k) {
            Mat2 Fp = F, Fm = F;
            double* pp[4] = {&Fp.a11, &Fp.a12, &Fp.a21, &Fp.a22};
            double* pm[4] = {&Fm.a11, &Fm.a12, &Fm.a21, &Fm.a22};
            *pp[k] += eps;
            *pm[k] -= eps;
            *out[k] = (strain_energy(mat, Fp) - strain_energy(mat, Fm)) / (2.0 * eps);
        }
        return P;
    };

    std::vector<std::pair<std::string, Material>> mats;
    for (int variant = 0; variant < 3; ++variant)
        for (double nu : {-1.0, 0.4}) {
            Material m;
            m.law = MaterialLaw::NeoHookean;
            m.G = 80.194;
            m.modified_invariants = variant == 1;
            m.deviatoric_only = variant == 2;
            m.nu_stab = nu;
            mats.push_back({std::string("neo-hookean") +
                                (variant == 1 ? "/modified" : variant == 2 ? "/deviatoric" : "") +
                                (nu > -1.0 ? "+penalty" : ""),
                            m});
        }
    for (double nu : {-1.0, 0.4}) {
        Material m;
        m.law = MaterialLaw::SaintVenantKirchhoff;
        m.G = 2.0;
        m.lambda = 5.0;
        m.nu_stab = nu;
        mats.push_back({std::string("svk") + (nu > -1.0 ? "+penalty" : ""), m});
    }

    bool all = true;
    for (const auto& [name, mat] : mats) {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Mat2 F;
            do {
                F = {1.0 + 0.6 * (urand(rng) - 0.5), 0.6 * (urand(rng) - 0.5),
                     0.6 * (urand(rng) - 0.5), 1.0 + 0.6 * (urand(rng) - 0.5)};
            } while (F.det() < 0.5 || F.det() > 2.0);
            const Mat2 P = first_pk_stress(mat, F);
            const Mat2 Pfd = fd_stress(mat, F);
            worst = std::max(worst, (P - Pfd).norm_inf() / std::max(P.norm_inf(), 1e-8));
        }
        const bool pass = worst < 1e-5;
        check(pass, "stress vs energy derivative, " + name + ": rel err " + fmt(worst));
        all = all && pass;
    }

    Material block;
    block.G = 80.194;
    block.nu_stab = 0.4;
    const double k1 = block.kappa_stab();
    const bool p1 = std::round(k1 * 1000.0) / 1000.0 == 374.239;
    check(p1, "kappa_stab(80.194, 0.4) = " + fmt(k1) + " (printed 374.239)");
    Material cook;
    cook.G = 83.333;
    cook.nu_stab = 0.4;
    const double k2 = cook.kappa_stab();
    const bool p2 = std::fabs(k2 - 388.889) < 2e-3; // the printed G is itself rounded
    check(p2, "kappa_stab(83.333, 0.4) = " + fmt(k2) + " (printed 388.889)");
    return all && p1 && p2;
}

// --------------------------------------------------------------------------
// 5. slanted channel: profile accuracy and boundary-layer ordering
// --------------------------------------------------------------------------
bool criterion5() {
    const std::vector<std::string> kernels = {"IB3",   "IB4",   "IB5",   "IB6",  "BS2",
                                              "BS3",   "BS4",   "BS5",   "BS6",  "CBS21",
                                              "CBS32", "CBS43", "CBS54", "CBS65"};
    bool all = true;
    double best_width = 1e300;
    std::string best_kernel;
    for (const auto& k : kernels) {
        BenchmarkConfig cfg = make_channel_config(k, 32);
        const RunResult res = run(cfg);
        if (res.failed) {
            check(false, "channel " + k + " failed: " + res.failure_reason);
            all = false;
            continue;
        }
        const double err = res.series.last("profile_err");
        const double width = boundary_layer_width(cfg, res);
        const bool pass = err < 0.05;
        check(pass, "channel " + k + ": profile err " + fmt(err) + " (< 5%), layer width " +
                        fmt(width));
        all = all && pass;
        if (width < best_width) {
            best_width = width;
            best_kernel = k;
        }
    }
    const bool thinnest = best_kernel == "CBS21";
    check(thinnest, "thinnest numerical boundary layer: " + best_kernel + " (" +
                        fmt(best_width) + "), expected CBS21");
    return all && thinnest;
}

// --------------------------------------------------------------------------
// 6. pressurized membrane volume conservation
// --------------------------------------------------------------------------
bool criterion6() {
    const double mfacs[3] = {0.5, 1.0, 1.5};
    double dA[3][3]; // kernel x mfac
    const char* kernels[3] = {"IB4", "CBS32", "CBS43"};
    bool ran = true;
    for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) {
            BenchmarkConfig cfg = make_membrane_config(kernels[k], 64, mfacs[m]);
            const RunResult res = run(cfg);
            if (res.failed) {
                check(false, std::string("membrane ") + kernels[k] + " failed");
                ran = false;
                dA[k][m] = 1e300;
                continue;
            }
            dA[k][m] = res.series.last("dA");
        }

    const bool two_orders = dA[1][0] <= 1e-2 * dA[0][0] && dA[2][0] <= 1e-2 * dA[0][0];
    check(two_orders, "dA(t=1): IB4 " + fmt(dA[0][0]) + ", CBS32 " + fmt(dA[1][0]) + ", CBS43 " +
                          fmt(dA[2][0]) + " (composites <= 1e-2 x IB4)");

    // composite variants agree; values at the time-integration floor are
    // clamped before forming the ratio
    const double floor = 1e-9;
    const double a = std::max(dA[1][0], floor), b = std::max(dA[2][0], floor);
    const bool agree = std::max(a, b) / std::min(a, b) < 3.0;
    check(agree, "CBS32 and CBS43 agree within 3x (floor 1e-9)");

    bool insensitive = true;
    for (int k = 0; k < 3; ++k) {
        const double lo = std::max(std::min({dA[k][0], dA[k][1], dA[k][2]}), floor);
        const double hi = std::max(std::max({dA[k][0], dA[k][1], dA[k][2]}), floor);
        const bool pass = hi / lo < 2.0;
        check(pass, std::string("MFAC sweep ") + kernels[k] + ": dA = {" + fmt(dA[k][0]) + ", " +
                        fmt(dA[k][1]) + ", " + fmt(dA[k][2]) + "} (< 2x spread)");
        insensitive = insensitive && pass;
    }
    return ran && two_orders && agree && insensitive;
}

// --------------------------------------------------------------------------
// 7. compressed block: volume error and stabilization sensitivity
// --------------------------------------------------------------------------
bool criterion7() {
    const int m = 32; // the stabilization comparison is reported at M = 32
    const double mfac = 0.5;
    auto run_block = [&](const char* kernel, bool stabilized) {
        StabilizationConfig stab;
        if (stabilized) {
            stab.nu_stab = 0.4;
            stab.modified_invariants = true;
        }
        return run(make_block_config(kernel, m, mfac, stab));
    };
    const RunResult cbs_u = run_block("CBS32", false);
    const RunResult cbs_s = run_block("CBS32", true);
    const RunResult ib_u = run_block("IB3", false);
    const RunResult ib_s = run_block("IB3", true);
    if (cbs_u.failed || cbs_s.failed || ib_u.failed || ib_s.failed) {
        check(false, "a block run failed");
        return false;
    }

    const double j_cbs = cbs_u.series.last("j_l2");
    const double j_ib = ib_u.series.last("j_l2");
    const bool part_a = j_cbs <= j_ib;
    check(part_a, "unstabilized |J-1|_2: CBS32 " + fmt(j_cbs) + " <= IB3 " + fmt(j_ib));

    auto sensitivity = [](const RunResult& u, const RunResult& s) {
        const double du = u.series.last("dy_probe");
        const double ds = s.series.last("dy_probe");
        return std::fabs(du - ds) / std::fabs(ds);
    };
    const double s_cbs = sensitivity(cbs_u, cbs_s);
    const double s_ib = sensitivity(ib_u, ib_s);
    const bool part_b1 = s_cbs < 0.02;
    check(part_b1, "CBS32 stabilization sensitivity " + fmt(s_cbs) + " (< 2%)");
    const bool part_b2 = s_ib > 0.05;
    check(part_b2, "IB3 stabilization sensitivity " + fmt(s_ib) + " (> 5%; CBS32/IB3 contrast " +
                       fmt(s_ib / std::max(s_cbs, 1e-12)) + "x)");
    return part_a && part_b1 && part_b2;
}

// --------------------------------------------------------------------------
// 8. elastic band at paper resolution (long-running, optional)
// --------------------------------------------------------------------------
bool criterion8() {
    struct Row {
        const char* kernel;
        double expect;
    };
    const Row rows[2] = {{"IB4", 0.11862}, {"CBS32", 0.12197}};
    bool all = true;
    for (const Row& r : rows) {
        BenchmarkConfig cfg = make_band_config(r.kernel, 128, 0.5);
        cfg.final_time = 10.0;
        const RunResult res = run(cfg);
        if (res.failed) {
            check(false, std::string("band ") + r.kernel + " failed: " + res.failure_reason);
            all = false;
            continue;
        }
        // the band rings about its equilibrium with slowly decaying
        // amplitude; the steady value is the late-window oscillation center
        const int c = res.series.column("dx_max");
        double acc = 0.0;
        int cnt = 0;
        for (const auto& row : res.series.rows)
            if (row[0] > 0.75 * cfg.final_time) {
                acc += row[c];
                ++cnt;
            }
        const double dx = acc / std::max(cnt, 1);
        const bool pass = std::fabs(dx - r.expect) < 0.05 * r.expect;
        check(pass, std::string("band ") + r.kernel + ": steady x-displacement " + fmt(dx) +
                        " vs table " + fmt(r.expect) + " (+-5%)");
        all = all && pass;
    }
    return all;
}

// --------------------------------------------------------------------------
// 9. Turek-Hron: short-horizon smoke (default) or table values (--long)
// --------------------------------------------------------------------------
bool criterion9_smoke() {
    BenchmarkConfig cfg = make_turek_config("CBS32", 96, 0.5);
    cfg.final_time = 1.5;
    const RunResult res = run(cfg);
    if (res.failed) {
        check(false, "turek smoke failed: " + res.failure_reason);
        return false;
    }
    const int c = res.series.column("dy_a");
    double dy_max = 0.0;
    int reversals = 0;
    double prev_slope = 0.0;
    for (size_t r = 1; r < res.series.rows.size(); ++r) {
        const double dy = res.series.rows[r][c];
        dy_max = std::max(dy_max, std::fabs(dy));
        const double slope = dy - res.series.rows[r - 1][c];
        if (slope * prev_slope < 0.0 && std::fabs(dy) > 1e-6) ++reversals;
        if (slope != 0.0) prev_slope = slope;
    }
    const bool bounded = dy_max < 0.1;
    check(bounded, "beam tip stays bounded: max |dy| = " + fmt(dy_max) + " (< 0.1)");
    const bool oscillatory = reversals >= 4;
    check(oscillatory,
          "beam tip oscillates: " + std::to_string(reversals) + " direction reversals (>= 4)");
    return bounded && oscillatory;
}

bool criterion9_long() {
    struct Row {
        const char* kernel;
        double expect;
    };
    const Row rows[2] = {{"IB3", 0.03686}, {"CBS32", 0.02964}};
    bool all = true;
    for (const Row& r : rows) {
        BenchmarkConfig cfg = make_turek_config(r.kernel, 126, 0.5);
        cfg.final_time = 10.0;
        const RunResult res = run(cfg);
        if (res.failed) {
            check(false, std::string("turek ") + r.kernel + " failed: " + res.failure_reason);
            all = false;
            continue;
        }
        // max oscillation amplitude over the developed window
        const int c = res.series.column("dy_a");
        double dy_max = 0.0;
        int reversals = 0;
        double prev = 0.0, prev_slope = 0.0;
        for (size_t k = 1; k < res.series.rows.size(); ++k) {
            if (res.series.rows[k][0] < 4.0) continue;
            const double dy = res.series.rows[k][c];
            dy_max = std::max(dy_max, std::fabs(dy));
            const double slope = dy - prev;
            if (slope * prev_slope < 0.0) ++reversals;
            if (slope != 0.0) prev_slope = slope;
            prev = dy;
        }
        const bool pass = std::fabs(dy_max - r.expect) < 0.15 * r.expect && reversals >= 6;
        check(pass, std::string("turek ") + r.kernel + ": max dY " + fmt(dy_max) + " vs table " +
                        fmt(r.expect) + " (+-15%), " + std::to_string(reversals) + " reversals");
        all = all && pass;
    }
    return all;
}

// --------------------------------------------------------------------------
// 10. bitwise-deterministic reruns
// --------------------------------------------------------------------------
bool criterion10() {
    auto run_csv = [](const std::string& path) {
        BenchmarkConfig cfg = make_membrane_config("CBS32", 32, 0.5);
        cfg.final_time = 0.125;
        cfg.membrane_tracers = 2000;
        const RunResult res = run(cfg);
        write_csv(res.series, path);
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = run_csv("acceptance_det_a.csv");
    const std::string b = run_csv("acceptance_det_b.csv");
    std::remove("acceptance_det_a.csv");
    std::remove("acceptance_det_b.csv");
    const bool same = !a.empty() && a == b;
    check(same, "membrane config rerun: CSV bytes identical (" +
                    std::to_string(a.size()) + " bytes)");
    return same;
}

struct Criterion {
    int id;
    const char* title;
    bool long_running;
    std::function<bool()> fn;
};

} // namespace

int main(int argc, char** argv) {
    bool long_mode = false;
    int only = -1;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--long") == 0) long_mode = true;
        else if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--quiet") == 0) g_verbose = false;
        else {
            std::fprintf(stderr, "usage: %s [--criterion N] [--long] [--quiet]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "kernel property suite", false, criterion1},
        {2, "divergence-free interpolation (composite vs isotropic)", false, criterion2},
        {3, "adjointness and force conservation", false, criterion3},
        {4, "stress-energy consistency and printed bulk moduli", false, criterion4},
        {5, "slanted channel profiles and boundary-layer ordering", false, criterion5},
        {6, "pressurized membrane volume conservation", false, criterion6},
        {7, "compressed block stabilization study", false, criterion7},
        {8, "elastic band table reproduction (paper resolution)", true, criterion8},
        {9, long_mode ? "Turek-Hron table reproduction" : "Turek-Hron smoke run", false,
         long_mode ? criterion9_long : criterion9_smoke},
        {10, "deterministic reruns", false, criterion10},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (only > 0 && c.id != only) continue;
        if (only < 0 && c.long_running && !long_mode) {
            std::printf("[SKIP] criterion %d: %s (long-running; use --long)\n", c.id, c.title);
            continue;
        }
        std::printf("criterion %d: %s\n", c.id, c.title);
        std::fflush(stdout);
        const bool pass = c.fn();
        std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", c.id, c.title);
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
