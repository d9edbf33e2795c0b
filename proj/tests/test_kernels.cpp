#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ibfsi/errors.hpp"
#include "ibfsi/kernels.hpp"

#include <cmath>
#include <random>
#include <algorithm>
#include <vector>

using namespace ibfsi;

namespace {

double urand(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Independent B-spline oracle #1: the textbook knot-span Cox-de Boor
// recursion on the integer-centered knot vector {-n/2, ..., n/2}.
double bs_knot_oracle(int n, double x) {
    const int degree = n - 1;
    auto knot = [&](int j) { return j - 0.5 * n; };
    std::vector<double> N(n, 0.0);
    for (int i = 0; i < n; ++i) N[i] = (x >= knot(i) && x < knot(i + 1)) ? 1.0 : 0.0;
    for (int p = 1; p <= degree; ++p) {
        for (int i = 0; i + p < n; ++i) {
            const double left = (x - knot(i)) / p * N[i];
            const double right = (knot(i + p + 1) - x) / p * N[i + 1];
            N[i] = left + right;
        }
    }
    return N[0];
}

// Independent B-spline oracle #2: the convolution definition, integrated by
// Simpson's rule split at the integrand's breakpoints (exact for the
// low-order piecewise polynomials it is applied to). Kept to n <= 4 where the
// recursive cost stays trivial.
double bs_conv_oracle(int n, double x) {
    if (n == 1) return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
    std::vector<double> cuts = {-0.5, 0.5};
    for (int k = -2 * n; k <= 2 * n; ++k) {
        const double y = x - 0.5 * k;
        if (y > -0.5 && y < 0.5) cuts.push_back(y);
    }
    std::sort(cuts.begin(), cuts.end());
    // 2-point Gauss per panel: interior nodes avoid the integrand's jumps and
    // are exact for the cubic-and-below pieces this oracle is used on
    const double g = 0.5 / std::sqrt(3.0);
    double acc = 0.0;
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const int panels = 4;
        const double h = (b - a) / panels;
        for (int i = 0; i < panels; ++i) {
            const double mid = a + (i + 0.5) * h;
            acc += 0.5 * h *
                   (bs_conv_oracle(n - 1, x - (mid - g * h)) +
                    bs_conv_oracle(n - 1, x - (mid + g * h)));
        }
    }
    return acc;
}

std::vector<Kernel1D> all_1d_kernels() {
    std::vector<Kernel1D> ks;
    for (int p = 3; p <= 6; ++p) ks.emplace_back(KernelFamily::IB, p);
    for (int p = 1; p <= 6; ++p) ks.emplace_back(KernelFamily::BS, p);
    return ks;
}

double pou_sum(const Kernel1D& k, double x) {
    double s = 0.0;
    for (int j = -8; j <= 8; ++j) s += k.eval(x - j);
    return s;
}

double first_moment(const Kernel1D& k, double x) {
    double s = 0.0;
    for (int j = -8; j <= 8; ++j) s += (x - j) * k.eval(x - j);
    return s;
}

double second_moment(const Kernel1D& k, double x) {
    double s = 0.0;
    for (int j = -8; j <= 8; ++j) s += (x - j) * (x - j) * k.eval(x - j);
    return s;
}

} // namespace

TEST_CASE("IB4 matches the printed piecewise values") {
    Kernel1D ib4(KernelFamily::IB, 4);
    CHECK(ib4.eval(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ib4.eval(1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ib4.eval(-1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ib4.eval(2.0) == 0.0);
    CHECK(ib4.eval(-2.5) == 0.0);
}

TEST_CASE("hat kernel endpoints") {
    Kernel1D bs2(KernelFamily::BS, 2);
    CHECK(bs2.eval(0.0) == 1.0);
    CHECK(bs2.eval(1.0) == 0.0);
    CHECK(bs2.eval(-1.0) == 0.0);
}

TEST_CASE("quadratic B-spline frozen values against the convolution oracle") {
    Kernel1D bs3(KernelFamily::BS, 3);
    // frozen from the oracle (and exactly 3/4, 1/8 analytically)
    CHECK(bs3.eval(0.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(bs3.eval(1.0) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(bs3.eval(-1.0) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(std::fabs(bs_conv_oracle(3, 0.0) - 0.75) < 1e-12);
    CHECK(std::fabs(bs_conv_oracle(3, 1.0) - 0.125) < 1e-12);
    CHECK(std::fabs(bs_knot_oracle(3, 0.0) - 0.75) < 1e-14);
    CHECK(std::fabs(bs_knot_oracle(3, 1.0) - 0.125) < 1e-14);
}

TEST_CASE("B-spline evaluation agrees with the knot-recursion oracle") {
    std::mt19937_64 rng(47);
    for (int n = 2; n <= 6; ++n) {
        Kernel1D k(KernelFamily::BS, n);
        for (int trial = 0; trial < 200; ++trial) {
            const double x = (urand(rng) - 0.5) * (n + 1.0);
            CHECK(std::fabs(k.eval(x) - bs_knot_oracle(n, x)) < 1e-13);
        }
    }
}

TEST_CASE("B-spline evaluation agrees with the convolution-quadrature oracle") {
    std::mt19937_64 rng(48);
    for (int n = 2; n <= 4; ++n) {
        Kernel1D k(KernelFamily::BS, n);
        for (int trial = 0; trial < 20; ++trial) {
            const double x = (urand(rng) - 0.5) * (n + 1.0);
            CHECK(std::fabs(k.eval(x) - bs_conv_oracle(n, x)) < 1e-10);
        }
    }
}

TEST_CASE("B-spline derivative examples") {
    Kernel1D bs3(KernelFamily::BS, 3);
    CHECK(bs3.deriv(0.5) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(bs3.deriv(0.0) == 0.0);
    CHECK(bs3.deriv(5.0) == 0.0);
    Kernel1D ib4(KernelFamily::IB, 4);
    CHECK(ib4.deriv(3.0) == 0.0);
}

TEST_CASE("partition of unity for every supported kernel") {
    std::mt19937_64 rng(1);
    for (const auto& k : all_1d_kernels()) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = urand(rng);
            worst = std::max(worst, std::fabs(pou_sum(k, x) - 1.0));
        }
        INFO(k.name());
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("even symmetry") {
    std::mt19937_64 rng(2);
    for (const auto& k : all_1d_kernels()) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double r = (urand(rng) - 0.5) * (k.points + 1.0);
            worst = std::max(worst, std::fabs(k.eval(r) - k.eval(-r)));
        }
        INFO(k.name());
        CHECK(worst <= 1e-15);
    }
}

TEST_CASE("IB family first moment vanishes") {
    std::mt19937_64 rng(3);
    for (int p = 3; p <= 6; ++p) {
        Kernel1D k(KernelFamily::IB, p);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i)
            worst = std::max(worst, std::fabs(first_moment(k, urand(rng))));
        INFO(k.name());
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("IB5/IB6 second moment is translation invariant") {
    std::mt19937_64 rng(4);
    for (int p : {5, 6}) {
        Kernel1D k(KernelFamily::IB, p);
        const double ref = second_moment(k, 0.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i)
            worst = std::max(worst, std::fabs(second_moment(k, urand(rng)) - ref));
        INFO(k.name());
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("B-spline derivative identity against the lower-order difference") {
    std::mt19937_64 rng(5);
    for (int n = 2; n <= 6; ++n) {
        Kernel1D k(KernelFamily::BS, n);
        Kernel1D km(KernelFamily::BS, n - 1);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double r = (urand(rng) - 0.5) * (n + 1.0);
            // skip the breakpoint lattice; the identity is classical elsewhere
            if (std::fabs(r * 2.0 - std::round(r * 2.0)) < 1e-6) continue;
            const double lhs = k.deriv(r);
            const double rhs = km.eval(r + 0.5) - km.eval(r - 0.5);
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
        INFO("BS" << n);
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("continuity across breakpoints") {
    // one-sided limits via quadratic extrapolation from each side
    const double eps = 1e-7;
    for (const auto& k : all_1d_kernels()) {
        if (k.family == KernelFamily::BS && k.points == 1) continue; // box is discontinuous
        double worst = 0.0;
        for (double b = -k.half_support(); b <= k.half_support() + 1e-12; b += 0.5) {
            const double left = 2.0 * k.eval(b - eps) - k.eval(b - 2.0 * eps);
            const double right = 2.0 * k.eval(b + eps) - k.eval(b + 2.0 * eps);
            worst = std::max(worst, std::fabs(left - right));
        }
        INFO(k.name());
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("box kernel keeps its right-continuous convention") {
    Kernel1D bs1(KernelFamily::BS, 1);
    CHECK(bs1.eval(-0.5) == 1.0);
    CHECK(bs1.eval(0.5) == 0.0);
    CHECK(bs1.eval(0.0) == 1.0);
    Kernel1D bs2(KernelFamily::BS, 2);
    CHECK(bs2.deriv(0.0) == -1.0); // right-sided value at the kink
    CHECK(bs2.deriv(-1.0) == 1.0);
}

TEST_CASE("unsupported kernel combinations are configuration errors") {
    CHECK_THROWS_AS(Kernel1D(KernelFamily::IB, 2), ConfigError);
    CHECK_THROWS_AS(Kernel1D(KernelFamily::IB, 7), ConfigError);
    CHECK_THROWS_AS(Kernel1D(KernelFamily::BS, 0), ConfigError);
    CHECK_THROWS_AS(DeltaKernel::parse("CBS31"), ConfigError);
    CHECK_THROWS_AS(DeltaKernel::parse("IB1"), ConfigError);
    CHECK_THROWS_AS(DeltaKernel::parse("gauss"), ConfigError);
}

TEST_CASE("kernel selection grammar") {
    for (const auto& name : supported_kernel_names()) {
        const DeltaKernel d = DeltaKernel::parse(name);
        CHECK(d.name == name);
    }
    const DeltaKernel cbs = DeltaKernel::parse("CBS32");
    REQUIRE(cbs.composite);
    // u-velocity: higher-order member along x, lower along y; v the reverse
    CHECK(cbs.kernel_for(0, 0).points == 3);
    CHECK(cbs.kernel_for(0, 1).points == 2);
    CHECK(cbs.kernel_for(1, 0).points == 2);
    CHECK(cbs.kernel_for(1, 1).points == 3);
    const DeltaKernel iso = DeltaKernel::parse("IB4");
    CHECK(!iso.composite);
    CHECK(iso.kernel_for(0, 1).points == 4);
}

TEST_CASE("axis stencils carry exactly `points` nodes and sum to one") {
    std::mt19937_64 rng(6);
    for (const auto& k : all_1d_kernels()) {
        for (int i = 0; i < 200; ++i) {
            const double xi = (urand(rng) - 0.5) * 40.0;
            const AxisStencil st = axis_stencil(k, xi);
            CHECK(st.count == k.points);
            double sum = 0.0;
            for (int m = 0; m < st.count; ++m) {
                sum += st.w[m];
                CHECK(std::fabs(xi - (st.first + m)) <= k.half_support() + 1e-12);
            }
            CHECK(std::fabs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("axis stencil weights shift with the lattice") {
    Kernel1D k(KernelFamily::BS, 3);
    const double xi = 3.0 + 0x1.3cp-4; // exactly representable fraction
    const AxisStencil a = axis_stencil(k, xi);
    const AxisStencil b = axis_stencil(k, xi + 5.0);
    CHECK(b.first == a.first + 5);
    for (int m = 0; m < a.count; ++m) CHECK(a.w[m] == b.w[m]);
}

TEST_CASE("non-finite kernel arguments are rejected") {
    Kernel1D k(KernelFamily::BS, 3);
    CHECK_THROWS_AS(k.eval(std::nan("")), InvalidArgumentError);
    CHECK_THROWS_AS(k.deriv(std::numeric_limits<double>::infinity()), InvalidArgumentError);
}
