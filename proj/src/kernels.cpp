#include "ibfsi/kernels.hpp"

#include "ibfsi/errors.hpp"

#include <cmath>

namespace ibfsi {

namespace {

// ---------------------------------------------------------------------------
// B-spline family: Cox-de Boor recursion in convex-combination form.
// bs(1) is the box on [-1/2, 1/2) (right-continuous), bs(2) the hat, and
// bs(n) = ((x + n/2) bs(n-1)(x+1/2) + (n/2 - x) bs(n-1)(x-1/2)) / (n-1).
// The recursion keeps every coefficient nonnegative, so evaluation is stable
// and bitwise even away from the box discontinuities.
// ---------------------------------------------------------------------------

double bs_eval(int n, double x) {
    if (n == 1) return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
    if (n == 2) {
        const double a = std::fabs(x);
        return a < 1.0 ? 1.0 - a : 0.0;
    }
    if (std::fabs(x) >= 0.5 * n) return 0.0;
    const double half = 0.5 * n;
    return ((x + half) * bs_eval(n - 1, x + 0.5) + (half - x) * bs_eval(n - 1, x - 0.5)) /
           (n - 1);
}

// Derivative by differentiating the recursion itself; the central-difference
// identity is kept as an independent check in the tests.
double bs_deriv(int n, double x) {
    if (n == 1) return 0.0;
    if (n == 2) {
        if (x < -1.0 || x >= 1.0) return 0.0;
        return x < 0.0 ? 1.0 : -1.0;
    }
    if (std::fabs(x) >= 0.5 * n) return 0.0;
    const double half = 0.5 * n;
    return (bs_eval(n - 1, x + 0.5) + (x + half) * bs_deriv(n - 1, x + 0.5) -
            bs_eval(n - 1, x - 0.5) + (half - x) * bs_deriv(n - 1, x - 0.5)) /
           (n - 1);
}

// ---------------------------------------------------------------------------
// IB family.
// ---------------------------------------------------------------------------

// 3-point kernel of Roma, Peskin & Berger.
double ib3_eval_abs(double a) {
    if (a < 0.5) return (1.0 + std::sqrt(1.0 - 3.0 * a * a)) / 3.0;
    if (a < 1.5) {
        const double b = 1.0 - a;
        return (5.0 - 3.0 * a - std::sqrt(1.0 - 3.0 * b * b)) / 6.0;
    }
    return 0.0;
}

double ib3_deriv_abs(double a) {
    if (a < 0.5) return -a / std::sqrt(1.0 - 3.0 * a * a);
    if (a < 1.5) {
        const double b = 1.0 - a;
        return (-3.0 - 3.0 * b / std::sqrt(1.0 - 3.0 * b * b)) / 6.0;
    }
    return 0.0;
}

// Peskin's classical 4-point kernel.
double ib4_eval_abs(double a) {
    if (a < 1.0) return (3.0 - 2.0 * a + std::sqrt(1.0 + 4.0 * a - 4.0 * a * a)) / 8.0;
    if (a < 2.0) return (5.0 - 2.0 * a - std::sqrt(-7.0 + 12.0 * a - 4.0 * a * a)) / 8.0;
    return 0.0;
}

double ib4_deriv_abs(double a) {
    if (a < 1.0) {
        const double s = std::sqrt(1.0 + 4.0 * a - 4.0 * a * a);
        return (-2.0 + (2.0 - 4.0 * a) / s) / 8.0;
    }
    if (a < 2.0) {
        const double s = std::sqrt(-7.0 + 12.0 * a - 4.0 * a * a);
        return (-2.0 - (6.0 - 4.0 * a) / s) / 8.0;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// 5-point kernel (Bao et al.). Built from the moment system
//   sum w = 1,  sum (r-j) w = 0,  sum (r-j)^2 w = K5,  sum (r-j)^3 w = 0,
//   sum w^2 = C5,
// with r in [-1/2, 1/2) the offset from the nearest grid point. The linear
// conditions leave one parameter t = w(-2)+w(2); the sum-of-squares condition
// fixes it through a quadratic. C5 is chosen so the outermost weight vanishes
// at r = 1/2, which makes the kernel continuous across stencil shifts.
// ---------------------------------------------------------------------------

const double kIb5K = (38.0 - std::sqrt(69.0)) / 60.0;

double ib5_sum_sq_constant() {
    const double K = kIb5K;
    const double ts = K / 4.0 - 1.0 / 16.0; // t at r = 1/2, equal to d there
    const double P = K + 0.25;
    const double d = ts;
    const double e = (2.0 - 0.125 - 3.0 * K / 2.0) / 3.0;
    return 0.5 * (35.0 * ts * ts + (12.0 - 20.0 * P) * ts + P * P +
                  2.0 * (1.0 - P) * (1.0 - P) + d * d + e * e);
}

const double kIb5C = ib5_sum_sq_constant();

struct Ib5Row {
    double t, d, e, P; // t even in r; d, e odd
};

Ib5Row ib5_row(double r) {
    const double K = kIb5K;
    const double r2 = r * r;
    Ib5Row row;
    row.P = K + r2;
    row.d = (r * r2 + 3.0 * K * r - r) / 6.0;
    row.e = (4.0 * r - r * r2 - 3.0 * K * r) / 3.0;
    const double b = 12.0 - 20.0 * row.P;
    const double c = row.P * row.P + 2.0 * (1.0 - row.P) * (1.0 - row.P) + row.d * row.d +
                     row.e * row.e - 2.0 * kIb5C;
    row.t = (-b + std::sqrt(std::max(b * b - 140.0 * c, 0.0))) / 70.0;
    return row;
}

// phi(a) for a >= 0: a = r + m with m the nearest node, weight slot -m.
double ib5_eval_abs(double a) {
    if (a >= 2.5) return 0.0;
    const double m = std::floor(a + 0.5);
    const double r = a - m;
    const Ib5Row q = ib5_row(r);
    const int slot = static_cast<int>(m);
    if (slot == 0) return 1.0 - q.P + 3.0 * q.t;
    if (slot == 1) return 0.5 * (q.P - 4.0 * q.t - q.e);
    return 0.5 * (q.t - q.d);
}

double ib5_deriv_abs(double a) {
    if (a >= 2.5) return 0.0;
    const double K = kIb5K;
    const double m = std::floor(a + 0.5);
    const double r = a - m;
    const Ib5Row q = ib5_row(r);
    const double bp = -40.0 * r;
    const double dp = (3.0 * r * r + 3.0 * K - 1.0) / 6.0;
    const double ep = (4.0 - 3.0 * r * r - 3.0 * K) / 3.0;
    const double cp = 4.0 * r * q.P - 8.0 * r * (1.0 - q.P) + 2.0 * q.d * dp + 2.0 * q.e * ep;
    const double b = 12.0 - 20.0 * q.P;
    const double tp = -(bp * q.t + cp) / (70.0 * q.t + b);
    const int slot = static_cast<int>(m);
    if (slot == 0) return -2.0 * r + 3.0 * tp;
    if (slot == 1) return 0.5 * (2.0 * r - 4.0 * tp - ep);
    return 0.5 * (tp - dp);
}

// ---------------------------------------------------------------------------
// 6-point C^3 kernel of Bao et al., second moment K6 = 59/60 - sqrt(29)/20.
// With r in [0,1) the fractional offset, the six weights follow from the
// moment system; the outermost one solves a quadratic with alpha = 28.
// Only the slots for nonnegative arguments are needed here (even symmetry).
// ---------------------------------------------------------------------------

const double kIb6K = 59.0 / 60.0 - std::sqrt(29.0) / 20.0;

struct Ib6Aux {
    double p, beta, gamma; // p = phi(r - 3)
};

Ib6Aux ib6_aux(double r) {
    const double K = kIb6K;
    const double r2 = r * r;
    const double r3 = r2 * r;
    Ib6Aux a;
    a.beta = 9.0 / 4.0 - 1.5 * (K + r2) + (22.0 / 3.0 - 7.0 * K) * r - 7.0 / 3.0 * r3;
    const double A = 161.0 / 36.0 - 59.0 / 6.0 * K + 5.0 * K * K;
    const double B = -109.0 / 24.0 + 5.0 * K;
    a.gamma = 0.25 * (A * 0.5 * r2 + B * r2 * r2 / 3.0 + 5.0 / 18.0 * r3 * r3);
    const double disc = std::max(a.beta * a.beta - 112.0 * a.gamma, 0.0);
    a.p = (-a.beta + std::sqrt(disc)) / 56.0;
    return a;
}

double ib6_eval_abs(double a) {
    if (a >= 3.0) return 0.0;
    const double K = kIb6K;
    const double fl = std::floor(a);
    const double r = a - fl;
    const double r2 = r * r;
    const double r3 = r2 * r;
    const Ib6Aux q = ib6_aux(r);
    const int slot = static_cast<int>(fl);
    if (slot == 0) return 2.0 * q.p + 5.0 / 8.0 - 0.25 * (K + r2);
    if (slot == 1) return -3.0 * q.p + 0.25 - (4.0 - 3.0 * K) * r / 6.0 + r3 / 6.0;
    return q.p - 1.0 / 16.0 + (K + r2) / 8.0 - (3.0 * K - 1.0) * r / 12.0 - r3 / 12.0;
}

double ib6_deriv_abs(double a) {
    if (a >= 3.0) return 0.0;
    const double K = kIb6K;
    const double fl = std::floor(a);
    const double r = a - fl;
    const double r2 = r * r;
    const Ib6Aux q = ib6_aux(r);
    const double betap = -3.0 * r + (22.0 / 3.0 - 7.0 * K) - 7.0 * r2;
    const double A = 161.0 / 36.0 - 59.0 / 6.0 * K + 5.0 * K * K;
    const double B = -109.0 / 24.0 + 5.0 * K;
    const double gammap = 0.25 * (A * r + B * 4.0 * r * r2 / 3.0 + 5.0 / 3.0 * r2 * r2 * r);
    const double disc = std::max(q.beta * q.beta - 112.0 * q.gamma, 1e-300);
    const double pp = (-betap + (q.beta * betap - 56.0 * gammap) / std::sqrt(disc)) / 56.0;
    const int slot = static_cast<int>(fl);
    if (slot == 0) return 2.0 * pp - 0.5 * r;
    if (slot == 1) return -3.0 * pp - (4.0 - 3.0 * K) / 6.0 + 0.5 * r2;
    return pp + 0.25 * r - (3.0 * K - 1.0) / 12.0 - 0.25 * r2;
}

double ib_eval(int points, double r) {
    const double a = std::fabs(r);
    switch (points) {
    case 3: return ib3_eval_abs(a);
    case 4: return ib4_eval_abs(a);
    case 5: return ib5_eval_abs(a);
    default: return ib6_eval_abs(a);
    }
}

double ib_deriv(int points, double r) {
    const double a = std::fabs(r);
    double d;
    switch (points) {
    case 3: d = ib3_deriv_abs(a); break;
    case 4: d = ib4_deriv_abs(a); break;
    case 5: d = ib5_deriv_abs(a); break;
    default: d = ib6_deriv_abs(a); break;
    }
    return r < 0.0 ? -d : d;
}

} // namespace

Kernel1D::Kernel1D(KernelFamily f, int pts) : family(f), points(pts) {
    const bool ok = (f == KernelFamily::IB) ? (pts >= 3 && pts <= 6) : (pts >= 1 && pts <= 6);
    if (!ok)
        throw ConfigError("unsupported kernel: " +
                          std::string(f == KernelFamily::IB ? "IB" : "BS") +
                          std::to_string(pts) + " (supported: IB 3-6, BS 1-6)");
}

double Kernel1D::eval(double r) const {
    if (!std::isfinite(r)) throw InvalidArgumentError("kernel argument must be finite");
    // right-continuous: the left support edge belongs to the kernel
    if (r >= half_support() || r < -half_support()) return 0.0;
    if (family == KernelFamily::BS) return bs_eval(points, r);
    return ib_eval(points, r);
}

double Kernel1D::deriv(double r) const {
    if (!std::isfinite(r)) throw InvalidArgumentError("kernel argument must be finite");
    if (r >= half_support() || r < -half_support()) return 0.0;
    if (family == KernelFamily::BS) return bs_deriv(points, r);
    return ib_deriv(points, r);
}

std::string Kernel1D::name() const {
    return std::string(family == KernelFamily::IB ? "IB" : "BS") + std::to_string(points);
}

namespace {

AxisStencil axis_stencil_impl(const Kernel1D& k, double xi, bool derivative) {
    AxisStencil st;
    st.count = k.points;
    if (k.points % 2 == 0)
        st.first = static_cast<int>(std::floor(xi)) - k.points / 2 + 1;
    else
        st.first = static_cast<int>(std::floor(xi + 0.5)) - (k.points - 1) / 2;
    for (int m = 0; m < st.count; ++m) {
        const double r = xi - (st.first + m);
        st.w[m] = derivative ? k.deriv(r) : k.eval(r);
    }
    return st;
}

} // namespace

AxisStencil axis_stencil(const Kernel1D& k, double xi) { return axis_stencil_impl(k, xi, false); }

AxisStencil axis_stencil_deriv(const Kernel1D& k, double xi) {
    return axis_stencil_impl(k, xi, true);
}

DeltaKernel DeltaKernel::isotropic(Kernel1D k) {
    DeltaKernel d;
    d.composite = false;
    d.normal = k;
    d.tangential = k;
    d.name = k.name();
    return d;
}

DeltaKernel DeltaKernel::make_composite(Kernel1D normal, Kernel1D tangential) {
    if (normal.family != KernelFamily::BS || tangential.family != KernelFamily::BS)
        throw ConfigError("composite kernels require B-spline members");
    if (normal.points != tangential.points + 1)
        throw ConfigError("composite kernel must pair BS(n+1) with BS(n), got " +
                          normal.name() + "/" + tangential.name());
    DeltaKernel d;
    d.composite = true;
    d.normal = normal;
    d.tangential = tangential;
    d.name = "CBS" + std::to_string(normal.points) + std::to_string(tangential.points);
    return d;
}

DeltaKernel DeltaKernel::parse(std::string_view spec) {
    auto digit = [&](size_t i) -> int {
        if (i >= spec.size() || spec[i] < '0' || spec[i] > '9') return -1;
        return spec[i] - '0';
    };
    if (spec.size() == 3 && spec.substr(0, 2) == "IB") {
        const int n = digit(2);
        if (n >= 3 && n <= 6) return isotropic(Kernel1D(KernelFamily::IB, n));
    } else if (spec.size() == 3 && spec.substr(0, 2) == "BS") {
        const int n = digit(2);
        if (n >= 1 && n <= 6) return isotropic(Kernel1D(KernelFamily::BS, n));
    } else if (spec.size() == 5 && spec.substr(0, 3) == "CBS") {
        const int n = digit(3);
        const int m = digit(4);
        if (n >= 2 && n <= 6 && m == n - 1)
            return make_composite(Kernel1D(KernelFamily::BS, n), Kernel1D(KernelFamily::BS, m));
    }
    throw ConfigError("unknown kernel '" + std::string(spec) +
                      "' (expected IB3|IB4|IB5|IB6|BS1|...|BS6|CBS21|CBS32|CBS43|CBS54|CBS65)");
}

const std::vector<std::string>& supported_kernel_names() {
    static const std::vector<std::string> names = {
        "IB3",   "IB4",   "IB5",   "IB6",   "BS1",   "BS2",   "BS3",  "BS4",
        "BS5",   "BS6",   "CBS21", "CBS32", "CBS43", "CBS54", "CBS65"};
    return names;
}

} // namespace ibfsi
