#include "warplab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warplab/errors.hpp"

namespace warplab::numerics {

namespace {

// a*b - c*d with one rounding of the result (Kahan's fma trick).
double diff_of_products(double a, double b, double c, double d) {
    const double cd = c * d;
    const double err = std::fma(-c, d, cd);
    return std::fma(a, b, -cd) + err;
}

// 6 * (slope_i - slope_{i-1}) without the cancellation of two rounded slopes.
double slope_jump(std::span<const double> y, std::span<const double> h, std::size_t i) {
    const double right = y[i + 1] - y[i];
    const double left = y[i] - y[i - 1];
    return 6.0 * diff_of_products(right, h[i - 1], left, h[i]) / (h[i] * h[i - 1]);
}

void require_increasing(std::span<const double> x) {
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw InvalidInput("knots must be strictly increasing");
    }
}

// Row 0 / row N-1 coefficients for clamped and natural ends are folded into
// the tridiagonal system; not-a-knot is eliminated into rows 1 and N-2.
std::vector<double> solve_moments(std::span<const double> x, std::span<const double> y,
                                  SplineEnd left, SplineEnd right) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];
    auto slope = [&](std::size_t i) { return (y[i + 1] - y[i]) / h[i]; };

    if (left.kind == EndKind::Periodic || right.kind == EndKind::Periodic) {
        if (left.kind != right.kind) throw InvalidInput("periodic spline needs both ends periodic");
        // Unknowns M_0..M_{n-2}; M_{n-1} == M_0.
        const std::size_t m = n - 1;
        if (m < 3) throw InvalidInput("periodic spline needs at least 4 knots");
        std::vector<double> diag(m), off(m - 1), rhs(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double hl = h[(i + m - 1) % m];
            const double hr = h[i];
            diag[i] = 2.0 * (hl + hr);
            if (i + 1 < m) off[i] = hr;
            const std::size_t prev = (i + m - 1) % m;
            const double right = y[i + 1] - y[i];
            const double left = y[prev + 1] - y[prev];
            rhs[i] = 6.0 * diff_of_products(right, hl, left, hr) / (hl * hr);
        }
        SymmetricTridiagonal sys(diag, off, h[m - 1], true);
        auto mom = sys.solve_shifted(0.0, rhs);
        mom.push_back(mom.front());
        return mom;
    }

    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = slope_jump(y, h, i);
    }
    bool nak_left = false, nak_right = false;
    switch (left.kind) {
        case EndKind::Natural: diag[0] = 1.0; rhs[0] = left.value; break;
        case EndKind::Clamped:
            diag[0] = 2.0 * h[0]; sup[0] = h[0];
            rhs[0] = 6.0 * (slope(0) - left.value);
            break;
        default: nak_left = true; break;
    }
    switch (right.kind) {
        case EndKind::Natural: diag[n - 1] = 1.0; rhs[n - 1] = right.value; break;
        case EndKind::Clamped:
            sub[n - 1] = h[n - 2]; diag[n - 1] = 2.0 * h[n - 2];
            rhs[n - 1] = 6.0 * (right.value - slope(n - 2));
            break;
        default: nak_right = true; break;
    }
    if ((nak_left || nak_right) && n < 4) throw InvalidInput("not-a-knot spline needs at least 4 knots");
    // Not-a-knot: M_0 = ((h0+h1) M_1 - h0 M_2)/h1, substituted into row 1.
    if (nak_left) {
        const double h0 = h[0], h1 = h[1];
        diag[1] += h0 * (h0 + h1) / h1;
        sup[1] -= h0 * h0 / h1;
        diag[0] = 1.0; sup[0] = 0.0; rhs[0] = 0.0;
        sub[1] = 0.0;
    }
    if (nak_right) {
        const double ha = h[n - 3], hb = h[n - 2];
        diag[n - 2] += hb * (ha + hb) / ha;
        sub[n - 2] -= hb * hb / ha;
        diag[n - 1] = 1.0; sub[n - 1] = 0.0; rhs[n - 1] = 0.0;
        sup[n - 2] = 0.0;
    }
    auto mom = solve_tridiagonal(sub, diag, sup, rhs);
    if (nak_left) mom[0] = ((h[0] + h[1]) * mom[1] - h[0] * mom[2]) / h[1];
    if (nak_right) {
        const double ha = h[n - 3], hb = h[n - 2];
        mom[n - 1] = ((ha + hb) * mom[n - 2] - hb * mom[n - 3]) / ha;
    }
    return mom;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y, SplineEnd left,
                         SplineEnd right)
    : x_(std::move(x)), y_(std::move(y)), left_(left), right_(right) {
    if (x_.size() != y_.size()) throw GridMismatch("spline knots and values differ in length");
    if (x_.size() < 3) throw InvalidInput("spline needs at least 3 knots");
    require_increasing(x_);
    m_ = solve_moments(x_, y_, left_, right_);
    uniform_ = is_uniform(x_);
}

std::size_t CubicSpline::interval(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double t) const {
    const std::size_t i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double t) const {
    const std::size_t i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::second_derivative(double t) const {
    const std::size_t i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

std::vector<double> CubicSpline::nodal_first_derivative() const {
    const std::size_t n = x_.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = x_[i + 1] - x_[i];
        d[i] = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    }
    const double h = x_[n - 1] - x_[n - 2];
    d[n - 1] = (y_[n - 1] - y_[n - 2]) / h + h * (m_[n - 2] + 2.0 * m_[n - 1]) / 6.0;
    return d;
}

std::vector<double> CubicSpline::nodal_second_derivative() const {
    std::vector<double> d(m_);
    const std::size_t n = m_.size();
    if (!uniform_ || n < 4) return d;
    auto ghost = [&](const SplineEnd& end, std::size_t edge, std::size_t in1, std::size_t in2) {
        switch (end.kind) {
            case EndKind::Natural: return 2.0 * m_[edge] - m_[in1];
            case EndKind::Clamped: return m_[in1];
            case EndKind::Periodic: return m_[edge == 0 ? n - 2 : 1];
            default: return 3.0 * m_[edge] - 3.0 * m_[in1] + m_[in2];
        }
    };
    const double lo = ghost(left_, 0, 1, 2);
    const double hi = ghost(right_, n - 1, n - 2, n - 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = i == 0 ? lo : m_[i - 1];
        const double next = i + 1 == n ? hi : m_[i + 1];
        d[i] = m_[i] + (prev - 2.0 * m_[i] + next) / 12.0;
    }
    return d;
}

bool is_uniform(std::span<const double> x, double rel_tol) {
    if (x.size() < 3) return true;
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (std::abs((x[i + 1] - x[i]) - h) > rel_tol * std::abs(h)) return false;
    }
    return true;
}

std::vector<double> uniform_grid(double a, double b, std::size_t points) {
    if (points < 2) throw InvalidInput("uniform grid needs at least 2 points");
    std::vector<double> x(points);
    const double h = (b - a) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) x[i] = a + h * static_cast<double>(i);
    x.back() = b;
    return x;
}

double integrate(std::span<const double> x, std::span<const double> g,
                 std::span<const double> dg) {
    if (x.size() != g.size() || x.size() != dg.size()) throw GridMismatch("quadrature inputs differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        sum += 0.5 * h * (g[i] + g[i + 1]) + h * h * (dg[i] - dg[i + 1]) / 12.0;
    }
    return sum;
}

std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> g,
                                        std::span<const double> dg) {
    if (x.size() != g.size() || x.size() != dg.size()) throw GridMismatch("quadrature inputs differ in length");
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        out[i + 1] = out[i] + 0.5 * h * (g[i] + g[i + 1]) + h * h * (dg[i] - dg[i + 1]) / 12.0;
    }
    return out;
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n);
    double denom = diag[0];
    if (denom == 0.0) throw InvalidInput("singular tridiagonal system");
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - sub[i] * c[i - 1];
        if (denom == 0.0) throw InvalidInput("singular tridiagonal system");
        c[i] = i + 1 < n ? sup[i] / denom : 0.0;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

SymmetricTridiagonal::SymmetricTridiagonal(std::vector<double> diag, std::vector<double> off,
                                           double corner, bool cyclic)
    : diag_(std::move(diag)), off_(std::move(off)), corner_(cyclic ? corner : 0.0), cyclic_(cyclic) {
    if (diag_.empty()) throw InvalidInput("empty tridiagonal matrix");
    if (off_.size() + 1 != diag_.size()) throw GridMismatch("off-diagonal length must be N-1");
    if (cyclic_ && diag_.size() < 3) throw InvalidInput("cyclic tridiagonal needs N >= 3");
}

SymmetricTridiagonal::Factor SymmetricTridiagonal::factor(double sigma) const {
    const std::size_t n = diag_.size();
    constexpr double tiny = std::numeric_limits<double>::min();
    auto guard = [](double p) { return p == 0.0 ? tiny : p; };
    Factor f{std::vector<double>(n), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    if (n == 1) {
        f.pivot[0] = guard(diag_[0] - sigma);
        return f;
    }
    // fill[i] = current entry (i, n-1) before row i is eliminated.
    double fill = cyclic_ ? corner_ : 0.0;
    if (n == 2) fill = off_[0];
    double last_diag = diag_[n - 1] - sigma;
    f.pivot[0] = guard(diag_[0] - sigma);
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double p = f.pivot[i];
        const double l = off_[i] / p;
        f.lower[i] = l;
        f.last[i] = fill / p;
        last_diag -= fill * fill / p;
        f.pivot[i + 1] = guard(diag_[i + 1] - sigma - l * off_[i]);
        const double base = (i + 2 == n - 1) ? off_[n - 2] : 0.0;
        fill = base - l * fill;
    }
    // Row n-2 couples to the last row through `fill` only.
    const double p = f.pivot[n - 2];
    f.last[n - 2] = fill / p;
    f.lower[n - 2] = fill / p;
    last_diag -= fill * fill / p;
    f.pivot[n - 1] = guard(last_diag);
    return f;
}

std::size_t SymmetricTridiagonal::count_below(double sigma) const {
    const auto f = factor(sigma);
    return static_cast<std::size_t>(std::count_if(f.pivot.begin(), f.pivot.end(),
                                                  [](double p) { return p < 0.0; }));
}

std::vector<double> SymmetricTridiagonal::solve_shifted(double sigma,
                                                        std::span<const double> rhs) const {
    const std::size_t n = diag_.size();
    if (rhs.size() != n) throw GridMismatch("right-hand side length mismatch");
    const auto f = factor(sigma);
    std::vector<double> z(rhs.begin(), rhs.end());
    if (n == 1) return {z[0] / f.pivot[0]};
    // Forward: L z = rhs. Rows 1..n-2 use the banded multiplier, the last
    // row collects every column through `last`.
    for (std::size_t i = 0; i + 2 < n; ++i) z[i + 1] -= f.lower[i] * z[i];
    for (std::size_t i = 0; i + 1 < n; ++i) z[n - 1] -= f.last[i] * z[i];
    for (std::size_t i = 0; i < n; ++i) z[i] /= f.pivot[i];
    // Backward: L^T x = z.
    z[n - 2] -= f.last[n - 2] * z[n - 1];
    for (std::size_t i = n - 2; i-- > 0;) {
        z[i] -= f.lower[i] * z[i + 1] + f.last[i] * z[n - 1];
    }
    return z;
}

std::vector<double> SymmetricTridiagonal::multiply(std::span<const double> x) const {
    const std::size_t n = diag_.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = diag_[i] * x[i];
        if (i > 0) y[i] += off_[i - 1] * x[i - 1];
        if (i + 1 < n) y[i] += off_[i] * x[i + 1];
    }
    if (cyclic_) {
        y[0] += corner_ * x[n - 1];
        y[n - 1] += corner_ * x[0];
    }
    return y;
}

std::pair<double, double> SymmetricTridiagonal::gershgorin() const {
    const std::size_t n = diag_.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(off_[i - 1]);
        if (i + 1 < n) radius += std::abs(off_[i]);
        if (cyclic_ && (i == 0 || i + 1 == n)) radius += std::abs(corner_);
        lo = std::min(lo, diag_[i] - radius);
        hi = std::max(hi, diag_[i] + radius);
    }
    return {lo, hi};
}

}  // namespace warplab::numerics
