#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "warplab/errors.hpp"
#include "warplab/numerics.hpp"

using namespace warplab::numerics;

namespace {

std::vector<double> sample(const std::vector<double>& x, double (*f)(double)) {
    std::vector<double> y;
    for (double t : x) y.push_back(f(t));
    return y;
}

}  // namespace

TEST(CubicSpline, ReproducesCubicWithNotAKnot) {
    std::vector<double> x{0.0, 0.3, 0.7, 1.2, 1.6, 2.5};
    auto f = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t + 0.25 * t * t * t; };
    std::vector<double> y;
    for (double t : x) y.push_back(f(t));
    CubicSpline s(x, y);
    for (double t : {0.1, 0.5, 1.0, 2.0, 2.4}) {
        EXPECT_NEAR(s(t), f(t), 1e-12);
        EXPECT_NEAR(s.derivative(t), -2.0 + t + 0.75 * t * t, 1e-11);
        EXPECT_NEAR(s.second_derivative(t), 1.0 + 1.5 * t, 1e-10);
    }
}

TEST(CubicSpline, ClampedAndNaturalEndsHonoured) {
    auto x = uniform_grid(0.0, 1.0, 11);
    auto y = sample(x, [](double t) { return std::cos(t); });
    CubicSpline c(x, y, SplineEnd::clamped(0.0), SplineEnd::clamped(-std::sin(1.0)));
    EXPECT_NEAR(c.derivative(0.0), 0.0, 1e-13);
    EXPECT_NEAR(c.derivative(1.0), -std::sin(1.0), 1e-13);
    CubicSpline n(x, y, SplineEnd::natural(), SplineEnd::natural(0.5));
    EXPECT_NEAR(n.second_derivative(0.0), 0.0, 1e-13);
    EXPECT_NEAR(n.second_derivative(1.0), 0.5, 1e-13);
}

TEST(CubicSpline, NodalDerivativesAreFourthOrderOnUniformGrids) {
    double prev1 = 0.0, prev2 = 0.0;
    for (std::size_t pts : {41u, 81u, 161u}) {
        auto x = uniform_grid(0.0, std::numbers::pi, pts);
        auto y = sample(x, [](double t) { return std::sin(t); });
        CubicSpline s(x, y, SplineEnd::natural(), SplineEnd::natural());
        const auto d1 = s.nodal_first_derivative();
        const auto d2 = s.nodal_second_derivative();
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < pts; ++i) {
            e1 = std::max(e1, std::abs(d1[i] - std::cos(x[i])));
            e2 = std::max(e2, std::abs(d2[i] + std::sin(x[i])));
        }
        if (prev1 > 0.0) {
            EXPECT_GT(prev1 / e1, 12.0);
            EXPECT_GT(prev2 / e2, 12.0);
        }
        prev1 = e1;
        prev2 = e2;
    }
}

TEST(CubicSpline, PeriodicSplineMatchesTrigonometricData) {
    auto x = uniform_grid(0.0, 2.0 * std::numbers::pi, 129);
    auto y = sample(x, [](double t) { return 2.0 + std::cos(t); });
    y.back() = y.front();
    CubicSpline s(x, y, SplineEnd::periodic(), SplineEnd::periodic());
    const auto d1 = s.nodal_first_derivative();
    const auto d2 = s.nodal_second_derivative();
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(d1[i], -std::sin(x[i]), 1e-7);
        EXPECT_NEAR(d2[i], -std::cos(x[i]), 1e-7);
    }
}

TEST(CubicSpline, RejectsBadKnots) {
    EXPECT_THROW(CubicSpline({0.0, 1.0, 1.0, 2.0}, {0.0, 1.0, 2.0, 3.0}), warplab::InvalidInput);
    EXPECT_THROW(CubicSpline({0.0, 1.0, 2.0}, {0.0, 1.0}), warplab::GridMismatch);
}

TEST(Quadrature, CorrectedTrapezoidIsFourthOrder) {
    double prev = 0.0;
    for (std::size_t pts : {17u, 33u, 65u}) {
        auto x = uniform_grid(0.0, std::numbers::pi, pts);
        auto g = sample(x, [](double t) { return std::exp(t) * std::sin(t); });
        std::vector<double> dg;
        for (double t : x) dg.push_back(std::exp(t) * (std::sin(t) + std::cos(t)));
        const double exact = 0.5 * (std::exp(std::numbers::pi) + 1.0);
        const double err = std::abs(integrate(x, g, dg) - exact);
        if (prev > 0.0) EXPECT_GT(prev / err, 14.0);
        prev = err;
        const auto cum = cumulative_integral(x, g, dg);
        EXPECT_DOUBLE_EQ(cum.front(), 0.0);
        EXPECT_NEAR(cum.back(), integrate(x, g, dg), 1e-12);
    }
}

TEST(SymmetricTridiagonal, PathLaplacianInertia) {
    const std::size_t n = 50;
    SymmetricTridiagonal t(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
    for (std::size_t k = 1; k <= n; ++k) {
        const double ev = 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1));
        EXPECT_EQ(t.count_below(ev - 1e-9), k - 1);
        EXPECT_EQ(t.count_below(ev + 1e-9), k);
    }
}

TEST(SymmetricTridiagonal, CyclicLaplacianInertia) {
    const std::size_t n = 40;
    SymmetricTridiagonal t(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0), -1.0, true);
    // Eigenvalues 2 - 2 cos(2 pi k / n); all but 0 and 4 are double.
    std::vector<double> ev;
    for (std::size_t k = 0; k < n; ++k) ev.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n));
    std::sort(ev.begin(), ev.end());
    for (double sigma : {-0.5, 1e-9, 0.3, 1.0, 2.5, 3.99, 4.1}) {
        const auto expected = static_cast<std::size_t>(
            std::count_if(ev.begin(), ev.end(), [&](double e) { return e < sigma; }));
        EXPECT_EQ(t.count_below(sigma), expected) << "sigma=" << sigma;
    }
}

TEST(SymmetricTridiagonal, ShiftedSolveInvertsMultiply) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (bool cyclic : {false, true}) {
        const std::size_t n = 30;
        std::vector<double> d(n), o(n - 1), rhs(n);
        for (auto& x : o) x = dist(rng);
        for (auto& x : d) x = 3.0 + dist(rng);
        for (auto& x : rhs) x = dist(rng);
        SymmetricTridiagonal t(d, o, 0.7, cyclic);
        const double sigma = -0.25;
        auto x = t.solve_shifted(sigma, rhs);
        auto ax = t.multiply(x);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ax[i] - sigma * x[i], rhs[i], 1e-12);
    }
}

TEST(SymmetricTridiagonal, GershgorinEnclosesSpectrum) {
    SymmetricTridiagonal t(std::vector<double>(10, 2.0), std::vector<double>(9, -1.0));
    auto [lo, hi] = t.gershgorin();
    EXPECT_EQ(t.count_below(lo), 0u);
    EXPECT_EQ(t.count_below(hi + 1e-12), 10u);
}
