#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "warplab/errors.hpp"
#include "warplab/numerics.hpp"
#include "warplab/spectral.hpp"
#include "warplab/warped_metric.hpp"

using namespace warplab;
using namespace warplab::geometry;
using namespace warplab::spectral;

namespace {

constexpr double pi = std::numbers::pi;

RadialField potential(const WarpedMetric& m, double (*v)(double)) {
    std::vector<double> out;
    for (double r : m.grid()) out.push_back(v(r));
    return RadialField(out, FieldKind::Potential);
}

// Independent oracle: shoot y'' + 2 cot(r) y' = (V - lambda) y on the unit
// S^3 from the regular pole with classical RK4 and locate the lambda for
// which the solution is symmetric about r = pi/2 (V is symmetric there).
double shooting_s3(double (*v)(double)) {
    auto end_slope = [&](double lambda) {
        const double eps = 1e-3;
        const double a = (v(0.0) - lambda) / 6.0;  // y = 1 + a r^2, 3 y''(0) = (V-lambda)
        double r = eps, y = 1.0 + a * eps * eps, p = 2.0 * a * eps;
        const int steps = 40000;
        const double h = (pi / 2.0 - eps) / steps;
        auto rhs = [&](double t, double yy, double pp) {
            return std::pair{pp, (v(t) - lambda) * yy - 2.0 * std::cos(t) / std::sin(t) * pp};
        };
        for (int i = 0; i < steps; ++i) {
            auto [k1y, k1p] = rhs(r, y, p);
            auto [k2y, k2p] = rhs(r + h / 2, y + h / 2 * k1y, p + h / 2 * k1p);
            auto [k3y, k3p] = rhs(r + h / 2, y + h / 2 * k2y, p + h / 2 * k2p);
            auto [k4y, k4p] = rhs(r + h, y + h * k3y, p + h * k3p);
            y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
            p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
            r += h;
        }
        return p;
    };
    double lo = -2.0, hi = 1.0;
    EXPECT_GT(end_slope(lo), 0.0);
    EXPECT_LT(end_slope(hi), 0.0);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (end_slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(PrincipalEigenvalue, SphereWithRicciPotential) {
    for (int n : {3, 4, 5}) {
        const auto m = round_sphere(n, 4096);
        for (double gamma : {0.0, 1.0, (n - 1.0) / (n - 2.0)}) {
            SturmLiouvilleProblem p{m, gamma, RadialField::constant(m, n - 1.0, FieldKind::Potential)};
            const auto res = principal_eigenvalue(p);
            EXPECT_NEAR(res.lambda1, n - 1.0, 1e-10);
            const auto phi = res.eigenfunction.values();
            if (gamma > 0.0) {
                const double ref = phi[m.size() / 2];
                for (double x : phi) EXPECT_NEAR(x, ref, 1e-8 * ref);
            }
        }
    }
}

TEST(PrincipalEigenvalue, SphereZeroPotential) {
    const auto m = round_sphere(3, 1025);
    SturmLiouvilleProblem p{m, 1.0, RadialField::constant(m, 0.0, FieldKind::Potential)};
    EXPECT_NEAR(principal_eigenvalue(p).lambda1, 0.0, 1e-10);
}

TEST(PrincipalEigenvalue, MatchesShootingOracleOnS3) {
    auto v = [](double r) { return -2.0 * std::cos(2.0 * r); };
    const double oracle = shooting_s3(v);
    const auto m = round_sphere(3, 4096);
    SturmLiouvilleProblem p{m, 1.0, potential(m, v)};
    const auto res = principal_eigenvalue(p);
    EXPECT_NEAR(res.extrapolated, oracle, 1e-6);
    EXPECT_NEAR(res.lambda1, oracle, 1e-4);
    ASSERT_EQ(res.grid_levels.size(), 3u);
    // Observed order of the nested levels is close to two.
    const double e0 = res.grid_levels[0].lambda1 - oracle;
    const double e1 = res.grid_levels[1].lambda1 - oracle;
    const double e2 = res.grid_levels[2].lambda1 - oracle;
    EXPECT_NEAR(std::log2(e0 / e1), 2.0, 0.2);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(PrincipalEigenvalue, EigenfunctionPositiveAndRayleighConsistent) {
    auto v = [](double r) { return std::sin(3.0 * r) + 0.5 * std::cos(r); };
    const auto m = round_sphere(4, 801);
    SturmLiouvilleProblem p{m, 1.5, potential(m, v)};
    const auto res = principal_eigenvalue(p);
    for (double x : res.eigenfunction.values()) EXPECT_GT(x, 0.0);
    EXPECT_NEAR(rayleigh_quotient(p, res.eigenfunction), res.lambda1, 1e-10);
}

TEST(PrincipalEigenvalue, GammaZeroIsMinimumOfPotential) {
    const auto m = round_sphere(3, 301);
    auto v = [](double r) { return std::cos(r) * std::cos(r) - r; };
    SturmLiouvilleProblem p{m, 0.0, potential(m, v)};
    const auto vals = p.potential.values();
    EXPECT_EQ(principal_eigenvalue(p).lambda1, *std::min_element(vals.begin(), vals.end()));
}

TEST(PrincipalEigenvalue, Errors) {
    const auto m = round_sphere(3, 101);
    SturmLiouvilleProblem neg{m, -1.0, RadialField::constant(m, 0.0)};
    EXPECT_THROW(principal_eigenvalue(neg), InvalidInput);
    auto cone = WarpedMetric::from_function(
        3, numerics::uniform_grid(0.0, pi, 101),
        [](double r) {
            const double s = std::abs(std::sin(r)) < 1e-15 ? 0.0 : 0.5 * std::sin(r);
            return Jet{s, 0.5 * std::cos(r), -0.5 * std::sin(r)};
        },
        Topology::TwoCaps);
    SturmLiouvilleProblem c{cone, 1.0, RadialField::constant(cone, 0.0)};
    EXPECT_THROW(principal_eigenvalue(c), ConeSingularity);
    SturmLiouvilleProblem mismatch{m, 1.0, RadialField(std::vector<double>(50, 0.0))};
    EXPECT_THROW(principal_eigenvalue(mismatch), GridMismatch);
}

TEST(PrincipalEigenvalue, FirstAngularSectorOnSphere) {
    // Degree-one harmonics on S^n have eigenvalue n; the radial sector has 0.
    for (int n : {3, 4}) {
        const auto m = round_sphere(n, 2049);
        SturmLiouvilleProblem p{m, 1.0, RadialField::constant(m, 0.0), Sector::FirstAngular};
        EXPECT_NEAR(principal_eigenvalue(p).extrapolated, n, 1e-6);
    }
}

TEST(PrincipalEigenvalue, PeriodicConstantPotential) {
    auto m = WarpedMetric::from_function(
        3, numerics::uniform_grid(0.0, 2.0 * pi, 513),
        [](double r) { return Jet{2.0 + std::cos(r), -std::sin(r), -std::cos(r)}; }, Topology::Periodic);
    SturmLiouvilleProblem p{m, 2.0, RadialField::constant(m, 1.25)};
    const auto res = principal_eigenvalue(p);
    EXPECT_NEAR(res.lambda1, 1.25, 1e-10);
    EXPECT_NEAR(res.eigenfunction.values().front(), res.eigenfunction.values().back(), 0.0);
}

TEST(RayleighQuotient, Examples) {
    const auto m = round_sphere(3, 4096);
    SturmLiouvilleProblem p{m, 1.0, RadialField::constant(m, 0.0)};
    std::vector<double> c;
    for (double r : m.grid()) c.push_back(std::cos(r));
    EXPECT_NEAR(rayleigh_quotient(p, RadialField(c)), 3.0, 1e-5);
    SturmLiouvilleProblem q{m, 1.0, RadialField::constant(m, 2.5)};
    EXPECT_NEAR(rayleigh_quotient(q, RadialField::constant(m, 1.0)), 2.5, 1e-13);
    EXPECT_THROW(rayleigh_quotient(q, RadialField::constant(m, 0.0)), InvalidInput);
}

TEST(PrincipalEigenvalue, MonotoneInPotential) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), bump(0.0, 0.5);
    const auto m = round_sphere(4, 513);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = coef(rng), b = coef(rng), c = bump(rng), d = bump(rng);
        std::vector<double> v1, v2;
        for (double r : m.grid()) {
            v1.push_back(a * std::cos(r) + b * std::cos(2.0 * r));
            v2.push_back(v1.back() + c + d * std::sin(r) * std::sin(r));
        }
        const double l1 = principal_eigenvalue({m, 1.0, RadialField(v1)}).lambda1;
        const double l2 = principal_eigenvalue({m, 1.0, RadialField(v2)}).lambda1;
        EXPECT_LE(l1, l2 + 1e-12);
        // Random phi never beats the eigenvalue.
        std::vector<double> phi;
        for (double r : m.grid()) phi.push_back(1.0 + 0.5 * a * std::cos(r) + 0.3 * c * std::cos(2.0 * r));
        EXPECT_GE(rayleigh_quotient({m, 1.0, RadialField(v1)}, RadialField(phi)), l1 - 1e-12);
    }
}

TEST(PrincipalEigenvalue, MonotoneInGammaWhenAboveMinPotential) {
    const auto m = round_sphere(3, 513);
    auto v = [](double r) { return 2.0 - 3.0 * std::cos(r) * std::cos(r); };
    double prev = -1e300;
    for (double gamma = 0.25; gamma <= 3.0; gamma += 0.25) {
        const double l = principal_eigenvalue({m, gamma, potential(m, v)}).lambda1;
        EXPECT_GE(l, prev - 1e-12);
        prev = l;
    }
}

TEST(VerifySpectralCondition, SphereOfRadiusLambda) {
    for (double lambda : {1.0, 4.0}) {
        const auto m = rescale(round_sphere(4, 2049), 1.0 / std::sqrt(lambda));
        const auto res = verify_spectral_condition(m, RadialField::constant(m, 1.0, FieldKind::Weight), 1.3, lambda);
        EXPECT_TRUE(res.holds);
        EXPECT_NEAR(res.worst_residual, 0.0, 1e-8);
    }
    const auto m = round_sphere(4, 257);
    EXPECT_FALSE(verify_spectral_condition(m, RadialField::constant(m, 1.0), 1.0, 1.1).holds);
}

TEST(VerifySpectralCondition, ScaleInvariance) {
    const auto m = round_sphere(3, 513);
    std::vector<double> u;
    for (double r : m.grid()) u.push_back(2.0 + std::cos(r));
    const RadialField field(u, FieldKind::Weight);
    for (double lambda : {0.5, 0.9, 1.2}) {
        const auto base = verify_spectral_condition(m, field, 1.0, lambda);
        for (double s : {0.01, 3.0, 1e4}) {
            const auto scaled = verify_spectral_condition(m, field.scaled(s), 1.0, lambda);
            EXPECT_EQ(scaled.holds, base.holds);
            EXPECT_NEAR(scaled.worst_residual, s * base.worst_residual, 1e-10 * s);
            EXPECT_NEAR(scaled.worst_relative, base.worst_relative, 1e-10);
        }
    }
}

TEST(CoercivityConstant, VanishesForConstantWeight) {
    // Constants lie in the kernel of both quadratic forms when u is constant.
    const auto m = round_sphere(3, 1025);
    const auto res = coercivity_constant(m, RadialField::constant(m, 1.0, FieldKind::Weight), 3.0, 2.0, 2.0);
    EXPECT_NEAR(res.lambda1, 0.0, 1e-10);
}
