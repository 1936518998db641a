// Acceptance checks 1-9. One PASS/FAIL line per criterion; exit status 1 if
// any fails. Reference values come from closed forms computed here, not from
// the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "warplab/bounds.hpp"
#include "warplab/counterexamples.hpp"
#include "warplab/errors.hpp"
#include "warplab/profile.hpp"
#include "warplab/spectral.hpp"
#include "warplab/warped_metric.hpp"

using namespace warplab;

namespace {

constexpr double pi = std::numbers::pi;

double sphere_volume(int n) { return 2 * std::pow(pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0); }
double ball_volume(int n) { return std::pow(pi, n / 2.0) / std::tgamma(n / 2.0 + 1); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Result {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

geometry::RadialField sampled(const geometry::WarpedMetric& m, const std::function<double(double)>& v) {
    std::vector<double> out;
    for (double r : m.grid()) out.push_back(v(r));
    return geometry::RadialField(out, geometry::FieldKind::Potential);
}

// 1. lambda1(-gamma Laplacian + Ric) = n-1 on the unit sphere. The Ricci
// potential makes the discrete problem exact at every level, so the order is
// read off the same spheres with a smooth non-constant potential.
Result sphere_spectral_closure() {
    double worst_err = 0, worst_time = 0, worst_order_dev = 0;
    for (int n : {3, 4, 5}) {
        const auto t_metric = std::chrono::steady_clock::now();
        const auto m = geometry::round_sphere(n, 4096);
        const geometry::RadialField ric(geometry::curvature_profile(m).ric_min, geometry::FieldKind::Potential);
        const double metric_time = seconds_since(t_metric);
        for (double gamma : {0.0, 1.0, (n - 1.0) / (n - 2.0)}) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = spectral::principal_eigenvalue({m, gamma, ric});
            worst_time = std::max(worst_time, metric_time + seconds_since(t0));
            worst_err = std::max(worst_err, std::abs(res.lambda1 - (n - 1)));
            if (gamma == 0.0) continue;  // multiplication operator, nothing to converge
            const auto bumped =
                spectral::principal_eigenvalue({m, gamma, sampled(m, [n](double r) { return n - 1 - 2 * std::cos(2 * r); })});
            const auto& g = bumped.grid_levels;
            if (g.size() != 3) return {false, "expected 3 grid levels"};
            const double order = std::log2((g[0].lambda1 - g[1].lambda1) / (g[1].lambda1 - g[2].lambda1));
            worst_order_dev = std::max(worst_order_dev, std::abs(order - 2));
        }
    }
    const bool pass = worst_err <= 1e-6 && worst_order_dev <= 0.2 && worst_time < 5;
    return {pass, "max|lambda1-(n-1)|=" + fmt("%.2e", worst_err) + " max|order-2|=" + fmt("%.3f", worst_order_dev) +
                      " worst case " + fmt("%.3f", worst_time) + " s"};
}

// 2. Round sphere of radius lambda^{-1/2} is the equality case.
Result volume_rigidity() {
    double worst = 0, worst_rhs = 0;
    bool rigid = true;
    for (double lambda : {1.0, 4.0}) {
        for (int n : {3, 4, 5}) {
            const auto m = geometry::round_sphere(n, 4096, 1 / std::sqrt(lambda));
            const auto v = bounds::volume_verdict(m, lambda);
            const double rhs = std::pow(lambda, -n / 2.0) * sphere_volume(n);
            worst_rhs = std::max(worst_rhs, std::abs(v.rhs - rhs) / rhs);
            worst = std::max(worst, std::abs(v.slack) / v.rhs);
            rigid = rigid && v.rigid;
        }
    }
    return {worst <= 1e-6 && rigid && worst_rhs <= 1e-14,
            "max|slack|/rhs=" + fmt("%.2e", worst) + " rhs vs Gamma form " + fmt("%.1e", worst_rhs) +
                " rigid=" + (rigid ? "true" : "false")};
}

// 3. Sphere diameter equals the bound; n = 3 exponent vanishes.
Result diameter_sanity() {
    double worst = 0;
    for (double lambda : {1.0, 4.0}) {
        for (int n : {3, 4, 5}) {
            const auto m = geometry::round_sphere(n, 4096, 1 / std::sqrt(lambda));
            const auto d = geometry::diameter_estimate(m);
            if (!d.exact) return {false, "sphere diameter not exact"};
            const double rhs = bounds::diameter_bound_rhs(n, 1.0, lambda, 1.0, 1.0);
            worst = std::max({worst, std::abs(d.value - rhs) / rhs, std::abs(rhs - pi / std::sqrt(lambda)) / rhs});
        }
    }
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> log_ratio(0, 12), gam(0, 2);
    bool flat = true;
    for (int i = 0; i < 10000; ++i) {
        const double ratio = std::pow(10.0, log_ratio(rng));
        flat = flat && bounds::diameter_bound_rhs(3, gam(rng), 1.0, ratio, 1.0) == pi;
    }
    return {worst <= 4 * std::numeric_limits<double>::epsilon() && flat,
            "max rel gap=" + fmt("%.1e", worst) + " n=3 ratio-independent=" + (flat ? "true" : "false")};
}

// 4. Large-diameter construction at n = 5, gamma = 1.25, L = 10.
Result large_diameter() {
    const auto t0 = std::chrono::steady_clock::now();
    counterexamples::LargeDiameterParams p;
    p.n = 5;
    p.gamma = 1.25;
    p.L = 10;
    const auto rep = counterexamples::build_large_diameter_metric(p);
    const double elapsed = seconds_since(t0);

    // Reflection r -> -r on the assembled arrays: w, u even; w' odd.
    const auto r = rep.metric.grid();
    const auto w = rep.metric.warp();
    const auto w1 = rep.metric.warp_d1();
    const auto u = rep.u.values();
    const std::size_t N = r.size();
    const double wmax = *std::max_element(w.begin(), w.end());
    const double umax = *std::max_element(u.begin(), u.end());
    double sym = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t j = N - 1 - i;
        sym = std::max({sym, std::abs(r[i] + r[j]) / r[N - 1], std::abs(w[i] - w[j]) / wmax, std::abs(w1[i] + w1[j]),
                        std::abs(u[i] - u[j]) / umax});
    }
    sym = std::max(sym, rep.diagnostics.at("symmetry_error"));

    const bool pass = rep.diameter > 2 * p.L && rep.lambda1.lambda1 >= 4 - 1e-3 && rep.residual_identity <= 1e-6 &&
                      sym <= 1e-8 && elapsed < 60;
    return {pass, "diameter=" + fmt("%.6f", rep.diameter) + " lambda1=" + fmt("%.6f", rep.lambda1.lambda1) +
                      " identity=" + fmt("%.1e", rep.residual_identity) + " symmetry=" + fmt("%.1e", sym) + " " +
                      fmt("%.2f", elapsed) + " s"};
}

// 5. Periodic example on n = 3, f = 2 + cos r.
Result supercritical() {
    counterexamples::SupercriticalParams p;
    p.n = 3;
    p.gamma = 2.5;
    p.f = {2.0, 1.0, 1};
    const auto full = counterexamples::build_supercritical_example(p);
    p.grid = (p.grid + 1) / 2;
    const auto half = counterexamples::build_supercritical_example(p);

    // -gamma0 Laplacian u + Ric u = 0 for u = f^{-1}, w = eps f, from closed-form derivatives.
    const double gamma0 = 2.0, eps = full.epsilon;
    double identity = 0, scale = 0;
    for (double r : full.metric.grid()) {
        const double f = 2 + std::cos(r), f1 = -std::sin(r), f2 = -std::cos(r);
        const double w = eps * f, w1 = eps * f1, w2 = eps * f2;
        const double uu = 1 / f, u1 = -f1 / (f * f), u2 = 2 * f1 * f1 / (f * f * f) - f2 / (f * f);
        const double lap = u2 + 2 * (w1 / w) * u1;
        const double ric = std::min(-2 * w2 / w, (1 - w1 * w1) / (w * w) - w2 / w);
        identity = std::max(identity, std::abs(-gamma0 * lap + ric * uu));
        scale = std::max(scale, gamma0 * std::abs(lap) + std::abs(ric * uu));
    }
    identity = std::max(identity / scale, full.residual_identity);

    const double l1 = full.lambda1.lambda1, c = full.coercivity->lambda1;
    const double dl = std::abs(l1 - half.lambda1.lambda1), dc = std::abs(c - half.coercivity->lambda1);
    const bool pass = identity <= 1e-8 && l1 > 0 && l1 >= c - 1e-6 && dl <= 1e-6 && dc <= 1e-6;
    return {pass, "identity=" + fmt("%.1e", identity) + " lambda1=" + fmt("%.8f", l1) + " c(M)=" + fmt("%.8f", c) +
                      " halving gaps " + fmt("%.1e", dl) + "/" + fmt("%.1e", dc)};
}

// 6. Model profile with zeta = vol(S^{n-1}), lambda = 1.
Result model_profile() {
    double vol_err = 0, worst_res = 0, slope_err = 0;
    for (int n : {3, 4, 5}) {
        const double zeta = sphere_volume(n - 1);
        const profile::ModelProfile model(zeta, 1.0, n);
        vol_err = std::max(vol_err, std::abs(model.v_total() - sphere_volume(n)) / sphere_volume(n));
        worst_res = std::max(worst_res, profile::viscosity_residual(model.sample(4096)).worst);

        // least squares psi = s v + t v^{1+2/n} on v in (0, 1e-6 V]; the
        // correction comes from mu(r)^{n-1} = r^{n-1}(1 + O(r^2)).
        const double h = 1e-6 * model.v_total() / 40;
        double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
        for (int j = 1; j <= 40; ++j) {
            const double v = j * h, y = model.psi(v), q = std::pow(v, 1 + 2.0 / n);
            a11 += v * v;
            a12 += v * q;
            a22 += q * q;
            b1 += v * y;
            b2 += q * y;
        }
        const double s = (b1 * a22 - b2 * a12) / (a11 * a22 - a12 * a12);
        const double expected = n * std::pow(zeta, 1.0 / (n - 1));
        slope_err = std::max(slope_err, std::abs(s - expected) / expected);
    }
    return {vol_err <= 1e-10 && worst_res <= 1e-4 && slope_err <= 1e-3,
            "volume err=" + fmt("%.1e", vol_err) + " residual=" + fmt("%.1e", worst_res) +
                " psi slope err=" + fmt("%.1e", slope_err)};
}

// 7. Stretched model 1.1 I(v/1.1) has V = 1.1 V_bound and the same barrier residual.
Result comparison_detector() {
    std::string detail;
    bool pass = true;
    for (int n : {3, 4, 5}) {
        const profile::ModelProfile model(sphere_volume(n - 1), 1.0, n);
        auto curve = model.sample(4096);
        const auto truth = profile::comparison_verdict(curve);
        for (auto& v : curve.v) v *= 1.1;
        for (auto& i : curve.I) i *= 1.1;
        curve.v_total *= 1.1;
        const auto stretched = profile::comparison_verdict(curve);
        pass = pass && truth.status == profile::VerdictStatus::Holds &&
               std::abs(truth.v_measured - truth.v_bound) <= 1e-10 * truth.v_bound &&
               stretched.status == profile::VerdictStatus::Contradiction;
        if (n == 3) {
            detail = "true model " + profile::to_string(truth.status) + ", stretched " +
                     profile::to_string(stretched.status) + " (V/V_bound=" +
                     fmt("%.4f", stretched.v_measured / stretched.v_bound) + ")";
        }
    }
    return {pass, detail};
}

// 8. Grouping identity, c(n, gamma) special values, coupling constants.
Result algebraic_identities() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> unit(0, 1), sym(-1, 1);
    double grouping = 0;
    for (int i = 0; i < 100000; ++i) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const double gamma = (n == 4 ? 2.0 : 6.0 - n) * unit(rng);
        grouping = std::max(grouping, std::abs(bounds::grouping_identity_residual(n, gamma, sym(rng), sym(rng))));
    }
    const bool specials = bounds::c_coefficient(4, 2.0) == 0.5 && bounds::c_coefficient(3, 3.0) == 0.0 &&
                          bounds::c_coefficient(5, 1.0) == 0.0;

    double coupling = 0;
    bool threshold = true;
    for (int n = 4; n <= 8; ++n) {
        const long double m = n - 1;
        for (int k = 1; k <= 50; ++k) {
            const double lo = 4.0 / (n - 1), hi = (n - 1.0) / (n - 2.0);
            const double gamma = lo + (hi - lo) * k / 50.0;
            const auto ab = counterexamples::solve_coupling_constants(n, gamma);
            const long double g = gamma, alpha = 2 * g / m;
            const long double K = (g - (n - 2) * g * g / m) / ((g - alpha) * (g - alpha));
            const long double a = ab.a, b = ab.b;
            const long double res = -a * a / m - K * b * b - m + a * b;
            coupling = std::max(coupling, static_cast<double>(std::fabs(res)));
            if (!(ab.a > 0 && ab.b > 0)) coupling = INFINITY;
        }
        try {
            counterexamples::solve_coupling_constants(n, 4.0 / (n - 1));
            threshold = false;
        } catch (const NoSolution&) {
        }
    }
    return {grouping <= 1e-12 && specials && coupling <= 1e-12 && threshold,
            "grouping=" + fmt("%.1e", grouping) + " c(4,2)=1/2,c(n,6-n)=0: " + (specials ? "yes" : "no") +
                " coupling=" + fmt("%.1e", coupling) + " NoSolution at 4/(n-1): " + (threshold ? "yes" : "no")};
}

// 9. Small-volume coefficient of the sphere profile.
Result small_volume() {
    double worst = 0;
    for (int n : {3, 4, 5}) {
        const auto m = geometry::round_sphere(n, 4096);
        const auto u = geometry::RadialField::constant(m, 1.0, geometry::FieldKind::Weight);
        const auto curve = profile::radial_weighted_profile(m, u, 0.0);
        const auto fit = profile::small_volume_asymptotic(curve);
        const double expected = n * std::pow(ball_volume(n), 1.0 / n);
        worst = std::max(worst, std::abs(fit.coefficient - expected) / expected);
    }
    return {worst <= 1e-3, "max rel err=" + fmt("%.1e", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Result (*)()>> criteria = {
        {"sphere spectral closure", sphere_spectral_closure},
        {"volume rigidity", volume_rigidity},
        {"diameter bound sanity", diameter_sanity},
        {"large-diameter counterexample", large_diameter},
        {"supercritical example", supercritical},
        {"model-profile equality", model_profile},
        {"comparison detector", comparison_detector},
        {"algebraic identities", algebraic_identities},
        {"small-volume asymptotics", small_volume},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("threw: ") + e.what()};
        }
        failed += !r.pass;
        std::printf("%s %zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, r.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
