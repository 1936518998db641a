#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warplab/spectral.hpp"
#include "warplab/warped_metric.hpp"

namespace warplab::counterexamples {

struct CouplingConstants {
    double a;
    double b;
    double k;      // (gamma - (n-2) gamma^2/(n-1)) / (gamma - alpha)^2
    double alpha;  // 2 gamma / (n-1)
};

// Positive (a, b) with -a^2/(n-1) - k b^2 - (n-1) + a b = 0:
// b = 1.1 * 2/sqrt(1 - 4k/(n-1)), a the smaller root. Throws NoSolution
// when gamma <= 4/(n-1).
CouplingConstants solve_coupling_constants(int n, double gamma);

// Residual of the defining quadratic at (a, b).
double coupling_residual(int n, double gamma, double a, double b);

// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 clamped to [0, 1], its first two
// derivatives and its antiderivative from 0.
double smoothstep(double t);
double smoothstep_d1(double t);
double smoothstep_d2(double t);
double smoothstep_integral(double t);

struct LargeDiameterParams {
    int n = 5;
    double gamma = 1.25;
    double L = 10.0;
    double ode_tol = 1e-12;
    double delta_search_tol = 1e-12;
    std::size_t grid = 8193;    // nodes on the unsmoothed core [-r_s, r_s]
    std::size_t cap_nodes = 32;  // nodes on each glued cap
    double collar_fraction = 0.05;
    int max_smoothing_retries = 8;
    double mu_start = 1.0;
    int max_mu_halvings = 40;
    double epsilon_start = 1.0;
    int max_epsilon_halvings = 60;
};

void validate(const LargeDiameterParams& p);

// The cutoff eta for given delta and mu (even in r).
struct Cutoff {
    double delta;
    double mu;
    double L;
    double value(double r) const;
    double d1(double r) const;       // d/dr of eta(|r|) for r > 0 side; odd extension
    double integral(double r) const; // int_0^{|r|} eta
};

struct QSample {
    double r;
    double q;
};

struct DeltaSearch {
    double delta;
    double delta0;         // blow-up threshold: Q(2 delta) -> -inf as delta -> delta0
    double q_small;        // Q(2 delta) at the lower bracket end
    double q_at_delta;     // Q(2 delta) at the returned delta
    int iterations;
    std::vector<QSample> trajectory;  // Q on [0, 2 delta]
};

// Bisection on delta -> Q(2 delta) + a with mu irrelevant (eta vanishes
// past 2 delta only later). Throws ConvergenceError when no bracket is found.
DeltaSearch find_delta(const LargeDiameterParams& params, const CouplingConstants& ab);

struct ConstructionReport {
    std::string kind;
    int n;
    double gamma;
    geometry::WarpedMetric metric;
    geometry::RadialField u;
    double delta;
    double mu;
    double a;
    double b;
    double r0;
    double epsilon;
    double residual_identity;
    spectral::SpectralResult lambda1;
    double diameter;
    bool diameter_exact;
    std::optional<spectral::SpectralResult> coercivity;
    std::map<std::string, double> diagnostics;
};

ConstructionReport build_large_diameter_metric(const LargeDiameterParams& params);

// f(r) = base + amplitude cos(frequency r), periodic with period 2 pi/frequency.
struct PeriodicWarp {
    double base = 2.0;
    double amplitude = 1.0;
    int frequency = 1;
    geometry::Jet operator()(double r) const;
    double period() const;
};

struct SupercriticalParams {
    int n = 3;
    double gamma = 2.5;
    PeriodicWarp f{};
    double epsilon = 1.0;  // starting value, halved while needed
    std::size_t grid = 4097;
    int max_epsilon_halvings = 60;
};

ConstructionReport build_supercritical_example(const SupercriticalParams& params);

}  // namespace warplab::counterexamples
