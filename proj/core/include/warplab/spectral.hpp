#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "warplab/numerics.hpp"
#include "warplab/warped_metric.hpp"

namespace warplab::spectral {

// Radial: functions of r only. FirstAngular: the first spherical harmonic
// sector, which adds gamma (n-1)/w^2 to the potential and vanishes at poles.
enum class Sector { Radial, FirstAngular };

struct SturmLiouvilleProblem {
    geometry::WarpedMetric metric;
    double gamma;
    geometry::RadialField potential;
    Sector sector = Sector::Radial;
};

struct GridLevel {
    std::size_t points;
    double lambda1;
};

struct SpectralResult {
    double lambda1;
    double extrapolated;
    geometry::RadialField eigenfunction;  // positive, sum B_i phi_i^2 = 1
    std::vector<GridLevel> grid_levels;   // coarse to fine
};

struct SolveOptions {
    // Number of nested grids (strides 4, 2, 1); 1 disables refinement.
    int levels = 3;
    int max_inverse_iterations = 50;
    double inverse_tolerance = 1e-12;
};

// weight * (ca y[a] - cb y[b])^2; b == a with cb == 0 pins the neighbour to 0.
struct Face {
    std::size_t a;
    std::size_t b;
    double weight;
    double ca = 1.0;
    double cb = 1.0;
};

// Generalized symmetric pencil A y = lambda diag(mass) y. The quadratic form
// y^T A y is kept as a sum of face terms plus a diagonal so that Rayleigh
// quotients avoid the cancellation of the assembled matrix.
struct Pencil {
    std::vector<Face> faces;
    std::vector<double> diagonal;    // V_i * mass_i
    std::vector<double> mass;
    std::vector<std::size_t> nodes;  // grid index of each unknown
    numerics::SymmetricTridiagonal stiffness;

    Pencil(std::vector<Face> faces, std::vector<double> diagonal, std::vector<double> mass,
           std::vector<std::size_t> nodes);

    double quadratic_form(std::span<const double> y) const;
    double mass_norm2(std::span<const double> y) const;
};

struct EigenPair {
    double value;
    std::vector<double> vector;  // in the original (unsymmetrized) variables
};

// Finite-volume pencil for -gamma Delta + V on the nodes of the metric
// selected by `stride` (endpoints always kept).
Pencil assemble(const geometry::WarpedMetric& metric, double gamma,
                std::span<const double> potential, std::size_t stride = 1,
                Sector sector = Sector::Radial);

// Smallest eigenpair by Sturm bisection and inverse iteration.
EigenPair lowest_eigenpair(const Pencil& pencil, const SolveOptions& options = {});

SpectralResult principal_eigenvalue(const SturmLiouvilleProblem& problem,
                                    const SolveOptions& options = {});

// Discrete quadratic form ratio, bounded below by the discrete lambda1.
double rayleigh_quotient(const SturmLiouvilleProblem& problem, const geometry::RadialField& phi);

struct VerifyOptions {
    double tolerance = 1e-6;  // on min R/u
    double r_min = -std::numeric_limits<double>::infinity();
    double r_max = std::numeric_limits<double>::infinity();
};

struct ConditionCheck {
    bool holds;
    double worst_residual;  // min R, scales with u
    double worst_relative;  // min R/u
    double location;
    std::vector<double> residual;  // R on the whole grid
};

// R = u ric_min - gamma Delta u - (n-1) lambda u.
ConditionCheck verify_spectral_condition(const geometry::WarpedMetric& metric,
                                         const geometry::RadialField& u, double gamma,
                                         double lambda, const VerifyOptions& options = {});

// inf over v of [(gamma-gamma0) int v'^2 + beta int ((v/u)')^2] / int v^2,
// all against w^{n-1} dr.
SpectralResult coercivity_constant(const geometry::WarpedMetric& metric,
                                   const geometry::RadialField& u, double gamma, double gamma0,
                                   double beta, const SolveOptions& options = {});

}  // namespace warplab::spectral
