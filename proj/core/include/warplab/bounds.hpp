#pragma once

#include <string>

namespace warplab::geometry {
class WarpedMetric;
}

namespace warplab::bounds {

// Volume of the unit round n-sphere and of the unit n-ball.
double vol_round_sphere(int n);
double vol_round_ball(int n);

enum class BoundKind { Diameter, Volume };

std::string to_string(BoundKind k);
BoundKind bound_kind_from_string(const std::string& s);

struct BoundVerdict {
    BoundKind kind;
    double lhs;
    double rhs;
    double slack;  // rhs - lhs
    bool rigid;
};

inline constexpr double rigidity_tolerance = 1e-6;

BoundVerdict make_verdict(BoundKind kind, double lhs, double rhs,
                          double rel_tol = rigidity_tolerance);

// pi / sqrt(lambda) * (u_max / u_min)^{gamma (n-3)/(n-1)}.
// Throws RangeError outside 0 <= gamma <= (n-1)/(n-2).
double diameter_bound_rhs(int n, double gamma, double lambda, double u_max, double u_min);

// lambda^{-n/2} vol(S^n).
double volume_bound_rhs(int n, double lambda);

BoundVerdict volume_verdict(const geometry::WarpedMetric& metric, double lambda);

// Diameter of the metric (exact or lower bound) against the bound for the
// given weight extremes.
BoundVerdict diameter_verdict(const geometry::WarpedMetric& metric, double gamma, double lambda,
                              double u_max, double u_min);

// (6-n)/4 - (4-n)^2 gamma / (4 (4-(n-2) gamma)), with c(4, 2) = 1/2.
double c_coefficient(int n, double gamma);

// LHS - RHS of
//   (6-n)/4 h^2 - (4-n)/2 gamma h Y + (gamma - (n-2) gamma^2/4) Y^2
//     = c(n,gamma) h^2 + (gamma - (n-2) gamma^2/4) ((4-n) h/(4-(n-2) gamma) - Y)^2.
double grouping_identity_residual(int n, double gamma, double h, double y);

struct GammaRange {
    bool sharp;
    bool universal_diameter;
};

GammaRange gamma_range_check(int n, double gamma);

}  // namespace warplab::bounds
