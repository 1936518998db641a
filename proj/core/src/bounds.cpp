#include "warplab/bounds.hpp"

#include <cmath>
#include <numbers>

#include "warplab/errors.hpp"
#include "warplab/warped_metric.hpp"

namespace warplab::bounds {

double vol_round_sphere(int n) {
    if (n < 0) throw InvalidInput("sphere dimension must be nonnegative");
    const double m = 0.5 * (n + 1);
    return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

double vol_round_ball(int n) {
    if (n < 1) throw InvalidInput("ball dimension must be positive");
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

std::string to_string(BoundKind k) { return k == BoundKind::Diameter ? "Diameter" : "Volume"; }

BoundKind bound_kind_from_string(const std::string& s) {
    if (s == "Diameter") return BoundKind::Diameter;
    if (s == "Volume") return BoundKind::Volume;
    throw InvalidInput("unknown bound kind '" + s + "'");
}

BoundVerdict make_verdict(BoundKind kind, double lhs, double rhs, double rel_tol) {
    const double slack = rhs - lhs;
    return {kind, lhs, rhs, slack, std::abs(slack) <= rel_tol * std::abs(rhs)};
}

double diameter_bound_rhs(int n, double gamma, double lambda, double u_max, double u_min) {
    if (n < 3) throw InvalidInput("diameter bound needs n >= 3");
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    if (!(u_min > 0.0) || !(u_max >= u_min)) throw InvalidInput("need u_max >= u_min > 0");
    if (!(gamma >= 0.0) || gamma > (n - 1.0) / (n - 2.0))
        throw RangeError("gamma outside [0, (n-1)/(n-2)]");
    const double exponent = gamma * (n - 3) / (n - 1);
    return std::numbers::pi / std::sqrt(lambda) * std::pow(u_max / u_min, exponent);
}

double volume_bound_rhs(int n, double lambda) {
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    return std::pow(lambda, -0.5 * n) * vol_round_sphere(n);
}

BoundVerdict volume_verdict(const geometry::WarpedMetric& metric, double lambda) {
    return make_verdict(BoundKind::Volume, geometry::volume(metric),
                        volume_bound_rhs(metric.dimension(), lambda));
}

BoundVerdict diameter_verdict(const geometry::WarpedMetric& metric, double gamma, double lambda,
                              double u_max, double u_min) {
    return make_verdict(BoundKind::Diameter, geometry::diameter_estimate(metric).value,
                        diameter_bound_rhs(metric.dimension(), gamma, lambda, u_max, u_min));
}

double c_coefficient(int n, double gamma) {
    if (n == 4) return 0.5;  // second term vanishes; c(4, 2) := 1/2 as well
    const double denom = 4.0 - (n - 2) * gamma;
    if (denom == 0.0) throw RangeError("c(n, gamma) is singular at gamma = 4/(n-2)");
    return (6.0 - n) / 4.0 - (4.0 - n) * (4.0 - n) * gamma / (4.0 * denom);
}

double grouping_identity_residual(int n, double gamma, double h, double y) {
    const double denom = 4.0 - (n - 2) * gamma;
    const double q = gamma - (n - 2) * gamma * gamma / 4.0;
    const double lhs = (6.0 - n) / 4.0 * h * h - (4.0 - n) / 2.0 * gamma * h * y + q * y * y;
    double vertex = 0.0;
    if (n != 4) {
        if (denom == 0.0) throw RangeError("grouping identity is singular at gamma = 4/(n-2)");
        vertex = (4.0 - n) * h / denom;
    }
    const double rhs = c_coefficient(n, gamma) * h * h + q * (vertex - y) * (vertex - y);
    return lhs - rhs;
}

GammaRange gamma_range_check(int n, double gamma) {
    if (n < 3) throw InvalidInput("gamma range needs n >= 3");
    GammaRange g{};
    g.sharp = gamma >= 0.0 && gamma <= (n - 1.0) / (n - 2.0);
    g.universal_diameter = gamma >= 0.0 && (n == 3 ? gamma <= 2.0 : gamma < 4.0 / (n - 1.0));
    return g;
}

}  // namespace warplab::bounds
