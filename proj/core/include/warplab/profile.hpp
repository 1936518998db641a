#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "warplab/warped_metric.hpp"

namespace warplab::profile {

// Samples (v_j, I_j) of an isoperimetric-type profile. v_total may be
// +infinity when the total weighted volume is unknown or infinite.
struct ProfileCurve {
    std::vector<double> v;
    std::vector<double> I;
    int n = 3;
    double lambda = 1.0;
    double gamma = 0.0;
    double alpha = 0.0;
    double v_total = std::numeric_limits<double>::infinity();
    bool upper_bound = false;  // centered balls only: I is bounded above by these values
};

// Throws InvalidInput unless v is strictly increasing, I >= 0, sizes agree.
void validate(const ProfileCurve& curve);

// I_zeta(zeta int_0^r mu^{n-1}) = zeta mu(r)^{n-1}, mu(r) = sin(sqrt(lambda) r)/sqrt(lambda).
class ModelProfile {
public:
    ModelProfile(double zeta, double lambda, int n);

    double zeta() const { return zeta_; }
    double lambda() const { return lambda_; }
    int dimension() const { return n_; }
    double v_total() const { return v_total_; }

    // zeta int_0^r mu^{n-1}, r in [0, pi/sqrt(lambda)].
    double volume_at(double r) const;
    // Inverse of volume_at; throws RangeError outside [0, V_zeta].
    double radius_of_volume(double v) const;

    double operator()(double v) const;
    double psi(double v) const;  // I^{n/(n-1)}

    // Uniform samples in v including both endpoints.
    ProfileCurve sample(std::size_t points) const;

private:
    double zeta_;
    double lambda_;
    int n_;
    double v_total_;
};

// Centered-ball profile of a TwoCaps metric around the left pole:
// v(r) = |S^{n-1}| int_0^r u^alpha w^{n-1}, I(r) = |S^{n-1}| u(r)^gamma w(r)^{n-1},
// alpha = 2 gamma/(n-1).
ProfileCurve radial_weighted_profile(const geometry::WarpedMetric& metric,
                                     const geometry::RadialField& u, double gamma,
                                     double lambda = 1.0);

struct ResidualSample {
    std::vector<double> v;
    std::vector<double> residual;
    double worst = 0;  // max residual
};

// Share of the v-range dropped at each end before differencing.
inline constexpr double default_trim = 0.05;

// I I'' + I'^2/(n-1) + (n-1) lambda on a uniform v-grid (the curve is
// resampled by a cubic spline when its v are not uniform), 5-point stencils.
ResidualSample viscosity_residual(const ProfileCurve& curve, double trim = default_trim);

struct PsiCurve {
    std::vector<double> v;
    std::vector<double> psi;
    ResidualSample residual;  // psi'' + lambda n psi^{(2-n)/n}
};

PsiCurve psi_transform(const ProfileCurve& curve, double trim = default_trim);

struct SmallVolumeFit {
    double coefficient;
    double bound;  // n |B^n|^{1/n}
    bool ok;
    std::size_t samples;
};

// Fit of I(v) / v^{(n-1)/n} on the smallest decade of positive v. With four
// or more samples the next-order term v^{2/n} is fitted as well.
SmallVolumeFit small_volume_asymptotic(const ProfileCurve& curve, double rel_tol = 1e-3);

enum class VerdictStatus { Holds, Contradiction, NotApplicable };
std::string to_string(VerdictStatus s);
VerdictStatus verdict_status_from_string(const std::string& s);

struct ComparisonOptions {
    double residual_tol = 1e-4;   // scaled by max(1, (n-1) lambda)
    double volume_rel_tol = 1e-8;
    double trim = default_trim;
};

struct ComparisonVerdict {
    VerdictStatus status;
    bool volume_ok;
    double v_measured;
    double v_bound;  // lambda^{-n/2} |S^n|
    double worst_residual;
    SmallVolumeFit asymptotic;
    std::string reason;
};

// Holds: barrier inequality, small-volume bound and V <= V_bound all hold.
// Contradiction: the barrier inequality holds yet V > V_bound.
// NotApplicable: the barrier inequality fails, or the small-volume bound
// fails while V <= V_bound.
ComparisonVerdict comparison_verdict(const ProfileCurve& curve, const ComparisonOptions& options = {});

}  // namespace warplab::profile
