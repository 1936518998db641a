#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace warplab::geometry {

enum class Topology { TwoCaps, Periodic, Cylinder };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

enum class FieldKind { Weight, Potential, Prescription, Generic };

std::string to_string(FieldKind k);
FieldKind field_kind_from_string(const std::string& s);

// Value and first two derivatives of a scalar function of r.
struct Jet {
    double value;
    double d1;
    double d2;
};

using RadialFunction = std::function<Jet(double)>;

// dr^2 + w(r)^2 g_{S^{n-1}} sampled on a strictly increasing grid.
//
// Warp derivatives are either registered by the caller or taken from a C^2
// cubic spline (natural ends at poles, periodic wrap, not-a-knot for a
// cylinder). For Periodic metrics the last sample duplicates the first.
class WarpedMetric {
public:
    WarpedMetric(int n, std::vector<double> grid, std::vector<double> warp, Topology topology);
    WarpedMetric(int n, std::vector<double> grid, std::vector<double> warp,
                 std::vector<double> warp_d1, std::vector<double> warp_d2, Topology topology);

    static WarpedMetric from_function(int n, std::vector<double> grid, const RadialFunction& w,
                                      Topology topology);

    int dimension() const { return n_; }
    Topology topology() const { return topology_; }
    std::size_t size() const { return grid_.size(); }
    bool derivatives_registered() const { return registered_; }

    std::span<const double> grid() const { return grid_; }
    std::span<const double> warp() const { return warp_; }
    std::span<const double> warp_d1() const { return d1_; }
    std::span<const double> warp_d2() const { return d2_; }

    double front() const { return grid_.front(); }
    double back() const { return grid_.back(); }
    double length() const { return grid_.back() - grid_.front(); }
    double max_warp() const;
    double min_warp() const;  // over interior points for TwoCaps

    // True when the point is a pole (w = 0 at a TwoCaps end).
    bool is_pole(std::size_t i) const;

    // Largest | |w'| - 1 | over the poles; 0 for other topologies.
    double cap_slope_defect() const;

private:
    void validate() const;

    int n_;
    std::vector<double> grid_;
    std::vector<double> warp_;
    std::vector<double> d1_;
    std::vector<double> d2_;
    Topology topology_;
    bool registered_;
};

// Scalar function of r sampled on a metric's grid.
class RadialField {
public:
    explicit RadialField(std::vector<double> values, FieldKind kind = FieldKind::Generic);
    RadialField(std::vector<double> values, std::vector<double> d1, std::vector<double> d2,
                FieldKind kind = FieldKind::Generic);

    static RadialField from_function(const WarpedMetric& metric, const RadialFunction& f,
                                     FieldKind kind = FieldKind::Generic);
    static RadialField constant(const WarpedMetric& metric, double c,
                                FieldKind kind = FieldKind::Generic);

    std::size_t size() const { return values_.size(); }
    FieldKind kind() const { return kind_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    bool has_derivatives() const { return d1_.has_value(); }
    std::span<const double> d1() const;
    std::span<const double> d2() const;

    double min() const;
    double max() const;
    RadialField scaled(double s) const;

private:
    std::vector<double> values_;
    std::optional<std::vector<double>> d1_;
    std::optional<std::vector<double>> d2_;
    FieldKind kind_;
};

// First and second derivatives of a field on the metric's grid: registered
// ones when present, otherwise a spline fit with ends matching the topology
// (even at poles, periodic wrap, not-a-knot on a cylinder).
struct FieldDerivatives {
    std::vector<double> d1;
    std::vector<double> d2;
};
FieldDerivatives derivatives(const WarpedMetric& metric, const RadialField& u);

struct PointCurvature {
    double ric_radial;
    double ric_tangential;
    double ric_min;
    double sect_mixed;
    double sect_tangential;
    double biric_min;
};

PointCurvature pointwise_curvature(int n, double w, double dw, double d2w);

struct CurvatureProfile {
    std::vector<double> r;
    std::vector<double> ric_radial;
    std::vector<double> ric_tangential;
    std::vector<double> ric_min;
    std::vector<double> sect_mixed;
    std::vector<double> sect_tangential;
    std::vector<double> biric_min;
};

inline constexpr double default_cap_tolerance = 1e-5;

// Throws ConeSingularity when a pole has | |w'| - 1 | > tol.
void require_smooth_caps(const WarpedMetric& metric, double tol = default_cap_tolerance);

CurvatureProfile curvature_profile(const WarpedMetric& metric,
                                   double cap_tol = default_cap_tolerance);

RadialField laplacian_radial(const WarpedMetric& metric, const RadialField& u);

// vol(S^{n-1}) * int u^p w^{n-1} dr.
double weighted_volume(const WarpedMetric& metric, const RadialField& u, double p);
double volume(const WarpedMetric& metric);

struct DiameterEstimate {
    double value;
    bool exact;  // false: certified lower bound
};

DiameterEstimate diameter_estimate(const WarpedMetric& metric);

WarpedMetric rescale(const WarpedMetric& metric, double c);

// Standard models on uniform grids.
WarpedMetric round_sphere(int n, std::size_t points, double radius = 1.0);
WarpedMetric hyperbolic_ball(int n, std::size_t points, double radius);
WarpedMetric euclidean_ball(int n, std::size_t points, double radius);

}  // namespace warplab::geometry
