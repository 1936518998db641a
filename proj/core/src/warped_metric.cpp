#include "warplab/warped_metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warplab/bounds.hpp"
#include "warplab/errors.hpp"
#include "warplab/numerics.hpp"

namespace warplab::geometry {

namespace {

constexpr double zero_warp_rel = 1e-12;

bool finite_all(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

numerics::SplineEnd warp_end(const WarpedMetric& m, bool left) {
    const std::size_t i = left ? 0 : m.size() - 1;
    if (m.topology() == Topology::Periodic) return numerics::SplineEnd::periodic();
    if (m.is_pole(i)) return numerics::SplineEnd::natural();
    return numerics::SplineEnd::not_a_knot();
}

// Limit at a pole of a quantity that is smooth and even in the distance s
// to the pole, from its values at the two nearest interior nodes.
double pole_limit(double s1, double c1, double s2, double c2) {
    const double a = s1 * s1, b = s2 * s2;
    return (b * c1 - a * c2) / (b - a);
}

}  // namespace

std::string to_string(Topology t) {
    switch (t) {
        case Topology::TwoCaps: return "TwoCaps";
        case Topology::Periodic: return "Periodic";
        case Topology::Cylinder: return "Cylinder";
    }
    return "?";
}

Topology topology_from_string(const std::string& s) {
    if (s == "TwoCaps") return Topology::TwoCaps;
    if (s == "Periodic") return Topology::Periodic;
    if (s == "Cylinder") return Topology::Cylinder;
    throw InvalidInput("unknown topology '" + s + "'");
}

std::string to_string(FieldKind k) {
    switch (k) {
        case FieldKind::Weight: return "weight";
        case FieldKind::Potential: return "potential";
        case FieldKind::Prescription: return "prescription";
        case FieldKind::Generic: return "generic";
    }
    return "?";
}

FieldKind field_kind_from_string(const std::string& s) {
    if (s == "weight") return FieldKind::Weight;
    if (s == "potential") return FieldKind::Potential;
    if (s == "prescription") return FieldKind::Prescription;
    if (s == "generic") return FieldKind::Generic;
    throw InvalidInput("unknown field kind '" + s + "'");
}

WarpedMetric::WarpedMetric(int n, std::vector<double> grid, std::vector<double> warp,
                           Topology topology)
    : n_(n), grid_(std::move(grid)), warp_(std::move(warp)), topology_(topology), registered_(false) {
    validate();
    numerics::CubicSpline spline(grid_, warp_, warp_end(*this, true), warp_end(*this, false));
    d1_ = spline.nodal_first_derivative();
    d2_ = spline.nodal_second_derivative();
    for (std::size_t i : {std::size_t{0}, size() - 1}) {
        if (is_pole(i)) d2_[i] = 0.0;
    }
}

WarpedMetric::WarpedMetric(int n, std::vector<double> grid, std::vector<double> warp,
                           std::vector<double> warp_d1, std::vector<double> warp_d2,
                           Topology topology)
    : n_(n),
      grid_(std::move(grid)),
      warp_(std::move(warp)),
      d1_(std::move(warp_d1)),
      d2_(std::move(warp_d2)),
      topology_(topology),
      registered_(true) {
    validate();
    if (d1_.size() != grid_.size() || d2_.size() != grid_.size())
        throw GridMismatch("warp derivative samples do not match the grid");
    if (!finite_all(d1_) || !finite_all(d2_)) throw InvalidInput("warp derivatives must be finite");
}

WarpedMetric WarpedMetric::from_function(int n, std::vector<double> grid, const RadialFunction& w,
                                         Topology topology) {
    std::vector<double> v(grid.size()), d1(grid.size()), d2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Jet j = w(grid[i]);
        v[i] = j.value;
        d1[i] = j.d1;
        d2[i] = j.d2;
    }
    return WarpedMetric(n, std::move(grid), std::move(v), std::move(d1), std::move(d2), topology);
}

void WarpedMetric::validate() const {
    if (n_ < 2) throw InvalidInput("dimension must be at least 2");
    if (grid_.size() != warp_.size()) throw GridMismatch("grid and warp differ in length");
    if (grid_.size() < 5) throw InvalidInput("metric needs at least 5 grid points");
    if (!finite_all(grid_) || !finite_all(warp_)) throw InvalidInput("grid and warp must be finite");
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i] > grid_[i - 1])) throw InvalidInput("grid must be strictly increasing");
    }
    const double scale = max_abs(warp_);
    const std::size_t last = warp_.size() - 1;
    for (std::size_t i = 1; i < last; ++i) {
        if (!(warp_[i] > 0.0)) throw InvalidInput("warp must be positive on the interior");
    }
    auto zero = [&](double w) { return std::abs(w) <= zero_warp_rel * scale; };
    switch (topology_) {
        case Topology::TwoCaps:
            if (!zero(warp_.front()) || !zero(warp_.back()))
                throw InvalidInput("TwoCaps metric needs w = 0 at both ends");
            break;
        case Topology::Periodic:
            if (!(warp_.front() > 0.0)) throw InvalidInput("periodic warp must be positive");
            if (std::abs(warp_.front() - warp_.back()) > 1e-10 * scale)
                throw InvalidInput("periodic warp must repeat its first sample at the end");
            break;
        case Topology::Cylinder:
            for (double w : {warp_.front(), warp_.back()}) {
                if (!(w > 0.0) && !zero(w)) throw InvalidInput("cylinder warp must be nonnegative at the ends");
            }
            break;
    }
}

double WarpedMetric::max_warp() const { return *std::max_element(warp_.begin(), warp_.end()); }

double WarpedMetric::min_warp() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < warp_.size(); ++i) {
        if (!is_pole(i)) m = std::min(m, warp_[i]);
    }
    return m;
}

bool WarpedMetric::is_pole(std::size_t i) const {
    if (topology_ == Topology::Periodic) return false;
    if (i != 0 && i + 1 != warp_.size()) return false;
    return std::abs(warp_[i]) <= zero_warp_rel * max_abs(warp_);
}

double WarpedMetric::cap_slope_defect() const {
    double defect = 0.0;
    for (std::size_t i : {std::size_t{0}, size() - 1}) {
        if (is_pole(i)) defect = std::max(defect, std::abs(std::abs(d1_[i]) - 1.0));
    }
    return defect;
}

RadialField::RadialField(std::vector<double> values, FieldKind kind)
    : values_(std::move(values)), kind_(kind) {
    if (!finite_all(values_)) throw InvalidInput("field samples must be finite");
    if (kind_ == FieldKind::Weight) {
        for (double v : values_) {
            if (!(v > 0.0)) throw InvalidInput("weight fields must be strictly positive");
        }
    }
}

RadialField::RadialField(std::vector<double> values, std::vector<double> d1, std::vector<double> d2,
                         FieldKind kind)
    : RadialField(std::move(values), kind) {
    if (d1.size() != values_.size() || d2.size() != values_.size())
        throw GridMismatch("field derivative samples differ in length");
    if (!finite_all(d1) || !finite_all(d2)) throw InvalidInput("field derivatives must be finite");
    d1_ = std::move(d1);
    d2_ = std::move(d2);
}

RadialField RadialField::from_function(const WarpedMetric& metric, const RadialFunction& f,
                                       FieldKind kind) {
    const auto r = metric.grid();
    std::vector<double> v(r.size()), d1(r.size()), d2(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Jet j = f(r[i]);
        v[i] = j.value;
        d1[i] = j.d1;
        d2[i] = j.d2;
    }
    return RadialField(std::move(v), std::move(d1), std::move(d2), kind);
}

RadialField RadialField::constant(const WarpedMetric& metric, double c, FieldKind kind) {
    const std::size_t n = metric.size();
    return RadialField(std::vector<double>(n, c), std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0), kind);
}

std::span<const double> RadialField::d1() const {
    if (!d1_) throw InvalidInput("field has no registered derivatives");
    return *d1_;
}

std::span<const double> RadialField::d2() const {
    if (!d2_) throw InvalidInput("field has no registered derivatives");
    return *d2_;
}

double RadialField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RadialField::max() const { return *std::max_element(values_.begin(), values_.end()); }

RadialField RadialField::scaled(double s) const {
    auto mul = [s](std::vector<double> v) {
        for (double& x : v) x *= s;
        return v;
    };
    if (d1_) return RadialField(mul(values_), mul(*d1_), mul(*d2_), kind_);
    return RadialField(mul(values_), kind_);
}

FieldDerivatives derivatives(const WarpedMetric& metric, const RadialField& u) {
    if (u.size() != metric.size()) throw GridMismatch("field is not sampled on the metric grid");
    if (u.has_derivatives()) {
        return {std::vector<double>(u.d1().begin(), u.d1().end()),
                std::vector<double>(u.d2().begin(), u.d2().end())};
    }
    auto end = [&](bool left) {
        const std::size_t i = left ? 0 : metric.size() - 1;
        if (metric.topology() == Topology::Periodic) return numerics::SplineEnd::periodic();
        if (metric.is_pole(i)) return numerics::SplineEnd::clamped(0.0);
        return numerics::SplineEnd::not_a_knot();
    };
    std::vector<double> x(metric.grid().begin(), metric.grid().end());
    std::vector<double> y(u.values().begin(), u.values().end());
    if (metric.topology() == Topology::Periodic && y.front() != y.back()) {
        if (std::abs(y.front() - y.back()) > 1e-10 * std::max(1.0, max_abs(y)))
            throw InvalidInput("periodic field must repeat its first sample at the end");
        y.back() = y.front();
    }
    numerics::CubicSpline spline(std::move(x), std::move(y), end(true), end(false));
    return {spline.nodal_first_derivative(), spline.nodal_second_derivative()};
}

PointCurvature pointwise_curvature(int n, double w, double dw, double d2w) {
    PointCurvature c{};
    c.sect_mixed = -d2w / w;
    c.sect_tangential = (1.0 - dw) * (1.0 + dw) / (w * w);
    c.ric_radial = (n - 1) * c.sect_mixed;
    c.ric_tangential = c.sect_mixed + (n - 2) * c.sect_tangential;
    c.ric_min = std::min(c.ric_radial, c.ric_tangential);
    // Orthonormal pairs: (radial, tangential) and, for n >= 3, two tangentials.
    c.biric_min = c.ric_radial + c.ric_tangential - c.sect_mixed;
    if (n >= 3) c.biric_min = std::min(c.biric_min, 2.0 * c.ric_tangential - c.sect_tangential);
    return c;
}

void require_smooth_caps(const WarpedMetric& metric, double tol) {
    for (std::size_t i : {std::size_t{0}, metric.size() - 1}) {
        if (!metric.is_pole(i)) continue;
        const double slope = metric.warp_d1()[i];
        if (std::abs(std::abs(slope) - 1.0) > tol)
            throw ConeSingularity("cone singularity: |w'| != 1 at a pole", metric.grid()[i], slope);
    }
}

CurvatureProfile curvature_profile(const WarpedMetric& metric, double cap_tol) {
    require_smooth_caps(metric, cap_tol);
    const std::size_t k = metric.size();
    const auto r = metric.grid();
    const auto w = metric.warp();
    const auto d1 = metric.warp_d1();
    const auto d2 = metric.warp_d2();
    const int n = metric.dimension();

    std::vector<PointCurvature> pts(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!metric.is_pole(i)) pts[i] = pointwise_curvature(n, w[i], d1[i], d2[i]);
    }
    auto fill_pole = [&](std::size_t pole, std::size_t a, std::size_t b) {
        const double sa = std::abs(r[a] - r[pole]), sb = std::abs(r[b] - r[pole]);
        auto lim = [&](double PointCurvature::*f) { return pole_limit(sa, pts[a].*f, sb, pts[b].*f); };
        PointCurvature& p = pts[pole];
        p.ric_radial = lim(&PointCurvature::ric_radial);
        p.ric_tangential = lim(&PointCurvature::ric_tangential);
        p.sect_mixed = lim(&PointCurvature::sect_mixed);
        p.sect_tangential = lim(&PointCurvature::sect_tangential);
        p.biric_min = lim(&PointCurvature::biric_min);
        p.ric_min = std::min(p.ric_radial, p.ric_tangential);
    };
    if (metric.is_pole(0)) fill_pole(0, 1, 2);
    if (metric.is_pole(k - 1)) fill_pole(k - 1, k - 2, k - 3);

    CurvatureProfile out;
    out.r.assign(r.begin(), r.end());
    for (const auto& p : pts) {
        out.ric_radial.push_back(p.ric_radial);
        out.ric_tangential.push_back(p.ric_tangential);
        out.ric_min.push_back(p.ric_min);
        out.sect_mixed.push_back(p.sect_mixed);
        out.sect_tangential.push_back(p.sect_tangential);
        out.biric_min.push_back(p.biric_min);
    }
    return out;
}

RadialField laplacian_radial(const WarpedMetric& metric, const RadialField& u) {
    const auto du = derivatives(metric, u);
    const auto w = metric.warp();
    const auto dw = metric.warp_d1();
    const int n = metric.dimension();
    std::vector<double> out(metric.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (metric.is_pole(i)) {
            out[i] = n * du.d2[i];
        } else {
            out[i] = du.d2[i] + (n - 1) * dw[i] / w[i] * du.d1[i];
        }
    }
    return RadialField(std::move(out), FieldKind::Generic);
}

double weighted_volume(const WarpedMetric& metric, const RadialField& u, double p) {
    if (u.size() != metric.size()) throw GridMismatch("field is not sampled on the metric grid");
    if (u.min() < 0.0) throw InvalidInput("weighted volume needs a nonnegative weight");
    const auto w = metric.warp();
    const auto dw = metric.warp_d1();
    const int n = metric.dimension();
    std::vector<double> g(metric.size()), dg(metric.size());
    const bool trivial = p == 0.0;
    FieldDerivatives du;
    if (!trivial) du = derivatives(metric, u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double wn1 = std::pow(w[i], n - 1);
        const double dwn1 = n == 2 ? dw[i] : (n - 1) * std::pow(w[i], n - 2) * dw[i];
        if (trivial) {
            g[i] = wn1;
            dg[i] = dwn1;
        } else {
            const double up = std::pow(u[i], p);
            const double dup = u[i] > 0.0 ? p * up / u[i] * du.d1[i] : 0.0;
            g[i] = up * wn1;
            dg[i] = dup * wn1 + up * dwn1;
        }
    }
    return bounds::vol_round_sphere(n - 1) * numerics::integrate(metric.grid(), g, dg);
}

double volume(const WarpedMetric& metric) {
    return weighted_volume(metric, RadialField::constant(metric, 1.0, FieldKind::Weight), 0.0);
}

DiameterEstimate diameter_estimate(const WarpedMetric& metric) {
    switch (metric.topology()) {
        case Topology::TwoCaps:
            // Every pair is joined through one of the poles by a curve of
            // length at most r_K - r_0, and the poles are that far apart.
            return {metric.length(), true};
        case Topology::Periodic:
            return {std::max(0.5 * metric.length(), std::numbers::pi * metric.min_warp()), false};
        case Topology::Cylinder:
            return {std::max(metric.length(), std::numbers::pi * metric.min_warp()), false};
    }
    return {metric.length(), false};
}

WarpedMetric rescale(const WarpedMetric& metric, double c) {
    if (!(c > 0.0)) throw InvalidInput("rescale factor must be positive");
    auto mul = [](std::span<const double> v, double s) {
        std::vector<double> out(v.begin(), v.end());
        for (double& x : out) x *= s;
        return out;
    };
    return WarpedMetric(metric.dimension(), mul(metric.grid(), c), mul(metric.warp(), c),
                        mul(metric.warp_d1(), 1.0), mul(metric.warp_d2(), 1.0 / c),
                        metric.topology());
}

WarpedMetric round_sphere(int n, std::size_t points, double radius) {
    auto grid = numerics::uniform_grid(0.0, std::numbers::pi * radius, points);
    return WarpedMetric::from_function(
        n, std::move(grid),
        [radius](double r) {
            const double t = r / radius;
            // sin(pi) is not exactly 0 in floating point.
            const double s = radius * std::sin(t);
            return Jet{std::abs(s) < 1e-15 * radius ? 0.0 : s, std::cos(t), -std::sin(t) / radius};
        },
        Topology::TwoCaps);
}

WarpedMetric hyperbolic_ball(int n, std::size_t points, double radius) {
    return WarpedMetric::from_function(
        n, numerics::uniform_grid(0.0, radius, points),
        [](double r) { return Jet{std::sinh(r), std::cosh(r), std::sinh(r)}; }, Topology::Cylinder);
}

WarpedMetric euclidean_ball(int n, std::size_t points, double radius) {
    return WarpedMetric::from_function(
        n, numerics::uniform_grid(0.0, radius, points),
        [](double r) { return Jet{r, 1.0, 0.0}; }, Topology::Cylinder);
}

}  // namespace warplab::geometry
