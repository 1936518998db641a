#include "warplab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "warplab/bounds.hpp"
#include "warplab/errors.hpp"
#include "warplab/numerics.hpp"

namespace warplab::profile {

namespace {

constexpr double pi = std::numbers::pi;

// int_0^x sin^k, x in [0, pi/2]
double sine_power_integral(int k, double x) {
    if (x <= 0) return 0;
    auto f = [k](double t) { return std::pow(std::sin(t), k); };
    // split so that the rule also resolves sharply peaked high powers
    const double mid = 0.5 * x;
    return boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, mid) +
           boost::math::quadrature::gauss<double, 30>::integrate(f, mid, x);
}

// y in [0, pi/2] with int_0^y sin^k = t.
double invert_sine_power_integral(int k, double t) {
    if (t <= 0) return 0;
    const double top = sine_power_integral(k, pi / 2);
    if (t >= top) return pi / 2;
    double guess = std::pow((k + 1) * t, 1.0 / (k + 1));
    guess = std::clamp(guess, 0.0, pi / 2);
    std::uintmax_t iters = 200;
    return boost::math::tools::newton_raphson_iterate(
        [&](double y) {
            return std::make_pair(sine_power_integral(k, y) - t, std::pow(std::sin(y), k));
        },
        guess, 0.0, pi / 2, std::numeric_limits<double>::digits - 4, iters);
}

double quintic_hermite(double t, double h, double y0, double d0, double s0, double y1, double d1,
                       double s1) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 0.5 * (t3 - 2 * t4 + t5);
    return y0 * h0 + h * d0 * h1 + h * h * s0 * h2 + y1 * h3 + h * d1 * h4 + h * h * s1 * h5;
}

}  // namespace

void validate(const ProfileCurve& c) {
    if (c.v.size() != c.I.size()) throw InvalidInput("profile: v and I sizes differ");
    if (c.v.size() < 2) throw InvalidInput("profile: need at least two samples");
    if (c.n < 2) throw InvalidInput("profile: dimension must be >= 2");
    for (std::size_t i = 0; i < c.v.size(); ++i) {
        if (!std::isfinite(c.v[i]) || !std::isfinite(c.I[i])) throw InvalidInput("profile: non-finite sample");
        if (c.I[i] < 0) throw InvalidInput("profile: negative I");
        if (i > 0 && !(c.v[i] > c.v[i - 1])) throw InvalidInput("profile: v must be strictly increasing");
    }
}

ModelProfile::ModelProfile(double zeta, double lambda, int n) : zeta_(zeta), lambda_(lambda), n_(n) {
    if (!(zeta > 0) || !(lambda > 0)) throw InvalidInput("model profile: zeta and lambda must be positive");
    if (n < 2) throw InvalidInput("model profile: n must be >= 2");
    v_total_ = zeta_ * std::pow(lambda_, -0.5 * n_) * 2 * sine_power_integral(n_ - 1, pi / 2);
}

double ModelProfile::volume_at(double r) const {
    const double x = std::clamp(std::sqrt(lambda_) * r, 0.0, pi);
    const double scale = zeta_ * std::pow(lambda_, -0.5 * n_);
    if (x <= pi / 2) return scale * sine_power_integral(n_ - 1, x);
    return v_total_ - scale * sine_power_integral(n_ - 1, pi - x);
}

double ModelProfile::radius_of_volume(double v) const {
    if (!(v >= 0) || v > v_total_ * (1 + 1e-14)) throw RangeError("model profile: v outside [0, V_zeta]");
    const double scale = zeta_ * std::pow(lambda_, -0.5 * n_);
    const double s = std::sqrt(lambda_);
    if (v <= 0.5 * v_total_) return invert_sine_power_integral(n_ - 1, v / scale) / s;
    const double y = invert_sine_power_integral(n_ - 1, std::max(0.0, v_total_ - v) / scale);
    return (pi - y) / s;
}

double ModelProfile::operator()(double v) const {
    if (!(v >= 0) || v > v_total_ * (1 + 1e-14)) throw RangeError("model profile: v outside [0, V_zeta]");
    const double scale = zeta_ * std::pow(lambda_, -0.5 * n_);
    // mu is symmetric about the equator; work from the nearer pole
    const double t = v <= 0.5 * v_total_ ? v / scale : std::max(0.0, v_total_ - v) / scale;
    const double y = invert_sine_power_integral(n_ - 1, t);
    return zeta_ * std::pow(std::sin(y) / std::sqrt(lambda_), n_ - 1);
}

double ModelProfile::psi(double v) const {
    return std::pow((*this)(v), double(n_) / (n_ - 1));
}

ProfileCurve ModelProfile::sample(std::size_t points) const {
    if (points < 2) throw InvalidInput("model profile: need at least two samples");
    ProfileCurve c;
    c.n = n_;
    c.lambda = lambda_;
    c.v_total = v_total_;
    c.v = numerics::uniform_grid(0, v_total_, points);
    c.I.resize(points);
    for (std::size_t j = 0; j < points; ++j) c.I[j] = (*this)(c.v[j]);
    c.I.front() = 0;
    c.I.back() = 0;
    return c;
}

ProfileCurve radial_weighted_profile(const geometry::WarpedMetric& metric, const geometry::RadialField& u,
                                     double gamma, double lambda) {
    if (metric.topology() != geometry::Topology::TwoCaps) {
        throw InvalidInput("radial profile needs a TwoCaps metric");
    }
    if (u.size() != metric.size()) throw GridMismatch("radial profile: u and metric sizes differ");
    if (!(u.min() > 0)) throw InvalidInput("radial profile: u must be positive");
    const int n = metric.dimension();
    const double alpha = 2 * gamma / (n - 1);
    const auto du = geometry::derivatives(metric, u);
    const auto r = metric.grid();
    const auto w = metric.warp();
    const auto dw = metric.warp_d1();
    const auto d2w = metric.warp_d2();
    const std::size_t N = metric.size();
    // Gauss rule on the quintic Hermite interpolants of w and u; near a pole
    // the integrand behaves like r^{n-1}, beyond what the nodal rules resolve.
    std::vector<double> cum(N, 0.0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double h = r[i + 1] - r[i];
        auto g = [&](double x) {
            const double t = (x - r[i]) / h;
            const double wv = quintic_hermite(t, h, w[i], dw[i], d2w[i], w[i + 1], dw[i + 1], d2w[i + 1]);
            const double uv = quintic_hermite(t, h, u[i], du.d1[i], du.d2[i], u[i + 1], du.d1[i + 1],
                                              du.d2[i + 1]);
            return std::pow(std::max(uv, 0.0), alpha) * std::pow(std::max(wv, 0.0), n - 1);
        };
        cum[i + 1] = cum[i] + boost::math::quadrature::gauss<double, 10>::integrate(g, r[i], r[i + 1]);
    }
    std::vector<double> area(N);
    for (std::size_t i = 0; i < N; ++i) area[i] = std::pow(u[i], gamma) * std::pow(w[i], n - 1);
    const double sphere = bounds::vol_round_sphere(n - 1);
    ProfileCurve c;
    c.n = n;
    c.lambda = lambda;
    c.gamma = gamma;
    c.alpha = alpha;
    c.upper_bound = true;
    // Near the far pole the volume increments fall below one ulp of the
    // total; such samples carry no information and are dropped.
    for (std::size_t i = 0; i < N; ++i) {
        const double v = sphere * cum[i];
        const double I = metric.is_pole(i) ? 0.0 : sphere * area[i];
        if (!c.v.empty() && !(v > c.v.back())) {
            if (i + 1 < N) continue;
            c.v.pop_back();
            c.I.pop_back();
        }
        c.v.push_back(v);
        c.I.push_back(I);
    }
    c.v_total = c.v.back();
    validate(c);
    return c;
}

namespace {

struct Uniform {
    std::vector<double> v;
    std::vector<double> y;
    double h;
};

Uniform resample(std::span<const double> v, std::span<const double> y) {
    Uniform out;
    if (numerics::is_uniform(v)) {
        out.v.assign(v.begin(), v.end());
        out.y.assign(y.begin(), y.end());
    } else {
        const numerics::CubicSpline s(std::vector<double>(v.begin(), v.end()),
                                      std::vector<double>(y.begin(), y.end()),
                                      numerics::SplineEnd::not_a_knot(), numerics::SplineEnd::not_a_knot());
        out.v = numerics::uniform_grid(v.front(), v.back(), v.size());
        out.y.resize(out.v.size());
        for (std::size_t i = 0; i < out.v.size(); ++i) out.y[i] = s(out.v[i]);
    }
    out.h = (out.v.back() - out.v.front()) / double(out.v.size() - 1);
    return out;
}

template <class F>
ResidualSample stencil_residual(const Uniform& g, double trim, F&& formula) {
    const std::size_t N = g.v.size();
    const double lo = g.v.front() + trim * (g.v.back() - g.v.front());
    const double hi = g.v.back() - trim * (g.v.back() - g.v.front());
    ResidualSample out;
    out.worst = -std::numeric_limits<double>::infinity();
    const auto& y = g.y;
    for (std::size_t i = 2; i + 2 < N; ++i) {
        if (g.v[i] < lo || g.v[i] > hi) continue;
        const double d1 = (-y[i + 2] + 8 * y[i + 1] - 8 * y[i - 1] + y[i - 2]) / (12 * g.h);
        const double d2 =
            (-y[i + 2] + 16 * y[i + 1] - 30 * y[i] + 16 * y[i - 1] - y[i - 2]) / (12 * g.h * g.h);
        const double r = formula(y[i], d1, d2);
        out.v.push_back(g.v[i]);
        out.residual.push_back(r);
        out.worst = std::max(out.worst, r);
    }
    if (out.v.empty()) throw InvalidInput("profile: no interior samples left after trimming");
    return out;
}

}  // namespace

ResidualSample viscosity_residual(const ProfileCurve& curve, double trim) {
    validate(curve);
    if (curve.v.size() < 5) throw InvalidInput("viscosity residual needs at least 5 samples");
    if (!(trim >= 0 && trim < 0.5)) throw InvalidInput("trim must lie in [0, 0.5)");
    const double m = curve.n - 1;
    const double lam = curve.lambda;
    return stencil_residual(resample(curve.v, curve.I), trim, [&](double I, double d1, double d2) {
        return I * d2 + d1 * d1 / m + m * lam;
    });
}

PsiCurve psi_transform(const ProfileCurve& curve, double trim) {
    validate(curve);
    const double n = curve.n;
    PsiCurve out;
    out.v = curve.v;
    out.psi.resize(curve.I.size());
    for (std::size_t i = 0; i < curve.I.size(); ++i) out.psi[i] = std::pow(curve.I[i], n / (n - 1));
    if (curve.v.size() >= 5) {
        const double lam = curve.lambda;
        out.residual = stencil_residual(resample(out.v, out.psi), trim, [&](double p, double, double d2) {
            return d2 + lam * n * std::pow(p, (2 - n) / n);
        });
    }
    return out;
}

SmallVolumeFit small_volume_asymptotic(const ProfileCurve& curve, double rel_tol) {
    validate(curve);
    const int n = curve.n;
    const double p = double(n - 1) / n;
    double v1 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.v.size(); ++i) {
        if (curve.v[i] > 0 && curve.I[i] > 0) v1 = std::min(v1, curve.v[i]);
    }
    if (!std::isfinite(v1)) throw InvalidInput("small-volume fit: no positive samples");
    std::vector<double> y, s;
    for (std::size_t i = 0; i < curve.v.size(); ++i) {
        const double v = curve.v[i];
        if (v > 0 && curve.I[i] > 0 && v <= 10 * v1 * (1 + 1e-12)) {
            y.push_back(curve.I[i] / std::pow(v, p));
            s.push_back(std::pow(v, 2.0 / n));
        }
    }
    double c = 0;
    if (y.size() >= 3) {
        // least squares y = c + d s
        const double k = double(y.size());
        double sy = 0, ss = 0, sss = 0, ssy = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            sy += y[i];
            ss += s[i];
            sss += s[i] * s[i];
            ssy += s[i] * y[i];
        }
        const double det = k * sss - ss * ss;
        c = det > 0 ? (sy * sss - ss * ssy) / det : sy / k;
    } else {
        for (double yy : y) c += yy;
        c /= double(y.size());
    }
    const double bound = n * std::pow(bounds::vol_round_ball(n), 1.0 / n);
    return {c, bound, c <= bound * (1 + rel_tol), y.size()};
}

std::string to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Holds: return "Holds";
        case VerdictStatus::Contradiction: return "Contradiction";
        case VerdictStatus::NotApplicable: return "NotApplicable";
    }
    return "?";
}

VerdictStatus verdict_status_from_string(const std::string& s) {
    if (s == "Holds") return VerdictStatus::Holds;
    if (s == "Contradiction") return VerdictStatus::Contradiction;
    if (s == "NotApplicable") return VerdictStatus::NotApplicable;
    throw InvalidInput("unknown verdict status '" + s + "'");
}

ComparisonVerdict comparison_verdict(const ProfileCurve& curve, const ComparisonOptions& options) {
    validate(curve);
    if (!(curve.lambda > 0)) throw InvalidInput("comparison needs lambda > 0");
    const int n = curve.n;
    ComparisonVerdict out{};
    out.v_bound = std::pow(curve.lambda, -0.5 * n) * bounds::vol_round_sphere(n);
    out.v_measured = curve.v_total;
    const auto res = viscosity_residual(curve, options.trim);
    out.worst_residual = res.worst;
    const bool barrier = res.worst <= options.residual_tol * std::max(1.0, (n - 1) * curve.lambda);
    try {
        out.asymptotic = small_volume_asymptotic(curve);
    } catch (const InvalidInput&) {
        out.asymptotic = {std::numeric_limits<double>::quiet_NaN(),
                          n * std::pow(bounds::vol_round_ball(n), 1.0 / n), false, 0};
    }
    out.volume_ok = out.v_measured <= out.v_bound * (1 + options.volume_rel_tol);
    if (!barrier) {
        out.status = VerdictStatus::NotApplicable;
        out.reason = "barrier inequality fails";
    } else if (!out.volume_ok) {
        out.status = VerdictStatus::Contradiction;
        out.reason = out.asymptotic.ok ? "volume above bound with all hypotheses met"
                                       : "volume above bound; small-volume bound violated";
    } else if (!out.asymptotic.ok) {
        out.status = VerdictStatus::NotApplicable;
        out.reason = "small-volume bound fails";
    } else {
        out.status = VerdictStatus::Holds;
        out.reason = "volume within bound";
    }
    return out;
}

}  // namespace warplab::profile
