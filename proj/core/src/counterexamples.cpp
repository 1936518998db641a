#include "warplab/counterexamples.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "warplab/errors.hpp"
#include "warplab/numerics.hpp"

namespace odeint = boost::numeric::odeint;

namespace warplab::counterexamples {

using geometry::Jet;
using geometry::RadialField;
using geometry::WarpedMetric;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double half_pi = std::numbers::pi / 2;

std::string sci(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

double kpp_of(int n, double gamma) {
    return gamma - (n - 2) * gamma * gamma / (n - 1);
}

}  // namespace

double coupling_residual(int n, double gamma, double a, double b) {
    const double alpha = 2 * gamma / (n - 1);
    const double k = kpp_of(n, gamma) / ((gamma - alpha) * (gamma - alpha));
    return -a * a / (n - 1) - k * b * b - (n - 1) + a * b;
}

CouplingConstants solve_coupling_constants(int n, double gamma) {
    if (n < 4) {
        throw RangeError("coupling constants need n >= 4 (gamma - 2 gamma/(n-1) vanishes at n = 3)");
    }
    if (!(gamma > 4.0 / (n - 1))) {
        throw NoSolution("no positive (a, b): need gamma > 4/(n-1)");
    }
    const double m = n - 1;
    const double alpha = 2 * gamma / m;
    const double k = kpp_of(n, gamma) / ((gamma - alpha) * (gamma - alpha));
    const double margin = 1 - 4 * k / m;
    if (!(margin > 0)) throw NoSolution("discriminant is nonpositive");
    const double b = 1.1 * 2 / std::sqrt(margin);
    // a^2 - m b a + m (k b^2 + m) = 0
    const double c = m * (k * b * b + m);
    const double disc = m * m * b * b - 4 * c;
    if (!(disc > 0) || !(c > 0)) throw NoSolution("no positive root a");
    const double a = 2 * c / (m * b + std::sqrt(disc));
    return {a, b, k, alpha};
}

double smoothstep(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    return t * t * t * (10 + t * (-15 + 6 * t));
}

double smoothstep_d1(double t) {
    if (t <= 0 || t >= 1) return 0;
    return 30 * t * t * (1 - t) * (1 - t);
}

double smoothstep_d2(double t) {
    if (t <= 0 || t >= 1) return 0;
    return 60 * t * (1 - t) * (1 - 2 * t);
}

double smoothstep_integral(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 0.5 + (t - 1);
    return t * t * t * t * (2.5 + t * (-3 + t));
}

double Cutoff::value(double r) const {
    const double x = std::abs(r);
    if (x <= delta) return 0;
    if (x <= 2 * delta) return smoothstep((x - delta) / delta);
    if (x <= L) return 1;
    return 1 - smoothstep((x - L) / mu);
}

double Cutoff::d1(double r) const {
    const double x = std::abs(r);
    if (x <= delta || (x >= 2 * delta && x <= L)) return 0;
    if (x < 2 * delta) return smoothstep_d1((x - delta) / delta) / delta;
    return -smoothstep_d1((x - L) / mu) / mu;
}

double Cutoff::integral(double r) const {
    const double x = std::abs(r);
    if (x <= delta) return 0;
    if (x <= 2 * delta) return delta * smoothstep_integral((x - delta) / delta);
    if (x <= L) return delta / 2 + (x - 2 * delta);
    const double t = std::min((x - L) / mu, 1.0);
    const double plateau = delta / 2 + (L - 2 * delta);
    if (x <= L + mu) return plateau + (x - L) - mu * smoothstep_integral(t);
    return plateau + mu / 2;
}

void validate(const LargeDiameterParams& p) {
    if (p.n < 4) throw InvalidInput("large-diameter construction needs n >= 4");
    if (!(p.L > 0) || !std::isfinite(p.L)) throw InvalidInput("L must be positive");
    if (!(p.ode_tol > 0) || !(p.delta_search_tol > 0)) throw InvalidInput("tolerances must be positive");
    if (p.grid < 65) throw InvalidInput("grid must have at least 65 points");
    if (p.cap_nodes < 4) throw InvalidInput("cap_nodes must be at least 4");
    if (!(p.collar_fraction > 0 && p.collar_fraction < 1)) {
        throw InvalidInput("collar_fraction must lie in (0, 1)");
    }
    if (!(p.mu_start > 0) || !(p.epsilon_start > 0)) throw InvalidInput("mu and epsilon must start positive");
}

namespace {

// theta = atan(-Q/(n-1)), J = int_0^r Q.
using State = std::array<double, 2>;

struct Flow {
    int n;
    double gamma;
    double alpha;
    double kpp;
    double slope;  // b/(gamma - alpha)
    Cutoff eta;
    bool track_j = true;  // J blows up with theta at pi/2; shooting only needs theta

    double v(double r) const {
        const double e = eta.value(r);
        return r < 0 ? -e * slope : e * slope;
    }
    double dv(double r) const { return eta.d1(r) * slope; }

    double dtheta(double theta, double r) const {
        const double vv = v(r);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return 1 + kpp * vv * vv * c * c / (n - 1) + (alpha - gamma) * vv * s * c;
    }

    void operator()(const State& y, State& dy, double r) const {
        dy[0] = dtheta(y[0], r);
        dy[1] = track_j ? -(n - 1) * std::tan(y[0]) : 0.0;
    }
};

Flow make_flow(int n, double gamma, const CouplingConstants& ab, double delta, double mu, double L) {
    return {n, gamma, ab.alpha, kpp_of(n, gamma), ab.b / (gamma - ab.alpha), Cutoff{delta, mu, L}};
}

// States at `times` (monotone, moving away from t0), restarting the stepper at
// each kink of the cutoff so that error control never straddles one.
std::vector<State> shoot(const Flow& flow, State y, double t0, const std::vector<double>& times,
                         double tol) {
    std::vector<State> out;
    out.reserve(times.size());
    if (times.empty()) return out;
    const double dir = times.back() >= t0 ? 1.0 : -1.0;
    std::vector<double> kinks;
    for (double k : {flow.eta.delta, 2 * flow.eta.delta, flow.eta.L, flow.eta.L + flow.eta.mu}) {
        const double kk = dir * k;
        if (dir * (kk - t0) > 0 && dir * (times.back() - kk) > 0) kinks.push_back(kk);
    }
    kinks.push_back(times.back());
    std::size_t next = 0;
    double t = t0;
    for (double stop : kinks) {
        std::vector<double> seg{t};
        std::vector<std::size_t> index{std::numeric_limits<std::size_t>::max()};
        while (next < times.size() && dir * (times[next] - stop) <= 0) {
            if (dir * (times[next] - t) > 0) {
                seg.push_back(times[next]);
                index.push_back(next);
            } else {
                out.push_back(y);  // coincides with the segment start
            }
            ++next;
        }
        if (seg.back() != stop) {
            seg.push_back(stop);
            index.push_back(std::numeric_limits<std::size_t>::max());
        }
        if (seg.size() > 1) {
            auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
            std::size_t k = 0;
            odeint::integrate_times(stepper, std::cref(flow), y, seg.begin(), seg.end(),
                                    (stop - t) / 64,
                                    [&](const State& s, double) {
                                        if (index[k] != std::numeric_limits<std::size_t>::max()) {
                                            out.push_back(s);
                                        }
                                        ++k;
                                    });
        }
        t = stop;
    }
    return out;
}

State shoot_to(const Flow& flow, State y, double t0, double t1, double tol) {
    if (t1 == t0) return y;
    return shoot(flow, y, t0, {t1}, tol).back();
}

double q_of(int n, double theta) { return -(n - 1) * std::tan(theta); }

// theta(2 delta) for the shooting map; on [0, delta] the flow is explicit.
double theta_at_two_delta(int n, double gamma, const CouplingConstants& ab, double delta, double L,
                          double tol) {
    Flow flow = make_flow(n, gamma, ab, delta, 1.0, L);
    flow.track_j = false;
    const State start{delta, 0};
    return shoot_to(flow, start, delta, 2 * delta, tol)[0];
}

}  // namespace

DeltaSearch find_delta(const LargeDiameterParams& params, const CouplingConstants& ab) {
    const int n = params.n;
    const double target = std::atan(ab.a / (n - 1));
    auto theta2 = [&](double d) {
        return theta_at_two_delta(n, params.gamma, ab, d, params.L, 0.1 * params.ode_tol);
    };

    // Scan for the first sign change of theta(2 delta) - target and for the
    // blow-up threshold theta(2 delta) = pi/2.
    constexpr int scan = 64;
    double lo = 0, hi = 0, blow_lo = 0, blow_hi = 0;
    bool bracketed = false, blow_found = false;
    double prev = 0;
    for (int k = 1; k < scan; ++k) {
        const double d = half_pi * k / scan;
        const double th = theta2(d);
        if (!bracketed && th >= target) {
            lo = prev;
            hi = d;
            bracketed = true;
        }
        if (th >= half_pi) {
            blow_lo = prev;
            blow_hi = d;
            blow_found = true;
            break;
        }
        prev = d;
    }
    if (!bracketed || !blow_found) throw ConvergenceError("find_delta: no bracket for the shooting map");

    DeltaSearch out{};
    const double small = 1e-6;
    out.q_small = q_of(n, theta2(small));

    for (int it = 0; it < 200 && blow_hi - blow_lo > 1e-14; ++it) {
        const double mid = 0.5 * (blow_lo + blow_hi);
        (theta2(mid) >= half_pi ? blow_hi : blow_lo) = mid;
    }
    out.delta0 = 0.5 * (blow_lo + blow_hi);

    const int max_iter = 200;
    double d = 0.5 * (lo + hi);
    double q = q_of(n, theta2(d));
    int it = 0;
    for (; it < max_iter; ++it) {
        d = 0.5 * (lo + hi);
        const double th = theta2(d);
        q = q_of(n, th);
        if (std::abs(q + ab.a) <= params.delta_search_tol) break;
        (th < target ? lo : hi) = d;
        if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    if (!(std::abs(q + ab.a) <= params.delta_search_tol)) {
        throw ConvergenceError("find_delta: |Q(2 delta) + a| = " + sci(std::abs(q + ab.a)) +
                               " above tolerance");
    }
    out.delta = d;
    out.q_at_delta = q;
    out.iterations = it + 1;

    const Flow flow = make_flow(n, params.gamma, ab, d, 1.0, params.L);
    constexpr int samples = 65;
    std::vector<double> times;
    for (int k = 1; k < samples; ++k) times.push_back(2 * d * k / (samples - 1));
    const auto states = shoot(flow, State{0, 0}, 0, times, 0.1 * params.ode_tol);
    out.trajectory.push_back({0, 0});
    for (std::size_t k = 0; k < times.size(); ++k) {
        out.trajectory.push_back({times[k], q_of(n, states[k][0])});
    }
    return out;
}

namespace {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.what());
    }
}

// Per-node data of the unsmoothed solution.
struct Node {
    double r;
    double theta;
    double log_f;
    double p;   // f'/f
    double dp;  // (f'/f)'
    double log_u;
    double v;   // u'/u
    double dv;
};

struct Side {
    double theta_end;  // theta at +-(L + mu)
    double log_f_end;
};

}  // namespace

ConstructionReport build_large_diameter_metric(const LargeDiameterParams& params) {
    validate(params);
    const int n = params.n;
    const double m = n - 1;
    const double gamma = params.gamma;
    const double L = params.L;
    // Controller tolerance a decade below the accuracy asked of the solution.
    const double tol = 0.1 * params.ode_tol;

    const CouplingConstants ab = staged("coupling", [&] { return solve_coupling_constants(n, gamma); });
    const DeltaSearch ds = staged("delta", [&] { return find_delta(params, ab); });
    const double delta = ds.delta;
    if (!(2 * delta < L)) throw StageError("delta", "L must exceed 2 delta = " + sci(2 * delta));

    // mu: halve until the flow stays below the blow-up on [0, L + mu].
    double mu = params.mu_start;
    State end_pos{};
    {
        int k = 0;
        for (;; ++k) {
            if (k > params.max_mu_halvings) throw StageError("mu", "flow blows up before L + mu");
            Flow probe = make_flow(n, gamma, ab, delta, mu, L);
            probe.track_j = false;
            const State th = shoot_to(probe, State{0, 0}, 0, L + mu, tol);
            if (std::isfinite(th[0]) && th[0] < half_pi) {
                end_pos = shoot_to(make_flow(n, gamma, ab, delta, mu, L), State{0, 0}, 0, L + mu, tol);
                break;
            }
            mu /= 2;
        }
    }
    const Flow flow = make_flow(n, gamma, ab, delta, mu, L);
    const State end_neg = shoot_to(flow, State{0, 0}, 0, -(L + mu), tol);
    const double r0 = L + mu + half_pi - end_pos[0];

    const double log_u_end = flow.slope * flow.eta.integral(L + mu);
    const Side pos{end_pos[0], end_pos[1] / m - gamma / m * log_u_end};
    const Side neg{end_neg[0], end_neg[1] / m - gamma / m * log_u_end};

    // r0 from the event Q = -1e6 and the cot asymptotics.
    const double r0_event = staged("r0", [&] {
        const double theta_event = std::atan(1e6 / m);
        auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
        stepper.initialize(end_pos, L + mu, 1e-3);
        int steps = 0;
        while (stepper.current_state()[0] < theta_event) {
            if (++steps > 1000000) throw ConvergenceError("event Q = -1e6 not reached");
            stepper.do_step(std::cref(flow));
        }
        double a = stepper.previous_time(), b = stepper.current_time();
        State s{};
        for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
            const double mid = 0.5 * (a + b);
            stepper.calc_state(mid, s);
            (s[0] < theta_event ? a : b) = mid;
        }
        const double rc = 0.5 * (a + b);
        return rc + std::atan(m / 1e6);
    });

    const double c_pos = std::exp(pos.log_f_end) / std::cos(pos.theta_end);

    // Unsmoothed solution on a core grid [-r_s, r_s].
    auto sample_core = [&](double r_s, std::size_t points) {
        const std::vector<double> grid = numerics::uniform_grid(-r_s, r_s, points);
        const std::size_t mid = points / 2;
        std::vector<Node> nodes(points);
        auto fill_flow = [&](std::size_t i, const State& s) {
            Node& nd = nodes[i];
            const double r = nd.r;
            nd.theta = s[0];
            nd.log_u = flow.slope * flow.eta.integral(r);
            nd.v = flow.v(r);
            nd.dv = flow.dv(r);
            nd.log_f = s[1] / m - gamma / m * nd.log_u;
            const double q = q_of(n, s[0]);
            const double c = std::cos(s[0]);
            const double dq = -m * flow.dtheta(s[0], r) / (c * c);
            nd.p = (q - gamma * nd.v) / m;
            nd.dp = (dq - gamma * nd.dv) / m;
        };
        auto fill_tail = [&](std::size_t i, const Side& side, double r_b) {
            Node& nd = nodes[i];
            nd.theta = side.theta_end + (nd.r - r_b);
            nd.log_u = log_u_end;
            nd.v = 0;
            nd.dv = 0;
            const double c = std::cos(nd.theta);
            nd.log_f = side.log_f_end + std::log(c / std::cos(side.theta_end));
            nd.p = -std::tan(nd.theta);
            nd.dp = -1 / (c * c);
        };
        for (std::size_t i = 0; i < points; ++i) nodes[i].r = i == mid ? 0.0 : grid[i];

        std::vector<double> fwd, bwd;
        for (std::size_t i = mid + 1; i < points && nodes[i].r <= L + mu; ++i) fwd.push_back(nodes[i].r);
        for (std::size_t i = mid; i-- > 0 && nodes[i].r >= -(L + mu);) bwd.push_back(nodes[i].r);
        const auto sf = shoot(flow, State{0, 0}, 0, fwd, tol);
        const auto sb = shoot(flow, State{0, 0}, 0, bwd, tol);
        fill_flow(mid, State{0, 0});
        for (std::size_t k = 0; k < sf.size(); ++k) fill_flow(mid + 1 + k, sf[k]);
        for (std::size_t k = 0; k < sb.size(); ++k) fill_flow(mid - 1 - k, sb[k]);
        for (std::size_t i = mid + 1 + sf.size(); i < points; ++i) fill_tail(i, pos, L + mu);
        for (std::size_t i = 0; i < mid - sb.size(); ++i) fill_tail(i, neg, -(L + mu));
        return nodes;
    };

    std::size_t core_points = params.grid | 1;
    double collar = params.collar_fraction * (r0 - L - mu);
    int retries = 0;
    for (;; ++retries) {
        if (retries > params.max_smoothing_retries) {
            throw StageError("smoothing", "curvature admissibility failed after collar halving");
        }
        const double r_s = r0 - collar;
        const std::vector<Node> core = staged("assemble", [&] { return sample_core(r_s, core_points); });

        // epsilon: ric_radial <= ric_tangential iff 1 + eps^2 f^2 P' >= 0
        double worst = 0;
        for (const Node& nd : core) worst = std::max(worst, -std::exp(2 * nd.log_f) * nd.dp);
        double eps = params.epsilon_start;
        int halvings = 0;
        while (eps * eps * worst >= 1) {
            if (++halvings > params.max_epsilon_halvings) throw StageError("epsilon", "epsilon floor reached");
            eps /= 2;
        }

        std::vector<double> r, w, w1, w2, u, u1, u2;
        const std::size_t caps = params.cap_nodes;
        const std::size_t total = core.size() + 2 * caps;
        for (auto* vec : {&r, &w, &w1, &w2, &u, &u1, &u2}) vec->reserve(total);

        double cap_radius[2];
        // side = -1 left (prepend, reversed later), +1 right
        auto cap = [&](const Node& edge, double sign, std::vector<double>& cr, std::vector<double>& cw,
                       std::vector<double>& cw1, std::vector<double>& cw2) {
            const double f = std::exp(edge.log_f);
            const double ws = eps * f;
            const double k = -sign * eps * f * edge.p;  // |w'| at the glue point
            if (!(k >= 0 && k < 1)) throw StageError("smoothing", "collar slope not in [0, 1)");
            const double phi = std::acos(k);
            const double rho = ws / std::sin(phi);
            // The neck can be thinner than the spacing of doubles near r0.
            const double step = rho * phi / double(caps);
            const double ulp = std::nextafter(std::abs(edge.r), INFINITY) - std::abs(edge.r);
            if (!(step > 4 * ulp)) {
                throw StageError("smoothing", "cap radius " + sci(rho) + " at r = " + sci(edge.r) +
                                                  " is below double resolution; lower L or raise gamma");
            }
            for (std::size_t j = 1; j <= caps; ++j) {
                const double ang = phi * double(caps - j) / double(caps);
                cr.push_back(edge.r + sign * rho * phi * double(j) / double(caps));
                cw.push_back(j == caps ? 0.0 : rho * std::sin(ang));
                cw1.push_back(-sign * std::cos(ang));
                cw2.push_back(j == caps ? 0.0 : -std::sin(ang) / rho);
            }
            return rho;
        };
        std::vector<double> lr, lw, lw1, lw2, rr, rw, rw1, rw2;
        cap_radius[0] = cap(core.front(), -1, lr, lw, lw1, lw2);
        cap_radius[1] = cap(core.back(), 1, rr, rw, rw1, rw2);
        const double u_end = std::exp(log_u_end);
        auto push_cap = [&](double rv, double wv, double d1, double d2) {
            r.push_back(rv);
            w.push_back(wv);
            w1.push_back(d1);
            w2.push_back(d2);
            u.push_back(u_end);
            u1.push_back(0);
            u2.push_back(0);
        };
        for (std::size_t j = caps; j-- > 0;) push_cap(lr[j], lw[j], lw1[j], lw2[j]);
        for (const Node& nd : core) {
            const double f = std::exp(nd.log_f);
            const double uu = std::exp(nd.log_u);
            r.push_back(nd.r);
            w.push_back(eps * f);
            w1.push_back(eps * f * nd.p);
            w2.push_back(eps * f * (nd.dp + nd.p * nd.p));
            u.push_back(uu);
            u1.push_back(nd.v * uu);
            u2.push_back((nd.dv + nd.v * nd.v) * uu);
        }
        for (std::size_t j = 0; j < caps; ++j) push_cap(rr[j], rw[j], rw1[j], rw2[j]);

        WarpedMetric metric = staged("assemble", [&] {
            return WarpedMetric(n, r, w, w1, w2, geometry::Topology::TwoCaps);
        });
        RadialField ufield(u, u1, u2, geometry::FieldKind::Weight);

        const auto prof = staged("smoothing", [&] { return geometry::curvature_profile(metric); });
        const auto lap = geometry::laplacian_radial(metric, ufield);

        // Admissibility of the blend: ric_min >= n-1 on collar and caps, and
        // ric_radial is the minimal eigenvalue everywhere.
        bool ok = true;
        double min_ric_collar = std::numeric_limits<double>::infinity();
        double order_defect = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const bool in_core = i >= caps && i < caps + core.size();
            const double scale = 1 + std::abs(prof.ric_radial[i]);
            order_defect = std::max(order_defect, (prof.ric_radial[i] - prof.ric_tangential[i]) / scale);
            if (!in_core || std::abs(r[i]) > L + mu) {
                min_ric_collar = std::min(min_ric_collar, prof.ric_min[i]);
            }
        }
        if (order_defect > 1e-9) ok = false;
        if (min_ric_collar < m * (1 - 1e-9)) ok = false;
        const auto check = spectral::verify_spectral_condition(metric, ufield, gamma, 1.0);
        if (!check.holds) ok = false;
        if (!ok) {
            collar /= 2;
            continue;
        }

        // Pointwise identity on the unsmoothed region.
        double residual = 0;
        for (std::size_t i = caps; i < caps + core.size(); ++i) {
            const double rel = -gamma * lap[i] / u[i] + prof.ric_radial[i] - m;
            residual = std::max(residual, std::abs(rel));
        }

        // Q = -a on [2 delta, L] on both sides.
        double plateau = 0;
        for (const Node& nd : core) {
            const double x = std::abs(nd.r);
            if (x >= 2 * delta && x <= L) {
                const double q = q_of(n, nd.theta);
                plateau = std::max(plateau, std::abs(q + (nd.r > 0 ? ab.a : -ab.a)));
            }
        }
        if (!(plateau <= 10 * tol)) {
            throw StageError("plateau", "|Q + a| = " + sci(plateau) + " on [2 delta, L]");
        }

        // u even, Q odd, f even under r -> -r on the symmetric core grid.
        double symmetry = 0;
        for (std::size_t i = 0, j = core.size() - 1; i < j; ++i, --j) {
            const Node& p = core[j];
            const Node& q = core[i];
            symmetry = std::max(symmetry, std::abs(p.log_u - q.log_u));
            const double qp = q_of(n, p.theta), qq = q_of(n, q.theta);
            symmetry = std::max(symmetry, std::abs(qp + qq) / (1 + std::abs(qp)));
            symmetry = std::max(symmetry, std::abs(std::expm1(p.log_f - q.log_f)));
        }

        // Tail: integrate the flow itself and compare with c sin(r0 - r) on
        // the last 20% of [L + mu, r0] inside the collar cut.
        double tail_fit = 0;
        {
            const double start = L + mu + 0.8 * (r0 - L - mu);
            std::vector<double> times;
            for (const Node& nd : core) {
                if (nd.r >= start && nd.r <= r_s) times.push_back(nd.r);
            }
            if (!times.empty()) {
                const auto st = shoot(flow, end_pos, L + mu, times, tol);
                double fmax = 0;
                std::vector<double> diff;
                for (std::size_t k = 0; k < times.size(); ++k) {
                    const double f_num = std::exp(st[k][1] / m - gamma / m * log_u_end);
                    const double f_fit = c_pos * std::sin(r0 - times[k]);
                    fmax = std::max(fmax, f_num);
                    diff.push_back(std::abs(f_num - f_fit));
                }
                for (double dd : diff) tail_fit = std::max(tail_fit, dd / fmax);
            }
        }

        const auto lambda = staged("spectrum", [&] {
            return spectral::principal_eigenvalue(
                {metric, gamma, RadialField(prof.ric_min, geometry::FieldKind::Potential)});
        });
        const auto diam = geometry::diameter_estimate(metric);

        ConstructionReport rep{
            "large-diameter", n, gamma, metric, ufield, delta, mu, ab.a, ab.b, r0, eps, residual,
            lambda, diam.value, diam.exact, std::nullopt, {}};
        auto& dg = rep.diagnostics;
        dg["coupling_residual"] = coupling_residual(n, gamma, ab.a, ab.b);
        dg["k"] = ab.k;
        dg["alpha"] = ab.alpha;
        dg["delta0"] = ds.delta0;
        dg["q_small"] = ds.q_small;
        dg["q_at_delta"] = ds.q_at_delta;
        dg["delta_iterations"] = ds.iterations;
        dg["theta_end"] = end_pos[0];
        dg["r0_event"] = r0_event;
        dg["r0_event_gap"] = std::abs(r0_event - r0);
        dg["c_tail"] = c_pos;
        dg["plateau_deviation"] = plateau;
        dg["symmetry_error"] = symmetry;
        dg["tail_fit_error"] = tail_fit;
        dg["collar_width"] = collar;
        dg["smoothing_retries"] = retries;
        dg["cap_radius"] = std::min(cap_radius[0], cap_radius[1]);
        dg["min_ric_collar"] = min_ric_collar;
        dg["epsilon_halvings"] = halvings;
        dg["spectral_condition_margin"] = check.worst_relative;
        dg["u_max"] = u_end;
        return rep;
    }
}

Jet PeriodicWarp::operator()(double r) const {
    const double k = frequency;
    return {base + amplitude * std::cos(k * r), -amplitude * k * std::sin(k * r),
            -amplitude * k * k * std::cos(k * r)};
}

double PeriodicWarp::period() const { return 2 * std::numbers::pi / frequency; }

namespace {

struct PeriodicBuild {
    WarpedMetric metric;
    RadialField u;
    double epsilon;
    int halvings;
};

PeriodicBuild build_periodic(const SupercriticalParams& p, std::size_t points) {
    const int n = p.n;
    std::vector<double> grid = numerics::uniform_grid(0, p.f.period(), points);
    std::vector<Jet> f(points);
    for (std::size_t i = 0; i < points; ++i) f[i] = p.f(grid[i]);
    f.back() = f.front();

    // ric_radial <= ric_tangential iff eps^2 (f'^2 - f f'') <= 1
    double worst = 0;
    for (const Jet& j : f) worst = std::max(worst, j.d1 * j.d1 - j.value * j.d2);
    double eps = p.epsilon;
    int halvings = 0;
    while (eps * eps * worst > 1) {
        if (++halvings > p.max_epsilon_halvings) throw StageError("epsilon", "epsilon floor reached");
        eps /= 2;
    }

    std::vector<double> w(points), w1(points), w2(points), u(points), u1(points), u2(points);
    for (std::size_t i = 0; i < points; ++i) {
        const Jet& j = f[i];
        w[i] = eps * j.value;
        w1[i] = eps * j.d1;
        w2[i] = eps * j.d2;
        // u = f^{2-n}
        const double e = 2.0 - n;
        const double uu = std::pow(j.value, e);
        const double g = j.d1 / j.value;
        u[i] = uu;
        u1[i] = e * g * uu;
        u2[i] = e * ((e - 1) * g * g + j.d2 / j.value) * uu;
    }
    return {WarpedMetric(n, std::move(grid), std::move(w), std::move(w1), std::move(w2),
                         geometry::Topology::Periodic),
            RadialField(std::move(u), std::move(u1), std::move(u2), geometry::FieldKind::Weight), eps,
            halvings};
}

}  // namespace

ConstructionReport build_supercritical_example(const SupercriticalParams& p) {
    if (p.n < 3) throw RangeError("supercritical example needs n >= 3");
    const double gamma0 = double(p.n - 1) / double(p.n - 2);
    if (!(p.gamma > gamma0)) {
        throw RangeError("gamma must exceed (n-1)/(n-2) = " + sci(gamma0));
    }
    if (!(p.f.base > std::abs(p.f.amplitude)) || p.f.amplitude == 0 || p.f.frequency < 1) {
        throw InvalidInput("f must be positive and nonconstant: base > |amplitude| > 0, frequency >= 1");
    }
    if (p.grid < 17) throw InvalidInput("grid must have at least 17 points");
    if (!(p.epsilon > 0)) throw InvalidInput("epsilon must be positive");

    auto solve = [&](std::size_t points) {
        PeriodicBuild pb = staged("assemble", [&] { return build_periodic(p, points); });
        const auto prof = geometry::curvature_profile(pb.metric);
        const auto lambda = staged("spectrum", [&] {
            return spectral::principal_eigenvalue(
                {pb.metric, p.gamma, RadialField(prof.ric_min, geometry::FieldKind::Potential)});
        });
        const double beta = gamma0 * pb.u.min() * pb.u.min();
        const auto coer = staged("coercivity", [&] {
            return spectral::coercivity_constant(pb.metric, pb.u, p.gamma, gamma0, beta);
        });
        return std::tuple{pb, prof, lambda, coer};
    };

    auto [pb, prof, lambda, coer] = solve(p.grid);
    const auto lap = geometry::laplacian_radial(pb.metric, pb.u);
    double residual = 0;
    for (std::size_t i = 0; i < pb.metric.size(); ++i) {
        residual = std::max(residual, std::abs(-gamma0 * lap[i] / pb.u[i] + prof.ric_radial[i]));
    }
    double order_defect = 0;
    for (std::size_t i = 0; i < pb.metric.size(); ++i) {
        order_defect = std::max(order_defect, (prof.ric_radial[i] - prof.ric_tangential[i]) /
                                                  (1 + std::abs(prof.ric_radial[i])));
    }
    if (order_defect > 1e-12) throw StageError("epsilon", "ric_radial is not the minimal eigenvalue");

    const std::size_t half_points = (p.grid - 1) / 2 + 1;
    auto [pb_h, prof_h, lambda_h, coer_h] = solve(half_points);
    (void)pb_h;
    (void)prof_h;

    const double tol = 1e-6;
    if (!(coer.extrapolated > 0)) throw StageError("coercivity", "c(M) is not positive");
    if (!(lambda.extrapolated >= coer.extrapolated - tol)) {
        throw StageError("coercivity", "lambda1 below c(M)");
    }

    const auto diam = geometry::diameter_estimate(pb.metric);
    ConstructionReport rep{"supercritical", p.n, p.gamma, pb.metric, pb.u, nan, nan, nan, nan, nan,
                           pb.epsilon, residual, lambda, diam.value, diam.exact, coer, {}};
    auto& dg = rep.diagnostics;
    dg["gamma0"] = gamma0;
    dg["beta"] = gamma0 * pb.u.min() * pb.u.min();
    dg["epsilon_halvings"] = pb.halvings;
    dg["lambda1_half_grid"] = lambda_h.extrapolated;
    dg["coercivity_half_grid"] = coer_h.extrapolated;
    dg["lambda1_halving_gap"] = std::abs(lambda.extrapolated - lambda_h.extrapolated);
    dg["coercivity_halving_gap"] = std::abs(coer.extrapolated - coer_h.extrapolated);
    dg["lambda1_minus_coercivity"] = lambda.extrapolated - coer.extrapolated;
    return rep;
}

}  // namespace warplab::counterexamples
