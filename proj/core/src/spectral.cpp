#include "warplab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "warplab/errors.hpp"

namespace warplab::spectral {

namespace {

std::vector<std::size_t> level_nodes(std::size_t points, std::size_t stride) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i + 1 < points; i += stride) idx.push_back(i);
    idx.push_back(points - 1);
    return idx;
}

// Smallest number of grid points for which a coarse level is still useful.
constexpr std::size_t min_level_points = 17;

std::vector<double> full_grid_vector(const geometry::WarpedMetric& metric, const Pencil& pencil,
                                     const std::vector<double>& y) {
    std::vector<double> out(metric.size(), 0.0);
    for (std::size_t k = 0; k < pencil.nodes.size(); ++k) out[pencil.nodes[k]] = y[k];
    if (metric.topology() == geometry::Topology::Periodic) out.back() = out.front();
    return out;
}

int usable_levels(std::size_t points, int requested) {
    int levels = std::max(1, std::min(requested, 3));
    while (levels > 1 && (points - 1) / (std::size_t{1} << (levels - 1)) + 1 < min_level_points) --levels;
    return levels;
}

template <class Solve>
SpectralResult solve_levels(const geometry::WarpedMetric& metric, const SolveOptions& options,
                            Solve&& solve) {
    const int levels = usable_levels(metric.size(), options.levels);
    std::vector<GridLevel> record;
    std::vector<double> fine_vec;
    for (int l = levels - 1; l >= 0; --l) {
        const std::size_t stride = std::size_t{1} << l;
        auto [pencil, pair] = solve(stride);
        record.push_back({pencil.nodes.size() + (metric.topology() == geometry::Topology::Periodic ? 1 : 0),
                          pair.value});
        if (stride == 1) fine_vec = full_grid_vector(metric, pencil, pair.vector);
    }
    const double fine = record.back().lambda1;
    const double extrapolated =
        record.size() >= 2 ? fine + (fine - record[record.size() - 2].lambda1) / 3.0 : fine;
    return {fine, extrapolated, geometry::RadialField(std::move(fine_vec)), std::move(record)};
}

numerics::SymmetricTridiagonal build_matrix(const std::vector<Face>& faces,
                                            const std::vector<double>& diagonal) {
    const std::size_t m = diagonal.size();
    std::vector<double> diag(diagonal), off(m > 0 ? m - 1 : 0, 0.0);
    double corner = 0.0;
    bool cyclic = false;
    for (const Face& f : faces) {
        diag[f.a] += f.weight * f.ca * f.ca;
        if (f.a == f.b && f.cb == 0.0) continue;
        diag[f.b] += f.weight * f.cb * f.cb;
        const double c = -f.weight * f.ca * f.cb;
        const std::size_t lo = std::min(f.a, f.b), hi = std::max(f.a, f.b);
        if (hi == lo + 1) {
            off[lo] += c;
        } else if (lo == 0 && hi == m - 1 && m >= 3) {
            corner += c;
            cyclic = true;
        } else {
            throw InvalidInput("face couples non-adjacent unknowns");
        }
    }
    return numerics::SymmetricTridiagonal(std::move(diag), std::move(off), corner, cyclic);
}

}  // namespace

Pencil::Pencil(std::vector<Face> f, std::vector<double> d, std::vector<double> m,
               std::vector<std::size_t> n)
    : faces(std::move(f)),
      diagonal(std::move(d)),
      mass(std::move(m)),
      nodes(std::move(n)),
      stiffness(build_matrix(faces, diagonal)) {
    if (mass.size() != diagonal.size() || nodes.size() != diagonal.size())
        throw GridMismatch("pencil arrays differ in length");
}

double Pencil::quadratic_form(std::span<const double> y) const {
    double s = 0.0;
    for (const Face& f : faces) {
        const double d = f.ca * y[f.a] - f.cb * y[f.b];
        s += f.weight * d * d;
    }
    for (std::size_t i = 0; i < diagonal.size(); ++i) s += diagonal[i] * y[i] * y[i];
    return s;
}

double Pencil::mass_norm2(std::span<const double> y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += mass[i] * y[i] * y[i];
    return s;
}

Pencil assemble(const geometry::WarpedMetric& metric, double gamma,
                std::span<const double> potential, std::size_t stride, Sector sector) {
    if (potential.size() != metric.size()) throw GridMismatch("potential is not sampled on the metric grid");
    if (stride == 0) throw InvalidInput("stride must be positive");
    const int n = metric.dimension();
    const auto r = metric.grid();
    const auto w = metric.warp();
    const auto dw = metric.warp_d1();
    const bool periodic = metric.topology() == geometry::Topology::Periodic;
    const auto sel = level_nodes(metric.size(), stride);
    const std::size_t s = sel.size();

    auto dens = [n](double x) { return std::pow(x, n - 1); };
    // Node index -> unknown index, or npos when the value is pinned to 0.
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> unknown(s, npos);
    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < s; ++k) {
        if (periodic && k + 1 == s) {
            unknown[k] = 0;
            continue;
        }
        if (sector == Sector::FirstAngular && metric.is_pole(sel[k])) continue;
        unknown[k] = nodes.size();
        nodes.push_back(sel[k]);
    }
    const std::size_t m = nodes.size();
    if (m < (periodic ? 3u : 1u)) throw InvalidInput("too few unknowns for the eigenproblem");

    std::vector<Face> faces;
    std::vector<double> diagonal(m, 0.0), mass(m, 0.0);
    std::vector<double> node_mass(s, 0.0);

    for (std::size_t k = 0; k + 1 < s; ++k) {
        const std::size_t i = sel[k], j = sel[k + 1];
        const double h = r[j] - r[i];
        const double wm = 0.5 * (w[i] + w[j]) + h * (dw[i] - dw[j]) / 8.0;
        const double mm = dens(wm);
        // Half-cell masses; a pole cell integrates s^{n-1}.
        node_mass[k] += metric.is_pole(i) ? 0.5 * h * mm / n : 0.25 * h * (dens(w[i]) + mm);
        node_mass[k + 1] += metric.is_pole(j) ? 0.5 * h * mm / n : 0.25 * h * (dens(w[j]) + mm);

        const double cond = gamma * mm / h;
        if (cond == 0.0) continue;
        const std::size_t a = unknown[k], b = unknown[k + 1];
        if (a != npos && b != npos) {
            faces.push_back({a, b, cond});
        } else if (a != npos) {
            faces.push_back({a, a, cond, 1.0, 0.0});
        } else if (b != npos) {
            faces.push_back({b, b, cond, 1.0, 0.0});
        }
    }
    if (periodic) node_mass[0] += node_mass[s - 1];

    for (std::size_t k = 0; k < s; ++k) {
        const std::size_t a = unknown[k];
        if (a == npos || (periodic && k + 1 == s)) continue;
        const std::size_t i = sel[k];
        double v = potential[i];
        if (sector == Sector::FirstAngular) v += gamma * (n - 1) / (w[i] * w[i]);
        mass[a] = node_mass[k];
        diagonal[a] = v * node_mass[k];
    }
    return Pencil(std::move(faces), std::move(diagonal), std::move(mass), std::move(nodes));
}

EigenPair lowest_eigenpair(const Pencil& pencil, const SolveOptions& options) {
    const auto& a = pencil.stiffness;
    const std::size_t m = a.size();
    std::vector<double> scale(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(pencil.mass[i] > 0.0)) throw InvalidInput("pencil mass must be positive");
        scale[i] = 1.0 / std::sqrt(pencil.mass[i]);
    }
    std::vector<double> diag(m), off(m > 0 ? m - 1 : 0);
    for (std::size_t i = 0; i < m; ++i) diag[i] = a.diag()[i] * scale[i] * scale[i];
    for (std::size_t i = 0; i + 1 < m; ++i) off[i] = a.off()[i] * scale[i] * scale[i + 1];
    const double corner = a.cyclic() ? a.corner() * scale[0] * scale[m - 1] : 0.0;
    const numerics::SymmetricTridiagonal c(std::move(diag), std::move(off), corner, a.cyclic());

    auto [lo, hi] = c.gershgorin();
    const double span = std::max(std::abs(lo), std::abs(hi));
    lo -= 1e-12 * span + std::numeric_limits<double>::min();
    hi += 1e-12 * span + std::numeric_limits<double>::min();
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (c.count_below(mid) >= 1) hi = mid; else lo = mid;
    }
    const double value = 0.5 * (lo + hi);

    const double shift = lo - 1e-10 * std::max(1.0, std::abs(lo));
    std::vector<double> z(m, 1.0 / std::sqrt(static_cast<double>(m)));
    bool converged = false;
    for (int it = 0; it < options.max_inverse_iterations; ++it) {
        auto next = c.solve_shifted(shift, z);
        double norm = 0.0, sum = 0.0;
        for (double x : next) {
            norm += x * x;
            sum += x;
        }
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw ConvergenceError("inverse iteration broke down");
        const double sign = sum < 0.0 ? -1.0 : 1.0;
        double diff = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            next[i] *= sign / norm;
            diff = std::max(diff, std::abs(next[i] - z[i]));
        }
        z = std::move(next);
        if (diff <= options.inverse_tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ConvergenceError("inverse iteration did not converge");

    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = z[i] * scale[i];
    const double nrm = std::sqrt(pencil.mass_norm2(y));
    for (double& x : y) x /= nrm;
    // The bisection bracket is only as tight as eps * |A|; the face-wise
    // Rayleigh quotient of the converged vector is accurate to eps * lambda.
    const double rq = pencil.quadratic_form(y);
    const bool consistent = std::abs(rq - value) <= 1e-6 * (1.0 + std::abs(value));
    return {consistent ? rq : value, std::move(y)};
}

SpectralResult principal_eigenvalue(const SturmLiouvilleProblem& problem, const SolveOptions& options) {
    const auto& metric = problem.metric;
    if (!(problem.gamma >= 0.0)) throw InvalidInput("gamma must be nonnegative");
    if (problem.potential.size() != metric.size()) throw GridMismatch("potential is not sampled on the metric grid");
    geometry::require_smooth_caps(metric);
    const auto v = problem.potential.values();

    if (problem.gamma == 0.0 && problem.sector == Sector::Radial) {
        // Multiplication operator: the spectrum is the range of V.
        const auto it = std::min_element(v.begin(), v.end());
        const double vmin = *it;
        const auto pencil = assemble(metric, 0.0, v, 1, problem.sector);
        std::vector<double> y(pencil.nodes.size(), 0.0);
        std::size_t k = 0;
        const auto target = static_cast<std::size_t>(it - v.begin());
        while (k + 1 < pencil.nodes.size() && pencil.nodes[k] != target) ++k;
        y[k] = 1.0 / std::sqrt(pencil.mass[k]);
        return {vmin, vmin, geometry::RadialField(full_grid_vector(metric, pencil, y)),
                {{metric.size(), vmin}}};
    }

    return solve_levels(metric, options, [&](std::size_t stride) {
        auto pencil = assemble(metric, problem.gamma, v, stride, problem.sector);
        auto pair = lowest_eigenpair(pencil, options);
        return std::pair{std::move(pencil), std::move(pair)};
    });
}

double rayleigh_quotient(const SturmLiouvilleProblem& problem, const geometry::RadialField& phi) {
    if (phi.size() != problem.metric.size()) throw GridMismatch("phi is not sampled on the metric grid");
    const auto pencil = assemble(problem.metric, problem.gamma, problem.potential.values(), 1, problem.sector);
    std::vector<double> y(pencil.nodes.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = phi[pencil.nodes[k]];
    const double den = pencil.mass_norm2(y);
    if (!(den > 0.0)) throw InvalidInput("rayleigh quotient of the zero function");
    return pencil.quadratic_form(y) / den;
}

ConditionCheck verify_spectral_condition(const geometry::WarpedMetric& metric,
                                         const geometry::RadialField& u, double gamma,
                                         double lambda, const VerifyOptions& options) {
    if (u.size() != metric.size()) throw GridMismatch("u is not sampled on the metric grid");
    if (!(u.min() > 0.0)) throw InvalidInput("u must be positive");
    const auto curv = geometry::curvature_profile(metric);
    const auto lap = geometry::laplacian_radial(metric, u);
    const int n = metric.dimension();
    const auto r = metric.grid();

    ConditionCheck out{true, std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity(), r.front(),
                       std::vector<double>(metric.size())};
    bool any = false;
    for (std::size_t i = 0; i < metric.size(); ++i) {
        const double res = u[i] * curv.ric_min[i] - gamma * lap[i] - (n - 1) * lambda * u[i];
        out.residual[i] = res;
        if (r[i] < options.r_min || r[i] > options.r_max) continue;
        any = true;
        out.worst_residual = std::min(out.worst_residual, res);
        if (res / u[i] < out.worst_relative) {
            out.worst_relative = res / u[i];
            out.location = r[i];
        }
    }
    if (!any) throw InvalidInput("verification window contains no grid points");
    out.holds = out.worst_relative >= -options.tolerance;
    return out;
}

SpectralResult coercivity_constant(const geometry::WarpedMetric& metric, const geometry::RadialField& u,
                                   double gamma, double gamma0, double beta,
                                   const SolveOptions& options) {
    if (u.size() != metric.size()) throw GridMismatch("u is not sampled on the metric grid");
    if (!(u.min() > 0.0)) throw InvalidInput("u must be positive");
    if (gamma < gamma0 || beta < 0.0) throw InvalidInput("coercivity needs gamma >= gamma0 and beta >= 0");
    const std::vector<double> zero(metric.size(), 0.0);
    return solve_levels(metric, options, [&](std::size_t stride) {
        const auto base = assemble(metric, 1.0, zero, stride);
        auto uu = [&](std::size_t k) { return u[base.nodes[k]]; };
        std::vector<Face> faces;
        for (const Face& f : base.faces) {
            if (gamma > gamma0) faces.push_back({f.a, f.b, (gamma - gamma0) * f.weight, f.ca, f.cb});
            if (beta > 0.0) faces.push_back({f.a, f.b, beta * f.weight, f.ca / uu(f.a), f.cb / uu(f.b)});
        }
        Pencil pencil(std::move(faces), std::vector<double>(base.mass.size(), 0.0), base.mass, base.nodes);
        auto pair = lowest_eigenpair(pencil, options);
        return std::pair{std::move(pencil), std::move(pair)};
    });
}

}  // namespace warplab::spectral
