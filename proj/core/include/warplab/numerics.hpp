#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace warplab::numerics {

// End condition of an interpolating cubic spline.
//
// `Natural` forces s'' = value at the end (0 by default); `Clamped` forces
// s' = value. For the nodal-derivative correction on uniform grids the
// former extends the moments oddly and the latter evenly, which is exact
// for odd (warp at a pole) and even (radial function at a pole) data.
enum class EndKind { Natural, Clamped, NotAKnot, Periodic };

struct SplineEnd {
    EndKind kind = EndKind::NotAKnot;
    double value = 0.0;

    static SplineEnd natural(double second = 0.0) { return {EndKind::Natural, second}; }
    static SplineEnd clamped(double slope) { return {EndKind::Clamped, slope}; }
    static SplineEnd not_a_knot() { return {EndKind::NotAKnot, 0.0}; }
    static SplineEnd periodic() { return {EndKind::Periodic, 0.0}; }
};

// C^2 interpolating cubic spline on a strictly increasing, possibly
// nonuniform, set of knots.
class CubicSpline {
public:
    CubicSpline(std::vector<double> x, std::vector<double> y,
                SplineEnd left = SplineEnd::not_a_knot(),
                SplineEnd right = SplineEnd::not_a_knot());

    double operator()(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;

    std::span<const double> knots() const { return x_; }
    std::span<const double> moments() const { return m_; }

    // First and second derivatives at the knots. On uniform grids the
    // second derivative carries the O(h^2) moment correction, which makes
    // both nodal derivatives fourth-order accurate.
    std::vector<double> nodal_first_derivative() const;
    std::vector<double> nodal_second_derivative() const;

private:
    std::size_t interval(double t) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second-derivative moments
    SplineEnd left_;
    SplineEnd right_;
    bool uniform_;
};

bool is_uniform(std::span<const double> x, double rel_tol = 1e-10);

std::vector<double> uniform_grid(double a, double b, std::size_t points);

// Integral of g over the grid using the endpoint-corrected trapezoid rule
// h(g0+g1)/2 + h^2(g0'-g1')/12 on each interval (fourth order).
double integrate(std::span<const double> x, std::span<const double> g,
                 std::span<const double> dg);

// Running integral from x[0] with the same rule; result[0] == 0.
std::vector<double> cumulative_integral(std::span<const double> x,
                                        std::span<const double> g,
                                        std::span<const double> dg);

// General tridiagonal solve (Thomas algorithm). sub[0] and sup[n-1] unused.
std::vector<double> solve_tridiagonal(std::span<const double> sub,
                                      std::span<const double> diag,
                                      std::span<const double> sup,
                                      std::span<const double> rhs);

// Real symmetric tridiagonal matrix, optionally with the cyclic corner
// entry (0, N-1). The LDL^T elimination fills only the last column, so
// inertia counts and shifted solves stay O(N).
class SymmetricTridiagonal {
public:
    SymmetricTridiagonal(std::vector<double> diag, std::vector<double> off,
                         double corner = 0.0, bool cyclic = false);

    std::size_t size() const { return diag_.size(); }
    std::span<const double> diag() const { return diag_; }
    std::span<const double> off() const { return off_; }
    double corner() const { return corner_; }
    bool cyclic() const { return cyclic_; }

    // Number of eigenvalues strictly below sigma (Sylvester inertia).
    std::size_t count_below(double sigma) const;

    // Solves (T - sigma I) x = rhs without pivoting; intended for shifts
    // below the spectrum where T - sigma I is positive definite.
    std::vector<double> solve_shifted(double sigma, std::span<const double> rhs) const;

    std::vector<double> multiply(std::span<const double> x) const;

    // Gershgorin enclosure of the spectrum.
    std::pair<double, double> gershgorin() const;

private:
    struct Factor {
        std::vector<double> pivot;
        std::vector<double> lower;  // multipliers to the next row
        std::vector<double> last;   // multipliers to the last row (cyclic fill)
    };
    Factor factor(double sigma) const;

    std::vector<double> diag_;
    std::vector<double> off_;
    double corner_;
    bool cyclic_;
};

}  // namespace warplab::numerics
