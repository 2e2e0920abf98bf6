#ifndef CHERNOFF_FUNCTION1D_HPP
#define CHERNOFF_FUNCTION1D_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chernoff/errors.hpp"

namespace chernoff {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Scalar function on the real line together with the metadata the experiments
// need: how it is represented, how many derivatives can be evaluated, an
// optional exact modulus of continuity and an optional sup-norm bound.
//
// Piecewise-linear and grid-sampled functions extend constantly beyond their
// node range, so every evaluator is total on the line.
class Function1D {
public:
    enum class Kind { closed_form, piecewise_linear, sampled_grid };

    Function1D() = default;
    Function1D(Kind kind, std::function<double(double, int)> eval,
               int derivative_order)
        : kind_(kind), eval_(std::move(eval)),
          derivative_order_(derivative_order) {}

    double operator()(double x) const { return eval_(x, 0); }

    // k-th derivative; k must not exceed derivative_order_available().
    double derivative(double x, int k) const;

    Kind kind() const { return kind_; }
    int derivative_order_available() const { return derivative_order_; }

    // Kink locations of a piecewise-linear function; empty otherwise.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    std::optional<std::function<double(double)>> analytic_modulus;
    std::optional<double> bound;  // known sup-norm bound, if any
    std::string label;

    void set_breakpoints(std::vector<double> bps) { breakpoints_ = std::move(bps); }

private:
    Kind kind_ = Kind::closed_form;
    std::function<double(double, int)> eval_;
    int derivative_order_ = 0;
    std::vector<double> breakpoints_;
};

// ---- presets ----------------------------------------------------------

// 0 below 0, identity on [0,1], 1 above; modulus min(x,1).
Function1D ramp();

Function1D constant(double value);

// amplitude*sin(frequency*x); derivatives of any order.
Function1D sine(double amplitude = 1.0, double frequency = 1.0);

// exp(-((x-center)/width)^2); derivatives via the Hermite recurrence.
Function1D gaussian_bump(double center = 0.0, double width = 1.0);

// Polynomial with coefficients c[0] + c[1] x + ...; unbounded, so no
// sup-norm bound is attached.
Function1D polynomial(std::vector<double> coeffs);

// base + amp/(1+x^2); bounded and smooth with exact derivative closures.
Function1D rational_bump(double base, double amp);

// Odd C^infinity function equal to x on [0,1] and to 2 beyond 3, with
// slope between 0 and 1 throughout.  Its modulus of continuity is exactly
// x on [0,2], which makes it the canonical witness for arbitrarily slow
// Chernoff convergence.
Function1D smooth_slow_vector();

// Piecewise-linear interpolant of (xs, ys), constant beyond the ends.
Function1D piecewise_linear(std::vector<double> xs, std::vector<double> ys);

// Values on a uniform grid starting at x_lo with spacing h, constant
// beyond the ends, evaluated by linear interpolation.
Function1D sampled(double x_lo, double h, std::vector<double> values);

// ---- combinators ------------------------------------------------------

// x -> f(x + s); preserves kind, modulus, bound and derivative order.
Function1D shift(const Function1D& f, double s);

// f - g; piecewise-linear when both operands are (breakpoints merged).
Function1D difference(const Function1D& f, const Function1D& g);

// Wraps the k-th derivative of f as a function of its own.
Function1D derivative_function(const Function1D& f, int k);

// ---- sup-norm and range estimation ------------------------------------

struct SupNormEstimate {
    double value = 0.0;
    double grid_spacing = 0.0;  // final lattice spacing
    Interval domain;
};

struct RangeEstimate {
    double min_value = 0.0;
    double max_value = 0.0;
    double grid_spacing = 0.0;
};

// min/max of f over the interval on a refining lattice (breakpoints always
// included); refinement stops once two successive levels differ by < tol.
RangeEstimate range_on(const Function1D& f, Interval domain, double tol = 1e-9);

// sup |f| over the interval.  Exact for piecewise-linear functions since
// their kinks are lattice points.
SupNormEstimate sup_norm(const Function1D& f, Interval domain, double tol = 1e-9);

// inf f over the interval (used for ellipticity constants).
double inf_on(const Function1D& f, Interval domain, double tol = 1e-9);

// ---- modulus of continuity ---------------------------------------------

// sup |f(x1)-f(x2)| over pairs in the window with |x1-x2| <= x.  Uses the
// analytic modulus when the function carries one, otherwise a double
// lattice (window points x inner offsets) at the given spacing; the
// default spacing is x/64.  Monotone in x for a fixed spacing.
double modulus_of_continuity(const Function1D& f, double x, Interval domain);
double modulus_of_continuity(const Function1D& f, double x, Interval domain,
                             double spacing);

struct ModulusAxiomReport {
    bool zero_at_zero = false;
    bool monotone = false;
    bool continuity_proxy = false;
    bool semiadditive = false;
    bool ratio_nonincreasing = false;  // m(x)/x non-increasing (implies semiadditivity)
    bool all_axioms() const {
        return zero_at_zero && monotone && continuity_proxy && semiadditive;
    }
};

// Checks the modulus axioms for a candidate m on a sorted non-negative
// lattice.  Continuity is tested as a contraction of adjacent jumps under
// midpoint refinement; semiadditivity m(x+y) <= m(x)+m(y) is tested on all
// lattice pairs whose sum stays below the lattice end.
ModulusAxiomReport check_modulus_axioms(const std::function<double(double)>& m,
                                        const std::vector<double>& lattice,
                                        double tol = 1e-9);

}  // namespace chernoff

#endif
