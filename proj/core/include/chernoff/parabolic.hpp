#ifndef CHERNOFF_PARABOLIC_HPP
#define CHERNOFF_PARABOLIC_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "chernoff/function1d.hpp"

namespace chernoff {

// Coefficients of the operator A u = a u'' + b u' + c u, together with the
// working window on which sup and inf norms are taken.
struct ParabolicCoefficients {
    Function1D a, b, c;
    Interval window{-8.0, 8.0};

    // inf of a over the window; must be positive for every operation here.
    double ellipticity() const;
    int derivative_order() const;  // smallest order the three coefficients provide
    void validate() const;         // PreconditionError when ellipticity fails
};

// Worst-case error constant of four-point Lagrange interpolation on a
// uniform grid (covers centered and edge-shifted stencils, rounded up):
// |interpolant - f| <= kCubicInterpConstant * h^4 * max|f''''|.
inline constexpr double kCubicInterpConstant = 0.047;

// Function values on a uniform grid, extended constantly beyond the end
// nodes.  Off-node evaluation is four-point Lagrange interpolation.
// extension_margin says how far beyond the nodes the constant extension is
// trusted; evaluations past it raise WindowError.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(double x_lo, double h, std::vector<double> values);

    static GridFunction sample(const Function1D& f, Interval window, double h_target);

    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_lo_ + h_ * double(values_.size() - 1); }
    double spacing() const { return h_; }
    size_t size() const { return values_.size(); }
    double node(size_t i) const { return x_lo_ + h_ * double(i); }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double value(double x) const;  // interpolated, constant beyond the ends
    double max_abs() const;

    // max |f''''| from fourth differences, used for interpolation budgets.
    double fourth_derivative_estimate() const;

    double extension_margin = std::numeric_limits<double>::infinity();

private:
    double x_lo_ = 0.0;
    double h_ = 1.0;
    std::vector<double> values_;
};

// ---- the operator ------------------------------------------------------

// A f as a closed form; f must provide two more derivative orders than are
// requested of the result.
Function1D apply_operator(const ParabolicCoefficients& coeffs, const Function1D& f);

// A f on the grid via fourth-order stencils (one-sided near the ends).
GridFunction apply_operator(const ParabolicCoefficients& coeffs, const GridFunction& f);

// Coefficient functions of A^q expanded over derivatives of its argument:
//   A^q v = leading * v^(2q) + sum_{i<2q} lower[i] * v^(i),
// with leading = a^q.  Built by composing the first-order expansion q-1
// times; needs coefficient derivatives up to order 2q-2.
struct OperatorPowerExpansion {
    int q = 1;
    std::function<double(double)> leading;
    std::vector<std::function<double(double)>> lower;  // index = derivative order

    // Evaluates A^q v at x; v must provide 2q derivative orders.
    double apply(const Function1D& v, double x) const;
};

OperatorPowerExpansion operator_power_expansion(const ParabolicCoefficients& coeffs,
                                                int q);

// ---- interpolation inequality and derivative constants -----------------

struct LandauCheck {
    double lhs = 0.0;        // sup |u'| over the interior
    double rhs = 0.0;        // h sup|u''| + (1/h) sup|u| over the window
    Interval interior;       // window shrunk by 2h on the right
    bool holds(double tol = 1e-9) const { return lhs <= rhs + tol; }
};

// Two-sided data for the step inequality sup|u'| <= h sup|u''| + sup|u|/h.
// On a finite window the Taylor argument needs x+2h inside, so the left
// side is taken on the window shrunk by 2h.
LandauCheck landau_inequality_check(const Function1D& u, double h, Interval window);

// Constants C[n][k] with ||v^(n)|| <= sum_k C[n][k] ||A^k v||, produced by
// alternating the step inequality (odd orders, with h = 1 when the top
// coefficient vanishes and 1/(2 alpha) otherwise) with the solved-for
// leading-derivative form of the power expansion (even orders).
struct DerivativeConstantTable {
    int n_max = 0;
    std::vector<std::vector<double>> C;  // C[n][k], k <= floor((n+1)/2)

    // sum_k C[n][k] * power_norms[k], with power_norms[k] = ||A^k v||.
    double bound(int n, const std::vector<double>& power_norms) const;
};

DerivativeConstantTable derive_derivative_constants(const ParabolicCoefficients& coeffs,
                                                    int n_max);

// ---- the shift-combination step and its iteration ----------------------

// One Chernoff step
//   (S(t) f)(x) = 1/4 f(x + 2 sqrt(a(x) t)) + 1/4 f(x - 2 sqrt(a(x) t))
//               + 1/2 f(x + 2 b(x) t) + t c(x) f(x),
// off-node values by cubic interpolation.  Shifted points escaping the
// trusted extension margin raise WindowError; the step asserts the growth
// envelope ||S(t) f|| <= e^{||c|| t} ||f|| up to the interpolation budget.
GridFunction apply_chernoff_step(const ParabolicCoefficients& coeffs,
                                 const GridFunction& f, double t);

struct IterationResult {
    GridFunction result;
    double interpolation_budget = 0.0;  // accumulated over all steps
    double growth_bound = 1.0;          // e^{||c|| t}
};

// n steps of S(t/n); a WindowError in step k is rethrown with that step
// index attached.
IterationResult iterate_chernoff(const ParabolicCoefficients& coeffs,
                                 const GridFunction& f, double t, int n);

// ---- reference solutions ----------------------------------------------

enum class OracleQuality { fast, standard, high };

struct OracleResult {
    GridFunction solution;
    double accuracy_estimate = 0.0;
    std::string method;  // "kernel" or "crank-nicolson"
};

// Solution of u_t = A u, u(0) = f at time t on the nodes of f.  Constant
// coefficients use exact Gaussian-kernel convolution with doubling
// quadrature; variable coefficients use Crank-Nicolson over refined grids
// with Richardson comparison, refining until two quality levels agree to
// the target.  Non-convergence raises OracleAccuracyError carrying the
// best achieved agreement.
OracleResult reference_solution(const ParabolicCoefficients& coeffs,
                                const GridFunction& f, double t,
                                OracleQuality quality = OracleQuality::standard,
                                double target_accuracy = 1e-8);

}  // namespace chernoff

#endif
