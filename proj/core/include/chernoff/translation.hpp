#ifndef CHERNOFF_TRANSLATION_HPP
#define CHERNOFF_TRANSLATION_HPP

#include <functional>
#include <string>
#include <vector>

#include "chernoff/function1d.hpp"
#include "chernoff/rates.hpp"

namespace chernoff {

// Decay profile v on (0, inf) controlling how fast the perturbed shift
// family approaches the plain translation semigroup.  The two flags are
// declarations by the constructor; experiments that rely on them verify
// both on a lattice before trusting the declared values.
struct RateFunction {
    std::function<double(double)> eval;
    bool continuous = false;
    bool monotone_nonincreasing = false;
    std::string name;
    double operator()(double x) const { return eval(x); }
};

// Fast-decay presets: convergence of the iterated family is then faster
// than any power of 1/n.
RateFunction rate_inv_x();                    // 1/x
RateFunction rate_power(double k);            // (1+x)^-k
RateFunction rate_exp_decay();                // exp(-x)
RateFunction rate_exp_exp_decay();            // exp(-exp(x))

// Slow-decay presets: convergence becomes arbitrarily slow.
RateFunction rate_inv_log();                  // 1/log(x+e)
RateFunction rate_inv_loglog();               // 1/log(log(x+e^e))

// Piecewise-linear profile through (xs, vs), constant beyond the ends.
RateFunction rate_from_table(std::vector<double> xs, std::vector<double> vs);

struct RateFunctionCheck {
    bool nonnegative = false;
    bool monotone = false;
    bool decayed = false;       // strictly smaller at the lattice end
    double first_value = 0.0;
    double last_value = 0.0;
};

// Samples v on a log lattice [x_lo, x_hi] and checks the declared shape.
RateFunctionCheck check_rate_function(const RateFunction& v, double x_lo = 1e-2,
                                      double x_hi = 1e6, int points = 97);

// ---- the shift family --------------------------------------------------

// Plain translation: x -> f(x + t).  Isometric on sup-norms.
Function1D apply_translation(const Function1D& f, double t);

// One member of the perturbed family: x -> f(x + t + t v(1/t)) for t > 0,
// and the identity at t = 0.
Function1D apply_chernoff_shift(const Function1D& f, double t, const RateFunction& v);

// n-th iterate of the t/n member in closed form: a single shift by
// t + t v(n/t).  Shifts commute, so this equals the n-fold composition;
// iterate_chernoff_shift_composed computes the latter for cross-checks.
Function1D iterate_chernoff_shift(const Function1D& f, double t, int n,
                                  const RateFunction& v);
Function1D iterate_chernoff_shift_composed(const Function1D& f, double t, int n,
                                           const RateFunction& v);

// ---- error-law measurement ---------------------------------------------

struct TranslationExperiment {
    Function1D f;
    RateFunction v;
    double T = 1.0;
    std::vector<int> n_values;
    Interval window{-8.0, 8.0};  // where sup-norms are taken
    int t_lattice_points = 512;
    double sup_tol = 1e-9;
};

struct TranslationLawRow {
    int n = 0;
    double measured = 0.0;    // sup over t in (0,T] of the iterate error
    double predicted = 0.0;   // modulus of f at T v(n/T)
    double discrepancy = 0.0;
};

struct TranslationLawReport {
    std::vector<TranslationLawRow> rows;
    double max_discrepancy = 0.0;
    double resolution_estimate = 0.0;  // sup movement under t-lattice doubling
    int t_lattice_points = 0;
    std::optional<OrderFit> fit;
    std::vector<ConvergenceRow> as_rows() const;
};

// Measures sup_{t in (0,T]} ||iterate(t,n) f - translation(t) f|| on a
// hybrid t-lattice (geometric near 0, uniform up to T) and compares with
// the modulus-of-continuity prediction, which is exact for continuous
// non-increasing v.  Requires both declared v flags.
TranslationLawReport exact_error_law(const TranslationExperiment& exp);

// Geometric-then-uniform lattice on (0, T], final point exactly T.
std::vector<double> hybrid_t_lattice(double T, int points);

// ---- norm non-convergence witness --------------------------------------

struct NormGapWitness {
    Function1D f;       // unit sup-norm ramp with knee at t^2/n
    double witness_x;   // point where iterate and semigroup differ by 1
};

// Family exhibiting pointwise but not norm convergence under v(x) = 1/x:
// at the witness point the t/n-iterate returns 1 while the semigroup
// returns 0, for every n.
NormGapWitness norm_nonconvergence_family(double t, int n);

}  // namespace chernoff

#endif
