#ifndef CHERNOFF_MATRIX_SEMIGROUP_HPP
#define CHERNOFF_MATRIX_SEMIGROUP_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "chernoff/errors.hpp"

namespace chernoff {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Spectral norm via power iteration on M^T M, relative tolerance on the
// Rayleigh quotient (default 1e-12).
double operator_norm(const Matrix& M, double tol = 1e-12);

// exp(tL) by scaling-and-squaring with a series core.  Throws RangeError
// when ||tL|| is large enough to overflow doubles.
Matrix expm(const Matrix& L, double t, double tol = 1e-12);

// Sum_{k<=m} t^k L^k f / k!, evaluated Horner style.
Vector taylor_polynomial_apply(const Matrix& L, const Vector& f, double t, int m);

// Operator norm of Z^n - Y^n minus its telescoped form
// sum_k Z^{n-k-1} (Z-Y) Y^k; zero up to roundoff for any pair.
double telescoping_residual(const Matrix& Z, const Matrix& Y, int n);

struct RemainderCheck {
    double lhs = 0.0;  // ||exp(tL) f - Taylor_m f||
    double rhs = 0.0;  // t^{m+1}/(m+1)! ||L^{m+1} f|| sup_s ||exp(sL)||
};

// Both sides of the semigroup Taylor remainder estimate.  The sup over
// s in [0,t] is taken on a lattice and multiplied with exp(ds ||L||), which
// rigorously covers the gap between lattice points.
RemainderCheck taylor_remainder_check(const Matrix& L, const Vector& f, double t,
                                      int m, int s_points = 33);

// A matrix generator together with a one-parameter family S(t) that is
// tangent to exp(tL) to order m, plus the constants under which the
// product-formula error bound is stated.  K[j] holds the defect weight
// K_j(t) for j = 0..m+p.
struct MatrixSemigroupSystem {
    Matrix L;
    std::function<Matrix(double)> S;  // defined on (0, T]
    double T = 1.0;
    int m = 0;
    int p = 1;
    double M1 = 1.0;  // ||exp(tL)|| <= M1 exp(w t)
    double M2 = 1.0;  // ||S(t)^k||  <= M2 exp(k w t)
    double w = 0.0;
    std::vector<std::function<double(double)>> K;
};

struct ConditionCheck {
    bool passed = false;
    double worst_margin = 0.0;  // min over the lattice of (allowed - observed)
};

struct ConditionReport {
    ConditionCheck semigroup_growth;  // condition 1
    ConditionCheck power_bound;       // condition 2
    ConditionCheck taylor_defect;     // condition 3
    bool all_passed() const {
        return semigroup_growth.passed && power_bound.passed && taylor_defect.passed;
    }
    int first_failed() const;  // 1-based condition index, 0 if none
};

// Lattice verification of the three standing hypotheses: the growth bound
// on exp(tL), power-boundedness of S(t), and the Taylor defect estimate on
// random unit vectors.
ConditionReport verify_conditions(const MatrixSemigroupSystem& sys,
                                  int t_points = 64, int k_max = 64,
                                  int defect_draws = 16, unsigned seed = 1234);

// Right-hand side of the product-formula error bound
//   M1 M2 t^{m+1} e^{wt} / n^m * sum_j C_j(t/n) ||L^j f||
// with C_{m+1}(s) = K_{m+1}(s) e^{-ws} + M1/(m+1)! and
// C_j(s) = K_j(s) e^{-ws} otherwise.  Requires n >= t/T.
double chernoff_error_bound(const MatrixSemigroupSystem& sys, const Vector& f,
                            double t, int n);

struct BoundCheckRow {
    double t = 0.0;
    int n = 0;
    int f_index = 0;
    double lhs = 0.0;   // ||S(t/n)^n f - exp(tL) f||
    double rhs = 0.0;
    double slack = 0.0; // rhs - lhs
};

struct BoundCheckReport {
    std::vector<BoundCheckRow> rows;  // ordered by (t, n, f_index)
    double min_slack = 0.0;
    bool all_passed(double tol = 1e-10) const { return min_slack >= -tol; }
};

// Evaluates both sides of the error bound over the grid of test vectors,
// times and iteration counts (triples with n < t/T are skipped).  The
// three standing hypotheses are re-verified first; a failure propagates as
// PreconditionError naming the violated condition.
BoundCheckReport verify_chernoff_bound(const MatrixSemigroupSystem& sys,
                                       const std::vector<Vector>& fs,
                                       const std::vector<double>& ts,
                                       const std::vector<int>& ns);

// ---- builders ----------------------------------------------------------

// Sum_{k<=m} t^k L^k / k! as a matrix.
Matrix taylor_matrix(const Matrix& L, double t, int m);

// System with S(t) = exp(tL) itself; the defect weight K_{m+1} is the
// constant M1 e^{wT} / (m+1)! coming from the remainder estimate.
MatrixSemigroupSystem make_exact_exp_system(const Matrix& L, double T, int m,
                                            double M1, double w);

// System with S(t) = Taylor_m(tL) + t^power R L^g where R is rescaled to
// unit operator norm.  The defect is then exactly t^power ||R L^g f||, so
// K_g(t) = t^{power-(m+1)} and all other weights vanish.  Needs power > m.
MatrixSemigroupSystem make_perturbed_taylor_system(const Matrix& L, const Matrix& R,
                                                   int m, double power,
                                                   int generator_power, double T,
                                                   double M1, double M2, double w);

}  // namespace chernoff

#endif
