#include "chernoff/matrix_semigroup.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace chernoff {

namespace {

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

double inf_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

void require_square(const Matrix& M, const char* who) {
    if (M.rows() != M.cols()) {
        std::ostringstream msg;
        msg << who << ": matrix is " << M.rows() << "x" << M.cols() << ", need square";
        throw ShapeError(msg.str());
    }
}

void require_matching(const Matrix& L, const Vector& f, const char* who) {
    require_square(L, who);
    if (L.cols() != f.size()) {
        std::ostringstream msg;
        msg << who << ": vector length " << f.size() << " does not match order "
            << L.cols();
        throw ShapeError(msg.str());
    }
}

}  // namespace

double operator_norm(const Matrix& M, double tol) {
    if (M.size() == 0) return 0.0;
    Matrix B = M.transpose() * M;
    const int d = int(B.rows());
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = 1.0 + 0.01 * std::sin(double(i + 1));
    v.normalize();
    double lambda = 0.0;
    for (int iter = 0; iter < 5000; ++iter) {
        Vector w = B * v;
        double next = v.dot(w);
        double nw = w.norm();
        if (nw == 0.0) return 0.0;
        v = w / nw;
        if (iter > 0 && std::abs(next - lambda) <= tol * std::max(std::abs(next), 1e-30)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

Matrix expm(const Matrix& L, double t, double tol) {
    require_square(L, "expm");
    const int d = int(L.rows());
    Matrix A = t * L;
    double nrm = inf_norm(A);
    if (nrm > 690.0) {
        std::ostringstream msg;
        msg << "expm: ||tL|| = " << nrm << " would overflow the double range";
        throw RangeError(msg.str());
    }
    int s = 0;
    while (nrm > 0.25 && s < 60) {
        nrm *= 0.5;
        ++s;
    }
    Matrix B = A / std::pow(2.0, s);
    Matrix X = Matrix::Identity(d, d);
    Matrix term = Matrix::Identity(d, d);
    // Squaring roughly doubles the series truncation error each level, so
    // the series target shrinks with s.
    double target = tol * std::pow(2.0, -s) * 0.25;
    for (int k = 1; k <= 120; ++k) {
        term = (term * B) / double(k);
        X += term;
        if (inf_norm(term) <= target * std::max(1.0, inf_norm(X))) break;
    }
    for (int i = 0; i < s; ++i) X = X * X;
    return X;
}

Vector taylor_polynomial_apply(const Matrix& L, const Vector& f, double t, int m) {
    require_matching(L, f, "taylor_polynomial_apply");
    if (m < 0) throw DomainError("taylor_polynomial_apply: m must be >= 0");
    Vector r = f;
    for (int k = m; k >= 1; --k) r = f + (t / double(k)) * (L * r);
    return r;
}

double telescoping_residual(const Matrix& Z, const Matrix& Y, int n) {
    require_square(Z, "telescoping_residual");
    require_square(Y, "telescoping_residual");
    if (Z.rows() != Y.rows())
        throw ShapeError("telescoping_residual: Z and Y orders differ");
    if (n < 1) throw DomainError("telescoping_residual: n must be >= 1");
    const int d = int(Z.rows());
    std::vector<Matrix> zp(n + 1), yp(n + 1);
    zp[0] = yp[0] = Matrix::Identity(d, d);
    for (int k = 1; k <= n; ++k) {
        zp[k] = zp[k - 1] * Z;
        yp[k] = yp[k - 1] * Y;
    }
    Matrix direct = zp[n] - yp[n];
    Matrix diff = Z - Y;
    Matrix sum = Matrix::Zero(d, d);
    for (int k = 0; k < n; ++k) sum += zp[n - k - 1] * diff * yp[k];
    return operator_norm(direct - sum);
}

RemainderCheck taylor_remainder_check(const Matrix& L, const Vector& f, double t,
                                      int m, int s_points) {
    require_matching(L, f, "taylor_remainder_check");
    if (t < 0.0) throw DomainError("taylor_remainder_check: t must be >= 0");
    if (s_points < 2) throw DomainError("taylor_remainder_check: need >= 2 lattice points");
    RemainderCheck chk;
    chk.lhs = (expm(L, t) * f - taylor_polynomial_apply(L, f, t, m)).norm();
    Vector g = f;
    for (int k = 0; k <= m; ++k) g = L * g;  // L^{m+1} f
    double sup = 0.0;
    double ds = t / (s_points - 1);
    for (int i = 0; i < s_points; ++i)
        sup = std::max(sup, operator_norm(expm(L, i * ds)));
    double safety = std::exp(ds * operator_norm(L));
    chk.rhs = std::pow(t, m + 1) / factorial(m + 1) * g.norm() * sup * safety;
    return chk;
}

int ConditionReport::first_failed() const {
    if (!semigroup_growth.passed) return 1;
    if (!power_bound.passed) return 2;
    if (!taylor_defect.passed) return 3;
    return 0;
}

ConditionReport verify_conditions(const MatrixSemigroupSystem& sys, int t_points,
                                  int k_max, int defect_draws, unsigned seed) {
    require_square(sys.L, "verify_conditions");
    if (!(sys.T > 0.0)) throw DomainError("verify_conditions: T must be positive");
    if (int(sys.K.size()) != sys.m + sys.p + 1) {
        std::ostringstream msg;
        msg << "verify_conditions: need " << sys.m + sys.p + 1
            << " defect weights K_j, have " << sys.K.size();
        throw ShapeError(msg.str());
    }
    const int d = int(sys.L.rows());
    const double slack = 1e-10;
    ConditionReport rep;

    // Condition 1: ||exp(tL)|| <= M1 exp(wt) on [0, T].
    {
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= t_points; ++i) {
            double t = sys.T * double(i) / t_points;
            double margin = sys.M1 * std::exp(sys.w * t) - operator_norm(expm(sys.L, t));
            worst = std::min(worst, margin);
        }
        rep.semigroup_growth.worst_margin = worst;
        rep.semigroup_growth.passed = worst >= -slack;
    }

    // Condition 2: ||S(t)^k|| <= M2 exp(kwt) on (0, T] x {1..k_max}.
    {
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= t_points; ++i) {
            double t = sys.T * double(i) / t_points;
            Matrix St = sys.S(t);
            Matrix power = Matrix::Identity(d, d);
            for (int k = 1; k <= k_max; ++k) {
                power = power * St;
                double margin =
                    sys.M2 * std::exp(double(k) * sys.w * t) - operator_norm(power);
                worst = std::min(worst, margin);
            }
        }
        rep.power_bound.worst_margin = worst;
        rep.power_bound.passed = worst >= -slack;
    }

    // Condition 3: ||S(t)f - Taylor_m f|| <= t^{m+1} sum_j K_j(t) ||L^j f||
    // on random unit vectors.
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 16; ++i) {
            double t = sys.T * double(i) / 16.0;
            Matrix St = sys.S(t);
            for (int draw = 0; draw < defect_draws; ++draw) {
                Vector f(d);
                for (int j = 0; j < d; ++j) f[j] = gauss(rng);
                f.normalize();
                double lhs = (St * f - taylor_polynomial_apply(sys.L, f, t, sys.m)).norm();
                double rhs = 0.0;
                Vector g = f;
                for (int j = 0; j < int(sys.K.size()); ++j) {
                    rhs += sys.K[size_t(j)](t) * g.norm();
                    g = sys.L * g;
                }
                rhs *= std::pow(t, sys.m + 1);
                worst = std::min(worst, rhs - lhs);
            }
        }
        rep.taylor_defect.worst_margin = worst;
        rep.taylor_defect.passed = worst >= -slack;
    }
    return rep;
}

double chernoff_error_bound(const MatrixSemigroupSystem& sys, const Vector& f,
                            double t, int n) {
    require_matching(sys.L, f, "chernoff_error_bound");
    if (!(t >= 0.0)) throw DomainError("chernoff_error_bound: t must be >= 0");
    if (n < 1) throw DomainError("chernoff_error_bound: n must be >= 1");
    if (double(n) < t / sys.T) {
        std::ostringstream msg;
        msg << "chernoff_error_bound: n = " << n << " < t/T = " << t / sys.T
            << ", so t/n escapes (0, T]";
        throw PreconditionError(msg.str());
    }
    if (t == 0.0) return 0.0;
    const double tau = t / n;
    double sum = 0.0;
    Vector g = f;
    for (int j = 0; j < int(sys.K.size()); ++j) {
        double cj = sys.K[size_t(j)](tau) * std::exp(-sys.w * tau);
        if (j == sys.m + 1) cj += sys.M1 / factorial(sys.m + 1);
        sum += cj * g.norm();
        g = sys.L * g;
    }
    return sys.M1 * sys.M2 * std::pow(t, sys.m + 1) * std::exp(sys.w * t)
         / std::pow(double(n), sys.m) * sum;
}

BoundCheckReport verify_chernoff_bound(const MatrixSemigroupSystem& sys,
                                       const std::vector<Vector>& fs,
                                       const std::vector<double>& ts,
                                       const std::vector<int>& ns) {
    ConditionReport cond = verify_conditions(sys);
    if (!cond.all_passed()) {
        std::ostringstream msg;
        msg << "verify_chernoff_bound: standing hypothesis " << cond.first_failed()
            << " fails on the verification lattice (margin "
            << (cond.first_failed() == 1   ? cond.semigroup_growth.worst_margin
                : cond.first_failed() == 2 ? cond.power_bound.worst_margin
                                           : cond.taylor_defect.worst_margin)
            << ")";
        throw PreconditionError(msg.str());
    }

    BoundCheckReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    for (double t : ts) {
        Matrix exp_t = expm(sys.L, t);
        for (int n : ns) {
            if (double(n) < t / sys.T) continue;
            Matrix St = sys.S(t / n);
            for (size_t fi = 0; fi < fs.size(); ++fi) {
                Vector v = fs[fi];
                for (int k = 0; k < n; ++k) v = St * v;
                BoundCheckRow row;
                row.t = t;
                row.n = n;
                row.f_index = int(fi);
                row.lhs = (v - exp_t * fs[fi]).norm();
                row.rhs = chernoff_error_bound(sys, fs[fi], t, n);
                row.slack = row.rhs - row.lhs;
                report.min_slack = std::min(report.min_slack, row.slack);
                report.rows.push_back(row);
            }
        }
    }
    if (report.rows.empty()) report.min_slack = 0.0;
    return report;
}

Matrix taylor_matrix(const Matrix& L, double t, int m) {
    require_square(L, "taylor_matrix");
    const int d = int(L.rows());
    Matrix X = Matrix::Identity(d, d);
    Matrix term = Matrix::Identity(d, d);
    for (int k = 1; k <= m; ++k) {
        term = (term * L) * (t / double(k));
        X += term;
    }
    return X;
}

MatrixSemigroupSystem make_exact_exp_system(const Matrix& L, double T, int m,
                                            double M1, double w) {
    require_square(L, "make_exact_exp_system");
    MatrixSemigroupSystem sys;
    sys.L = L;
    sys.T = T;
    sys.m = m;
    sys.p = 1;
    sys.M1 = M1;
    sys.M2 = M1;  // S(t)^k = exp(ktL) obeys the same envelope
    sys.w = w;
    Matrix Lc = L;
    sys.S = [Lc](double t) { return expm(Lc, t); };
    double km1 = M1 * std::exp(w * T) / factorial(m + 1);
    for (int j = 0; j <= m + 1; ++j) {
        if (j == m + 1)
            sys.K.push_back([km1](double) { return km1; });
        else
            sys.K.push_back([](double) { return 0.0; });
    }
    return sys;
}

MatrixSemigroupSystem make_perturbed_taylor_system(const Matrix& L, const Matrix& R,
                                                   int m, double power,
                                                   int generator_power, double T,
                                                   double M1, double M2, double w) {
    require_square(L, "make_perturbed_taylor_system");
    require_square(R, "make_perturbed_taylor_system");
    if (L.rows() != R.rows())
        throw ShapeError("make_perturbed_taylor_system: L and R orders differ");
    if (!(power > double(m)))
        throw DomainError("make_perturbed_taylor_system: perturbation power must exceed m");
    if (generator_power <= m)
        throw DomainError("make_perturbed_taylor_system: generator power must exceed m");
    double rn = operator_norm(R);
    if (rn == 0.0) throw DomainError("make_perturbed_taylor_system: R is zero");

    MatrixSemigroupSystem sys;
    sys.L = L;
    sys.T = T;
    sys.m = m;
    sys.p = generator_power - m;
    sys.M1 = M1;
    sys.M2 = M2;
    sys.w = w;
    Matrix P = R / rn;
    for (int k = 0; k < generator_power; ++k) P = P * L;  // unit-norm R times L^g
    Matrix Lc = L;
    int mc = m;
    // The explicit Matrix return forces evaluation of the Eigen expression
    // before its temporaries go out of scope.
    sys.S = [Lc, P, mc, power](double t) -> Matrix {
        return taylor_matrix(Lc, t, mc) + std::pow(t, power) * P;
    };
    double expo = power - double(m + 1);
    for (int j = 0; j <= sys.m + sys.p; ++j) {
        if (j == generator_power)
            sys.K.push_back([expo](double t) { return std::pow(t, expo); });
        else
            sys.K.push_back([](double) { return 0.0; });
    }
    return sys;
}

}  // namespace chernoff
