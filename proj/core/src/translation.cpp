#include "chernoff/translation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace chernoff {

RateFunction rate_inv_x() {
    RateFunction v;
    v.eval = [](double x) { return 1.0 / x; };
    v.continuous = true;
    v.monotone_nonincreasing = true;
    v.name = "inv_x";
    return v;
}

RateFunction rate_power(double k) {
    if (k <= 0.0) throw DomainError("rate_power exponent must be positive");
    RateFunction v;
    v.eval = [k](double x) { return std::pow(1.0 + x, -k); };
    v.continuous = true;
    v.monotone_nonincreasing = true;
    v.name = "power";
    return v;
}

RateFunction rate_exp_decay() {
    RateFunction v;
    v.eval = [](double x) { return std::exp(-x); };
    v.continuous = true;
    v.monotone_nonincreasing = true;
    v.name = "exp_decay";
    return v;
}

RateFunction rate_exp_exp_decay() {
    RateFunction v;
    v.eval = [](double x) { return std::exp(-std::exp(x)); };
    v.continuous = true;
    v.monotone_nonincreasing = true;
    v.name = "exp_exp_decay";
    return v;
}

RateFunction rate_inv_log() {
    RateFunction v;
    v.eval = [](double x) { return 1.0 / std::log(x + M_E); };
    v.continuous = true;
    v.monotone_nonincreasing = true;
    v.name = "inv_log";
    return v;
}

RateFunction rate_inv_loglog() {
    const double ee = std::exp(M_E);
    RateFunction v;
    v.eval = [ee](double x) { return 1.0 / std::log(std::log(x + ee)); };
    v.continuous = true;
    v.monotone_nonincreasing = true;
    v.name = "inv_loglog";
    return v;
}

RateFunction rate_from_table(std::vector<double> xs, std::vector<double> vs) {
    if (xs.size() != vs.size() || xs.size() < 2)
        throw ShapeError("rate table needs matching xs/vs with >= 2 rows");
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw DomainError("rate table xs must be strictly increasing");
    for (double v : vs)
        if (v < 0.0) throw DomainError("rate table values must be non-negative");
    bool monotone = true;
    for (size_t i = 1; i < vs.size(); ++i)
        if (vs[i] > vs[i - 1]) monotone = false;
    auto px = std::make_shared<std::vector<double>>(std::move(xs));
    auto pv = std::make_shared<std::vector<double>>(std::move(vs));
    RateFunction v;
    v.eval = [px, pv](double x) {
        const auto& X = *px;
        const auto& V = *pv;
        if (x <= X.front()) return V.front();
        if (x >= X.back()) return V.back();
        size_t i = size_t(std::upper_bound(X.begin(), X.end(), x) - X.begin()) - 1;
        double s = (x - X[i]) / (X[i + 1] - X[i]);
        return V[i] + s * (V[i + 1] - V[i]);
    };
    v.continuous = true;
    v.monotone_nonincreasing = monotone;
    v.name = "custom-table";
    return v;
}

RateFunctionCheck check_rate_function(const RateFunction& v, double x_lo,
                                      double x_hi, int points) {
    if (!(x_lo > 0.0) || !(x_hi > x_lo) || points < 2)
        throw DomainError("check_rate_function: bad lattice parameters");
    RateFunctionCheck chk;
    chk.nonnegative = true;
    chk.monotone = true;
    double prev = 0.0;
    for (int i = 0; i < points; ++i) {
        double x = x_lo * std::pow(x_hi / x_lo, double(i) / (points - 1));
        double val = v(x);
        if (val < 0.0) chk.nonnegative = false;
        if (i == 0) {
            chk.first_value = val;
        } else if (val > prev + 1e-12) {
            chk.monotone = false;
        }
        prev = val;
    }
    chk.last_value = prev;
    chk.decayed = chk.last_value < chk.first_value - 1e-12;
    return chk;
}

// ---- the shift family --------------------------------------------------

Function1D apply_translation(const Function1D& f, double t) {
    return shift(f, t);
}

Function1D apply_chernoff_shift(const Function1D& f, double t, const RateFunction& v) {
    if (t < 0.0) throw DomainError("shift family needs t >= 0");
    if (t == 0.0) return f;
    return shift(f, t + t * v(1.0 / t));
}

Function1D iterate_chernoff_shift(const Function1D& f, double t, int n,
                                  const RateFunction& v) {
    if (!(t > 0.0)) throw DomainError("iterate needs t > 0");
    if (n < 1) throw DomainError("iterate needs n >= 1");
    return shift(f, t + t * v(double(n) / t));
}

Function1D iterate_chernoff_shift_composed(const Function1D& f, double t, int n,
                                           const RateFunction& v) {
    if (!(t > 0.0)) throw DomainError("iterate needs t > 0");
    if (n < 1) throw DomainError("iterate needs n >= 1");
    Function1D g = f;
    for (int i = 0; i < n; ++i) g = apply_chernoff_shift(g, t / n, v);
    return g;
}

// ---- error-law measurement ---------------------------------------------

std::vector<double> hybrid_t_lattice(double T, int points) {
    if (!(T > 0.0) || points < 8)
        throw DomainError("hybrid_t_lattice: need T > 0 and >= 8 points");
    std::vector<double> ts;
    ts.reserve(size_t(points));
    int g = points / 2;
    int u = points - g;
    const double t0 = T * 1e-4;
    const double half = 0.5 * T;
    for (int i = 0; i < g; ++i)
        ts.push_back(t0 * std::pow(half / t0, double(i) / g));
    for (int j = 1; j <= u; ++j)
        ts.push_back(half + double(j) * half / u);
    ts.back() = T;  // exact endpoint regardless of rounding
    return ts;
}

namespace {

// sup_x |f(x + delta) - f(x)| over the window.
double shift_gap(const Function1D& f, double delta, Interval window, double tol) {
    if (delta == 0.0) return 0.0;
    Function1D d = difference(shift(f, delta), f);
    return sup_norm(d, window, tol).value;
}

double measured_sup(const Function1D& f, const RateFunction& v, int n,
                    const std::vector<double>& ts, Interval window, double tol) {
    double sup = 0.0;
    for (double t : ts) {
        double delta = t * v(double(n) / t);
        sup = std::max(sup, shift_gap(f, delta, window, tol));
    }
    return sup;
}

}  // namespace

std::vector<ConvergenceRow> TranslationLawReport::as_rows() const {
    std::vector<ConvergenceRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back({double(r.n), r.measured, r.predicted});
    return out;
}

TranslationLawReport exact_error_law(const TranslationExperiment& exp) {
    if (!exp.v.continuous || !exp.v.monotone_nonincreasing) {
        std::ostringstream msg;
        msg << "exact error law needs a continuous non-increasing rate function; '"
            << exp.v.name << "' declares continuous=" << exp.v.continuous
            << " monotone=" << exp.v.monotone_nonincreasing;
        throw PreconditionError(msg.str());
    }
    if (!(exp.T > 0.0)) throw DomainError("exact_error_law: T must be positive");
    if (exp.n_values.empty()) throw DomainError("exact_error_law: no n values");
    for (int n : exp.n_values)
        if (n < 1) throw DomainError("exact_error_law: n values must be >= 1");

    const auto ts = hybrid_t_lattice(exp.T, exp.t_lattice_points);
    const auto ts_fine = hybrid_t_lattice(exp.T, 2 * exp.t_lattice_points);

    TranslationLawReport report;
    report.t_lattice_points = exp.t_lattice_points;
    for (int n : exp.n_values) {
        TranslationLawRow row;
        row.n = n;
        row.measured = measured_sup(exp.f, exp.v, n, ts, exp.window, exp.sup_tol);
        double fine = measured_sup(exp.f, exp.v, n, ts_fine, exp.window, exp.sup_tol);
        report.resolution_estimate =
            std::max(report.resolution_estimate, std::abs(fine - row.measured));
        row.measured = std::max(row.measured, fine);
        double step = exp.T * exp.v(double(n) / exp.T);
        row.predicted = modulus_of_continuity(exp.f, step, exp.window);
        row.discrepancy = std::abs(row.measured - row.predicted);
        report.max_discrepancy = std::max(report.max_discrepancy, row.discrepancy);
        report.rows.push_back(row);
    }
    if (report.rows.size() >= 4) {
        double floor = std::max(report.resolution_estimate, 1e-14);
        try {
            report.fit = fit_order(report.as_rows(), floor / 10.0);
        } catch (const InsufficientDataError&) {
            // too few rows above the floor; leave the fit empty
        }
    }
    return report;
}

NormGapWitness norm_nonconvergence_family(double t, int n) {
    if (!(t > 0.0)) throw DomainError("norm_nonconvergence_family: t must be positive");
    if (n < 1) throw DomainError("norm_nonconvergence_family: n must be >= 1");
    double knee = t * t / double(n);
    NormGapWitness w;
    w.f = piecewise_linear({0.0, knee}, {0.0, 1.0});
    w.f.label = "norm_gap_ramp";
    w.witness_x = -t;
    return w;
}

}  // namespace chernoff
