#include "chernoff/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "chernoff/fd_stencils.hpp"

namespace chernoff {

namespace {

constexpr double kRoundoffPerStep = 16.0 * std::numeric_limits<double>::epsilon();

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

}  // namespace

double ParabolicCoefficients::ellipticity() const {
    return inf_on(a, window);
}

int ParabolicCoefficients::derivative_order() const {
    return std::min({a.derivative_order_available(), b.derivative_order_available(),
                     c.derivative_order_available()});
}

void ParabolicCoefficients::validate() const {
    double a_min = ellipticity();
    if (!(a_min > 0.0)) {
        std::ostringstream msg;
        msg << "diffusion coefficient reaches " << a_min << " on ["
            << window.lo << ", " << window.hi << "]; need inf a > 0";
        throw PreconditionError(msg.str());
    }
}

// ---- GridFunction ------------------------------------------------------

GridFunction::GridFunction(double x_lo, double h, std::vector<double> values)
    : x_lo_(x_lo), h_(h), values_(std::move(values)) {
    if (h_ <= 0.0) throw DomainError("grid spacing must be positive");
    if (values_.size() < 5)
        throw ShapeError("grid needs at least 5 nodes");
}

GridFunction GridFunction::sample(const Function1D& f, Interval window,
                                  double h_target) {
    if (!(h_target > 0.0)) throw DomainError("grid spacing must be positive");
    if (!(window.hi > window.lo)) throw DomainError("grid window is empty");
    int n = std::max(4, int(std::ceil(window.length() / h_target)));
    double h = window.length() / n;
    std::vector<double> vals(size_t(n + 1));
    for (int i = 0; i <= n; ++i) vals[size_t(i)] = f(window.lo + h * i);
    return GridFunction(window.lo, h, std::move(vals));
}

double GridFunction::value(double x) const {
    const int n = int(values_.size()) - 1;
    if (x <= x_lo_) return values_.front();
    double hi = x_hi();
    if (x >= hi) return values_.back();
    double u = (x - x_lo_) / h_;
    int cell = std::clamp(int(std::floor(u)), 0, n - 1);
    int base = std::clamp(cell - 1, 0, n - 3);
    double r = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            w *= (u - double(base + b)) / double(a - b);
        }
        r += w * values_[size_t(base + a)];
    }
    return r;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::fourth_derivative_estimate() const {
    const size_t n = values_.size();
    if (n < 5) return 0.0;
    double m = 0.0;
    double h4 = h_ * h_ * h_ * h_;
    for (size_t i = 2; i + 2 < n; ++i) {
        double d4 = values_[i - 2] - 4.0 * values_[i - 1] + 6.0 * values_[i]
                  - 4.0 * values_[i + 1] + values_[i + 2];
        m = std::max(m, std::abs(d4) / h4);
    }
    return m;
}

// ---- the operator ------------------------------------------------------

Function1D apply_operator(const ParabolicCoefficients& coeffs, const Function1D& f) {
    if (f.derivative_order_available() < 2)
        throw CapabilityError("apply_operator needs f'' but the function only provides order "
                              + std::to_string(f.derivative_order_available()));
    Function1D a = coeffs.a, b = coeffs.b, c = coeffs.c, g = f;
    int order = std::min({a.derivative_order_available(), b.derivative_order_available(),
                          c.derivative_order_available(),
                          f.derivative_order_available() - 2});
    auto eval = [a, b, c, g](double x, int k) {
        if (k == 0)
            return a(x) * g.derivative(x, 2) + b(x) * g.derivative(x, 1) + c(x) * g(x);
        // Leibniz expansion of (a g'' + b g' + c g)^(k)
        double r = 0.0;
        for (int j = 0; j <= k; ++j) {
            double bc = binomial(k, j);
            r += bc * (a.derivative(x, k - j) * g.derivative(x, j + 2)
                       + b.derivative(x, k - j) * g.derivative(x, j + 1)
                       + c.derivative(x, k - j) * g.derivative(x, j));
        }
        return r;
    };
    return Function1D(Function1D::Kind::closed_form, eval, order);
}

GridFunction apply_operator(const ParabolicCoefficients& coeffs, const GridFunction& f) {
    const int n = int(f.size()) - 1;
    if (n + 1 < 6) throw ShapeError("grid operator needs at least 6 nodes");
    const double h = f.spacing();
    const auto& v = f.values();

    // Fourth-order stencils: centered five-point in the interior, six-point
    // one-sided patterns at the two nodes next to each end.
    auto node_xs = [&](int first, int count) {
        std::vector<double> xs(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) xs[size_t(i)] = h * double(first + i);
        return xs;
    };
    std::vector<double> result(size_t(n + 1));
    for (int i = 0; i <= n; ++i) {
        int first, count;
        if (i < 2) {
            first = 0;
            count = 6;
        } else if (i > n - 2) {
            first = n - 5;
            count = 6;
        } else {
            first = i - 2;
            count = 5;
        }
        auto xs = node_xs(first, count);
        auto w1 = fd_weights(h * double(i), xs, 1);
        auto w2 = fd_weights(h * double(i), xs, 2);
        double d1 = 0.0, d2 = 0.0;
        for (int j = 0; j < count; ++j) {
            d1 += w1[size_t(j)] * v[size_t(first + j)];
            d2 += w2[size_t(j)] * v[size_t(first + j)];
        }
        double x = f.node(size_t(i));
        result[size_t(i)] = coeffs.a(x) * d2 + coeffs.b(x) * d1 + coeffs.c(x) * v[size_t(i)];
    }
    GridFunction out(f.x_lo(), h, std::move(result));
    out.extension_margin = f.extension_margin;
    return out;
}

// ---- operator power expansion ------------------------------------------

double OperatorPowerExpansion::apply(const Function1D& v, double x) const {
    double r = leading(x) * v.derivative(x, 2 * q);
    for (size_t i = 0; i < lower.size(); ++i)
        r += lower[i](x) * v.derivative(x, int(i));
    return r;
}

OperatorPowerExpansion operator_power_expansion(const ParabolicCoefficients& coeffs,
                                                int q) {
    if (q < 1) throw DomainError("operator_power_expansion: q must be >= 1");
    coeffs.validate();
    int need = 2 * q - 2;
    if (coeffs.derivative_order() < need) {
        std::ostringstream msg;
        msg << "expanding A^" << q << " needs coefficient derivatives up to order "
            << need << "; the coefficients provide order " << coeffs.derivative_order();
        throw CapabilityError(msg.str());
    }

    Function1D a = coeffs.a, b = coeffs.b, c = coeffs.c;
    // Level 1: A v = c v + b v' + a v''.
    auto level = std::make_shared<std::vector<std::function<double(double)>>>();
    level->push_back([c](double x) { return c(x); });
    level->push_back([b](double x) { return b(x); });
    level->push_back([a](double x) { return a(x); });

    for (int lvl = 1; lvl < q; ++lvl) {
        // prev holds e_i with A^lvl v = sum_i e_i v^(i); compose with A:
        // A^{lvl+1} v = sum_i e_i (A v)^(i), Leibniz pushing derivatives
        // onto a, b, c.
        auto prev = level;
        auto next = std::make_shared<std::vector<std::function<double(double)>>>();
        int new_top = 2 * (lvl + 1);
        for (int k = 0; k <= new_top; ++k) {
            next->push_back([prev, a, b, c, k](double x) {
                double r = 0.0;
                for (int i = 0; i < int(prev->size()); ++i) {
                    double e = (*prev)[size_t(i)](x);
                    if (e == 0.0) continue;
                    double inner = 0.0;
                    int j = k - 2;  // a-part: v^(j+2) contributes to order k
                    if (j >= 0 && j <= i)
                        inner += binomial(i, j) * a.derivative(x, i - j);
                    j = k - 1;
                    if (j >= 0 && j <= i)
                        inner += binomial(i, j) * b.derivative(x, i - j);
                    j = k;
                    if (j <= i)
                        inner += binomial(i, j) * c.derivative(x, i - j);
                    r += e * inner;
                }
                return r;
            });
        }
        level = next;
    }

    OperatorPowerExpansion exp;
    exp.q = q;
    exp.leading = level->back();
    exp.lower.assign(level->begin(), level->end() - 1);
    return exp;
}

// ---- Landau step inequality and derivative constants -------------------

LandauCheck landau_inequality_check(const Function1D& u, double h, Interval window) {
    if (!(h > 0.0)) throw DomainError("landau_inequality_check: h must be positive");
    if (!(window.hi - 2.0 * h > window.lo))
        throw DomainError("landau_inequality_check: window too small for step 2h");
    LandauCheck chk;
    chk.interior = Interval{window.lo, window.hi - 2.0 * h};
    chk.lhs = sup_norm(derivative_function(u, 1), chk.interior).value;
    double m2 = sup_norm(derivative_function(u, 2), window).value;
    double m0 = sup_norm(u, window).value;
    chk.rhs = h * m2 + m0 / h;
    return chk;
}

DerivativeConstantTable derive_derivative_constants(const ParabolicCoefficients& coeffs,
                                                    int n_max) {
    if (n_max < 0) throw DomainError("derive_derivative_constants: n_max must be >= 0");
    coeffs.validate();
    const double a_min = coeffs.ellipticity();

    DerivativeConstantTable tab;
    tab.n_max = n_max;
    tab.C.push_back({1.0});  // ||v|| <= ||A^0 v||

    // Cache of expansions and of the sup-norms ||p_i / a^q||.
    std::vector<OperatorPowerExpansion> expansions;  // index q-1
    auto get_expansion = [&](int q) -> const OperatorPowerExpansion& {
        while (int(expansions.size()) < q)
            expansions.push_back(
                operator_power_expansion(coeffs, int(expansions.size()) + 1));
        return expansions[size_t(q - 1)];
    };
    Function1D a = coeffs.a;
    auto weight_norms = [&](int q) {
        const auto& exp = get_expansion(q);
        std::vector<double> alpha;
        alpha.reserve(exp.lower.size());
        for (const auto& p : exp.lower) {
            auto fn = [p, a, q](double x, int) { return p(x) / std::pow(a(x), q); };
            Function1D w(Function1D::Kind::closed_form, fn, 0);
            alpha.push_back(sup_norm(w, coeffs.window).value);
        }
        return alpha;
    };

    for (int m = 1; m <= n_max; ++m) {
        size_t k_top = size_t((m + 1) / 2);
        std::vector<double> row(k_top + 1, 0.0);
        if (m % 2 == 1) {
            // Odd order: step inequality for v^(m) from v^(m+1) and
            // v^(m-1), then solve the power expansion for v^(m+1).
            int q = (m + 1) / 2;
            auto alpha = weight_norms(q);  // indices 0..m
            double inv_a = std::pow(1.0 / a_min, q);
            double am = alpha[size_t(m)];
            double h = am == 0.0 ? 1.0 : 1.0 / (2.0 * am);
            double denom = 1.0 - h * am;
            row[size_t(q)] += h * inv_a / denom;
            for (int i = 0; i < m; ++i) {
                double coef = h * alpha[size_t(i)] / denom;
                if (i == m - 1) coef += 1.0 / (h * denom);
                for (size_t k = 0; k < tab.C[size_t(i)].size(); ++k)
                    row[k] += coef * tab.C[size_t(i)][k];
            }
        } else {
            // Even order: solve A^q v = a^q v^(2q) + sum p_i v^(i) for the
            // leading derivative directly.
            int q = m / 2;
            auto alpha = weight_norms(q);  // indices 0..m-1
            row[size_t(q)] += std::pow(1.0 / a_min, q);
            for (int i = 0; i < m; ++i) {
                double coef = alpha[size_t(i)];
                for (size_t k = 0; k < tab.C[size_t(i)].size(); ++k)
                    row[k] += coef * tab.C[size_t(i)][k];
            }
        }
        tab.C.push_back(std::move(row));
    }
    return tab;
}

double DerivativeConstantTable::bound(int n, const std::vector<double>& power_norms) const {
    if (n < 0 || n > n_max) throw DomainError("derivative constant table: order out of range");
    const auto& row = C[size_t(n)];
    if (power_norms.size() < row.size())
        throw ShapeError("derivative constant table: need ||A^k v|| up to k = "
                         + std::to_string(row.size() - 1));
    double r = 0.0;
    for (size_t k = 0; k < row.size(); ++k) r += row[k] * power_norms[k];
    return r;
}

// ---- Chernoff step -----------------------------------------------------

namespace {

struct StepNorms {
    double c_sup = 0.0;
};

GridFunction chernoff_step_impl(const ParabolicCoefficients& coeffs,
                                const GridFunction& f, double t,
                                const StepNorms& norms, double* budget_out,
                                int step_index) {
    const size_t n = f.size();
    std::vector<double> out(n);
    const double lo_limit = f.x_lo() - f.extension_margin;
    const double hi_limit = f.x_hi() + f.extension_margin;
    double worst_escape = 0.0;
    double worst_point = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double x = f.node(i);
        double ax = coeffs.a(x);
        if (!(ax >= 0.0))
            throw DomainError("diffusion coefficient negative at x = " + std::to_string(x));
        double s = 2.0 * std::sqrt(ax * t);
        double drift = 2.0 * coeffs.b(x) * t;
        for (double y : {x + s, x - s, x + drift}) {
            if (y < lo_limit || y > hi_limit) {
                double escape = std::max(lo_limit - y, y - hi_limit);
                if (escape > worst_escape) {
                    worst_escape = escape;
                    worst_point = y;
                }
            }
        }
        out[i] = 0.25 * f.value(x + s) + 0.25 * f.value(x - s)
               + 0.5 * f.value(x + drift) + t * coeffs.c(x) * f.values()[i];
    }
    if (worst_escape > 0.0) {
        std::ostringstream msg;
        msg << "shifted evaluation point " << worst_point << " escapes the trusted "
            << "extension region by " << worst_escape
            << "; enlarge the grid window by at least that much";
        throw WindowError(msg.str(), step_index);
    }

    double interp_budget = kCubicInterpConstant * std::pow(f.spacing(), 4)
                             * f.fourth_derivative_estimate()
                         + kRoundoffPerStep * f.max_abs();
    if (budget_out) *budget_out = interp_budget;

    // Growth envelope: the step is a convex average plus t c(x) f(x), so
    // beyond interpolation effects it cannot exceed (1 + t ||c||) ||f||.
    GridFunction result(f.x_lo(), f.spacing(), std::move(out));
    result.extension_margin = f.extension_margin;
    double allowed = std::exp(norms.c_sup * t) * f.max_abs() + interp_budget + 1e-300;
    if (result.max_abs() > allowed * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "step growth " << result.max_abs() << " exceeds the envelope " << allowed;
        throw EvaluationError(msg.str());
    }
    return result;
}

StepNorms step_norms(const ParabolicCoefficients& coeffs) {
    StepNorms norms;
    norms.c_sup = sup_norm(coeffs.c, coeffs.window, 1e-7).value;
    return norms;
}

}  // namespace

GridFunction apply_chernoff_step(const ParabolicCoefficients& coeffs,
                                 const GridFunction& f, double t) {
    if (t < 0.0) throw DomainError("apply_chernoff_step: t must be >= 0");
    coeffs.validate();
    if (t == 0.0) return f;
    return chernoff_step_impl(coeffs, f, t, step_norms(coeffs), nullptr, -1);
}

IterationResult iterate_chernoff(const ParabolicCoefficients& coeffs,
                                 const GridFunction& f, double t, int n) {
    if (t < 0.0) throw DomainError("iterate_chernoff: t must be >= 0");
    if (n < 1) throw DomainError("iterate_chernoff: n must be >= 1");
    coeffs.validate();
    StepNorms norms = step_norms(coeffs);
    const double tau = t / n;
    const double step_growth = std::exp(norms.c_sup * tau);

    IterationResult res;
    res.result = f;
    res.growth_bound = std::exp(norms.c_sup * t);
    for (int k = 0; k < n; ++k) {
        double step_budget = 0.0;
        try {
            res.result = chernoff_step_impl(coeffs, res.result, tau, norms,
                                            &step_budget, k);
        } catch (const WindowError& e) {
            throw WindowError(std::string(e.what()) + " (during step "
                              + std::to_string(k) + " of " + std::to_string(n) + ")", k);
        }
        // Earlier budget keeps being amplified by later steps.
        res.interpolation_budget = res.interpolation_budget * step_growth + step_budget;
    }
    return res;
}

// ---- reference solutions ----------------------------------------------

namespace {

bool nearly_constant(const Function1D& f, Interval window, double* value) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const int samples = 64;
    for (int i = 0; i <= samples; ++i) {
        double v = f(window.lo + window.length() * double(i) / samples);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) {
        *value = 0.5 * (lo + hi);
        return true;
    }
    return false;
}

// u(t,x) = e^{ct} / sqrt(pi) * int f(x + bt + 2 sqrt(at) z) e^{-z^2} dz,
// Simpson on a truncated z-range (the tail below 8.5 is ~1e-32).
std::vector<double> kernel_convolve(const GridFunction& f, double a0, double b0,
                                    double c0, double t, int z_points) {
    const double z_max = 8.5;
    const double width = 2.0 * std::sqrt(a0 * t);
    const double drift = b0 * t;
    const double amp = std::exp(c0 * t);
    int m = z_points % 2 == 0 ? z_points : z_points + 1;  // Simpson needs even panels
    std::vector<double> out(f.size());
    // Gaussian mass of exp(-z^2)/sqrt(pi) below z.
    auto mass_below = [](double z) { return 0.5 * (1.0 + std::erf(z)); };
    for (size_t i = 0; i < f.size(); ++i) {
        double xd = f.node(i) + drift;
        if (width == 0.0) {
            out[i] = amp * f.value(xd);
            continue;
        }
        // The quadrature only covers shifted points on the grid proper;
        // the constant tails beyond the end nodes integrate in closed
        // form.  Splitting this way keeps the derivative kink at the grid
        // ends out of the Simpson sum, which would otherwise stall the
        // panel-doubling certificate at second order.
        double zA = std::max(-z_max, (f.x_lo() - xd) / width);
        double zB = std::min(z_max, (f.x_hi() - xd) / width);
        double acc = 0.0;
        if (zB > zA) {
            double hz = (zB - zA) / m;
            for (int j = 0; j <= m; ++j) {
                double z = zA + hz * j;
                double wgt = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
                acc += wgt * f.value(xd + width * z) * std::exp(-z * z);
            }
            acc *= hz / (3.0 * std::sqrt(M_PI));
        } else {
            double z0 = std::clamp(zB, -z_max, z_max);
            zA = zB = z0;  // whole range sits past a grid end
        }
        out[i] = amp * (acc + f.values().front() * mass_below(zA)
                        + f.values().back() * (1.0 - mass_below(zB)));
    }
    return out;
}

// One Crank-Nicolson sweep over a refined copy of the input grid; returns
// the values at the input nodes (every stride-th internal node).
std::vector<double> crank_nicolson(const ParabolicCoefficients& coeffs,
                                   const GridFunction& f, double t, int refine) {
    const size_t coarse_n = f.size();
    const size_t n = (coarse_n - 1) * size_t(refine) + 1;
    const double h = f.spacing() / refine;
    const double x0 = f.x_lo();

    std::vector<double> u(n);
    for (size_t i = 0; i < n; ++i) u[i] = f.value(x0 + h * double(i));

    // dt tracks the coarse dx and is divided exactly by the refinement
    // factor, so Richardson ratios across levels are exact.
    int steps = refine * std::max(1, int(std::ceil(t / f.spacing())));
    double dt = t / steps;
    double th = 0.5 * dt;

    std::vector<double> av(n), bv(n), cv(n);
    for (size_t i = 0; i < n; ++i) {
        double x = x0 + h * double(i);
        av[i] = coeffs.a(x);
        bv[i] = coeffs.b(x);
        cv[i] = coeffs.c(x);
    }

    // Tridiagonal rows of I - th*A with folded ghost nodes (constant
    // extension) at both ends.
    std::vector<double> lower(n), diag(n), upper(n);
    for (size_t i = 0; i < n; ++i) {
        double la = av[i] / (h * h), lb = bv[i] / (2.0 * h);
        double sub = la - lb, mid = -2.0 * la + cv[i], sup = la + lb;
        if (i == 0) {
            mid += sub;  // ghost u_{-1} = u_0
            sub = 0.0;
        }
        if (i == n - 1) {
            mid += sup;  // ghost u_{n} = u_{n-1}
            sup = 0.0;
        }
        lower[i] = -th * sub;
        diag[i] = 1.0 - th * mid;
        upper[i] = -th * sup;
    }
    // Thomas factorization (coefficients are time-independent).
    std::vector<double> cp(n), rhs(n), explicit_mid(n), explicit_sub(n), explicit_sup(n);
    for (size_t i = 0; i < n; ++i) {
        double la = av[i] / (h * h), lb = bv[i] / (2.0 * h);
        double sub = la - lb, mid = -2.0 * la + cv[i], sup = la + lb;
        if (i == 0) {
            mid += sub;
            sub = 0.0;
        }
        if (i == n - 1) {
            mid += sup;
            sup = 0.0;
        }
        explicit_sub[i] = th * sub;
        explicit_mid[i] = 1.0 + th * mid;
        explicit_sup[i] = th * sup;
    }
    cp[0] = upper[0] / diag[0];
    for (size_t i = 1; i < n; ++i) cp[i] = upper[i] / (diag[i] - lower[i] * cp[i - 1]);

    for (int s = 0; s < steps; ++s) {
        for (size_t i = 0; i < n; ++i) {
            double r = explicit_mid[i] * u[i];
            if (i > 0) r += explicit_sub[i] * u[i - 1];
            if (i + 1 < n) r += explicit_sup[i] * u[i + 1];
            rhs[i] = r;
        }
        rhs[0] /= diag[0];
        for (size_t i = 1; i < n; ++i)
            rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / (diag[i] - lower[i] * cp[i - 1]);
        u[n - 1] = rhs[n - 1];
        for (size_t i = n - 1; i-- > 0;) u[i] = rhs[i] - cp[i] * u[i + 1];
    }

    std::vector<double> coarse(coarse_n);
    for (size_t i = 0; i < coarse_n; ++i) coarse[i] = u[i * size_t(refine)];
    return coarse;
}

}  // namespace

OracleResult reference_solution(const ParabolicCoefficients& coeffs,
                                const GridFunction& f, double t,
                                OracleQuality quality, double target_accuracy) {
    if (t < 0.0) throw DomainError("reference_solution: t must be >= 0");
    coeffs.validate();
    OracleResult res;
    if (t == 0.0) {
        res.solution = f;
        res.method = "identity";
        return res;
    }

    double a0, b0, c0;
    bool const_a = nearly_constant(coeffs.a, coeffs.window, &a0);
    bool const_b = nearly_constant(coeffs.b, coeffs.window, &b0);
    bool const_c = nearly_constant(coeffs.c, coeffs.window, &c0);

    if (const_a && const_b && const_c) {
        res.method = "kernel";
        int base = quality == OracleQuality::fast ? 512
                 : quality == OracleQuality::standard ? 1024 : 2048;
        std::vector<double> coarse = kernel_convolve(f, a0, b0, c0, t, base);
        for (int z = base * 2; z <= 1 << 16; z *= 2) {
            std::vector<double> fine = kernel_convolve(f, a0, b0, c0, t, z);
            double diff = 0.0;
            for (size_t i = 0; i < fine.size(); ++i)
                diff = std::max(diff, std::abs(fine[i] - coarse[i]));
            coarse = std::move(fine);
            if (diff <= target_accuracy) {
                res.solution = GridFunction(f.x_lo(), f.spacing(), std::move(coarse));
                res.solution.extension_margin = f.extension_margin;
                res.accuracy_estimate = diff;
                return res;
            }
            if (z == 1 << 16)
                throw OracleAccuracyError(
                    "kernel quadrature stalled at agreement " + std::to_string(diff), diff);
        }
    }

    // Variable coefficients: Crank-Nicolson on refined grids.  Quality
    // levels are Richardson extrapolants of consecutive refinements;
    // convergence is certified when two of those agree to the target.
    res.method = "crank-nicolson";
    int refine = quality == OracleQuality::fast ? 1
               : quality == OracleQuality::standard ? 2 : 4;
    const size_t n = f.size();
    std::vector<double> prev_extrap;
    std::vector<double> level = crank_nicolson(coeffs, f, t, refine);
    double best = std::numeric_limits<double>::infinity();
    const double base_steps = std::max(1.0, std::ceil(t / f.spacing()));
    for (int round = 0; round < 6; ++round) {
        double work = double(n) * 2.0 * refine * refine * base_steps;
        if (work > 4e9)
            throw OracleAccuracyError(
                "refinement budget exhausted at agreement " + std::to_string(best), best);
        std::vector<double> finer = crank_nicolson(coeffs, f, t, refine * 2);
        std::vector<double> extrap(n);
        for (size_t i = 0; i < n; ++i)
            extrap[i] = (4.0 * finer[i] - level[i]) / 3.0;
        if (!prev_extrap.empty()) {
            double diff = 0.0;
            for (size_t i = 0; i < n; ++i)
                diff = std::max(diff, std::abs(extrap[i] - prev_extrap[i]));
            best = std::min(best, diff);
            if (diff <= target_accuracy) {
                res.solution = GridFunction(f.x_lo(), f.spacing(), std::move(extrap));
                res.solution.extension_margin = f.extension_margin;
                res.accuracy_estimate = diff;
                return res;
            }
        }
        prev_extrap = std::move(extrap);
        level = std::move(finer);
        refine *= 2;
    }
    throw OracleAccuracyError("Crank-Nicolson refinement stalled at agreement "
                              + std::to_string(best), best);
}

}  // namespace chernoff
