#include "chernoff/function1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace chernoff {

namespace {

double eval_poly(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * double(i));
    return d;
}

// Lagrange cubic through four points of a uniform table, used by the
// smooth slow vector to evaluate its precomputed integral.
double table_cubic(const std::vector<double>& v, double lo, double h, double x) {
    const int n = int(v.size()) - 1;
    double u = (x - lo) / h;
    int cell = std::clamp(int(std::floor(u)), 0, n - 1);
    int base = std::clamp(cell - 1, 0, n - 3);
    double r = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            w *= (u - double(base + b)) / double(a - b);
        }
        r += w * v[size_t(base + a)];
    }
    return r;
}

}  // namespace

double Function1D::derivative(double x, int k) const {
    if (k < 0) throw DomainError("derivative order must be non-negative");
    if (k > derivative_order_) {
        std::ostringstream msg;
        msg << "derivative of order " << k << " not available for '"
            << (label.empty() ? std::string("<function>") : label)
            << "' (have " << derivative_order_ << ")";
        throw CapabilityError(msg.str());
    }
    return eval_(x, k);
}

// ---- presets ----------------------------------------------------------

Function1D piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ShapeError("piecewise_linear needs matching xs/ys with >= 2 nodes");
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw DomainError("piecewise_linear nodes must be strictly increasing");
    auto px = std::make_shared<std::vector<double>>(std::move(xs));
    auto py = std::make_shared<std::vector<double>>(std::move(ys));
    auto eval = [px, py](double x, int) {
        const auto& X = *px;
        const auto& Y = *py;
        if (x <= X.front()) return Y.front();
        if (x >= X.back()) return Y.back();
        size_t i = size_t(std::upper_bound(X.begin(), X.end(), x) - X.begin()) - 1;
        double s = (x - X[i]) / (X[i + 1] - X[i]);
        return Y[i] + s * (Y[i + 1] - Y[i]);
    };
    Function1D f(Function1D::Kind::piecewise_linear, eval, 0);
    f.set_breakpoints(*px);
    double m = 0.0;
    for (double v : *py) m = std::max(m, std::abs(v));
    f.bound = m;
    return f;
}

Function1D ramp() {
    Function1D f = piecewise_linear({0.0, 1.0}, {0.0, 1.0});
    f.analytic_modulus = [](double x) { return std::min(x, 1.0); };
    f.bound = 1.0;
    f.label = "ramp";
    return f;
}

Function1D constant(double value) {
    auto eval = [value](double, int k) { return k == 0 ? value : 0.0; };
    Function1D f(Function1D::Kind::closed_form, eval, 64);
    f.analytic_modulus = [](double) { return 0.0; };
    f.bound = std::abs(value);
    f.label = "constant";
    return f;
}

Function1D sine(double amplitude, double frequency) {
    auto eval = [amplitude, frequency](double x, int k) {
        return amplitude * std::pow(frequency, k)
             * std::sin(frequency * x + 0.5 * M_PI * k);
    };
    Function1D f(Function1D::Kind::closed_form, eval, 64);
    double a = std::abs(amplitude), w = std::abs(frequency);
    f.analytic_modulus = [a, w](double x) {
        double phase = std::min(w * x, M_PI);
        return 2.0 * a * std::sin(0.5 * phase);
    };
    f.bound = a;
    f.label = "sine";
    return f;
}

Function1D gaussian_bump(double center, double width) {
    if (width <= 0.0) throw DomainError("gaussian_bump width must be positive");
    const int max_order = 12;
    auto eval = [center, width](double x, int k) {
        double y = (x - center) / width;
        double g = std::exp(-y * y);
        if (k == 0) return g;
        // d^k/dy^k exp(-y^2) = (-1)^k H_k(y) exp(-y^2)
        double hkm1 = 1.0, hk = 2.0 * y;
        for (int j = 1; j < k; ++j) {
            double next = 2.0 * y * hk - 2.0 * double(j) * hkm1;
            hkm1 = hk;
            hk = next;
        }
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        return sign * hk * g / std::pow(width, k);
    };
    Function1D f(Function1D::Kind::closed_form, eval, max_order);
    f.bound = 1.0;
    f.label = "gaussian_bump";
    return f;
}

Function1D polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    auto chain = std::make_shared<std::vector<std::vector<double>>>();
    chain->push_back(coeffs);
    while (!chain->back().empty())
        chain->push_back(poly_derivative(chain->back()));
    auto eval = [chain](double x, int k) {
        if (k >= int(chain->size())) return 0.0;
        return eval_poly((*chain)[size_t(k)], x);
    };
    Function1D f(Function1D::Kind::closed_form, eval, 64);
    f.label = "polynomial";
    return f;
}

Function1D rational_bump(double base, double amp) {
    const int max_order = 12;
    // k-th derivative of 1/(1+x^2) is P_k(x)/(1+x^2)^{k+1} with
    // P_{k+1} = P_k' (1+x^2) - 2(k+1) x P_k.
    auto ps = std::make_shared<std::vector<std::vector<double>>>();
    ps->push_back({1.0});
    for (int k = 0; k < max_order; ++k) {
        const auto& p = ps->back();
        std::vector<double> d = poly_derivative(p);
        std::vector<double> next(p.size() + 1, 0.0);
        for (size_t i = 0; i < d.size(); ++i) {
            next[i] += d[i];          // P' * 1
            next[i + 2] += d[i];      // P' * x^2
        }
        for (size_t i = 0; i < p.size(); ++i)
            next[i + 1] -= 2.0 * double(k + 1) * p[i];
        ps->push_back(std::move(next));
    }
    auto eval = [base, amp, ps](double x, int k) {
        double q = 1.0 + x * x;
        double val = amp * eval_poly((*ps)[size_t(k)], x) / std::pow(q, k + 1);
        return k == 0 ? base + val : val;
    };
    Function1D f(Function1D::Kind::closed_form, eval, max_order);
    f.bound = std::abs(base) + std::abs(amp);
    f.label = "rational_bump";
    return f;
}

Function1D smooth_slow_vector() {
    auto phi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
    auto psi = [phi](double u) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        double a = phi(u), b = phi(1.0 - u);
        return a / (a + b);
    };
    // Cumulative integral of psi on [0,1]; per-panel Simpson, then the
    // evaluator interpolates the table.
    const int panels = 4096;
    auto cum = std::make_shared<std::vector<double>>();
    cum->reserve(panels + 1);
    cum->push_back(0.0);
    const double h = 1.0 / panels;
    for (int i = 0; i < panels; ++i) {
        double u0 = i * h, u1 = (i + 1) * h;
        double inc = (h / 6.0) * (psi(u0) + 4.0 * psi(0.5 * (u0 + u1)) + psi(u1));
        cum->push_back(cum->back() + inc);
    }
    auto big_psi = [cum, h](double u) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return cum->back() + (u - 1.0);  // psi == 1 beyond 1
        return table_cubic(*cum, 0.0, h, u);
    };
    auto f_pos = [big_psi](double x) {
        if (x <= 1.0) return std::max(x, 0.0);
        if (x >= 3.0) return 2.0;
        return x - 2.0 * big_psi(0.5 * (x - 1.0));
    };
    auto eval = [psi, f_pos](double x, int k) {
        if (k == 0) return x >= 0.0 ? f_pos(x) : -f_pos(-x);
        double ax = std::abs(x);
        if (ax <= 1.0) return 1.0;
        if (ax >= 3.0) return 0.0;
        return 1.0 - psi(0.5 * (ax - 1.0));
    };
    Function1D f(Function1D::Kind::closed_form, eval, 1);
    // Slope is even and non-increasing on [0,inf), so the largest increment
    // over a step x is the centered one: omega(x) = 2 f(x/2), equal to x on
    // [0,2] and saturating at 4.
    f.analytic_modulus = [f_pos](double x) { return 2.0 * f_pos(0.5 * x); };
    f.bound = 2.0;
    f.label = "smooth_slow_vector";
    return f;
}

Function1D sampled(double x_lo, double h, std::vector<double> values) {
    if (h <= 0.0) throw DomainError("sampled grid spacing must be positive");
    if (values.size() < 2) throw ShapeError("sampled grid needs >= 2 values");
    auto vals = std::make_shared<std::vector<double>>(std::move(values));
    auto eval = [x_lo, h, vals](double x, int) {
        const auto& v = *vals;
        double u = (x - x_lo) / h;
        if (u <= 0.0) return v.front();
        if (u >= double(v.size() - 1)) return v.back();
        size_t i = size_t(u);
        double s = u - double(i);
        return v[i] + s * (v[i + 1] - v[i]);
    };
    Function1D f(Function1D::Kind::sampled_grid, eval, 0);
    double m = 0.0;
    for (double v : *vals) m = std::max(m, std::abs(v));
    f.bound = m;
    f.label = "sampled";
    return f;
}

// ---- combinators ------------------------------------------------------

Function1D shift(const Function1D& f, double s) {
    Function1D base = f;
    auto eval = [base, s](double x, int k) { return base.derivative(x + s, k); };
    Function1D g(f.kind(), eval, f.derivative_order_available());
    if (!f.breakpoints().empty()) {
        std::vector<double> bps;
        bps.reserve(f.breakpoints().size());
        for (double b : f.breakpoints()) bps.push_back(b - s);
        g.set_breakpoints(std::move(bps));
    }
    g.analytic_modulus = f.analytic_modulus;  // translation invariant
    g.bound = f.bound;
    g.label = f.label;
    return g;
}

Function1D difference(const Function1D& f, const Function1D& g) {
    Function1D a = f, b = g;
    int order = std::min(a.derivative_order_available(), b.derivative_order_available());
    auto eval = [a, b](double x, int k) {
        return a.derivative(x, k) - b.derivative(x, k);
    };
    bool both_pw = f.kind() == Function1D::Kind::piecewise_linear
                && g.kind() == Function1D::Kind::piecewise_linear;
    Function1D d(both_pw ? Function1D::Kind::piecewise_linear
                         : Function1D::Kind::closed_form,
                 eval, order);
    if (both_pw) {
        std::vector<double> bps = f.breakpoints();
        bps.insert(bps.end(), g.breakpoints().begin(), g.breakpoints().end());
        std::sort(bps.begin(), bps.end());
        bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
        d.set_breakpoints(std::move(bps));
    }
    if (f.bound && g.bound) d.bound = *f.bound + *g.bound;
    return d;
}

Function1D derivative_function(const Function1D& f, int k) {
    if (k > f.derivative_order_available())
        throw CapabilityError("derivative_function: order exceeds what the function provides");
    Function1D base = f;
    auto eval = [base, k](double x, int j) { return base.derivative(x, k + j); };
    return Function1D(Function1D::Kind::closed_form, eval,
                      f.derivative_order_available() - k);
}

// ---- sup-norm and range estimation ------------------------------------

RangeEstimate range_on(const Function1D& f, Interval domain, double tol) {
    if (!(domain.hi >= domain.lo))
        throw DomainError("range_on: interval is empty");
    std::vector<double> inner_bps;
    for (double b : f.breakpoints())
        if (domain.contains(b)) inner_bps.push_back(b);

    const int max_levels = 14;
    int n = 256;
    double prev_min = 0.0, prev_max = 0.0;
    RangeEstimate est;
    for (int level = 0; level < max_levels; ++level) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double len = domain.length();
        double spacing = len > 0.0 ? len / n : 0.0;
        int lo_idx = -1, hi_idx = -1;
        auto visit = [&](double x) {
            double v = f(x);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "non-finite value " << v << " at x = " << x;
                throw EvaluationError(msg.str());
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        };
        for (int i = 0; i <= n; ++i) {
            double x = domain.lo + (len > 0.0 ? i * spacing : 0.0);
            double v = f(x);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "non-finite value " << v << " at x = " << x;
                throw EvaluationError(msg.str());
            }
            if (v < lo) { lo = v; lo_idx = i; }
            if (v > hi) { hi = v; hi_idx = i; }
        }
        for (double b : inner_bps) visit(b);
        // A lattice extremum can sit a fixed offset from a smooth peak
        // through several refinements, so agreement between levels alone
        // is not evidence of convergence.  Visiting the vertex of the
        // parabola through the best triple removes that failure mode.
        auto enrich = [&](int i) {
            if (i < 1 || i >= n || spacing == 0.0) return;
            double x0 = domain.lo + i * spacing;
            double fm = f(x0 - spacing), f0 = f(x0), fp = f(x0 + spacing);
            double denom = fp - 2.0 * f0 + fm;
            if (denom == 0.0) return;
            double xv = x0 - 0.5 * spacing * (fp - fm) / denom;
            if (xv > domain.lo && xv < domain.hi && std::abs(xv - x0) <= spacing)
                visit(xv);
        };
        enrich(lo_idx);
        enrich(hi_idx);
        est.min_value = lo;
        est.max_value = hi;
        est.grid_spacing = spacing;
        if (level > 0 && std::abs(hi - prev_max) < tol && std::abs(lo - prev_min) < tol)
            break;
        prev_min = lo;
        prev_max = hi;
        if (len == 0.0) break;
        n *= 2;
    }
    return est;
}

SupNormEstimate sup_norm(const Function1D& f, Interval domain, double tol) {
    RangeEstimate r = range_on(f, domain, tol);
    SupNormEstimate e;
    e.value = std::max(std::abs(r.min_value), std::abs(r.max_value));
    e.grid_spacing = r.grid_spacing;
    e.domain = domain;
    return e;
}

double inf_on(const Function1D& f, Interval domain, double tol) {
    return range_on(f, domain, tol).min_value;
}

// ---- modulus of continuity ---------------------------------------------

double modulus_of_continuity(const Function1D& f, double x, Interval domain) {
    if (x < 0.0) throw DomainError("modulus argument must be non-negative");
    if (x == 0.0) return 0.0;
    if (f.analytic_modulus) return (*f.analytic_modulus)(x);
    return modulus_of_continuity(f, x, domain, x / 64.0);
}

double modulus_of_continuity(const Function1D& f, double x, Interval domain,
                             double spacing) {
    if (x < 0.0) throw DomainError("modulus argument must be non-negative");
    if (x == 0.0) return 0.0;
    if (spacing <= 0.0) throw DomainError("modulus lattice spacing must be positive");

    // Inner offsets are the multiples of the spacing up to x, so the pair
    // set only grows with x and the estimate is monotone for a fixed
    // spacing.
    int m = int(std::floor(x / spacing + 1e-9));
    if (m < 1) return 0.0;
    double dmax = m * spacing;

    double len = domain.length();
    double outer_spacing = spacing;
    const double max_outer = 1 << 17;
    if (len / outer_spacing > max_outer) outer_spacing = len / max_outer;

    std::vector<double> ys;
    for (double y = domain.lo; y <= domain.hi + 1e-12; y += outer_spacing)
        ys.push_back(y);
    for (double b : f.breakpoints()) {
        if (domain.contains(b)) ys.push_back(b);
        if (domain.contains(b - dmax)) ys.push_back(b - dmax);
    }

    double sup = 0.0;
    for (double y : ys) {
        double fy = f(y);
        for (int j = 1; j <= m; ++j) {
            double z = y + j * spacing;
            if (z > domain.hi + 1e-12) break;
            sup = std::max(sup, std::abs(f(z) - fy));
        }
    }
    return sup;
}

ModulusAxiomReport check_modulus_axioms(const std::function<double(double)>& m,
                                        const std::vector<double>& lattice,
                                        double tol) {
    if (lattice.size() < 2)
        throw DomainError("modulus axiom lattice needs >= 2 points");
    for (size_t i = 0; i < lattice.size(); ++i) {
        if (lattice[i] < 0.0)
            throw DomainError("modulus axiom lattice must be non-negative");
        if (i > 0 && lattice[i] < lattice[i - 1])
            throw DomainError("modulus axiom lattice must be sorted");
    }

    ModulusAxiomReport rep;
    rep.zero_at_zero = std::abs(m(0.0)) <= tol;

    std::vector<double> vals;
    vals.reserve(lattice.size());
    for (double x : lattice) vals.push_back(m(x));

    rep.monotone = true;
    for (size_t i = 1; i < vals.size(); ++i)
        if (vals[i] < vals[i - 1] - tol) rep.monotone = false;

    // Continuity proxy: midpoint refinement must contract the largest
    // adjacent jump.  A genuine discontinuity keeps its jump size, any
    // continuous candidate shrinks it by a definite factor.
    double jump0 = 0.0;
    for (size_t i = 1; i < vals.size(); ++i)
        jump0 = std::max(jump0, std::abs(vals[i] - vals[i - 1]));
    double jump1 = 0.0;
    for (size_t i = 1; i < lattice.size(); ++i) {
        double mid = 0.5 * (lattice[i - 1] + lattice[i]);
        double vm = m(mid);
        jump1 = std::max(jump1, std::abs(vm - vals[i - 1]));
        jump1 = std::max(jump1, std::abs(vals[i] - vm));
    }
    rep.continuity_proxy = jump0 <= tol || jump1 <= 0.8 * jump0 + tol;

    rep.semiadditive = true;
    double top = lattice.back();
    for (size_t i = 0; i < lattice.size(); ++i) {
        for (size_t j = i; j < lattice.size(); ++j) {
            double s = lattice[i] + lattice[j];
            if (s > top) continue;
            if (m(s) > vals[i] + vals[j] + tol) rep.semiadditive = false;
        }
    }

    rep.ratio_nonincreasing = true;
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lattice.size(); ++i) {
        if (lattice[i] <= 0.0) continue;
        double r = vals[i] / lattice[i];
        if (r > prev_ratio + tol * std::max(1.0, prev_ratio))
            rep.ratio_nonincreasing = false;
        prev_ratio = r;
    }
    return rep;
}

}  // namespace chernoff
