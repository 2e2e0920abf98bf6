#include <doctest.h>

#include <cmath>
#include <vector>

#include "chernoff/errors.hpp"
#include "chernoff/function1d.hpp"

using namespace chernoff;

namespace {

// Brute-force sup oracle on a fixed dense lattice, independent of the
// refining estimator under test.
double dense_sup(const Function1D& f, Interval dom, int points = 200001) {
    double m = 0.0;
    for (int i = 0; i < points; ++i) {
        double x = dom.lo + dom.length() * double(i) / double(points - 1);
        m = std::max(m, std::abs(f(x)));
    }
    return m;
}

// Brute-force modulus oracle over all pairs of a coarse lattice.
double pair_modulus(const Function1D& f, double x, Interval dom, int points) {
    double m = 0.0;
    std::vector<double> xs(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
        xs[size_t(i)] = dom.lo + dom.length() * double(i) / double(points - 1);
    for (double x1 : xs)
        for (double x2 : xs)
            if (std::abs(x1 - x2) <= x) m = std::max(m, std::abs(f(x1) - f(x2)));
    return m;
}

double central_diff(const Function1D& f, double x, int k, double h) {
    if (k == 0) return f(x);
    return (central_diff(f, x + 0.5 * h, k - 1, h)
            - central_diff(f, x - 0.5 * h, k - 1, h)) / h;
}

}  // namespace

TEST_CASE("preset evaluation matches frozen closed-form values") {
    Function1D s = sine(2.0, 0.5);
    CHECK(s(1.0) == doctest::Approx(2.0 * std::sin(0.5)).epsilon(1e-15));

    Function1D g = gaussian_bump(0.0, 1.0);
    CHECK(g(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.derivative(0.7, 2) == doctest::Approx(-0.024505055767376667).epsilon(1e-13));

    Function1D rb = rational_bump(0.0, 1.0);
    CHECK(rb(0.0) == doctest::Approx(1.0));
    CHECK(rb.derivative(0.5, 1) == doctest::Approx(-0.64).epsilon(1e-13));
    CHECK(rb.derivative(0.5, 2) == doctest::Approx(-0.256).epsilon(1e-13));

    Function1D p = polynomial({1.0, -2.0, 0.0, 3.0});
    CHECK(p(1.25) == doctest::Approx(4.359375).epsilon(1e-15));
    CHECK(p.derivative(1.25, 1) == doctest::Approx(12.0625).epsilon(1e-15));
    CHECK(p.derivative(1.25, 2) == doctest::Approx(22.5).epsilon(1e-15));
    CHECK(p.derivative(1.25, 3) == doctest::Approx(18.0).epsilon(1e-15));
    CHECK(p.derivative(1.25, 4) == 0.0);
}

TEST_CASE("analytic derivatives agree with central differences") {
    std::vector<Function1D> fs = {sine(1.3, 2.1), gaussian_bump(0.4, 1.2),
                                  rational_bump(0.5, 1.5),
                                  polynomial({0.2, -1.0, 0.0, 0.5, -0.125})};
    for (const auto& f : fs)
        for (double x : {-1.7, -0.3, 0.0, 0.9, 2.2})
            for (int k : {1, 2, 3, 4}) {
                double h = 1e-2;
                double fd = central_diff(f, x, k, h);
                double exact = f.derivative(x, k);
                // truncation is h^2 times a (k+2)-th derivative, which gets
                // large for the bump presets at k = 3, 4
                double tol = k <= 2 ? 1e-3 : 2e-2;
                CHECK(std::abs(fd - exact) <= tol * std::max(1.0, std::abs(exact)));
            }
}

TEST_CASE("ramp shape and exact piecewise-linear sup norm") {
    Function1D r = ramp();
    CHECK(r(-2.0) == 0.0);
    CHECK(r(0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r(7.0) == 1.0);
    CHECK(sup_norm(r, {-8.0, 8.0}).value == 1.0);

    Function1D pl = piecewise_linear({0.0, 0.25, 1.0}, {0.0, 3.0, -1.0});
    CHECK(pl(0.5) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    // kinks are lattice points, so the sup is attained exactly
    CHECK(sup_norm(pl, {-1.0, 2.0}).value == 3.0);
    CHECK(pl(-4.0) == 0.0);
    CHECK(pl(4.0) == -1.0);
}

TEST_CASE("refining sup norm matches the dense-lattice oracle") {
    struct Case {
        Function1D f;
        Interval dom;
    };
    std::vector<Case> cases = {{sine(2.0, 0.5), {-1.0, 2.0}},
                               {gaussian_bump(1.0, 0.7), {-3.0, 4.0}},
                               {rational_bump(-0.2, 1.0), {-5.0, 5.0}},
                               {polynomial({0.0, 1.0, -1.0}), {0.0, 1.0}}};
    for (const auto& c : cases) {
        double oracle = dense_sup(c.f, c.dom);
        double est = sup_norm(c.f, c.dom, 1e-10).value;
        CHECK(est == doctest::Approx(oracle).epsilon(1e-7));
    }
    // frozen closed-form extremum: sup of 2 sin(x/2) on [-1,2] is 2 sin(1)
    CHECK(sup_norm(sine(2.0, 0.5), {-1.0, 2.0}, 1e-10).value
          == doctest::Approx(1.682941969615793).epsilon(1e-9));
}

TEST_CASE("range and inf estimates") {
    RangeEstimate r = range_on(polynomial({0.0, 0.0, 1.0}), {-2.0, 1.0}, 1e-10);
    CHECK(r.min_value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.max_value == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(inf_on(rational_bump(1.0, 0.5), {-8.0, 8.0}, 1e-10)
          == doctest::Approx(1.0 + 0.5 / 65.0).epsilon(1e-8));
}

TEST_CASE("combinators preserve values and metadata") {
    Function1D f = sine(1.0, 1.0);
    Function1D g = shift(f, 0.5);
    CHECK(g(0.25) == doctest::Approx(std::sin(0.75)).epsilon(1e-15));
    CHECK(g.derivative_order_available() == f.derivative_order_available());

    Function1D d = difference(ramp(), constant(0.25));
    CHECK(d(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d(-3.0) == doctest::Approx(-0.25).epsilon(1e-15));

    Function1D dd = derivative_function(gaussian_bump(), 1);
    CHECK(dd(0.3) == doctest::Approx(-0.6 * std::exp(-0.09)).epsilon(1e-13));
}

TEST_CASE("numeric modulus of continuity against the pair oracle") {
    // Same spacing on both sides so the two lattices see the same features.
    Function1D f = sine(1.0, 1.0);
    f.analytic_modulus.reset();
    Interval dom{-4.0, 4.0};
    for (double x : {0.4, 0.8, 1.6}) {
        double numeric = modulus_of_continuity(f, x, dom);
        double analytic = 2.0 * std::sin(0.5 * std::min(x, M_PI));
        double coarse = pair_modulus(f, x, dom, 257);
        // the numeric value may undershoot the true sup by the lattice
        // resolution but must never exceed it, and must dominate any
        // coarser pair search up to its own resolution
        CHECK(numeric <= analytic + 1e-12);
        CHECK(numeric >= analytic - 2.0 * (x / 64.0));
        CHECK(numeric >= coarse - 0.1);
    }
    CHECK(modulus_of_continuity(sine(1.0, 1.0), 0.8, dom)
          == doctest::Approx(0.778836684617301).epsilon(1e-13));
}

TEST_CASE("ramp modulus is min(x, 1)") {
    Function1D r = ramp();
    Interval dom{-2.0, 3.0};
    for (double x : {0.1, 0.5, 0.9, 1.0, 1.7, 5.0})
        CHECK(modulus_of_continuity(r, x, dom)
              == doctest::Approx(std::min(x, 1.0)).epsilon(1e-12));
    // numeric path (modulus dropped) stays within lattice resolution
    Function1D rn = ramp();
    rn.analytic_modulus.reset();
    for (double x : {0.5, 1.3}) {
        double numeric = modulus_of_continuity(rn, x, dom);
        CHECK(numeric <= std::min(x, 1.0) + 1e-12);
        CHECK(numeric >= std::min(x, 1.0) - 2.0 * (x / 64.0));
    }
}

TEST_CASE("smooth slow vector shape and modulus") {
    Function1D f = smooth_slow_vector();
    CHECK(f(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f(3.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f(-0.5) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f(-4.0) == doctest::Approx(-2.0).epsilon(1e-12));
    // modulus is exactly x on [0,2] and saturates at 4
    CHECK(modulus_of_continuity(f, 0.75, {-8.0, 8.0})
          == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(modulus_of_continuity(f, 2.0, {-8.0, 8.0})
          == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(modulus_of_continuity(f, 50.0, {-8.0, 8.0})
          == doctest::Approx(4.0).epsilon(1e-10));
    // slope bounded by 1 everywhere
    for (double x : {-3.3, -1.2, 0.4, 1.5, 2.9}) {
        CHECK(f.derivative(x, 1) >= -1e-12);
        CHECK(f.derivative(x, 1) <= 1.0 + 1e-12);
    }
}

TEST_CASE("modulus axiom checker separates valid and invalid candidates") {
    std::vector<double> lattice;
    for (int i = 0; i <= 64; ++i) lattice.push_back(2.0 * double(i) / 64.0);

    ModulusAxiomReport ok = check_modulus_axioms(
        [](double x) { return std::sqrt(x); }, lattice);
    CHECK(ok.zero_at_zero);
    CHECK(ok.monotone);
    CHECK(ok.continuity_proxy);
    CHECK(ok.semiadditive);
    CHECK(ok.ratio_nonincreasing);
    CHECK(ok.all_axioms());

    ModulusAxiomReport lin = check_modulus_axioms(
        [](double x) { return 2.0 * x; }, lattice);
    CHECK(lin.all_axioms());

    // convex modulus candidate: m(2) = 4 > m(1) + m(1) = 2
    ModulusAxiomReport bad = check_modulus_axioms(
        [](double x) { return x * x; }, lattice);
    CHECK(bad.zero_at_zero);
    CHECK(bad.monotone);
    CHECK(!bad.semiadditive);
    CHECK(!bad.ratio_nonincreasing);
    CHECK(!bad.all_axioms());
}

TEST_CASE("sampled and piecewise functions extend constantly") {
    Function1D s = sampled(0.0, 0.5, {1.0, 2.0, 0.5});
    CHECK(s(-3.0) == 1.0);
    CHECK(s(0.25) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(s(9.0) == 0.5);
    CHECK(s.derivative_order_available() == 0);
}

TEST_CASE("derivative requests beyond the available order throw") {
    Function1D s = sampled(0.0, 1.0, {0.0, 1.0});
    CHECK_THROWS_AS((void)s.derivative(0.5, 1), CapabilityError);
}
