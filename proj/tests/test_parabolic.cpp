#include <doctest.h>

#include <cmath>
#include <vector>

#include "chernoff/errors.hpp"
#include "chernoff/fd_stencils.hpp"
#include "chernoff/function1d.hpp"
#include "chernoff/parabolic.hpp"

using namespace chernoff;

namespace {

ParabolicCoefficients heat_coeffs(Interval window) {
    return ParabolicCoefficients{constant(1.0), constant(0.0), constant(0.0), window};
}

// Hand-derived coefficient functions of A^2 v for A v = a v'' + b v' + c v:
//   A^2 v = a^2 v''''
//         + (2 a a' + 2 a b) v'''
//         + (a a'' + a' b + b^2 + 2 a b' + 2 a c) v''
//         + (a b'' + b b' + 2 a c' + 2 b c) v'
//         + (a c'' + b c' + c^2) v
// obtained by differentiating A v twice and collecting terms.
struct SquaredOperatorOracle {
    Function1D a, b, c;

    double coeff(int order, double x) const {
        double av = a(x), a1 = a.derivative(x, 1), a2 = a.derivative(x, 2);
        double bv = b(x), b1 = b.derivative(x, 1), b2 = b.derivative(x, 2);
        double cv = c(x), c1 = c.derivative(x, 1), c2 = c.derivative(x, 2);
        switch (order) {
            case 4: return av * av;
            case 3: return 2.0 * av * a1 + 2.0 * av * bv;
            case 2: return av * a2 + a1 * bv + bv * bv + 2.0 * av * b1 + 2.0 * av * cv;
            case 1: return av * b2 + bv * b1 + 2.0 * av * c1 + 2.0 * bv * cv;
            case 0: return av * c2 + bv * c1 + cv * cv;
        }
        return 0.0;
    }

    double apply(const Function1D& v, double x) const {
        double r = 0.0;
        for (int k = 0; k <= 4; ++k) r += coeff(k, x) * v.derivative(x, k);
        return r;
    }
};

}  // namespace

TEST_CASE("finite-difference weights reproduce the classical stencils") {
    std::vector<double> xs = {-2.0, -1.0, 0.0, 1.0, 2.0};
    std::vector<double> w2 = fd_weights(0.0, xs, 2);
    std::vector<double> expected2 = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0,
                                     16.0 / 12.0, -1.0 / 12.0};
    REQUIRE(w2.size() == 5);
    for (size_t i = 0; i < 5; ++i)
        CHECK(w2[i] == doctest::Approx(expected2[i]).epsilon(1e-13));

    std::vector<double> w1 = fd_weights(0.0, xs, 1);
    std::vector<double> expected1 = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0,
                                     -1.0 / 12.0};
    for (size_t i = 0; i < 5; ++i)
        CHECK(w1[i] == doctest::Approx(expected1[i]).epsilon(1e-13));

    // scaled grid: weights scale by h^{-der}
    std::vector<double> xs_h = {-0.5, -0.25, 0.0, 0.25, 0.5};
    std::vector<double> w2h = fd_weights(0.0, xs_h, 2);
    for (size_t i = 0; i < 5; ++i)
        CHECK(w2h[i] == doctest::Approx(expected2[i] * 16.0).epsilon(1e-12));
}

TEST_CASE("grid sampling and cubic interpolation") {
    Function1D cubic = polynomial({0.5, -1.0, 0.25, 2.0});
    GridFunction g = GridFunction::sample(cubic, {-2.0, 2.0}, 0.25);
    // four-point Lagrange interpolation reproduces cubics exactly
    for (double x : {-1.93, -0.4, 0.01, 0.777, 1.99})
        CHECK(g.value(x) == doctest::Approx(cubic(x)).epsilon(1e-12));
    // constant extension beyond the node range
    CHECK(g.value(-5.0) == doctest::Approx(cubic(-2.0)).epsilon(1e-13));
    CHECK(g.value(5.0) == doctest::Approx(cubic(2.0)).epsilon(1e-13));
}

TEST_CASE("fourth derivative estimate recovers a constant fourth derivative") {
    Function1D quartic = polynomial({0.0, 0.0, 0.0, 0.0, 1.0});  // x^4, f'''' = 24
    GridFunction g = GridFunction::sample(quartic, {-1.0, 1.0}, 0.05);
    CHECK(g.fourth_derivative_estimate() == doctest::Approx(24.0).epsilon(1e-6));
}

TEST_CASE("operator application matches closed forms") {
    ParabolicCoefficients coeffs{rational_bump(1.0, 0.5), sine(0.3, 1.0),
                                 constant(0.2), {-8.0, 8.0}};
    Function1D v = gaussian_bump(0.0, 1.0);
    Function1D Av = apply_operator(coeffs, v);
    for (double x : {-1.5, 0.0, 0.4, 2.2}) {
        double expected = coeffs.a(x) * v.derivative(x, 2)
                        + coeffs.b(x) * v.derivative(x, 1) + coeffs.c(x) * v(x);
        CHECK(Av(x) == doctest::Approx(expected).epsilon(1e-12));
    }

    // grid version: fourth-order stencils, so h = 0.01 gives ~1e-8 accuracy
    GridFunction gv = GridFunction::sample(v, {-8.0, 8.0}, 0.01);
    GridFunction Agv = apply_operator(coeffs, gv);
    for (size_t i = 0; i < Agv.size(); ++i) {
        double x = Agv.node(i);
        if (x < -7.5 || x > 7.5) continue;
        CHECK(std::abs(Agv.values()[i] - Av(x)) <= 1e-6);
    }
}

TEST_CASE("squared operator expansion matches the hand-derived coefficients") {
    ParabolicCoefficients coeffs{rational_bump(1.0, 0.5), sine(0.3, 1.0),
                                 rational_bump(0.2, 0.1), {-8.0, 8.0}};
    SquaredOperatorOracle oracle{coeffs.a, coeffs.b, coeffs.c};
    OperatorPowerExpansion exp2 = operator_power_expansion(coeffs, 2);
    CHECK(exp2.q == 2);
    REQUIRE(exp2.lower.size() == 4);

    Function1D v = gaussian_bump(0.3, 1.2);
    for (int i = 0; i <= 100; ++i) {
        double x = -8.0 + 16.0 * double(i) / 100.0;
        CHECK(exp2.leading(x) == doctest::Approx(oracle.coeff(4, x)).epsilon(1e-10));
        for (int k = 0; k < 4; ++k)
            CHECK(exp2.lower[size_t(k)](x)
                  == doctest::Approx(oracle.coeff(k, x)).epsilon(1e-10));
        CHECK(exp2.apply(v, x) == doctest::Approx(oracle.apply(v, x)).epsilon(1e-10));
    }

    // q = 2 composition agrees with literally applying A twice
    Function1D Av = apply_operator(coeffs, v);
    Function1D AAv = apply_operator(coeffs, Av);
    for (double x : {-3.0, -0.7, 0.0, 1.1, 4.2})
        CHECK(exp2.apply(v, x) == doctest::Approx(AAv(x)).epsilon(1e-9));
}

TEST_CASE("step inequality check on a frozen instance") {
    LandauCheck chk = landau_inequality_check(sine(1.0, 1.0), 1.0, {-8.0, 8.0});
    CHECK(chk.lhs == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(chk.rhs == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(chk.holds());
    CHECK(chk.interior.hi == doctest::Approx(6.0));

    // large first derivative relative to value and curvature budgets still
    // satisfies the inequality (it holds for every h and every C^2 function)
    for (double h : {0.25, 0.5, 2.0})
        CHECK(landau_inequality_check(gaussian_bump(0.0, 0.6), h, {-8.0, 8.0}).holds());
}

TEST_CASE("derivative constants for the pure second-derivative operator") {
    DerivativeConstantTable table =
        derive_derivative_constants(heat_coeffs({-8.0, 8.0}), 4);
    REQUIRE(table.n_max == 4);
    // frozen by hand: with a = 1 and b = c = 0 the recursion gives
    //   n=0: {1}, n=1: {1,1}, n=2: {0,1}, n=3: {0,1,1}, n=4: {0,0,1}
    std::vector<std::vector<double>> expected = {
        {1.0}, {1.0, 1.0}, {0.0, 1.0}, {0.0, 1.0, 1.0}, {0.0, 0.0, 1.0}};
    REQUIRE(table.C.size() == 5);
    for (size_t n = 0; n < 5; ++n) {
        REQUIRE(table.C[n].size() == expected[n].size());
        for (size_t k = 0; k < expected[n].size(); ++k)
            CHECK(table.C[n][k] == doctest::Approx(expected[n][k]).epsilon(1e-12));
    }

    // the bound these constants claim, checked directly on sin:
    // ||v'''|| <= C[3][1] ||A v|| + C[3][2] ||A^2 v|| = 1 + 1
    std::vector<double> norms = {1.0, 1.0, 1.0};  // sup norms of sin, sin'', sin''''
    CHECK(table.bound(3, norms) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("derivative constants bound actual derivatives for variable coefficients") {
    ParabolicCoefficients coeffs{rational_bump(1.0, 0.5), constant(0.0),
                                 constant(0.0), {-8.0, 8.0}};
    DerivativeConstantTable table = derive_derivative_constants(coeffs, 4);
    for (const Function1D& v :
         {sine(1.0, 1.0), gaussian_bump(0.0, 1.0), rational_bump(0.0, 1.0)}) {
        std::vector<double> power_norms;
        Function1D acc = v;
        power_norms.push_back(sup_norm(acc, coeffs.window, 1e-7).value);
        for (int k = 1; k <= 2; ++k) {
            acc = apply_operator(coeffs, acc);
            power_norms.push_back(sup_norm(acc, coeffs.window, 1e-7).value);
        }
        for (int n = 1; n <= 4; ++n) {
            double lhs = sup_norm(derivative_function(v, n), coeffs.window, 1e-7).value;
            CHECK(lhs <= table.bound(n, power_norms) * (1.0 + 1e-9) + 1e-9);
        }
    }
}

TEST_CASE("one Chernoff step is exact on quadratics") {
    // S(t) x^2 = 1/4 (x+2 sqrt t)^2 + 1/4 (x-2 sqrt t)^2 + 1/2 x^2 = x^2 + 2t
    Interval window{-10.0, 10.0};
    GridFunction f = GridFunction::sample(polynomial({0.0, 0.0, 1.0}), window, 0.05);
    f.extension_margin = 3.0;
    double t = 0.21;
    GridFunction sf = apply_chernoff_step(heat_coeffs(window), f, t);
    for (size_t i = 0; i < sf.size(); ++i) {
        double x = sf.node(i);
        if (std::abs(x) > 8.0) continue;  // ends see the constant extension
        CHECK(std::abs(sf.values()[i] - (x * x + 2.0 * t)) <= 1e-10);
    }
}

TEST_CASE("one step is tangent to the operator") {
    ParabolicCoefficients coeffs{rational_bump(1.0, 0.5), sine(0.3, 1.0),
                                 rational_bump(0.1, 0.1), {-12.0, 12.0}};
    Function1D v = gaussian_bump(0.0, 1.0);
    GridFunction f = GridFunction::sample(v, {-12.0, 12.0}, 0.01);
    f.extension_margin = 3.0;
    Function1D Av = apply_operator(coeffs, v);
    // (S(t)f - f)/t -> Af with defect O(t); halving t halves the defect
    double defect_prev = 0.0;
    for (double t : {4e-3, 2e-3, 1e-3}) {
        GridFunction sf = apply_chernoff_step(coeffs, f, t);
        double defect = 0.0;
        for (size_t i = 0; i < sf.size(); ++i) {
            double x = sf.node(i);
            if (std::abs(x) > 6.0) continue;
            double lin = (sf.values()[i] - f.values()[i]) / t;
            defect = std::max(defect, std::abs(lin - Av(x)));
        }
        if (defect_prev > 0.0) CHECK(defect <= 0.75 * defect_prev);
        defect_prev = defect;
    }
}

TEST_CASE("escaping shifts raise a window error naming the step") {
    Interval window{-2.0, 2.0};
    GridFunction f = GridFunction::sample(gaussian_bump(), window, 0.05);
    f.extension_margin = 0.1;  // reach of one step at t=1 is 2 sqrt(a t) = 2
    try {
        (void)apply_chernoff_step(heat_coeffs(window), f, 1.0);
        FAIL("expected WindowError");
    } catch (const WindowError& e) {
        CHECK(std::string(e.what()).find("enlarge the grid window")
              != std::string::npos);
    }

    try {
        (void)iterate_chernoff(heat_coeffs(window), f, 1.0, 4);
        FAIL("expected WindowError");
    } catch (const WindowError& e) {
        CHECK(e.step_index >= 0);
        CHECK(std::string(e.what()).find("during step") != std::string::npos);
    }
}

TEST_CASE("iteration reports growth envelope and budget") {
    Interval window{-14.0, 14.0};
    ParabolicCoefficients coeffs{constant(1.0), constant(0.0), constant(0.3),
                                 window};
    GridFunction f = GridFunction::sample(gaussian_bump(), window, 0.02);
    f.extension_margin = 5.0;
    IterationResult it = iterate_chernoff(coeffs, f, 1.0, 8);
    CHECK(it.growth_bound == doctest::Approx(std::exp(0.3)).epsilon(1e-9));
    CHECK(it.interpolation_budget > 0.0);
    CHECK(it.interpolation_budget < 1e-4);
    CHECK(it.result.size() == f.size());
}

TEST_CASE("kernel oracle matches the exact heat solution") {
    Interval window{-12.0, 12.0};
    GridFunction f = GridFunction::sample(gaussian_bump(0.0, 1.0), window, 0.02);
    OracleResult oracle =
        reference_solution(heat_coeffs(window), f, 0.25, OracleQuality::standard, 1e-9);
    CHECK(oracle.method == "kernel");
    CHECK(oracle.accuracy_estimate <= 1e-9);
    // u(x, t) = exp(-x^2/(1+4t))/sqrt(1+4t); frozen values at t = 1/4
    auto at = [&](double x) {
        size_t i = size_t(std::llround((x - f.x_lo()) / f.spacing()));
        return oracle.solution.values()[i];
    };
    // the oracle evolves the sampled-and-interpolated data, so the frozen
    // closed-form values are matched up to the cubic sampling bias ~ h^4
    CHECK(at(0.0) == doctest::Approx(0.7071067811865475).epsilon(5e-7));
    CHECK(at(0.8) == doctest::Approx(0.5134649082668884).epsilon(5e-7));
    CHECK(at(-1.3) == doctest::Approx(0.3037429208993925).epsilon(5e-7));
}

TEST_CASE("kernel oracle honours drift and reaction terms") {
    Interval window{-12.0, 12.0};
    ParabolicCoefficients coeffs{constant(0.5), constant(0.7), constant(-0.3),
                                 window};
    GridFunction f = GridFunction::sample(gaussian_bump(0.0, 1.0), window, 0.02);
    OracleResult oracle =
        reference_solution(coeffs, f, 0.4, OracleQuality::standard, 1e-9);
    // u(x,t) = e^{ct} g(x + bt) with g the heat evolution at 2at
    size_t i = size_t(std::llround((0.2 - f.x_lo()) / f.spacing()));
    CHECK(oracle.solution.values()[i]
          == doctest::Approx(0.5816459600291881).epsilon(1e-6));
}

TEST_CASE("Crank-Nicolson oracle matches a manufactured solution") {
    // u(x, t) = e^{-t} exp(-x^2/4) solves u_t = a u'' + c u for
    // a = 1 + 1/(2(1+x^2)) and c = -5/8 - x^2/4 + (3/8)/(1+x^2)
    Interval window{-12.0, 12.0};
    ParabolicCoefficients coeffs{
        rational_bump(1.0, 0.5), constant(0.0),
        difference(rational_bump(-5.0 / 8.0, 3.0 / 8.0),
                   polynomial({0.0, 0.0, 0.25})),
        window};
    GridFunction f = GridFunction::sample(gaussian_bump(0.0, 2.0), window, 0.05);
    double t = 0.5;
    OracleResult oracle =
        reference_solution(coeffs, f, t, OracleQuality::standard, 1e-7);
    CHECK(oracle.method == "crank-nicolson");
    CHECK(oracle.accuracy_estimate <= 1e-7);
    double worst = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
        double x = f.node(i);
        if (std::abs(x) > 6.0) continue;
        double exact = std::exp(-t) * std::exp(-x * x / 4.0);
        worst = std::max(worst, std::abs(oracle.solution.values()[i] - exact));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("oracle reports identity at t = 0") {
    Interval window{-4.0, 4.0};
    GridFunction f = GridFunction::sample(gaussian_bump(), window, 0.1);
    OracleResult oracle = reference_solution(heat_coeffs(window), f, 0.0);
    CHECK(oracle.accuracy_estimate == 0.0);
    for (size_t i = 0; i < f.size(); ++i)
        CHECK(oracle.solution.values()[i] == f.values()[i]);
}

TEST_CASE("unreachable oracle targets raise an accuracy error") {
    Interval window{-4.0, 4.0};
    ParabolicCoefficients coeffs{rational_bump(1.0, 0.5), constant(0.0),
                                 constant(0.0), window};
    GridFunction f = GridFunction::sample(gaussian_bump(), window, 0.1);
    try {
        (void)reference_solution(coeffs, f, 0.1, OracleQuality::fast, 1e-15);
        FAIL("expected OracleAccuracyError");
    } catch (const OracleAccuracyError& e) {
        CHECK(e.achieved > 0.0);
        CHECK(e.achieved < 1e-6);
    }
}

TEST_CASE("coefficient validation flags degenerate diffusion") {
    ParabolicCoefficients coeffs{constant(-0.5), constant(0.0), constant(0.0),
                                 {-2.0, 2.0}};
    CHECK_THROWS_AS(coeffs.validate(), PreconditionError);
    ParabolicCoefficients ok = heat_coeffs({-2.0, 2.0});
    CHECK(ok.ellipticity() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_NOTHROW(ok.validate());
}
