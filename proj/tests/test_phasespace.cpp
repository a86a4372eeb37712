#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybridlab/classical.hpp"

using namespace hybridlab;

namespace {
PhaseSpaceGrid ref_grid(int n = 64, Boundary b = Boundary::periodic) {
    return PhaseSpaceGrid(-4.0, 4.0, -4.0, 4.0, n, n, b);
}
} // namespace

TEST_CASE("grid geometry and indexing") {
    PhaseSpaceGrid g = ref_grid();
    CHECK(g.dq() == doctest::Approx(0.125));
    CHECK(g.dp() == doctest::Approx(0.125));
    CHECK(g.size() == 64 * 64);
    CHECK(g.cell_measure() == doctest::Approx(0.015625));

    const std::size_t idx = g.index(3, 5);
    CHECK(g.node_i(idx) == 3);
    CHECK(g.node_j(idx) == 5);
    const PhasePoint z = g.node_point(idx);
    CHECK(z.q == doctest::Approx(-4.0 + 3 * 0.125));
    CHECK(z.p == doctest::Approx(-4.0 + 5 * 0.125));

    CHECK(g.contains({0.0, 0.0}));
    CHECK(!g.contains({4.5, 0.0}));
}

TEST_CASE("grid snap rounds to the nearest node, ties toward lower index") {
    PhaseSpaceGrid g = ref_grid();
    CHECK(g.snap({0.0, 0.0}) == g.index(32, 32));
    CHECK(g.snap({0.05, 0.0}) == g.index(32, 32));
    CHECK(g.snap({0.07, 0.0}) == g.index(33, 32));
    // exact midpoint between nodes 32 and 33
    CHECK(g.snap({0.0625, 0.0}) == g.index(32, 32));
}

TEST_CASE("periodic snap wraps, clamped snap clips") {
    PhaseSpaceGrid per = ref_grid();
    CHECK(per.snap({4.0, 0.0}) == per.index(0, 32));
    CHECK(per.snap({-4.05, 0.0}) == per.index(0, 32));

    PhaseSpaceGrid cl = ref_grid(64, Boundary::clamped);
    CHECK(cl.snap({9.0, 0.0}) == cl.index(63, 32));
    CHECK(cl.snap({-9.0, -9.0}) == cl.index(0, 0));
}

TEST_CASE("grid constructor rejects degenerate boxes") {
    CHECK_THROWS_AS(PhaseSpaceGrid(1, 1, -1, 1, 8, 8, Boundary::periodic),
                    ConfigError);
    CHECK_THROWS_AS(PhaseSpaceGrid(-1, 1, -1, 1, 1, 8, Boundary::periodic),
                    ConfigError);
}

TEST_CASE("polynomial parse and eval") {
    const auto f = PolynomialObservable::parse("0.5*q^2 + 0.5*p^2");
    CHECK(f.eval(2.0, 0.0) == doctest::Approx(2.0));
    CHECK(f.eval(1.0, 3.0) == doctest::Approx(5.0));

    const auto g = PolynomialObservable::parse("2*q*p^2 - 0.5");
    CHECK(g.eval(1.0, 2.0) == doctest::Approx(7.5));
    CHECK(g.eval(0.0, 0.0) == doctest::Approx(-0.5));

    CHECK(PolynomialObservable::parse("0").is_zero());
    CHECK(PolynomialObservable::parse("q - q").is_zero());
}

TEST_CASE("polynomial derivatives and separability") {
    const auto f = PolynomialObservable::parse("q^2*p + 3*p");
    CHECK(f.d_dq().eval(2.0, 5.0) == doctest::Approx(20.0));
    CHECK(f.d_dp().eval(2.0, 5.0) == doctest::Approx(7.0));
    CHECK(!f.is_separable());
    CHECK(PolynomialObservable::parse("0.5*q^2 + p^4").is_separable());
}

TEST_CASE("polynomial parse errors carry position info") {
    CHECK_THROWS_AS(PolynomialObservable::parse("q^"), ConfigError);
    CHECK_THROWS_AS(PolynomialObservable::parse("x + 1"), ConfigError);
    CHECK_THROWS_AS(PolynomialObservable::parse("q^-2"), ConfigError);
    CHECK_THROWS_AS(PolynomialObservable::parse(""), ConfigError);
}

TEST_CASE("polynomial to_string round trip") {
    const auto f = PolynomialObservable::parse("1.5*q^2*p - p^3 + 2");
    const auto g = PolynomialObservable::parse(f.to_string());
    for (double q : {-1.3, 0.0, 0.7})
        for (double p : {-2.0, 0.4})
            CHECK(f.eval(q, p) == doctest::Approx(g.eval(q, p)));
}

TEST_CASE("delta state is a unit-trace pure state") {
    PhaseSpaceGrid g = ref_grid();
    const ClassicalOperator rho = delta_state(g, {0.5, -1.0});
    CHECK(rho.trace().real() == doctest::Approx(1.0));
    CHECK(purity_defect(rho) == doctest::Approx(0.0).epsilon(1e-12));

    // idempotency with the discrete measure: rho*rho*(dq*dp) == rho
    const ClassicalOperator sq = operator_product(rho, rho);
    CHECK((sq - rho).frobenius_norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gaussian profile is mixed") {
    PhaseSpaceGrid g = ref_grid();
    ClassicalOperator rho(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const PhasePoint z = g.node_point(n);
        rho.set_diag(n, std::exp(-(z.q * z.q + z.p * z.p)));
    }
    rho *= Complex(1.0 / rho.trace().real(), 0.0);
    CHECK(purity_defect(rho) > 0.1);
}

TEST_CASE("adjoint and hermiticity with dyads") {
    PhaseSpaceGrid g = ref_grid(8);
    ClassicalOperator a(g);
    a.set_diag(3, {1.0, 0.0});
    a.add_dyad(1, 5, {0.5, 0.25});
    CHECK(!a.is_hermitian());
    ClassicalOperator h = a;
    h.add_dyad(5, 1, {0.5, -0.25});
    CHECK(h.is_hermitian());
    CHECK((a.adjoint().adjoint() - a).frobenius_norm() ==
          doctest::Approx(0.0));
}

TEST_CASE("dyads folded onto the diagonal when from == to") {
    PhaseSpaceGrid g = ref_grid(8);
    ClassicalOperator a(g);
    a.add_dyad(2, 2, {0.5, 0.0});
    CHECK(a.dyads().empty());
    CHECK(a.diag()[2] == Complex(0.5, 0.0));
}

TEST_CASE("poisson bracket annihilates nondiagonal dyads") {
    PhaseSpaceGrid g = ref_grid();
    const auto H = PolynomialObservable::parse("0.5*q^2 + 0.5*p^2 + q*p");
    ClassicalOperator a(g);
    a.add_dyad(10, 200, {1.0, 2.0});
    a.add_dyad(5, 7, {-3.0, 0.0});
    const ClassicalOperator out = poisson_bracket(H, a, Scheme::spectral);
    CHECK(out.dyads().empty());
    CHECK(out.frobenius_norm() == doctest::Approx(0.0));
}

TEST_CASE("poisson bracket with H = q is the p-derivative") {
    PhaseSpaceGrid g = ref_grid();
    const auto H = PolynomialObservable::parse("q");
    ClassicalOperator rho(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const PhasePoint z = g.node_point(n);
        rho.set_diag(n, std::exp(-(z.q * z.q + z.p * z.p)));
    }
    const ClassicalOperator br = poisson_bracket(H, rho, Scheme::spectral);
    const auto dp = derivative_p(g, rho.diag(), Scheme::spectral);
    double err = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n)
        err = std::max(err, std::abs(br.diag()[n] - dp[n]));
    CHECK(err < 1e-12);
}

TEST_CASE("operator-valued bracket hamiltonian must be dyad-free") {
    PhaseSpaceGrid g = ref_grid(8);
    ClassicalOperator H(g), rho(g);
    H.add_dyad(0, 1, {1.0, 0.0});
    CHECK_THROWS_AS(poisson_bracket(H, rho, Scheme::central), ConfigError);
}

TEST_CASE("spectral derivatives require periodic boundaries") {
    PhaseSpaceGrid g = ref_grid(16, Boundary::clamped);
    std::vector<Complex> f(g.size(), Complex(1.0, 0.0));
    CHECK_THROWS_AS(derivative_q(g, f, Scheme::spectral), ConfigError);
    CHECK_NOTHROW(derivative_q(g, f, Scheme::central));
}

TEST_CASE("spectral derivative is exact for low harmonics") {
    PhaseSpaceGrid g = ref_grid();
    std::vector<Complex> f(g.size());
    const double k = 2.0 * M_PI / 8.0; // one period across the box
    for (std::size_t n = 0; n < g.size(); ++n)
        f[n] = std::sin(3.0 * k * g.node_point(n).q);
    const auto df = derivative_q(g, f, Scheme::spectral);
    double err = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n)
        err = std::max(err,
                       std::abs(df[n] - Complex(3.0 * k *
                                                std::cos(3.0 * k *
                                                         g.node_point(n).q))));
    CHECK(err < 1e-10);
}

TEST_CASE("stability check rejects oversized steps and suggests one") {
    PhaseSpaceGrid g = ref_grid();
    const auto H = PolynomialObservable::parse("q");
    CHECK_NOTHROW(check_advection_stability(H, g, 1e-3));
    try {
        check_advection_stability(H, g, 1.0);
        FAIL("expected StabilityError");
    } catch (const StabilityError& e) {
        CHECK(e.suggested_dt() > 0.0);
        CHECK(e.suggested_dt() < 0.125);
        CHECK_NOTHROW(check_advection_stability(H, g, e.suggested_dt()));
    }
}

TEST_CASE("liouville transport: gaussian translates under H = q") {
    PhaseSpaceGrid g = ref_grid();
    const auto H = PolynomialObservable::parse("q");
    ClassicalOperator rho(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const PhasePoint z = g.node_point(n);
        rho.set_diag(n, std::exp(-2.0 * (z.q * z.q + z.p * z.p)));
    }
    const double mass = rho.trace().real();
    rho *= Complex(1.0 / mass, 0.0);
    const double t = 0.5; // dp/dt = -1: shift by -0.5 = 4 cells
    const ClassicalOperator out =
        liouville_evolve(H, rho, t, 500, Scheme::spectral);
    CHECK(out.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    double err = 0.0, norm = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const PhasePoint z = g.node_point(n);
        const double shifted_p = z.p + t;
        const double expect =
            std::exp(-2.0 * (z.q * z.q + shifted_p * shifted_p)) / mass;
        err += std::norm(out.diag()[n] - Complex(expect));
        norm += expect * expect;
    }
    CHECK(err / norm < 1e-10);
}

TEST_CASE("liouville evolution preserves hermiticity and carries dyads inert") {
    PhaseSpaceGrid g = ref_grid(32);
    const auto H = PolynomialObservable::parse("0.5*q^2 + 0.5*p^2");
    ClassicalOperator rho(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const PhasePoint z = g.node_point(n);
        rho.set_diag(n, std::exp(-(z.q * z.q + z.p * z.p)));
    }
    rho.add_dyad(3, 17, {0.25, 0.5});
    rho.add_dyad(17, 3, {0.25, -0.5});
    const ClassicalOperator out =
        liouville_evolve(H, rho, 0.1, 100, Scheme::spectral);
    CHECK(out.is_hermitian(1e-10));
    CHECK(out.dyads().at({3, 17}) == Complex(0.25, 0.5));
}

TEST_CASE("characteristics: harmonic oscillator closes after one period") {
    const auto H = PolynomialObservable::parse("0.5*q^2 + 0.5*p^2");
    const PhasePoint z0{1.0, 0.5};
    const auto res = characteristics_evolve(H, z0, 2.0 * M_PI, 1e-3);
    CHECK(res.point.q == doctest::Approx(z0.q).epsilon(1e-6));
    CHECK(res.point.p == doctest::Approx(z0.p).epsilon(1e-6));
    CHECK(!res.left_bounds);
}

TEST_CASE("characteristics: quarter period rotation") {
    const auto H = PolynomialObservable::parse("0.5*q^2 + 0.5*p^2");
    const auto res = characteristics_evolve(H, {1.0, 0.0}, M_PI / 2.0, 1e-3);
    CHECK(res.point.q == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(res.point.p == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("characteristics: nonseparable hamiltonian conserves energy") {
    const auto H = PolynomialObservable::parse("0.5*q^2*p^2 + q*p");
    const PhasePoint z0{0.8, 0.3};
    const auto res = characteristics_evolve(H, z0, 2.0, 1e-3);
    CHECK(H.eval(res.point) == doctest::Approx(H.eval(z0)).epsilon(1e-8));
}

TEST_CASE("characteristics flag clamped-boundary excursions") {
    const auto H = PolynomialObservable::parse("p"); // dq/dt = 1
    PhaseSpaceGrid g(-1.0, 1.0, -1.0, 1.0, 16, 16, Boundary::clamped);
    const auto res = characteristics_evolve(H, {0.0, 0.0}, 5.0, 1e-3, &g);
    CHECK(res.left_bounds);
}

TEST_CASE("classical expectation values") {
    PhaseSpaceGrid g = ref_grid();
    const ClassicalOperator rho = delta_state(g, {1.0, -0.5});
    CHECK(classical_expectation(PolynomialObservable::parse("q"), rho) ==
          doctest::Approx(1.0));
    CHECK(classical_expectation(PolynomialObservable::parse("p"), rho) ==
          doctest::Approx(-0.5));
    ClassicalOperator zero(g);
    CHECK_THROWS_AS(
        classical_expectation(PolynomialObservable::parse("q"), zero),
        NumericsError);
}
