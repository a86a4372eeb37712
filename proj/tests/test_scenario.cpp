#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybridlab/scenario.hpp"

using namespace hybridlab;

namespace {

ScenarioConfig reference(int n = 64) {
    ScenarioConfig cfg;
    cfg.spec = build_measurement_hamiltonian(
        {0.0, 0.0}, {1.0, -1.0}, PolynomialObservable(),
        PolynomialObservable::parse("q"));
    cfg.amplitudes = {Complex(M_SQRT1_2, 0.0), Complex(M_SQRT1_2, 0.0)};
    cfg.pointer = {0.0, 0.0};
    cfg.grid = PhaseSpaceGrid(-4, 4, -4, 4, n, n, Boundary::periodic);
    return cfg;
}

const CandidateSeries& series_of(const ScenarioReport& r, CandidateKind kind) {
    for (const auto& s : r.candidates)
        if (s.kind == kind) return s;
    throw std::runtime_error("missing candidate series");
}

} // namespace

TEST_CASE("build_measurement_hamiltonian validates lengths, allows degeneracy") {
    CHECK_THROWS_AS(build_measurement_hamiltonian({0.0}, {1.0, 2.0},
                                                  PolynomialObservable(),
                                                  PolynomialObservable()),
                    ConfigError);
    CHECK_NOTHROW(build_measurement_hamiltonian({0.0, 0.0}, {1.0, 1.0},
                                                PolynomialObservable(),
                                                PolynomialObservable::parse("q")));
    CHECK_NOTHROW(build_measurement_hamiltonian({1.0, 2.0}, {1.0, -1.0},
                                                PolynomialObservable(),
                                                PolynomialObservable::parse("q")));
}

TEST_CASE("config validation catches the usual mistakes") {
    ScenarioConfig cfg = reference();
    CHECK_NOTHROW(cfg.validate());

    ScenarioConfig bad = cfg;
    bad.amplitudes = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
    CHECK_THROWS_WITH_AS(bad.validate(),
                         doctest::Contains("amplitudes"), ConfigError);
    bad = cfg;
    bad.pointer = {10.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.n_samples = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.numerics.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("reference run reproduces the full verdict chain") {
    const ScenarioReport r = run_scenario(reference());
    CHECK(r.verdict.seven_rejected_dynamics);
    CHECK(r.verdict.eight_rejected_positivity);
    CHECK(r.verdict.nine_accepted);
    CHECK(r.residual_dt == doctest::Approx(0.125));
    CHECK(!r.periodic_pointer_warning);
    CHECK(r.candidates.size() == 3);
    for (const auto& series : r.candidates) CHECK(!series.errored);
}

TEST_CASE("verdict is consistent with the recorded diagnostics") {
    const ScenarioConfig cfg = reference();
    const ScenarioReport r = run_scenario(cfg);
    const double eig_tol =
        cfg.numerics.positivity_tolerance / cfg.grid.cell_measure();
    bool seven_evidence = false, eight_evidence = false;
    for (const auto& s : series_of(r, CandidateKind::seven).samples)
        if (s.t > 0 && std::isfinite(s.residual) &&
            s.residual > cfg.numerics.residual_threshold)
            seven_evidence = true;
    for (const auto& s : series_of(r, CandidateKind::eight).samples)
        if (s.min_eigenvalue < -eig_tol) eight_evidence = true;
    CHECK(seven_evidence == r.verdict.seven_rejected_dynamics);
    CHECK(eight_evidence == r.verdict.eight_rejected_positivity);
}

TEST_CASE("diagonal outcome probabilities stay constant in time") {
    const ScenarioReport r = run_scenario(reference());
    for (const auto& series : r.candidates)
        for (const auto& s : series.samples)
            for (double p : s.outcome_probs)
                CHECK(p == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("pointer marginals of distinct outcomes separate") {
    const ScenarioReport r = run_scenario(reference());
    const auto& nine = series_of(r, CandidateKind::nine);
    const Sample& last = nine.samples.back();
    // |v1 - v2| * t = 2 momentum units = 16 cells at 64x64
    CHECK(std::abs(last.pointer_marginals[0].p - last.pointer_marginals[1].p) >
          8 * 0.125);
}

TEST_CASE("early samples report an unresolvable residual as NaN") {
    const ScenarioReport r = run_scenario(reference());
    for (const auto& series : r.candidates) {
        CHECK(std::isnan(series.samples.front().residual)); // t = 0
        for (const auto& s : series.samples)
            if (s.t > r.residual_dt) CHECK(std::isfinite(s.residual));
    }
}

TEST_CASE("verdict chain is stable under grid refinement") {
    for (int n : {32, 64, 128}) {
        const ScenarioReport r = run_scenario(reference(n));
        CHECK(r.verdict.seven_rejected_dynamics);
        CHECK(r.verdict.eight_rejected_positivity);
        CHECK(r.verdict.nine_accepted);
    }
}

TEST_CASE("eigenstate input: nothing to collapse") {
    ScenarioConfig cfg = reference();
    cfg.amplitudes = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
    const ScenarioReport r = run_scenario(cfg);
    CHECK(!r.verdict.seven_rejected_dynamics);
    CHECK(!r.verdict.eight_rejected_positivity);
    CHECK(r.verdict.nine_accepted);
    for (const auto& series : r.candidates)
        for (const auto& s : series.samples) {
            if (std::isfinite(s.residual)) CHECK(s.residual <= 0.05);
            CHECK(s.entropy == doctest::Approx(0.0).epsilon(1e-8));
        }
}

TEST_CASE("no measurement coupling: no rejections") {
    ScenarioConfig cfg = reference();
    cfg.spec = build_measurement_hamiltonian({1.0, 2.0}, {0.0, 0.0},
                                             PolynomialObservable(),
                                             PolynomialObservable::parse("q"));
    const ScenarioReport r = run_scenario(cfg);
    CHECK(!r.verdict.seven_rejected_dynamics);
    CHECK(!r.verdict.eight_rejected_positivity);
    const auto& seven = series_of(r, CandidateKind::seven);
    for (const auto& s : seven.samples) {
        // the product state stays pure under pure phase evolution
        CHECK(s.purity_defect <= 1e-10);
        CHECK(s.min_eigenvalue >= -1e-10);
    }
}

TEST_CASE("unstable dt is refused with a suggestion") {
    ScenarioConfig cfg = reference();
    cfg.numerics.dt = 1.0;
    try {
        run_scenario(cfg);
        FAIL("expected StabilityError");
    } catch (const StabilityError& e) {
        CHECK(e.suggested_dt() > 0.0);
        CHECK(e.suggested_dt() < 1.0);
    }
}

TEST_CASE("periodic pointer motion triggers the advisory flag") {
    ScenarioConfig cfg = reference();
    // a harmonic V_cm closes the pointer orbit well inside t_final
    cfg.spec = build_measurement_hamiltonian(
        {0.0, 0.0}, {1.0, 1.0},
        PolynomialObservable(),
        PolynomialObservable::parse("8*q^2 + 8*p^2"));
    cfg.pointer = {1.0, 0.0};
    cfg.numerics.dt = 1e-4;
    cfg.t_final = 1.0;
    const ScenarioReport r = run_scenario(cfg);
    CHECK(r.periodic_pointer_warning);
}

TEST_CASE("entropy arrow: jump to the mixing entropy, then constant") {
    ScenarioConfig cfg = reference();
    const auto series = entropy_arrow(cfg);
    CHECK(series.front().second == doctest::Approx(0.0));
    for (std::size_t k = 1; k < series.size(); ++k) {
        CHECK(series[k].second ==
              doctest::Approx(std::log(2.0)).epsilon(1e-10));
        CHECK(series[k].second >= series[k - 1].second - 1e-12);
    }

    cfg.amplitudes = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
    for (const auto& [t, s] : entropy_arrow(cfg))
        CHECK(s == doctest::Approx(0.0).epsilon(1e-10));

    cfg.amplitudes = {Complex(std::sqrt(0.9), 0.0),
                      Complex(std::sqrt(0.1), 0.0)};
    const double expect = -0.9 * std::log(0.9) - 0.1 * std::log(0.1);
    CHECK(entropy_arrow(cfg).back().second ==
          doctest::Approx(expect).epsilon(1e-10));

    cfg.mode = Mode::linear;
    CHECK_THROWS_AS(entropy_arrow(cfg), ConfigError);
}

TEST_CASE("mode round trips through strings") {
    for (Mode m : {Mode::linear, Mode::collapse, Mode::trial})
        CHECK(mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(mode_from_string("bogus"), ConfigError);
}
