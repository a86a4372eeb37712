#ifndef HYBRIDLAB_SCENARIO_HPP
#define HYBRIDLAB_SCENARIO_HPP

#include <string>
#include <vector>

#include "hybridlab/hybrid.hpp"

namespace hybridlab {

enum class Mode { linear, collapse, trial };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct Numerics {
    double dt = 1e-3;
    Scheme scheme = Scheme::central;
    double hbar = 1.0;
    double residual_threshold = 0.1;
    // Scaled by 1/(dq*dp) when applied to raw eigenvalues.
    double positivity_tolerance = 1e-8;
};

struct ScenarioConfig {
    HamiltonianSpec spec;
    std::vector<Complex> amplitudes;
    PhasePoint pointer;
    PhaseSpaceGrid grid{-4.0, 4.0, -4.0, 4.0, 64, 64, Boundary::periodic};
    double t_final = 1.0;
    int n_samples = 11;
    Mode mode = Mode::collapse;
    Numerics numerics;

    void validate() const; // throws ConfigError
};

struct Sample {
    double t = 0.0;
    double residual = 0.0;       // NaN when unresolvable at this time
    double purity_defect = 0.0;
    double min_eigenvalue = 0.0;
    double entropy = 0.0;        // NaN when undefined (non-positive state)
    std::vector<double> outcome_probs;
    std::vector<PhasePoint> pointer_marginals; // per diagonal outcome
    bool errored = false;
    std::string error;
};

struct CandidateSeries {
    CandidateKind kind = CandidateKind::seven;
    std::vector<Sample> samples;
    bool errored = false;
    std::string error;
};

struct VerdictChain {
    bool seven_rejected_dynamics = false;
    bool eight_rejected_positivity = false;
    bool nine_accepted = false;
};

struct ScenarioReport {
    ScenarioConfig config;
    std::vector<CandidateSeries> candidates; // fixed order: seven, eight, nine
    VerdictChain verdict;
    // Advisory only: V_cm appears to drive the pointer on a closed orbit
    // within the run horizon.
    bool periodic_pointer_warning = false;
    double residual_dt = 0.0; // time step used for residual diagnostics
};

HamiltonianSpec build_measurement_hamiltonian(std::vector<double> h,
                                              std::vector<double> v,
                                              PolynomialObservable H_cm,
                                              PolynomialObservable V_cm);

ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Entropy of the evolved state in collapse mode: 0 at t=0, then the jump to
// the mixing entropy of the outcome weights.
std::vector<std::pair<double, double>> entropy_arrow(const ScenarioConfig& cfg);

} // namespace hybridlab

#endif
