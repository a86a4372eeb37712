#include "hybridlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <numeric>

namespace hybridlab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::linear: return "linear";
        case Mode::collapse: return "collapse";
        case Mode::trial: return "trial";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "linear") return Mode::linear;
    if (s == "collapse") return Mode::collapse;
    if (s == "trial") return Mode::trial;
    throw ConfigError("unknown mode '" + s +
                      "' (expected linear, collapse or trial)");
}

void ScenarioConfig::validate() const {
    if (spec.dim < 1) throw ConfigError("scenario: empty Hamiltonian spec");
    if (static_cast<int>(spec.h.size()) != spec.dim ||
        static_cast<int>(spec.v.size()) != spec.dim)
        throw ConfigError("scenario: h and v eigenvalue lists must have one "
                          "entry per level");
    if (static_cast<int>(amplitudes.size()) != spec.dim)
        throw ConfigError("scenario: amplitudes must list one entry per level");
    double norm2 = 0.0;
    for (const auto& c : amplitudes) norm2 += std::norm(c);
    if (std::abs(norm2 - 1.0) > 1e-9)
        throw ConfigError("scenario: amplitudes must be normalized (sum of "
                          "|c_i|^2 = 1)");
    if (!grid.contains(pointer))
        throw ConfigError("scenario: pointer lies outside the grid");
    if (t_final < 0.0) throw ConfigError("scenario: t_final must be >= 0");
    if (n_samples < 2) throw ConfigError("scenario: n_samples must be >= 2");
    if (numerics.dt <= 0.0) throw ConfigError("scenario: dt must be > 0");
    if (numerics.hbar <= 0.0) throw ConfigError("scenario: hbar must be > 0");
    if (numerics.residual_threshold <= 0.0)
        throw ConfigError("scenario: residual_threshold must be > 0");
    if (numerics.positivity_tolerance <= 0.0)
        throw ConfigError("scenario: positivity_tolerance must be > 0");
}

HamiltonianSpec build_measurement_hamiltonian(std::vector<double> h,
                                              std::vector<double> v,
                                              PolynomialObservable H_cm,
                                              PolynomialObservable V_cm) {
    return HamiltonianSpec(std::move(h), std::move(v), std::move(H_cm),
                           std::move(V_cm));
}

namespace {

// Fastest cell-crossing rate over the per-pair effective classical
// Hamiltonians.  Its inverse is the time step at which a snapped delta
// state advances by whole cells, which keeps the centered-difference
// residual free of projection noise.
double max_crossing_rate(const HamiltonianSpec& spec,
                         const PhaseSpaceGrid& grid) {
    double rate = 0.0;
    for (int i = 0; i < spec.dim; ++i)
        for (int j = i; j < spec.dim; ++j) {
            const double mid = 0.5 * (spec.v[i] + spec.v[j]);
            const PolynomialObservable H = spec.effective_classical(mid);
            const PolynomialObservable Hq = H.d_dq();
            const PolynomialObservable Hp = H.d_dp();
            double r = 0.0;
            for (std::size_t n = 0; n < grid.size(); ++n) {
                const PhasePoint z = grid.node_point(n);
                r = std::max(r, std::abs(Hp.eval(z)) / grid.dq() +
                                    std::abs(Hq.eval(z)) / grid.dp());
            }
            rate = std::max(rate, r);
        }
    return rate;
}

// Advisory only: does some pointer trajectory close on itself within the
// run horizon?  Sampled coarsely; false negatives are acceptable.
bool pointer_orbit_closes(const ScenarioConfig& cfg) {
    if (cfg.t_final <= 0.0) return false;
    const double cell =
        std::max(cfg.grid.dq(), cfg.grid.dp());
    for (int i = 0; i < cfg.spec.dim; ++i) {
        const PolynomialObservable H =
            cfg.spec.effective_classical(cfg.spec.v[i]);
        bool left = false;
        const int checks = 64;
        for (int k = 1; k <= checks; ++k) {
            const double t = cfg.t_final * k / checks;
            const PhasePoint z =
                characteristics_evolve(H, cfg.pointer, t, cfg.numerics.dt)
                    .point;
            const double d = std::hypot(z.q - cfg.pointer.q,
                                        z.p - cfg.pointer.p);
            if (d > cell) left = true;
            else if (left && d < 0.5 * cell) return true;
        }
    }
    return false;
}

CandidateSeries evaluate_candidate(CandidateKind kind,
                                   const ScenarioConfig& cfg,
                                   const std::vector<double>& times,
                                   double residual_dt) {
    CandidateSeries series;
    series.kind = kind;
    std::vector<std::size_t> all_nodes(cfg.grid.size());
    std::iota(all_nodes.begin(), all_nodes.end(), std::size_t{0});
    try {
        for (double t : times) {
            Sample s;
            s.t = t;
            try {
                const HybridDyadState state = make_candidate(
                    kind, cfg.spec, cfg.amplitudes, cfg.pointer, t, cfg.grid,
                    cfg.numerics.hbar, cfg.numerics.dt);
                HybridSparse sparse(state);
                // The centered stencil needs the state to clear at least one
                // full cell; earlier samples have no resolvable derivative.
                if (t > residual_dt && residual_dt > 0.0)
                    s.residual = residual_norm(
                        cfg.spec, kind, cfg.amplitudes, cfg.pointer, t,
                        residual_dt, cfg.grid, cfg.numerics.scheme,
                        cfg.numerics.hbar, cfg.numerics.dt);
                else
                    s.residual = kNaN;
                s.purity_defect = sparse.purity_defect();
                s.min_eigenvalue = sparse.min_eigenvalue();
                try {
                    s.entropy = von_neumann_entropy(state);
                } catch (const NumericsError&) {
                    s.entropy = kNaN;
                }
                s.outcome_probs.resize(cfg.spec.dim);
                for (int i = 0; i < cfg.spec.dim; ++i) {
                    Eigen::VectorXcd basis =
                        Eigen::VectorXcd::Zero(cfg.spec.dim);
                    basis(i) = 1.0;
                    s.outcome_probs[i] = sparse.event_probability(
                        QuantumOperator::projector(basis), all_nodes);
                }
                s.pointer_marginals.assign(cfg.spec.dim, PhasePoint{0, 0});
                std::vector<double> weight(cfg.spec.dim, 0.0);
                for (const auto& term : state.terms()) {
                    if (term.i != term.j) continue;
                    const double w = term.coeff.real();
                    weight[term.i] += w;
                    s.pointer_marginals[term.i].q += w * term.ket.q;
                    s.pointer_marginals[term.i].p += w * term.ket.p;
                }
                for (int i = 0; i < cfg.spec.dim; ++i) {
                    if (weight[i] > 0.0) {
                        s.pointer_marginals[i].q /= weight[i];
                        s.pointer_marginals[i].p /= weight[i];
                    } else {
                        s.pointer_marginals[i] = {kNaN, kNaN};
                    }
                }
            } catch (const std::exception& e) {
                s.errored = true;
                s.error = e.what();
                s.residual = s.purity_defect = s.min_eigenvalue = s.entropy =
                    kNaN;
            }
            series.samples.push_back(std::move(s));
        }
    } catch (const std::exception& e) {
        series.errored = true;
        series.error = e.what();
    }
    for (const auto& s : series.samples)
        if (s.errored) series.errored = true;
    if (series.errored && series.error.empty())
        for (const auto& s : series.samples)
            if (s.errored) {
                series.error = s.error;
                break;
            }
    return series;
}

int configured_threads() {
    const char* env = std::getenv("HYBRIDLAB_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

} // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    // The trajectory integrator needs dt to resolve sub-cell motion; an
    // oversized step is reported with a workable suggestion.
    for (int i = 0; i < cfg.spec.dim; ++i)
        for (int j = i; j < cfg.spec.dim; ++j)
            check_advection_stability(
                cfg.spec.effective_classical(0.5 *
                                             (cfg.spec.v[i] + cfg.spec.v[j])),
                cfg.grid, cfg.numerics.dt);
    ScenarioReport report;
    report.config = cfg;
    report.periodic_pointer_warning = pointer_orbit_closes(cfg);

    const double rate = max_crossing_rate(cfg.spec, cfg.grid);
    report.residual_dt = rate > 0.0 ? 1.0 / rate : 0.0;

    std::vector<double> times(cfg.n_samples);
    for (int k = 0; k < cfg.n_samples; ++k)
        times[k] = cfg.t_final * k / (cfg.n_samples - 1);

    const CandidateKind kinds[] = {CandidateKind::seven, CandidateKind::eight,
                                   CandidateKind::nine};
    if (configured_threads() > 1) {
        std::vector<std::future<CandidateSeries>> futures;
        for (CandidateKind kind : kinds)
            futures.push_back(std::async(std::launch::async, [&, kind] {
                return evaluate_candidate(kind, cfg, times, report.residual_dt);
            }));
        for (auto& f : futures) report.candidates.push_back(f.get());
    } else {
        for (CandidateKind kind : kinds)
            report.candidates.push_back(
                evaluate_candidate(kind, cfg, times, report.residual_dt));
    }

    const double eig_tol =
        cfg.numerics.positivity_tolerance / cfg.grid.cell_measure();
    const double prob_tol = 1e-8;
    for (const auto& series : report.candidates) {
        if (series.kind == CandidateKind::seven) {
            for (const auto& s : series.samples)
                if (s.t > 0.0 && !s.errored && std::isfinite(s.residual) &&
                    s.residual > cfg.numerics.residual_threshold)
                    report.verdict.seven_rejected_dynamics = true;
        } else if (series.kind == CandidateKind::eight) {
            for (const auto& s : series.samples)
                if (!s.errored && s.min_eigenvalue < -eig_tol)
                    report.verdict.eight_rejected_positivity = true;
        } else {
            bool ok = !series.errored;
            for (const auto& s : series.samples) {
                if (s.errored) ok = false;
                if (std::isfinite(s.residual) &&
                    s.residual > cfg.numerics.residual_threshold)
                    ok = false;
                if (s.min_eigenvalue < -eig_tol) ok = false;
                for (int i = 0; i < cfg.spec.dim &&
                                i < static_cast<int>(s.outcome_probs.size());
                     ++i)
                    if (std::abs(s.outcome_probs[i] -
                                 std::norm(cfg.amplitudes[i])) > prob_tol)
                        ok = false;
            }
            report.verdict.nine_accepted = ok;
        }
    }
    return report;
}

std::vector<std::pair<double, double>> entropy_arrow(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.mode != Mode::collapse)
        throw ConfigError("entropy_arrow: requires mode = collapse");
    std::vector<std::pair<double, double>> out;
    out.reserve(cfg.n_samples);
    for (int k = 0; k < cfg.n_samples; ++k) {
        const double t = cfg.t_final * k / (cfg.n_samples - 1);
        double entropy = 0.0;
        if (t > 0.0) {
            const HybridDyadState state = make_candidate(
                CandidateKind::nine, cfg.spec, cfg.amplitudes, cfg.pointer, t,
                cfg.grid, cfg.numerics.hbar, cfg.numerics.dt);
            entropy = von_neumann_entropy(state);
        }
        out.emplace_back(t, entropy);
    }
    return out;
}

} // namespace hybridlab
