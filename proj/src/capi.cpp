#include "hybridlab.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "hybridlab/config.hpp"
#include "hybridlab/report_io.hpp"

using namespace hybridlab;

struct hl_config {
    RunConfig cfg;
};

struct hl_report {
    ScenarioReport report;
    std::string verdict_text;
};

namespace {

thread_local std::string g_last_error;

hl_status set_error(hl_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Maps C++ exceptions onto the C status codes; fallback is used for plain
// std::exception (IO for writers, numerics for solvers).
template <typename Fn>
hl_status guarded(hl_status fallback, Fn&& fn) {
    try {
        fn();
        return HL_OK;
    } catch (const ConfigError& e) {
        return set_error(HL_ERR_CONFIG, e.what());
    } catch (const StabilityError& e) {
        return set_error(HL_ERR_NUMERICS, e.what());
    } catch (const NumericsError& e) {
        return set_error(HL_ERR_NUMERICS, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return set_error(HL_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return set_error(fallback, e.what());
    }
}

std::string verdict_tags(const VerdictChain& v) {
    std::string out;
    auto add = [&](bool flag, const char* tag) {
        if (!flag) return;
        if (!out.empty()) out += ' ';
        out += tag;
    };
    add(v.seven_rejected_dynamics, "seven_rejected_dynamics");
    add(v.eight_rejected_positivity, "eight_rejected_positivity");
    add(v.nine_accepted, "nine_accepted");
    if (out.empty()) out = "none";
    return out;
}

const CandidateSeries* find_series(const ScenarioReport& report,
                                   const char* candidate) {
    for (const auto& series : report.candidates)
        if (to_string(series.kind) == candidate) return &series;
    return nullptr;
}

ClassicalOperator build_classical_initial(const ClassicalRunConfig& cl,
                                          const PhaseSpaceGrid& grid) {
    if (cl.initial == "delta")
        return delta_state(grid, {cl.center_q, cl.center_p});
    ClassicalOperator rho(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const PhasePoint z = grid.node_point(n);
        const double xq = (z.q - cl.center_q) / cl.sigma_q;
        const double xp = (z.p - cl.center_p) / cl.sigma_p;
        rho.set_diag(n, std::exp(-0.5 * (xq * xq + xp * xp)));
    }
    const double tr = rho.trace().real();
    if (tr <= 0.0) throw NumericsError("initial density has zero mass on grid");
    rho *= Complex(1.0 / tr, 0.0);
    return rho;
}

void write_classical_csv(const ClassicalOperator& rho, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "q,p,density\n";
    const auto& grid = rho.grid();
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const PhasePoint z = grid.node_point(n);
        out << format_double(z.q) << ',' << format_double(z.p) << ','
            << format_double(rho.diag()[n].real()) << "\n";
    }
}

void write_quantum_csv(const QuantumOperator& rho, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "i,j,re,im\n";
    for (int i = 0; i < rho.dim(); ++i)
        for (int j = 0; j < rho.dim(); ++j)
            out << i + 1 << ',' << j + 1 << ','
                << format_double(rho.matrix()(i, j).real()) << ','
                << format_double(rho.matrix()(i, j).imag()) << "\n";
}

void write_dyads_csv(const HybridDyadState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "i,j,q_ket,p_ket,q_bra,p_bra,re,im\n";
    for (const auto& t : state.terms())
        out << t.i + 1 << ',' << t.j + 1 << ',' << format_double(t.ket.q)
            << ',' << format_double(t.ket.p) << ',' << format_double(t.bra.q)
            << ',' << format_double(t.bra.p) << ','
            << format_double(t.coeff.real()) << ','
            << format_double(t.coeff.imag()) << "\n";
}

void execute_command(const RunConfig& cfg, const std::string& command,
                     const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const ScenarioConfig& sc = cfg.scenario;
    if (command == "scenario") {
        const ScenarioReport report = run_scenario(sc);
        emit_report(report, out_dir + "/report.json");
        emit_timeseries(report, out_dir + "/timeseries.csv");
        emit_plotdata(report, out_dir + "/plotdata");
        return;
    }
    if (command == "diagnose") {
        const ScenarioReport report = run_scenario(sc);
        emit_report(report, out_dir + "/report.json");
        return;
    }
    if (command == "evolve-classical") {
        if (!cfg.classical)
            throw ConfigError("evolve-classical needs a [classical] section");
        const auto& cl = *cfg.classical;
        const ClassicalOperator initial = build_classical_initial(cl, sc.grid);
        const ClassicalOperator final = liouville_evolve(
            cl.H, initial, cl.t, cl.steps, sc.numerics.scheme);
        write_classical_csv(final, out_dir + "/classical_final.csv");
        return;
    }
    if (command == "evolve-quantum") {
        sc.validate();
        Eigen::VectorXcd psi(sc.spec.dim);
        for (int i = 0; i < sc.spec.dim; ++i) psi(i) = sc.amplitudes[i];
        const QuantumOperator H = QuantumOperator::diagonal(sc.spec.h);
        const QuantumOperator rho = von_neumann_evolve(
            H, QuantumOperator::projector(psi), sc.t_final, 0,
            sc.numerics.hbar);
        write_quantum_csv(rho, out_dir + "/quantum_final.csv");
        return;
    }
    if (command == "evolve-hybrid") {
        sc.validate();
        HybridDyadState initial(sc.spec.dim, sc.grid);
        for (int i = 0; i < sc.spec.dim; ++i)
            for (int j = 0; j < sc.spec.dim; ++j) {
                const Complex w = sc.amplitudes[i] * std::conj(sc.amplitudes[j]);
                if (w != Complex(0.0, 0.0))
                    initial.add_term({i, j, w, sc.pointer, sc.pointer});
            }
        if (sc.mode == Mode::collapse)
            initial = collapse_map(initial, sc.spec);
        const HybridDyadState final = evolve_hybrid_dyads(
            sc.spec, initial, sc.t_final, sc.numerics.hbar, sc.numerics.dt);
        write_dyads_csv(final, out_dir + "/hybrid_final.csv");
        return;
    }
    throw ConfigError("unknown command '" + command +
                      "' (expected scenario, evolve-classical, "
                      "evolve-quantum, evolve-hybrid or diagnose)");
}

} // namespace

extern "C" {

const char* hl_version(void) { return kVersion; }

const char* hl_last_error(void) { return g_last_error.c_str(); }

hl_status hl_config_parse_file(const char* path, hl_config** out) {
    if (!path || !out) return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_CONFIG, [&] {
        auto* handle = new hl_config{RunConfig::parse_file(path)};
        *out = handle;
    });
}

hl_status hl_config_parse_string(const char* text, hl_config** out) {
    if (!text || !out) return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_CONFIG, [&] {
        auto* handle = new hl_config{RunConfig::parse(text)};
        *out = handle;
    });
}

hl_status hl_config_set(hl_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value)
        return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_CONFIG, [&] { cfg->cfg.set(key, value); });
}

hl_status hl_config_serialize(const hl_config* cfg, char** out) {
    if (!cfg || !out) return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_CONFIG, [&] {
        const std::string text = cfg->cfg.serialize();
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
    });
}

void hl_config_free(hl_config* cfg) { delete cfg; }

hl_status hl_scenario_run(const hl_config* cfg, hl_report** out) {
    if (!cfg || !out) return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_NUMERICS, [&] {
        auto* handle = new hl_report{run_scenario(cfg->cfg.scenario), {}};
        handle->verdict_text = verdict_tags(handle->report.verdict);
        *out = handle;
    });
}

const char* hl_report_verdict(const hl_report* report) {
    if (!report) return "";
    return report->verdict_text.c_str();
}

hl_status hl_report_write_csv(const hl_report* report, const char* path) {
    if (!report || !path) return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_IO, [&] { emit_timeseries(report->report, path); });
}

hl_status hl_report_write_json(const hl_report* report, const char* path) {
    if (!report || !path) return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_IO, [&] { emit_report(report->report, path); });
}

hl_status hl_report_write_plotdata(const hl_report* report, const char* dir) {
    if (!report || !dir) return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_IO, [&] { emit_plotdata(report->report, dir); });
}

hl_status hl_report_num_samples(const hl_report* report, size_t* out) {
    if (!report || !out) return set_error(HL_ERR_INVALID, "null argument");
    *out = report->report.candidates.empty()
               ? 0
               : report->report.candidates.front().samples.size();
    return HL_OK;
}

hl_status hl_report_value(const hl_report* report, const char* candidate,
                          size_t sample, const char* field, double* out) {
    if (!report || !candidate || !field || !out)
        return set_error(HL_ERR_INVALID, "null argument");
    const CandidateSeries* series = find_series(report->report, candidate);
    if (!series)
        return set_error(HL_ERR_INVALID,
                         std::string("unknown candidate '") + candidate + "'");
    if (sample >= series->samples.size())
        return set_error(HL_ERR_INVALID, "sample index out of range");
    const Sample& s = series->samples[sample];
    const std::string f = field;
    if (f == "t") *out = s.t;
    else if (f == "residual") *out = s.residual;
    else if (f == "purity_defect") *out = s.purity_defect;
    else if (f == "min_eigenvalue") *out = s.min_eigenvalue;
    else if (f == "entropy") *out = s.entropy;
    else if (f.rfind("prob_outcome_", 0) == 0) {
        const int k = std::atoi(f.c_str() + 13);
        if (k < 1 || k > static_cast<int>(s.outcome_probs.size()))
            return set_error(HL_ERR_INVALID, "outcome index out of range");
        *out = s.outcome_probs[k - 1];
    } else {
        return set_error(HL_ERR_INVALID,
                         std::string("unknown field '") + field + "'");
    }
    return HL_OK;
}

void hl_report_free(hl_report* report) { delete report; }

hl_status hl_execute(const hl_config* cfg, const char* command,
                     const char* out_dir) {
    if (!cfg || !command || !out_dir)
        return set_error(HL_ERR_INVALID, "null argument");
    return guarded(HL_ERR_NUMERICS,
                   [&] { execute_command(cfg->cfg, command, out_dir); });
}

} // extern "C"
