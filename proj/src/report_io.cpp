#include "hybridlab/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace hybridlab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_timeseries(const ScenarioReport& report, std::ostream& out) {
    const int dim = report.config.spec.dim;
    out << "t,candidate,residual,purity_defect,min_eigenvalue,entropy";
    for (int i = 1; i <= dim; ++i) out << ",prob_outcome_" << i;
    out << "\n";
    for (const auto& series : report.candidates)
        for (const auto& s : series.samples) {
            out << format_double(s.t) << ',' << to_string(series.kind) << ','
                << format_double(s.residual) << ','
                << format_double(s.purity_defect) << ','
                << format_double(s.min_eigenvalue) << ','
                << format_double(s.entropy);
            for (int i = 0; i < dim; ++i)
                out << ','
                    << format_double(i < static_cast<int>(s.outcome_probs.size())
                                         ? s.outcome_probs[i]
                                         : std::nan(""));
            out << "\n";
        }
}

void emit_timeseries(const ScenarioReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    emit_timeseries(report, out);
}

namespace {

nlohmann::json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

nlohmann::json config_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["h"] = cfg.spec.h;
    j["v"] = cfg.spec.v;
    j["H_cm"] = cfg.spec.H_cm.to_string();
    j["V_cm"] = cfg.spec.V_cm.to_string();
    nlohmann::json amps = nlohmann::json::array();
    for (const auto& c : cfg.amplitudes)
        amps.push_back({c.real(), c.imag()});
    j["amplitudes"] = amps;
    j["pointer"] = {cfg.pointer.q, cfg.pointer.p};
    j["grid"] = {{"q_min", cfg.grid.q_min()}, {"q_max", cfg.grid.q_max()},
                 {"p_min", cfg.grid.p_min()}, {"p_max", cfg.grid.p_max()},
                 {"n_q", cfg.grid.n_q()},     {"n_p", cfg.grid.n_p()},
                 {"boundary", to_string(cfg.grid.boundary())}};
    j["t_final"] = cfg.t_final;
    j["n_samples"] = cfg.n_samples;
    j["mode"] = to_string(cfg.mode);
    j["numerics"] = {
        {"dt", cfg.numerics.dt},
        {"scheme", to_string(cfg.numerics.scheme)},
        {"hbar", cfg.numerics.hbar},
        {"residual_threshold", cfg.numerics.residual_threshold},
        {"positivity_tolerance", cfg.numerics.positivity_tolerance}};
    return j;
}

} // namespace

std::string report_json(const ScenarioReport& report) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = config_json(report.config);
    j["verdict"] = {
        {"seven_rejected_dynamics", report.verdict.seven_rejected_dynamics},
        {"eight_rejected_positivity", report.verdict.eight_rejected_positivity},
        {"nine_accepted", report.verdict.nine_accepted}};
    j["periodic_pointer_warning"] = report.periodic_pointer_warning;
    j["residual_dt"] = report.residual_dt;
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& series : report.candidates) {
        nlohmann::json c;
        c["candidate"] = to_string(series.kind);
        c["errored"] = series.errored;
        if (series.errored) c["error"] = series.error;
        nlohmann::json samples = nlohmann::json::array();
        for (const auto& s : series.samples) {
            nlohmann::json row;
            row["t"] = s.t;
            row["residual"] = number_or_null(s.residual);
            row["purity_defect"] = number_or_null(s.purity_defect);
            row["min_eigenvalue"] = number_or_null(s.min_eigenvalue);
            row["entropy"] = number_or_null(s.entropy);
            nlohmann::json probs = nlohmann::json::array();
            for (double p : s.outcome_probs) probs.push_back(number_or_null(p));
            row["outcome_probs"] = probs;
            nlohmann::json marg = nlohmann::json::array();
            for (const auto& z : s.pointer_marginals)
                marg.push_back({number_or_null(z.q), number_or_null(z.p)});
            row["pointer_marginals"] = marg;
            if (s.errored) row["error"] = s.error;
            samples.push_back(std::move(row));
        }
        c["samples"] = std::move(samples);
        cands.push_back(std::move(c));
    }
    j["candidates"] = std::move(cands);
    return j.dump(2) + "\n";
}

void emit_report(const ScenarioReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << report_json(report);
}

void emit_plotdata(const ScenarioReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& series : report.candidates) {
        const std::string path =
            dir + "/pointer_" + to_string(series.kind) + ".csv";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        const int dim = report.config.spec.dim;
        out << "t";
        for (int i = 1; i <= dim; ++i) out << ",q_" << i << ",p_" << i;
        out << "\n";
        for (const auto& s : series.samples) {
            out << format_double(s.t);
            for (int i = 0; i < dim; ++i) {
                const PhasePoint z =
                    i < static_cast<int>(s.pointer_marginals.size())
                        ? s.pointer_marginals[i]
                        : PhasePoint{std::nan(""), std::nan("")};
                out << ',' << format_double(z.q) << ',' << format_double(z.p);
            }
            out << "\n";
        }
    }
}

} // namespace hybridlab
