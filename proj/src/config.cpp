#include "hybridlab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hybridlab {

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where.empty() ? what : where + ": " + what);
}

double parse_real(const std::string& where, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(where, "expected a number, got '" + t + "'");
    }
    if (used != t.size()) fail(where, "trailing characters in number '" + t + "'");
    return value;
}

int parse_int(const std::string& where, const std::string& text) {
    const double v = parse_real(where, text);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) fail(where, "expected an integer");
    return i;
}

std::vector<double> parse_real_list(const std::string& where,
                                    const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(where, item));
    if (out.empty()) fail(where, "expected a comma-separated list of numbers");
    return out;
}

// Entries are reals or (re,im) pairs; commas inside parentheses do not split.
std::vector<Complex> parse_complex_list(const std::string& where,
                                        const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char ch : text) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (depth != 0) fail(where, "unbalanced parentheses");
    std::vector<Complex> out;
    for (const auto& raw : parts) {
        const std::string t = trim(raw);
        if (t.empty()) fail(where, "empty list entry");
        if (t.front() == '(') {
            if (t.back() != ')') fail(where, "expected '(re,im)'");
            const std::string inner = t.substr(1, t.size() - 2);
            const std::size_t comma = inner.find(',');
            if (comma == std::string::npos) fail(where, "expected '(re,im)'");
            out.emplace_back(parse_real(where, inner.substr(0, comma)),
                             parse_real(where, inner.substr(comma + 1)));
        } else {
            out.emplace_back(parse_real(where, t), 0.0);
        }
    }
    return out;
}

PolynomialObservable parse_poly(const std::string& where,
                                const std::string& text) {
    try {
        return PolynomialObservable::parse(text);
    } catch (const ConfigError& e) {
        fail(where, e.what());
    }
}

struct GridFields {
    double q_min = -4.0, q_max = 4.0, p_min = -4.0, p_max = 4.0;
    int n_q = 64, n_p = 64;
    Boundary boundary = Boundary::periodic;
};

struct Builder {
    RunConfig cfg;
    GridFields grid;
    bool grid_touched = false;

    void apply(const std::string& section, const std::string& key,
               const std::string& value, const std::string& where) {
        if (section == "scenario") apply_scenario(key, value, where);
        else if (section == "grid") apply_grid(key, value, where);
        else if (section == "numerics") apply_numerics(key, value, where);
        else if (section == "classical") apply_classical(key, value, where);
        else fail(where, "unknown section [" + section + "]");
    }

    void apply_scenario(const std::string& key, const std::string& value,
                        const std::string& where) {
        auto& sc = cfg.scenario;
        if (key == "h") {
            sc.spec.h = parse_real_list(where, value);
            sc.spec.dim = static_cast<int>(sc.spec.h.size());
        } else if (key == "v") {
            sc.spec.v = parse_real_list(where, value);
            if (sc.spec.h.empty())
                sc.spec.dim = static_cast<int>(sc.spec.v.size());
        } else if (key == "H_cm") {
            sc.spec.H_cm = parse_poly(where, value);
        } else if (key == "V_cm") {
            sc.spec.V_cm = parse_poly(where, value);
        } else if (key == "amplitudes") {
            sc.amplitudes = parse_complex_list(where, value);
        } else if (key == "pointer") {
            const auto xs = parse_real_list(where, value);
            if (xs.size() != 2) fail(where, "pointer needs exactly 'q, p'");
            sc.pointer = {xs[0], xs[1]};
        } else if (key == "t_final") {
            sc.t_final = parse_real(where, value);
        } else if (key == "n_samples") {
            sc.n_samples = parse_int(where, value);
        } else if (key == "mode") {
            try {
                sc.mode = mode_from_string(trim(value));
            } catch (const ConfigError& e) {
                fail(where, e.what());
            }
        } else {
            fail(where, "unknown key '" + key + "' in [scenario]");
        }
    }

    void apply_grid(const std::string& key, const std::string& value,
                    const std::string& where) {
        grid_touched = true;
        if (key == "q_min") grid.q_min = parse_real(where, value);
        else if (key == "q_max") grid.q_max = parse_real(where, value);
        else if (key == "p_min") grid.p_min = parse_real(where, value);
        else if (key == "p_max") grid.p_max = parse_real(where, value);
        else if (key == "n_q") grid.n_q = parse_int(where, value);
        else if (key == "n_p") grid.n_p = parse_int(where, value);
        else if (key == "boundary") {
            try {
                grid.boundary = boundary_from_string(trim(value));
            } catch (const ConfigError& e) {
                fail(where, e.what());
            }
        } else {
            fail(where, "unknown key '" + key + "' in [grid]");
        }
    }

    void apply_numerics(const std::string& key, const std::string& value,
                        const std::string& where) {
        auto& num = cfg.scenario.numerics;
        if (key == "dt") num.dt = parse_real(where, value);
        else if (key == "hbar") num.hbar = parse_real(where, value);
        else if (key == "residual_threshold")
            num.residual_threshold = parse_real(where, value);
        else if (key == "positivity_tolerance")
            num.positivity_tolerance = parse_real(where, value);
        else if (key == "scheme") {
            try {
                num.scheme = scheme_from_string(trim(value));
            } catch (const ConfigError& e) {
                fail(where, e.what());
            }
        } else {
            fail(where, "unknown key '" + key + "' in [numerics]");
        }
    }

    void apply_classical(const std::string& key, const std::string& value,
                         const std::string& where) {
        if (!cfg.classical) cfg.classical.emplace();
        auto& cl = *cfg.classical;
        if (key == "H") cl.H = parse_poly(where, value);
        else if (key == "initial") {
            const std::string t = trim(value);
            if (t != "gaussian" && t != "delta")
                fail(where, "initial must be 'gaussian' or 'delta'");
            cl.initial = t;
        } else if (key == "center_q") cl.center_q = parse_real(where, value);
        else if (key == "center_p") cl.center_p = parse_real(where, value);
        else if (key == "sigma_q") cl.sigma_q = parse_real(where, value);
        else if (key == "sigma_p") cl.sigma_p = parse_real(where, value);
        else if (key == "t") cl.t = parse_real(where, value);
        else if (key == "steps") cl.steps = parse_int(where, value);
        else fail(where, "unknown key '" + key + "' in [classical]");
    }

    void finalize() {
        if (grid.n_q < 2 || grid.n_p < 2)
            throw ConfigError("grid: n_q and n_p must be >= 2");
        cfg.scenario.grid =
            PhaseSpaceGrid(grid.q_min, grid.q_max, grid.p_min, grid.p_max,
                           grid.n_q, grid.n_p, grid.boundary);
        cfg.scenario.validate();
    }
};

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
    Builder b;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t cut = line.find_first_of("#;");
        std::string body = trim(cut == std::string::npos ? line
                                                         : line.substr(0, cut));
        if (body.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (body.front() == '[') {
            if (body.back() != ']')
                fail(where, "malformed section header '" + body + "'");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) fail(where, "empty section name");
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            fail(where, "expected 'key = value', got '" + body + "'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) fail(where, "empty key");
        if (section.empty())
            fail(where, "key '" + key + "' appears before any [section]");
        b.apply(section, key, value, where);
    }
    b.finalize();
    return b.cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::size_t dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= key.size())
        throw ConfigError("override key must look like 'section.key', got '" +
                          key + "'");
    Builder b;
    b.cfg = *this;
    b.grid = {scenario.grid.q_min(), scenario.grid.q_max(),
              scenario.grid.p_min(), scenario.grid.p_max(),
              scenario.grid.n_q(),   scenario.grid.n_p(),
              scenario.grid.boundary()};
    b.apply(key.substr(0, dot), key.substr(dot + 1), value,
            "override " + key);
    if (b.grid_touched)
        b.cfg.scenario.grid =
            PhaseSpaceGrid(b.grid.q_min, b.grid.q_max, b.grid.p_min,
                           b.grid.p_max, b.grid.n_q, b.grid.n_p,
                           b.grid.boundary);
    *this = b.cfg;
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    const auto& sc = scenario;
    out << "[scenario]\n";
    auto emit_list = [&](const char* key, const std::vector<double>& xs) {
        out << key << " = ";
        for (std::size_t k = 0; k < xs.size(); ++k)
            out << (k ? ", " : "") << fmt17(xs[k]);
        out << "\n";
    };
    emit_list("h", sc.spec.h);
    emit_list("v", sc.spec.v);
    out << "H_cm = " << sc.spec.H_cm.to_string() << "\n";
    out << "V_cm = " << sc.spec.V_cm.to_string() << "\n";
    out << "amplitudes = ";
    for (std::size_t k = 0; k < sc.amplitudes.size(); ++k) {
        const Complex c = sc.amplitudes[k];
        if (k) out << ", ";
        if (c.imag() == 0.0) out << fmt17(c.real());
        else out << "(" << fmt17(c.real()) << ", " << fmt17(c.imag()) << ")";
    }
    out << "\n";
    out << "pointer = " << fmt17(sc.pointer.q) << ", " << fmt17(sc.pointer.p)
        << "\n";
    out << "t_final = " << fmt17(sc.t_final) << "\n";
    out << "n_samples = " << sc.n_samples << "\n";
    out << "mode = " << to_string(sc.mode) << "\n";
    out << "\n[grid]\n";
    out << "q_min = " << fmt17(sc.grid.q_min()) << "\n";
    out << "q_max = " << fmt17(sc.grid.q_max()) << "\n";
    out << "p_min = " << fmt17(sc.grid.p_min()) << "\n";
    out << "p_max = " << fmt17(sc.grid.p_max()) << "\n";
    out << "n_q = " << sc.grid.n_q() << "\n";
    out << "n_p = " << sc.grid.n_p() << "\n";
    out << "boundary = " << to_string(sc.grid.boundary()) << "\n";
    out << "\n[numerics]\n";
    out << "dt = " << fmt17(sc.numerics.dt) << "\n";
    out << "scheme = " << to_string(sc.numerics.scheme) << "\n";
    out << "hbar = " << fmt17(sc.numerics.hbar) << "\n";
    out << "residual_threshold = " << fmt17(sc.numerics.residual_threshold)
        << "\n";
    out << "positivity_tolerance = " << fmt17(sc.numerics.positivity_tolerance)
        << "\n";
    if (classical) {
        const auto& cl = *classical;
        out << "\n[classical]\n";
        out << "H = " << cl.H.to_string() << "\n";
        out << "initial = " << cl.initial << "\n";
        out << "center_q = " << fmt17(cl.center_q) << "\n";
        out << "center_p = " << fmt17(cl.center_p) << "\n";
        out << "sigma_q = " << fmt17(cl.sigma_q) << "\n";
        out << "sigma_p = " << fmt17(cl.sigma_p) << "\n";
        out << "t = " << fmt17(cl.t) << "\n";
        out << "steps = " << cl.steps << "\n";
    }
    return out.str();
}

} // namespace hybridlab
