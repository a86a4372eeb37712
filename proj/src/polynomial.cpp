#include "hybridlab/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace hybridlab {

PolynomialObservable::PolynomialObservable(std::vector<PolyTerm> terms)
    : terms_(std::move(terms)) {
    normalize();
}

void PolynomialObservable::normalize() {
    std::map<std::pair<int, int>, double> acc;
    for (const auto& t : terms_) {
        if (t.q_pow < 0 || t.p_pow < 0)
            throw ConfigError("polynomial powers must be nonnegative");
        acc[{t.q_pow, t.p_pow}] += t.coeff;
    }
    terms_.clear();
    for (const auto& [pows, c] : acc)
        if (c != 0.0) terms_.push_back({c, pows.first, pows.second});
}

PolynomialObservable PolynomialObservable::constant(double c) {
    return PolynomialObservable({{c, 0, 0}});
}
PolynomialObservable PolynomialObservable::q() {
    return PolynomialObservable({{1.0, 1, 0}});
}
PolynomialObservable PolynomialObservable::p() {
    return PolynomialObservable({{1.0, 0, 1}});
}

double PolynomialObservable::eval(double q, double p) const {
    double sum = 0.0;
    for (const auto& t : terms_)
        sum += t.coeff * std::pow(q, t.q_pow) * std::pow(p, t.p_pow);
    return sum;
}

PolynomialObservable PolynomialObservable::d_dq() const {
    std::vector<PolyTerm> out;
    for (const auto& t : terms_)
        if (t.q_pow > 0) out.push_back({t.coeff * t.q_pow, t.q_pow - 1, t.p_pow});
    return PolynomialObservable(out);
}

PolynomialObservable PolynomialObservable::d_dp() const {
    std::vector<PolyTerm> out;
    for (const auto& t : terms_)
        if (t.p_pow > 0) out.push_back({t.coeff * t.p_pow, t.q_pow, t.p_pow - 1});
    return PolynomialObservable(out);
}

PolynomialObservable& PolynomialObservable::operator+=(
    const PolynomialObservable& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    normalize();
    return *this;
}

PolynomialObservable PolynomialObservable::scaled(double factor) const {
    std::vector<PolyTerm> out = terms_;
    for (auto& t : out) t.coeff *= factor;
    return PolynomialObservable(out);
}

bool PolynomialObservable::is_zero() const { return terms_.empty(); }

bool PolynomialObservable::is_separable() const {
    return std::none_of(terms_.begin(), terms_.end(), [](const PolyTerm& t) {
        return t.q_pow > 0 && t.p_pow > 0;
    });
}

namespace {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return s[pos];
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ConfigError("polynomial parse error at offset " +
                          std::to_string(pos) + ": " + msg + " in '" +
                          std::string(s) + "'");
    }
};

double parse_number(Cursor& c) {
    c.skip_ws();
    const char* begin = c.s.data() + c.pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) c.fail("expected number");
    c.pos += static_cast<std::size_t>(end - begin);
    return v;
}

int parse_exponent(Cursor& c) {
    if (!c.done() && c.peek() == '^') {
        ++c.pos;
        c.skip_ws();
        std::size_t start = c.pos;
        while (c.pos < c.s.size() &&
               std::isdigit(static_cast<unsigned char>(c.s[c.pos])))
            ++c.pos;
        if (c.pos == start) c.fail("expected integer exponent");
        return std::stoi(std::string(c.s.substr(start, c.pos - start)));
    }
    return 1;
}

// term := [number] {'*'? ('q'|'p') ['^' int]}*
PolyTerm parse_term(Cursor& c) {
    PolyTerm t{1.0, 0, 0};
    bool have_any = false;
    c.skip_ws();
    char ch = c.peek();
    if (ch != 'q' && ch != 'p') {
        t.coeff = parse_number(c);
        have_any = true;
    }
    while (!c.done()) {
        char n = c.peek();
        if (n == '*') {
            ++c.pos;
            n = c.peek();
        } else if (n != 'q' && n != 'p') {
            break;
        }
        if (n == 'q') {
            ++c.pos;
            t.q_pow += parse_exponent(c);
        } else if (n == 'p') {
            ++c.pos;
            t.p_pow += parse_exponent(c);
        } else {
            c.fail("expected 'q' or 'p' after '*'");
        }
        have_any = true;
    }
    if (!have_any) c.fail("empty term");
    return t;
}

} // namespace

PolynomialObservable PolynomialObservable::parse(std::string_view text) {
    Cursor c{text};
    std::vector<PolyTerm> terms;
    if (c.done()) throw ConfigError("empty polynomial");
    double sign = 1.0;
    if (c.peek() == '+' || c.peek() == '-') {
        sign = c.peek() == '-' ? -1.0 : 1.0;
        ++c.pos;
    }
    while (true) {
        PolyTerm t = parse_term(c);
        t.coeff *= sign;
        terms.push_back(t);
        if (c.done()) break;
        char ch = c.peek();
        if (ch == '+')
            sign = 1.0;
        else if (ch == '-')
            sign = -1.0;
        else
            c.fail("expected '+' or '-' between terms");
        ++c.pos;
    }
    return PolynomialObservable(terms);
}

std::string PolynomialObservable::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& t : terms_) {
        double c = t.coeff;
        if (!first) {
            out << (c < 0 ? " - " : " + ");
            c = std::abs(c);
        }
        out.precision(17);
        out << c;
        if (t.q_pow > 0) {
            out << "*q";
            if (t.q_pow > 1) out << "^" << t.q_pow;
        }
        if (t.p_pow > 0) {
            out << "*p";
            if (t.p_pow > 1) out << "^" << t.p_pow;
        }
        first = false;
    }
    return out.str();
}

} // namespace hybridlab
