#ifndef HYBRIDLAB_POLYNOMIAL_HPP
#define HYBRIDLAB_POLYNOMIAL_HPP

#include <string>
#include <string_view>
#include <vector>

#include "hybridlab/grid.hpp"

namespace hybridlab {

struct PolyTerm {
    double coeff = 0.0;
    int q_pow = 0;
    int p_pow = 0;
};

// Real polynomial in the commuting classical position and momentum
// operators.  Evaluation at a phase-space point gives the diagonal kernel.
class PolynomialObservable {
public:
    PolynomialObservable() = default;
    explicit PolynomialObservable(std::vector<PolyTerm> terms);

    // Grammar: sum of terms `c`, `c*q^a`, `c*p^b`, `c*q^a*p^b`; bare `q`,
    // `p` and omitted exponents are accepted; whitespace-insensitive.
    static PolynomialObservable parse(std::string_view text);

    static PolynomialObservable constant(double c);
    static PolynomialObservable q();
    static PolynomialObservable p();

    double eval(double q, double p) const;
    double eval(PhasePoint z) const { return eval(z.q, z.p); }

    PolynomialObservable d_dq() const;
    PolynomialObservable d_dp() const;

    PolynomialObservable& operator+=(const PolynomialObservable& other);
    PolynomialObservable scaled(double factor) const;

    bool is_zero() const;
    // True when no term mixes q and p; such Hamiltonians admit an explicit
    // leapfrog split.
    bool is_separable() const;

    const std::vector<PolyTerm>& terms() const { return terms_; }
    std::string to_string() const;

private:
    void normalize();
    std::vector<PolyTerm> terms_;
};

} // namespace hybridlab

#endif
