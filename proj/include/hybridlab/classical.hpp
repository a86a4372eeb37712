#ifndef HYBRIDLAB_CLASSICAL_HPP
#define HYBRIDLAB_CLASSICAL_HPP

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "hybridlab/grid.hpp"
#include "hybridlab/polynomial.hpp"

namespace hybridlab {

using Complex = std::complex<double>;

enum class Scheme { central, spectral };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);
Scheme default_scheme(const PhaseSpaceGrid& grid);

// Operator on the classical sector: a diagonal kernel (one value per grid
// node) plus a sparse list of nondiagonal dyads |from><to|.
class ClassicalOperator {
public:
    using DyadKey = std::pair<std::size_t, std::size_t>;
    using DyadMap = std::map<DyadKey, Complex>;

    explicit ClassicalOperator(const PhaseSpaceGrid& grid);

    const PhaseSpaceGrid& grid() const { return grid_; }
    const std::vector<Complex>& diag() const { return diag_; }
    std::vector<Complex>& diag() { return diag_; }
    const DyadMap& dyads() const { return dyads_; }

    // from == to folds into the diagonal.
    void add_dyad(std::size_t from, std::size_t to, Complex weight);
    void set_diag(std::size_t node, Complex value) { diag_[node] = value; }

    ClassicalOperator adjoint() const;
    bool is_hermitian(double tol = 1e-12) const;
    Complex trace() const; // discrete measure: sum(diag) * dq * dp
    double frobenius_norm() const;
    bool is_zero(double tol = 0.0) const;

    ClassicalOperator& operator+=(const ClassicalOperator& other);
    ClassicalOperator& operator-=(const ClassicalOperator& other);
    ClassicalOperator& operator*=(Complex factor);
    // this += factor * other
    void axpy(Complex factor, const ClassicalOperator& other);

    void prune_dyads(double tol = 0.0);

private:
    PhaseSpaceGrid grid_;
    std::vector<Complex> diag_;
    DyadMap dyads_;
};

ClassicalOperator operator+(ClassicalOperator a, const ClassicalOperator& b);
ClassicalOperator operator-(ClassicalOperator a, const ClassicalOperator& b);
ClassicalOperator operator*(Complex factor, ClassicalOperator a);

// Operator product with the discrete resolution of identity: the matrix
// product scaled by dq*dp, which makes delta states exactly idempotent.
ClassicalOperator operator_product(const ClassicalOperator& a,
                                   const ClassicalOperator& b);

// Sample a polynomial on the grid nodes (empty dyad list).
ClassicalOperator to_classical_operator(const PolynomialObservable& f,
                                        const PhaseSpaceGrid& grid);

// Pure classical state: single diagonal entry 1/(dq*dp) at the snapped node.
ClassicalOperator delta_state(const PhaseSpaceGrid& grid, PhasePoint at);

// Derivative of the diagonal kernel along q or p with the given scheme.
std::vector<Complex> derivative_q(const PhaseSpaceGrid& grid,
                                  const std::vector<Complex>& field, Scheme scheme);
std::vector<Complex> derivative_p(const PhaseSpaceGrid& grid,
                                  const std::vector<Complex>& field, Scheme scheme);

// {H, A} = dH/dq * dA/dp - dH/dp * dA/dq on the diagonal part.  Nondiagonal
// dyads of A are annihilated (the derivative rule of the formalism): the
// output dyad list is always empty.
ClassicalOperator poisson_bracket(const PolynomialObservable& H,
                                  const ClassicalOperator& A, Scheme scheme);
// Variant with H given as a (dyad-free) operator; H is differentiated with
// the same scheme as A.
ClassicalOperator poisson_bracket(const ClassicalOperator& H,
                                  const ClassicalOperator& A, Scheme scheme);

// Throws StabilityError (with a suggested dt) if an explicit step of size dt
// would be unstable for transport generated by H.
void check_advection_stability(const PolynomialObservable& H,
                               const PhaseSpaceGrid& grid, double dt);

// Liouville evolution d rho/dt = {H, rho} with RK4 time stepping.
ClassicalOperator liouville_evolve(const PolynomialObservable& H,
                                   const ClassicalOperator& rho, double t,
                                   int steps, Scheme scheme);
ClassicalOperator liouville_evolve(const PolynomialObservable& H,
                                   const ClassicalOperator& rho, double t,
                                   int steps);

struct CharacteristicsResult {
    PhasePoint point;
    bool left_bounds = false; // clamped-boundary excursion flag
};

// Hamiltonian trajectories dq/dt = dH/dp, dp/dt = -dH/dq.  Leapfrog for
// separable H, implicit midpoint otherwise; both are symplectic.
CharacteristicsResult characteristics_evolve(const PolynomialObservable& H,
                                             PhasePoint z0, double t,
                                             double dt = 1e-3,
                                             const PhaseSpaceGrid* bounds = nullptr);

// Tr(f rho) / Tr(rho) in discrete form; dyads do not contribute.
double classical_expectation(const PolynomialObservable& f,
                             const ClassicalOperator& rho);

// || rho*rho*(dq*dp) - rho ||_F / ||rho||_F; zero exactly for delta states.
double purity_defect(const ClassicalOperator& rho);

} // namespace hybridlab

#endif
