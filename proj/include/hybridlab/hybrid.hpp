#ifndef HYBRIDLAB_HYBRID_HPP
#define HYBRIDLAB_HYBRID_HPP

#include <complex>
#include <optional>
#include <vector>

#include "hybridlab/classical.hpp"
#include "hybridlab/quantum.hpp"

namespace hybridlab {

// Measurement-type hybrid Hamiltonian: the quantum system Hamiltonian and
// the measured observable are simultaneously diagonal in the measurement
// basis (eigenvalues h and v), plus classical parts H_cm and V_cm.
struct HamiltonianSpec {
    int dim = 0;
    std::vector<double> h;
    std::vector<double> v;
    PolynomialObservable H_cm;
    PolynomialObservable V_cm;

    HamiltonianSpec() = default;
    HamiltonianSpec(std::vector<double> h_eigs, std::vector<double> v_eigs,
                    PolynomialObservable H_classical,
                    PolynomialObservable V_classical);

    bool all_zero() const;
    // H_cm + weight * V_cm: the classical generator seen by a component.
    PolynomialObservable effective_classical(double weight) const;
};

// Grid representation of sum_ij rho^ij_qm (x) rho^ij_cm: an N x N array of
// classical-sector operators W[i][j].
class HybridGridState {
public:
    HybridGridState(int dim, const PhaseSpaceGrid& grid);

    int dim() const { return dim_; }
    const PhaseSpaceGrid& grid() const { return grid_; }
    ClassicalOperator& component(int i, int j);
    const ClassicalOperator& component(int i, int j) const;

    double trace() const; // sum_i Tr_cm W[i][i], real part
    double frobenius_norm() const;
    bool is_hermitian(double tol = 1e-12) const;
    // Rebuild the lower triangle as the adjoint of the upper one.
    void enforce_hermiticity();

    HybridGridState& operator+=(const HybridGridState& other);
    HybridGridState& operator-=(const HybridGridState& other);
    HybridGridState& operator*=(Complex factor);
    void axpy(Complex factor, const HybridGridState& other);

private:
    int dim_;
    PhaseSpaceGrid grid_;
    std::vector<ClassicalOperator> comps_;
};

HybridGridState operator-(HybridGridState a, const HybridGridState& b);

struct DyadTerm {
    int i = 0;
    int j = 0;
    Complex coeff;
    PhasePoint ket;
    PhasePoint bra;
};

// Finite list of weighted point-dyad terms
// coeff * |psi_i><psi_j| (x) |ket><bra|.
class HybridDyadState {
public:
    HybridDyadState(int dim, const PhaseSpaceGrid& grid);

    int dim() const { return dim_; }
    const PhaseSpaceGrid& grid() const { return grid_; }
    const std::vector<DyadTerm>& terms() const { return terms_; }
    void add_term(DyadTerm term);

    bool is_hermitian(double tol = 1e-12) const;
    double trace() const;

    // Each term contributes coeff/(dq*dp) at classical entry
    // (snap(ket), snap(bra)) of component (i,j).
    HybridGridState to_grid() const;

private:
    int dim_;
    PhaseSpaceGrid grid_;
    std::vector<DyadTerm> terms_;
};

// Four-term componentwise RHS of the hybrid measurement equation:
//   (1/i hbar)(h_i - h_j) W_ij + (1/i hbar)(v_i - v_j) V_cm . W_ij
//   + {H_cm, W_ij} + ((v_i + v_j)/2) {V_cm, W_ij}
// where V_cm . multiplies diagonals pointwise and scales dyads by V_cm at
// the ket node.  Dyads receive nothing from the bracket terms.
HybridGridState hybrid_rhs(const HamiltonianSpec& spec,
                           const HybridGridState& state, Scheme scheme,
                           double hbar = 1.0);

HybridGridState evolve_hybrid_grid(const HamiltonianSpec& spec,
                                   const HybridGridState& state, double t,
                                   int steps, Scheme scheme, double hbar = 1.0);

// Exact structured evolution of classically diagonal dyad terms:
// the point rides the characteristics of H_cm + ((v_i+v_j)/2) V_cm and the
// coefficient accumulates the phase
//   dphi/dt = -[(h_i - h_j) + (v_i - v_j) V_cm(z(t))]/hbar.
// Terms with ket != bra are rejected: the engine cannot evolve classical
// nondiagonality.
HybridDyadState evolve_hybrid_dyads(const HamiltonianSpec& spec,
                                    const HybridDyadState& state, double t,
                                    double hbar = 1.0, double dt = 1e-3);

enum class CandidateKind { seven, eight, nine };
std::string to_string(CandidateKind kind);

// The three candidate correlated states, built at time t from the initial
// product state (amplitudes c over the measurement basis, pointer at z0).
HybridDyadState make_candidate(CandidateKind kind, const HamiltonianSpec& spec,
                               const std::vector<Complex>& c, PhasePoint z0,
                               double t, const PhaseSpaceGrid& grid,
                               double hbar = 1.0, double dt = 1e-3);

// || centered-difference d/dt of the grid projection - hybrid_rhs ||_F
// normalized by the state norm.
double residual_norm(const HamiltonianSpec& spec, CandidateKind kind,
                     const std::vector<Complex>& c, PhasePoint z0, double t,
                     double dt, const PhaseSpaceGrid& grid, Scheme scheme,
                     double hbar = 1.0, double char_dt = 1e-3);

// Sparse matrix view of a hybrid state over (quantum index, occupied
// classical node); diagnostics block-diagonalize by classical node.
class HybridSparse {
public:
    explicit HybridSparse(const HybridDyadState& state);
    HybridSparse(const HybridGridState& state, double drop_tol = 0.0);

    double trace() const;         // with the discrete measure
    double frobenius_norm() const;
    double min_eigenvalue() const;
    // Eigenvalues scaled by dq*dp (so a unit-trace state sums to one).
    std::vector<double> normalized_eigenvalues() const;
    double purity_defect() const;
    double event_probability(const QuantumOperator& projector,
                             const std::vector<std::size_t>& nodes) const;

    int dim() const { return dim_; }
    double measure() const { return measure_; }

private:
    struct Entry {
        int i, j;
        std::size_t x, y; // classical nodes
        Complex value;
    };
    std::vector<std::vector<int>> node_blocks() const;
    std::vector<double> raw_eigenvalues() const;
    void require_hermitian(double tol) const;

    int dim_;
    double measure_;
    bool all_nodes_occupied_ = false;
    std::vector<std::size_t> nodes_; // sorted occupied nodes
    std::vector<Entry> entries_;     // values in raw (1/(dq dp)) units
};

double min_eigenvalue(const HybridDyadState& state);
double min_eigenvalue(const HybridGridState& state);

double event_probability(const HybridDyadState& state,
                         const QuantumOperator& projector,
                         const std::vector<std::size_t>& nodes);
double event_probability(const HybridGridState& state,
                         const QuantumOperator& projector,
                         const std::vector<std::size_t>& nodes);

// Removes every i != j term: the instantaneous decoherence map.
HybridDyadState collapse_map(const HybridDyadState& state);
// Spec-aware variant: terms inside a degenerate block (v_i == v_j and
// h_i == h_j) stay coherent, since their pointer trajectories coincide.
HybridDyadState collapse_map(const HybridDyadState& state,
                             const HamiltonianSpec& spec);

double hybrid_purity_defect(const HybridDyadState& state);
double hybrid_purity_defect(const HybridGridState& state);

// -sum lambda log lambda over normalized eigenvalues.  Throws NumericsError
// when the state is not positive within tolerance.
double von_neumann_entropy(const HybridDyadState& state, double eig_tol = 1e-10);
double von_neumann_entropy(const HybridGridState& state, double eig_tol = 1e-10);

QuantumOperator reduce_qm(const HybridDyadState& state);
QuantumOperator reduce_qm(const HybridGridState& state);
ClassicalOperator reduce_cm(const HybridDyadState& state);
ClassicalOperator reduce_cm(const HybridGridState& state);

} // namespace hybridlab

#endif
