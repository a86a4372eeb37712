#ifndef HYBRIDLAB_QUANTUM_HPP
#define HYBRIDLAB_QUANTUM_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hybridlab/errors.hpp"

namespace hybridlab {

// Finite-dimensional operator on the N-level quantum sector.
class QuantumOperator {
public:
    explicit QuantumOperator(Eigen::MatrixXcd m);

    static QuantumOperator zero(int dim);
    static QuantumOperator identity(int dim);
    static QuantumOperator diagonal(const std::vector<double>& values);
    // |v><v| (v need not be normalized; it is normalized here).
    static QuantumOperator projector(const Eigen::VectorXcd& v);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    bool is_hermitian(double tol = 1e-12) const;
    bool is_density_matrix(double trace_tol = 1e-12,
                           double eig_tol = 1e-10) const;

    std::complex<double> trace() const { return m_.trace(); }
    double frobenius_norm() const { return m_.norm(); }
    double min_eigenvalue() const; // requires Hermitian
    QuantumOperator adjoint() const { return QuantumOperator(m_.adjoint()); }

private:
    Eigen::MatrixXcd m_;
};

QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b);
QuantumOperator sym_product(const QuantumOperator& a, const QuantumOperator& b);

// d rho/dt = (1/i hbar)[H, rho].  steps == 0 selects the exact
// matrix-exponential conjugation (H is time independent); steps > 0 runs the
// RK4 stepper kept as a cross-check.
QuantumOperator von_neumann_evolve(const QuantumOperator& H,
                                   const QuantumOperator& rho, double t,
                                   int steps = 0, double hbar = 1.0);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Frobenius norm of the difference between the full bipartite commutator
// (1/i hbar)[H1 (x) H2, rho1 (x) rho2] and its commutator/symmetrized-product
// decomposition.  An algebraic identity: the residual is roundoff-sized.
double eq4_decomposition_residual(const QuantumOperator& H1,
                                  const QuantumOperator& H2,
                                  const QuantumOperator& rho1,
                                  const QuantumOperator& rho2,
                                  double hbar = 1.0);

} // namespace hybridlab

#endif
