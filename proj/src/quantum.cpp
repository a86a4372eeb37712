#include "hybridlab/quantum.hpp"

#include <cmath>

namespace hybridlab {

QuantumOperator::QuantumOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
        throw ConfigError("QuantumOperator: matrix must be square");
}

QuantumOperator QuantumOperator::zero(int dim) {
    return QuantumOperator(Eigen::MatrixXcd::Zero(dim, dim));
}

QuantumOperator QuantumOperator::identity(int dim) {
    return QuantumOperator(Eigen::MatrixXcd::Identity(dim, dim));
}

QuantumOperator QuantumOperator::diagonal(const std::vector<double>& values) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return QuantumOperator(std::move(m));
}

QuantumOperator QuantumOperator::projector(const Eigen::VectorXcd& v) {
    const double n2 = v.squaredNorm();
    if (n2 <= 0.0) throw ConfigError("projector: zero vector");
    return QuantumOperator((v * v.adjoint()) / n2);
}

bool QuantumOperator::is_hermitian(double tol) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool QuantumOperator::is_density_matrix(double trace_tol, double eig_tol) const {
    if (!is_hermitian(trace_tol)) return false;
    if (std::abs(m_.trace() - std::complex<double>(1.0, 0.0)) > trace_tol)
        return false;
    return min_eigenvalue() >= -eig_tol;
}

double QuantumOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_,
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b) {
    if (a.dim() != b.dim()) throw ConfigError("commutator: dimension mismatch");
    return QuantumOperator(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

QuantumOperator sym_product(const QuantumOperator& a, const QuantumOperator& b) {
    if (a.dim() != b.dim()) throw ConfigError("sym_product: dimension mismatch");
    return QuantumOperator(
        0.5 * (a.matrix() * b.matrix() + b.matrix() * a.matrix()));
}

QuantumOperator von_neumann_evolve(const QuantumOperator& H,
                                   const QuantumOperator& rho, double t,
                                   int steps, double hbar) {
    if (H.dim() != rho.dim())
        throw ConfigError("von_neumann_evolve: dimension mismatch");
    if (!H.is_hermitian(1e-10))
        throw ConfigError("von_neumann_evolve: Hamiltonian must be Hermitian");
    if (t == 0.0) return rho;

    if (steps <= 0) {
        // Exact conjugation by exp(-i H t / hbar), diagonalizing H once.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H.matrix());
        const Eigen::MatrixXcd& U = solver.eigenvectors();
        Eigen::VectorXcd phases(H.dim());
        for (int k = 0; k < H.dim(); ++k)
            phases(k) = std::exp(
                std::complex<double>(0.0, -solver.eigenvalues()(k) * t / hbar));
        const Eigen::MatrixXcd prop = U * phases.asDiagonal() * U.adjoint();
        return QuantumOperator(prop * rho.matrix() * prop.adjoint());
    }

    // RK4 stepper retained as a cross-check for the exact route.
    const double dt = t / steps;
    const std::complex<double> factor(0.0, -1.0 / hbar);
    auto rhs = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
        return factor * (H.matrix() * r - r * H.matrix());
    };
    Eigen::MatrixXcd r = rho.matrix();
    for (int s = 0; s < steps; ++s) {
        const Eigen::MatrixXcd k1 = rhs(r);
        const Eigen::MatrixXcd k2 = rhs(r + 0.5 * dt * k1);
        const Eigen::MatrixXcd k3 = rhs(r + 0.5 * dt * k2);
        const Eigen::MatrixXcd k4 = rhs(r + dt * k3);
        r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return QuantumOperator(std::move(r));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

double eq4_decomposition_residual(const QuantumOperator& H1,
                                  const QuantumOperator& H2,
                                  const QuantumOperator& rho1,
                                  const QuantumOperator& rho2, double hbar) {
    if (H1.dim() != rho1.dim() || H2.dim() != rho2.dim())
        throw ConfigError("eq4_decomposition_residual: dimension mismatch");
    const std::complex<double> factor(0.0, -1.0 / hbar);

    const Eigen::MatrixXcd big_h = kron(H1.matrix(), H2.matrix());
    const Eigen::MatrixXcd big_rho = kron(rho1.matrix(), rho2.matrix());
    const Eigen::MatrixXcd lhs = factor * (big_h * big_rho - big_rho * big_h);

    const Eigen::MatrixXcd rhs =
        kron(factor * commutator(H1, rho1).matrix(),
             sym_product(H2, rho2).matrix()) +
        kron(sym_product(H1, rho1).matrix(),
             factor * commutator(H2, rho2).matrix());

    return (lhs - rhs).norm();
}

} // namespace hybridlab
