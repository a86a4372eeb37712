#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hybridlab/quantum.hpp"

using namespace hybridlab;

namespace {

Eigen::MatrixXcd random_hermitian(int dim, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            m(i, j) = std::complex<double>(dist(rng), dist(rng));
    return 0.5 * (m + m.adjoint().eval());
}

QuantumOperator random_density(int dim, std::mt19937& rng) {
    Eigen::MatrixXcd m = random_hermitian(dim, rng);
    m = (m * m.adjoint()).eval();
    m /= m.trace();
    return QuantumOperator(m);
}

} // namespace

TEST_CASE("projector builds a pure density matrix") {
    Eigen::VectorXcd v(2);
    v << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0);
    const QuantumOperator rho = QuantumOperator::projector(v);
    CHECK(rho.trace().real() == doctest::Approx(1.0));
    CHECK(rho.is_density_matrix());
    CHECK((rho.matrix() * rho.matrix() - rho.matrix()).norm() < 1e-12);
}

TEST_CASE("min eigenvalue of diagonal operators") {
    const QuantumOperator d = QuantumOperator::diagonal({0.25, -0.5, 1.0});
    CHECK(d.min_eigenvalue() == doctest::Approx(-0.5));
    CHECK(!d.is_density_matrix());
}

TEST_CASE("commutator and symmetric product shapes and algebra") {
    std::mt19937 rng(7);
    const QuantumOperator a(random_hermitian(3, rng));
    const QuantumOperator b(random_hermitian(3, rng));
    const QuantumOperator c = commutator(a, b);
    // [A,B] is anti-Hermitian for Hermitian A, B
    CHECK((c.matrix() + c.matrix().adjoint()).norm() < 1e-12);
    const QuantumOperator s = sym_product(a, b);
    CHECK(s.is_hermitian(1e-12));
    CHECK_THROWS_AS(commutator(a, QuantumOperator::identity(2)), ConfigError);
}

TEST_CASE("von neumann evolution: phases in the hamiltonian eigenbasis") {
    // H diagonal: rho_ij picks up exp(-i (h_i - h_j) t)
    const QuantumOperator H = QuantumOperator::diagonal({1.0, 3.0});
    Eigen::MatrixXcd m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    const double t = 0.7;
    const QuantumOperator out = von_neumann_evolve(H, QuantumOperator(m), t);
    const std::complex<double> phase =
        std::exp(std::complex<double>(0, -(1.0 - 3.0) * t));
    CHECK(std::abs(out.matrix()(0, 1) - 0.5 * phase) < 1e-12);
    CHECK(std::abs(out.matrix()(0, 0) - 0.5) < 1e-12);
}

TEST_CASE("exact propagator and RK4 stepper agree") {
    std::mt19937 rng(11);
    const QuantumOperator H(random_hermitian(3, rng));
    const QuantumOperator rho = random_density(3, rng);
    const QuantumOperator exact = von_neumann_evolve(H, rho, 1.0);
    const QuantumOperator stepped = von_neumann_evolve(H, rho, 1.0, 2000);
    CHECK((exact.matrix() - stepped.matrix()).norm() < 1e-9);
}

TEST_CASE("evolution preserves trace, hermiticity and purity") {
    std::mt19937 rng(13);
    const QuantumOperator H(random_hermitian(2, rng));
    Eigen::VectorXcd v(2);
    v << 0.6, std::complex<double>(0.0, 0.8);
    const QuantumOperator rho = QuantumOperator::projector(v);
    const QuantumOperator out = von_neumann_evolve(H, rho, 2.5);
    CHECK(out.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.is_hermitian(1e-12));
    CHECK((out.matrix() * out.matrix() - out.matrix()).norm() < 1e-10);
}

TEST_CASE("hbar scales the rotation speed") {
    const QuantumOperator H = QuantumOperator::diagonal({0.0, 1.0});
    Eigen::MatrixXcd m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    const QuantumOperator slow =
        von_neumann_evolve(H, QuantumOperator(m), 1.0, 0, 2.0);
    const QuantumOperator fast =
        von_neumann_evolve(H, QuantumOperator(m), 0.5, 0, 1.0);
    CHECK((slow.matrix() - fast.matrix()).norm() < 1e-12);
}

TEST_CASE("kron dimensions and identity factor") {
    Eigen::MatrixXcd a(2, 2), id = Eigen::MatrixXcd::Identity(3, 3);
    a << 1, 2, 3, 4;
    const Eigen::MatrixXcd k = kron(a, id);
    CHECK(k.rows() == 6);
    CHECK(std::abs(k(0, 0) - std::complex<double>(1)) < 1e-15);
    CHECK(std::abs(k(3, 5) - std::complex<double>(0)) < 1e-15);
    CHECK(std::abs(k(5, 2) - std::complex<double>(3)) < 1e-15);
}

TEST_CASE("bipartite commutator decomposition is an identity") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = (trial % 2 == 0) ? 2 : 3;
        const QuantumOperator h1(random_hermitian(dim, rng));
        const QuantumOperator h2(random_hermitian(dim, rng));
        const QuantumOperator r1 = random_density(dim, rng);
        const QuantumOperator r2 = random_density(dim, rng);
        CHECK(eq4_decomposition_residual(h1, h2, r1, r2) <= 1e-12);
    }
}

TEST_CASE("decomposition degenerates cleanly for an identity factor") {
    std::mt19937 rng(5);
    const QuantumOperator h2(random_hermitian(2, rng));
    const QuantumOperator r1 = random_density(2, rng);
    const QuantumOperator r2 = random_density(2, rng);
    CHECK(eq4_decomposition_residual(QuantumOperator::identity(2), h2, r1, r2) <=
          1e-12);
}
