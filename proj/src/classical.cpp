#include "hybridlab/classical.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace hybridlab {

std::string to_string(Scheme s) {
    return s == Scheme::central ? "central" : "spectral";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "central") return Scheme::central;
    if (s == "spectral") return Scheme::spectral;
    throw ConfigError("unknown scheme '" + s + "' (central|spectral)");
}

Scheme default_scheme(const PhaseSpaceGrid& grid) {
    return grid.boundary() == Boundary::periodic ? Scheme::spectral
                                                 : Scheme::central;
}

ClassicalOperator::ClassicalOperator(const PhaseSpaceGrid& grid)
    : grid_(grid), diag_(grid.size(), Complex(0.0, 0.0)) {}

void ClassicalOperator::add_dyad(std::size_t from, std::size_t to, Complex w) {
    if (from >= diag_.size() || to >= diag_.size())
        throw ConfigError("dyad node index out of range");
    if (from == to) {
        diag_[from] += w;
        return;
    }
    dyads_[{from, to}] += w;
}

ClassicalOperator ClassicalOperator::adjoint() const {
    ClassicalOperator out(grid_);
    for (std::size_t n = 0; n < diag_.size(); ++n)
        out.diag_[n] = std::conj(diag_[n]);
    for (const auto& [key, w] : dyads_)
        out.dyads_[{key.second, key.first}] = std::conj(w);
    return out;
}

bool ClassicalOperator::is_hermitian(double tol) const {
    for (const auto& d : diag_)
        if (std::abs(d.imag()) > tol) return false;
    for (const auto& [key, w] : dyads_) {
        auto it = dyads_.find({key.second, key.first});
        if (it == dyads_.end() || std::abs(std::conj(it->second) - w) > tol)
            return false;
    }
    return true;
}

Complex ClassicalOperator::trace() const {
    Complex sum(0.0, 0.0);
    for (const auto& d : diag_) sum += d;
    return sum * grid_.cell_measure();
}

double ClassicalOperator::frobenius_norm() const {
    double sum = 0.0;
    for (const auto& d : diag_) sum += std::norm(d);
    for (const auto& [key, w] : dyads_) sum += std::norm(w);
    return std::sqrt(sum);
}

bool ClassicalOperator::is_zero(double tol) const {
    for (const auto& d : diag_)
        if (std::abs(d) > tol) return false;
    for (const auto& [key, w] : dyads_)
        if (std::abs(w) > tol) return false;
    return true;
}

ClassicalOperator& ClassicalOperator::operator+=(const ClassicalOperator& o) {
    axpy(Complex(1.0, 0.0), o);
    return *this;
}

ClassicalOperator& ClassicalOperator::operator-=(const ClassicalOperator& o) {
    axpy(Complex(-1.0, 0.0), o);
    return *this;
}

ClassicalOperator& ClassicalOperator::operator*=(Complex factor) {
    for (auto& d : diag_) d *= factor;
    for (auto& [key, w] : dyads_) w *= factor;
    return *this;
}

void ClassicalOperator::axpy(Complex factor, const ClassicalOperator& o) {
    if (!(grid_ == o.grid_)) throw ConfigError("grid mismatch");
    for (std::size_t n = 0; n < diag_.size(); ++n)
        diag_[n] += factor * o.diag_[n];
    for (const auto& [key, w] : o.dyads_) dyads_[key] += factor * w;
}

void ClassicalOperator::prune_dyads(double tol) {
    for (auto it = dyads_.begin(); it != dyads_.end();)
        it = std::abs(it->second) <= tol ? dyads_.erase(it) : std::next(it);
}

ClassicalOperator operator+(ClassicalOperator a, const ClassicalOperator& b) {
    a += b;
    return a;
}
ClassicalOperator operator-(ClassicalOperator a, const ClassicalOperator& b) {
    a -= b;
    return a;
}
ClassicalOperator operator*(Complex factor, ClassicalOperator a) {
    a *= factor;
    return a;
}

ClassicalOperator operator_product(const ClassicalOperator& a,
                                   const ClassicalOperator& b) {
    if (!(a.grid() == b.grid())) throw ConfigError("grid mismatch");
    const double mu = a.grid().cell_measure();
    ClassicalOperator out(a.grid());
    const auto& ad = a.diag();
    const auto& bd = b.diag();
    for (std::size_t n = 0; n < ad.size(); ++n)
        out.set_diag(n, mu * ad[n] * bd[n]);
    for (const auto& [key, w] : b.dyads())
        out.add_dyad(key.first, key.second, mu * ad[key.first] * w);
    for (const auto& [key, w] : a.dyads())
        out.add_dyad(key.first, key.second, mu * w * bd[key.second]);
    for (const auto& [ka, wa] : a.dyads()) {
        // all dyads of b starting at ka.second
        auto lo = b.dyads().lower_bound({ka.second, 0});
        for (auto it = lo; it != b.dyads().end() && it->first.first == ka.second;
             ++it)
            out.add_dyad(ka.first, it->first.second, mu * wa * it->second);
    }
    out.prune_dyads(0.0);
    return out;
}

ClassicalOperator to_classical_operator(const PolynomialObservable& f,
                                        const PhaseSpaceGrid& grid) {
    ClassicalOperator out(grid);
    for (std::size_t n = 0; n < grid.size(); ++n)
        out.set_diag(n, f.eval(grid.node_point(n)));
    return out;
}

ClassicalOperator delta_state(const PhaseSpaceGrid& grid, PhasePoint at) {
    if (!grid.contains(at)) {
        std::ostringstream msg;
        msg << "delta_state: point (" << at.q << ", " << at.p
            << ") outside grid bounds";
        throw ConfigError(msg.str());
    }
    ClassicalOperator out(grid);
    out.set_diag(grid.snap(at), 1.0 / grid.cell_measure());
    return out;
}

// ---------------------------------------------------------------------------
// derivatives

namespace {

// Cached 1D in-place c2c FFTW plans.  FFTW_UNALIGNED keeps them valid for
// arbitrary buffers via fftw_execute_dft; plan creation is serialized.
class FftCache {
public:
    static FftCache& instance() {
        static FftCache cache;
        return cache;
    }

    std::pair<fftw_plan, fftw_plan> get(int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<Complex> scratch(n);
        auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan fwd = fftw_plan_dft_1d(n, ptr, ptr, FFTW_FORWARD,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_plan inv = fftw_plan_dft_1d(n, ptr, ptr, FFTW_BACKWARD,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_[n] = {fwd, inv};
        return {fwd, inv};
    }

private:
    std::mutex mutex_;
    std::map<int, std::pair<fftw_plan, fftw_plan>> plans_;
};

// Spectral derivative of one line of length n with node spacing h.
void spectral_line(std::vector<Complex>& line, double h) {
    const int n = static_cast<int>(line.size());
    auto [fwd, inv] = FftCache::instance().get(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(line.data());
    fftw_execute_dft(fwd, ptr, ptr);
    const double length = n * h;
    for (int m = 0; m < n; ++m) {
        int f = m <= n / 2 ? m : m - n;
        if (2 * m == n) f = 0; // drop the Nyquist mode derivative
        const double k = 2.0 * M_PI * f / length;
        line[m] *= Complex(0.0, k) / static_cast<double>(n);
    }
    fftw_execute_dft(inv, ptr, ptr);
}

// Central second-order derivative of one line; one-sided at clamped edges.
void central_line(const std::vector<Complex>& in, std::vector<Complex>& out,
                  double h, Boundary boundary) {
    const int n = static_cast<int>(in.size());
    out.resize(n);
    if (n == 1) {
        out[0] = 0.0;
        return;
    }
    const double inv2h = 1.0 / (2.0 * h);
    for (int m = 1; m + 1 < n; ++m) out[m] = (in[m + 1] - in[m - 1]) * inv2h;
    if (boundary == Boundary::periodic) {
        out[0] = (in[1] - in[n - 1]) * inv2h;
        out[n - 1] = (in[0] - in[n - 2]) * inv2h;
    } else if (n >= 3) {
        out[0] = (-3.0 * in[0] + 4.0 * in[1] - in[2]) * inv2h;
        out[n - 1] = (3.0 * in[n - 1] - 4.0 * in[n - 2] + in[n - 3]) * inv2h;
    } else {
        out[0] = out[1] = (in[1] - in[0]) / h;
    }
}

enum class Axis { q, p };

std::vector<Complex> derivative(const PhaseSpaceGrid& grid,
                                const std::vector<Complex>& field, Scheme scheme,
                                Axis axis) {
    if (field.size() != grid.size())
        throw ConfigError("field size does not match grid");
    if (scheme == Scheme::spectral && grid.boundary() != Boundary::periodic)
        throw ConfigError("spectral derivatives require a periodic grid");
    const int n_line = axis == Axis::q ? grid.n_q() : grid.n_p();
    const int n_other = axis == Axis::q ? grid.n_p() : grid.n_q();
    const double h = axis == Axis::q ? grid.dq() : grid.dp();
    std::vector<Complex> out(field.size());
    std::vector<Complex> line(n_line), dline;
    for (int o = 0; o < n_other; ++o) {
        for (int m = 0; m < n_line; ++m) {
            std::size_t idx =
                axis == Axis::q ? grid.index(m, o) : grid.index(o, m);
            line[m] = field[idx];
        }
        if (scheme == Scheme::spectral) {
            spectral_line(line, h);
            dline = line;
        } else {
            central_line(line, dline, h, grid.boundary());
        }
        for (int m = 0; m < n_line; ++m) {
            std::size_t idx =
                axis == Axis::q ? grid.index(m, o) : grid.index(o, m);
            out[idx] = dline[m];
        }
    }
    return out;
}

} // namespace

std::vector<Complex> derivative_q(const PhaseSpaceGrid& grid,
                                  const std::vector<Complex>& field,
                                  Scheme scheme) {
    return derivative(grid, field, scheme, Axis::q);
}

std::vector<Complex> derivative_p(const PhaseSpaceGrid& grid,
                                  const std::vector<Complex>& field,
                                  Scheme scheme) {
    return derivative(grid, field, scheme, Axis::p);
}

// ---------------------------------------------------------------------------
// Poisson bracket and Liouville evolution

ClassicalOperator poisson_bracket(const PolynomialObservable& H,
                                  const ClassicalOperator& A, Scheme scheme) {
    const auto& grid = A.grid();
    ClassicalOperator out(grid);
    if (H.is_zero()) return out;
    const PolynomialObservable Hq = H.d_dq();
    const PolynomialObservable Hp = H.d_dp();
    if (Hq.is_zero() && Hp.is_zero()) return out;
    const auto dAdp = derivative_p(grid, A.diag(), scheme);
    const auto dAdq = derivative_q(grid, A.diag(), scheme);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const PhasePoint z = grid.node_point(n);
        out.set_diag(n, Hq.eval(z) * dAdp[n] - Hp.eval(z) * dAdq[n]);
    }
    return out;
}

ClassicalOperator poisson_bracket(const ClassicalOperator& H,
                                  const ClassicalOperator& A, Scheme scheme) {
    if (!H.dyads().empty())
        throw ConfigError(
            "poisson_bracket: generator must be a function of q and p only "
            "(empty dyad list)");
    const auto& grid = A.grid();
    if (!(grid == H.grid())) throw ConfigError("grid mismatch");
    ClassicalOperator out(grid);
    const auto dHdq = derivative_q(grid, H.diag(), scheme);
    const auto dHdp = derivative_p(grid, H.diag(), scheme);
    const auto dAdp = derivative_p(grid, A.diag(), scheme);
    const auto dAdq = derivative_q(grid, A.diag(), scheme);
    for (std::size_t n = 0; n < grid.size(); ++n)
        out.set_diag(n, dHdq[n] * dAdp[n] - dHdp[n] * dAdq[n]);
    return out;
}

namespace {

// Largest cell-crossing rate of the transport field over the grid.
double crossing_rate(const PolynomialObservable& H, const PhaseSpaceGrid& grid) {
    const PolynomialObservable Hq = H.d_dq();
    const PolynomialObservable Hp = H.d_dp();
    double max_vq = 0.0, max_vp = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const PhasePoint z = grid.node_point(n);
        max_vq = std::max(max_vq, std::abs(Hp.eval(z)));
        max_vp = std::max(max_vp, std::abs(Hq.eval(z)));
    }
    return max_vq / grid.dq() + max_vp / grid.dp();
}

constexpr double kCflLimit = 0.9;

} // namespace

void check_advection_stability(const PolynomialObservable& H,
                               const PhaseSpaceGrid& grid, double dt) {
    const double rate = crossing_rate(H, grid);
    if (dt * rate > kCflLimit) {
        const double suggested = 0.5 * kCflLimit / rate;
        std::ostringstream msg;
        msg << "time step dt=" << dt
            << " violates the advection stability bound; suggested dt="
            << suggested;
        throw StabilityError(msg.str(), suggested);
    }
}

ClassicalOperator liouville_evolve(const PolynomialObservable& H,
                                   const ClassicalOperator& rho, double t,
                                   int steps, Scheme scheme) {
    if (steps < 1) throw ConfigError("liouville_evolve: steps must be >= 1");
    const auto& grid = rho.grid();
    const double dt = t / steps;
    check_advection_stability(H, grid, std::abs(dt));

    // Precompute the transport field.
    const PolynomialObservable Hq = H.d_dq();
    const PolynomialObservable Hp = H.d_dp();
    std::vector<double> vq(grid.size()), vp(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const PhasePoint z = grid.node_point(n);
        vq[n] = Hq.eval(z);
        vp[n] = Hp.eval(z);
    }
    const bool hermitian_input = rho.is_hermitian();

    auto rhs = [&](const std::vector<Complex>& f) {
        auto dfdp = derivative_p(grid, f, scheme);
        auto dfdq = derivative_q(grid, f, scheme);
        std::vector<Complex> out(f.size());
        for (std::size_t n = 0; n < f.size(); ++n)
            out[n] = vq[n] * dfdp[n] - vp[n] * dfdq[n];
        return out;
    };

    // Nondiagonal dyads are inert under the bracket: only the diagonal
    // kernel is stepped.
    std::vector<Complex> f = rho.diag();
    std::vector<Complex> k1, k2, k3, k4, tmp(f.size());
    for (int s = 0; s < steps; ++s) {
        k1 = rhs(f);
        for (std::size_t n = 0; n < f.size(); ++n)
            tmp[n] = f[n] + 0.5 * dt * k1[n];
        k2 = rhs(tmp);
        for (std::size_t n = 0; n < f.size(); ++n)
            tmp[n] = f[n] + 0.5 * dt * k2[n];
        k3 = rhs(tmp);
        for (std::size_t n = 0; n < f.size(); ++n) tmp[n] = f[n] + dt * k3[n];
        k4 = rhs(tmp);
        for (std::size_t n = 0; n < f.size(); ++n)
            f[n] += dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        if (hermitian_input)
            for (auto& x : f) x = Complex(x.real(), 0.0);
    }

    ClassicalOperator out(grid);
    for (std::size_t n = 0; n < f.size(); ++n) out.set_diag(n, f[n]);
    for (const auto& [key, w] : rho.dyads())
        out.add_dyad(key.first, key.second, w);
    return out;
}

ClassicalOperator liouville_evolve(const PolynomialObservable& H,
                                   const ClassicalOperator& rho, double t,
                                   int steps) {
    return liouville_evolve(H, rho, t, steps, default_scheme(rho.grid()));
}

// ---------------------------------------------------------------------------
// characteristics

CharacteristicsResult characteristics_evolve(const PolynomialObservable& H,
                                             PhasePoint z0, double t, double dt,
                                             const PhaseSpaceGrid* bounds) {
    CharacteristicsResult result{z0, false};
    if (t == 0.0) return result;
    if (dt <= 0.0) throw ConfigError("characteristics_evolve: dt must be > 0");
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt)));
    const double h = t / n;
    const PolynomialObservable Hq = H.d_dq();
    const PolynomialObservable Hp = H.d_dp();
    PhasePoint z = z0;
    const bool separable = H.is_separable();
    for (int s = 0; s < n; ++s) {
        if (separable) {
            // kick-drift-kick leapfrog
            z.p -= 0.5 * h * Hq.eval(z.q, z.p);
            z.q += h * Hp.eval(z.q, z.p);
            z.p -= 0.5 * h * Hq.eval(z.q, z.p);
        } else {
            // implicit midpoint, fixed-point iteration
            PhasePoint mid = z;
            for (int it = 0; it < 50; ++it) {
                PhasePoint next{z.q + 0.5 * h * Hp.eval(mid.q, mid.p),
                                z.p - 0.5 * h * Hq.eval(mid.q, mid.p)};
                const double delta =
                    std::abs(next.q - mid.q) + std::abs(next.p - mid.p);
                mid = next;
                if (delta < 1e-15) break;
            }
            z.q = 2.0 * mid.q - z.q;
            z.p = 2.0 * mid.p - z.p;
        }
        if (bounds && bounds->boundary() == Boundary::clamped &&
            !bounds->contains(z))
            result.left_bounds = true;
    }
    result.point = z;
    return result;
}

double classical_expectation(const PolynomialObservable& f,
                             const ClassicalOperator& rho) {
    const auto& grid = rho.grid();
    double trace = 0.0, acc = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double d = rho.diag()[n].real();
        trace += d;
        acc += f.eval(grid.node_point(n)) * d;
    }
    if (std::abs(trace) < 1e-300)
        throw NumericsError("classical_expectation: state has zero trace");
    return acc / trace;
}

double purity_defect(const ClassicalOperator& rho) {
    const double norm = rho.frobenius_norm();
    if (norm == 0.0)
        throw NumericsError("purity_defect: undefined for the zero operator");
    ClassicalOperator defect = operator_product(rho, rho);
    defect -= rho;
    return defect.frobenius_norm() / norm;
}

} // namespace hybridlab
