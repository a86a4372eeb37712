#include "hybridlab/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace hybridlab {

HamiltonianSpec::HamiltonianSpec(std::vector<double> h_eigs,
                                 std::vector<double> v_eigs,
                                 PolynomialObservable H_classical,
                                 PolynomialObservable V_classical)
    : dim(static_cast<int>(h_eigs.size())), h(std::move(h_eigs)),
      v(std::move(v_eigs)), H_cm(std::move(H_classical)),
      V_cm(std::move(V_classical)) {
    if (dim < 1) throw ConfigError("HamiltonianSpec: empty eigenvalue list");
    if (v.size() != h.size())
        throw ConfigError("HamiltonianSpec: h and v must have equal length");
}

bool HamiltonianSpec::all_zero() const {
    auto zero = [](double x) { return x == 0.0; };
    return std::all_of(h.begin(), h.end(), zero) &&
           std::all_of(v.begin(), v.end(), zero) && H_cm.is_zero() &&
           V_cm.is_zero();
}

PolynomialObservable HamiltonianSpec::effective_classical(double weight) const {
    PolynomialObservable out = H_cm;
    out += V_cm.scaled(weight);
    return out;
}

// ---------------------------------------------------------------------------
// HybridGridState

HybridGridState::HybridGridState(int dim, const PhaseSpaceGrid& grid)
    : dim_(dim), grid_(grid) {
    if (dim < 1) throw ConfigError("HybridGridState: dim must be >= 1");
    comps_.assign(static_cast<std::size_t>(dim) * dim, ClassicalOperator(grid));
}

ClassicalOperator& HybridGridState::component(int i, int j) {
    return comps_[static_cast<std::size_t>(i) * dim_ + j];
}

const ClassicalOperator& HybridGridState::component(int i, int j) const {
    return comps_[static_cast<std::size_t>(i) * dim_ + j];
}

double HybridGridState::trace() const {
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i) sum += component(i, i).trace().real();
    return sum;
}

double HybridGridState::frobenius_norm() const {
    double sum = 0.0;
    for (const auto& c : comps_) {
        const double f = c.frobenius_norm();
        sum += f * f;
    }
    return std::sqrt(sum);
}

bool HybridGridState::is_hermitian(double tol) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            ClassicalOperator d = component(j, i).adjoint();
            d -= component(i, j);
            if (d.frobenius_norm() > tol) return false;
        }
    return true;
}

void HybridGridState::enforce_hermiticity() {
    for (int i = 0; i < dim_; ++i) {
        ClassicalOperator sym = component(i, i);
        sym += component(i, i).adjoint();
        sym *= Complex(0.5, 0.0);
        component(i, i) = sym;
        for (int j = i + 1; j < dim_; ++j)
            component(j, i) = component(i, j).adjoint();
    }
}

HybridGridState& HybridGridState::operator+=(const HybridGridState& o) {
    axpy(Complex(1.0, 0.0), o);
    return *this;
}
HybridGridState& HybridGridState::operator-=(const HybridGridState& o) {
    axpy(Complex(-1.0, 0.0), o);
    return *this;
}
HybridGridState& HybridGridState::operator*=(Complex factor) {
    for (auto& c : comps_) c *= factor;
    return *this;
}
void HybridGridState::axpy(Complex factor, const HybridGridState& o) {
    if (dim_ != o.dim_ || !(grid_ == o.grid_))
        throw ConfigError("hybrid state mismatch");
    for (std::size_t k = 0; k < comps_.size(); ++k)
        comps_[k].axpy(factor, o.comps_[k]);
}

HybridGridState operator-(HybridGridState a, const HybridGridState& b) {
    a -= b;
    return a;
}

// ---------------------------------------------------------------------------
// HybridDyadState

HybridDyadState::HybridDyadState(int dim, const PhaseSpaceGrid& grid)
    : dim_(dim), grid_(grid) {
    if (dim < 1) throw ConfigError("HybridDyadState: dim must be >= 1");
}

void HybridDyadState::add_term(DyadTerm term) {
    if (term.i < 0 || term.i >= dim_ || term.j < 0 || term.j >= dim_)
        throw ConfigError("HybridDyadState: quantum index out of range");
    terms_.push_back(term);
}

bool HybridDyadState::is_hermitian(double tol) const {
    auto key = [this](const DyadTerm& t, bool swapped) {
        const std::size_t a = grid_.snap(swapped ? t.bra : t.ket);
        const std::size_t b = grid_.snap(swapped ? t.ket : t.bra);
        const int i = swapped ? t.j : t.i;
        const int j = swapped ? t.i : t.j;
        return std::tuple<int, int, std::size_t, std::size_t>(i, j, a, b);
    };
    std::map<std::tuple<int, int, std::size_t, std::size_t>, Complex> acc;
    for (const auto& t : terms_) {
        acc[key(t, false)] += t.coeff;
        acc[key(t, true)] -= std::conj(t.coeff);
    }
    for (const auto& [k, v] : acc)
        if (std::abs(v) > tol) return false;
    return true;
}

double HybridDyadState::trace() const {
    double sum = 0.0;
    for (const auto& t : terms_)
        if (t.i == t.j && grid_.snap(t.ket) == grid_.snap(t.bra))
            sum += t.coeff.real();
    return sum;
}

HybridGridState HybridDyadState::to_grid() const {
    HybridGridState out(dim_, grid_);
    const double scale = 1.0 / grid_.cell_measure();
    for (const auto& t : terms_) {
        const std::size_t a = grid_.snap(t.ket);
        const std::size_t b = grid_.snap(t.bra);
        ClassicalOperator& comp = out.component(t.i, t.j);
        if (a == b)
            comp.set_diag(a, comp.diag()[a] + t.coeff * scale);
        else
            comp.add_dyad(a, b, t.coeff * scale);
    }
    return out;
}

// ---------------------------------------------------------------------------
// dynamics

HybridGridState hybrid_rhs(const HamiltonianSpec& spec,
                           const HybridGridState& state, Scheme scheme,
                           double hbar) {
    if (spec.dim != state.dim())
        throw ConfigError("hybrid_rhs: dimension mismatch");
    const auto& grid = state.grid();
    const int dim = state.dim();

    // Node samples of V_cm and of the transport gradients.
    std::vector<double> v_field(grid.size());
    std::vector<double> hq(grid.size()), hp(grid.size());
    std::vector<double> vq(grid.size()), vp(grid.size());
    {
        const auto Hq = spec.H_cm.d_dq(), Hp = spec.H_cm.d_dp();
        const auto Vq = spec.V_cm.d_dq(), Vp = spec.V_cm.d_dp();
        for (std::size_t n = 0; n < grid.size(); ++n) {
            const PhasePoint z = grid.node_point(n);
            v_field[n] = spec.V_cm.eval(z);
            hq[n] = Hq.eval(z);
            hp[n] = Hp.eval(z);
            vq[n] = Vq.eval(z);
            vp[n] = Vp.eval(z);
        }
    }

    HybridGridState out(dim, grid);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const ClassicalOperator& w = state.component(i, j);
            ClassicalOperator& target = out.component(i, j);
            const double dh = spec.h[i] - spec.h[j];
            const double dv = spec.v[i] - spec.v[j];
            const double mid = 0.5 * (spec.v[i] + spec.v[j]);
            const Complex phase_h(0.0, -dh / hbar);
            const Complex phase_v(0.0, -dv / hbar);

            const bool need_bracket =
                !(spec.H_cm.is_zero() && (mid == 0.0 || spec.V_cm.is_zero()));
            std::vector<Complex> dwdp, dwdq;
            if (need_bracket) {
                dwdp = derivative_p(grid, w.diag(), scheme);
                dwdq = derivative_q(grid, w.diag(), scheme);
            }
            for (std::size_t n = 0; n < grid.size(); ++n) {
                Complex val = (phase_h + phase_v * v_field[n]) * w.diag()[n];
                if (need_bracket)
                    val += (hq[n] + mid * vq[n]) * dwdp[n] -
                           (hp[n] + mid * vp[n]) * dwdq[n];
                target.set_diag(n, val);
            }
            // Nondiagonal classical dyads are annihilated by both bracket
            // terms; only the phase factors act, with V_cm at the ket node.
            for (const auto& [key, wgt] : w.dyads())
                target.add_dyad(key.first, key.second,
                                (phase_h + phase_v * v_field[key.first]) * wgt);
        }
    return out;
}

namespace {

void check_hybrid_stability(const HamiltonianSpec& spec,
                            const PhaseSpaceGrid& grid, double dt, double hbar) {
    for (int i = 0; i < spec.dim; ++i)
        for (int j = i; j < spec.dim; ++j) {
            const double mid = 0.5 * (spec.v[i] + spec.v[j]);
            check_advection_stability(spec.effective_classical(mid), grid, dt);
        }
    // Phase rotation rate must stay within the explicit stability region too.
    double vmax = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n)
        vmax = std::max(vmax, std::abs(spec.V_cm.eval(grid.node_point(n))));
    double rate = 0.0;
    for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j)
            rate = std::max(rate, (std::abs(spec.h[i] - spec.h[j]) +
                                   std::abs(spec.v[i] - spec.v[j]) * vmax) /
                                      hbar);
    if (dt * rate > 2.5) {
        const double suggested = 1.0 / rate;
        std::ostringstream msg;
        msg << "time step dt=" << dt
            << " exceeds the phase-rotation stability bound; suggested dt="
            << suggested;
        throw StabilityError(msg.str(), suggested);
    }
}

} // namespace

HybridGridState evolve_hybrid_grid(const HamiltonianSpec& spec,
                                   const HybridGridState& state, double t,
                                   int steps, Scheme scheme, double hbar) {
    if (steps < 1) throw ConfigError("evolve_hybrid_grid: steps must be >= 1");
    if (t == 0.0) return state;
    const double dt = t / steps;
    check_hybrid_stability(spec, state.grid(), std::abs(dt), hbar);

    HybridGridState s = state;
    for (int step = 0; step < steps; ++step) {
        HybridGridState k1 = hybrid_rhs(spec, s, scheme, hbar);
        HybridGridState s2 = s;
        s2.axpy(0.5 * dt, k1);
        HybridGridState k2 = hybrid_rhs(spec, s2, scheme, hbar);
        HybridGridState s3 = s;
        s3.axpy(0.5 * dt, k2);
        HybridGridState k3 = hybrid_rhs(spec, s3, scheme, hbar);
        HybridGridState s4 = s;
        s4.axpy(dt, k3);
        HybridGridState k4 = hybrid_rhs(spec, s4, scheme, hbar);
        s.axpy(dt / 6.0, k1);
        s.axpy(dt / 3.0, k2);
        s.axpy(dt / 3.0, k3);
        s.axpy(dt / 6.0, k4);
        s.enforce_hermiticity();
    }
    return s;
}

namespace {

struct DyadFlow {
    PhasePoint point;
    double phase; // accumulated phase angle
};

// Transport + phase for one (i,j) pair: the point follows the
// midpoint-eigenvalue characteristics, the phase integrates
// -[(h_i-h_j) + (v_i-v_j) V_cm(z)]/hbar along them with the same stepper.
DyadFlow flow_term(const HamiltonianSpec& spec, int i, int j, PhasePoint z0,
                   double t, double hbar, double dt) {
    DyadFlow out{z0, 0.0};
    if (t == 0.0) return out;
    const double mid = 0.5 * (spec.v[i] + spec.v[j]);
    const PolynomialObservable H_eff = spec.effective_classical(mid);
    const PolynomialObservable Hq = H_eff.d_dq();
    const PolynomialObservable Hp = H_eff.d_dp();
    const double dh = spec.h[i] - spec.h[j];
    const double dv = spec.v[i] - spec.v[j];
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt)));
    const double step = t / n;
    const bool separable = H_eff.is_separable();
    PhasePoint z = z0;
    for (int s = 0; s < n; ++s) {
        const PhasePoint prev = z;
        if (separable) {
            z.p -= 0.5 * step * Hq.eval(z.q, z.p);
            z.q += step * Hp.eval(z.q, z.p);
            z.p -= 0.5 * step * Hq.eval(z.q, z.p);
        } else {
            PhasePoint mid_z = z;
            for (int it = 0; it < 50; ++it) {
                PhasePoint next{z.q + 0.5 * step * Hp.eval(mid_z.q, mid_z.p),
                                z.p - 0.5 * step * Hq.eval(mid_z.q, mid_z.p)};
                const double delta =
                    std::abs(next.q - mid_z.q) + std::abs(next.p - mid_z.p);
                mid_z = next;
                if (delta < 1e-15) break;
            }
            z.q = 2.0 * mid_z.q - z.q;
            z.p = 2.0 * mid_z.p - z.p;
        }
        if (dh != 0.0 || dv != 0.0) {
            const PhasePoint half{0.5 * (prev.q + z.q), 0.5 * (prev.p + z.p)};
            out.phase -= step * (dh + dv * spec.V_cm.eval(half)) / hbar;
        }
    }
    out.point = z;
    return out;
}

} // namespace

HybridDyadState evolve_hybrid_dyads(const HamiltonianSpec& spec,
                                    const HybridDyadState& state, double t,
                                    double hbar, double dt) {
    if (spec.dim != state.dim())
        throw ConfigError("evolve_hybrid_dyads: dimension mismatch");
    HybridDyadState out(state.dim(), state.grid());
    for (const auto& term : state.terms()) {
        if (term.ket.q != term.bra.q || term.ket.p != term.bra.p)
            throw NumericsError(
                "evolve_hybrid_dyads: classically nondiagonal term "
                "(ket != bra) is outside the representable solution class");
        const DyadFlow flow =
            flow_term(spec, term.i, term.j, term.ket, t, hbar, dt);
        DyadTerm evolved = term;
        evolved.ket = evolved.bra = flow.point;
        evolved.coeff = term.coeff * std::exp(Complex(0.0, flow.phase));
        out.add_term(evolved);
    }
    return out;
}

std::string to_string(CandidateKind kind) {
    switch (kind) {
        case CandidateKind::seven: return "seven";
        case CandidateKind::eight: return "eight";
        case CandidateKind::nine: return "nine";
    }
    return "?";
}

HybridDyadState make_candidate(CandidateKind kind, const HamiltonianSpec& spec,
                               const std::vector<Complex>& c, PhasePoint z0,
                               double t, const PhaseSpaceGrid& grid, double hbar,
                               double dt) {
    if (static_cast<int>(c.size()) != spec.dim)
        throw ConfigError("make_candidate: amplitude count mismatch");
    double norm2 = 0.0;
    for (const auto& a : c) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > 1e-9)
        throw ConfigError("make_candidate: amplitudes must be normalized");
    if (t < 0.0) throw ConfigError("make_candidate: t must be >= 0");

    const int dim = spec.dim;
    HybridDyadState out(dim, grid);

    if (kind == CandidateKind::seven) {
        // Each ket/bra follows its own single-eigenvalue trajectory.
        std::vector<PhasePoint> zi(dim);
        for (int i = 0; i < dim; ++i)
            zi[i] = flow_term(spec, i, i, z0, t, hbar, dt).point;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const Complex w = c[i] * std::conj(c[j]);
                if (w == Complex(0.0, 0.0)) continue;
                out.add_term({i, j, w, zi[i], zi[j]});
            }
        return out;
    }

    HybridDyadState initial(dim, grid);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const Complex w = c[i] * std::conj(c[j]);
            if (w == Complex(0.0, 0.0)) continue;
            if (kind == CandidateKind::nine && i != j) continue;
            initial.add_term({i, j, w, z0, z0});
        }
    return evolve_hybrid_dyads(spec, initial, t, hbar, dt);
}

double residual_norm(const HamiltonianSpec& spec, CandidateKind kind,
                     const std::vector<Complex>& c, PhasePoint z0, double t,
                     double dt, const PhaseSpaceGrid& grid, Scheme scheme,
                     double hbar, double char_dt) {
    if (dt <= 0.0) throw ConfigError("residual_norm: dt must be > 0");
    if (t <= 0.0) throw ConfigError("residual_norm: t must be > 0");
    if (t - dt < 0.0)
        throw ConfigError("residual_norm: need t >= dt for the centered stencil");
    const HybridGridState s_minus =
        make_candidate(kind, spec, c, z0, t - dt, grid, hbar, char_dt).to_grid();
    const HybridGridState s0 =
        make_candidate(kind, spec, c, z0, t, grid, hbar, char_dt).to_grid();
    const HybridGridState s_plus =
        make_candidate(kind, spec, c, z0, t + dt, grid, hbar, char_dt).to_grid();

    HybridGridState deriv = s_plus;
    deriv -= s_minus;
    deriv *= Complex(1.0 / (2.0 * dt), 0.0);
    deriv -= hybrid_rhs(spec, s0, scheme, hbar);

    const double norm = s0.frobenius_norm();
    if (norm == 0.0) throw NumericsError("residual_norm: zero state");
    return deriv.frobenius_norm() / norm;
}

// ---------------------------------------------------------------------------
// diagnostics via the sparse occupied-node representation

namespace {

std::size_t total_nodes(const PhaseSpaceGrid& grid) { return grid.size(); }

} // namespace

HybridSparse::HybridSparse(const HybridDyadState& state)
    : dim_(state.dim()), measure_(state.grid().cell_measure()) {
    std::map<std::tuple<int, int, std::size_t, std::size_t>, Complex> acc;
    const auto& grid = state.grid();
    for (const auto& t : state.terms())
        acc[{t.i, t.j, grid.snap(t.ket), grid.snap(t.bra)}] +=
            t.coeff / measure_;
    std::map<std::size_t, int> seen;
    for (const auto& [key, val] : acc) {
        seen.emplace(std::get<2>(key), 0);
        seen.emplace(std::get<3>(key), 0);
    }
    nodes_.reserve(seen.size());
    for (const auto& [n, _] : seen) nodes_.push_back(n);
    for (const auto& [key, val] : acc)
        if (val != Complex(0.0, 0.0))
            entries_.push_back(
                {std::get<0>(key), std::get<1>(key), std::get<2>(key),
                 std::get<3>(key), val});
    all_nodes_occupied_ = nodes_.size() >= total_nodes(grid);
}

HybridSparse::HybridSparse(const HybridGridState& state, double drop_tol)
    : dim_(state.dim()), measure_(state.grid().cell_measure()) {
    std::map<std::size_t, int> seen;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            const auto& comp = state.component(i, j);
            for (std::size_t n = 0; n < comp.diag().size(); ++n)
                if (std::abs(comp.diag()[n]) > drop_tol) {
                    entries_.push_back({i, j, n, n, comp.diag()[n]});
                    seen.emplace(n, 0);
                }
            for (const auto& [key, w] : comp.dyads())
                if (std::abs(w) > drop_tol) {
                    entries_.push_back({i, j, key.first, key.second, w});
                    seen.emplace(key.first, 0);
                    seen.emplace(key.second, 0);
                }
        }
    nodes_.reserve(seen.size());
    for (const auto& [n, _] : seen) nodes_.push_back(n);
    all_nodes_occupied_ = nodes_.size() >= total_nodes(state.grid());
}

double HybridSparse::trace() const {
    double sum = 0.0;
    for (const auto& e : entries_)
        if (e.i == e.j && e.x == e.y) sum += e.value.real();
    return sum * measure_;
}

double HybridSparse::frobenius_norm() const {
    double sum = 0.0;
    for (const auto& e : entries_) sum += std::norm(e.value);
    return std::sqrt(sum);
}

void HybridSparse::require_hermitian(double tol) const {
    std::map<std::tuple<int, int, std::size_t, std::size_t>, Complex> acc;
    for (const auto& e : entries_) {
        acc[{e.i, e.j, e.x, e.y}] += e.value;
        acc[{e.j, e.i, e.y, e.x}] -= std::conj(e.value);
    }
    for (const auto& [k, v] : acc)
        if (std::abs(v) > tol)
            throw NumericsError("hybrid diagnostic requires a Hermitian state");
}

std::vector<std::vector<int>> HybridSparse::node_blocks() const {
    std::map<std::size_t, int> local;
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        local[nodes_[k]] = static_cast<int>(k);
    std::vector<int> parent(nodes_.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const auto& e : entries_)
        if (e.x != e.y) {
            int a = find(local.at(e.x)), b = find(local.at(e.y));
            if (a != b) parent[a] = b;
        }
    std::map<int, std::vector<int>> groups;
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        groups[find(static_cast<int>(k))].push_back(static_cast<int>(k));
    std::vector<std::vector<int>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

std::vector<double> HybridSparse::raw_eigenvalues() const {
    require_hermitian(1e-10 / measure_);
    std::map<std::size_t, int> local;
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        local[nodes_[k]] = static_cast<int>(k);
    const auto blocks = node_blocks();
    std::vector<int> block_of(nodes_.size(), -1);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int member : blocks[b]) block_of[member] = static_cast<int>(b);
    // position of each node inside its block
    std::vector<int> pos(nodes_.size(), 0);
    for (const auto& block : blocks)
        for (std::size_t k = 0; k < block.size(); ++k)
            pos[block[k]] = static_cast<int>(k);

    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(blocks.size());
    for (const auto& block : blocks)
        mats.emplace_back(Eigen::MatrixXcd::Zero(dim_ * block.size(),
                                                 dim_ * block.size()));
    for (const auto& e : entries_) {
        const int lx = local.at(e.x), ly = local.at(e.y);
        const int b = block_of[lx];
        auto& m = mats[b];
        m(pos[lx] * dim_ + e.i, pos[ly] * dim_ + e.j) += e.value;
    }
    std::vector<double> eigs;
    for (const auto& m : mats) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
            m, Eigen::EigenvaluesOnly);
        for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
            eigs.push_back(solver.eigenvalues()(k));
    }
    if (!all_nodes_occupied_) eigs.push_back(0.0);
    return eigs;
}

double HybridSparse::min_eigenvalue() const {
    const auto eigs = raw_eigenvalues();
    if (eigs.empty()) return 0.0;
    return *std::min_element(eigs.begin(), eigs.end());
}

std::vector<double> HybridSparse::normalized_eigenvalues() const {
    auto eigs = raw_eigenvalues();
    for (auto& e : eigs) e *= measure_;
    return eigs;
}

double HybridSparse::purity_defect() const {
    if (entries_.empty())
        throw NumericsError("hybrid_purity_defect: zero state");
    // row-indexed sparse product, scaled by the discrete measure
    auto rowkey = [this](int i, std::size_t x) {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dim_) * x;
    };
    std::unordered_map<std::size_t, std::vector<const Entry*>> by_row;
    for (const auto& e : entries_) by_row[rowkey(e.i, e.x)].push_back(&e);

    std::map<std::tuple<int, int, std::size_t, std::size_t>, Complex> prod;
    for (const auto& a : entries_) {
        auto it = by_row.find(rowkey(a.j, a.y));
        if (it == by_row.end()) continue;
        for (const Entry* b : it->second)
            prod[{a.i, b->j, a.x, b->y}] += measure_ * a.value * b->value;
    }
    for (const auto& e : entries_) prod[{e.i, e.j, e.x, e.y}] -= e.value;
    double diff = 0.0;
    for (const auto& [k, v] : prod) diff += std::norm(v);
    return std::sqrt(diff) / frobenius_norm();
}

double HybridSparse::event_probability(const QuantumOperator& projector,
                                       const std::vector<std::size_t>& nodes) const {
    if (projector.dim() != dim_)
        throw ConfigError("event_probability: projector dimension mismatch");
    const auto& q = projector.matrix();
    if (!projector.is_hermitian(1e-10) ||
        (q * q - q).cwiseAbs().maxCoeff() > 1e-10)
        throw ConfigError("event_probability: malformed projector "
                          "(must be Hermitian and idempotent)");
    const double tr = trace();
    if (std::abs(tr) < 1e-300)
        throw NumericsError("event_probability: zero-trace state");
    std::set<std::size_t> in_set(nodes.begin(), nodes.end());
    double acc = 0.0;
    for (const auto& e : entries_)
        if (e.x == e.y && in_set.count(e.x))
            acc += (q(e.j, e.i) * e.value).real();
    return acc * measure_ / tr;
}

double min_eigenvalue(const HybridDyadState& state) {
    return HybridSparse(state).min_eigenvalue();
}
double min_eigenvalue(const HybridGridState& state) {
    return HybridSparse(state).min_eigenvalue();
}

double event_probability(const HybridDyadState& state,
                         const QuantumOperator& projector,
                         const std::vector<std::size_t>& nodes) {
    return HybridSparse(state).event_probability(projector, nodes);
}
double event_probability(const HybridGridState& state,
                         const QuantumOperator& projector,
                         const std::vector<std::size_t>& nodes) {
    return HybridSparse(state).event_probability(projector, nodes);
}

HybridDyadState collapse_map(const HybridDyadState& state) {
    HybridDyadState out(state.dim(), state.grid());
    for (const auto& t : state.terms())
        if (t.i == t.j) out.add_term(t);
    return out;
}

HybridDyadState collapse_map(const HybridDyadState& state,
                             const HamiltonianSpec& spec) {
    HybridDyadState out(state.dim(), state.grid());
    for (const auto& t : state.terms()) {
        const bool degenerate =
            spec.v[t.i] == spec.v[t.j] && spec.h[t.i] == spec.h[t.j];
        if (t.i == t.j || degenerate) out.add_term(t);
    }
    return out;
}

double hybrid_purity_defect(const HybridDyadState& state) {
    return HybridSparse(state).purity_defect();
}
double hybrid_purity_defect(const HybridGridState& state) {
    return HybridSparse(state).purity_defect();
}

namespace {

double entropy_of(const std::vector<double>& normalized_eigs, double eig_tol) {
    double sum = 0.0;
    for (double e : normalized_eigs) {
        if (e < -eig_tol)
            throw NumericsError(
                "von_neumann_entropy: state is not positive semidefinite; "
                "entropy is undefined");
        sum += std::max(e, 0.0);
    }
    if (sum <= 0.0) throw NumericsError("von_neumann_entropy: zero state");
    double s = 0.0;
    for (double e : normalized_eigs) {
        const double lam = std::max(e, 0.0) / sum;
        if (lam > 0.0) s -= lam * std::log(lam);
    }
    return s;
}

} // namespace

double von_neumann_entropy(const HybridDyadState& state, double eig_tol) {
    return entropy_of(HybridSparse(state).normalized_eigenvalues(), eig_tol);
}
double von_neumann_entropy(const HybridGridState& state, double eig_tol) {
    return entropy_of(HybridSparse(state).normalized_eigenvalues(), eig_tol);
}

QuantumOperator reduce_qm(const HybridDyadState& state) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(state.dim(), state.dim());
    const auto& grid = state.grid();
    for (const auto& t : state.terms())
        if (grid.snap(t.ket) == grid.snap(t.bra)) m(t.i, t.j) += t.coeff;
    return QuantumOperator(std::move(m));
}

QuantumOperator reduce_qm(const HybridGridState& state) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(state.dim(), state.dim());
    for (int i = 0; i < state.dim(); ++i)
        for (int j = 0; j < state.dim(); ++j)
            m(i, j) = state.component(i, j).trace();
    return QuantumOperator(std::move(m));
}

ClassicalOperator reduce_cm(const HybridGridState& state) {
    ClassicalOperator out(state.grid());
    for (int i = 0; i < state.dim(); ++i) out += state.component(i, i);
    return out;
}

ClassicalOperator reduce_cm(const HybridDyadState& state) {
    return reduce_cm(state.to_grid());
}

} // namespace hybridlab
