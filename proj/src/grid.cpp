#include "hybridlab/grid.hpp"

#include <cmath>

namespace hybridlab {

PhaseSpaceGrid::PhaseSpaceGrid(double q_min, double q_max, double p_min,
                               double p_max, int n_q, int n_p, Boundary boundary)
    : q_min_(q_min), q_max_(q_max), p_min_(p_min), p_max_(p_max), n_q_(n_q),
      n_p_(n_p), boundary_(boundary) {
    if (n_q < 2 || n_p < 2)
        throw ConfigError("grid needs at least two nodes per axis");
    if (!(q_max > q_min) || !(p_max > p_min))
        throw ConfigError("grid bounds must satisfy q_max > q_min, p_max > p_min");
    dq_ = (q_max - q_min) / n_q;
    dp_ = (p_max - p_min) / n_p;
}

bool PhaseSpaceGrid::contains(PhasePoint z) const {
    return z.q >= q_min_ && z.q <= q_max_ && z.p >= p_min_ && z.p <= p_max_;
}

namespace {

// Nearest index with ties toward the lower one.
long nearest_low(double x) { return static_cast<long>(std::ceil(x - 0.5)); }

long wrap(long i, long n) {
    long r = i % n;
    return r < 0 ? r + n : r;
}

long clamp(long i, long n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

} // namespace

std::size_t PhaseSpaceGrid::snap(PhasePoint z) const {
    long i = nearest_low((z.q - q_min_) / dq_);
    long j = nearest_low((z.p - p_min_) / dp_);
    if (boundary_ == Boundary::periodic) {
        i = wrap(i, n_q_);
        j = wrap(j, n_p_);
    } else {
        i = clamp(i, n_q_);
        j = clamp(j, n_p_);
    }
    return index(static_cast<int>(i), static_cast<int>(j));
}

bool PhaseSpaceGrid::operator==(const PhaseSpaceGrid& o) const {
    return q_min_ == o.q_min_ && q_max_ == o.q_max_ && p_min_ == o.p_min_ &&
           p_max_ == o.p_max_ && n_q_ == o.n_q_ && n_p_ == o.n_p_ &&
           boundary_ == o.boundary_;
}

std::string to_string(Boundary b) {
    return b == Boundary::periodic ? "periodic" : "clamped";
}

Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "clamped") return Boundary::clamped;
    throw ConfigError("unknown boundary '" + s + "' (periodic|clamped)");
}

} // namespace hybridlab
