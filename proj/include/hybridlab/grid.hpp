#ifndef HYBRIDLAB_GRID_HPP
#define HYBRIDLAB_GRID_HPP

#include <cstddef>
#include <string>

#include "hybridlab/errors.hpp"

namespace hybridlab {

enum class Boundary { periodic, clamped };

struct PhasePoint {
    double q = 0.0;
    double p = 0.0;
};

// Uniform rectangular discretization of the classical (q,p) plane.
// Node (i,j) sits at (q_min + i*dq, p_min + j*dp) with 0 <= i < n_q,
// 0 <= j < n_p.  On periodic grids q_max is identified with q_min.
class PhaseSpaceGrid {
public:
    PhaseSpaceGrid(double q_min, double q_max, double p_min, double p_max,
                   int n_q, int n_p, Boundary boundary);

    double q_min() const { return q_min_; }
    double q_max() const { return q_max_; }
    double p_min() const { return p_min_; }
    double p_max() const { return p_max_; }
    int n_q() const { return n_q_; }
    int n_p() const { return n_p_; }
    double dq() const { return dq_; }
    double dp() const { return dp_; }
    Boundary boundary() const { return boundary_; }

    std::size_t size() const { return static_cast<std::size_t>(n_q_) * n_p_; }
    double cell_measure() const { return dq_ * dp_; }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * n_p_ + j;
    }
    int node_i(std::size_t idx) const { return static_cast<int>(idx) / n_p_; }
    int node_j(std::size_t idx) const { return static_cast<int>(idx) % n_p_; }
    PhasePoint node_point(std::size_t idx) const {
        return {q_min_ + node_i(idx) * dq_, p_min_ + node_j(idx) * dp_};
    }

    bool contains(PhasePoint z) const;

    // Nearest-node snap; ties resolve toward the lower index.  Periodic
    // grids wrap, clamped grids clip to the boundary nodes.
    std::size_t snap(PhasePoint z) const;

    bool operator==(const PhaseSpaceGrid& other) const;

private:
    double q_min_, q_max_, p_min_, p_max_;
    int n_q_, n_p_;
    double dq_, dp_;
    Boundary boundary_;
};

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

} // namespace hybridlab

#endif
