#pragma once

#include <functional>
#include <string>
#include <vector>

#include "radial_core/ops.hpp"

namespace b5 {

// Fourth-order five-point radial Laplacian with an even ghost at the origin.
// Rows for the last `frozen` nodes are zero.
class LaplacianStencil {
public:
    LaplacianStencil(const RadialGrid& grid, int frozen);
    void apply(const double* u, double* out) const;
    std::size_t size() const { return n_; }
    int frozen() const { return frozen_; }

private:
    std::size_t n_;
    int frozen_;
    std::vector<double> c_;  // 5 per row
};

struct SolverConfig {
    double cfl = 0.5;
    bool linear = false;
    // sup |u| above this ends the run as concentrated.
    double blowup_threshold = 1e12;
    // Outer nodes held fixed (the light cone never reaches them).
    int frozen_outer = 2;
};

struct EvolveResult {
    StatePair state;
    double t = 0.0;
    long steps = 0;
    bool concentrated = false;
    std::string message;
};

using Observer = std::function<void(double, const StatePair&)>;

// Classical RK4 method of lines for u_tt = Delta u + f(u) (or the free
// equation). The step is the largest value <= cfl * min spacing that lands
// on t1 exactly; `observe_dt` > 0 adds stops for the observer.
EvolveResult evolve(const StatePair& x, double t0, double t1, const SolverConfig& cfg,
                    const Observer& observer = {}, double observe_dt = 0.0);

// Tabulated solution of the wave equation on a fixed grid: cubic Hermite in
// time for u (with u_t) and for u_t (with Delta u + f(u)).
class WaveHistory {
public:
    WaveHistory() = default;
    WaveHistory(GridPtr grid, bool linear) : grid_(std::move(grid)), linear_(linear) {}

    void append(double t, const StatePair& x);
    bool empty() const { return times_.empty(); }
    double t_first() const { return times_.front(); }
    double t_last() const { return times_.back(); }
    const GridPtr& grid() const { return grid_; }
    const std::vector<double>& times() const { return times_; }

    StatePair at(double t) const;
    // u(t, 0) and u_t(t, 0).
    double center(double t) const;
    double center_rate(double t) const;

private:
    std::size_t bracket(double t) const;
    GridPtr grid_;
    bool linear_ = false;
    std::vector<double> times_;
    std::vector<std::vector<double>> u_, ut_, utt_;
};

// Evolves from (x, t0) to t1 storing snapshots every `snap_dt`.
WaveHistory evolve_history(const StatePair& x, double t0, double t1, double snap_dt, const SolverConfig& cfg);

}  // namespace b5
