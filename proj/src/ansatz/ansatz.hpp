#pragma once

#include <memory>
#include <string>
#include <vector>

#include "modulation/modulation.hpp"
#include "profiles/profiles.hpp"
#include "wave_sim/solver.hpp"

namespace b5 {

struct CutoffSample {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// chi(r) = s(2-r) / (s(2-r) + s(r-1)), s(x) = exp(-1/x) for x > 0.
// Evaluated at r / scale; derivatives are with respect to r.
CutoffSample cutoff(double r, double scale = 1.0);
double cutoff_chi(double r, double scale = 1.0, int order = 0);

// Initial background data.
struct UstarSpec {
    enum class Family { Gaussian, Tabulated };
    Family family = Family::Gaussian;
    // Cutoff radius: data are multiplied by chi(r / rho).
    double rho = 1.0;
    // Gaussian: u*(0,0) exp(-(r/width)^2), amplitude from the regime.
    double width = 1.0;
    // Tabulated: radial samples of (u0, u1), monotone cubic in between.
    std::vector<double> table_r, table_u0, table_u1;
};

// Non-degenerate: the chosen family (u0(0) must be positive).
// Degenerate: chi(r/rho) p r^beta with p = 3q/((beta+1)(beta+3)), u1 = 0.
StatePair build_ustar(const GridPtr& grid, const RegimeMode& mode, const UstarSpec& spec,
                      double kappa = kKappaExact);
double flat_power_amplitude(const RegimeMode& mode, double kappa = kKappaExact);

struct BackgroundOptions {
    // Zero r_max: 2 rho + t_end + 2. Zero cells: half of r_max / core_step (at least 256).
    GridSpec grid{Spacing::Sinh, 0, 0.0, 0.01};
    double snap_dt = 1e-3;
    SolverConfig solver;
};

// The evolved background u* on [0, t_end] and the scalar v*(t) driving the
// modulation law.
class Background {
public:
    static std::shared_ptr<const Background> evolve(const RegimeMode& mode, const UstarSpec& spec, double t_end,
                                                    double kappa = kKappaExact, const BackgroundOptions& opt = {});

    const RegimeMode& mode() const { return mode_; }
    const UstarSpec& spec() const { return spec_; }
    double kappa() const { return kappa_; }
    double t_end() const { return hist_.t_last(); }
    const WaveHistory& history() const { return hist_; }
    const StatePair& initial() const { return initial_; }

    // u*(t,0) (non-degenerate) or q t^beta (degenerate).
    double vstar(double t) const;
    double vstar_rate(double t) const;
    // (u*, d_t u*) at t resampled on `grid` (zero beyond the history grid).
    StatePair state_on(const GridPtr& grid, double t) const;

private:
    RegimeMode mode_;
    UstarSpec spec_;
    double kappa_ = kKappaExact;
    StatePair initial_;
    WaveHistory hist_;
};

using BackgroundPtr = std::shared_ptr<const Background>;

// A point of the formal parameter flow lambda_t = b, b_t = kappa v* sqrt(lambda).
struct FlowPoint {
    double t = 0.0;
    double lambda = 0.0;
    double b = 0.0;
    double lambda_t = 0.0;
    double b_t = 0.0;
    double vstar = 0.0;
    double vstar_rate = 0.0;
};

// Exact formal flow started on the app trajectory at t_start and integrated
// forward; `at` re-integrates from the nearest stored state.
class FormalFlow {
public:
    FormalFlow(BackgroundPtr bg, double t_start, double t_end);
    // The flow through a given state, integrated over [t_lo, t_hi].
    FormalFlow(BackgroundPtr bg, const ModState& through, double t_lo, double t_hi);
    FlowPoint at(double t) const;
    const std::vector<ModState>& samples() const { return samples_; }
    ModModel model() const;

private:
    FlowPoint point(const ModState& s) const;
    BackgroundPtr bg_;
    std::vector<ModState> samples_;
};

struct AnsatzOptions {
    int cells = 4096;
    // Core step as a fraction of lambda.
    double core_fraction = 0.05;
    // Zero: 2 rho + t + 2.
    double r_max = 0.0;
    // Time-derivative step relative to t.
    double fd_rel_step = 1e-4;
    // Profile validity flag for lambda / t.
    double lambda_guard = 0.5;
};

struct ResidualNorms {
    double t = 0.0;
    double lambda = 0.0;
    double b = 0.0;
    double P0_H1 = 0.0;
    double P1_L2 = 0.0;
    double psi0_H1 = 0.0;
    double psi1_L2 = 0.0;
    // L2 norm of f(phi0) - [f(W) + f(u*) + f'(W) P0 + f'(W) u*].
    double extraction_L2 = 0.0;
    // Difference between the two Richardson levels, relative.
    double richardson_gap = 0.0;
    bool valid = true;
};

struct Residual {
    StatePair psi;
    ResidualNorms norms;
};

class Ansatz {
public:
    Ansatz(ProfilePtr profiles, BackgroundPtr bg, AnsatzOptions opt = {});

    const ProfileSet& profiles() const { return *prof_; }
    const Background& background() const { return *bg_; }
    const BackgroundPtr& background_ptr() const { return bg_; }
    const AnsatzOptions& options() const { return opt_; }
    GridPtr grid_for(double t, double lambda) const;

    // chi(r/t) (v* A(r/lambda) + b^2 lambda^{-3/2} B(r/lambda)).
    RadialField P0(const GridPtr& grid, double t, double lambda, double b, double vstar) const;
    // The formal time derivative of P0 with lambda_t -> b, b_t -> kappa v* sqrt(lambda).
    RadialField P1(const GridPtr& grid, double t, double lambda, double b, double vstar, double vstar_rate) const;
    // Laplacian of P0 from the profile equations.
    RadialField lap_P0(const GridPtr& grid, double t, double lambda, double b, double vstar) const;
    RadialField P0(const GridPtr& grid, const FlowPoint& p) const { return P0(grid, p.t, p.lambda, p.b, p.vstar); }
    RadialField P1(const GridPtr& grid, const FlowPoint& p) const {
        return P1(grid, p.t, p.lambda, p.b, p.vstar, p.vstar_rate);
    }

    // (W_lambda + P0 + u*, -b (LW)_lambda + P1 + d_t u*), L2 scaling on the second slot.
    StatePair phi(const GridPtr& grid, const FlowPoint& p) const;

    // psi0 = d_t P0 - P1 and psi1 with the flow terms removed, time
    // derivatives by centered differences along the flow through `p`.
    Residual residual(const FormalFlow& flow, double t) const;
    Residual residual(const FlowPoint& p) const;

    bool valid(double t, double lambda) const { return lambda / t < opt_.lambda_guard; }

private:
    ProfilePtr prof_;
    BackgroundPtr bg_;
    AnsatzOptions opt_;
};

// lambda^{-5/2} g(r / lambda) sampled on `grid`.
RadialField l2_scaled(const GridPtr& grid, double (*g)(double), double lambda);
// Integral of v^2 over R^5 with a power-law tail, square-rooted.
double l2_norm_with_tail(const RadialField& v);

struct PointwiseReport {
    long samples = 0;
    double max_ratio = 0.0;
    double worst[3] = {0.0, 0.0, 0.0};
};

// |f(k+l+m) - [f(k)+f(m)+f'(k)l+f'(k)m]| / (|f(l)|+f'(l)|k|+f'(m)|k|+f'(m)|l|)
// over random directions on the unit sphere.
PointwiseReport pointwise_three_term(long samples, unsigned long long seed);
// |f(k+l) - f(k) - f'(k)l - f''(k)l^2/2| / |f(l)| over the unit circle.
PointwiseReport pointwise_second_order(long samples, unsigned long long seed);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ResidualScan {
    std::vector<ResidualNorms> rows;
    double slope_P0 = 0.0, slope_P1 = 0.0, slope_psi0 = 0.0, slope_psi1 = 0.0, slope_extraction = 0.0;
};

// Residual norms along the formal flow started on the app trajectory at ts.front().
ResidualScan residual_scan(const Ansatz& ansatz, const std::vector<double>& ts);
void write_residual_csv(const std::string& path, const ResidualScan& scan);

}  // namespace b5
