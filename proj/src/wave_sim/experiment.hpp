#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ansatz/ansatz.hpp"
#include "functionals/functionals.hpp"
#include "modulation/modulation.hpp"
#include "wave_sim/solver.hpp"

namespace b5 {

struct FlatPowerConfig {
    double p = 1.0;
    double beta = 3.0;
    double rho = 1.0;
    double t_lo = 0.1;
    double t_hi = 0.3;
    int samples = 21;
    // Zero r_max: 2 rho + t_hi + 1.
    GridSpec grid{Spacing::Sinh, 1024, 0.0, 0.002};
    double cfl = 0.5;
};

struct FlatPowerResult {
    double q_expected = 0.0;
    double q_hat = 0.0;
    double rel_error = 0.0;
    // Least-squares C in u - q t^beta ~ C t^{beta-2} |x|^2 over |x| <= t/4.
    double x2_coeff = 0.0;
    // max |u - q_hat t^beta| / (t^{beta-2} |x|^2) over the same region.
    double x2_bound = 0.0;
    std::vector<double> times, center_ratio;
};

// Linear evolution of (chi(r/rho) p r^beta, 0); needs beta > 5/2 and the
// window clear of the cutoff's influence cone.
FlatPowerResult flat_power_benchmark(const FlatPowerConfig& cfg);

class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// <u - W_lambda - u*, Z_lambda> with the L2-scaled Z.
double orthogonality_functional(const ProfileSet& prof, const RadialField& u, const RadialField& ustar,
                                double lambda);
// Root of the orthogonality functional in [lo, hi], relative tolerance 1e-10.
double extract_lambda(const ProfileSet& prof, const RadialField& u, const RadialField& ustar, double lo,
                      double hi);

// (alpha-, alpha+) = <Y_lambda, eps1> -+ (e0/lambda) <Y_lambda, eps0>, L2-scaled Y.
std::pair<double, double> alpha_components(const ProfileSet& prof, const StatePair& eps, double lambda);

// Unstable direction at scale lambda: alpha+ = 1, alpha- = 0, <d0, Z_lambda> = 0.
StatePair unstable_direction(const ProfileSet& prof, const GridPtr& grid, double lambda);

struct Decomposition {
    double t = 0.0;
    double lambda = 0.0;
    double b = 0.0;
    double alpha_minus = 0.0;
    double alpha_plus = 0.0;
    // |<eps0, Z_lambda>| / (||eps0|| ||Z_lambda||).
    double z_orthogonality = 0.0;
    StatePair eps;
    StatePair phi;

    ModState mod() const { return {t, lambda, b, alpha_minus, alpha_plus}; }
};

// eps = u - phi(t; lambda, b) with the given lambda.
Decomposition decompose_at(const Ansatz& an, const StatePair& u, double t, double lambda, double b);
// Extracts lambda in [lo, hi] first.
Decomposition eps_decompose(const Ansatz& an, const StatePair& u, double t, double b, double lo, double hi);

struct BlowupConfig {
    RegimeMode mode = RegimeMode::non_degenerate(5.0);
    UstarSpec ustar;
    double t1 = 0.15;
    double t0 = 0.5;
    // Virial radius of H.
    double R = 20.0;
    int nodes_per_lambda = 40;
    // Sinh grid step in the stretched coordinate, sets the outer resolution.
    double outer_ds = 0.01;
    // r_max = 2 rho + t0 + margin.
    double r_margin = 2.0;
    double cfl = 0.5;
    // Growth exponent (integral of e0 / lambda) per shooting segment and per observation.
    double segment_growth = 6.0;
    double observe_growth = 0.5;
    // A trial is accepted when |alpha+| at the segment end is below this fraction of the face.
    double accept_fraction = 0.25;
    int max_bisections = 30;
    // Interior trials per shooting round; 1 is bisection.
    int shoot_fanout = 1;
    // Regrid when lambda exceeds this multiple of the grid's design scale.
    double regrid_factor = 2.0;
    int background_cells = 1024;
};

struct SeriesRow {
    double t = 0.0, lambda = 0.0, b = 0.0, alpha_minus = 0.0, alpha_plus = 0.0;
    double eps_norm = 0.0, H = 0.0, E = 0.0, l = 0.0, z_orthogonality = 0.0;
    bool in_cylinder = true;
};

struct SegmentRecord {
    double t_start = 0.0, t_end = 0.0;
    double a = 0.0;
    int iterations = 0;
    bool trapped = false;
    int cells = 0;
    double core_step = 0.0;
    std::vector<ShootTrial> trials;
};

struct BlowupReport {
    std::vector<SeriesRow> rows;
    std::vector<SegmentRecord> segments;
    bool trapped = false;
    bool stayed_in_cylinder = false;
    int max_iterations = 0;
    // d log lambda / d log t by least squares over the trapped window, with a 95% half-width.
    double exponent = 0.0;
    double exponent_ci = 0.0;
    // max ||eps||_E / t^{gamma+1} over the window, and the same over its second half.
    double eps_constant = 0.0;
    double eps_constant_late = 0.0;
    // min H / ||eps||_E^2 over the rows.
    double h_ratio_min = 0.0;
    // max |E - E(t1)| / |E(t1)| within segments (excludes shooting corrections and regrids).
    double energy_drift = 0.0;
    int regrids = 0;
    double last_trusted_t = 0.0;
    std::string message;
};

using ProgressFn = std::function<void(const std::string&)>;

// Segmented shooting from t1 to t0: each segment bisects the alpha+ correction
// along the unstable direction until the trajectory stays near the trapped one.
// `threads` runs trials of one round concurrently; results do not depend on it.
BlowupReport run_blowup_experiment(const ProfilePtr& prof, const BlowupConfig& cfg, const ProgressFn& progress = {},
                                   int threads = 1);

void write_blowup_csv(const std::string& path, const BlowupReport& rep);
std::string blowup_manifest_json(const BlowupConfig& cfg, const BlowupReport& rep);

}  // namespace b5
