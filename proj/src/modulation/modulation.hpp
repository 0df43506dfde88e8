#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace b5 {

// 128 / (105 pi).
extern const double kKappaExact;

using ScalarFn = std::function<double(double)>;

struct RegimeMode {
    enum class Kind { NonDegenerate, Degenerate };
    Kind kind = Kind::NonDegenerate;
    double ustar_center = 1.0;  // u*(0,0), non-degenerate
    double nu = 9.0;            // degenerate

    static RegimeMode non_degenerate(double ustar_center);
    static RegimeMode degenerate(double nu);

    bool degenerate_kind() const { return kind == Kind::Degenerate; }
    // Throws std::invalid_argument on u*(0,0) <= 0 or nu <= 0.
    void validate() const;
    // Non-fatal notes, e.g. nu <= 8.
    std::vector<std::string> warnings() const;

    double gamma() const;
    double nu_eff() const;
    double beta() const;
    double q(double kappa = kKappaExact) const;
    double nu_tilde() const;
    // Exponent of the l-face: gamma + 1 - nu_eff.
    double l_exponent() const { return gamma() + 1.0 - nu_eff(); }
};

struct ModState {
    double t = 0.0;
    double lambda = 0.0;
    double b = 0.0;
    double alpha_minus = 0.0;
    double alpha_plus = 0.0;
};

struct Rates {
    double dlambda = 0.0;
    double db = 0.0;
};

// (b, kappa vstar sqrt(lambda)).
Rates formal_rhs(double t, double lambda, double b, double vstar, double kappa = kKappaExact);

struct AppPoint {
    double lambda = 0.0;
    double b = 0.0;
};
AppPoint app_trajectory(double t, const RegimeMode& mode, double kappa = kKappaExact);

double lyapunov_l(double t, double lambda, double b, const RegimeMode& mode, double kappa = kKappaExact);
// The two bracketed combinations whose half squares make up l.
std::pair<double, double> lyapunov_terms(double t, double lambda, double b, const RegimeMode& mode,
                                         double kappa = kKappaExact);
// Exact time derivative of l along (lambda_t, b_t).
double lyapunov_rate(double t, double lambda, double b, double lambda_t, double b_t, const RegimeMode& mode,
                     double kappa = kKappaExact);
// Closed form of the rate under the linearized parameter law:
// -(c1 X^2 + c2 Y^2) / t.
double lyapunov_rate_linearized(double t, double lambda, double b, const RegimeMode& mode,
                                double kappa = kKappaExact);
// b_t of the linearized law (sqrt(lambda) expanded around the app trajectory).
double linearized_bt(double t, double lambda, const RegimeMode& mode, double kappa = kKappaExact);

enum class Face { None, L, AlphaMinusUpper, AlphaMinusLower, AlphaPlusUpper, AlphaPlusLower };
const char* face_name(Face f);

struct CylinderStatus {
    bool inside = true;
    bool contact = false;  // on the boundary within rounding
    Face face = Face::None;
    double l = 0.0;
    double l_bound = 0.0;
    double alpha_bound = 0.0;
};

CylinderStatus cylinder_check(const ModState& s, const RegimeMode& mode, double kappa = kKappaExact);
inline bool cylinder_contains(const ModState& s, const RegimeMode& mode, double kappa = kKappaExact) {
    return cylinder_check(s, mode, kappa).inside;
}

// Everything the parameter ODE needs besides the state.
struct ModModel {
    RegimeMode mode;
    double kappa = kKappaExact;
    double e0 = 0.0;
    ScalarFn vstar;    // empty: frozen u*(0,0) or q t^beta
    ScalarFn forcing;  // empty: zero

    double vstar_at(double t) const;
    double forcing_at(double t) const;
};

struct ModOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    bool stop_on_exit = true;
    double min_step_ratio = 1e-14;
};

struct ModTrajectory {
    std::vector<ModState> samples;
    bool exited = false;
    Face exit_face = Face::None;
    double exit_time = 0.0;
    // Total growth exponent of the unstable mode, integral of e0 / lambda.
    double phi = 0.0;
    int steps = 0;
};

class ModulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive Dormand-Prince for (lambda, b) with the alpha components carried
// by a per-step integrating factor, so the e0 / lambda rates never limit the
// step. Works forward or backward in t.
ModTrajectory integrate_mod(const ModState& start, double t_end, const ModModel& model,
                            const ModOptions& opt = {});

struct ShootTrial {
    double a = 0.0;
    Face face = Face::None;
    double exit_time = 0.0;
};

struct ShootResult {
    double a = 0.0;
    double lo = 0.0, hi = 0.0;
    bool trapped = false;
    int iterations = 0;
    std::vector<ShootTrial> transcript;
};

// +1 for exit through the positive alpha+ face, -1 for the negative one,
// 0 when the trajectory stays inside until T0.
int classify_exit(const ModTrajectory& tr);

// Bisection on the initial alpha+ over [-2/3 T1^{gamma+1}, 2/3 T1^{gamma+1}],
// starting from the app trajectory with alpha- = 0.
ShootResult shoot_unstable(double t1, double t0, const ModModel& model, double tol,
                           const ModOptions& opt = {});

void write_trajectory_csv(const std::string& path, const ModTrajectory& tr, const RegimeMode& mode,
                          double kappa = kKappaExact);

}  // namespace b5
