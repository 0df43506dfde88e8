#include "modulation/modulation.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace b5 {

const double kKappaExact = 128.0 / (105.0 * std::numbers::pi);

RegimeMode RegimeMode::non_degenerate(double ustar_center) {
    RegimeMode m;
    m.kind = Kind::NonDegenerate;
    m.ustar_center = ustar_center;
    return m;
}

RegimeMode RegimeMode::degenerate(double nu) {
    RegimeMode m;
    m.kind = Kind::Degenerate;
    m.nu = nu;
    return m;
}

void RegimeMode::validate() const {
    if (kind == Kind::NonDegenerate && !(ustar_center > 0.0))
        throw std::invalid_argument("non-degenerate mode requires u*(0,0) > 0");
    if (kind == Kind::Degenerate && !(nu > 0.0)) throw std::invalid_argument("degenerate mode requires nu > 0");
}

std::vector<std::string> RegimeMode::warnings() const {
    std::vector<std::string> w;
    if (kind == Kind::Degenerate && nu <= 8.0)
        w.emplace_back("nu <= 8: the blow-up construction is only established for nu > 8");
    return w;
}

double RegimeMode::gamma() const { return kind == Kind::Degenerate ? 7.0 * nu / 6.0 - 7.0 / 3.0 : 3.5; }
double RegimeMode::nu_eff() const { return kind == Kind::Degenerate ? nu : 3.0; }
double RegimeMode::beta() const { return kind == Kind::Degenerate ? 0.5 * (nu - 3.0) : 0.0; }
double RegimeMode::q(double kappa) const { return nu * (1.0 + nu) / kappa; }
double RegimeMode::nu_tilde() const { return -0.5 + 0.5 * std::sqrt(nu * nu + (nu + 1.0) * (nu + 1.0)); }

Rates formal_rhs(double, double lambda, double b, double vstar, double kappa) {
    if (lambda < 0.0) throw std::invalid_argument("formal_rhs: lambda < 0");
    return {b, kappa * vstar * std::sqrt(lambda)};
}

AppPoint app_trajectory(double t, const RegimeMode& mode, double kappa) {
    if (mode.degenerate_kind()) return {std::pow(t, mode.nu + 1.0), (mode.nu + 1.0) * std::pow(t, mode.nu)};
    const double k = kappa * kappa * mode.ustar_center * mode.ustar_center;
    return {k / 144.0 * std::pow(t, 4), k / 36.0 * std::pow(t, 3)};
}

namespace {

// l = 1/2 X^2 + 1/2 Y^2 with X = b/t^p + cx lambda/t^{p+1} - kx and
// Y = b/t^p + cy lambda/t^{p+1} - ky.
struct LForm {
    double p, cx, kx, cy, ky, rx, ry;
};

LForm lform(const RegimeMode& mode, double kappa) {
    if (mode.degenerate_kind()) {
        const double nu = mode.nu, nt = mode.nu_tilde();
        return {nu, nt, nu + nt + 1.0, -(nt + 1.0), nu - nt, nu - nt, nu + nt + 1.0};
    }
    const double k = kappa * kappa * mode.ustar_center * mode.ustar_center;
    return {3.0, 2.0, k / 24.0, -3.0, k / 144.0, 1.0, 6.0};
}

}  // namespace

std::pair<double, double> lyapunov_terms(double t, double lambda, double b, const RegimeMode& mode, double kappa) {
    const LForm f = lform(mode, kappa);
    const double bb = b / std::pow(t, f.p), ll = lambda / std::pow(t, f.p + 1.0);
    return {bb + f.cx * ll - f.kx, bb + f.cy * ll - f.ky};
}

double lyapunov_l(double t, double lambda, double b, const RegimeMode& mode, double kappa) {
    const auto [x, y] = lyapunov_terms(t, lambda, b, mode, kappa);
    return 0.5 * (x * x + y * y);
}

double lyapunov_rate(double t, double lambda, double b, double lambda_t, double b_t, const RegimeMode& mode,
                     double kappa) {
    const LForm f = lform(mode, kappa);
    const auto [x, y] = lyapunov_terms(t, lambda, b, mode, kappa);
    const double tp = std::pow(t, f.p);
    const double db = b_t / tp - f.p * b / (tp * t);
    const double dl = lambda_t / (tp * t) - (f.p + 1.0) * lambda / (tp * t * t);
    return x * (db + f.cx * dl) + y * (db + f.cy * dl);
}

double lyapunov_rate_linearized(double t, double lambda, double b, const RegimeMode& mode, double kappa) {
    const LForm f = lform(mode, kappa);
    const auto [x, y] = lyapunov_terms(t, lambda, b, mode, kappa);
    return -(f.rx * x * x + f.ry * y * y) / t;
}

double linearized_bt(double t, double lambda, const RegimeMode& mode, double kappa) {
    if (mode.degenerate_kind()) {
        const double nu = mode.nu;
        return std::pow(t, nu - 1.0) * 0.5 * (nu + 1.0) * nu * (1.0 + lambda / std::pow(t, nu + 1.0));
    }
    const double ku = kappa * mode.ustar_center;
    return 0.5 * ku * (ku * t * t / 12.0 + 12.0 * lambda / (ku * t * t));
}

const char* face_name(Face f) {
    switch (f) {
        case Face::None: return "none";
        case Face::L: return "l";
        case Face::AlphaMinusUpper: return "alpha_minus_upper";
        case Face::AlphaMinusLower: return "alpha_minus_lower";
        case Face::AlphaPlusUpper: return "alpha_plus_upper";
        case Face::AlphaPlusLower: return "alpha_plus_lower";
    }
    return "none";
}

CylinderStatus cylinder_check(const ModState& s, const RegimeMode& mode, double kappa) {
    if (!(s.t > 0.0)) throw std::invalid_argument("cylinder_check: t must be positive");
    CylinderStatus st;
    st.l = lyapunov_l(s.t, s.lambda, s.b, mode, kappa);
    st.l_bound = std::pow(s.t, mode.l_exponent());
    st.alpha_bound = std::pow(s.t, mode.gamma() + 1.0);
    const std::array<std::pair<Face, double>, 5> g{{
        {Face::AlphaPlusUpper, s.alpha_plus / st.alpha_bound - 1.0},
        {Face::AlphaPlusLower, -s.alpha_plus / st.alpha_bound - 1.0},
        {Face::AlphaMinusUpper, s.alpha_minus / st.alpha_bound - 1.0},
        {Face::AlphaMinusLower, -s.alpha_minus / st.alpha_bound - 1.0},
        {Face::L, st.l / st.l_bound - 1.0},
    }};
    double worst = -1e300;
    for (const auto& [face, v] : g)
        if (v > worst) {
            worst = v;
            st.face = face;
        }
    constexpr double kContact = 1e-12;
    st.contact = std::abs(worst) <= kContact;
    st.inside = worst <= 0.0 || st.contact;
    if (st.inside && !st.contact) st.face = Face::None;
    return st;
}

double ModModel::vstar_at(double t) const {
    if (vstar) return vstar(t);
    if (mode.degenerate_kind()) return mode.q(kappa) * std::pow(t, mode.beta());
    return mode.ustar_center;
}

double ModModel::forcing_at(double t) const { return forcing ? forcing(t) : 0.0; }

// ---------------------------------------------------------------------------

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 5>;  // lambda, b, phi, I+, J-

struct System {
    const ModModel& m;
    void operator()(const State& x, State& dx, double t) const {
        const double lambda = x[0];
        if (!(lambda > 0.0)) {
            std::ostringstream os;
            os << "modulation: lambda became nonpositive at t = " << t;
            throw ModulationError(os.str());
        }
        const double f = m.forcing_at(t);
        dx[0] = x[1];
        dx[1] = m.kappa * m.vstar_at(t) * std::sqrt(lambda);
        dx[2] = m.e0 / lambda;
        dx[3] = f == 0.0 ? 0.0 : std::exp(-x[2]) * f;
        dx[4] = f == 0.0 ? 0.0 : std::exp(x[2]) * f;
    }
};

ModState assemble(double t, const State& x, double ap0, double am0) {
    return {t, x[0], x[1], std::exp(-x[2]) * (am0 + x[4]), std::exp(x[2]) * (ap0 + x[3])};
}

constexpr double kPhiPerStep = 30.0;

}  // namespace

ModTrajectory integrate_mod(const ModState& start, double t_end, const ModModel& model, const ModOptions& opt) {
    model.mode.validate();
    if (!(start.t > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("integrate_mod: times must be positive");
    if (!(start.lambda > 0.0)) throw std::invalid_argument("integrate_mod: lambda must be positive");

    ModTrajectory tr;
    tr.samples.push_back(start);
    if (t_end == start.t) return tr;
    const double dir = t_end > start.t ? 1.0 : -1.0;
    System sys{model};

    auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
    double t = start.t;
    double ap = start.alpha_plus, am = start.alpha_minus;
    State x{start.lambda, start.b, 0.0, 0.0, 0.0};
    double dt = dir * std::min(std::abs(t_end - t), 1e-3 * t);
    const auto& mode = model.mode;

    while (dir * (t_end - t) > 0.0) {
        stepper.initialize(x, t, dt);
        stepper.do_step(sys);
        ++tr.steps;
        double t_eff = stepper.current_time();
        if (dir * (t_eff - t_end) > 0.0) t_eff = t_end;
        State y;
        auto phi_at = [&](double s) {
            stepper.calc_state(s, y);
            return std::abs(y[2]);
        };
        if (phi_at(t_eff) > kPhiPerStep) {
            double lo = t, hi = t_eff;
            for (int k = 0; k < 60; ++k) {
                const double mid = 0.5 * (lo + hi);
                (phi_at(mid) > kPhiPerStep ? hi : lo) = mid;
            }
            t_eff = lo;
        }
        if (std::abs(t_eff - t) < opt.min_step_ratio * std::abs(t)) {
            std::ostringstream os;
            os << "modulation: step size underflow at t = " << t << " (e0/lambda = " << model.e0 / x[0] << ")";
            throw ModulationError(os.str());
        }

        // Exit detection on a few interior checkpoints of the accepted step.
        constexpr int kChecks = 4;
        double prev = t;
        bool found = false;
        for (int c = 1; c <= kChecks && !found; ++c) {
            const double tc = t + (t_eff - t) * c / kChecks;
            stepper.calc_state(tc, y);
            const auto st = cylinder_check(assemble(tc, y, ap, am), mode, model.kappa);
            if (!st.inside) {
                double lo = prev, hi = tc;
                for (int k = 0; k < 80; ++k) {
                    const double mid = 0.5 * (lo + hi);
                    stepper.calc_state(mid, y);
                    (cylinder_check(assemble(mid, y, ap, am), mode, model.kappa).inside ? lo : hi) = mid;
                }
                stepper.calc_state(hi, y);
                tr.exited = true;
                tr.exit_face = cylinder_check(assemble(hi, y, ap, am), mode, model.kappa).face;
                tr.exit_time = hi;
                if (opt.stop_on_exit) {
                    tr.phi += y[2];
                    tr.samples.push_back(assemble(hi, y, ap, am));
                    return tr;
                }
                found = true;
            }
            prev = tc;
        }

        stepper.calc_state(t_eff, y);
        const ModState s = assemble(t_eff, y, ap, am);
        tr.samples.push_back(s);
        tr.phi += y[2];
        ap = s.alpha_plus;
        am = s.alpha_minus;
        dt = stepper.current_time_step();
        if (dir * (t_eff + dt - t_end) > 0.0) dt = t_end - t_eff;
        t = t_eff;
        x = {y[0], y[1], 0.0, 0.0, 0.0};
    }
    return tr;
}

int classify_exit(const ModTrajectory& tr) {
    if (!tr.exited) return 0;
    if (tr.exit_face == Face::AlphaPlusUpper) return 1;
    if (tr.exit_face == Face::AlphaPlusLower) return -1;
    throw ModulationError(std::string("shooting: exit through face ") + face_name(tr.exit_face) +
                          " breaks the alpha+ dichotomy");
}

ShootResult shoot_unstable(double t1, double t0, const ModModel& model, double tol, const ModOptions& opt) {
    if (!(t1 < t0)) throw std::invalid_argument("shoot_unstable: requires T1 < T0");
    const auto app = app_trajectory(t1, model.mode, model.kappa);
    const double half = 2.0 / 3.0 * std::pow(t1, model.mode.gamma() + 1.0);
    ShootResult res;
    auto trial = [&](double a) {
        ModState s{t1, app.lambda, app.b, 0.0, a};
        const auto tr = integrate_mod(s, t0, model, opt);
        res.transcript.push_back({a, tr.exit_face, tr.exited ? tr.exit_time : t0});
        return classify_exit(tr);
    };
    double lo = -half, hi = half;
    const int c_lo = trial(lo), c_hi = trial(hi);
    res.lo = lo;
    res.hi = hi;
    if (c_lo == 0 || c_hi == 0) {
        res.a = c_lo == 0 ? lo : hi;
        res.trapped = true;
        return res;
    }
    if (c_lo == c_hi)
        throw ModulationError("shooting: both bracket ends exit through the same face");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        ++res.iterations;
        const int c = trial(mid);
        if (c == 0) {
            res.a = mid;
            res.trapped = true;
            res.lo = lo;
            res.hi = hi;
            return res;
        }
        (c == c_lo ? lo : hi) = mid;
    }
    res.a = 0.5 * (lo + hi);
    res.lo = lo;
    res.hi = hi;
    return res;
}

void write_trajectory_csv(const std::string& path, const ModTrajectory& tr, const RegimeMode& mode, double kappa) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fprintf(f, "t,lambda,b,alpha_minus,alpha_plus,l,in_cylinder\n");
    for (const auto& s : tr.samples)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s.t, s.lambda, s.b, s.alpha_minus,
                     s.alpha_plus, lyapunov_l(s.t, s.lambda, s.b, mode, kappa),
                     cylinder_check(s, mode, kappa).inside ? 1 : 0);
    std::fclose(f);
}

}  // namespace b5
