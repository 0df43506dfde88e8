#include "ansatz/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "json.hpp"

namespace b5 {

namespace {

struct SJet {
    double s, d1, d2;
};

SJet smooth_step(double y) {
    if (y <= 0.0) return {0.0, 0.0, 0.0};
    const double s = std::exp(-1.0 / y);
    const double y2 = y * y;
    return {s, s / y2, s * (1.0 - 2.0 * y) / (y2 * y2)};
}

}  // namespace

CutoffSample cutoff(double r, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("cutoff scale must be positive");
    const double x = r / scale;
    if (x <= 1.0) return {1.0, 0.0, 0.0};
    if (x >= 2.0) return {0.0, 0.0, 0.0};
    const SJet p = smooth_step(2.0 - x), q = smooth_step(x - 1.0);
    const double a = p.s, a1 = -p.d1, a2 = p.d2;
    const double c = q.s, c1 = q.d1, c2 = q.d2;
    const double D = a + c, D1 = a1 + c1;
    const double N = a1 * c - a * c1, N1 = a2 * c - a * c2;
    const double v = a / D;
    const double d1 = N / (D * D);
    const double d2 = (N1 * D - 2.0 * N * D1) / (D * D * D);
    return {v, d1 / scale, d2 / (scale * scale)};
}

double cutoff_chi(double r, double scale, int order) {
    const auto c = cutoff(r, scale);
    switch (order) {
        case 0: return c.value;
        case 1: return c.d1;
        case 2: return c.d2;
        default: throw std::invalid_argument("cutoff derivatives available up to order 2");
    }
}

double flat_power_amplitude(const RegimeMode& mode, double kappa) {
    const double beta = mode.beta();
    return 3.0 * mode.q(kappa) / ((beta + 1.0) * (beta + 3.0));
}

StatePair build_ustar(const GridPtr& grid, const RegimeMode& mode, const UstarSpec& spec, double kappa) {
    mode.validate();
    if (!(spec.rho > 0.0)) throw std::invalid_argument("background cutoff radius must be positive");
    const double rho = spec.rho;
    if (mode.degenerate_kind()) {
        const double p = flat_power_amplitude(mode, kappa), beta = mode.beta();
        return StatePair(
            RadialField::sample(grid, [&](double r) { return cutoff_chi(r, rho) * p * std::pow(r, beta); }),
            RadialField::zeros(grid));
    }
    if (spec.family == UstarSpec::Family::Gaussian) {
        if (!(mode.ustar_center > 0.0)) throw std::invalid_argument("u*(0,0) must be positive");
        if (!(spec.width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
        const double a = mode.ustar_center, w = spec.width;
        return StatePair(
            RadialField::sample(grid, [&](double r) { return cutoff_chi(r, rho) * a * std::exp(-(r / w) * (r / w)); }),
            RadialField::zeros(grid));
    }
    const auto& tr = spec.table_r;
    if (tr.size() < 4 || spec.table_u0.size() != tr.size() || (!spec.table_u1.empty() && spec.table_u1.size() != tr.size()))
        throw std::invalid_argument("tabulated background needs at least 4 matching samples");
    if (tr.front() != 0.0) throw std::invalid_argument("tabulated background must start at r = 0");
    if (!(spec.table_u0.front() > 0.0)) throw std::invalid_argument("u*(0,0) must be positive");
    using boost::math::interpolators::pchip;
    auto make = [&](const std::vector<double>& y) {
        auto interp = std::make_shared<pchip<std::vector<double>>>(std::vector<double>(tr), std::vector<double>(y));
        const double r_end = tr.back();
        return [interp, r_end, rho](double r) { return r > r_end ? 0.0 : cutoff_chi(r, rho) * (*interp)(r); };
    };
    auto u0 = make(spec.table_u0);
    RadialField v = RadialField::zeros(grid);
    if (!spec.table_u1.empty()) v = RadialField::sample(grid, make(spec.table_u1));
    return StatePair(RadialField::sample(grid, u0), std::move(v));
}

std::shared_ptr<const Background> Background::evolve(const RegimeMode& mode, const UstarSpec& spec, double t_end,
                                                     double kappa, const BackgroundOptions& opt) {
    if (!(t_end > 0.0)) throw std::invalid_argument("background end time must be positive");
    auto bg = std::make_shared<Background>();
    bg->mode_ = mode;
    bg->spec_ = spec;
    bg->kappa_ = kappa;
    GridSpec gs = opt.grid;
    if (!(gs.r_max > 0.0)) {
        double support = 2.0 * spec.rho;
        if (!mode.degenerate_kind() && spec.family == UstarSpec::Family::Tabulated && !spec.table_r.empty())
            support = std::min(support, spec.table_r.back());
        gs.r_max = support + t_end + 2.0;
    }
    if (gs.cells <= 0) gs.cells = std::max(256, static_cast<int>(0.5 * gs.r_max / gs.core_step));
    auto grid = RadialGrid::make(gs);
    bg->initial_ = build_ustar(grid, mode, spec, kappa);
    bg->hist_ = evolve_history(bg->initial_, 0.0, t_end, opt.snap_dt, opt.solver);
    return bg;
}

double Background::vstar(double t) const {
    if (mode_.degenerate_kind()) return mode_.q(kappa_) * std::pow(t, mode_.beta());
    if (hist_.empty()) throw std::logic_error("non-degenerate v* needs an evolved background");
    return hist_.center(t);
}

double Background::vstar_rate(double t) const {
    if (mode_.degenerate_kind()) return mode_.beta() * mode_.q(kappa_) * std::pow(t, mode_.beta() - 1.0);
    if (hist_.empty()) throw std::logic_error("non-degenerate v* needs an evolved background");
    return hist_.center_rate(t);
}

StatePair Background::state_on(const GridPtr& grid, double t) const {
    const StatePair src = hist_.at(t);
    const RadialGrid& g = *hist_.grid();
    const double r_end = g.r(g.last());
    std::vector<double> u(grid->size()), v(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->r(i);
        if (r > r_end) break;
        u[i] = g.lagrange(src.position.values(), r, Parity::Even);
        v[i] = g.lagrange(src.velocity.values(), r, Parity::Even);
    }
    return StatePair(RadialField(grid, std::move(u)), RadialField(grid, std::move(v)));
}

namespace {

ModOptions flow_options() {
    ModOptions o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-13;
    o.stop_on_exit = false;
    return o;
}

}  // namespace

ModModel FormalFlow::model() const {
    ModModel m;
    m.mode = bg_->mode();
    m.kappa = bg_->kappa();
    m.e0 = 0.0;
    auto bg = bg_;
    m.vstar = [bg](double t) { return bg->vstar(t); };
    return m;
}

FormalFlow::FormalFlow(BackgroundPtr bg, double t_start, double t_end) : bg_(std::move(bg)) {
    const auto app = app_trajectory(t_start, bg_->mode(), bg_->kappa());
    *this = FormalFlow(bg_, ModState{t_start, app.lambda, app.b, 0.0, 0.0}, t_start, t_end);
}

FormalFlow::FormalFlow(BackgroundPtr bg, const ModState& through, double t_lo, double t_hi) : bg_(std::move(bg)) {
    if (!(t_lo <= through.t && through.t <= t_hi)) throw std::invalid_argument("flow range must contain the start");
    samples_ = integrate_mod(through, t_hi, model(), flow_options()).samples;
    if (t_lo < through.t) {
        auto back = integrate_mod(through, t_lo, model(), flow_options()).samples;
        samples_.insert(samples_.end(), back.begin() + 1, back.end());
    }
    std::sort(samples_.begin(), samples_.end(), [](const ModState& a, const ModState& b) { return a.t < b.t; });
}

FlowPoint FormalFlow::point(const ModState& s) const {
    FlowPoint p;
    p.t = s.t;
    p.lambda = s.lambda;
    p.b = s.b;
    p.vstar = bg_->vstar(s.t);
    p.vstar_rate = bg_->vstar_rate(s.t);
    const auto r = formal_rhs(s.t, s.lambda, s.b, p.vstar, bg_->kappa());
    p.lambda_t = r.dlambda;
    p.b_t = r.db;
    return p;
}

FlowPoint FormalFlow::at(double t) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double x, const ModState& s) { return x < s.t; });
    const ModState& base = it == samples_.begin() ? samples_.front() : *(it - 1);
    if (base.t == t) return point(base);
    auto tr = integrate_mod(base, t, model(), flow_options());
    return point(tr.samples.back());
}

Ansatz::Ansatz(ProfilePtr profiles, BackgroundPtr bg, AnsatzOptions opt)
    : prof_(std::move(profiles)), bg_(std::move(bg)), opt_(opt) {
    if (!prof_) throw std::invalid_argument("ansatz needs a profile set");
    if (!bg_) throw std::invalid_argument("ansatz needs a background");
}

GridPtr Ansatz::grid_for(double t, double lambda) const {
    if (!(lambda > 0.0) || !(t > 0.0)) throw std::invalid_argument("ansatz grid needs positive t and lambda");
    GridSpec gs;
    gs.spacing = Spacing::Sinh;
    gs.cells = opt_.cells;
    gs.core_step = opt_.core_fraction * lambda;
    gs.r_max = opt_.r_max > 0.0 ? opt_.r_max : 2.0 * bg_->spec().rho + t + 2.0;
    return RadialGrid::make(gs);
}

RadialField Ansatz::P0(const GridPtr& grid, double t, double lambda, double b, double vstar) const {
    const double cb = b * b * std::pow(lambda, -1.5);
    std::vector<double> out(grid->size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = grid->r(i);
        const double chi = cutoff_chi(r, t);
        if (chi == 0.0) continue;
        const double rho = r / lambda;
        out[i] = chi * (vstar * prof_->A_at(rho).value + cb * prof_->B_at(rho).value);
    }
    return RadialField(grid, std::move(out));
}

RadialField Ansatz::P1(const GridPtr& grid, double t, double lambda, double b, double vstar, double vstar_rate) const {
    const double kappa = prof_->kappa();
    const double cb3 = b * b * b * std::pow(lambda, -2.5);
    std::vector<double> out(grid->size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = grid->r(i);
        const double chi = cutoff_chi(r, t);
        if (chi == 0.0) continue;
        const double rho = r / lambda;
        const auto A = prof_->A_at(rho);
        const auto B = prof_->B_at(rho);
        const double LB = 1.5 * B.value + rho * B.slope;
        out[i] = chi * (-(vstar * b / lambda) * rho * A.slope + vstar_rate * A.value +
                        2.0 * kappa * vstar * (b / lambda) * B.value - cb3 * LB);
    }
    return RadialField(grid, std::move(out));
}

RadialField Ansatz::lap_P0(const GridPtr& grid, double t, double lambda, double b, double vstar) const {
    const double cb = b * b * std::pow(lambda, -1.5);
    std::vector<double> out(grid->size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = grid->r(i);
        const auto chi = cutoff(r, t);
        if (chi.value == 0.0 && chi.d1 == 0.0) continue;
        const double rho = r / lambda;
        const auto A = prof_->A_at(rho);
        const auto B = prof_->B_at(rho);
        const double G = vstar * A.value + cb * B.value;
        const double G1 = (vstar * A.slope + cb * B.slope) / lambda;
        const double G2 = (vstar * A.lap + cb * B.lap) / (lambda * lambda);
        const double lap_chi = r > 0.0 ? chi.d2 + 4.0 * chi.d1 / r : 0.0;
        out[i] = chi.value * G2 + 2.0 * chi.d1 * G1 + G * lap_chi;
    }
    return RadialField(grid, std::move(out));
}

RadialField l2_scaled(const GridPtr& grid, double (*g)(double), double lambda) {
    const double c = std::pow(lambda, -2.5);
    return RadialField::sample(grid, [&](double r) { return c * g(r / lambda); });
}

double l2_norm_with_tail(const RadialField& v) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = v[i] * v[i];
    return std::sqrt(kSphereArea * v.grid().integrate_with_tail(sq));
}

StatePair Ansatz::phi(const GridPtr& grid, const FlowPoint& p) const {
    const StatePair us = bg_->state_on(grid, p.t);
    RadialField u0 = scaled_profile(grid, bubble::W, p.lambda, ScaleKind::Pow32) + P0(grid, p) + us.position;
    RadialField u1 = (-p.b) * l2_scaled(grid, bubble::LW, p.lambda) + P1(grid, p) + us.velocity;
    return StatePair(std::move(u0), std::move(u1));
}

Residual Ansatz::residual(const FormalFlow& flow, double t) const {
    const FlowPoint p = flow.at(t);
    const GridPtr grid = grid_for(t, p.lambda);
    const double h = opt_.fd_rel_step * t;

    auto central = [&](double step, bool second) {
        const FlowPoint a = flow.at(t + step), c = flow.at(t - step);
        RadialField fa = second ? P1(grid, a) : P0(grid, a);
        RadialField fc = second ? P1(grid, c) : P0(grid, c);
        fa -= fc;
        fa *= 1.0 / (2.0 * step);
        return fa;
    };
    auto richardson = [&](bool second, double& gap) {
        RadialField coarse = central(h, second);
        RadialField fine = central(0.5 * h, second);
        RadialField diff = fine - coarse;
        const double scale = norm(fine, NormKind::L2);
        gap = std::max(gap, scale > 0.0 ? norm(diff, NormKind::L2) / scale : 0.0);
        RadialField out = (4.0 / 3.0) * fine;
        out -= (1.0 / 3.0) * coarse;
        return out;
    };

    Residual res;
    auto& n = res.norms;
    n.t = t;
    n.lambda = p.lambda;
    n.b = p.b;
    n.valid = valid(t, p.lambda);

    const RadialField p0 = P0(grid, p);
    const RadialField p1 = P1(grid, p);
    RadialField dP0 = richardson(false, n.richardson_gap);
    RadialField dP1 = richardson(true, n.richardson_gap);

    RadialField psi0 = dP0 - p1;

    const StatePair us = bg_->state_on(grid, t);
    const RadialField W = scaled_profile(grid, bubble::W, p.lambda, ScaleKind::Pow32);
    const RadialField lapP0 = lap_P0(grid, t, p.lambda, p.b, p.vstar);
    std::vector<double> inter(grid->size()), extract(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double w = W[i], q = p0[i], u = us.position[i];
        inter[i] = nl::f_increment(w, q + u) - nl::f(u);
        extract[i] = nl::f_remainder(w, q + u) - nl::f(u);
    }
    RadialField psi1 = (-p.b_t) * l2_scaled(grid, bubble::LW, p.lambda);
    psi1 += (p.b * p.lambda_t / p.lambda) * l2_scaled(grid, bubble::L0LW, p.lambda);
    psi1 += dP1;
    psi1 -= lapP0;
    psi1 -= RadialField(grid, std::move(inter));

    n.P0_H1 = norm(p0, NormKind::H1dot);
    n.P1_L2 = norm(p1, NormKind::L2);
    n.psi0_H1 = norm(psi0, NormKind::H1dot);
    n.psi1_L2 = l2_norm_with_tail(psi1);
    n.extraction_L2 = norm(RadialField(grid, std::move(extract)), NormKind::L2);
    res.psi = StatePair(std::move(psi0), std::move(psi1));
    return res;
}

Residual Ansatz::residual(const FlowPoint& p) const {
    const double h = opt_.fd_rel_step * p.t;
    const FormalFlow through(bg_, ModState{p.t, p.lambda, p.b, 0.0, 0.0}, p.t - 1.5 * h, p.t + 1.5 * h);
    return residual(through, p.t);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

PointwiseReport scan(long samples, unsigned long long seed, int dim,
                     const std::function<std::pair<double, double>(const double*)>& ratio_parts) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PointwiseReport rep;
    double x[3];
    for (long s = 0; s < samples; ++s) {
        double nn = 0.0;
        for (int k = 0; k < dim; ++k) {
            x[k] = gauss(rng);
            nn += x[k] * x[k];
        }
        nn = std::sqrt(nn);
        for (int k = 0; k < dim; ++k) x[k] /= nn;
        const auto [lhs, rhs] = ratio_parts(x);
        ++rep.samples;
        if (rhs <= 0.0) continue;
        const double r = lhs / rhs;
        if (r > rep.max_ratio) {
            rep.max_ratio = r;
            for (int k = 0; k < dim; ++k) rep.worst[k] = x[k];
        }
    }
    return rep;
}

}  // namespace

PointwiseReport pointwise_three_term(long samples, unsigned long long seed) {
    return scan(samples, seed, 3, [](const double* x) {
        const double k = x[0], l = x[1], m = x[2];
        const double lhs = std::abs(nl::f(k + l + m) - (nl::f(k) + nl::f(m) + nl::df(k) * l + nl::df(k) * m));
        const double rhs = std::abs(nl::f(l)) + nl::df(l) * std::abs(k) + nl::df(m) * std::abs(k) +
                           nl::df(m) * std::abs(l);
        return std::make_pair(lhs, rhs);
    });
}

PointwiseReport pointwise_second_order(long samples, unsigned long long seed) {
    return scan(samples, seed, 2, [](const double* x) {
        const double k = x[0], l = x[1];
        const double lhs = std::abs(nl::f(k + l) - nl::f(k) - nl::df(k) * l - 0.5 * nl::d2f(k) * l * l);
        return std::make_pair(lhs, std::abs(nl::f(l)));
    });
}

ResidualScan residual_scan(const Ansatz& ansatz, const std::vector<double>& ts) {
    if (ts.size() < 2) throw std::invalid_argument("residual scan needs at least two times");
    std::vector<double> sorted = ts;
    std::sort(sorted.begin(), sorted.end());
    const double pad = 2.0 * ansatz.options().fd_rel_step;
    FormalFlow flow(ansatz.background_ptr(), sorted.front() * (1.0 - pad), sorted.back() * (1.0 + pad));
    ResidualScan scan;
    std::vector<double> t, p0, p1, s0, s1, ex;
    for (double tk : sorted) {
        auto r = ansatz.residual(flow, tk);
        scan.rows.push_back(r.norms);
        t.push_back(tk);
        p0.push_back(r.norms.P0_H1);
        p1.push_back(r.norms.P1_L2);
        s0.push_back(r.norms.psi0_H1);
        s1.push_back(r.norms.psi1_L2);
        ex.push_back(r.norms.extraction_L2);
    }
    scan.slope_P0 = loglog_slope(t, p0);
    scan.slope_P1 = loglog_slope(t, p1);
    scan.slope_psi0 = loglog_slope(t, s0);
    scan.slope_psi1 = loglog_slope(t, s1);
    scan.slope_extraction = loglog_slope(t, ex);
    return scan;
}

void write_residual_csv(const std::string& path, const ResidualScan& scan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "t,norm_P0_H1,norm_P1_L2,norm_psi0_H1,norm_psi1_L2\n";
    for (const auto& r : scan.rows)
        out << r.t << ',' << r.P0_H1 << ',' << r.P1_L2 << ',' << r.psi0_H1 << ',' << r.psi1_L2 << '\n';
    nlohmann::json j = {{"slopes",
                         {{"norm_P0_H1", scan.slope_P0},
                          {"norm_P1_L2", scan.slope_P1},
                          {"norm_psi0_H1", scan.slope_psi0},
                          {"norm_psi1_L2", scan.slope_psi1},
                          {"extraction_L2", scan.slope_extraction}}}};
    out << "# " << j.dump() << '\n';
}

}  // namespace b5
