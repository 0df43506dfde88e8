#include "wave_sim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "json.hpp"

namespace b5 {

FlatPowerResult flat_power_benchmark(const FlatPowerConfig& cfg) {
    if (!(cfg.beta > 2.5)) throw std::invalid_argument("flat power benchmark needs beta > 5/2");
    if (!(cfg.rho > 0.0) || !(cfg.t_lo > 0.0) || !(cfg.t_hi > cfg.t_lo) || cfg.samples < 2)
        throw std::invalid_argument("invalid flat power window");
    if (1.25 * cfg.t_hi >= cfg.rho) throw std::invalid_argument("window touches the cutoff's influence cone");
    GridSpec gs = cfg.grid;
    if (!(gs.r_max > 0.0)) gs.r_max = 2.0 * cfg.rho + cfg.t_hi + 1.0;
    auto grid = RadialGrid::make(gs);
    const double p = cfg.p, beta = cfg.beta, rho = cfg.rho;
    StatePair x(RadialField::sample(grid, [&](double r) { return cutoff_chi(r, rho) * p * std::pow(r, beta); }),
                RadialField::zeros(grid));
    SolverConfig sc;
    sc.linear = true;
    sc.cfl = cfg.cfl;

    FlatPowerResult out;
    out.q_expected = (beta + 1.0) * (beta + 3.0) / 3.0 * p;
    std::vector<StatePair> snaps;
    auto lead = evolve(x, 0.0, cfg.t_lo, sc);
    const double dt = (cfg.t_hi - cfg.t_lo) / (cfg.samples - 1);
    evolve(lead.state, cfg.t_lo, cfg.t_hi, sc,
           [&](double t, const StatePair& s) {
               out.times.push_back(t);
               out.center_ratio.push_back(s.position[0] / std::pow(t, beta));
               snaps.push_back(s);
           },
           dt);
    double sum = 0.0;
    for (double q : out.center_ratio) sum += q;
    out.q_hat = sum / static_cast<double>(out.center_ratio.size());
    out.rel_error = std::abs(out.q_hat / out.q_expected - 1.0);

    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        const double t = out.times[k], scale = std::pow(t, beta - 2.0);
        for (std::size_t i = 1; i < grid->size() && grid->r(i) <= 0.25 * t; ++i) {
            const double r2 = grid->r(i) * grid->r(i);
            const double y = (snaps[k].position[i] - out.q_hat * std::pow(t, beta)) / scale;
            sxy += r2 * y;
            sxx += r2 * r2;
            out.x2_bound = std::max(out.x2_bound, std::abs(y) / r2);
        }
    }
    out.x2_coeff = sxx > 0.0 ? sxy / sxx : 0.0;
    return out;
}

namespace {

// Sum of w_i g(r_i) over nodes with r_i <= r_cut, times the sphere area.
template <class Fn>
double partial_integral(const RadialGrid& g, double r_cut, Fn&& fn) {
    const auto& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size() && g.r(i) <= r_cut; ++i) acc += w[i] * fn(i);
    return kSphereArea * acc;
}

constexpr double kYCut = 80.0;

}  // namespace

double orthogonality_functional(const ProfileSet& prof, const RadialField& u, const RadialField& ustar,
                                double lambda) {
    require_same_grid(u, ustar);
    const auto& g = u.grid();
    const double zr = prof.options().z_radius;
    const double s32 = std::pow(lambda, -1.5), s52 = std::pow(lambda, -2.5);
    return partial_integral(g, zr * lambda, [&](std::size_t i) {
        const double rho = g.r(i) / lambda;
        return (u[i] - s32 * bubble::W(rho) - ustar[i]) * s52 * prof.Z_at(rho);
    });
}

double extract_lambda(const ProfileSet& prof, const RadialField& u, const RadialField& ustar, double lo,
                      double hi) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("invalid lambda bracket");
    auto fn = [&](double l) { return orthogonality_functional(prof, u, ustar, l); };
    const double flo = fn(lo), fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg << "orthogonality functional has no sign change on [" << lo << ", " << hi << "]; scan:";
        for (int k = 0; k <= 8; ++k) {
            const double l = lo * std::pow(hi / lo, k / 8.0);
            msg << " (" << l << ", " << fn(l) << ")";
        }
        throw ExtractionError(msg.str());
    }
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-11 * std::min(std::abs(a), std::abs(b)); };
    const auto br = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (br.first + br.second);
}

std::pair<double, double> alpha_components(const ProfileSet& prof, const StatePair& eps, double lambda) {
    const auto& g = eps.grid();
    const double s52 = std::pow(lambda, -2.5);
    double y1 = 0.0, y0 = 0.0;
    const auto& w = g.weights();
    for (std::size_t i = 0; i < g.size() && g.r(i) <= kYCut * lambda; ++i) {
        const double y = s52 * prof.Y_at(g.r(i) / lambda);
        y1 += w[i] * y * eps.velocity[i];
        y0 += w[i] * y * eps.position[i];
    }
    y1 *= kSphereArea;
    y0 *= kSphereArea * prof.e0() / lambda;
    return {y1 - y0, y1 + y0};
}

StatePair unstable_direction(const ProfileSet& prof, const GridPtr& grid, double lambda) {
    const auto& g = *grid;
    const double zr = prof.options().z_radius;
    const double yz = partial_integral(g, zr * lambda, [&](std::size_t i) {
        const double rho = g.r(i) / lambda;
        return prof.Y_at(rho) * prof.Z_at(rho);
    });
    const double lz = partial_integral(g, zr * lambda, [&](std::size_t i) {
        const double rho = g.r(i) / lambda;
        return bubble::LW(rho) * prof.Z_at(rho);
    });
    const double mu = yz / lz, s32 = std::pow(lambda, -1.5), rate = prof.e0() / lambda;
    RadialField d0 = RadialField::sample(grid, [&](double r) {
        const double rho = r / lambda;
        return s32 * ((rho <= kYCut ? prof.Y_at(rho) : 0.0) - mu * bubble::LW(rho));
    });
    StatePair d(d0, rate * d0);
    const double ap = alpha_components(prof, d, lambda).second;
    d.position *= 1.0 / ap;
    d.velocity *= 1.0 / ap;
    return d;
}

Decomposition decompose_at(const Ansatz& an, const StatePair& u, double t, double lambda, double b) {
    const auto& prof = an.profiles();
    const auto& bg = an.background();
    FlowPoint p;
    p.t = t;
    p.lambda = lambda;
    p.b = b;
    p.vstar = bg.vstar(t);
    p.vstar_rate = bg.vstar_rate(t);
    p.lambda_t = b;
    p.b_t = prof.kappa() * p.vstar * std::sqrt(lambda);
    Decomposition d;
    d.t = t;
    d.lambda = lambda;
    d.b = b;
    d.phi = an.phi(u.position.grid_ptr(), p);
    d.eps = StatePair(u.position - d.phi.position, u.velocity - d.phi.velocity);
    const auto [am, ap] = alpha_components(prof, d.eps, lambda);
    d.alpha_minus = am;
    d.alpha_plus = ap;

    const auto& g = u.grid();
    const double zr = prof.options().z_radius, s52 = std::pow(lambda, -2.5);
    const double ez = partial_integral(g, zr * lambda, [&](std::size_t i) {
        return d.eps.position[i] * s52 * prof.Z_at(g.r(i) / lambda);
    });
    const double zz = partial_integral(g, zr * lambda, [&](std::size_t i) {
        const double z = s52 * prof.Z_at(g.r(i) / lambda);
        return z * z;
    });
    const double en = norm(d.eps.position, NormKind::L2);
    d.z_orthogonality = en > 0.0 ? std::abs(ez) / (en * std::sqrt(zz)) : 0.0;
    return d;
}

Decomposition eps_decompose(const Ansatz& an, const StatePair& u, double t, double b, double lo, double hi) {
    const StatePair us = an.background().state_on(u.position.grid_ptr(), t);
    const double lambda = extract_lambda(an.profiles(), u.position, us.position, lo, hi);
    return decompose_at(an, u, t, lambda, b);
}

namespace {

GridPtr simulation_grid(double lambda, const BlowupConfig& cfg, double r_max) {
    const double core = lambda / cfg.nodes_per_lambda;
    const int cells = static_cast<int>(std::ceil(std::asinh(r_max * cfg.outer_ds / core) / cfg.outer_ds));
    return RadialGrid::make({Spacing::Sinh, cells, r_max, core});
}

StatePair regrid(const StatePair& x, const GridPtr& target) {
    const auto& src = x.grid();
    std::vector<double> u(target->size()), v(target->size());
    for (std::size_t i = 0; i < target->size(); ++i) {
        const double r = std::min(target->r(i), src.r(src.last()));
        u[i] = src.lagrange(x.position.values(), r, Parity::Even);
        v[i] = src.lagrange(x.velocity.values(), r, Parity::Even);
    }
    return StatePair(RadialField(target, std::move(u)), RadialField(target, std::move(v)));
}

// Times after t_start at which the integral of e0 / lambda_app grows by `step`,
// up to the total `budget` or t_stop.
std::vector<double> growth_marks(double t_start, double t_stop, double step, double budget, double e0,
                                 const RegimeMode& mode, double kappa) {
    std::vector<double> out;
    double t = t_start, acc = 0.0, next = step;
    while (t < t_stop) {
        const double h = std::min(0.02 * step * app_trajectory(t, mode, kappa).lambda / e0, t_stop - t);
        const double mid = t + 0.5 * h;
        acc += h * e0 / app_trajectory(mid, mode, kappa).lambda;
        t += h;
        if (acc >= next - 1e-12 || t >= t_stop) {
            out.push_back(t);
            if (acc >= budget - 1e-12) break;
            next += step;
        }
    }
    return out;
}

struct TrialOutcome {
    int cls = 0;
    Face face = Face::None;
    double exit_time = 0.0;
    bool failed = false;
    std::string message;
    std::vector<SeriesRow> rows;
    StatePair end;
    double lambda = 0.0, b = 0.0, drift = 0.0;
};

int sign_of(double v) { return v > 0.0 ? 1 : -1; }

}  // namespace

BlowupReport run_blowup_experiment(const ProfilePtr& prof, const BlowupConfig& cfg, const ProgressFn& progress,
                                   int threads) {
    cfg.mode.validate();
    if (!(cfg.t1 > 0.0) || !(cfg.t0 > cfg.t1)) throw std::invalid_argument("need 0 < t1 < t0");
    if (cfg.nodes_per_lambda < 4 || !(cfg.outer_ds > 0.0) || !(cfg.cfl > 0.0 && cfg.cfl < 1.0) ||
        !(cfg.segment_growth > 0.0) || !(cfg.observe_growth > 0.0) || !(cfg.accept_fraction > 0.0) ||
        cfg.max_bisections < 1 || cfg.shoot_fanout < 1 || !(cfg.regrid_factor > 1.0))
        throw std::invalid_argument("invalid blow-up experiment options");
    const ProfileSet& P = *prof;
    const double kappa = P.kappa(), e0 = P.e0();
    const RegimeMode& mode = cfg.mode;
    const double gamma = mode.gamma();
    auto bound = [&](double t) { return std::pow(t, gamma + 1.0); };
    auto say = [&](const std::string& s) {
        if (progress) progress(s);
    };

    BackgroundOptions bo;
    bo.grid = {Spacing::Uniform, cfg.background_cells, 0.0, 0.0};
    auto bg = Background::evolve(mode, cfg.ustar, cfg.t0 * 1.01, kappa, bo);
    const Ansatz an(prof, bg);
    const double r_max = 2.0 * cfg.ustar.rho + cfg.t0 + cfg.r_margin;
    SolverConfig sc;
    sc.cfl = cfg.cfl;

    const AppPoint start = app_trajectory(cfg.t1, mode, kappa);
    double t = cfg.t1, lambda = start.lambda, b = start.b;
    if (!an.valid(t, lambda)) throw std::invalid_argument("lambda(t1) / t1 exceeds the ansatz guard");
    double grid_lambda = lambda;
    GridPtr grid = simulation_grid(lambda, cfg, r_max);
    StatePair cur = decompose_at(an, StatePair(RadialField::zeros(grid), RadialField::zeros(grid)), t, lambda, b).phi;

    BlowupReport rep;
    rep.trapped = true;
    rep.last_trusted_t = t;

    auto run_trial = [&](double a, const StatePair& d, const std::vector<double>& marks) {
        TrialOutcome o;
        StatePair x(cur.position + a * d.position, cur.velocity + a * d.velocity);
        double tt = t, lam = lambda, bb = b;
        const double e_start = energy(x);
        double last_ap = 0.0;
        for (double tn : marks) {
            auto res = evolve(x, tt, tn, sc);
            x = std::move(res.state);
            if (res.concentrated) {
                o.cls = last_ap != 0.0 ? sign_of(last_ap) : 1;
                o.exit_time = res.t;
                o.failed = true;
                o.message = res.message;
                return o;
            }
            double ln;
            const StatePair us = bg->state_on(x.position.grid_ptr(), tn);
            try {
                ln = extract_lambda(P, x.position, us.position, 0.8 * lam, 1.25 * lam);
            } catch (const ExtractionError&) {
                try {
                    ln = extract_lambda(P, x.position, us.position, 0.5 * lam, 2.0 * lam);
                } catch (const ExtractionError& e) {
                    o.cls = last_ap != 0.0 ? sign_of(last_ap) : 1;
                    o.exit_time = tn;
                    o.failed = true;
                    o.message = e.what();
                    return o;
                }
            }
            bb += (tn - tt) * kappa * 0.5 * (bg->vstar(tt) * std::sqrt(lam) + bg->vstar(tn) * std::sqrt(ln));
            tt = tn;
            lam = ln;
            const Decomposition dec = decompose_at(an, x, tt, lam, bb);
            const CylinderStatus cyl = cylinder_check(dec.mod(), mode, kappa);
            SeriesRow row;
            row.t = tt;
            row.lambda = lam;
            row.b = bb;
            row.alpha_minus = dec.alpha_minus;
            row.alpha_plus = dec.alpha_plus;
            row.eps_norm = norm(dec.eps, NormKind::Energy);
            row.H = functional_I(dec.eps, dec.phi.position) + functional_J(dec.eps, lam, bb, cfg.R);
            row.E = energy(x);
            row.l = cyl.l;
            row.z_orthogonality = dec.z_orthogonality;
            row.in_cylinder = cyl.inside;
            o.rows.push_back(row);
            o.drift = std::max(o.drift, std::abs(row.E - e_start) / std::abs(e_start));
            last_ap = dec.alpha_plus;
            if (!cyl.inside) {
                o.face = cyl.face;
                o.exit_time = tt;
                o.cls = cyl.face == Face::AlphaPlusUpper   ? 1
                        : cyl.face == Face::AlphaPlusLower ? -1
                                                           : sign_of(dec.alpha_plus);
                return o;
            }
        }
        o.exit_time = tt;
        o.cls = std::abs(last_ap) <= cfg.accept_fraction * bound(tt) ? 0 : sign_of(last_ap);
        o.end = std::move(x);
        o.lambda = lam;
        o.b = bb;
        return o;
    };

    auto record = [](SegmentRecord& seg, double a, const TrialOutcome& o) {
        ShootTrial tr;
        tr.a = a;
        tr.face = o.face;
        tr.exit_time = o.exit_time;
        seg.trials.push_back(tr);
    };

    while (t < cfg.t0 * (1.0 - 1e-12)) {
        if (lambda > cfg.regrid_factor * grid_lambda) {
            grid_lambda = lambda;
            grid = simulation_grid(lambda, cfg, r_max);
            cur = regrid(cur, grid);
            ++rep.regrids;
        }
        const auto seg_marks = growth_marks(t, cfg.t0, cfg.segment_growth, cfg.segment_growth, e0, mode, kappa);
        const double t_end = seg_marks.back();
        const auto marks = growth_marks(t, t_end, cfg.observe_growth, cfg.segment_growth * 2.0, e0, mode, kappa);
        const StatePair d = unstable_direction(P, grid, lambda);

        SegmentRecord seg;
        seg.t_start = t;
        seg.t_end = t_end;
        seg.cells = static_cast<int>(grid->spec().cells);
        seg.core_step = grid->spec().core_step;
        auto run_all = [&](const std::vector<double>& as) {
            std::vector<TrialOutcome> out(as.size());
            const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
            for (std::size_t i0 = 0; i0 < as.size(); i0 += width) {
                std::vector<std::future<TrialOutcome>> jobs;
                const std::size_t i1 = std::min(as.size(), i0 + width);
                for (std::size_t i = i0 + 1; i < i1; ++i)
                    jobs.push_back(std::async(std::launch::async, run_trial, as[i], std::cref(d), std::cref(marks)));
                out[i0] = run_trial(as[i0], d, marks);
                for (std::size_t i = i0 + 1; i < i1; ++i) out[i] = jobs[i - i0 - 1].get();
            }
            for (std::size_t i = 0; i < as.size(); ++i) record(seg, as[i], out[i]);
            return out;
        };
        double lo = -2.0 / 3.0 * bound(t), hi = -lo;
        const auto ends = run_all({lo, hi});
        if (ends[0].cls != -1 || ends[1].cls != 1) {
            rep.trapped = false;
            rep.message = "bracket endpoints do not exit through opposite alpha+ faces at t = " + std::to_string(t);
            rep.segments.push_back(std::move(seg));
            break;
        }
        TrialOutcome accepted;
        bool ok = false;
        const int k = cfg.shoot_fanout;
        while (!ok && seg.iterations < cfg.max_bisections) {
            std::vector<double> as(k);
            for (int j = 0; j < k; ++j) as[j] = lo + (hi - lo) * (j + 1) / (k + 1);
            auto outs = run_all(as);
            ++seg.iterations;
            double new_lo = lo, new_hi = hi;
            for (int j = 0; j < k; ++j) {
                if (outs[j].cls == 0 && !outs[j].failed) {
                    seg.a = as[j];
                    accepted = std::move(outs[j]);
                    ok = true;
                    break;
                }
                if (outs[j].cls > 0) {
                    new_hi = as[j];
                    break;
                }
                new_lo = as[j];
            }
            lo = new_lo;
            hi = new_hi;
        }
        rep.max_iterations = std::max(rep.max_iterations, seg.iterations);
        seg.trapped = ok;
        rep.segments.push_back(seg);
        if (!ok) {
            rep.trapped = false;
            rep.message = "bisection did not converge in segment starting at t = " + std::to_string(t);
            break;
        }
        rep.rows.insert(rep.rows.end(), accepted.rows.begin(), accepted.rows.end());
        rep.energy_drift = std::max(rep.energy_drift, accepted.drift);
        cur = std::move(accepted.end);
        t = t_end;
        lambda = accepted.lambda;
        b = accepted.b;
        rep.last_trusted_t = t;
        char buf[160];
        std::snprintf(buf, sizeof buf, "segment %zu: t = %.6f lambda = %.6e iterations = %d", rep.segments.size(), t,
                      lambda, seg.iterations);
        say(buf);
    }

    rep.stayed_in_cylinder = !rep.rows.empty();
    for (const auto& r : rep.rows) rep.stayed_in_cylinder = rep.stayed_in_cylinder && r.in_cylinder;
    if (rep.rows.size() >= 3) {
        std::vector<double> x, y;
        for (const auto& r : rep.rows) {
            x.push_back(std::log(r.t));
            y.push_back(std::log(r.lambda));
        }
        const double n = static_cast<double>(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i] / n;
            my += y[i] / n;
        }
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        rep.exponent = sxy / sxx;
        double sse = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - my - rep.exponent * (x[i] - mx);
            sse += e * e;
        }
        rep.exponent_ci = 1.96 * std::sqrt(sse / (n - 2.0) / sxx);
        const double t_mid = 0.5 * (cfg.t1 + rep.last_trusted_t);
        rep.h_ratio_min = std::numeric_limits<double>::infinity();
        for (const auto& r : rep.rows) {
            const double ratio = r.eps_norm / bound(r.t);
            rep.eps_constant = std::max(rep.eps_constant, ratio);
            if (r.t >= t_mid) rep.eps_constant_late = std::max(rep.eps_constant_late, ratio);
            if (r.eps_norm > 0.0) rep.h_ratio_min = std::min(rep.h_ratio_min, r.H / (r.eps_norm * r.eps_norm));
        }
        if (!std::isfinite(rep.h_ratio_min)) rep.h_ratio_min = 0.0;
    }
    return rep;
}

void write_blowup_csv(const std::string& path, const BlowupReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,lambda,b,alpha_minus,alpha_plus,eps_norm,H,E\n";
    char buf[512];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.lambda, r.b,
                      r.alpha_minus, r.alpha_plus, r.eps_norm, r.H, r.E);
        out << buf;
    }
}

std::string blowup_manifest_json(const BlowupConfig& cfg, const BlowupReport& rep) {
    using nlohmann::ordered_json;
    ordered_json c;
    c["mode"] = {{"kind", cfg.mode.degenerate_kind() ? "degenerate" : "non_degenerate"},
                 {"ustar_center", cfg.mode.ustar_center},
                 {"nu", cfg.mode.nu}};
    c["ustar"] = {{"family", cfg.ustar.family == UstarSpec::Family::Gaussian ? "gaussian" : "tabulated"},
                  {"rho", cfg.ustar.rho},
                  {"width", cfg.ustar.width}};
    c["t1"] = cfg.t1;
    c["t0"] = cfg.t0;
    c["R"] = cfg.R;
    c["nodes_per_lambda"] = cfg.nodes_per_lambda;
    c["outer_ds"] = cfg.outer_ds;
    c["r_margin"] = cfg.r_margin;
    c["cfl"] = cfg.cfl;
    c["segment_growth"] = cfg.segment_growth;
    c["observe_growth"] = cfg.observe_growth;
    c["accept_fraction"] = cfg.accept_fraction;
    c["max_bisections"] = cfg.max_bisections;
    c["shoot_fanout"] = cfg.shoot_fanout;
    c["regrid_factor"] = cfg.regrid_factor;
    c["background_cells"] = cfg.background_cells;

    ordered_json j;
    j["config"] = c;
    j["result"] = {{"trapped", rep.trapped},
                   {"stayed_in_cylinder", rep.stayed_in_cylinder},
                   {"lambda_exponent", rep.exponent},
                   {"lambda_exponent_ci95", rep.exponent_ci},
                   {"eps_constant", rep.eps_constant},
                   {"eps_constant_late", rep.eps_constant_late},
                   {"h_ratio_min", rep.h_ratio_min},
                   {"energy_drift", rep.energy_drift},
                   {"max_bisections_used", rep.max_iterations},
                   {"regrids", rep.regrids},
                   {"last_trusted_t", rep.last_trusted_t},
                   {"rows", rep.rows.size()},
                   {"message", rep.message}};
    ordered_json segs = ordered_json::array();
    for (const auto& s : rep.segments) {
        ordered_json trials = ordered_json::array();
        for (const auto& tr : s.trials)
            trials.push_back({{"a", tr.a}, {"face", face_name(tr.face)}, {"exit_time", tr.exit_time}});
        segs.push_back({{"t_start", s.t_start},
                        {"t_end", s.t_end},
                        {"a", s.a},
                        {"iterations", s.iterations},
                        {"trapped", s.trapped},
                        {"cells", s.cells},
                        {"core_step", s.core_step},
                        {"trials", trials}});
    }
    j["shooting"] = segs;
    return j.dump(2);
}

}  // namespace b5
