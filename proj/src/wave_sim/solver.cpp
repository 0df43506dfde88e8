#include "wave_sim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace b5 {

namespace {

constexpr double kD1[5] = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr double kD2[5] = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};

void rhs(const LaplacianStencil& lap, bool linear, const std::vector<double>& u, const std::vector<double>& v,
         std::vector<double>& du, std::vector<double>& dv) {
    const std::size_t n = u.size();
    const std::size_t active = n - static_cast<std::size_t>(lap.frozen());
    lap.apply(u.data(), dv.data());
    for (std::size_t i = 0; i < n; ++i) du[i] = i < active ? v[i] : 0.0;
    if (!linear)
        for (std::size_t i = 0; i < active; ++i) dv[i] += nl::f(u[i]);
}

double sup_abs(const std::vector<double>& u) {
    double m = 0.0;
    for (double x : u) {
        if (!std::isfinite(x)) return INFINITY;
        m = std::max(m, std::abs(x));
    }
    return m;
}

}  // namespace

LaplacianStencil::LaplacianStencil(const RadialGrid& grid, int frozen) : n_(grid.size()), frozen_(frozen) {
    if (frozen < 2) throw std::invalid_argument("at least two outer nodes must be frozen");
    if (n_ < 8) throw std::invalid_argument("grid too small for the five-point stencil");
    c_.assign(5 * n_, 0.0);
    const double ds = grid.ds();
    const std::size_t active = n_ - static_cast<std::size_t>(frozen);
    for (std::size_t i = 0; i < active; ++i) {
        double a1 = 0.0, a2 = 0.0;
        const double rs = grid.jac(i);
        if (i == 0) {
            a2 = 5.0 / (rs * rs * ds * ds);
        } else {
            const double r = grid.r(i);
            a2 = 1.0 / (rs * rs * ds * ds);
            a1 = (4.0 / r - grid.jac2(i) / (rs * rs)) / (rs * ds);
        }
        double row[5];
        for (int k = 0; k < 5; ++k) row[k] = a2 * kD2[k] + a1 * kD1[k];
        double* out = &c_[5 * i];
        const long base = static_cast<long>(i) - 2;
        const long col0 = std::max(0L, base);
        for (int k = 0; k < 5; ++k) {
            long j = base + k;
            if (j < 0) j = -j;
            out[j - col0] += row[k];
        }
    }
}

void LaplacianStencil::apply(const double* u, double* out) const {
    const std::size_t active = n_ - static_cast<std::size_t>(frozen_);
    for (std::size_t i = 0; i < active; ++i) {
        const double* c = &c_[5 * i];
        const double* x = u + (i < 2 ? 0 : i - 2);
        out[i] = c[0] * x[0] + c[1] * x[1] + c[2] * x[2] + c[3] * x[3] + c[4] * x[4];
    }
    for (std::size_t i = active; i < n_; ++i) out[i] = 0.0;
}

EvolveResult evolve(const StatePair& x, double t0, double t1, const SolverConfig& cfg, const Observer& observer,
                    double observe_dt) {
    if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw std::invalid_argument("cfl fraction must lie in (0, 1)");
    require_same_grid(x.position, x.velocity);
    const RadialGrid& grid = x.grid();
    const LaplacianStencil lap(grid, cfg.frozen_outer);
    const double dt_max = cfg.cfl * grid.min_spacing();
    const std::size_t n = grid.size();

    EvolveResult res;
    res.state = x;
    res.t = t0;
    std::vector<double> u = x.position.values(), v = x.velocity.values();
    std::vector<double> k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n), tu(n), tv(n);

    auto store = [&](double t) {
        res.state.position.values() = u;
        res.state.velocity.values() = v;
        res.t = t;
    };
    if (observer) observer(t0, res.state);

    const double span = t1 - t0;
    const double seg = observe_dt > 0.0 ? observe_dt : std::abs(span);
    const long segments = span == 0.0 ? 0 : std::max(1L, static_cast<long>(std::ceil(std::abs(span) / seg - 1e-9)));
    double t = t0;
    for (long sgi = 0; sgi < segments; ++sgi) {
        const double t_seg = sgi + 1 == segments ? t1 : t0 + (sgi + 1) * (span > 0 ? seg : -seg);
        const double len = t_seg - t;
        const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(len) / dt_max - 1e-9)));
        const double dt = len / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            rhs(lap, cfg.linear, u, v, k1u, k1v);
            for (std::size_t i = 0; i < n; ++i) {
                tu[i] = u[i] + 0.5 * dt * k1u[i];
                tv[i] = v[i] + 0.5 * dt * k1v[i];
            }
            rhs(lap, cfg.linear, tu, tv, k2u, k2v);
            for (std::size_t i = 0; i < n; ++i) {
                tu[i] = u[i] + 0.5 * dt * k2u[i];
                tv[i] = v[i] + 0.5 * dt * k2v[i];
            }
            rhs(lap, cfg.linear, tu, tv, k3u, k3v);
            for (std::size_t i = 0; i < n; ++i) {
                tu[i] = u[i] + dt * k3u[i];
                tv[i] = v[i] + dt * k3v[i];
            }
            rhs(lap, cfg.linear, tu, tv, k4u, k4v);
            for (std::size_t i = 0; i < n; ++i) {
                tu[i] = u[i] + dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
                tv[i] = v[i] + dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
            const double peak = sup_abs(tu);
            if (!(peak <= cfg.blowup_threshold)) {
                store(t);
                res.concentrated = true;
                res.message = "concentration reached resolution floor";
                return res;
            }
            u.swap(tu);
            v.swap(tv);
            t = s + 1 == steps ? t_seg : t + dt;
            ++res.steps;
        }
        store(t);
        if (observer) observer(t, res.state);
    }
    store(t1);
    return res;
}

void WaveHistory::append(double t, const StatePair& x) {
    if (!grid_) grid_ = x.position.grid_ptr();
    if (!times_.empty() && !(t > times_.back())) throw std::invalid_argument("history times must increase");
    times_.push_back(t);
    u_.push_back(x.position.values());
    ut_.push_back(x.velocity.values());
    std::vector<double> acc = grid_->laplacian(x.position.values(), Parity::Even);
    if (!linear_)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += nl::f(x.position[i]);
    utt_.push_back(std::move(acc));
}

std::size_t WaveHistory::bracket(double t) const {
    if (times_.size() < 2) throw std::logic_error("history needs at least two snapshots");
    if (t < times_.front() - 1e-14 || t > times_.back() + 1e-14)
        throw std::out_of_range("time outside the stored history");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t j = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return std::min(j, times_.size() - 2);
}

namespace {
struct HermiteWeights {
    double h00, h10, h01, h11, d00, d10, d01, d11;
};
HermiteWeights hermite_weights(double s, double h) {
    const double s2 = s * s, s3 = s2 * s;
    return {2 * s3 - 3 * s2 + 1,       (s3 - 2 * s2 + s) * h, -2 * s3 + 3 * s2, (s3 - s2) * h,
            (6 * s2 - 6 * s) / h,      3 * s2 - 4 * s + 1,    (-6 * s2 + 6 * s) / h, 3 * s2 - 2 * s};
}
}  // namespace

StatePair WaveHistory::at(double t) const {
    const std::size_t j = bracket(t);
    const double h = times_[j + 1] - times_[j];
    const auto w = hermite_weights((t - times_[j]) / h, h);
    const std::size_t n = grid_->size();
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = w.h00 * u_[j][i] + w.h10 * ut_[j][i] + w.h01 * u_[j + 1][i] + w.h11 * ut_[j + 1][i];
        v[i] = w.h00 * ut_[j][i] + w.h10 * utt_[j][i] + w.h01 * ut_[j + 1][i] + w.h11 * utt_[j + 1][i];
    }
    return StatePair(RadialField(grid_, std::move(u)), RadialField(grid_, std::move(v)));
}

double WaveHistory::center(double t) const {
    const std::size_t j = bracket(t);
    const double h = times_[j + 1] - times_[j];
    const auto w = hermite_weights((t - times_[j]) / h, h);
    return w.h00 * u_[j][0] + w.h10 * ut_[j][0] + w.h01 * u_[j + 1][0] + w.h11 * ut_[j + 1][0];
}

double WaveHistory::center_rate(double t) const {
    const std::size_t j = bracket(t);
    const double h = times_[j + 1] - times_[j];
    const auto w = hermite_weights((t - times_[j]) / h, h);
    return w.h00 * ut_[j][0] + w.h10 * utt_[j][0] + w.h01 * ut_[j + 1][0] + w.h11 * utt_[j + 1][0];
}

WaveHistory evolve_history(const StatePair& x, double t0, double t1, double snap_dt, const SolverConfig& cfg) {
    if (!(t1 > t0)) throw std::invalid_argument("history must run forward in time");
    WaveHistory hist(x.position.grid_ptr(), cfg.linear);
    auto res = evolve(x, t0, t1, cfg, [&](double t, const StatePair& s) { hist.append(t, s); }, snap_dt);
    if (res.concentrated) throw std::runtime_error("background evolution " + res.message);
    return hist;
}

}  // namespace b5
