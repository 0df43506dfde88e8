#include "radial_core/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace b5 {

std::string GridSpec::key() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s:cells=%d:rmax=%.17g:h0=%.17g",
                  spacing == Spacing::Uniform ? "uniform" : "sinh", cells, r_max,
                  spacing == Spacing::Uniform ? 0.0 : core_step);
    return buf;
}

namespace {

double sinh_step(int cells, double r_max, double h0) {
    const double m = cells;
    if (r_max <= m * h0 * (1.0 + 1e-12))
        throw std::invalid_argument("sinh grid: r_max must exceed cells * core_step");
    auto g = [&](double ds) { return std::log(h0 * std::sinh(m * ds) / ds) - std::log(r_max); };
    double lo = 1e-12 / m, hi = 1.0 / m;
    while (g(hi) < 0.0) hi *= 2.0;
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    return 0.5 * (a + b);
}

}  // namespace

RadialGrid::RadialGrid(const GridSpec& spec) : spec_(spec) {
    if (spec.cells < 8) throw std::invalid_argument("grid needs at least 8 cells");
    if (!(spec.r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
    const std::size_t n = static_cast<std::size_t>(spec.cells) + 1;
    r_.resize(n);
    rs_.resize(n);
    rss_.resize(n);
    if (spec.spacing == Spacing::Uniform) {
        ds_ = spec.r_max / spec.cells;
        scale_ = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            r_[i] = i * ds_;
            rs_[i] = 1.0;
            rss_[i] = 0.0;
        }
        r_.back() = spec.r_max;
    } else {
        if (!(spec.core_step > 0.0)) throw std::invalid_argument("core_step must be positive");
        ds_ = sinh_step(spec.cells, spec.r_max, spec.core_step);
        scale_ = spec.core_step / ds_;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = i * ds_;
            r_[i] = scale_ * std::sinh(s);
            rs_[i] = scale_ * std::cosh(s);
            rss_[i] = r_[i];
        }
    }

    // Composite cubic rule in s; the first cell uses the even reflection
    // F(-s) = F(s), which holds for r^4-weighted radial integrands.
    std::vector<double> omega(n, 0.0);
    const std::size_t m = n - 1;
    auto add = [&](std::size_t i, double c) { omega[i] += c / 24.0; };
    add(0, 13.0); add(1, 12.0); add(2, -1.0);
    for (std::size_t j = 1; j + 2 <= m; ++j) {
        add(j - 1, -1.0); add(j, 13.0); add(j + 1, 13.0); add(j + 2, -1.0);
    }
    add(m - 3, 1.0); add(m - 2, -5.0); add(m - 1, 19.0); add(m, 9.0);
    w_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r2 = r_[i] * r_[i];
        w_[i] = omega[i] * ds_ * r2 * r2 * rs_[i];
        if (w_[i] < 0.0) throw std::logic_error("negative quadrature weight");
    }
}

std::shared_ptr<const RadialGrid> RadialGrid::make(const GridSpec& spec) {
    return std::make_shared<const RadialGrid>(spec);
}

double RadialGrid::min_spacing() const {
    double h = r_[1] - r_[0];
    for (std::size_t i = 1; i + 1 < r_.size(); ++i) h = std::min(h, r_[i + 1] - r_[i]);
    return h;
}

double RadialGrid::r_of_s(double s) const {
    return spec_.spacing == Spacing::Uniform ? s : scale_ * std::sinh(s);
}

double RadialGrid::jac_of_s(double s) const {
    return spec_.spacing == Spacing::Uniform ? 1.0 : scale_ * std::cosh(s);
}

double RadialGrid::s_of_r(double r) const {
    return spec_.spacing == Spacing::Uniform ? r : std::asinh(r / scale_);
}

std::size_t RadialGrid::locate(double r) const {
    if (r <= 0.0) return 0;
    const double s = s_of_r(r);
    auto j = static_cast<long>(std::floor(s / ds_));
    j = std::clamp<long>(j, 0, static_cast<long>(size()) - 2);
    while (j > 0 && r_[j] > r) --j;
    while (j + 2 < static_cast<long>(size()) && r_[j + 1] <= r) ++j;
    return static_cast<std::size_t>(j);
}

double RadialGrid::value_at(std::span<const double> v, long i, Parity p) const {
    const long m = static_cast<long>(v.size()) - 1;
    if (i >= 0 && i <= m) return v[i];
    if (i < 0) {
        if (p == Parity::Even) return v[-i];
        if (p == Parity::Odd) return -v[-i];
        return 5.0 * value_at(v, i + 1, p) - 10.0 * value_at(v, i + 2, p) +
               10.0 * value_at(v, i + 3, p) - 5.0 * value_at(v, i + 4, p) + value_at(v, i + 5, p);
    }
    return 5.0 * value_at(v, i - 1, p) - 10.0 * value_at(v, i - 2, p) +
           10.0 * value_at(v, i - 3, p) - 5.0 * value_at(v, i - 4, p) + value_at(v, i - 5, p);
}

std::vector<double> RadialGrid::d_ds(std::span<const double> v, Parity p) const {
    if (v.size() != size()) throw std::invalid_argument("field/grid size mismatch");
    const long n = static_cast<long>(v.size());
    std::vector<double> out(n);
    const double c = 1.0 / (12.0 * ds_);
    for (long i = 0; i < n; ++i) {
        double vm2, vm1, vp1, vp2;
        if (i >= 2 && i + 2 < n) {
            vm2 = v[i - 2]; vm1 = v[i - 1]; vp1 = v[i + 1]; vp2 = v[i + 2];
        } else {
            vm2 = value_at(v, i - 2, p); vm1 = value_at(v, i - 1, p);
            vp1 = value_at(v, i + 1, p); vp2 = value_at(v, i + 2, p);
        }
        out[i] = c * (vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2);
    }
    return out;
}

std::vector<double> RadialGrid::d2_ds2(std::span<const double> v, Parity p) const {
    if (v.size() != size()) throw std::invalid_argument("field/grid size mismatch");
    const long n = static_cast<long>(v.size());
    std::vector<double> out(n);
    const double c = 1.0 / (12.0 * ds_ * ds_);
    for (long i = 0; i < n; ++i) {
        double vm2, vm1, vp1, vp2;
        if (i >= 2 && i + 2 < n) {
            vm2 = v[i - 2]; vm1 = v[i - 1]; vp1 = v[i + 1]; vp2 = v[i + 2];
        } else {
            vm2 = value_at(v, i - 2, p); vm1 = value_at(v, i - 1, p);
            vp1 = value_at(v, i + 1, p); vp2 = value_at(v, i + 2, p);
        }
        out[i] = c * (-vm2 + 16.0 * vm1 - 30.0 * v[i] + 16.0 * vp1 - vp2);
    }
    return out;
}

std::vector<double> RadialGrid::d_dr(std::span<const double> v, Parity p) const {
    auto d = d_ds(v, p);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] /= rs_[i];
    return d;
}

std::vector<double> RadialGrid::d2_dr2(std::span<const double> v, Parity p) const {
    auto d1 = d_ds(v, p);
    auto d2 = d2_ds2(v, p);
    for (std::size_t i = 0; i < d2.size(); ++i)
        d2[i] = (d2[i] - rss_[i] / rs_[i] * d1[i]) / (rs_[i] * rs_[i]);
    return d2;
}

std::vector<double> RadialGrid::laplacian(std::span<const double> v, Parity p) const {
    if (v.size() < 5) throw std::invalid_argument("laplacian needs at least 5 nodes");
    auto d1 = d_ds(v, p);
    auto d2 = d2_ds2(v, p);
    std::vector<double> out(v.size());
    out[0] = 5.0 * (d2[0] - rss_[0] / rs_[0] * d1[0]) / (rs_[0] * rs_[0]);
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double ur = d1[i] / rs_[i];
        const double urr = (d2[i] - rss_[i] / rs_[i] * d1[i]) / (rs_[i] * rs_[i]);
        out[i] = urr + 4.0 * ur / r_[i];
    }
    return out;
}

double RadialGrid::integrate(std::span<const double> g) const {
    if (g.size() != size()) throw std::invalid_argument("field/grid size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += w_[i] * g[i];
    return acc;
}

double RadialGrid::integrate_with_tail(std::span<const double> g) const {
    double acc = integrate(g);
    const std::size_t m = last();
    const double h1 = g[m] * std::pow(r_[m], 4);
    const double h0 = g[m - 1] * std::pow(r_[m - 1], 4);
    if (h1 == 0.0 || h0 == 0.0 || (h1 > 0) != (h0 > 0)) return acc;
    const double p = std::log(h0 / h1) / std::log(r_[m] / r_[m - 1]);
    if (p > 1.05) acc += h1 * r_[m] / (p - 1.0);
    return acc;
}

std::vector<double> RadialGrid::cumulative(std::span<const double> h) const {
    if (h.size() != size()) throw std::invalid_argument("field/grid size mismatch");
    const std::size_t n = h.size(), m = n - 1;
    std::vector<double> f(n), c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) f[i] = h[i] * rs_[i];
    const double k = ds_ / 24.0;
    for (std::size_t j = 0; j < m; ++j) {
        double cell;
        if (j == 0)
            cell = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3];
        else if (j + 1 == m)
            cell = f[m - 3] - 5.0 * f[m - 2] + 19.0 * f[m - 1] + 9.0 * f[m];
        else
            cell = -f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2];
        c[j + 1] = c[j] + k * cell;
    }
    return c;
}

namespace {

// Cubic through (s_b + k ds, f_k), k = 0..3, evaluated at s.
double cubic4(const std::array<double, 4>& f, double x) {
    // x measured in units of ds from the first node.
    const double l0 = -(x - 1) * (x - 2) * (x - 3) / 6.0;
    const double l1 = x * (x - 2) * (x - 3) / 2.0;
    const double l2 = -x * (x - 1) * (x - 3) / 2.0;
    const double l3 = x * (x - 1) * (x - 2) / 6.0;
    return f[0] * l0 + f[1] * l1 + f[2] * l2 + f[3] * l3;
}

}  // namespace

double RadialGrid::partial_cell(std::span<const double> f, std::size_t j, double s) const {
    const long m = static_cast<long>(f.size()) - 1;
    long base = std::clamp<long>(static_cast<long>(j) - 1, 0, m - 3);
    std::array<double, 4> q{f[base], f[base + 1], f[base + 2], f[base + 3]};
    const double s0 = j * ds_;
    const double len = s - s0;
    if (len <= 0.0) return 0.0;
    const double g = 0.5 / std::sqrt(3.0);
    const double x1 = (s0 + len * (0.5 - g)) / ds_ - base;
    const double x2 = (s0 + len * (0.5 + g)) / ds_ - base;
    return 0.5 * len * (cubic4(q, x1) + cubic4(q, x2));
}

double RadialGrid::integrate_between(std::span<const double> h, double a, double b) const {
    const auto c = cumulative(h);
    std::vector<double> f(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) f[i] = h[i] * rs_[i];
    auto upto = [&](double x) {
        x = std::clamp(x, 0.0, r_.back());
        const std::size_t j = locate(x);
        return c[j] + partial_cell(f, j, s_of_r(x));
    };
    return upto(b) - upto(a);
}

double RadialGrid::lagrange(std::span<const double> v, double r, Parity p) const {
    if (r > r_.back()) return 0.0;
    if (r < 0.0) r = -r;
    const std::size_t j = locate(r);
    const long m = static_cast<long>(v.size()) - 1;
    long base = static_cast<long>(j) - 1;
    if (base + 3 > m) base = m - 3;
    std::array<double, 4> q;
    for (int k = 0; k < 4; ++k) q[k] = value_at(v, base + k, p);
    return cubic4(q, s_of_r(r) / ds_ - base);
}

}  // namespace b5
