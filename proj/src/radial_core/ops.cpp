#include "radial_core/ops.hpp"

#include <cmath>
#include <stdexcept>

namespace b5 {

namespace bubble {

double W(double r) { return std::pow(1.0 + r * r / 15.0, -1.5); }

double dW(double r) { return -(r / 5.0) * std::pow(1.0 + r * r / 15.0, -2.5); }

double LW(double r) { return (1.5 - r * r / 10.0) * std::pow(1.0 + r * r / 15.0, -2.5); }

double dLW(double r) {
    return (-0.7 * r + r * r * r / 50.0) * std::pow(1.0 + r * r / 15.0, -3.5);
}

double L0LW(double r) { return 2.5 * LW(r) + r * dLW(r); }

}  // namespace bubble

namespace nl {

double F(double u) { return 0.3 * std::pow(std::abs(u), 10.0 / 3.0); }

double f(double u) {
    const double c = std::cbrt(u);
    const double c2 = c * c;
    return u * c2 * c2;
}

double df(double u) {
    const double c = std::cbrt(u);
    const double c2 = c * c;
    return 7.0 / 3.0 * c2 * c2;
}

double d2f(double u) { return 28.0 / 9.0 * std::cbrt(u); }

double f_increment(double w, double d) {
    if (w == 0.0) return f(d);
    const double x = d / w;
    if (std::abs(x) > 0.5) return f(w + d) - f(w);
    return f(w) * std::expm1(7.0 / 3.0 * std::log1p(x));
}

double f_remainder(double w, double d) {
    if (w == 0.0) return f(d);
    const double x = d / w;
    if (std::abs(x) > 0.25) return f(w + d) - f(w) - df(w) * d;
    double term = 7.0 / 3.0 * x, sum = 0.0;
    for (int k = 2; k < 60; ++k) {
        term *= (7.0 / 3.0 - (k - 1)) / k * x;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return f(w) * sum;
}

double F_remainder(double w, double d) {
    if (w == 0.0) return F(d);
    const double x = d / w;
    if (std::abs(x) > 0.25) return F(w + d) - F(w) - f(w) * d;
    double term = 10.0 / 3.0 * x, sum = 0.0;
    for (int k = 2; k < 60; ++k) {
        term *= (10.0 / 3.0 - (k - 1)) / k * x;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return F(w) * sum;
}

}  // namespace nl

double inner_product(const RadialField& v, const RadialField& w) {
    require_same_grid(v, w);
    const auto& wt = v.grid().weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += wt[i] * v[i] * w[i];
    return kSphereArea * acc;
}

namespace {

double h1dot_sq(const RadialField& v) {
    const auto d = v.grid().d_dr(v.values(), v.parity());
    const auto& wt = v.grid().weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) acc += wt[i] * d[i] * d[i];
    return kSphereArea * acc;
}

}  // namespace

double norm(const RadialField& v, NormKind kind) {
    switch (kind) {
        case NormKind::L2: return std::sqrt(inner_product(v, v));
        case NormKind::H1dot: return std::sqrt(h1dot_sq(v));
        case NormKind::Energy: return std::sqrt(h1dot_sq(v));
    }
    return 0.0;
}

double norm(const StatePair& x, NormKind kind) {
    switch (kind) {
        case NormKind::L2: return norm(x.position, NormKind::L2);
        case NormKind::H1dot: return norm(x.position, NormKind::H1dot);
        case NormKind::Energy:
            return std::sqrt(h1dot_sq(x.position) + inner_product(x.velocity, x.velocity));
    }
    return 0.0;
}

RadialField ground_state(const GridPtr& grid, GroundOrder order) {
    switch (order) {
        case GroundOrder::W: return RadialField::sample(grid, bubble::W, Parity::Even);
        case GroundOrder::dW: return RadialField::sample(grid, bubble::dW, Parity::Odd);
        case GroundOrder::LW: return RadialField::sample(grid, bubble::LW, Parity::Even);
        case GroundOrder::L0LW: return RadialField::sample(grid, bubble::L0LW, Parity::Even);
    }
    throw std::invalid_argument("unknown ground state order");
}

RadialField rescale(const RadialField& v, double lambda, ScaleKind kind) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale: lambda must be positive");
    const double amp = std::pow(lambda, kind == ScaleKind::Pow32 ? -1.5 : -2.5);
    if (lambda == 1.0) return v;
    return RadialField::sample(
        v.grid_ptr(), [&](double r) { return amp * v.at(r / lambda); }, v.parity());
}

RadialField scaled_profile(const GridPtr& grid, double (*g)(double), double lambda,
                           ScaleKind kind) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const double amp = std::pow(lambda, kind == ScaleKind::Pow32 ? -1.5 : -2.5);
    return RadialField::sample(grid, [&](double r) { return amp * g(r / lambda); });
}

RadialField laplacian(const RadialField& v) { return v.laplacian(); }

RadialField nonlinearity(const RadialField& u, NonlinOrder order) {
    RadialField out = u;
    for (std::size_t i = 0; i < out.size(); ++i) {
        switch (order) {
            case NonlinOrder::F: out[i] = nl::F(u[i]); break;
            case NonlinOrder::f: out[i] = nl::f(u[i]); break;
            case NonlinOrder::df: out[i] = nl::df(u[i]); break;
            case NonlinOrder::d2f: out[i] = nl::d2f(u[i]); break;
        }
    }
    return out;
}

double energy(const StatePair& x) {
    const auto& g = x.grid();
    const auto& wt = g.weights();
    const auto d = g.d_dr(x.position.values(), x.position.parity());
    double acc = 0.0;
    for (std::size_t i = 0; i < wt.size(); ++i) {
        const double v = x.velocity[i];
        acc += wt[i] * (0.5 * v * v + 0.5 * d[i] * d[i] - nl::F(x.position[i]));
    }
    return kSphereArea * acc;
}

}  // namespace b5
