#include "radial_core/field.hpp"

#include <cmath>
#include <stdexcept>

namespace b5 {

RadialField::RadialField(GridPtr grid, std::vector<double> values, Parity parity)
    : grid_(std::move(grid)), v_(std::move(values)), parity_(parity) {
    if (!grid_) throw std::invalid_argument("field without grid");
    if (v_.size() != grid_->size()) throw std::invalid_argument("field/grid size mismatch");
}

RadialField RadialField::zeros(GridPtr grid, Parity parity) {
    const auto n = grid->size();
    return RadialField(std::move(grid), std::vector<double>(n, 0.0), parity);
}

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& f,
                                Parity parity) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->r(i));
    return RadialField(std::move(grid), std::move(v), parity);
}

namespace {

double pchip_slope(const std::vector<double>& r, const std::vector<double>& v, std::size_t k,
                   Parity p) {
    const std::size_t m = v.size() - 1;
    if (k == 0) {
        if (p == Parity::Even) return 0.0;
        const double h0 = r[1] - r[0], h1 = r[2] - r[1];
        const double d0 = (v[1] - v[0]) / h0, d1 = (v[2] - v[1]) / h1;
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0) return 0.0;
        if (d0 * d1 <= 0 && std::abs(d) > std::abs(3 * d0)) d = 3 * d0;
        return d;
    }
    if (k == m) {
        const double h0 = r[m] - r[m - 1], h1 = r[m - 1] - r[m - 2];
        const double d0 = (v[m] - v[m - 1]) / h0, d1 = (v[m - 1] - v[m - 2]) / h1;
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0) return 0.0;
        if (d0 * d1 <= 0 && std::abs(d) > std::abs(3 * d0)) d = 3 * d0;
        return d;
    }
    const double hl = r[k] - r[k - 1], hr = r[k + 1] - r[k];
    const double dl = (v[k] - v[k - 1]) / hl, dr = (v[k + 1] - v[k]) / hr;
    if (dl * dr <= 0) return 0.0;
    const double w1 = 2 * hr + hl, w2 = hr + 2 * hl;
    return (w1 + w2) / (w1 / dl + w2 / dr);
}

}  // namespace

double RadialField::at(double r) const {
    const auto& x = grid_->nodes();
    if (r < 0.0) r = -r;
    if (r > x.back()) return 0.0;
    const std::size_t j = grid_->locate(r);
    const double h = x[j + 1] - x[j];
    const double t = (r - x[j]) / h;
    const double m0 = pchip_slope(x, v_, j, parity_) * h;
    const double m1 = pchip_slope(x, v_, j + 1, parity_) * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v_[j] + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * v_[j + 1] +
           (t3 - t2) * m1;
}

RadialField RadialField::derivative() const {
    const Parity out = parity_ == Parity::Even  ? Parity::Odd
                       : parity_ == Parity::Odd ? Parity::Even
                                                : Parity::None;
    return RadialField(grid_, grid_->d_dr(v_, parity_), out);
}

RadialField RadialField::laplacian() const {
    return RadialField(grid_, grid_->laplacian(v_, parity_), parity_);
}

bool RadialField::finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

void require_same_grid(const RadialField& a, const RadialField& b) {
    if (a.grid_ptr() != b.grid_ptr() && !(a.grid().spec() == b.grid().spec()))
        throw std::invalid_argument("fields live on different grids");
}

RadialField& RadialField::operator+=(const RadialField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

RadialField& RadialField::operator-=(const RadialField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

RadialField& RadialField::operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
}

RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(double c, RadialField a) { return a *= c; }

RadialField pointwise(const RadialField& a, const RadialField& b) {
    require_same_grid(a, b);
    RadialField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

StatePair::StatePair(RadialField u, RadialField v) : position(std::move(u)), velocity(std::move(v)) {
    require_same_grid(position, velocity);
}

}  // namespace b5
