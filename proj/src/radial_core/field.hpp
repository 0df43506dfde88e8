#pragma once

#include <functional>
#include <vector>

#include "radial_core/grid.hpp"

namespace b5 {

class RadialField {
public:
    RadialField() = default;
    RadialField(GridPtr grid, std::vector<double> values, Parity parity = Parity::Even);
    static RadialField zeros(GridPtr grid, Parity parity = Parity::Even);
    static RadialField sample(GridPtr grid, const std::function<double(double)>& f,
                              Parity parity = Parity::Even);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }
    Parity parity() const { return parity_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }

    // Monotone cubic (PCHIP) interpolation in r; zero beyond r_max.
    double at(double r) const;
    RadialField derivative() const;
    RadialField laplacian() const;
    bool finite() const;

    RadialField& operator+=(const RadialField& o);
    RadialField& operator-=(const RadialField& o);
    RadialField& operator*=(double c);

private:
    GridPtr grid_;
    std::vector<double> v_;
    Parity parity_ = Parity::Even;
};

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(double c, RadialField a);
RadialField pointwise(const RadialField& a, const RadialField& b);

struct StatePair {
    RadialField position;
    RadialField velocity;

    StatePair() = default;
    StatePair(RadialField u, RadialField v);
    const RadialGrid& grid() const { return position.grid(); }
};

void require_same_grid(const RadialField& a, const RadialField& b);

}  // namespace b5
