#pragma once

#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace b5 {

inline constexpr double kPi = std::numbers::pi;
// Surface area of the unit sphere in R^5.
inline constexpr double kSphereArea = 8.0 * kPi * kPi / 3.0;

enum class Parity { Even, Odd, None };

enum class Spacing { Uniform, Sinh };

// Node layout. Uniform: r_i = i * r_max / cells. Sinh: r = c * sinh(s) with
// s_i = i * ds, where c = core_step / ds, so nodes are uniform (spacing
// ~core_step) near the origin and geometric far out.
struct GridSpec {
    Spacing spacing = Spacing::Sinh;
    int cells = 4096;
    double r_max = 1.0e5;
    double core_step = 0.01;

    std::string key() const;
    bool operator==(const GridSpec&) const = default;
};

class RadialGrid {
public:
    explicit RadialGrid(const GridSpec& spec);

    static std::shared_ptr<const RadialGrid> make(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return r_.size(); }
    std::size_t last() const { return r_.size() - 1; }
    double r(std::size_t i) const { return r_[i]; }
    const std::vector<double>& nodes() const { return r_; }
    // Weights for the integral of g(r) r^4 dr over [0, r_max].
    const std::vector<double>& weights() const { return w_; }
    double ds() const { return ds_; }
    double jac(std::size_t i) const { return rs_[i]; }
    double jac2(std::size_t i) const { return rss_[i]; }
    double min_spacing() const;

    double r_of_s(double s) const;
    double jac_of_s(double s) const;
    double s_of_r(double r) const;
    // Index j with r_j <= r < r_{j+1}, clamped to [0, size-2].
    std::size_t locate(double r) const;

    // Integral of g r^4 dr (no sphere factor).
    double integrate(std::span<const double> g) const;
    // Same, plus an analytic power-law tail beyond r_max fitted on the last
    // two nodes (only used when the integrand decays faster than 1/r).
    double integrate_with_tail(std::span<const double> g) const;
    // Running integral of h(r) dr from 0 to each node, fourth order.
    std::vector<double> cumulative(std::span<const double> h) const;
    // Integral of h(r) dr over [a, b] with partial cells resolved by the
    // local cubic interpolant.
    double integrate_between(std::span<const double> h, double a, double b) const;

    std::vector<double> d_dr(std::span<const double> v, Parity p) const;
    std::vector<double> d2_dr2(std::span<const double> v, Parity p) const;
    std::vector<double> laplacian(std::span<const double> v, Parity p) const;
    // Cubic Lagrange interpolation in s through the four surrounding nodes.
    double lagrange(std::span<const double> v, double r, Parity p) const;

    // Derivatives with respect to the grid coordinate s, fourth order.
    std::vector<double> d_ds(std::span<const double> v, Parity p) const;
    std::vector<double> d2_ds2(std::span<const double> v, Parity p) const;

private:
    double value_at(std::span<const double> v, long i, Parity p) const;
    double partial_cell(std::span<const double> f, std::size_t j, double s) const;

    GridSpec spec_;
    double ds_ = 0.0;
    double scale_ = 1.0;
    std::vector<double> r_, rs_, rss_, w_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

}  // namespace b5
