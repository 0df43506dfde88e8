#include "doctest.h"

#include <cmath>
#include <random>

#include "radial_core/ops.hpp"

using namespace b5;

namespace {

GridPtr sinh_grid(int cells, double r_max, double h0) {
    return RadialGrid::make({Spacing::Sinh, cells, r_max, h0});
}

GridPtr uniform_grid(int cells, double r_max) {
    return RadialGrid::make({Spacing::Uniform, cells, r_max, 0.0});
}

const double kWH1sq = kSphereArea * 675.0 * std::sqrt(15.0) * kPi / 256.0;

}  // namespace

TEST_CASE("grid layout") {
    for (auto g : {sinh_grid(512, 1000.0, 0.02), uniform_grid(200, 10.0)}) {
        CHECK(g->r(0) == 0.0);
        for (std::size_t i = 1; i < g->size(); ++i) CHECK(g->r(i) > g->r(i - 1));
        for (double w : g->weights()) CHECK(w >= 0.0);
        CHECK(g->r(g->last()) == doctest::Approx(g->spec().r_max).epsilon(1e-12));
    }
    auto g = sinh_grid(512, 1000.0, 0.02);
    CHECK(g->r(1) == doctest::Approx(0.02).epsilon(1e-4));
    CHECK(g->locate(3.3) < g->size());
    CHECK(g->r(g->locate(3.3)) <= 3.3);
    CHECK(g->r(g->locate(3.3) + 1) > 3.3);
    CHECK_THROWS(sinh_grid(512, 1.0, 0.02));
}

TEST_CASE("quadrature converges at fourth order for a gaussian") {
    const double exact = 3.0 * std::sqrt(kPi) / 8.0;
    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
        auto g = uniform_grid(50 << k, 8.0);
        auto v = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
        const double err = std::abs(g->integrate(v.values()) - exact);
        if (k > 0 && prev > 1e-13) CHECK(prev / std::max(err, 1e-300) > 10.0);
        prev = err;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("inner product is stable under refinement") {
    auto bump = [](double r) { return r < 2.0 ? std::exp(-1.0 / (1.0 - r * r / 4.0)) * (1 + r * r) : 0.0; };
    auto coarse = sinh_grid(800, 40.0, 0.01);
    auto fine = sinh_grid(3200, 40.0, 0.0025);
    auto a = RadialField::sample(coarse, bump);
    auto b = RadialField::sample(fine, bump);
    const double ia = inner_product(a, a), ib = inner_product(b, b);
    CHECK(std::abs(ia - ib) / ib < 1e-8);
}

TEST_CASE("ground state closed forms") {
    CHECK(bubble::W(0.0) == 1.0);
    CHECK(bubble::LW(0.0) == 1.5);
    CHECK(std::abs(bubble::LW(std::sqrt(15.0))) < 1e-15);
    const double h = 1e-5;
    for (double r : {0.3, 1.0, 4.0, 11.0}) {
        CHECK(bubble::dW(r) == doctest::Approx((bubble::W(r + h) - bubble::W(r - h)) / (2 * h)).epsilon(1e-8));
        CHECK(bubble::LW(r) == doctest::Approx(1.5 * bubble::W(r) + r * bubble::dW(r)).epsilon(1e-12));
        CHECK(bubble::dLW(r) == doctest::Approx((bubble::LW(r + h) - bubble::LW(r - h)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("nonlinearity") {
    CHECK(nl::f(1.0) == doctest::Approx(1.0));
    CHECK(nl::df(1.0) == doctest::Approx(7.0 / 3.0));
    CHECK(nl::F(1.0) == doctest::Approx(0.3));
    CHECK(nl::d2f(0.0) == 0.0);
    CHECK(nl::d2f(1.0) == doctest::Approx(28.0 / 9.0));
    for (double u : {0.1, 0.7, 2.5, 13.0}) {
        CHECK(nl::f(-u) == -nl::f(u));
        CHECK(nl::f(u) == doctest::Approx(std::pow(u, 7.0 / 3.0)).epsilon(1e-13));
    }
    CHECK(nl::df(bubble::W(0.0)) == doctest::Approx(7.0 / 3.0));
    CHECK(nl::f_increment(1e10, 3.0) == doctest::Approx(7.0 / 3.0 * std::pow(1e10, 4.0 / 3.0) * 3.0).epsilon(1e-8));
    CHECK(nl::f_increment(1.0, -3.0) == doctest::Approx(nl::f(-2.0) - 1.0));
}

TEST_CASE("laplacian exactness and convergence") {
    auto g = uniform_grid(100, 10.0);
    auto q = RadialField::sample(g, [](double r) { return r * r; });
    auto lq = laplacian(q);
    for (std::size_t i = 0; i + 2 < g->size(); ++i) CHECK(lq[i] == doctest::Approx(10.0).epsilon(1e-10));

    auto gs = sinh_grid(1024, 100.0, 0.01);
    auto inv = RadialField::sample(gs, [](double r) { return r > 0 ? std::pow(r, -3.0) : 0.0; }, Parity::None);
    auto li = gs->laplacian(inv.values(), Parity::None);
    for (std::size_t i = 0; i + 2 < gs->size(); ++i)
        if (gs->r(i) > 1.0) CHECK(std::abs(li[i]) * std::pow(gs->r(i), 5) < 1e-5);

    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
        auto grid = sinh_grid(400 << k, 200.0, 0.08 / (1 << k));
        auto w = ground_state(grid, GroundOrder::W);
        auto res = laplacian(w) + nonlinearity(w, NonlinOrder::f);
        for (std::size_t i = grid->size() - 2; i < grid->size(); ++i) res[i] = 0.0;
        const double err = norm(res, NormKind::L2);
        if (k > 0) CHECK(prev / err > 4.0);
        prev = err;
    }
}

TEST_CASE("discrete symmetry of the laplacian") {
    auto g = sinh_grid(1200, 30.0, 0.01);
    auto v = RadialField::sample(g, [](double r) { return std::exp(-r * r) * (1 + r * r); });
    auto w = RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
    const double a = inner_product(laplacian(v), w), b = inner_product(v, laplacian(w));
    CHECK(std::abs(a - b) / std::abs(a) < 1e-8);
}

TEST_CASE("norms and scaling") {
    auto g = sinh_grid(4096, 1e5, 0.005);
    auto w = ground_state(g, GroundOrder::W);
    CHECK(norm(w, NormKind::H1dot) * norm(w, NormKind::H1dot) == doctest::Approx(kWH1sq).epsilon(1e-6));
    CHECK(norm(RadialField::zeros(g), NormKind::L2) == 0.0);
    auto wide = sinh_grid(8192, 1e8, 1e-5);
    const double base = norm(StatePair(ground_state(wide, GroundOrder::W), RadialField::zeros(wide)));
    for (double lam : {1e-3, 0.1, 10.0, 1e3}) {
        auto wl = scaled_profile(wide, bubble::W, lam, ScaleKind::Pow32);
        CHECK(std::abs(norm(StatePair(wl, RadialField::zeros(wide))) / base - 1.0) < 1e-6);
    }
}

TEST_CASE("rescale by interpolation") {
    auto g = sinh_grid(4096, 200.0, 0.002);
    auto v = RadialField::sample(g, [](double r) { return std::exp(-r * r) * (2 + std::cos(r)); });
    auto same = rescale(v, 1.0, ScaleKind::Pow32);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(same[i] == v[i]);
    for (double lam : {0.1, 0.5, 3.0, 20.0}) {
        auto a = rescale(v, lam, ScaleKind::Pow32);
        CHECK(norm(a, NormKind::H1dot) == doctest::Approx(norm(v, NormKind::H1dot)).epsilon(1e-3));
        auto b = rescale(v, lam, ScaleKind::Pow52);
        CHECK(norm(b, NormKind::L2) == doctest::Approx(norm(v, NormKind::L2)).epsilon(1e-4));
    }
    CHECK_THROWS(rescale(v, 0.0, ScaleKind::Pow32));
}

TEST_CASE("energy") {
    auto g = sinh_grid(4096, 1e5, 0.005);
    auto z = RadialField::zeros(g);
    CHECK(energy(StatePair(z, z)) == 0.0);
    auto w = ground_state(g, GroundOrder::W);
    CHECK(energy(StatePair(w, z)) == doctest::Approx(kWH1sq / 5.0).epsilon(1e-5));

    auto u0 = RadialField::sample(g, [](double r) { return 0.8 * std::exp(-r * r); });
    auto u1 = RadialField::sample(g, [](double r) { return std::sin(r) * std::exp(-r * r); });
    const double e = energy(StatePair(u0, u1));
    for (double lam : {0.25, 4.0}) {
        auto a = rescale(u0, lam, ScaleKind::Pow32);
        auto b = rescale(u1, lam, ScaleKind::Pow52);
        CHECK(energy(StatePair(a, b)) == doctest::Approx(e).epsilon(1e-4));
    }
}
