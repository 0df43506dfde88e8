#include "doctest.h"

#include <cmath>

#include "wave_sim/solver.hpp"

using namespace b5;

namespace {

GridPtr test_grid(int cells = 1024, double r_max = 60.0, double core = 0.02) {
    return RadialGrid::make({Spacing::Sinh, cells, r_max, core});
}

StatePair gaussian(const GridPtr& g, double amp, double width = 1.0) {
    return StatePair(RadialField::sample(g, [&](double r) { return amp * std::exp(-r * r / (width * width)); }),
                     RadialField::zeros(g));
}

double bump(double r, double radius) {
    const double x = r / radius;
    return x < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

}  // namespace

TEST_CASE("stencil matches the grid laplacian away from the boundary") {
    auto g = test_grid();
    auto u = RadialField::sample(g, [](double r) { return std::exp(-r * r) * (1 + r); });
    LaplacianStencil lap(*g, 2);
    std::vector<double> out(g->size());
    lap.apply(u.values().data(), out.data());
    auto ref = g->laplacian(u.values(), Parity::Even);
    double err = 0.0;
    for (std::size_t i = 0; i + 2 < g->size(); ++i) err = std::max(err, std::abs(out[i] - ref[i]));
    CHECK(err < 1e-9);
    CHECK(out[g->last()] == 0.0);
    CHECK_THROWS_AS(LaplacianStencil(*g, 1), std::invalid_argument);
}

TEST_CASE("zero data stays zero") {
    auto g = test_grid(256, 20.0, 0.05);
    StatePair x(RadialField::zeros(g), RadialField::zeros(g));
    auto res = evolve(x, 0.0, 1.0, {});
    CHECK_FALSE(res.concentrated);
    CHECK(res.t == 1.0);
    CHECK(norm(res.state) == 0.0);
}

TEST_CASE("energy is conserved over unit time") {
    auto g = test_grid();
    auto x = gaussian(g, 0.5);
    const double e0 = energy(x);
    auto res = evolve(x, 0.0, 1.0, {});
    REQUIRE_FALSE(res.concentrated);
    CHECK(std::abs(energy(res.state) - e0) / std::abs(e0) < 1e-4);
    SolverConfig lin;
    lin.linear = true;
    const double el = 0.5 * std::pow(norm(x.velocity, NormKind::L2), 2) + 0.5 * std::pow(norm(x.position, NormKind::H1dot), 2);
    auto rl = evolve(x, 0.0, 1.0, lin);
    const double el1 = 0.5 * std::pow(norm(rl.state.velocity, NormKind::L2), 2) +
                       0.5 * std::pow(norm(rl.state.position, NormKind::H1dot), 2);
    CHECK(std::abs(el1 - el) / el < 1e-4);
}

TEST_CASE("ground state is stationary") {
    auto g = RadialGrid::make({Spacing::Sinh, 2048, 1e4, 0.02});
    StatePair x(ground_state(g, GroundOrder::W), RadialField::zeros(g));
    auto res = evolve(x, 0.0, 1.0, {});
    auto diff = res.state.position - x.position;
    CHECK(norm(diff, NormKind::H1dot) / norm(x.position, NormKind::H1dot) < 1e-4);
    CHECK(norm(res.state.velocity, NormKind::L2) / norm(x.position, NormKind::H1dot) < 1e-4);
}

TEST_CASE("evolution is reversible") {
    auto g = test_grid();
    auto x = gaussian(g, 0.8);
    auto fwd = evolve(x, 0.0, 1.0, {});
    auto back = evolve(fwd.state, 1.0, 0.0, {});
    auto diff = back.state.position - x.position;
    CHECK(norm(diff, NormKind::H1dot) / norm(x.position, NormKind::H1dot) < 1e-6);
    CHECK(back.t == 0.0);
}

TEST_CASE("finite speed of propagation") {
    auto g = RadialGrid::make({Spacing::Uniform, 2400, 12.0, 0.0});
    const double rho0 = 2.0, t1 = 3.0;
    StatePair x(RadialField::sample(g, [&](double r) { return bump(r, rho0); }), RadialField::zeros(g));
    auto res = evolve(x, 0.0, t1, {});
    const auto& u = res.state.position;
    double peak = 0.0, outside = 0.0;
    const double edge = rho0 + t1 + 2.0 * g->min_spacing();
    for (std::size_t i = 0; i < g->size(); ++i) {
        peak = std::max(peak, std::abs(u[i]));
        if (g->r(i) > edge) outside = std::max(outside, std::abs(u[i]));
    }
    CHECK(outside <= 1e-10 * peak);
}

TEST_CASE("large data triggers the concentration detector") {
    auto g = test_grid(1024, 60.0, 0.02);
    auto x = gaussian(g, 6.0, 3.0);
    REQUIRE(energy(x) < 0.0);
    SolverConfig cfg;
    cfg.blowup_threshold = 1e3;
    auto res = evolve(x, 0.0, 5.0, cfg);
    CHECK(res.concentrated);
    CHECK(res.t < 5.0);
    CHECK(res.state.position.finite());
}

TEST_CASE("observer stops and history interpolation") {
    auto g = test_grid(512, 30.0, 0.02);
    auto x = gaussian(g, 0.5);
    int calls = 0;
    evolve(x, 0.0, 1.0, {}, [&](double, const StatePair&) { ++calls; }, 0.25);
    CHECK(calls == 5);

    auto hist = evolve_history(x, 0.0, 0.5, 0.01, {});
    CHECK(hist.t_first() == 0.0);
    CHECK(hist.t_last() == doctest::Approx(0.5).epsilon(1e-14));
    auto direct = evolve(x, 0.0, 0.237, {});
    auto interp = hist.at(0.237);
    auto du = interp.position - direct.state.position;
    auto dv = interp.velocity - direct.state.velocity;
    CHECK(norm(du, NormKind::H1dot) / norm(direct.state.position, NormKind::H1dot) < 1e-6);
    CHECK(norm(dv, NormKind::L2) / norm(direct.state.velocity, NormKind::L2) < 1e-4);
    CHECK(std::abs(hist.center(0.237) - direct.state.position[0]) < 1e-8);
    CHECK(std::abs(hist.center_rate(0.237) - direct.state.velocity[0]) < 1e-6);
    CHECK(hist.center(0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(hist.at(0.6), std::out_of_range);
}
