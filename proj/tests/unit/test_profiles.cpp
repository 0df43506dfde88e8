#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "profiles/profiles.hpp"

using namespace b5;

namespace {

const double kKappaExact = 128.0 / (105.0 * kPi);
// Limit of the second solution at infinity: 1 / (r^4 (-LW')) with LW ~ -c r^-3.
const double kGammaLimit = -1.0 / (3.0 * std::pow(15.0, 2.5) / 10.0);

const ProfileSet& reference() {
    static const ProfilePtr p = ProfileSet::build();
    return *p;
}

const SecondSolution& reference_gamma() {
    static const SecondSolution g = second_solution(reference().grid());
    return g;
}

double loglog_slope(const RadialField& v, double a, double b) {
    const auto& g = v.grid();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.r(i);
        if (r < a || r > b) continue;
        const double x = std::log(r), y = std::log(std::abs(v[i]));
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double relative_l2(const RadialField& a, const RadialField& b, double r_cut) {
    RadialField d = a - b, ref = b;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (a.grid().r(i) > r_cut) d[i] = ref[i] = 0.0;
    return norm(d, NormKind::L2) / norm(ref, NormKind::L2);
}

}  // namespace

TEST_CASE("kappa") {
    auto grid = RadialGrid::make(reference_grid_spec());
    const auto t0 = std::chrono::steady_clock::now();
    const double k = compute_kappa(grid);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(k > 0.0);
    CHECK(std::abs(k / kKappaExact - 1.0) < 1e-6);
    CHECK(secs < 1.0);

    double prev = 0.0;
    for (int j = 0; j < 3; ++j) {
        auto g = RadialGrid::make({Spacing::Sinh, 48 << j, 1e5, 0.05 / (1 << j)});
        const double err = std::abs(compute_kappa(g) - kKappaExact);
        if (j > 0) CHECK(prev / err > 3.0);
        prev = err;
    }
}

TEST_CASE("apply_L annihilates the scaling mode") {
    double prev = 0.0;
    for (int j = 0; j < 3; ++j) {
        auto g = RadialGrid::make({Spacing::Sinh, 512 << j, 1e3, 0.08 / (1 << j)});
        for (double lam : {1.0}) {
            auto lw = scaled_profile(g, bubble::LW, lam, ScaleKind::Pow32);
            auto res = apply_L(lw, lam);
            for (std::size_t i = g->size() - 2; i < g->size(); ++i) res[i] = 0.0;
            const double err = norm(res, NormKind::L2) / norm(lw, NormKind::H1dot);
            if (j > 0) CHECK(prev / err > 4.0);
            prev = err;
        }
    }
    auto g = RadialGrid::make({Spacing::Sinh, 512, 100.0, 0.05});
    auto z = apply_L(RadialField::zeros(g), 0.3);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);
    CHECK_THROWS(apply_L(RadialField::zeros(g), 0.0));
}

TEST_CASE("second solution") {
    const auto& gam = reference_gamma();
    const auto& g = *gam.grid;
    double worst = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g.r(i) >= 0.1 && g.r(i) <= 50.0) worst = std::max(worst, std::abs(gam.wronskian(i) - 1.0));
    CHECK(worst < 1e-5);

    std::vector<double> neg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -gam.value[i];
    CHECK(std::abs(loglog_slope(RadialField(gam.grid, neg, Parity::None), 0.01, 0.1) + 3.0) < 0.05);
    CHECK(SecondSolution::series_value(1e-3) * 1e-9 == doctest::Approx(-2.0 / 9.0).epsilon(1e-5));

    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.r(i) >= 100.0 && g.r(i) <= 500.0) CHECK(std::abs(gam.value[i] / kGammaLimit - 1.0) < 0.05);

    // Series and integrated branches agree where both are valid.
    for (double r : {0.5, 1.0, 1.7}) {
        const std::size_t j = g.locate(r);
        CHECK(gam.value[j] == doctest::Approx(SecondSolution::series_value(g.r(j))).epsilon(1e-12));
    }
}

TEST_CASE("correctors solve their equations") {
    const auto& p = reference();
    const auto& g = *p.grid();
    auto lw = p.LW();
    auto fw = nonlinearity(p.W(), NonlinOrder::df);
    auto rhs_a = p.kappa() * lw + fw;
    auto rhs_b = -1.0 * p.L0LW();
    CHECK(relative_l2(apply_L(p.A(), 1.0), rhs_a, 1e3) < 1e-4);
    CHECK(relative_l2(apply_L(p.B(), 1.0), rhs_b, 1e3) < 1e-4);

    CHECK(std::abs(inner_product(p.Z(), p.A())) < 1e-8);
    CHECK(std::abs(inner_product(p.Z(), p.B())) < 1e-8);
    CHECK(std::abs(p.dA()[0]) < 1e-12);
    CHECK(std::abs(p.dB()[0]) < 1e-12);
    CHECK(std::abs(p.dA()[1] / g.r(1)) < 10.0);

    // Leading far-field coefficients follow from -Delta(c/r) = 2c/r^3.
    const double lw_far = -std::pow(15.0, 2.5) / 10.0;
    CHECK(std::abs(p.far_coeff_A() / (0.5 * p.kappa() * lw_far) - 1.0) < 1e-3);
    CHECK(std::abs(p.far_coeff_B() / (0.25 * lw_far) - 1.0) < 1e-3);
    CHECK(std::abs(loglog_slope(p.A(), 1e3, 1e4) + 1.0) < 0.05);
    CHECK(std::abs(loglog_slope(p.dA(), 1e3, 1e4) + 2.0) < 0.05);
    CHECK(std::abs(loglog_slope(p.d2A(), 1e3, 1e4) + 3.0) < 0.05);
    CHECK(std::abs(loglog_slope(p.B(), 1e3, 1e4) + 1.0) < 0.05);
    CHECK(std::abs(loglog_slope(p.dB(), 1e3, 1e4) + 2.0) < 0.05);
    CHECK(std::abs(loglog_slope(p.d2B(), 1e3, 1e4) + 3.0) < 0.05);
    // A r - c ~ 262.5 / r, forced by f'(W) ~ 525 / r^4.
    {
        const std::size_t j = g.locate(2e4);
        const double c = 0.5 * p.kappa() * lw_far;
        CHECK(std::abs((p.A()[j] * g.r(j) - c) * g.r(j) / 262.5 - 1.0) < 0.1);
    }

    // Derivatives agree with finite differences of the values.
    auto da = p.A().derivative();
    for (double r : {0.3, 2.0, 3.873, 10.0, 80.0}) {
        const std::size_t j = g.locate(r);
        CHECK(da[j] == doctest::Approx(p.dA()[j]).epsilon(1e-5));
    }

    // Orthogonality of the source against the kernel.
    std::vector<double> h1(g.size()), h2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        h1[i] = lw[i] * lw[i];
        h2[i] = lw[i] * fw[i];
    }
    const double n1 = g.integrate_with_tail(h1);
    CHECK(std::abs(kKappaExact * n1 + g.integrate_with_tail(h2)) / n1 < 1e-6);
}

TEST_CASE("corrector sampling off the grid") {
    const auto& p = reference();
    const auto& g = *p.grid();
    for (std::size_t i : {std::size_t(3), std::size_t(400), std::size_t(2000), std::size_t(4000)}) {
        const double r = 0.5 * (g.r(i) + g.r(i + 1));
        const auto s = p.A_at(r);
        CHECK(s.value == doctest::Approx(0.5 * (p.A()[i] + p.A()[i + 1])).epsilon(1e-3));
        const auto node = p.A_at(g.r(i));
        CHECK(node.value == doctest::Approx(p.A()[i]).epsilon(1e-14));
    }
    const double far = 10.0 * g.r(g.last());
    CHECK(p.A_at(far).value == doctest::Approx(p.far_coeff_A() / far));
    CHECK(p.Y_at(far) == 0.0);
    CHECK(p.Z_at(4.0) == 0.0);
}

TEST_CASE("ground eigenpair") {
    const auto& p = reference();
    auto eig = ground_eigenpair(p.grid());
    CHECK(eig.residual < 1e-6);
    CHECK(eig.eigenvalue < 0.0);
    CHECK(eig.e0 == doctest::Approx(p.e0()));
    const auto& g = *p.grid();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.r(i) < 49.0) CHECK(p.Y()[i] > 0.0);
    CHECK(norm(p.Y(), NormKind::L2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner_product(p.LW(), p.Y())) / norm(p.LW(), NormKind::L2) < 1e-6);

    // Residual of the continuous equation on the interior.
    auto res = apply_L(p.Y(), 1.0) + (p.e0() * p.e0()) * p.Y();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.r(i) > 45.0) res[i] = 0.0;
    CHECK(norm(res, NormKind::L2) < 1e-4);

    // Faster than any power: r^5 Y keeps falling.
    const double y20 = p.Y_at(20.0) * std::pow(20.0, 5), y40 = p.Y_at(40.0) * std::pow(40.0, 5);
    CHECK(y40 < 1e-3 * y20);

    auto coarse = ground_eigenpair(RadialGrid::make({Spacing::Sinh, 2048, 1e5, 0.02}));
    CHECK(std::abs(coarse.e0 / eig.e0 - 1.0) < 5e-4);
    auto wider = ground_eigenpair(p.grid(), 70.0);
    CHECK(std::abs(wider.e0 / eig.e0 - 1.0) < 5e-4);
}

TEST_CASE("test function Z") {
    auto grid = RadialGrid::make(reference_grid_spec());
    auto z = test_function_Z(grid);
    for (std::size_t i = 0; i < z.size(); ++i)
        if (grid->r(i) >= kZRadius) CHECK(z[i] == 0.0);
    CHECK(inner_product(ground_state(grid, GroundOrder::LW), z) > 0.0);
    // Every difference quotient up to order four is negligible at the edge.
    const double h = 1e-3;
    for (int k = 1; k <= 4; ++k) {
        double d = 0.0;
        for (int j = 0; j <= k; ++j) d += (j % 2 ? -1 : 1) * std::tgamma(k + 1) / (std::tgamma(j + 1) * std::tgamma(k - j + 1)) *
                                         bump_Z(kZRadius - (j + 0.5) * h);
        CHECK(std::abs(d) / std::pow(h, k) < 1e-6);
    }
}

TEST_CASE("correctors do not depend on the bump beyond its gauge") {
    ProfileOptions opt;
    opt.z_radius = 3.0;
    auto other = ProfileSet::build(opt);
    const auto& p = reference();
    // A differs only by a multiple of LW.
    const auto& g = *p.grid();
    const std::size_t i0 = g.locate(1.0), i1 = g.locate(20.0);
    const double c0 = (other->A()[i0] - p.A()[i0]) / p.LW()[i0];
    const double c1 = (other->A()[i1] - p.A()[i1]) / p.LW()[i1];
    CHECK(c0 == doctest::Approx(c1).epsilon(1e-6));
    CHECK(other->kappa() == p.kappa());
    CHECK(other->e0() == p.e0());
}

TEST_CASE("profile cache round trip") {
    const auto& p = reference();
    const auto path = (std::filesystem::temp_directory_path() / "b5_profile_cache_test.csv").string();
    p.save(path);
    auto q = ProfileSet::load(path, p.options());
    REQUIRE(q);
    CHECK(q->kappa() == p.kappa());
    CHECK(q->e0() == p.e0());
    for (std::size_t i = 0; i < p.A().size(); i += 97) {
        CHECK(q->A()[i] == p.A()[i]);
        CHECK(q->d2B()[i] == p.d2B()[i]);
        CHECK(q->Y()[i] == p.Y()[i]);
    }
    ProfileOptions other = p.options();
    other.grid.cells = 2048;
    CHECK_FALSE(ProfileSet::load(path, other));
    CHECK_FALSE(ProfileSet::load(path + ".missing", p.options()));
    std::remove(path.c_str());
}
