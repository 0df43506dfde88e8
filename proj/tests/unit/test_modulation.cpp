#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "modulation/modulation.hpp"

using namespace b5;

namespace {

constexpr double kE0 = 0.6180768783;

ModModel nondeg_model(double u0, double e0 = kE0) {
    ModModel m;
    m.mode = RegimeMode::non_degenerate(u0);
    m.e0 = e0;
    return m;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

// Phi(t) = int_{t1}^t e0 / lambda_app.
double phi_app(double t1, double t, const ModModel& m) {
    const double c = m.kappa * m.kappa * m.mode.ustar_center * m.mode.ustar_center / 144.0;
    return m.e0 / (3.0 * c) * (std::pow(t1, -3) - std::pow(t, -3));
}

}  // namespace

TEST_CASE("regime constants") {
    CHECK_THROWS(RegimeMode::non_degenerate(0.0).validate());
    CHECK_THROWS(RegimeMode::degenerate(-1.0).validate());
    CHECK_NOTHROW(RegimeMode::degenerate(5.0).validate());
    CHECK(RegimeMode::degenerate(5.0).warnings().size() == 1);
    CHECK(RegimeMode::degenerate(9.0).warnings().empty());
    const auto nd = RegimeMode::non_degenerate(2.0);
    CHECK(nd.gamma() == 3.5);
    CHECK(nd.nu_eff() == 3.0);
    const auto d = RegimeMode::degenerate(9.0);
    CHECK(d.gamma() == doctest::Approx(10.5 - 7.0 / 3.0));
    CHECK(d.beta() == 3.0);
    CHECK(d.q() == doctest::Approx(90.0 / kKappaExact));
    CHECK(RegimeMode::degenerate(3.0).nu_tilde() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("formal right-hand side") {
    const double u0 = 1.7, k = kKappaExact * kKappaExact * u0 * u0;
    for (double t : {0.01, 0.2, 0.9}) {
        const auto r = formal_rhs(t, k * std::pow(t, 4) / 144.0, k * std::pow(t, 3) / 36.0, u0);
        CHECK(close(r.dlambda, k * std::pow(t, 3) / 36.0, 1e-12));
        CHECK(close(r.db, k * t * t / 12.0, 1e-12));
    }
    const auto mode = RegimeMode::degenerate(9.0);
    for (double t : {0.05, 0.3}) {
        const double nu = mode.nu;
        const auto r = formal_rhs(t, std::pow(t, 1 + nu), (1 + nu) * std::pow(t, nu), mode.q() * std::pow(t, mode.beta()));
        CHECK(close(r.dlambda, (1 + nu) * std::pow(t, nu), 1e-12));
        CHECK(close(r.db, nu * (1 + nu) * std::pow(t, nu - 1), 1e-12));
    }
    CHECK(formal_rhs(0.1, 0.0, 0.3, 2.0).db == 0.0);
    CHECK_THROWS(formal_rhs(0.1, -1e-9, 0.3, 2.0));
}

TEST_CASE("approximate trajectories") {
    const double c = 32.0 / (315.0 * std::numbers::pi);
    CHECK(std::abs(kKappaExact * kKappaExact / 144.0 - c * c) < 1e-12 * c * c);
    const auto nd = RegimeMode::non_degenerate(3.0);
    CHECK(close(app_trajectory(0.2, nd).lambda, c * c * 9.0 * std::pow(0.2, 4), 1e-12));
    const auto d = RegimeMode::degenerate(9.0);
    const auto p = app_trajectory(0.1, d);
    CHECK(close(p.lambda, 1e-10, 1e-12));
    CHECK(close(p.b, 10.0 * 1e-9, 1e-12));
    for (double t : {0.01, 0.1, 0.4}) {
        const auto a = app_trajectory(t, nd), b = app_trajectory(t, d);
        CHECK(lyapunov_l(t, a.lambda, a.b, nd) < 1e-24);
        CHECK(lyapunov_l(t, b.lambda, b.b, d) < 1e-20);
    }
}

TEST_CASE("lyapunov function") {
    const auto d3 = RegimeMode::degenerate(3.0);
    const double nt = d3.nu_tilde();
    CHECK(close(3.0 + nt + 1.0, 6.0, 1e-14));
    CHECK(close(3.0 - nt, 1.0, 1e-14));

    const auto nd = RegimeMode::non_degenerate(2.0);
    const double t = 0.2;
    const auto a = app_trajectory(t, nd);
    const double l1 = lyapunov_l(t, a.lambda * (1 + 1e-4), a.b, nd);
    const double l2 = lyapunov_l(t, a.lambda * (1 + 2e-4), a.b, nd);
    CHECK(l1 > 0.0);
    CHECK(l2 / l1 == doctest::Approx(4.0).epsilon(1e-6));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (const auto& mode : {nd, RegimeMode::degenerate(9.0), RegimeMode::degenerate(12.5)}) {
        for (int k = 0; k < 50; ++k) {
            const double tt = 0.05 + 0.5 * std::abs(u(rng));
            const auto ap = app_trajectory(tt, mode);
            const double lam = ap.lambda * (1 + u(rng)), b = ap.b * (1 + u(rng));
            CHECK(lyapunov_l(tt, lam, b, mode) >= 0.0);
            const double exact = lyapunov_rate(tt, lam, b, b, linearized_bt(tt, lam, mode), mode);
            const double simple = lyapunov_rate_linearized(tt, lam, b, mode);
            CHECK(std::abs(exact - simple) <= 1e-12 * (std::abs(simple) + lyapunov_l(tt, lam, b, mode) / tt));
        }
    }
}

TEST_CASE("l decreases on the boundary of the cylinder") {
    for (const auto& mode : {RegimeMode::non_degenerate(5.0), RegimeMode::degenerate(9.0)}) {
        for (double t : mode.degenerate_kind() ? std::vector<double>{1e-8, 1e-6} : std::vector<double>{1e-4, 1e-3}) {
            const double bound = std::pow(t, mode.l_exponent());
            const double p = mode.nu_eff();
            for (int k = 0; k < 16; ++k) {
                const double th = 2 * std::numbers::pi * k / 16;
                const double X = std::sqrt(2 * bound) * std::cos(th), Y = std::sqrt(2 * bound) * std::sin(th);
                const auto [x0, y0] = lyapunov_terms(t, 0.0, 0.0, mode);
                // Solve for (B, L) = (b / t^p, lambda / t^{p+1}) from X, Y.
                const auto [xb, yb] = lyapunov_terms(t, 0.0, std::pow(t, p), mode);
                const auto [xl, yl] = lyapunov_terms(t, std::pow(t, p + 1), 0.0, mode);
                const double a11 = xb - x0, a12 = xl - x0, a21 = yb - y0, a22 = yl - y0;
                const double det = a11 * a22 - a12 * a21;
                const double B = ((X - x0) * a22 - a12 * (Y - y0)) / det;
                const double L = (a11 * (Y - y0) - a21 * (X - x0)) / det;
                const double b = B * std::pow(t, p), lam = L * std::pow(t, p + 1);
                REQUIRE(lam > 0.0);
                CHECK(lyapunov_l(t, lam, b, mode) == doctest::Approx(bound).epsilon(1e-8));
                ModModel m;
                m.mode = mode;
                const auto r = formal_rhs(t, lam, b, m.vstar_at(t));
                CHECK(lyapunov_rate(t, lam, b, r.dlambda, r.db, mode) < 0.0);
            }
        }
    }
}

TEST_CASE("cylinder membership") {
    const auto mode = RegimeMode::non_degenerate(5.0);
    for (double t : {0.01, 0.1, 0.3}) {
        const auto a = app_trajectory(t, mode);
        ModState s{t, a.lambda, a.b, 0.0, 0.0};
        CHECK(cylinder_contains(s, mode));
        s.alpha_plus = 2 * std::pow(t, mode.gamma() + 1);
        auto st = cylinder_check(s, mode);
        CHECK_FALSE(st.inside);
        CHECK(st.face == Face::AlphaPlusUpper);
        s.alpha_plus = 0.0;
        s.alpha_minus = -1.5 * std::pow(t, mode.gamma() + 1);
        CHECK(cylinder_check(s, mode).face == Face::AlphaMinusLower);
    }
    // l exactly on the bound: move lambda along the direction where only X changes.
    const double t = 0.1;
    const auto a = app_trajectory(t, mode);
    const double bound = std::pow(t, mode.l_exponent());
    // X = B + 2L - k/24, Y = B - 3L - k/144: dB = 3 dL keeps Y = 0, X changes by 5 dL.
    const double dL = std::sqrt(2 * bound) / 5.0;
    ModState s{t, a.lambda + dL * std::pow(t, 4), a.b + 3 * dL * std::pow(t, 3), 0.0, 0.0};
    const auto st = cylinder_check(s, mode);
    CHECK(st.contact);
    CHECK(st.inside);
    CHECK(st.face == Face::L);
    s.lambda *= 1.01;
    s.b *= 1.01;
    CHECK_FALSE(cylinder_check(s, mode).inside);
}

TEST_CASE("integrate_mod with zero forcing") {
    const auto m = nondeg_model(5.0);
    const double t1 = 0.3, t0 = 0.5;
    const auto app = app_trajectory(t1, m.mode);
    const double a = 1e-120;
    ModOptions opt;
    opt.stop_on_exit = false;
    const auto tr = integrate_mod({t1, app.lambda, app.b, 1e-6, a}, t0, m, opt);
    REQUIRE(tr.samples.size() > 3);
    double prev_am = 1e-6;
    for (const auto& s : tr.samples) {
        const auto ap = app_trajectory(s.t, m.mode);
        CHECK(close(s.lambda, ap.lambda, 1e-8));
        CHECK(close(s.b, ap.b, 1e-8));
        CHECK(close(s.alpha_plus, a * std::exp(phi_app(t1, s.t, m)), 1e-6));
        CHECK(s.alpha_minus <= prev_am);
        CHECK(s.alpha_minus > 0.0);
        prev_am = s.alpha_minus;
    }
    CHECK(close(tr.phi, phi_app(t1, t0, m), 1e-7));
    CHECK(tr.samples.back().t == t0);

    // Backward integration returns the start.
    const auto& end = tr.samples.back();
    const auto back = integrate_mod({end.t, end.lambda, end.b, 0.0, end.alpha_plus}, t1, m, opt);
    CHECK(back.samples.back().t == t1);
    CHECK(close(back.samples.back().lambda, app.lambda, 1e-8));
    CHECK(close(back.samples.back().alpha_plus, a, 1e-6));
}

TEST_CASE("perturbed parameters relax toward the approximate trajectory") {
    const auto m = nondeg_model(5.0);
    const double t1 = 0.05;
    const auto app = app_trajectory(t1, m.mode);
    ModOptions opt;
    opt.stop_on_exit = false;
    const auto tr = integrate_mod({t1, app.lambda * 1.02, app.b * 0.99, 0.0, 0.0}, 0.5, m, opt);
    double prev = 1e300;
    for (const auto& s : tr.samples) {
        const double l = lyapunov_l(s.t, s.lambda, s.b, m.mode);
        CHECK(l <= prev);
        prev = l;
    }
    const auto& f = tr.samples.front();
    const auto& e = tr.samples.back();
    const auto a0 = app_trajectory(f.t, m.mode), a1 = app_trajectory(e.t, m.mode);
    CHECK(std::abs(e.lambda / a1.lambda - 1.0) < 0.2 * std::abs(f.lambda / a0.lambda - 1.0));
}

TEST_CASE("exit through the same-sign face") {
    const auto m = nondeg_model(5.0);
    const double t1 = 0.3;
    const auto app = app_trajectory(t1, m.mode);
    for (double sign : {1.0, -1.0}) {
        const double a = sign * 0.55 * std::pow(t1, m.mode.gamma() + 1);
        auto mm = m;
        mm.forcing = [sign](double t) { return -sign * 0.3 * std::pow(t, 3.5); };
        const auto tr = integrate_mod({t1, app.lambda, app.b, 0.0, a}, 0.5, mm);
        CHECK(tr.exited);
        CHECK(tr.exit_face == (sign > 0 ? Face::AlphaPlusUpper : Face::AlphaPlusLower));
        const auto& s = tr.samples.back();
        CHECK(std::abs(std::abs(s.alpha_plus) / std::pow(s.t, m.mode.gamma() + 1) - 1.0) < 1e-9);
    }
}

TEST_CASE("shooting") {
    const auto m = nondeg_model(5.0);
    const double t1 = 0.3, t0 = 0.5;
    const double tol = 1e-12;
    const auto r0 = shoot_unstable(t1, t0, m, tol);
    CHECK(r0.trapped);
    CHECK(std::abs(r0.a) <= tol);

    auto mc = m;
    const double c = 0.05;
    mc.forcing = [c](double) { return c; };
    const auto r = shoot_unstable(t1, t0, mc, tol);
    const double bracket = 4.0 / 3.0 * std::pow(t1, m.mode.gamma() + 1);
    CHECK(r.iterations <= std::log2(bracket / tol) + 2);
    CHECK(r.hi - r.lo <= tol * 1.0000001);

    // Oracle: a* = -c int e^{-Phi}.
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    const double integral = gk.integrate([&](double s) { return std::exp(-phi_app(t1, s, m)); }, t1, t0);
    CHECK(close(r.a, -c * integral, 1e-6));

    // Brute-force scan over 1000 seeds.
    double last_minus = -1e300, first_plus = 1e300;
    for (int k = 0; k <= 1000; ++k) {
        const double a = -bracket / 2 + bracket * k / 1000.0;
        const auto app = app_trajectory(t1, m.mode);
        const int cl = classify_exit(integrate_mod({t1, app.lambda, app.b, 0.0, a}, t0, mc));
        if (cl < 0) last_minus = std::max(last_minus, a);
        if (cl > 0) first_plus = std::min(first_plus, a);
    }
    CHECK(last_minus < first_plus);
    CHECK(r.a > last_minus);
    CHECK(r.a < first_plus);

    auto big = m;
    big.forcing = [](double) { return 100.0; };
    CHECK_THROWS_AS(shoot_unstable(t1, t0, big, tol), ModulationError);
    CHECK_THROWS(shoot_unstable(t0, t1, m, tol));
}

TEST_CASE("trajectory csv") {
    const auto m = nondeg_model(5.0);
    const auto app = app_trajectory(0.3, m.mode);
    const auto tr = integrate_mod({0.3, app.lambda, app.b, 0.0, 0.0}, 0.4, m);
    const auto path = (std::filesystem::temp_directory_path() / "b5_traj_test.csv").string();
    write_trajectory_csv(path, tr, m.mode);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,lambda,b,alpha_minus,alpha_plus,l,in_cylinder");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == static_cast<int>(tr.samples.size()));
    std::filesystem::remove(path);
}
