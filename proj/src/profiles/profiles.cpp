#include "profiles/profiles.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss.hpp>

namespace b5 {

GridSpec reference_grid_spec() { return {Spacing::Sinh, 4096, 1.0e5, 0.01}; }

double bump_Z(double r, double radius) {
    const double x = r / radius;
    if (x >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

RadialField test_function_Z(const GridPtr& grid, double radius) {
    return RadialField::sample(grid, [radius](double r) { return bump_Z(r, radius); });
}

RadialField apply_L(const RadialField& g, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("apply_L: lambda must be positive");
    RadialField out = g.laplacian();
    const auto& grid = g.grid();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double pot = nl::df(bubble::W(grid.r(i) / lambda)) / (lambda * lambda);
        out[i] = -out[i] - pot * g[i];
    }
    return out;
}

double compute_kappa(const GridPtr& grid) {
    std::vector<double> num(grid->size()), den(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->r(i);
        const double lw = bubble::LW(r);
        num[i] = lw * nl::df(bubble::W(r));
        den[i] = lw * lw;
    }
    return -grid->integrate_with_tail(num) / grid->integrate_with_tail(den);
}

// ---------------------------------------------------------------------------
// Second solution

namespace {

constexpr int kSeriesTerms = 90;
constexpr double kSeriesRadius = 2.0;

const std::array<double, kSeriesTerms>& series_coeffs() {
    static const std::array<double, kSeriesTerms> a = [] {
        std::array<double, kSeriesTerms> c{};
        std::array<double, kSeriesTerms> v{};
        for (int j = 0; j < kSeriesTerms; ++j) v[j] = 7.0 / 3.0 * (j + 1) * std::pow(-1.0 / 15.0, j);
        c[0] = 1.0;
        for (int k = 1; k < kSeriesTerms; ++k) {
            double acc = 0.0;
            for (int j = 0; j < k; ++j) acc += v[j] * c[k - 1 - j];
            c[k] = -acc / (2.0 * k * (2.0 * k - 3.0));
        }
        return c;
    }();
    return a;
}

struct Flux {
    double y, p;
};

// dy/ds = r_s p / r^4, dp/ds = -r_s r^4 f'(W) y
Flux flux_rhs(const RadialGrid& g, double s, Flux x) {
    const double r = g.r_of_s(s), rs = g.jac_of_s(s);
    const double r4 = r * r * r * r;
    return {rs * x.p / r4, -rs * r4 * nl::df(bubble::W(r)) * x.y};
}

Flux rk4(const RadialGrid& g, double s, double h, Flux x) {
    auto add = [](Flux a, Flux b, double c) { return Flux{a.y + c * b.y, a.p + c * b.p}; };
    const Flux k1 = flux_rhs(g, s, x);
    const Flux k2 = flux_rhs(g, s + 0.5 * h, add(x, k1, 0.5 * h));
    const Flux k3 = flux_rhs(g, s + 0.5 * h, add(x, k2, 0.5 * h));
    const Flux k4 = flux_rhs(g, s + h, add(x, k3, h));
    return {x.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
            x.p + h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
}

}  // namespace

double SecondSolution::series_value(double r) {
    const auto& a = series_coeffs();
    const double x = r * r;
    double acc = 0.0;
    for (int k = kSeriesTerms - 1; k >= 0; --k) acc = acc * x + a[k];
    return -2.0 / 9.0 * acc / (r * x);
}

double SecondSolution::series_slope(double r) {
    const auto& a = series_coeffs();
    const double x = r * r;
    double acc = 0.0;
    for (int k = kSeriesTerms - 1; k >= 0; --k) acc = acc * x + a[k] * (2.0 * k - 3.0);
    return -2.0 / 9.0 * acc / (x * x);
}

double SecondSolution::wronskian(std::size_t i) const {
    const double r = grid->r(i);
    const double r4 = r * r * r * r;
    return r4 * (bubble::LW(r) * slope[i] - bubble::dLW(r) * value[i]);
}

SecondSolution second_solution(const GridPtr& grid, double match_radius) {
    const auto& g = *grid;
    const std::size_t n = g.size(), m = g.last();
    SecondSolution out;
    out.grid = grid;
    out.value.assign(n, 0.0);
    out.slope.assign(n, 0.0);
    out.series_radius = kSeriesRadius;

    std::size_t is = 1;
    for (std::size_t i = 1; i < n && g.r(i) <= kSeriesRadius; ++i) {
        out.value[i] = SecondSolution::series_value(g.r(i));
        out.slope[i] = SecondSolution::series_slope(g.r(i));
        is = i;
    }
    if (is + 1 >= n) return out;

    std::size_t im = m;
    for (std::size_t i = is; i < n; ++i)
        if (g.r(i) >= match_radius) { im = i; break; }

    auto r4 = [&](std::size_t i) { return std::pow(g.r(i), 4); };
    const double h = g.ds();
    Flux x{out.value[is], out.slope[is] * r4(is)};
    for (std::size_t i = is; i < im; ++i) {
        x = rk4(g, i * h, h, x);
        out.value[i + 1] = x.y;
        out.slope[i + 1] = x.p / r4(i + 1);
    }
    if (im >= m) return out;

    // Inward branch from the far end, seeded with the decaying expansion
    // y ~ 1 + 262.5 / r^2 and scaled to unit wronskian.
    const double rm = g.r(m);
    Flux y{1.0 + 262.5 / (rm * rm), -525.0 * rm};
    const double w = rm * rm * rm * rm * (bubble::LW(rm) * y.p / std::pow(rm, 4) - bubble::dLW(rm) * y.y);
    y.y /= w;
    y.p /= w;
    std::vector<Flux> inward(n);
    inward[m] = y;
    for (std::size_t i = m; i > im; --i) {
        y = rk4(g, i * h, -h, y);
        inward[i - 1] = y;
    }
    const double c = (inward[im].y - out.value[im]) / bubble::LW(g.r(im));
    for (std::size_t i = im; i < n; ++i) {
        const double r = g.r(i);
        out.value[i] = inward[i].y - c * bubble::LW(r);
        out.slope[i] = inward[i].p / r4(i) - c * bubble::dLW(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Correctors

namespace {

double corrector_source(CorrectorKind kind, double kappa, double r) {
    if (kind == CorrectorKind::A) return kappa * bubble::LW(r) + nl::df(bubble::W(r));
    return -bubble::L0LW(r);
}

// Running integral of h dr where h is available in closed form inside the
// series region and as node samples beyond it.
std::vector<double> running_integral(const RadialGrid& g, const std::vector<double>& h,
                                     const std::function<double(double)>& exact, double exact_radius) {
    using Quad = boost::math::quadrature::gauss<double, 10>;
    const std::size_t n = g.size(), m = g.last();
    std::vector<double> f(n), c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) f[i] = h[i] * g.jac(i);
    const double k = g.ds() / 24.0;
    for (std::size_t j = 0; j < m; ++j) {
        double cell;
        if (g.r(j + 1) <= exact_radius) {
            cell = Quad::integrate([&](double s) { return exact(g.r_of_s(s)) * g.jac_of_s(s); },
                                   j * g.ds(), (j + 1) * g.ds());
        } else if (j + 1 == m) {
            cell = k * (f[m - 3] - 5.0 * f[m - 2] + 19.0 * f[m - 1] + 9.0 * f[m]);
        } else {
            cell = k * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]);
        }
        c[j + 1] = c[j] + cell;
    }
    return c;
}

}  // namespace

Corrector solve_corrector(CorrectorKind kind, const SecondSolution& gamma, double kappa,
                          const RadialField& z) {
    const auto& grid = gamma.grid;
    const auto& g = *grid;
    const std::size_t n = g.size();
    std::vector<double> h1(n), h2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.r(i);
        const double src = std::pow(r, 4) * corrector_source(kind, kappa, r);
        h1[i] = bubble::LW(r) * src;
        h2[i] = i == 0 ? 0.0 : gamma.value[i] * src;
    }
    auto exact1 = [&](double r) { return bubble::LW(r) * std::pow(r, 4) * corrector_source(kind, kappa, r); };
    auto exact2 = [&](double r) {
        return SecondSolution::series_value(r) * std::pow(r, 4) * corrector_source(kind, kappa, r);
    };
    const auto i1 = running_integral(g, h1, exact1, gamma.series_radius);
    const auto i2 = running_integral(g, h2, exact2, gamma.series_radius);

    // y = -int_0^r s(r, r') g(r') dr' solves -(r^4 y')' + q y = g.
    std::vector<double> y(n, 0.0), dy(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double r = g.r(i);
        y[i] = -(gamma.value[i] * i1[i] - bubble::LW(r) * i2[i]);
        dy[i] = -(gamma.slope[i] * i1[i] - bubble::dLW(r) * i2[i]);
    }
    RadialField raw(grid, y);
    const auto lw = ground_state(grid, GroundOrder::LW);
    const double shift = -inner_product(z, raw) / inner_product(z, lw);

    Corrector out;
    out.shift = shift;
    std::vector<double> d2(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.r(i);
        y[i] += shift * bubble::LW(r);
        dy[i] += shift * bubble::dLW(r);
        rhs[i] = corrector_source(kind, kappa, r);
        const double lap = -nl::df(bubble::W(r)) * y[i] - rhs[i];
        d2[i] = i == 0 ? lap / 5.0 : lap - 4.0 * dy[i] / r;
    }
    out.value = RadialField(grid, y, Parity::Even);
    out.d1 = RadialField(grid, dy, Parity::Odd);
    out.d2 = RadialField(grid, d2, Parity::Even);
    out.rhs = RadialField(grid, rhs, Parity::Even);
    out.far_coeff = y[n - 1] * g.r(n - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Ground eigenpair

Eigenpair ground_eigenpair(const GridPtr& grid, double radius) {
    const auto& g = *grid;
    std::size_t nd = g.last();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.r(i) >= radius) { nd = i; break; }
    if (nd < 8) throw std::invalid_argument("eigen domain too small");
    const long n = static_cast<long>(nd);  // unknowns 0..nd-1; node nd is Dirichlet

    const double ds = g.ds();
    const std::array<double, 5> a{1.0 / (12 * ds), -8.0 / (12 * ds), 0.0, 8.0 / (12 * ds), -1.0 / (12 * ds)};
    const std::array<double, 5> b{-1.0 / (12 * ds * ds), 16.0 / (12 * ds * ds), -30.0 / (12 * ds * ds),
                                  16.0 / (12 * ds * ds), -1.0 / (12 * ds * ds)};
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> pot(n);
    for (long i = 0; i < n; ++i) {
        const double r = g.r(i), rs = g.jac(i), rss = g.jac2(i);
        pot[i] = nl::df(bubble::W(r));
        for (int k = 0; k < 5; ++k) {
            double c;
            if (i == 0)
                c = 5.0 * b[k] / (rs * rs);
            else
                c = (b[k] - rss / rs * a[k]) / (rs * rs) + 4.0 * a[k] / (rs * r);
            long j = i + k - 2;
            double sign = 1.0;
            if (j < 0) j = -j;
            if (j == n) continue;
            if (j == n + 1) { j = n - 1; sign = -1.0; }
            trip.emplace_back(i, j, -sign * c);
        }
        trip.emplace_back(i, i, -pot[i]);
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();

    const auto& w = g.weights();
    auto wdot = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        double acc = 0.0;
        for (long i = 0; i < n; ++i) acc += w[i] * x[i] * y[i];
        return acc;
    };
    Eigen::VectorXd x(n);
    for (long i = 0; i < n; ++i) x[i] = bubble::W(g.r(i)) * bubble::W(g.r(i));
    x /= std::sqrt(wdot(x, x));

    double sigma = -7.0 / 3.0 - 0.1, mu = sigma;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    int iters = 0;
    double res = 1.0;
    auto refactor = [&](double s) {
        Eigen::SparseMatrix<double> M = L - s * I;
        lu.compute(M);
        if (lu.info() != Eigen::Success) throw std::runtime_error("eigen solve: factorization failed");
    };
    refactor(sigma);
    for (int stage = 0; stage < 2; ++stage) {
        for (int k = 0; k < 400; ++k) {
            Eigen::VectorXd y = lu.solve(x);
            ++iters;
            y /= std::sqrt(wdot(y, y));
            if (y.dot(x) < 0) y = -y;
            const Eigen::VectorXd ly = L * y;
            mu = wdot(y, ly);
            const Eigen::VectorXd rv = ly - mu * y;
            res = std::sqrt(wdot(rv, rv));
            x = y;
            if (res < 1e-11) break;
            if (stage == 0 && res < 1e-4) break;
        }
        if (res < 1e-11) break;
        refactor(mu - 1e-6);
    }
    if (mu >= 0.0) throw std::runtime_error("eigen solve: lowest eigenvalue is nonnegative");

    std::vector<double> yv(g.size(), 0.0);
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += x[i];
    const double sign = s >= 0 ? 1.0 : -1.0;
    for (long i = 0; i < n; ++i) yv[i] = sign * x[i];
    RadialField Y(grid, yv);
    Y *= 1.0 / norm(Y, NormKind::L2);

    Eigenpair out;
    out.eigenvalue = mu;
    out.e0 = std::sqrt(-mu);
    out.Y = std::move(Y);
    out.residual = res * std::sqrt(kSphereArea);
    out.iterations = iters;
    return out;
}

// ---------------------------------------------------------------------------
// ProfileSet

void ProfileSet::finish() {
    dY_ = Y_.derivative();
    const std::size_t m = grid_->last();
    farA_ = A_[m] * grid_->r(m);
    farB_ = B_[m] * grid_->r(m);
}

std::shared_ptr<const ProfileSet> ProfileSet::build(const ProfileOptions& opt) {
    auto p = std::make_shared<ProfileSet>();
    p->opt_ = opt;
    p->grid_ = RadialGrid::make(opt.grid);
    const auto& grid = p->grid_;
    p->W_ = ground_state(grid, GroundOrder::W);
    p->LW_ = ground_state(grid, GroundOrder::LW);
    p->L0LW_ = ground_state(grid, GroundOrder::L0LW);
    p->Z_ = test_function_Z(grid, opt.z_radius);
    p->kappa_ = compute_kappa(grid);
    const auto gamma = second_solution(grid);
    auto a = solve_corrector(CorrectorKind::A, gamma, p->kappa_, p->Z_);
    auto b = solve_corrector(CorrectorKind::B, gamma, p->kappa_, p->Z_);
    p->A_ = a.value; p->dA_ = a.d1; p->d2A_ = a.d2;
    p->B_ = b.value; p->dB_ = b.d1; p->d2B_ = b.d2;
    auto eig = ground_eigenpair(grid, opt.eigen_radius);
    p->e0_ = eig.e0;
    p->Y_ = eig.Y;
    p->finish();
    return p;
}

std::string ProfileSet::key() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "|z=%.17g|eig=%.17g", opt_.z_radius, opt_.eigen_radius);
    return opt_.grid.key() + buf;
}

namespace {
constexpr const char* kCacheMagic = "# blowup5d profile cache";
constexpr int kCacheVersion = 1;
}  // namespace

void ProfileSet::save(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write profile cache: " + path);
    std::fprintf(f, "%s\n# version %d\n# key %s\n# kappa %.17g\n# e0 %.17g\n", kCacheMagic,
                 kCacheVersion, key().c_str(), kappa_, e0_);
    std::fprintf(f, "r,W,LW,L0LW,A,dA,d2A,B,dB,d2B,Y,Z\n");
    for (std::size_t i = 0; i < grid_->size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     grid_->r(i), W_[i], LW_[i], L0LW_[i], A_[i], dA_[i], d2A_[i], B_[i], dB_[i],
                     d2B_[i], Y_[i], Z_[i]);
    std::fclose(f);
}

std::shared_ptr<const ProfileSet> ProfileSet::load(const std::string& path, const ProfileOptions& opt) {
    std::ifstream in(path);
    if (!in) return nullptr;
    auto p = std::make_shared<ProfileSet>();
    p->opt_ = opt;
    std::string line;
    std::getline(in, line);
    if (line != kCacheMagic) return nullptr;
    int version = 0;
    std::string key;
    while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
        std::istringstream ls(line.substr(2));
        std::string tag;
        ls >> tag;
        if (tag == "version") ls >> version;
        else if (tag == "key") ls >> key;
        else if (tag == "kappa") ls >> p->kappa_;
        else if (tag == "e0") ls >> p->e0_;
    }
    if (version != kCacheVersion || key != p->key()) return nullptr;
    p->grid_ = RadialGrid::make(opt.grid);
    const std::size_t n = p->grid_->size();
    std::array<std::vector<double>, 12> col;
    for (auto& c : col) c.reserve(n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        for (int k = 0; k < 12; ++k) {
            if (!std::getline(ls, cell, ',')) return nullptr;
            col[k].push_back(std::strtod(cell.c_str(), nullptr));
        }
    }
    if (col[0].size() != n) return nullptr;
    auto field = [&](int k, Parity par) { return RadialField(p->grid_, col[k], par); };
    p->W_ = field(1, Parity::Even);
    p->LW_ = field(2, Parity::Even);
    p->L0LW_ = field(3, Parity::Even);
    p->A_ = field(4, Parity::Even);
    p->dA_ = field(5, Parity::Odd);
    p->d2A_ = field(6, Parity::Even);
    p->B_ = field(7, Parity::Even);
    p->dB_ = field(8, Parity::Odd);
    p->d2B_ = field(9, Parity::Even);
    p->Y_ = field(10, Parity::Even);
    p->Z_ = field(11, Parity::Even);
    p->finish();
    return p;
}

std::shared_ptr<const ProfileSet> ProfileSet::cached(const std::string& path, const ProfileOptions& opt) {
    if (!path.empty())
        if (auto p = load(path, opt)) return p;
    auto p = build(opt);
    if (!path.empty()) p->save(path);
    return p;
}

namespace {

RadialField combine(const RadialField& v, const RadialField& d, const RadialField* d2, double c0,
                    double c1, double c2) {
    RadialField out = v;
    const auto& g = v.grid();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = g.r(i);
        out[i] = c0 * v[i] + c1 * r * d[i] + (d2 ? c2 * r * r * (*d2)[i] : 0.0);
    }
    return out;
}

}  // namespace

RadialField ProfileSet::LA() const { return combine(A_, dA_, nullptr, 1.5, 1.0, 0.0); }
RadialField ProfileSet::LB() const { return combine(B_, dB_, nullptr, 1.5, 1.0, 0.0); }
RadialField ProfileSet::L0A() const { return combine(A_, dA_, nullptr, 2.5, 1.0, 0.0); }
RadialField ProfileSet::L0B() const { return combine(B_, dB_, nullptr, 2.5, 1.0, 0.0); }
RadialField ProfileSet::L0LA() const { return combine(A_, dA_, &d2A_, 3.75, 5.0, 1.0); }
RadialField ProfileSet::L0LB() const { return combine(B_, dB_, &d2B_, 3.75, 5.0, 1.0); }

ProfileSet::Sample ProfileSet::hermite(const RadialField& v, const RadialField& d, double far,
                                       double rho) const {
    const auto& g = *grid_;
    if (rho < 0.0) rho = -rho;
    if (rho >= g.r(g.last())) return {far / rho, -far / (rho * rho), 0.0};
    const std::size_t j = g.locate(rho);
    const double h = g.r(j + 1) - g.r(j);
    const double t = (rho - g.r(j)) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1, d01 = (-6 * t2 + 6 * t) / h,
                 d11 = 3 * t2 - 2 * t;
    Sample s;
    s.value = h00 * v[j] + h10 * h * d[j] + h01 * v[j + 1] + h11 * h * d[j + 1];
    s.slope = d00 * v[j] + d10 * d[j] + d01 * v[j + 1] + d11 * d[j + 1];
    return s;
}

ProfileSet::Sample ProfileSet::A_at(double rho) const {
    Sample s = hermite(A_, dA_, farA_, rho);
    const double w = bubble::W(rho);
    s.lap = -nl::df(w) * s.value - kappa_ * bubble::LW(rho) - nl::df(w);
    return s;
}

ProfileSet::Sample ProfileSet::B_at(double rho) const {
    Sample s = hermite(B_, dB_, farB_, rho);
    s.lap = -nl::df(bubble::W(rho)) * s.value + bubble::L0LW(rho);
    return s;
}

double ProfileSet::Y_at(double rho) const {
    const auto& g = *grid_;
    if (rho >= g.r(g.last())) return 0.0;
    return hermite(Y_, dY_, 0.0, rho).value;
}

}  // namespace b5
