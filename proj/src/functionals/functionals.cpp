#include "functionals/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include "json.hpp"

namespace b5 {

VirialWeight::VirialWeight(double R) : R_(R) {
    if (!(R > 0.0)) throw std::invalid_argument("virial weight radius must be positive");
}

double VirialWeight::eval(double r, WeightOrder order) const {
    if (r < 0.0) throw std::invalid_argument("virial weight needs r >= 0");
    const double R = R_;
    if (r <= R) {
        switch (order) {
            case WeightOrder::Value: return 0.5 * r * r;
            case WeightOrder::D1: return r;
            case WeightOrder::D2: return 1.0;
            case WeightOrder::D3: return 0.0;
            case WeightOrder::Lap: return 5.0;
            case WeightOrder::BiLap: return 0.0;
        }
    }
    const double q = R / r, q2 = q * q, q3 = q2 * q, q5 = q3 * q2;
    switch (order) {
        case WeightOrder::Value:
            return R * R * (15.0 / 8.0 / q - 2.5 + 1.25 * q - 0.125 * q3);
        case WeightOrder::D1: return R * (15.0 / 8.0 - 1.25 * q2 + 0.375 * q2 * q2);
        case WeightOrder::D2: return 2.5 * q3 - 1.5 * q5;
        case WeightOrder::D3: return (-7.5 * q3 + 7.5 * q5) / r;
        case WeightOrder::Lap: return 7.5 * q - 2.5 * q3;
        case WeightOrder::BiLap: return -15.0 * R / (r * r * r);
    }
    return 0.0;
}

double virial_weight(double r, double R, WeightOrder order) { return VirialWeight(R).eval(r, order); }

namespace {

void require_grid(const RadialField& a, const RadialField& b) { require_same_grid(a, b); }

double sphere_integral(const RadialGrid& g, const std::vector<double>& h) { return kSphereArea * g.integrate(h); }

}  // namespace

double functional_I(const StatePair& eps, const RadialField& phi0) {
    require_grid(eps.position, eps.velocity);
    require_grid(eps.position, phi0);
    const auto& g = eps.grid();
    const auto d0 = g.d_dr(eps.position.values(), Parity::Even);
    std::vector<double> h(g.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double e1 = eps.velocity[i];
        h[i] = 0.5 * e1 * e1 + 0.5 * d0[i] * d0[i] - nl::F_remainder(phi0[i], eps.position[i]);
    }
    return sphere_integral(g, h);
}

double functional_J(const StatePair& eps, double lambda, double b, double R) {
    require_grid(eps.position, eps.velocity);
    if (b == 0.0) return 0.0;
    const VirialWeight a(R);
    const auto& g = eps.grid();
    const auto d0 = g.d_dr(eps.position.values(), Parity::Even);
    std::vector<double> h(g.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double rho = g.r(i) / lambda;
        h[i] = eps.velocity[i] * (0.5 / lambda * a.lap(rho) * eps.position[i] + a.d1(rho) * d0[i]);
    }
    return b * sphere_integral(g, h);
}

double weighted_grad_norm(const RadialField& eps0, double lambda, double R) {
    const VirialWeight a(R);
    const auto& g = eps0.grid();
    const auto d0 = g.d_dr(eps0.values(), Parity::Even);
    std::vector<double> h(g.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = a.d2(g.r(i) / lambda) * d0[i] * d0[i];
    return sphere_integral(g, h);
}

PohozaevResult pohozaev_check(const RadialField& eps0, double lambda, double R) {
    const auto& g = eps0.grid();
    const auto& v = eps0.values();
    const std::size_t n = g.size();
    double peak = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < n; ++i) {
        peak = std::max(peak, std::abs(v[i]));
        if (v[i] != 0.0) support = i;
    }
    PohozaevResult out;
    if (peak == 0.0) return out;
    for (std::size_t i = n - 4; i < n; ++i)
        if (std::abs(v[i]) > 1e-14 * peak) throw std::invalid_argument("field support reaches the grid edge");

    const VirialWeight a(R);
    const auto d1 = g.d_dr(v, Parity::Even);
    const auto lap = g.laplacian(v, Parity::Even);
    const double split = R * lambda;
    const std::size_t last_cell = std::min(n - 2, support + 3);
    using Gauss = boost::math::quadrature::gauss<double, 8>;

    double lhs = 0.0, grad = 0.0, bilap = 0.0;
    auto piece = [&](double lo, double hi) {
        auto lhs_f = [&](double r) {
            const double rho = r / lambda;
            const double e = g.lagrange(v, r, Parity::Even);
            const double de = g.lagrange(d1, r, Parity::Odd);
            const double le = g.lagrange(lap, r, Parity::Even);
            return (0.5 / lambda * a.lap(rho) * e + a.d1(rho) * de) * le * std::pow(r, 4);
        };
        auto grad_f = [&](double r) {
            const double de = g.lagrange(d1, r, Parity::Odd);
            return a.d2(r / lambda) * de * de * std::pow(r, 4);
        };
        auto bilap_f = [&](double r) {
            const double e = g.lagrange(v, r, Parity::Even);
            return a.bilap(r / lambda) * e * e * std::pow(r, 4);
        };
        lhs += Gauss::integrate(lhs_f, lo, hi);
        grad += Gauss::integrate(grad_f, lo, hi);
        bilap += Gauss::integrate(bilap_f, lo, hi);
    };
    for (std::size_t j = 0; j <= last_cell; ++j) {
        const double lo = g.r(j), hi = g.r(j + 1);
        if (split > lo && split < hi) {
            piece(lo, split);
            piece(split, hi);
        } else {
            piece(lo, hi);
        }
    }
    out.lhs = kSphereArea * lhs;
    out.rhs = kSphereArea * (-grad / lambda + bilap / (4.0 * lambda * lambda * lambda));
    const double diff = std::abs(out.lhs - out.rhs);
    out.residual = out.rhs != 0.0 ? diff / std::abs(out.rhs) : diff;
    return out;
}

GridSpec pohozaev_grid_spec(double lambda, int cells) {
    return {Spacing::Sinh, cells, 1e5 * lambda, 0.005 * lambda};
}

RadialField random_smooth_field(const GridPtr& grid, double scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto bump = [](double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; };
    const double c1 = 1.5 * scale * u(rng), w1 = (0.5 + u(rng)) * scale, a1 = 2.0 * u(rng) - 1.0;
    const double c2 = scale * u(rng), w2 = (0.5 + u(rng)) * scale, a2 = 2.0 * u(rng) - 1.0;
    return RadialField::sample(grid, [=](double r) {
        return a1 * bump((r - c1) / w1) + a2 * bump((r - c2) / w2) + bump(r / (2.0 * scale));
    });
}

RadialField project_ball(const RadialField& g, double R) {
    const auto& grid = g.grid();
    if (!(R > 0.0)) throw std::invalid_argument("projection radius must be positive");
    const std::size_t n = grid.size();
    std::size_t inner = 0;
    while (inner + 1 < n && grid.r(inner + 1) <= R) ++inner;
    // One-sided cubic through the last inner nodes, so the projection is exact.
    const std::size_t lo = inner >= 3 ? inner - 3 : 0;
    double gR = 0.0;
    for (std::size_t i = lo; i <= inner; ++i) {
        double l = 1.0;
        for (std::size_t k = lo; k <= inner; ++k)
            if (k != i) l *= (R - grid.r(k)) / (grid.r(i) - grid.r(k));
        gR += l * g[i];
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i <= inner; ++i) out[i] = g[i] - gR;
    return RadialField(g.grid_ptr(), std::move(out), Parity::Even);
}

const char* constraints_name(Constraints c) {
    switch (c) {
        case Constraints::None: return "none";
        case Constraints::Y: return "Y";
        case Constraints::YZ: return "Y_and_Z";
    }
    return "none";
}

double ModalBasis::mode_value(double x) {
    if (std::abs(x) < 0.05) {
        const double x2 = x * x;
        return 1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0;
    }
    return (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

double ModalBasis::mode_slope(double x) {
    if (std::abs(x) < 0.05) {
        const double x2 = x * x;
        return -x / 15.0 + x * x2 / 210.0 - x * x2 * x2 / 7560.0;
    }
    const double x2 = x * x;
    return std::sin(x) / x2 - 3.0 * (std::sin(x) - x * std::cos(x)) / (x2 * x2);
}

std::vector<double> ModalBasis::roots(int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    auto fn = [](double x) { return std::sin(x) - x * std::cos(x); };
    for (int k = 1; k <= n; ++k) {
        const double lo = k * kPi, hi = k * kPi + 0.5 * kPi;
        std::uintmax_t iters = 200;
        auto br = boost::math::tools::toms748_solve(fn, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
        out.push_back(0.5 * (br.first + br.second));
    }
    return out;
}

namespace {

// Weighted Gram matrix sum_k w_k a_ki b_kj, including the sphere area.
Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const Eigen::MatrixXd& b) {
    return kSphereArea * (a.transpose() * (w.asDiagonal() * b));
}

Eigen::VectorXd weights_of(const RadialGrid& g) {
    const auto& w = g.weights();
    return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

}  // namespace

ModalBasis::ModalBasis(const ProfileSet&, const ModalOptions& opt) : opt_(opt) {
    if (opt.modes < 1 || opt.cells < 16 || !(opt.radius > 0.0) || !(opt.lambda > 0.0))
        throw std::invalid_argument("invalid modal basis options");
    const double lambda = opt.lambda;
    grid_ = RadialGrid::make({Spacing::Uniform, opt.cells, opt.radius * lambda, 0.0});
    const auto rt = roots(opt.modes);
    const Eigen::Index n = static_cast<Eigen::Index>(grid_->size()), m = opt.modes;
    U_.resize(n, m);
    dU_.resize(n, m);
    mu_.resize(static_cast<std::size_t>(m));
    scale_.resize(static_cast<std::size_t>(m));
    const Eigen::VectorXd w = weights_of(*grid_);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mu = rt[static_cast<std::size_t>(j)] / (opt.radius * lambda);
        mu_[static_cast<std::size_t>(j)] = mu;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = mu * grid_->r(static_cast<std::size_t>(i));
            U_(i, j) = mode_value(x);
            dU_(i, j) = mu * mode_slope(x);
        }
        const double kii = kSphereArea * dU_.col(j).cwiseAbs2().dot(w);
        const double s = 1.0 / std::sqrt(kii);
        scale_[static_cast<std::size_t>(j)] = s;
        U_.col(j) *= s;
        dU_.col(j) *= s;
    }
    K_ = gram(dU_, w, dU_);
    M_ = gram(U_, w, U_);
    Eigen::VectorXd wv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = grid_->r(static_cast<std::size_t>(i)) / lambda;
        wv(i) = w(i) * nl::df(bubble::W(rho)) / (lambda * lambda);
    }
    V_ = gram(U_, wv, U_);
}

Eigen::MatrixXd ModalBasis::stiffness_inside(double R) const {
    if (R >= opt_.radius) return K_;
    if (!(R > 0.0)) throw std::invalid_argument("inner radius must be positive");
    const int cells = std::max(64, static_cast<int>(std::ceil(opt_.cells * R / opt_.radius)));
    auto inner = RadialGrid::make({Spacing::Uniform, cells, R * opt_.lambda, 0.0});
    const Eigen::Index n = static_cast<Eigen::Index>(inner->size()), m = size();
    Eigen::MatrixXd d(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mu = mu_[static_cast<std::size_t>(j)];
        const double s = scale_[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < n; ++i) d(i, j) = s * mu * mode_slope(mu * inner->r(static_cast<std::size_t>(i)));
    }
    return gram(d, weights_of(*inner), d);
}

Eigen::MatrixXd ModalBasis::virial_form(double R) const {
    const VirialWeight a(R);
    const double lambda = opt_.lambda;
    const Eigen::Index n = U_.rows();
    Eigen::MatrixXd op(n, size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = grid_->r(static_cast<std::size_t>(i)) / lambda;
        op.row(i) = 0.5 / lambda * a.lap(rho) * U_.row(i) + a.d1(rho) * dU_.row(i);
    }
    return gram(U_, weights_of(*grid_), op);
}

Eigen::VectorXd ModalBasis::project(const std::function<double(double)>& g) const {
    const Eigen::Index n = U_.rows();
    Eigen::VectorXd gv(n);
    for (Eigen::Index i = 0; i < n; ++i) gv(i) = g(grid_->r(static_cast<std::size_t>(i)) / opt_.lambda);
    const Eigen::VectorXd w = weights_of(*grid_);
    return kSphereArea * (U_.transpose() * w.cwiseProduct(gv));
}

Eigen::MatrixXd ModalBasis::constraint_rows(const ProfileSet& prof, Constraints c) const {
    const int rows = c == Constraints::None ? 0 : c == Constraints::Y ? 1 : 2;
    Eigen::MatrixXd out(rows, size());
    if (rows >= 1) out.row(0) = project([&](double rho) { return prof.Y_at(rho); }).transpose();
    if (rows >= 2) out.row(1) = project([&](double rho) { return prof.Z_at(rho); }).transpose();
    return out;
}

RadialField ModalBasis::field(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != size()) throw std::invalid_argument("coefficient count does not match the basis");
    const Eigen::VectorXd v = U_ * coeffs;
    return RadialField(grid_, std::vector<double>(v.data(), v.data() + v.size()), Parity::Even);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& rows) {
    const Eigen::Index n = rows.cols();
    if (rows.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = std::max(rows.rows(), n) * s(0) * 1e-14;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > tol) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

namespace {

struct MinEig {
    double value = 0.0;
    Eigen::VectorXd vector;
};

MinEig min_generalized(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), 0.5 * (B + B.transpose()));
    if (es.info() != Eigen::Success) throw std::runtime_error("constrained eigensolve did not converge");
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

}  // namespace

CoercivityResult coercivity_min(const ProfileSet& prof, Constraints c, const ModalOptions& opt) {
    const ModalBasis basis(prof, opt);
    const Eigen::MatrixXd N = null_space(basis.constraint_rows(prof, c));
    const Eigen::MatrixXd& K = basis.stiffness();
    const auto e = min_generalized(N.transpose() * (K - basis.potential()) * N, N.transpose() * K * N);
    CoercivityResult out;
    out.constraints = c;
    out.modes = opt.modes;
    out.radius = opt.radius;
    out.lambda = opt.lambda;
    out.min_quotient = e.value;
    out.minimizer = N * e.vector;
    return out;
}

LocalizedReport localized_coercivity_check(const ProfileSet& prof, double R, double c, Constraints cons,
                                           long samples, unsigned long long seed, const ModalOptions& opt) {
    LocalizedReport out;
    out.R = R;
    out.c = c;
    out.samples = samples;
    {
        const ModalBasis global(prof, opt);
        const Eigen::MatrixXd& K = global.stiffness();
        const Eigen::MatrixXd A = global.stiffness_inside(R) - global.potential() + c * K;
        const Eigen::MatrixXd N = null_space(global.constraint_rows(prof, cons));
        out.min_eigen_global = min_generalized(N.transpose() * A * N, N.transpose() * K * N).value;
    }
    ModalOptions ob = opt;
    ob.radius = R;
    ob.cells = std::max(2000, static_cast<int>(std::ceil(opt.cells * R / opt.radius)));
    const ModalBasis basis(prof, ob);
    const Eigen::MatrixXd& K = basis.stiffness();
    const Eigen::MatrixXd A = (1.0 + c) * K - basis.potential();
    const Eigen::MatrixXd N = null_space(basis.constraint_rows(prof, cons));
    out.min_eigen = min_generalized(N.transpose() * A * N, N.transpose() * K * N).value;

    const Eigen::VectorXd y = basis.mass().ldlt().solve(basis.project([&](double rho) { return prof.Y_at(rho); }));
    out.y_quotient = y.dot(A * y) / y.dot(K * y);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const Eigen::Index m = basis.size();
    const Eigen::MatrixXd P = N * N.transpose();
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x(m);
    for (long s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < m; ++i) x(i) = normal(rng) / ((1.0 + i) * (1.0 + i));
        const Eigen::VectorXd g = P * x;
        const double den = g.dot(K * g);
        if (den <= 0.0) continue;
        best = std::min(best, g.dot(A * g) / den);
    }
    out.min_sample = samples > 0 ? best : 0.0;
    return out;
}

HCoercivity h_coercivity(const ProfileSet& prof, double lambda, double b, double R, const ModalOptions& opt) {
    ModalOptions o = opt;
    o.lambda = lambda;
    const ModalBasis basis(prof, o);
    const Eigen::MatrixXd N = null_space(basis.constraint_rows(prof, Constraints::YZ));
    const Eigen::MatrixXd& K = basis.stiffness();
    const Eigen::MatrixXd& M = basis.mass();
    const Eigen::MatrixXd TN = basis.virial_form(R) * N;
    const Eigen::Index p = N.cols(), m = basis.size();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(p + m, p + m), B = Eigen::MatrixXd::Zero(p + m, p + m);
    Q.topLeftCorner(p, p) = 0.5 * N.transpose() * (K - basis.potential()) * N;
    Q.bottomLeftCorner(m, p) = 0.5 * b * TN;
    Q.topRightCorner(p, m) = 0.5 * b * TN.transpose();
    Q.bottomRightCorner(m, m) = 0.5 * M;
    B.topLeftCorner(p, p) = N.transpose() * K * N;
    B.bottomRightCorner(m, m) = M;
    HCoercivity out;
    out.lambda = lambda;
    out.b = b;
    out.R = R;
    out.c_H = min_generalized(Q, B).value;
    return out;
}

CoercivityReport coercivity_report(const ProfileSet& prof, Constraints c, const std::vector<int>& modes,
                                   const ModalOptions& base) {
    if (modes.empty()) throw std::invalid_argument("coercivity report needs at least one mode count");
    CoercivityReport rep;
    rep.constraints = c;
    rep.modes = modes;
    for (int m : modes) {
        ModalOptions o = base;
        o.modes = m;
        rep.minima.push_back(coercivity_min(prof, c, o).min_quotient);
    }
    rep.c2_estimate = rep.minima.back();
    if (rep.minima.size() >= 2) {
        const double last = rep.minima.back(), prev = rep.minima[rep.minima.size() - 2];
        rep.refinement_trend = std::abs(last - prev) / std::max(std::abs(last), 1e-300);
    }
    return rep;
}

std::string coercivity_report_json(const CoercivityReport& rep, const ModalOptions& base) {
    nlohmann::ordered_json j;
    j["constraints"] = constraints_name(rep.constraints);
    j["grid"] = {{"modes", rep.modes}, {"radius", base.radius}, {"cells", base.cells}, {"lambda", base.lambda}};
    j["min_quotient"] = rep.minima;
    j["c2_estimate"] = rep.c2_estimate;
    j["refinement_trend"] = rep.refinement_trend;
    return j.dump(2);
}

}  // namespace b5
