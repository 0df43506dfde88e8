#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "profiles/profiles.hpp"

namespace b5 {

enum class WeightOrder { Value, D1, D2, D3, Lap, BiLap };

// Convex weight: r^2/2 inside R, (15/8)Rr - (5/2)R^2 + (5/4)R^3/r - (1/8)R^5/r^3 beyond.
class VirialWeight {
public:
    explicit VirialWeight(double R);
    double R() const { return R_; }
    double eval(double r, WeightOrder order) const;
    double a(double r) const { return eval(r, WeightOrder::Value); }
    double d1(double r) const { return eval(r, WeightOrder::D1); }
    double d2(double r) const { return eval(r, WeightOrder::D2); }
    double d3(double r) const { return eval(r, WeightOrder::D3); }
    double lap(double r) const { return eval(r, WeightOrder::Lap); }
    double bilap(double r) const { return eval(r, WeightOrder::BiLap); }

private:
    double R_;
};

double virial_weight(double r, double R, WeightOrder order);

// Integral of eps1^2/2 + |grad eps0|^2/2 - (F(phi0+eps0) - F(phi0) - f(phi0) eps0).
double functional_I(const StatePair& eps, const RadialField& phi0);
// b <eps1, (lambda^{-1} (Delta a)(r/lambda)/2 + a'(r/lambda) d_r) eps0>.
double functional_J(const StatePair& eps, double lambda, double b, double R);
// Squared weighted gradient: integral of a''(r/lambda) (d_r eps0)^2.
double weighted_grad_norm(const RadialField& eps0, double lambda, double R);

struct PohozaevResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // |lhs - rhs| / |rhs|, absolute when rhs = 0
};

// Both sides of the localized Pohozaev identity, integrated cell by cell
// with Gauss nodes and a breakpoint at r = R lambda.
PohozaevResult pohozaev_check(const RadialField& eps0, double lambda, double R);

// Sinh grid with r_max = 1e5 lambda and core step 0.005 lambda.
GridSpec pohozaev_grid_spec(double lambda, int cells = 8192);
// Random combination of smooth compact bumps on the scale `scale`, supported in r < 2.5 scale.
RadialField random_smooth_field(const GridPtr& grid, double scale, std::mt19937_64& rng);

// g - g(R) inside R, zero beyond.
RadialField project_ball(const RadialField& g, double R);

enum class Constraints { None, Y, YZ };
const char* constraints_name(Constraints c);

struct ModalOptions {
    int modes = 200;
    // Dirichlet ball radius in units of lambda.
    double radius = 40.0;
    int cells = 8000;
    double lambda = 1.0;
};

// Radial Dirichlet Laplacian eigenmodes (sin x - x cos x) / x^3 on a ball,
// tabulated on a uniform grid with the quadratic forms of the problem.
class ModalBasis {
public:
    ModalBasis(const ProfileSet& prof, const ModalOptions& opt);

    int size() const { return static_cast<int>(K_.rows()); }
    const ModalOptions& options() const { return opt_; }
    const GridPtr& grid() const { return grid_; }
    // <grad u_i, grad u_j>, <u_i, u_j>, <f'(W_lambda) u_i, u_j>.
    const Eigen::MatrixXd& stiffness() const { return K_; }
    const Eigen::MatrixXd& mass() const { return M_; }
    const Eigen::MatrixXd& potential() const { return V_; }
    // Stiffness restricted to r <= R lambda.
    Eigen::MatrixXd stiffness_inside(double R) const;
    // <u_i, (lambda^{-1}(Delta a)(r/lambda)/2 + a'(r/lambda) d_r) u_j>.
    Eigen::MatrixXd virial_form(double R) const;
    // <u_i, g(r / lambda)> for a radial profile g.
    Eigen::VectorXd project(const std::function<double(double)>& g) const;
    Eigen::MatrixXd constraint_rows(const ProfileSet& prof, Constraints c) const;
    RadialField field(const Eigen::VectorXd& coeffs) const;

    static double mode_value(double x);
    static double mode_slope(double x);
    // Positive roots of tan x = x.
    static std::vector<double> roots(int n);

private:
    ModalOptions opt_;
    GridPtr grid_;
    std::vector<double> mu_, scale_;
    Eigen::MatrixXd U_, dU_;  // nodes x modes
    Eigen::MatrixXd K_, M_, V_;
};

// Orthonormal basis of the null space of `rows`.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& rows);

struct CoercivityResult {
    Constraints constraints = Constraints::None;
    int modes = 0;
    double radius = 0.0;
    double lambda = 1.0;
    double min_quotient = 0.0;
    Eigen::VectorXd minimizer;
};

// Minimum of <g, L_lambda g> / ||grad g||^2 over the modal space under the
// linear constraints.
CoercivityResult coercivity_min(const ProfileSet& prof, Constraints c, const ModalOptions& opt = {});

struct LocalizedReport {
    double R = 0.0;
    double c = 0.0;
    long samples = 0;
    // Quotient (int_{r<=R}|grad g|^2 - int f'(W) g^2 + c||grad g||^2) / ||grad g||^2.
    // Minimum over random constrained g supported in the ball r <= R.
    double min_sample = 0.0;
    // Minimum over the whole constrained modal space of the ball.
    double min_eigen = 0.0;
    // Minimum over the constrained modal space of the full radius (not localized).
    double min_eigen_global = 0.0;
    // Quotient at the best ball approximation of Y, unconstrained.
    double y_quotient = 0.0;
};

LocalizedReport localized_coercivity_check(const ProfileSet& prof, double R, double c, Constraints cons,
                                           long samples, unsigned long long seed, const ModalOptions& opt = {});

struct HCoercivity {
    double lambda = 1.0, b = 0.0, R = 20.0;
    // min of the quadratic part of I + J over ||eps||_E^2 with
    // <eps0, Z_lambda> = 0 and alpha_lambda(eps0) = 0.
    double c_H = 0.0;
};

HCoercivity h_coercivity(const ProfileSet& prof, double lambda, double b, double R, const ModalOptions& opt = {});

struct CoercivityReport {
    Constraints constraints = Constraints::YZ;
    std::vector<int> modes;
    std::vector<double> minima;
    double c2_estimate = 0.0;
    // Relative change between the last two refinements.
    double refinement_trend = 0.0;
};

CoercivityReport coercivity_report(const ProfileSet& prof, Constraints c, const std::vector<int>& modes,
                                   const ModalOptions& base = {});
std::string coercivity_report_json(const CoercivityReport& rep, const ModalOptions& base);

}  // namespace b5
