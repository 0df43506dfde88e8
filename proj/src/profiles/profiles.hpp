#pragma once

#include <memory>
#include <string>
#include <vector>

#include "radial_core/ops.hpp"

namespace b5 {

// Default reference grid: 4096 sinh cells reaching r = 1e5.
GridSpec reference_grid_spec();

inline constexpr double kZRadius = 3.5;

// exp(-1/(1-(r/radius)^2)) inside the ball, zero outside.
double bump_Z(double r, double radius = kZRadius);
RadialField test_function_Z(const GridPtr& grid, double radius = kZRadius);

// -Delta g - f'(W_lambda) g on g's grid.
RadialField apply_L(const RadialField& g, double lambda);

// -<LW, f'(W)> / <LW, LW>, with a power-law tail correction for the
// slowly decaying denominator.
double compute_kappa(const GridPtr& grid);

// Second homogeneous solution of L y = 0 with r^4 (LW y' - LW' y) = 1.
// Node 0 is left at zero (the solution is singular there).
struct SecondSolution {
    GridPtr grid;
    std::vector<double> value;
    std::vector<double> slope;
    double series_radius = 0.0;

    double wronskian(std::size_t i) const;
    // Closed-form series valid for r < sqrt(15); used near the origin.
    static double series_value(double r);
    static double series_slope(double r);
};

SecondSolution second_solution(const GridPtr& grid, double match_radius = 10.0);

enum class CorrectorKind { A, B };

struct Corrector {
    RadialField value;
    RadialField d1;
    RadialField d2;
    // Source term of L y = rhs at each node.
    RadialField rhs;
    // Coefficient of the far-field decay y ~ c / r.
    double far_coeff = 0.0;
    // Multiple of LW added to enforce <Z, y> = 0.
    double shift = 0.0;
};

Corrector solve_corrector(CorrectorKind kind, const SecondSolution& gamma, double kappa,
                          const RadialField& z);

struct Eigenpair {
    double e0 = 0.0;
    double eigenvalue = 0.0;
    RadialField Y;
    double residual = 0.0;
    int iterations = 0;
};

// Lowest eigenpair of the discretized L, Dirichlet at min(r_max, radius).
Eigenpair ground_eigenpair(const GridPtr& grid, double radius = 50.0);

struct ProfileOptions {
    GridSpec grid = reference_grid_spec();
    double z_radius = kZRadius;
    double eigen_radius = 50.0;
};

class ProfileSet {
public:
    struct Sample {
        double value = 0.0;
        double slope = 0.0;
        double lap = 0.0;
    };

    static std::shared_ptr<const ProfileSet> build(const ProfileOptions& opt = {});
    static std::shared_ptr<const ProfileSet> load(const std::string& path, const ProfileOptions& opt);
    // Loads from `path` when its key matches, otherwise builds and writes it.
    static std::shared_ptr<const ProfileSet> cached(const std::string& path, const ProfileOptions& opt);
    void save(const std::string& path) const;
    std::string key() const;

    const GridPtr& grid() const { return grid_; }
    const ProfileOptions& options() const { return opt_; }
    double kappa() const { return kappa_; }
    double e0() const { return e0_; }

    const RadialField& W() const { return W_; }
    const RadialField& LW() const { return LW_; }
    const RadialField& L0LW() const { return L0LW_; }
    const RadialField& A() const { return A_; }
    const RadialField& dA() const { return dA_; }
    const RadialField& d2A() const { return d2A_; }
    const RadialField& B() const { return B_; }
    const RadialField& dB() const { return dB_; }
    const RadialField& d2B() const { return d2B_; }
    const RadialField& Y() const { return Y_; }
    const RadialField& Z() const { return Z_; }
    // Scaling derivatives of the correctors on the reference grid.
    RadialField LA() const;
    RadialField LB() const;
    RadialField L0A() const;
    RadialField L0B() const;
    RadialField L0LA() const;
    RadialField L0LB() const;

    // Values anywhere in [0, inf): cubic Hermite on the reference grid,
    // c/r extrapolation beyond it, Laplacian from the defining equation.
    Sample A_at(double rho) const;
    Sample B_at(double rho) const;
    double Y_at(double rho) const;
    double Z_at(double rho) const { return bump_Z(rho, opt_.z_radius); }
    double far_coeff_A() const { return farA_; }
    double far_coeff_B() const { return farB_; }

private:
    Sample hermite(const RadialField& v, const RadialField& d, double far, double rho) const;
    void finish();

    ProfileOptions opt_;
    GridPtr grid_;
    double kappa_ = 0.0, e0_ = 0.0, farA_ = 0.0, farB_ = 0.0;
    RadialField W_, LW_, L0LW_, A_, dA_, d2A_, B_, dB_, d2B_, Y_, dY_, Z_;
};

using ProfilePtr = std::shared_ptr<const ProfileSet>;

}  // namespace b5
