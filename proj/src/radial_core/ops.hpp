#pragma once

#include "radial_core/field.hpp"

namespace b5 {

// Closed forms of the ground state and its scaling derivatives.
namespace bubble {
double W(double r);
double dW(double r);
double LW(double r);      // (3/2 + r d/dr) W
double dLW(double r);
double L0LW(double r);    // (5/2 + r d/dr)(3/2 + r d/dr) W
}  // namespace bubble

// Pointwise nonlinearity f(u) = |u|^{4/3} u and relatives.
namespace nl {
double F(double u);
double f(double u);
double df(double u);
double d2f(double u);
// f(w + d) - f(w), accurate when |d| << |w|.
double f_increment(double w, double d);
// f(w + d) - f(w) - f'(w) d, accurate when |d| << |w|.
double f_remainder(double w, double d);
// F(w + d) - F(w) - f(w) d, accurate when |d| << |w|.
double F_remainder(double w, double d);
}  // namespace nl

enum class NormKind { L2, H1dot, Energy };
enum class GroundOrder { W, dW, LW, L0LW };
enum class ScaleKind { Pow32, Pow52 };
enum class NonlinOrder { F, f, df, d2f };

double inner_product(const RadialField& v, const RadialField& w);
double norm(const RadialField& v, NormKind kind);
double norm(const StatePair& x, NormKind kind = NormKind::Energy);
RadialField ground_state(const GridPtr& grid, GroundOrder order);
RadialField rescale(const RadialField& v, double lambda, ScaleKind kind);
// Closed-form bubble on the grid: lambda^{-p} g(r / lambda).
RadialField scaled_profile(const GridPtr& grid, double (*g)(double), double lambda, ScaleKind kind);
RadialField laplacian(const RadialField& v);
RadialField nonlinearity(const RadialField& u, NonlinOrder order);
double energy(const StatePair& x);

}  // namespace b5
