#pragma once

#include "pgnudge/domain.hpp"

namespace pgnudge {

/// Trapezoid-quadrature L2(Omega) norm.
double l2_norm(const Field3D& f);

/// Weighted analysis norm:
///   ( alpha * surface integral of f^2 at z=0
///     + volume integral of K_h|grad_H f|^2 + K_v|df/dz|^2 )^{1/2}
/// Gradients are taken in link form (differences across grid edges weighted by
/// dual volumes), which is what makes this norm bit-compatible with the
/// stiffness operator used by the implicit diffusion step.
double energy_norm(const Field3D& f, const PhysParams& p);

/// Plain discrete H1(Omega) norm of a scalar field (L2 plus all first links).
double h1_norm(const Field3D& f);

/// Discrete H1(Omega) norm of a horizontal vector field.
double h1_norm(const VectorField& u);

/// L2(M) norm of a surface field.
double l2_norm_2d(const Field2D& f);
double h1_norm_2d(const Field2D& f);
/// H2(M): L2 plus first and second differences; only used by the
/// attractor-bound calculator.
double h2_norm_2d(const Field2D& f);

/// K_tilde = max{2H/alpha, 2H^2/K_v}.
double poincare_constant(const PhysParams& p);

/// w(x,y,z) = -int_{-H}^{z} div_H u dxi by cumulative trapezoid; w == 0 at z=-H.
Field3D vertical_cumulative_divergence(const VectorField& u);

}  // namespace pgnudge
