#include "pgnudge/norms.hpp"

#include <algorithm>
#include <cmath>

#include "pgnudge/stencils.hpp"

namespace pgnudge {

double l2_norm(const Field3D& f) {
    f.require_finite("l2_norm");
    const auto& d = f.domain();
    double acc = 0.0;
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j)
            for (int k = 0; k <= d.nz; ++k) {
                double v = f.at(i, j, k);
                acc += d.w3(i, j, k) * v * v;
            }
    return std::sqrt(acc);
}

namespace {

// Sum of squared first differences across grid links in one direction,
// weighted by the dual volume of each link. Equivalent to the quadratic form
// of the 1D stiffness matrix tensored with trapezoid masses.
double link_energy(const Field3D& f, int dir) {
    const auto& d = f.domain();
    double acc = 0.0;
    if (dir == 0) {
        for (int i = 0; i < d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                for (int k = 0; k <= d.nz; ++k) {
                    double g = (f.at(i + 1, j, k) - f.at(i, j, k)) / d.dx();
                    acc += g * g * d.dx() * d.wy(j) * d.wz(k);
                }
    } else if (dir == 1) {
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j < d.ny; ++j)
                for (int k = 0; k <= d.nz; ++k) {
                    double g = (f.at(i, j + 1, k) - f.at(i, j, k)) / d.dy();
                    acc += g * g * d.wx(i) * d.dy() * d.wz(k);
                }
    } else {
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                for (int k = 0; k < d.nz; ++k) {
                    double g = (f.at(i, j, k + 1) - f.at(i, j, k)) / d.dz();
                    acc += g * g * d.wx(i) * d.wy(j) * d.dz();
                }
    }
    return acc;
}

double surface_mass(const Field3D& f) {
    const auto& d = f.domain();
    double acc = 0.0;
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            double v = f.at(i, j, d.nz);
            acc += d.w2(i, j) * v * v;
        }
    return acc;
}

}  // namespace

double energy_norm(const Field3D& f, const PhysParams& p) {
    f.require_finite("energy_norm");
    double acc = p.alpha * surface_mass(f);
    acc += p.k_h * (link_energy(f, 0) + link_energy(f, 1));
    acc += p.k_v * link_energy(f, 2);
    return std::sqrt(acc);
}

double h1_norm(const Field3D& f) {
    f.require_finite("h1_norm");
    double l2 = l2_norm(f);
    double acc = l2 * l2 + link_energy(f, 0) + link_energy(f, 1) + link_energy(f, 2);
    return std::sqrt(acc);
}

double h1_norm(const VectorField& u) {
    if (!u.finite()) throw invalid_field_error("h1_norm: vector field contains non-finite values");
    double a = h1_norm(u.u1);
    double b = h1_norm(u.u2);
    return std::sqrt(a * a + b * b);
}

double l2_norm_2d(const Field2D& f) {
    const auto& d = f.domain();
    double acc = 0.0;
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            double v = f.at(i, j);
            acc += d.w2(i, j) * v * v;
        }
    return std::sqrt(acc);
}

namespace {

double link_energy_2d(const Field2D& f, int dir) {
    const auto& d = f.domain();
    double acc = 0.0;
    if (dir == 0) {
        for (int i = 0; i < d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j) {
                double g = (f.at(i + 1, j) - f.at(i, j)) / d.dx();
                acc += g * g * d.dx() * d.wy(j);
            }
    } else {
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j < d.ny; ++j) {
                double g = (f.at(i, j + 1) - f.at(i, j)) / d.dy();
                acc += g * g * d.wx(i) * d.dy();
            }
    }
    return acc;
}

}  // namespace

double h1_norm_2d(const Field2D& f) {
    double l2 = l2_norm_2d(f);
    return std::sqrt(l2 * l2 + link_energy_2d(f, 0) + link_energy_2d(f, 1));
}

double h2_norm_2d(const Field2D& f) {
    const auto& d = f.domain();
    double h1 = h1_norm_2d(f);
    double acc = h1 * h1;
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            double lap = laplacian2d_neumann(f, i, j);
            acc += d.w2(i, j) * lap * lap;
        }
    return std::sqrt(acc);
}

double poincare_constant(const PhysParams& p) {
    return std::max(2.0 * p.h_depth / p.alpha, 2.0 * p.h_depth * p.h_depth / p.k_v);
}

Field3D vertical_cumulative_divergence(const VectorField& u) {
    if (!u.finite())
        throw invalid_field_error("vertical_cumulative_divergence: non-finite input");
    const auto& d = u.domain();
    Field3D w(d);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            double prev_div = horizontal_divergence(u, i, j, 0);
            w.at(i, j, 0) = 0.0;
            for (int k = 1; k <= d.nz; ++k) {
                double div = horizontal_divergence(u, i, j, k);
                w.at(i, j, k) = w.at(i, j, k - 1) - 0.5 * d.dz() * (prev_div + div);
                prev_div = div;
            }
        }
    return w;
}

}  // namespace pgnudge
