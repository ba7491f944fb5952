#pragma once

#include "pgnudge/domain.hpp"

namespace pgnudge {

// Second-order first derivatives on the collocated grid: centered in the
// interior, one-sided 3-point at the walls. The same stencils are shared by
// the divergence used in the diagnostic constraint rows and by
// vertical_cumulative_divergence, so the integrated constraint and the
// reconstructed w(.,.,0) agree exactly.

inline double d1_along(double fm, double f0, double fp, double d) {
    return (fp - fm) / (2.0 * d);
}
inline double d1_left(double f0, double f1, double f2, double d) {
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * d);
}
inline double d1_right(double f0, double f1, double f2, double d) {
    // f0 at the wall, f1/f2 inward
    return (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * d);
}

inline double ddx(const Field3D& f, int i, int j, int k) {
    const auto& d = f.domain();
    if (i == 0) return d1_left(f.at(0, j, k), f.at(1, j, k), f.at(2, j, k), d.dx());
    if (i == d.nx)
        return d1_right(f.at(d.nx, j, k), f.at(d.nx - 1, j, k), f.at(d.nx - 2, j, k), d.dx());
    return d1_along(f.at(i - 1, j, k), f.at(i, j, k), f.at(i + 1, j, k), d.dx());
}

inline double ddy(const Field3D& f, int i, int j, int k) {
    const auto& d = f.domain();
    if (j == 0) return d1_left(f.at(i, 0, k), f.at(i, 1, k), f.at(i, 2, k), d.dy());
    if (j == d.ny)
        return d1_right(f.at(i, d.ny, k), f.at(i, d.ny - 1, k), f.at(i, d.ny - 2, k), d.dy());
    return d1_along(f.at(i, j - 1, k), f.at(i, j, k), f.at(i, j + 1, k), d.dy());
}

inline double ddz(const Field3D& f, int i, int j, int k) {
    const auto& d = f.domain();
    if (k == 0) return d1_left(f.at(i, j, 0), f.at(i, j, 1), f.at(i, j, 2), d.dz());
    if (k == d.nz)
        return d1_right(f.at(i, j, d.nz), f.at(i, j, d.nz - 1), f.at(i, j, d.nz - 2), d.dz());
    return d1_along(f.at(i, j, k - 1), f.at(i, j, k), f.at(i, j, k + 1), d.dz());
}

inline double ddx2d(const Field2D& f, int i, int j) {
    const auto& d = f.domain();
    if (i == 0) return d1_left(f.at(0, j), f.at(1, j), f.at(2, j), d.dx());
    if (i == d.nx) return d1_right(f.at(d.nx, j), f.at(d.nx - 1, j), f.at(d.nx - 2, j), d.dx());
    return d1_along(f.at(i - 1, j), f.at(i, j), f.at(i + 1, j), d.dx());
}

inline double ddy2d(const Field2D& f, int i, int j) {
    const auto& d = f.domain();
    if (j == 0) return d1_left(f.at(i, 0), f.at(i, 1), f.at(i, 2), d.dy());
    if (j == d.ny) return d1_right(f.at(i, d.ny), f.at(i, d.ny - 1), f.at(i, d.ny - 2), d.dy());
    return d1_along(f.at(i, j - 1), f.at(i, j), f.at(i, j + 1), d.dy());
}

/// Horizontal divergence du1/dx + du2/dy at a node.
inline double horizontal_divergence(const VectorField& u, int i, int j, int k) {
    return ddx(u.u1, i, j, k) + ddy(u.u2, i, j, k);
}

/// 5-point horizontal Laplacian of a 2D field, mirror-extended at the walls
/// (consistent with the homogeneous Neumann side condition).
inline double laplacian2d_neumann(const Field2D& f, int i, int j) {
    const auto& d = f.domain();
    auto get = [&](int ii, int jj) {
        if (ii < 0) ii = -ii;
        if (ii > d.nx) ii = 2 * d.nx - ii;
        if (jj < 0) jj = -jj;
        if (jj > d.ny) jj = 2 * d.ny - jj;
        return f.at(ii, jj);
    };
    double c = f.at(i, j);
    double dxx = (get(i + 1, j) - 2.0 * c + get(i - 1, j)) / (d.dx() * d.dx());
    double dyy = (get(i, j + 1) - 2.0 * c + get(i, j - 1)) / (d.dy() * d.dy());
    return dxx + dyy;
}

}  // namespace pgnudge
