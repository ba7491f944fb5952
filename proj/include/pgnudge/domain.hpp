#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pgnudge/errors.hpp"

namespace pgnudge {

/// Box domain Omega = (0,Lx) x (0,Ly) x (-H,0), collocated nodes,
/// Nx x Ny x Nz cells per axis (so Nx+1 nodes in x, etc.).
struct DomainSpec {
    double lx = 1.0;
    double ly = 1.0;
    double h_depth = 1.0;
    int nx = 8;
    int ny = 8;
    int nz = 8;

    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double dz() const { return h_depth / nz; }

    int npx() const { return nx + 1; }
    int npy() const { return ny + 1; }
    int npz() const { return nz + 1; }
    std::size_t nodes3d() const {
        return static_cast<std::size_t>(npx()) * npy() * npz();
    }
    std::size_t nodes2d() const {
        return static_cast<std::size_t>(npx()) * npy();
    }

    double x(int i) const { return i * dx(); }
    double y(int j) const { return j * dy(); }
    /// z runs from -H (k=0) to 0 (k=nz).
    double z(int k) const { return -h_depth + k * dz(); }

    /// Trapezoid quadrature weight along one axis (half weight at the ends).
    static double axis_weight(int idx, int n, double d) {
        return (idx == 0 || idx == n) ? 0.5 * d : d;
    }
    double wx(int i) const { return axis_weight(i, nx, dx()); }
    double wy(int j) const { return axis_weight(j, ny, dy()); }
    double wz(int k) const { return axis_weight(k, nz, dz()); }
    double w3(int i, int j, int k) const { return wx(i) * wy(j) * wz(k); }
    double w2(int i, int j) const { return wx(i) * wy(j); }

    bool same_grid(const DomainSpec& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && lx == o.lx && ly == o.ly &&
               h_depth == o.h_depth;
    }

    void validate(std::vector<std::string>& errs, const std::string& path) const {
        if (!(lx > 0)) errs.push_back(path + ".lx must be > 0");
        if (!(ly > 0)) errs.push_back(path + ".ly must be > 0");
        if (!(h_depth > 0)) errs.push_back(path + ".h must be > 0");
        if (nx < 4) errs.push_back(path + ".nx must be >= 4");
        if (ny < 4) errs.push_back(path + ".ny must be >= 4");
        if (nz < 4) errs.push_back(path + ".nz must be >= 4");
    }
};

/// Scalar field on the 3D collocated grid, z-fastest storage.
class Field3D {
public:
    Field3D() = default;
    explicit Field3D(const DomainSpec& d, double fill = 0.0)
        : domain_(d), values_(d.nodes3d(), fill) {}

    const DomainSpec& domain() const { return domain_; }
    std::size_t size() const { return values_.size(); }

    double& at(int i, int j, int k) { return values_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * domain_.npy() + j) * domain_.npz() + k;
    }

    const std::vector<double>& data() const { return values_; }
    std::vector<double>& data() { return values_; }

    bool finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }
    void require_finite(const std::string& who) const {
        if (!finite()) throw invalid_field_error(who + ": field contains non-finite values");
    }

private:
    DomainSpec domain_;
    std::vector<double> values_;
};

/// Scalar field on the horizontal grid (surface quantities: p_s, T*, tau components).
class Field2D {
public:
    Field2D() = default;
    explicit Field2D(const DomainSpec& d, double fill = 0.0)
        : domain_(d), values_(d.nodes2d(), fill) {}

    const DomainSpec& domain() const { return domain_; }
    std::size_t size() const { return values_.size(); }

    double& at(int i, int j) { return values_[index(i, j)]; }
    double at(int i, int j) const { return values_[index(i, j)]; }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * domain_.npy() + j;
    }

    const std::vector<double>& data() const { return values_; }
    std::vector<double>& data() { return values_; }

    bool finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    DomainSpec domain_;
    std::vector<double> values_;
};

/// Horizontal velocity pair (u1,u2) sharing one domain.
struct VectorField {
    Field3D u1;
    Field3D u2;

    VectorField() = default;
    explicit VectorField(const DomainSpec& d) : u1(d), u2(d) {}

    const DomainSpec& domain() const { return u1.domain(); }
    bool finite() const { return u1.finite() && u2.finite(); }
};

/// Physical constants of the model; h_depth duplicates DomainSpec::h_depth and
/// the two are required to agree when both appear in a configuration.
struct PhysParams {
    double a_h = 1.0;   // horizontal viscosity
    double a_v = 1.0;   // vertical viscosity
    double k_h = 1.0;   // horizontal diffusivity
    double k_v = 1.0;   // vertical diffusivity
    double alpha = 1.0; // Robin heat-exchange coefficient at z=0
    double f0 = 0.0;    // Coriolis scale, f = f0*(beta + y)
    double beta = 0.0;
    double h_depth = 1.0;
    double mu = 0.0;    // nudging relaxation coefficient

    double coriolis(double y) const { return f0 * (beta + y); }

    void validate(std::vector<std::string>& errs, const std::string& path) const {
        if (!(a_h > 0)) errs.push_back(path + ".A_h must be > 0");
        if (!(a_v > 0)) errs.push_back(path + ".A_v must be > 0");
        if (!(k_h > 0)) errs.push_back(path + ".K_h must be > 0");
        if (!(k_v > 0)) errs.push_back(path + ".K_v must be > 0");
        if (!(alpha > 0)) errs.push_back(path + ".alpha must be > 0");
        if (!(h_depth > 0)) errs.push_back(path + ".H must be > 0");
        if (!(mu >= 0)) errs.push_back(path + ".mu must be >= 0");
    }
};

}  // namespace pgnudge
