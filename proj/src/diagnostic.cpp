#include "pgnudge/diagnostic.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

#include "pgnudge/norms.hpp"
#include "pgnudge/stencils.hpp"

namespace pgnudge {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

struct Layout {
    DomainSpec d;
    std::size_t n3;  // nodes per component
    std::size_t n2;  // surface nodes
    std::size_t total;

    explicit Layout(const DomainSpec& dom) : d(dom) {
        n3 = d.nodes3d();
        n2 = d.nodes2d();
        total = 2 * n3 + n2 + 1;
    }
    std::size_t iu1(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * d.npy() + j) * d.npz() + k;
    }
    std::size_t iu2(int i, int j, int k) const { return n3 + iu1(i, j, k); }
    std::size_t ip(int i, int j) const {
        return 2 * n3 + static_cast<std::size_t>(i) * d.npy() + j;
    }
    std::size_t ilambda() const { return 2 * n3 + n2; }
};

// first-derivative stencil along one axis: centered in the interior,
// one-sided 3-point at idx==0 / idx==n
void d1_stencil(int idx, int n, double delta, int out_idx[3], double out_c[3]) {
    if (idx == 0) {
        out_idx[0] = 0; out_idx[1] = 1; out_idx[2] = 2;
        out_c[0] = -1.5 / delta; out_c[1] = 2.0 / delta; out_c[2] = -0.5 / delta;
    } else if (idx == n) {
        out_idx[0] = n; out_idx[1] = n - 1; out_idx[2] = n - 2;
        out_c[0] = 1.5 / delta; out_c[1] = -2.0 / delta; out_c[2] = 0.5 / delta;
    } else {
        out_idx[0] = idx - 1; out_idx[1] = idx + 1; out_idx[2] = idx;
        out_c[0] = -0.5 / delta; out_c[1] = 0.5 / delta; out_c[2] = 0.0;
    }
}

// pressure-gradient stencil: centered in the interior; at the first interior
// node (idx==1 / idx==n-1) a 4-point third-order biased formula. The biased
// rows are what removes the checkerboard null modes of the collocated
// pressure while every boundary pressure node stays coupled.
void dp_stencil(int idx, int n, double delta, int out_idx[4], double out_c[4], int& cnt) {
    if (idx == 1) {
        cnt = 4;
        out_idx[0] = 0; out_idx[1] = 1; out_idx[2] = 2; out_idx[3] = 3;
        out_c[0] = -2.0 / (6.0 * delta);
        out_c[1] = -3.0 / (6.0 * delta);
        out_c[2] = 6.0 / (6.0 * delta);
        out_c[3] = -1.0 / (6.0 * delta);
    } else if (idx == n - 1) {
        cnt = 4;
        out_idx[0] = n; out_idx[1] = n - 1; out_idx[2] = n - 2; out_idx[3] = n - 3;
        out_c[0] = 2.0 / (6.0 * delta);
        out_c[1] = 3.0 / (6.0 * delta);
        out_c[2] = -6.0 / (6.0 * delta);
        out_c[3] = 1.0 / (6.0 * delta);
    } else {
        cnt = 2;
        out_idx[0] = idx - 1; out_idx[1] = idx + 1;
        out_c[0] = -0.5 / delta; out_c[1] = 0.5 / delta;
    }
}

}  // namespace

struct DiagnosticSolver::Impl {
    DomainSpec d;
    PhysParams p;
    SolverSettings s;
    Layout lay;
    SpMat A;
    Eigen::SparseLU<SpMat> lu;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;  // dense-direct method only

    Impl(const DomainSpec& dom, const PhysParams& pp, const SolverSettings& ss)
        : d(dom), p(pp), s(ss), lay(dom) {
        if (d.nz < 3)
            throw solver_error("diagnostic system singular: Nz < 3", 0.0, 0);
        assemble();
        if (s.method == SolveMethod::dense_direct) {
            dense_lu.compute(Eigen::MatrixXd(A));
        } else {
            lu.compute(A);
            if (lu.info() != Eigen::Success)
                throw solver_error("diagnostic matrix factorization failed", 0.0, 0);
        }
    }

    void assemble() {
        std::vector<Triplet> trip;
        trip.reserve(lay.total * 10);
        const double dx = d.dx(), dy = d.dy(), dz = d.dz();

        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                for (int k = 0; k <= d.nz; ++k) {
                    // u1: no-normal-flow on x-walls, momentum elsewhere (the
                    // stress-free tangential condition at y-walls enters by
                    // mirror ghost elimination inside the momentum stencil)
                    {
                        const long r = static_cast<long>(lay.iu1(i, j, k));
                        if (i == 0 || i == d.nx)
                            trip.emplace_back(r, r, 1.0);
                        else
                            momentum_row(trip, r, 0, i, j, k, dx, dy, dz);
                    }
                    // u2: no-normal-flow on y-walls, momentum elsewhere
                    {
                        const long r = static_cast<long>(lay.iu2(i, j, k));
                        if (j == 0 || j == d.ny)
                            trip.emplace_back(r, r, 1.0);
                        else
                            momentum_row(trip, r, 1, i, j, k, dx, dy, dz);
                    }
                }

        // ---- constraint rows: div of the vertical integral, per column ----
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j) {
                const long r = static_cast<long>(lay.ip(i, j));
                int sx[3], sy[3];
                double cx[3], cy[3];
                d1_stencil(i, d.nx, dx, sx, cx);
                d1_stencil(j, d.ny, dy, sy, cy);
                for (int k = 0; k <= d.nz; ++k) {
                    const double wzk = d.wz(k);
                    for (int t = 0; t < 3; ++t) {
                        if (cx[t] != 0.0)
                            trip.emplace_back(r, lay.iu1(sx[t], j, k), wzk * cx[t]);
                        if (cy[t] != 0.0)
                            trip.emplace_back(r, lay.iu2(i, sy[t], k), wzk * cy[t]);
                    }
                }
                trip.emplace_back(r, lay.ilambda(), 1.0);
            }

        // ---- gauge row: trapezoid mean of p_s over M is zero ----
        {
            const long r = static_cast<long>(lay.ilambda());
            for (int i = 0; i <= d.nx; ++i)
                for (int j = 0; j <= d.ny; ++j)
                    trip.emplace_back(r, lay.ip(i, j), d.w2(i, j));
        }

        A.resize(static_cast<long>(lay.total), static_cast<long>(lay.total));
        A.setFromTriplets(trip.begin(), trip.end());
        A.makeCompressed();
    }

    // component 0: u1 equation  dPhi/dx - f u2 + L1 u1 = 0
    // component 1: u2 equation  dPhi/dy + f u1 + L1 u2 = 0
    // Row is weighted by wz(k); the vertical viscous part is the 1D link
    // stiffness (natural Neumann top/bottom, tau flux on the RHS).
    void momentum_row(std::vector<Triplet>& trip, long r, int comp, int i, int j, int k,
                      double dx, double dy, double dz) {
        const double wzk = d.wz(k);
        const double f = p.coriolis(d.y(j));
        auto self = [&](int ii, int jj, int kk) {
            return comp == 0 ? lay.iu1(ii, jj, kk) : lay.iu2(ii, jj, kk);
        };
        auto other = [&](int ii, int jj, int kk) {
            return comp == 0 ? lay.iu2(ii, jj, kk) : lay.iu1(ii, jj, kk);
        };

        // Coriolis
        trip.emplace_back(r, other(i, j, k), comp == 0 ? -wzk * f : wzk * f);

        // -A_h Delta_H, with the tangential neighbor mirrored across the wall
        // (ghost elimination of du1/dy = 0 at y-walls, du2/dx = 0 at x-walls)
        const double cxx = p.a_h / (dx * dx), cyy = p.a_h / (dy * dy);
        auto mirror = [](int idx, int n) {
            if (idx < 0) return -idx;
            if (idx > n) return 2 * n - idx;
            return idx;
        };
        trip.emplace_back(r, self(i, j, k), wzk * 2.0 * (cxx + cyy));
        trip.emplace_back(r, self(mirror(i - 1, d.nx), j, k), -wzk * cxx);
        trip.emplace_back(r, self(mirror(i + 1, d.nx), j, k), -wzk * cxx);
        trip.emplace_back(r, self(i, mirror(j - 1, d.ny), k), -wzk * cyy);
        trip.emplace_back(r, self(i, mirror(j + 1, d.ny), k), -wzk * cyy);

        // -A_v d2/dz2 in link form
        const double cz = p.a_v / dz;
        if (k == 0) {
            trip.emplace_back(r, self(i, j, 0), cz);
            trip.emplace_back(r, self(i, j, 1), -cz);
        } else if (k == d.nz) {
            trip.emplace_back(r, self(i, j, d.nz), cz);
            trip.emplace_back(r, self(i, j, d.nz - 1), -cz);
        } else {
            trip.emplace_back(r, self(i, j, k), 2.0 * cz);
            trip.emplace_back(r, self(i, j, k - 1), -cz);
            trip.emplace_back(r, self(i, j, k + 1), -cz);
        }

        // surface-pressure gradient
        int sp[4];
        double cp[4];
        int cnt = 0;
        if (comp == 0) {
            dp_stencil(i, d.nx, dx, sp, cp, cnt);
            for (int t = 0; t < cnt; ++t) trip.emplace_back(r, lay.ip(sp[t], j), wzk * cp[t]);
        } else {
            dp_stencil(j, d.ny, dy, sp, cp, cnt);
            for (int t = 0; t < cnt; ++t) trip.emplace_back(r, lay.ip(i, sp[t]), wzk * cp[t]);
        }
    }

    // G = -int_{-H}^z Ttilde - (z+H) T*, the data part of Phi
    Field3D data_potential(const Field3D& ttilde, const Field2D& tstar) const {
        Field3D g(d);
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j) {
                double acc = 0.0;
                g.at(i, j, 0) = 0.0;
                for (int k = 1; k <= d.nz; ++k) {
                    acc += 0.5 * d.dz() * (ttilde.at(i, j, k - 1) + ttilde.at(i, j, k));
                    g.at(i, j, k) = -acc - (d.z(k) + d.h_depth) * tstar.at(i, j);
                }
                g.at(i, j, 0) = -(d.z(0) + d.h_depth) * tstar.at(i, j);  // = 0
            }
        return g;
    }

    Eigen::VectorXd build_rhs(const Field3D& ttilde, const Field2D& tstar,
                              const Field2D& tau1, const Field2D& tau2) const {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<long>(lay.total));
        Field3D g = data_potential(ttilde, tstar);
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                for (int k = 0; k <= d.nz; ++k) {
                    const double wzk = d.wz(k);
                    // the data part of Phi is differenced with the same
                    // stencil as p_s, so gradient forcings lie exactly in the
                    // range of the discrete pressure gradient
                    int sp[4];
                    double cp[4];
                    int cnt = 0;
                    if (i != 0 && i != d.nx) {
                        double& r1 = b[static_cast<long>(lay.iu1(i, j, k))];
                        dp_stencil(i, d.nx, d.dx(), sp, cp, cnt);
                        double gx = 0.0;
                        for (int t = 0; t < cnt; ++t) gx += cp[t] * g.at(sp[t], j, k);
                        r1 = -wzk * gx;
                        if (k == d.nz) r1 += p.a_v * tau1.at(i, j);
                    }
                    if (j != 0 && j != d.ny) {
                        double& r2 = b[static_cast<long>(lay.iu2(i, j, k))];
                        dp_stencil(j, d.ny, d.dy(), sp, cp, cnt);
                        double gy = 0.0;
                        for (int t = 0; t < cnt; ++t) gy += cp[t] * g.at(i, sp[t], k);
                        r2 = -wzk * gy;
                        if (k == d.nz) r2 += p.a_v * tau2.at(i, j);
                    }
                }
        return b;
    }

    Eigen::VectorXd solve_linear(const Eigen::VectorXd& b, int& iterations,
                                 double& rel_residual) const {
        const double bnorm = b.norm();
        if (bnorm == 0.0) {
            iterations = 0;
            rel_residual = 0.0;
            return Eigen::VectorXd::Zero(b.size());
        }
        if (s.method == SolveMethod::dense_direct) {
            Eigen::VectorXd x = dense_lu.solve(b);
            rel_residual = (b - A * x).norm() / bnorm;
            iterations = 1;
            return x;
        }
        Eigen::VectorXd x = lu.solve(b);
        iterations = 1;
        Eigen::VectorXd r = b - A * x;
        rel_residual = r.norm() / bnorm;
        while (rel_residual > s.tol && iterations < s.max_iter) {
            x += lu.solve(r);
            r = b - A * x;
            rel_residual = r.norm() / bnorm;
            ++iterations;
        }
        if (rel_residual > s.tol)
            throw solver_error("diagnostic solve did not reach tolerance", rel_residual,
                               iterations);
        return x;
    }
};

DiagnosticSolver::DiagnosticSolver(const DomainSpec& d, const PhysParams& p,
                                   const SolverSettings& s)
    : impl_(std::make_unique<Impl>(d, p, s)) {}
DiagnosticSolver::~DiagnosticSolver() = default;
DiagnosticSolver::DiagnosticSolver(DiagnosticSolver&&) noexcept = default;
DiagnosticSolver& DiagnosticSolver::operator=(DiagnosticSolver&&) noexcept = default;

const DomainSpec& DiagnosticSolver::domain() const { return impl_->d; }
const SolverSettings& DiagnosticSolver::settings() const { return impl_->s; }

DiagnosticSolution DiagnosticSolver::solve(const Field3D& ttilde, const Field2D& tstar,
                                           const Field2D& tau1, const Field2D& tau2) const {
    ttilde.require_finite("solve_velocity");
    const auto& d = impl_->d;
    if (!ttilde.domain().same_grid(d))
        throw invalid_field_error("solve_velocity: field domain mismatch");

    Eigen::VectorXd b = impl_->build_rhs(ttilde, tstar, tau1, tau2);
    DiagnosticSolution sol;
    Eigen::VectorXd x = impl_->solve_linear(b, sol.iterations, sol.momentum_residual);

    sol.u = VectorField(d);
    sol.p_s = Field2D(d);
    const Layout& lay = impl_->lay;
    double umax = 0.0;
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            sol.p_s.at(i, j) = x[static_cast<long>(lay.ip(i, j))];
            for (int k = 0; k <= d.nz; ++k) {
                double v1 = x[static_cast<long>(lay.iu1(i, j, k))];
                double v2 = x[static_cast<long>(lay.iu2(i, j, k))];
                sol.u.u1.at(i, j, k) = v1;
                sol.u.u2.at(i, j, k) = v2;
                umax = std::max({umax, std::abs(v1), std::abs(v2)});
            }
        }

    // constraint residual, measured on the actual stencils, relative to u scale
    double cmax = 0.0;
    Field3D w = vertical_cumulative_divergence(sol.u);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) cmax = std::max(cmax, std::abs(w.at(i, j, d.nz)));
    sol.constraint_residual = (umax > 0.0) ? cmax / umax : cmax;
    return sol;
}

DiagnosticSolution solve_velocity(const Field3D& ttilde, const Field2D& tstar,
                                  const Field2D& tau1, const Field2D& tau2,
                                  const PhysParams& p, const SolverSettings& s) {
    DiagnosticSolver solver(ttilde.domain(), p, s);
    return solver.solve(ttilde, tstar, tau1, tau2);
}

Field3D reconstruct_w(const VectorField& u) { return vertical_cumulative_divergence(u); }

Field3D reconstruct_pressure(const Field2D& p_s, const Field3D& T) {
    const auto& d = T.domain();
    if (!p_s.domain().same_grid(d))
        throw invalid_field_error("reconstruct_pressure: domain mismatch");
    Field3D p(d);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            double acc = 0.0;
            p.at(i, j, 0) = p_s.at(i, j);
            for (int k = 1; k <= d.nz; ++k) {
                acc += 0.5 * d.dz() * (T.at(i, j, k - 1) + T.at(i, j, k));
                p.at(i, j, k) = p_s.at(i, j) - acc;
            }
        }
    return p;
}

double velocity_error_ratio(const DiagnosticSolver& solver, const Field3D& chi) {
    chi.require_finite("velocity_error_ratio");
    double denom = l2_norm(chi);
    if (denom == 0.0) return 0.0;
    Field2D zero2(chi.domain());
    DiagnosticSolution sol = solver.solve(chi, zero2, zero2, zero2);
    return h1_norm(sol.u) / denom;
}

double velocity_error_ratio(const Field3D& chi, const PhysParams& p, const SolverSettings& s) {
    DiagnosticSolver solver(chi.domain(), p, s);
    return velocity_error_ratio(solver, chi);
}

}  // namespace pgnudge
