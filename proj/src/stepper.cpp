#include "pgnudge/stepper.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>

#include "pgnudge/stencils.hpp"

namespace pgnudge {

Field3D compute_qstar(const Field3D& q, const Field2D& tstar, const PhysParams& p) {
    const auto& d = q.domain();
    if (!d.same_grid(tstar.domain()))
        throw invalid_field_error("compute_qstar: Q and T* grids differ");
    Field3D out(d);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            const double lap = p.k_h * laplacian2d_neumann(tstar, i, j);
            for (int k = 0; k <= d.nz; ++k) out.at(i, j, k) = q.at(i, j, k) + lap;
        }
    return out;
}

double measure_com_violation(const Field2D& tstar) {
    const auto& d = tstar.domain();
    double worst = 0.0;
    for (int j = 0; j <= d.ny; ++j) {
        worst = std::max(worst, std::abs(ddx2d(tstar, 0, j)));
        worst = std::max(worst, std::abs(ddx2d(tstar, d.nx, j)));
    }
    for (int i = 0; i <= d.nx; ++i) {
        worst = std::max(worst, std::abs(ddy2d(tstar, i, 0)));
        worst = std::max(worst, std::abs(ddy2d(tstar, i, d.ny)));
    }
    return worst;
}

void ForcingSpec::refresh(const PhysParams& p) {
    qstar = compute_qstar(q, tstar, p);
    com_violation = measure_com_violation(tstar);
}

Field3D advection_tendency(const Field3D& ttilde, const DiagnosticSolution& diag,
                           const Field2D& tstar) {
    const auto& d = ttilde.domain();
    ttilde.require_finite("advection_tendency temperature");
    const Field3D w = reconstruct_w(diag.u);

    // flux products for the conservative half of the skew form
    Field3D fx(d), fy(d), fz(d);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j)
            for (int k = 0; k <= d.nz; ++k) {
                const double t = ttilde.at(i, j, k);
                fx.at(i, j, k) = diag.u.u1.at(i, j, k) * t;
                fy.at(i, j, k) = diag.u.u2.at(i, j, k) * t;
                fz.at(i, j, k) = w.at(i, j, k) * t;
            }

    Field3D out(d);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j) {
            const double gsx = ddx2d(tstar, i, j);
            const double gsy = ddy2d(tstar, i, j);
            for (int k = 0; k <= d.nz; ++k) {
                const double u1 = diag.u.u1.at(i, j, k);
                const double u2 = diag.u.u2.at(i, j, k);
                const double adv =
                    0.5 * (u1 * ddx(ttilde, i, j, k) + u2 * ddy(ttilde, i, j, k) +
                           w.at(i, j, k) * ddz(ttilde, i, j, k)) +
                    0.5 * (ddx(fx, i, j, k) + ddy(fy, i, j, k) + ddz(fz, i, j, k));
                out.at(i, j, k) = -(adv + u1 * gsx + u2 * gsy);
            }
        }
    return out;
}

double cfl_number(const DiagnosticSolution& diag, double dt) {
    const auto& d = diag.u.domain();
    const Field3D w = reconstruct_w(diag.u);
    double worst = 0.0;
    for (std::size_t n = 0; n < d.nodes3d(); ++n) {
        worst = std::max(worst, std::abs(diag.u.u1.data()[n]) / d.dx());
        worst = std::max(worst, std::abs(diag.u.u2.data()[n]) / d.dy());
        worst = std::max(worst, std::abs(w.data()[n]) / d.dz());
    }
    return dt * worst;
}

struct DiffusionOperator::Impl {
    DomainSpec d;
    PhysParams p;
    Eigen::VectorXd mass;
    Eigen::SparseMatrix<double> stiff;
    mutable std::map<double, std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>>
        factors;

    int idx(int i, int j, int k) const { return (i * d.npy() + j) * d.npz() + k; }

    Impl(const DomainSpec& dom, const PhysParams& par) : d(dom), p(par) {
        const int n = static_cast<int>(d.nodes3d());
        mass.resize(n);
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                for (int k = 0; k <= d.nz; ++k) mass(idx(i, j, k)) = d.w3(i, j, k);

        std::vector<Eigen::Triplet<double>> trip;
        auto link = [&](int a, int b, double c) {
            trip.emplace_back(a, a, c);
            trip.emplace_back(b, b, c);
            trip.emplace_back(a, b, -c);
            trip.emplace_back(b, a, -c);
        };
        for (int i = 0; i < d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                for (int k = 0; k <= d.nz; ++k)
                    link(idx(i, j, k), idx(i + 1, j, k),
                         p.k_h * d.wy(j) * d.wz(k) / d.dx());
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j < d.ny; ++j)
                for (int k = 0; k <= d.nz; ++k)
                    link(idx(i, j, k), idx(i, j + 1, k),
                         p.k_h * d.wx(i) * d.wz(k) / d.dy());
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                for (int k = 0; k < d.nz; ++k)
                    link(idx(i, j, k), idx(i, j, k + 1),
                         p.k_v * d.wx(i) * d.wy(j) / d.dz());
        for (int i = 0; i <= d.nx; ++i)
            for (int j = 0; j <= d.ny; ++j)
                trip.emplace_back(idx(i, j, d.nz), idx(i, j, d.nz), p.alpha * d.w2(i, j));
        stiff.resize(n, n);
        stiff.setFromTriplets(trip.begin(), trip.end());
        stiff.makeCompressed();
    }

    const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& factor(double c) const {
        auto it = factors.find(c);
        if (it == factors.end()) {
            Eigen::SparseMatrix<double> sys = stiff * c;
            for (int n = 0; n < mass.size(); ++n) sys.coeffRef(n, n) += mass(n);
            auto ldlt = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
            ldlt->compute(sys);
            if (ldlt->info() != Eigen::Success)
                throw solver_error("diffusion matrix factorization failed", 0.0, 0);
            it = factors.emplace(c, std::move(ldlt)).first;
        }
        return *it->second;
    }

    Eigen::VectorXd to_vec(const Field3D& f) const {
        return Eigen::Map<const Eigen::VectorXd>(f.data().data(),
                                                 static_cast<Eigen::Index>(f.data().size()));
    }
    Field3D to_field(const Eigen::VectorXd& v) const {
        Field3D f(d);
        std::copy(v.data(), v.data() + v.size(), f.data().begin());
        return f;
    }
};

DiffusionOperator::DiffusionOperator(const DomainSpec& d, const PhysParams& p)
    : impl_(std::make_unique<Impl>(d, p)) {}
DiffusionOperator::~DiffusionOperator() = default;
DiffusionOperator::DiffusionOperator(DiffusionOperator&&) noexcept = default;
DiffusionOperator& DiffusionOperator::operator=(DiffusionOperator&&) noexcept = default;

Field3D DiffusionOperator::apply(const Field3D& f) const {
    Eigen::VectorXd v = impl_->stiff * impl_->to_vec(f);
    v.array() /= impl_->mass.array();
    return impl_->to_field(v);
}

double DiffusionOperator::quadratic_form(const Field3D& f) const {
    Eigen::VectorXd v = impl_->to_vec(f);
    return v.dot(impl_->stiff * v);
}

Field3D DiffusionOperator::implicit_euler(const Field3D& t, double dt,
                                          const Field3D* src) const {
    Eigen::VectorXd b = impl_->mass.cwiseProduct(impl_->to_vec(t));
    if (src) b += dt * impl_->mass.cwiseProduct(impl_->to_vec(*src));
    Eigen::VectorXd x = impl_->factor(dt).solve(b);
    Field3D out = impl_->to_field(x);
    out.require_finite("implicit diffusion step");
    return out;
}

Field3D DiffusionOperator::crank_nicolson(const Field3D& t, double dt,
                                          const Field3D* src) const {
    Eigen::VectorXd tv = impl_->to_vec(t);
    Eigen::VectorXd b = impl_->mass.cwiseProduct(tv) - 0.5 * dt * (impl_->stiff * tv);
    if (src) b += dt * impl_->mass.cwiseProduct(impl_->to_vec(*src));
    Eigen::VectorXd x = impl_->factor(0.5 * dt).solve(b);
    Field3D out = impl_->to_field(x);
    out.require_finite("implicit diffusion step");
    return out;
}

Field3D diffusion_step(const Field3D& ttilde, double dt, const PhysParams& p) {
    if (!(dt > 0)) throw invalid_field_error("diffusion_step: dt must be > 0");
    DiffusionOperator op(ttilde.domain(), p);
    return op.implicit_euler(ttilde, dt);
}

Stepper::Stepper(const DomainSpec& d, const PhysParams& p, const SolverSettings& solver,
                 const StepperSettings& s)
    : domain_(d),
      params_(p),
      settings_(s),
      diag_solver_(d, p, solver),
      diffusion_(d, p) {
    std::vector<std::string> errs;
    s.validate(errs, "stepper");
    if (!errs.empty()) throw invalid_field_error(errs.front());
}

ModelState Stepper::initialize(const Field3D& t0, const ForcingSpec& f) const {
    ModelState st;
    st.ttilde = t0;
    st.time = 0.0;
    st.diag = diag_solver_.solve(t0, f.tstar, f.tau1, f.tau2);
    return st;
}

ModelState Stepper::step(const ModelState& state, const ForcingSpec& f,
                         const Field3D* nudge_tendency) const {
    const double dt = settings_.dt;
    const double cfl = cfl_number(state.diag, dt);
    if (cfl > 0.5) throw step_rejected_error("advective CFL limit exceeded", cfl);

    Field3D src = advection_tendency(state.ttilde, state.diag, f.tstar);
    if (f.qstar.data().size() != src.data().size())
        throw invalid_field_error("forcing qstar missing, call ForcingSpec::refresh");
    for (std::size_t n = 0; n < src.data().size(); ++n) {
        src.data()[n] += f.qstar.data()[n];
        if (nudge_tendency) src.data()[n] += nudge_tendency->data()[n];
    }

    ModelState out;
    out.ttilde = settings_.scheme == TimeScheme::imex_euler
                     ? diffusion_.implicit_euler(state.ttilde, dt, &src)
                     : diffusion_.crank_nicolson(state.ttilde, dt, &src);
    out.time = state.time + dt;
    out.diag = diag_solver_.solve(out.ttilde, f.tstar, f.tau1, f.tau2);
    return out;
}

}  // namespace pgnudge
