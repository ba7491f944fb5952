#include "pgnudge/observe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pgnudge/norms.hpp"
#include "pgnudge/random_fields.hpp"
#include "pgnudge/snapshot_io.hpp"

namespace pgnudge {

namespace {

// Discrete eigenvalue of the 1D Neumann link stiffness against trapezoid mass
// for the cosine mode cos(pi k i / n) with spacing d.
double cosine_eigenvalue(int k, int n, double d) {
    return (2.0 / (d * d)) * (1.0 - std::cos(std::numbers::pi * k / n));
}

}  // namespace

ModalBasis::ModalBasis(const DomainSpec& d, const PhysParams& p, double h)
    : domain_(d), h_(h) {
    const int npz = d.npz();

    // Vertical generalized eigenproblem (S + (alpha/K_v) e_top e_top^T) Z = lambda M Z
    // with link stiffness S and trapezoid mass M, Robin top at k = nz.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(npz, npz);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(npz, npz);
    const double cz = 1.0 / d.dz();
    for (int k = 0; k + 1 < npz; ++k) {
        A(k, k) += cz;
        A(k + 1, k + 1) += cz;
        A(k, k + 1) -= cz;
        A(k + 1, k) -= cz;
    }
    A(npz - 1, npz - 1) += p.alpha / p.k_v;
    for (int k = 0; k < npz; ++k) B(k, k) = d.wz(k);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    lambda_z_.resize(npz);
    z_modes_.assign(npz, std::vector<double>(npz));
    for (int m = 0; m < npz; ++m) {
        lambda_z_[m] = es.eigenvalues()(m);
        for (int k = 0; k < npz; ++k) z_modes_[m][k] = es.eigenvectors()(k, m);
        // fix sign for determinism: top value nonnegative
        if (z_modes_[m][npz - 1] < 0)
            for (double& v : z_modes_[m]) v = -v;
    }

    cos_norm_x_.resize(d.npx());
    for (int k = 0; k < d.npx(); ++k) {
        double s = 0.0;
        for (int i = 0; i < d.npx(); ++i) {
            const double c = std::cos(std::numbers::pi * k * i / d.nx);
            s += d.wx(i) * c * c;
        }
        cos_norm_x_[k] = 1.0 / std::sqrt(s);
    }
    cos_norm_y_.resize(d.npy());
    for (int k = 0; k < d.npy(); ++k) {
        double s = 0.0;
        for (int j = 0; j < d.npy(); ++j) {
            const double c = std::cos(std::numbers::pi * k * j / d.ny);
            s += d.wy(j) * c * c;
        }
        cos_norm_y_[k] = 1.0 / std::sqrt(s);
    }

    const double cutoff = 1.0 / (h * h);
    for (int kx = 0; kx <= d.nx; ++kx) {
        const double lx = cosine_eigenvalue(kx, d.nx, d.dx());
        if (lx > cutoff) break;
        for (int ky = 0; ky <= d.ny; ++ky) {
            const double ly = cosine_eigenvalue(ky, d.ny, d.dy());
            if (lx + ly > cutoff) break;
            for (int mz = 0; mz < npz; ++mz) {
                const double lz = lambda_z_[mz];
                const double lam = lx + ly + lz;
                if (lam > cutoff) break;
                retained_.push_back({kx, ky, mz, lam, lx, ly, lz});
            }
        }
    }
    std::sort(retained_.begin(), retained_.end(),
              [](const ModalEntry& a, const ModalEntry& b) {
                  if (a.lambda != b.lambda) return a.lambda < b.lambda;
                  if (a.kx != b.kx) return a.kx < b.kx;
                  if (a.ky != b.ky) return a.ky < b.ky;
                  return a.mz < b.mz;
              });
    lambda1_ = lambda_z_[0];
}

double ModalBasis::mode_value(const ModalEntry& e, int i, int j, int k) const {
    const double cx = cos_norm_x_[e.kx] * std::cos(std::numbers::pi * e.kx * i / domain_.nx);
    const double cy = cos_norm_y_[e.ky] * std::cos(std::numbers::pi * e.ky * j / domain_.ny);
    return cx * cy * z_modes_[e.mz][k];
}

Field3D ModalBasis::eigenfunction(int idx) const {
    const ModalEntry& e = retained_.at(idx);
    Field3D f(domain_);
    for (int i = 0; i < domain_.npx(); ++i)
        for (int j = 0; j < domain_.npy(); ++j)
            for (int k = 0; k < domain_.npz(); ++k) f.at(i, j, k) = mode_value(e, i, j, k);
    return f;
}

std::vector<double> ModalBasis::coefficients(const Field3D& f) const {
    std::vector<double> c(retained_.size(), 0.0);
    for (std::size_t m = 0; m < retained_.size(); ++m) {
        const ModalEntry& e = retained_[m];
        double s = 0.0;
        for (int i = 0; i < domain_.npx(); ++i)
            for (int j = 0; j < domain_.npy(); ++j)
                for (int k = 0; k < domain_.npz(); ++k)
                    s += domain_.w3(i, j, k) * f.at(i, j, k) * mode_value(e, i, j, k);
        c[m] = s;
    }
    return c;
}

Field3D ModalBasis::project(const Field3D& f) const {
    const std::vector<double> c = coefficients(f);
    Field3D out(domain_);
    for (std::size_t m = 0; m < retained_.size(); ++m) {
        const ModalEntry& e = retained_[m];
        for (int i = 0; i < domain_.npx(); ++i)
            for (int j = 0; j < domain_.npy(); ++j)
                for (int k = 0; k < domain_.npz(); ++k)
                    out.at(i, j, k) += c[m] * mode_value(e, i, j, k);
    }
    return out;
}

std::string ModalBasis::export_csv() const {
    std::ostringstream os;
    os << "j,lambda,kx,ky,mz\n";
    for (std::size_t m = 0; m < retained_.size(); ++m) {
        const ModalEntry& e = retained_[m];
        os << m << ',' << format_double(e.lambda) << ',' << e.kx << ',' << e.ky << ','
           << e.mz << '\n';
    }
    return os.str();
}

ModalBasis build_modal_basis(const DomainSpec& d, const PhysParams& p, double h) {
    return ModalBasis(d, p, h);
}

namespace {

Field3D volume_mean_field(const Field3D& f, const DomainSpec& d, double h) {
    const int nbx = std::max(1, static_cast<int>(std::lround(d.lx / h)));
    const int nby = std::max(1, static_cast<int>(std::lround(d.ly / h)));
    const int nbz = std::max(1, static_cast<int>(std::lround(d.h_depth / h)));
    const double hbx = d.lx / nbx, hby = d.ly / nby, hbz = d.h_depth / nbz;

    auto box = [](double coord, double hb, int nb) {
        int b = static_cast<int>(std::floor(coord / hb + 1e-12));
        return std::clamp(b, 0, nb - 1);
    };

    std::vector<double> num(static_cast<std::size_t>(nbx) * nby * nbz, 0.0);
    std::vector<double> den(num.size(), 0.0);
    auto bidx = [&](int bi, int bj, int bk) {
        return (static_cast<std::size_t>(bi) * nby + bj) * nbz + bk;
    };

    for (int i = 0; i < d.npx(); ++i) {
        const int bi = box(d.x(i), hbx, nbx);
        for (int j = 0; j < d.npy(); ++j) {
            const int bj = box(d.y(j), hby, nby);
            for (int k = 0; k < d.npz(); ++k) {
                const int bk = box(d.z(k) + d.h_depth, hbz, nbz);
                const double w = d.w3(i, j, k);
                num[bidx(bi, bj, bk)] += w * f.at(i, j, k);
                den[bidx(bi, bj, bk)] += w;
            }
        }
    }
    Field3D out(d);
    for (int i = 0; i < d.npx(); ++i) {
        const int bi = box(d.x(i), hbx, nbx);
        for (int j = 0; j < d.npy(); ++j) {
            const int bj = box(d.y(j), hby, nby);
            for (int k = 0; k < d.npz(); ++k) {
                const int bk = box(d.z(k) + d.h_depth, hbz, nbz);
                const std::size_t b = bidx(bi, bj, bk);
                out.at(i, j, k) = den[b] > 0 ? num[b] / den[b] : 0.0;
            }
        }
    }
    return out;
}

}  // namespace

Field3D apply_interpolant(const Field3D& f, const InterpolantSpec& spec,
                          const ModalBasis* basis) {
    f.require_finite("interpolant input");
    if (spec.kind == InterpolantKind::modal) {
        if (!basis) throw invalid_field_error("modal interpolant requires a basis");
        return basis->project(f);
    }
    return volume_mean_field(f, f.domain(), spec.h);
}

double measure_c0(const InterpolantSpec& spec, const DomainSpec& d, const PhysParams& p,
                  int n_samples, std::uint64_t seed) {
    ModalBasis basis;
    if (spec.kind == InterpolantKind::modal) basis = ModalBasis(d, p, spec.h);
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        SmoothFieldSampler sampler(d, seed + static_cast<std::uint64_t>(s), 4);
        const Field3D f = sampler.sample3d();
        const Field3D g = apply_interpolant(f, spec, &basis);
        Field3D diff(d);
        for (std::size_t n = 0; n < f.data().size(); ++n)
            diff.data()[n] = f.data()[n] - g.data()[n];
        const double h1 = h1_norm(f);
        if (h1 <= 0) continue;
        worst = std::max(worst, l2_norm(diff) / (spec.h * h1));
    }
    return worst;
}

}  // namespace pgnudge
