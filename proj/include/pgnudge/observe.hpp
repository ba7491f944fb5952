#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "pgnudge/domain.hpp"

namespace pgnudge {

enum class InterpolantKind { modal, volume };

/// Observation operator definition: coarse scale h plus the dimensionless c0
/// used in feasibility checks (c0 is normally the measured value).
struct InterpolantSpec {
    InterpolantKind kind = InterpolantKind::modal;
    double h = 0.25;
    double c0 = 1.0;

    void validate(std::vector<std::string>& errs, const std::string& path,
                  const DomainSpec& d) const {
        if (!(h > 0) || h > std::min({d.lx, d.ly, d.h_depth}))
            errs.push_back(path + ".h must be in (0, min(Lx,Ly,H)]");
        if (!(c0 > 0)) errs.push_back(path + ".c0 must be > 0");
    }
};

/// One tensor-product eigenfunction of the temperature operator: cosine
/// wavenumbers (kx, ky) on the Neumann sides and a vertical Sturm-Liouville
/// mode (Robin top, Neumann bottom), with combined eigenvalue
/// lambda = lambda_x + lambda_y + lambda_z of the unweighted -Laplacian.
struct ModalEntry {
    int kx = 0;
    int ky = 0;
    int mz = 0;
    double lambda = 0.0;
    double lambda_x = 0.0;
    double lambda_y = 0.0;
    double lambda_z = 0.0;
};

class ModalBasis {
public:
    ModalBasis() = default;
    ModalBasis(const DomainSpec& d, const PhysParams& p, double h);

    const DomainSpec& domain() const { return domain_; }
    double h() const { return h_; }
    int retained_count() const { return static_cast<int>(retained_.size()); }
    const std::vector<ModalEntry>& retained() const { return retained_; }

    /// Discrete vertical eigenvalues of -d2/dz2 with (Z' + (alpha/K_v) Z)|top = 0,
    /// Z'|bottom = 0, consistent with the stepper's link-form operator.
    const std::vector<double>& vertical_eigenvalues() const { return lambda_z_; }
    /// lambda_1 of the full 3D operator (smallest combined eigenvalue).
    double lambda1() const { return lambda1_; }

    /// Evaluate retained eigenfunction #idx on the grid, orthonormal in the
    /// trapezoid-weighted discrete L2(Omega).
    Field3D eigenfunction(int idx) const;

    /// L2-orthogonal projection onto the retained span.
    Field3D project(const Field3D& f) const;

    /// Inner products <f, w_j> for all retained modes.
    std::vector<double> coefficients(const Field3D& f) const;

    /// CSV export: j, lambda_j, kx, ky, mz (one line per retained mode).
    std::string export_csv() const;

private:
    double mode_value(const ModalEntry& e, int i, int j, int k) const;

    DomainSpec domain_;
    double h_ = 0.0;
    std::vector<ModalEntry> retained_;
    std::vector<double> lambda_z_;                // all vertical eigenvalues
    std::vector<std::vector<double>> z_modes_;    // all vertical eigenvectors (Mz-orthonormal)
    std::vector<double> cos_norm_x_, cos_norm_y_; // 1/||cos|| normalizers
    double lambda1_ = 0.0;
};

/// Builds the modal basis retaining every eigenvalue <= 1/h^2.
ModalBasis build_modal_basis(const DomainSpec& d, const PhysParams& p, double h);

/// Applies I_h. `basis` must be supplied iff spec.kind == modal.
Field3D apply_interpolant(const Field3D& f, const InterpolantSpec& spec,
                          const ModalBasis* basis);

/// Max over n_samples seeded smooth fields of ||f - I_h f|| / (h ||f||_H1).
double measure_c0(const InterpolantSpec& spec, const DomainSpec& d, const PhysParams& p,
                  int n_samples, std::uint64_t seed);

}  // namespace pgnudge
