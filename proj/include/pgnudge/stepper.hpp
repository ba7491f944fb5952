#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pgnudge/diagnostic.hpp"
#include "pgnudge/domain.hpp"

namespace pgnudge {

/// External forcing: interior heat source Q, surface reference temperature T*,
/// wind stress tau. qstar = Q + K_h lap T* (extended uniformly in z) is derived
/// and must be refreshed whenever Q or T* changes.
struct ForcingSpec {
    Field3D q;
    Field2D tstar;
    Field2D tau1;
    Field2D tau2;
    Field3D qstar;
    double com_violation = 0.0;  // max |dT*/dn| on the side walls

    void refresh(const PhysParams& p);
};

Field3D compute_qstar(const Field3D& q, const Field2D& tstar, const PhysParams& p);

/// Max one-sided normal derivative of T* on the side boundary; the surface
/// forcing is compatible with the wall conditions when this is ~0.
double measure_com_violation(const Field2D& tstar);

enum class TimeScheme { imex_euler, imex_cn };

struct StepperSettings {
    double dt = 0.01;
    TimeScheme scheme = TimeScheme::imex_euler;

    void validate(std::vector<std::string>& errs, const std::string& path) const {
        if (!(dt > 0)) errs.push_back(path + ".dt must be > 0");
    }
};

struct ModelState {
    Field3D ttilde;
    double time = 0.0;
    DiagnosticSolution diag;
};

/// Explicit transport tendency -[u . grad Ttilde + w dz Ttilde + u . grad T*]
/// in skew-symmetrized centered form, with w reconstructed from diag.u.
Field3D advection_tendency(const Field3D& ttilde, const DiagnosticSolution& diag,
                           const Field2D& tstar);

/// Advective CFL number dt * max(|u1|/dx, |u2|/dy, |w|/dz).
double cfl_number(const DiagnosticSolution& diag, double dt);

/// Trapezoid-mass / link-stiffness discretization of the diffusion operator
/// with Robin top and Neumann bottom/side rows, the same quadratic form the
/// energy norm integrates. Factorizations of (M + c A) are cached per c.
class DiffusionOperator {
public:
    DiffusionOperator(const DomainSpec& d, const PhysParams& p);
    ~DiffusionOperator();
    DiffusionOperator(DiffusionOperator&&) noexcept;
    DiffusionOperator& operator=(DiffusionOperator&&) noexcept;

    /// M^{-1} A f, the strong-form diffusion L2 f.
    Field3D apply(const Field3D& f) const;
    /// f^T A f (square of the energy seminorm).
    double quadratic_form(const Field3D& f) const;
    /// Solves (M + dt A) out = M t + dt M src.
    Field3D implicit_euler(const Field3D& t, double dt, const Field3D* src = nullptr) const;
    /// Solves (M + dt/2 A) out = (M - dt/2 A) t + dt M src.
    Field3D crank_nicolson(const Field3D& t, double dt, const Field3D* src = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One backward-Euler diffusion solve (I + dt L2) out = f.
Field3D diffusion_step(const Field3D& ttilde, double dt, const PhysParams& p);

/// Advances one trajectory of the temperature equation: explicit transport,
/// source and optional nudging tendency, implicit diffusion, then a diagnostic
/// re-solve so the cached velocity stays consistent with the new temperature.
class Stepper {
public:
    Stepper(const DomainSpec& d, const PhysParams& p, const SolverSettings& solver,
            const StepperSettings& s);

    ModelState initialize(const Field3D& t0, const ForcingSpec& f) const;
    ModelState step(const ModelState& state, const ForcingSpec& f,
                    const Field3D* nudge_tendency = nullptr) const;

    const StepperSettings& settings() const { return settings_; }
    const DiffusionOperator& diffusion() const { return diffusion_; }
    const DiagnosticSolver& diagnostic() const { return diag_solver_; }

private:
    DomainSpec domain_;
    PhysParams params_;
    StepperSettings settings_;
    DiagnosticSolver diag_solver_;
    DiffusionOperator diffusion_;
};

}  // namespace pgnudge
