#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgnudge/observe.hpp"
#include "pgnudge/stepper.hpp"

namespace pgnudge {

enum class Eta0Mode { zero, random, perturbed };

/// Full twin-experiment description: reference trajectory setup, nudging
/// parameters, and the recording cadence.
struct TwinConfig {
    DomainSpec domain;
    PhysParams params;
    ForcingSpec forcing;
    SolverSettings solver;
    StepperSettings stepper;
    InterpolantSpec interpolant;
    double spin_up_time = 5.0;
    double assimilation_time = 10.0;
    Eta0Mode eta0_mode = Eta0Mode::zero;
    double eta0_eps = 0.0;   // perturbation size for Eta0Mode::perturbed
    std::uint64_t seed = 1;  // reference initial field (and eta0 when random)
    double init_amplitude = 1.0;
    int init_max_mode = 2;
    int record_stride = 1;  // series sample every this many steps
    int obs_stride = 1;     // nudging recomputed every this many steps

    void validate(std::vector<std::string>& errs, const std::string& path) const;
};

struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> l2_chi;  // |eta - Ttilde|
    std::vector<double> h1_u;    // ||v - u||_H1
    std::vector<double> l2_ref;  // |Ttilde|
    std::vector<double> cfl;
    std::vector<int> diag_iters;

    std::string to_csv() const;
};

struct TwinResult {
    ErrorSeries series;
    Field3D final_chi;
    Field3D final_ref;
    Field3D final_eta;
    VectorField final_u_diff;
    double measured_c0 = 0.0;
};

/// Every constant of the convergence theorem, evaluated from the configured
/// physical parameters and forcing norms; C is the analysis constant the
/// theorem leaves unspecified, supplied by the user.
struct TheoremConstants {
    double k_tilde = 0.0;
    double r_a_tilde = 0.0;
    double r_a = 0.0;
    double k_r = 0.0;
    double r_v = 0.0;
    double mu_min = 0.0;
    double smallness = 0.0;  // mu * c0^2 * h^2
    bool mu_large_enough = false;
    bool mu_small_enough = false;
    bool feasible = false;
    // echoed inputs
    double tstar_l2 = 0.0;
    double tstar_h1 = 0.0;
    double tstar_h2 = 0.0;
    double q_l2 = 0.0;
    double tau_h1 = 0.0;
    double theory_c = 1.0;
    double c0 = 0.0;
    double h = 0.0;
    double mu = 0.0;
    double lambda1 = 0.0;
    double r = 1.0;
};

struct DecayFit {
    double rate = 0.0;  // lambda, positive for decay
    double intercept = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    double goodness = 0.0;  // coefficient of determination
    int n_samples = 0;
};

struct GronwallReport {
    bool alpha_window_ok = false;       // min window integral of alpha >= gamma
    bool alpha_minus_bounded = false;   // window integral of alpha^- bounded
    bool beta_vanishes = false;         // window integral of beta^+ -> 0
    bool decays = false;                // Y shows exponential tail decay
    bool pass = false;
    double min_alpha_integral = 0.0;
    double max_alpha_minus_integral = 0.0;
    double tail_beta_integral = 0.0;
    double tail_rate = 0.0;
};

/// -mu (I_h eta - I_h obs); the basis is required for the modal kind.
Field3D nudging_tendency(const Field3D& eta, const Field3D& ttilde_obs,
                         const InterpolantSpec& spec, const ModalBasis* basis, double mu);

TheoremConstants theorem_constants(const PhysParams& p, const ForcingSpec& forcing,
                                   const InterpolantSpec& spec, double theory_c, double r,
                                   double lambda1, double c0);

TwinResult run_twin(const TwinConfig& cfg);

/// Log-linear least squares on samples whose relative error lies in
/// [floor, ceiling]; throws insufficient_data_error below 4 samples.
DecayFit fit_decay_rate(const ErrorSeries& series, double floor_frac, double ceiling_frac);

GronwallReport gronwall_check(const std::vector<double>& y, const std::vector<double>& alpha,
                              const std::vector<double>& beta, double dt, double tau,
                              double gamma);

}  // namespace pgnudge
