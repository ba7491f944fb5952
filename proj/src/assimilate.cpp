#include "pgnudge/assimilate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pgnudge/norms.hpp"
#include "pgnudge/random_fields.hpp"
#include "pgnudge/snapshot_io.hpp"

namespace pgnudge {

void TwinConfig::validate(std::vector<std::string>& errs, const std::string& path) const {
    domain.validate(errs, path + ".domain");
    params.validate(errs, path + ".params");
    solver.validate(errs, path + ".solver");
    stepper.validate(errs, path + ".stepper");
    interpolant.validate(errs, path + ".interpolant", domain);
    if (!(spin_up_time >= 0)) errs.push_back(path + ".spin_up_time must be >= 0");
    if (!(assimilation_time > 0)) errs.push_back(path + ".assimilation_time must be > 0");
    if (!(params.mu >= 0)) errs.push_back(path + ".params.mu must be >= 0");
    if (stepper.dt * params.mu > 0.5)
        errs.push_back(path + ".stepper.dt times mu must be <= 0.5 (explicit nudging)");
    if (record_stride < 1) errs.push_back(path + ".record_stride must be >= 1");
    if (obs_stride < 1) errs.push_back(path + ".obs_stride must be >= 1");
    if (eta0_mode == Eta0Mode::perturbed && !(eta0_eps >= 0))
        errs.push_back(path + ".eta0_eps must be >= 0");
    if (!(init_amplitude >= 0)) errs.push_back(path + ".init_amplitude must be >= 0");
    if (init_max_mode < 1) errs.push_back(path + ".init_max_mode must be >= 1");
}

std::string ErrorSeries::to_csv() const {
    std::ostringstream os;
    os << "time,l2_chi,h1_U,l2_ref\n";
    for (std::size_t n = 0; n < times.size(); ++n)
        os << format_double(times[n]) << ',' << format_double(l2_chi[n]) << ','
           << format_double(h1_u[n]) << ',' << format_double(l2_ref[n]) << '\n';
    return os.str();
}

Field3D nudging_tendency(const Field3D& eta, const Field3D& ttilde_obs,
                         const InterpolantSpec& spec, const ModalBasis* basis, double mu) {
    const auto& d = eta.domain();
    if (!d.same_grid(ttilde_obs.domain()))
        throw invalid_field_error("nudging_tendency: grids differ");
    if (!(mu >= 0)) throw invalid_field_error("nudging_tendency: mu must be >= 0");
    if (mu == 0.0) return Field3D(d);
    Field3D diff(d);
    for (std::size_t n = 0; n < diff.data().size(); ++n)
        diff.data()[n] = eta.data()[n] - ttilde_obs.data()[n];
    Field3D g = apply_interpolant(diff, spec, basis);
    for (double& v : g.data()) v *= -mu;
    return g;
}

TheoremConstants theorem_constants(const PhysParams& p, const ForcingSpec& forcing,
                                   const InterpolantSpec& spec, double theory_c, double r,
                                   double lambda1, double c0) {
    TheoremConstants tc;
    tc.theory_c = theory_c;
    tc.r = r;
    tc.lambda1 = lambda1;
    tc.c0 = c0;
    tc.h = spec.h;
    tc.mu = p.mu;
    tc.tstar_l2 = l2_norm_2d(forcing.tstar);
    tc.tstar_h1 = h1_norm_2d(forcing.tstar);
    tc.tstar_h2 = h2_norm_2d(forcing.tstar);
    tc.q_l2 = l2_norm(forcing.q);
    const double th1a = h1_norm_2d(forcing.tau1);
    const double th1b = h1_norm_2d(forcing.tau2);
    tc.tau_h1 = std::sqrt(th1a * th1a + th1b * th1b);

    const double kt = poincare_constant(p);
    const double ts2 = tc.tstar_l2 * tc.tstar_l2;
    const double q2 = tc.q_l2 * tc.q_l2;
    tc.k_tilde = kt;
    tc.r_a_tilde = 4.0 * p.alpha * kt * ts2 + 8.0 * kt * kt * q2;
    tc.r_a = 2.0 * tc.r_a_tilde + 2.0 * ts2;
    tc.k_r = 2.0 * tc.r_a + tc.r_a_tilde * r;

    const double ra = tc.r_a;
    const double th2sq = tc.tstar_h2 * tc.tstar_h2;
    const double tausq = tc.tau_h1 * tc.tau_h1;
    const double bracket = ra / std::sqrt(r) + tc.tstar_h1 + tc.q_l2 +
                           (theory_c / std::sqrt(lambda1)) *
                               (1.0 + th2sq + tc.q_l2 + tausq + ra * ra);
    const double expo = theory_c * (std::pow(ra, 4) +
                                    (th2sq * th2sq + tausq * tausq + std::pow(ra, 4)) * r);
    tc.r_v = theory_c * bracket * std::exp(expo);

    tc.mu_min = 2.0 * theory_c *
                (1.0 + 5.0 * tc.r_a_tilde + 4.0 * ts2 + std::pow(tc.tstar_h1, 4.0 / 3.0));
    tc.smallness = p.mu * c0 * c0 * spec.h * spec.h;
    tc.mu_large_enough = p.mu >= tc.mu_min;
    tc.mu_small_enough = tc.smallness <= 1.0;
    tc.feasible = tc.mu_large_enough && tc.mu_small_enough;
    return tc;
}

namespace {

void record_sample(ErrorSeries& s, double t, const ModelState& ref, const ModelState& eta,
                   double dt) {
    const auto& d = ref.ttilde.domain();
    Field3D chi(d);
    for (std::size_t n = 0; n < chi.data().size(); ++n)
        chi.data()[n] = eta.ttilde.data()[n] - ref.ttilde.data()[n];
    VectorField du(d);
    for (std::size_t n = 0; n < du.u1.data().size(); ++n) {
        du.u1.data()[n] = eta.diag.u.u1.data()[n] - ref.diag.u.u1.data()[n];
        du.u2.data()[n] = eta.diag.u.u2.data()[n] - ref.diag.u.u2.data()[n];
    }
    s.times.push_back(t);
    s.l2_chi.push_back(l2_norm(chi));
    s.h1_u.push_back(h1_norm(du));
    s.l2_ref.push_back(l2_norm(ref.ttilde));
    s.cfl.push_back(cfl_number(ref.diag, dt));
    s.diag_iters.push_back(ref.diag.iterations);
}

}  // namespace

TwinResult run_twin(const TwinConfig& cfg) {
    std::vector<std::string> errs;
    cfg.validate(errs, "twin");
    if (!errs.empty()) throw config_error(errs);

    ForcingSpec forcing = cfg.forcing;
    forcing.refresh(cfg.params);

    Stepper stepper(cfg.domain, cfg.params, cfg.solver, cfg.stepper);
    const double dt = cfg.stepper.dt;

    SmoothFieldSampler init_sampler(cfg.domain, cfg.seed, cfg.init_max_mode,
                                    cfg.init_amplitude);
    ModelState ref = stepper.initialize(init_sampler.sample3d(), forcing);
    const long n_spin = std::lround(cfg.spin_up_time / dt);
    for (long n = 0; n < n_spin; ++n) ref = stepper.step(ref, forcing);

    Field3D eta0(cfg.domain);
    if (cfg.eta0_mode == Eta0Mode::random) {
        SmoothFieldSampler s(cfg.domain, cfg.seed + 1000, cfg.init_max_mode,
                             cfg.init_amplitude);
        eta0 = s.sample3d();
    } else if (cfg.eta0_mode == Eta0Mode::perturbed) {
        SmoothFieldSampler s(cfg.domain, cfg.seed + 2000, cfg.init_max_mode, 1.0);
        Field3D pert = s.sample3d();
        eta0 = ref.ttilde;
        for (std::size_t n = 0; n < eta0.data().size(); ++n)
            eta0.data()[n] += cfg.eta0_eps * pert.data()[n];
    }
    ModelState eta = stepper.initialize(eta0, forcing);

    ModalBasis basis;
    if (cfg.interpolant.kind == InterpolantKind::modal)
        basis = ModalBasis(cfg.domain, cfg.params, cfg.interpolant.h);

    TwinResult out;
    out.measured_c0 = measure_c0(cfg.interpolant, cfg.domain, cfg.params, 25, 777);

    const long n_assim = std::lround(cfg.assimilation_time / dt);
    record_sample(out.series, 0.0, ref, eta, dt);
    Field3D nudge;
    for (long n = 0; n < n_assim; ++n) {
        const bool nudging = cfg.params.mu > 0;
        if (nudging && n % cfg.obs_stride == 0)
            nudge = nudging_tendency(eta.ttilde, ref.ttilde, cfg.interpolant, &basis,
                                     cfg.params.mu);
        ModelState ref_next = stepper.step(ref, forcing);
        ModelState eta_next = stepper.step(eta, forcing, nudging ? &nudge : nullptr);
        ref = std::move(ref_next);
        eta = std::move(eta_next);
        if ((n + 1) % cfg.record_stride == 0 || n + 1 == n_assim)
            record_sample(out.series, (n + 1) * dt, ref, eta, dt);
    }

    out.final_ref = ref.ttilde;
    out.final_eta = eta.ttilde;
    out.final_chi = Field3D(cfg.domain);
    for (std::size_t n = 0; n < out.final_chi.data().size(); ++n)
        out.final_chi.data()[n] = eta.ttilde.data()[n] - ref.ttilde.data()[n];
    out.final_u_diff = VectorField(cfg.domain);
    for (std::size_t n = 0; n < out.final_u_diff.u1.data().size(); ++n) {
        out.final_u_diff.u1.data()[n] = eta.diag.u.u1.data()[n] - ref.diag.u.u1.data()[n];
        out.final_u_diff.u2.data()[n] = eta.diag.u.u2.data()[n] - ref.diag.u.u2.data()[n];
    }
    return out;
}

DecayFit fit_decay_rate(const ErrorSeries& series, double floor_frac, double ceiling_frac) {
    if (series.times.empty()) throw insufficient_data_error("decay fit: empty series");
    if (!(floor_frac > 0 && floor_frac < ceiling_frac))
        throw invalid_field_error("decay fit: need 0 < floor < ceiling");
    const double base = series.l2_chi.front();
    std::vector<double> ts, ys;
    for (std::size_t n = 0; n < series.times.size(); ++n) {
        const double v = series.l2_chi[n];
        if (v <= 0 || base <= 0) continue;
        const double rel = v / base;
        if (rel < floor_frac || rel > ceiling_frac) continue;
        ts.push_back(series.times[n]);
        ys.push_back(std::log(v));
    }
    if (ts.size() < 4)
        throw insufficient_data_error("decay fit: fewer than 4 samples in window");

    const double n = static_cast<double>(ts.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t m = 0; m < ts.size(); ++m) {
        st += ts[m];
        sy += ys[m];
        stt += ts[m] * ts[m];
        sty += ts[m] * ys[m];
    }
    const double det = n * stt - st * st;
    const double slope = (n * sty - st * sy) / det;
    const double icept = (sy - slope * st) / n;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t m = 0; m < ts.size(); ++m) {
        const double pred = icept + slope * ts[m];
        ss_res += (ys[m] - pred) * (ys[m] - pred);
        ss_tot += (ys[m] - mean_y) * (ys[m] - mean_y);
    }
    DecayFit fit;
    fit.rate = -slope;
    fit.intercept = icept;
    fit.t0 = ts.front();
    fit.t1 = ts.back();
    fit.n_samples = static_cast<int>(ts.size());
    fit.goodness = ss_tot > 1e-300 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

namespace {

// trapezoid integral over samples [a, a+w]
double window_integral(const std::vector<double>& f, std::size_t a, std::size_t w,
                       double dt) {
    double acc = 0.5 * (f[a] + f[a + w]);
    for (std::size_t m = a + 1; m < a + w; ++m) acc += f[m];
    return acc * dt;
}

}  // namespace

GronwallReport gronwall_check(const std::vector<double>& y, const std::vector<double>& alpha,
                              const std::vector<double>& beta, double dt, double tau,
                              double gamma) {
    const std::size_t n = y.size();
    if (n < 2 || alpha.size() != n || beta.size() != n)
        throw invalid_field_error("gronwall check: arrays must share a uniform grid");
    const double ratio = tau / dt;
    const std::size_t w = static_cast<std::size_t>(std::lround(ratio));
    if (w < 1 || std::abs(ratio - static_cast<double>(w)) > 1e-9)
        throw invalid_field_error("gronwall check: tau must be a multiple of the step");
    if (n <= w) throw insufficient_data_error("gronwall check: horizon shorter than tau");

    std::vector<double> am(n), bp(n);
    for (std::size_t m = 0; m < n; ++m) {
        am[m] = std::max(-alpha[m], 0.0);
        bp[m] = std::max(beta[m], 0.0);
    }

    GronwallReport rep;
    const std::size_t last = n - 1 - w;
    const std::size_t tail_start = last / 2;
    double min_a = std::numeric_limits<double>::infinity();
    double max_am = 0.0, max_bp = 0.0, tail_bp = 0.0;
    for (std::size_t a = 0; a <= last; ++a) {
        if (a >= tail_start) min_a = std::min(min_a, window_integral(alpha, a, w, dt));
        max_am = std::max(max_am, window_integral(am, a, w, dt));
        const double b = window_integral(bp, a, w, dt);
        max_bp = std::max(max_bp, b);
        if (a >= last - std::min(last, last / 4)) tail_bp = std::max(tail_bp, b);
    }
    rep.min_alpha_integral = min_a;
    rep.max_alpha_minus_integral = max_am;
    rep.tail_beta_integral = tail_bp;
    rep.alpha_window_ok = min_a >= gamma * (1.0 - 1e-9) - 1e-12;
    rep.alpha_minus_bounded = std::isfinite(max_am);
    rep.beta_vanishes = tail_bp <= 1e-8 + 0.01 * max_bp;

    // exponential tail: log-linear fit on the second half of positive samples
    std::vector<double> ts, ys;
    for (std::size_t m = n / 2; m < n; ++m)
        if (y[m] > 0) {
            ts.push_back(m * dt);
            ys.push_back(std::log(y[m]));
        }
    if (ts.size() >= 4) {
        const double cnt = static_cast<double>(ts.size());
        double st = 0, sy = 0, stt = 0, sty = 0;
        for (std::size_t m = 0; m < ts.size(); ++m) {
            st += ts[m];
            sy += ys[m];
            stt += ts[m] * ts[m];
            sty += ts[m] * ys[m];
        }
        const double slope = (cnt * sty - st * sy) / (cnt * stt - st * st);
        rep.tail_rate = -slope;
        rep.decays = rep.tail_rate > 0;
    } else if (!ts.empty() && ts.size() < 4) {
        rep.decays = false;
    } else {
        // all tail samples are exactly zero: fully decayed
        rep.tail_rate = std::numeric_limits<double>::infinity();
        rep.decays = true;
    }
    rep.pass = rep.alpha_window_ok && rep.alpha_minus_bounded && rep.beta_vanishes &&
               rep.decays;
    return rep;
}

}  // namespace pgnudge
