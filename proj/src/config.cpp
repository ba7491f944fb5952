#include "pgnudge/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "pgnudge/norms.hpp"

namespace pgnudge {

namespace {

using nlohmann::json;

const json& jobj(const json& o, const char* key) {
    static const json empty = json::object();
    if (!o.is_object() || !o.contains(key) || !o.at(key).is_object()) return empty;
    return o.at(key);
}

double jnum(const json& o, const char* key, double def, std::vector<std::string>& errs,
            const std::string& path) {
    if (!o.contains(key)) return def;
    const auto& v = o.at(key);
    if (!v.is_number()) {
        errs.push_back(path + "." + key + " must be a number");
        return def;
    }
    return v.get<double>();
}

int jint(const json& o, const char* key, int def, std::vector<std::string>& errs,
         const std::string& path) {
    if (!o.contains(key)) return def;
    const auto& v = o.at(key);
    if (!v.is_number_integer()) {
        errs.push_back(path + "." + key + " must be an integer");
        return def;
    }
    return v.get<int>();
}

std::string jstr(const json& o, const char* key, const std::string& def,
                 std::vector<std::string>& errs, const std::string& path) {
    if (!o.contains(key)) return def;
    const auto& v = o.at(key);
    if (!v.is_string()) {
        errs.push_back(path + "." + key + " must be a string");
        return def;
    }
    return v.get<std::string>();
}

Mode2D parse_mode2d(const json& o, std::vector<std::string>& errs,
                    const std::string& path) {
    Mode2D m;
    m.amplitude = jnum(o, "amplitude", 0.0, errs, path);
    m.kx = jint(o, "kx", 0, errs, path);
    m.ky = jint(o, "ky", 0, errs, path);
    return m;
}

}  // namespace

Field2D make_mode_field2d(const DomainSpec& d, const Mode2D& m) {
    Field2D f(d);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j)
            f.at(i, j) = m.amplitude * std::cos(std::numbers::pi * m.kx * d.x(i) / d.lx) *
                         std::cos(std::numbers::pi * m.ky * d.y(j) / d.ly);
    return f;
}

Field3D make_mode_field3d(const DomainSpec& d, const Mode3D& m) {
    Field3D f(d);
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j)
            for (int k = 0; k <= d.nz; ++k)
                f.at(i, j, k) =
                    m.amplitude * std::cos(std::numbers::pi * m.kx * d.x(i) / d.lx) *
                    std::cos(std::numbers::pi * m.ky * d.y(j) / d.ly) *
                    std::cos(std::numbers::pi * m.kz * (d.z(k) + d.h_depth) / d.h_depth);
    return f;
}

double mu_heuristic(const PhysParams& p, const ForcingSpec& forcing) {
    const double kt = poincare_constant(p);
    const double ts2 = l2_norm_2d(forcing.tstar) * l2_norm_2d(forcing.tstar);
    const double q = l2_norm(forcing.q);
    const double rat = 4.0 * p.alpha * kt * ts2 + 8.0 * kt * kt * q * q;
    const double th1 = h1_norm_2d(forcing.tstar);
    // theorem lower-bound structure with a C-equivalent of 10
    return 20.0 * (1.0 + 5.0 * rat + 4.0 * ts2 + std::pow(th1, 4.0 / 3.0));
}

void finalize_config(RunConfig& cfg) {
    const DomainSpec& d = cfg.twin.domain;
    cfg.twin.forcing.q = make_mode_field3d(d, cfg.q_mode);
    cfg.twin.forcing.tstar = make_mode_field2d(d, cfg.tstar_mode);
    cfg.twin.forcing.tau1 = make_mode_field2d(d, cfg.tau1_mode);
    cfg.twin.forcing.tau2 = make_mode_field2d(d, cfg.tau2_mode);
    if (cfg.mu_auto) cfg.twin.params.mu = mu_heuristic(cfg.twin.params, cfg.twin.forcing);
    cfg.twin.forcing.refresh(cfg.twin.params);
}

RunConfig parse_config(const json& j) {
    std::vector<std::string> errs;
    if (!j.is_object()) throw config_error({"configuration root must be a JSON object"});
    RunConfig cfg;
    TwinConfig& t = cfg.twin;

    const json& dom = jobj(j, "domain");
    t.domain.lx = jnum(dom, "Lx", 1.0, errs, "domain");
    t.domain.ly = jnum(dom, "Ly", 1.0, errs, "domain");
    t.domain.h_depth = jnum(dom, "H", 1.0, errs, "domain");
    t.domain.nx = jint(dom, "nx", 16, errs, "domain");
    t.domain.ny = jint(dom, "ny", 16, errs, "domain");
    t.domain.nz = jint(dom, "nz", 8, errs, "domain");

    const json& par = jobj(j, "params");
    t.params.a_h = jnum(par, "A_h", 1.0, errs, "params");
    t.params.a_v = jnum(par, "A_v", 1.0, errs, "params");
    t.params.k_h = jnum(par, "K_h", 1.0, errs, "params");
    t.params.k_v = jnum(par, "K_v", 1.0, errs, "params");
    t.params.alpha = jnum(par, "alpha", 1.0, errs, "params");
    t.params.f0 = jnum(par, "f0", 0.0, errs, "params");
    t.params.beta = jnum(par, "beta", 0.0, errs, "params");
    t.params.h_depth = t.domain.h_depth;
    if (par.contains("mu") && par.at("mu").is_string()) {
        if (par.at("mu").get<std::string>() == "auto")
            cfg.mu_auto = true;
        else
            errs.push_back("params.mu must be a number or \"auto\"");
    } else {
        t.params.mu = jnum(par, "mu", 0.0, errs, "params");
    }

    const json& frc = jobj(j, "forcing");
    const json& qj = jobj(frc, "Q");
    cfg.q_mode.amplitude = jnum(qj, "amplitude", 0.0, errs, "forcing.Q");
    cfg.q_mode.kx = jint(qj, "kx", 0, errs, "forcing.Q");
    cfg.q_mode.ky = jint(qj, "ky", 0, errs, "forcing.Q");
    cfg.q_mode.kz = jint(qj, "kz", 0, errs, "forcing.Q");
    cfg.tstar_mode = parse_mode2d(jobj(frc, "Tstar"), errs, "forcing.Tstar");
    cfg.tau1_mode = parse_mode2d(jobj(frc, "tau1"), errs, "forcing.tau1");
    cfg.tau2_mode = parse_mode2d(jobj(frc, "tau2"), errs, "forcing.tau2");

    const json& sol = jobj(j, "solver");
    t.solver.tol = jnum(sol, "tol", 1e-10, errs, "solver");
    t.solver.max_iter = jint(sol, "max_iter", 50, errs, "solver");
    const std::string method = jstr(sol, "method", "iterative-krylov", errs, "solver");
    if (method == "iterative-krylov")
        t.solver.method = SolveMethod::iterative_krylov;
    else if (method == "dense-direct")
        t.solver.method = SolveMethod::dense_direct;
    else
        errs.push_back("solver.method must be iterative-krylov or dense-direct");

    const json& stp = jobj(j, "stepper");
    t.stepper.dt = jnum(stp, "dt", 0.01, errs, "stepper");
    const std::string scheme = jstr(stp, "scheme", "imex-euler", errs, "stepper");
    if (scheme == "imex-euler")
        t.stepper.scheme = TimeScheme::imex_euler;
    else if (scheme == "imex-cn")
        t.stepper.scheme = TimeScheme::imex_cn;
    else
        errs.push_back("stepper.scheme must be imex-euler or imex-cn");

    const json& itp = jobj(j, "interpolant");
    const std::string kind = jstr(itp, "kind", "modal", errs, "interpolant");
    if (kind == "modal")
        t.interpolant.kind = InterpolantKind::modal;
    else if (kind == "volume")
        t.interpolant.kind = InterpolantKind::volume;
    else
        errs.push_back("interpolant.kind must be modal or volume");
    t.interpolant.h = jnum(itp, "h", 0.25, errs, "interpolant");
    t.interpolant.c0 = jnum(itp, "c0", 1.0, errs, "interpolant");

    const json& asm_ = jobj(j, "assimilation");
    t.spin_up_time = jnum(asm_, "spin_up_time", 5.0, errs, "assimilation");
    t.assimilation_time = jnum(asm_, "assimilation_time", 10.0, errs, "assimilation");
    const std::string mode = jstr(asm_, "eta0_mode", "zero", errs, "assimilation");
    if (mode == "zero")
        t.eta0_mode = Eta0Mode::zero;
    else if (mode == "random")
        t.eta0_mode = Eta0Mode::random;
    else if (mode == "perturbed")
        t.eta0_mode = Eta0Mode::perturbed;
    else
        errs.push_back("assimilation.eta0_mode must be zero, random, or perturbed");
    t.eta0_eps = jnum(asm_, "eta0_eps", 0.0, errs, "assimilation");
    t.obs_stride = jint(asm_, "obs_stride", 1, errs, "assimilation");

    const json& ini = jobj(j, "init");
    t.seed = static_cast<std::uint64_t>(jint(ini, "seed", 1, errs, "init"));
    t.init_amplitude = jnum(ini, "amplitude", 1.0, errs, "init");
    t.init_max_mode = jint(ini, "max_mode", 2, errs, "init");

    const json& outp = jobj(j, "output");
    cfg.snapshot_stride = jint(outp, "snapshot_stride", 100, errs, "output");
    t.record_stride = jint(outp, "record_stride", 1, errs, "output");
    if (cfg.snapshot_stride < 1) errs.push_back("output.snapshot_stride must be >= 1");

    const json& thy = jobj(j, "theory");
    cfg.theory_c = jnum(thy, "C", 1.0, errs, "theory");
    cfg.r = jnum(thy, "r", 1.0, errs, "theory");
    if (!(cfg.theory_c > 0)) errs.push_back("theory.C must be > 0");
    if (!(cfg.r > 0)) errs.push_back("theory.r must be > 0");

    // structural validity first: field construction needs a sane domain
    std::vector<std::string> dom_errs;
    t.domain.validate(dom_errs, "domain");
    if (!dom_errs.empty() || !errs.empty()) {
        errs.insert(errs.end(), dom_errs.begin(), dom_errs.end());
        throw config_error(errs);
    }

    finalize_config(cfg);

    std::vector<std::string> full;
    t.validate(full, "");
    for (std::string& e : full)
        if (!e.empty() && e.front() == '.') e.erase(e.begin());
    if (!full.empty()) throw config_error(full);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error({"cannot open config file: " + path});
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error({std::string("config is not valid JSON: ") + e.what()});
    }
    return parse_config(j);
}

nlohmann::ordered_json config_echo(const RunConfig& cfg) {
    const TwinConfig& t = cfg.twin;
    nlohmann::ordered_json j;
    j["domain"] = {{"Lx", t.domain.lx}, {"Ly", t.domain.ly}, {"H", t.domain.h_depth},
                   {"nx", t.domain.nx}, {"ny", t.domain.ny}, {"nz", t.domain.nz}};
    j["params"] = {{"A_h", t.params.a_h}, {"A_v", t.params.a_v}, {"K_h", t.params.k_h},
                   {"K_v", t.params.k_v}, {"alpha", t.params.alpha}, {"f0", t.params.f0},
                   {"beta", t.params.beta}, {"mu", t.params.mu}};
    j["forcing"] = {
        {"Q",
         {{"amplitude", cfg.q_mode.amplitude},
          {"kx", cfg.q_mode.kx},
          {"ky", cfg.q_mode.ky},
          {"kz", cfg.q_mode.kz}}},
        {"Tstar",
         {{"amplitude", cfg.tstar_mode.amplitude},
          {"kx", cfg.tstar_mode.kx},
          {"ky", cfg.tstar_mode.ky}}},
        {"tau1",
         {{"amplitude", cfg.tau1_mode.amplitude},
          {"kx", cfg.tau1_mode.kx},
          {"ky", cfg.tau1_mode.ky}}},
        {"tau2",
         {{"amplitude", cfg.tau2_mode.amplitude},
          {"kx", cfg.tau2_mode.kx},
          {"ky", cfg.tau2_mode.ky}}}};
    j["solver"] = {{"tol", t.solver.tol},
                   {"max_iter", t.solver.max_iter},
                   {"method", t.solver.method == SolveMethod::iterative_krylov
                                  ? "iterative-krylov"
                                  : "dense-direct"}};
    j["stepper"] = {
        {"dt", t.stepper.dt},
        {"scheme", t.stepper.scheme == TimeScheme::imex_euler ? "imex-euler" : "imex-cn"}};
    j["interpolant"] = {
        {"kind", t.interpolant.kind == InterpolantKind::modal ? "modal" : "volume"},
        {"h", t.interpolant.h},
        {"c0", t.interpolant.c0}};
    const char* mode = t.eta0_mode == Eta0Mode::zero
                           ? "zero"
                           : (t.eta0_mode == Eta0Mode::random ? "random" : "perturbed");
    j["assimilation"] = {{"spin_up_time", t.spin_up_time},
                         {"assimilation_time", t.assimilation_time},
                         {"eta0_mode", mode},
                         {"eta0_eps", t.eta0_eps},
                         {"obs_stride", t.obs_stride}};
    j["init"] = {{"seed", static_cast<long long>(t.seed)},
                 {"amplitude", t.init_amplitude},
                 {"max_mode", t.init_max_mode}};
    j["output"] = {{"snapshot_stride", cfg.snapshot_stride},
                   {"record_stride", t.record_stride}};
    j["theory"] = {{"C", cfg.theory_c}, {"r", cfg.r}};
    return j;
}

}  // namespace pgnudge
