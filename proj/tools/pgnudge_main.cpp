#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <Eigen/Core>

#include "pgnudge/assimilate.hpp"
#include "pgnudge/config.hpp"
#include "pgnudge/norms.hpp"
#include "pgnudge/random_fields.hpp"
#include "pgnudge/snapshot_io.hpp"

namespace fs = std::filesystem;
using namespace pgnudge;

namespace {

struct PhaseTimer {
    std::ostringstream log;
    std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

    void lap(const std::string& phase) {
        auto now = std::chrono::steady_clock::now();
        const double ms =
            std::chrono::duration_cast<std::chrono::microseconds>(now - mark).count() /
            1000.0;
        log << phase << " " << ms << " ms\n";
        mark = now;
    }
    // timings go to their own log so CSV/JSON artifacts stay byte-reproducible
    void flush(const fs::path& dir) {
        std::ofstream(dir / "timings.log") << log.str();
    }
};

void prepare_out_dir(const fs::path& dir, bool force) {
    if (fs::exists(dir) && !fs::is_directory(dir))
        throw config_error({"--out exists and is not a directory: " + dir.string()});
    if (fs::is_directory(dir) && !fs::is_empty(dir) && !force)
        throw config_error({"--out directory is not empty (pass --force to reuse): " +
                            dir.string()});
    fs::create_directories(dir);
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

std::string pad_step(long n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06ld", n);
    return buf;
}

nlohmann::ordered_json constants_json(const TheoremConstants& tc) {
    nlohmann::ordered_json j;
    j["K_tilde"] = tc.k_tilde;
    j["R_a_tilde"] = tc.r_a_tilde;
    j["R_a"] = tc.r_a;
    j["K_r"] = tc.k_r;
    j["R_v"] = tc.r_v;
    j["mu_min"] = tc.mu_min;
    j["smallness"] = tc.smallness;
    j["mu_large_enough"] = tc.mu_large_enough;
    j["mu_small_enough"] = tc.mu_small_enough;
    j["feasible"] = tc.feasible;
    j["inputs"] = {{"Tstar_l2", tc.tstar_l2}, {"Tstar_h1", tc.tstar_h1},
                   {"Tstar_h2", tc.tstar_h2}, {"Q_l2", tc.q_l2},
                   {"tau_h1", tc.tau_h1},     {"C", tc.theory_c},
                   {"c0", tc.c0},             {"h", tc.h},
                   {"mu", tc.mu},             {"lambda1", tc.lambda1},
                   {"r", tc.r}};
    return j;
}

nlohmann::ordered_json fit_json(const DecayFit& f) {
    nlohmann::ordered_json j;
    j["rate"] = f.rate;
    j["intercept"] = f.intercept;
    j["t0"] = f.t0;
    j["t1"] = f.t1;
    j["goodness"] = f.goodness;
    j["n_samples"] = f.n_samples;
    return j;
}

TheoremConstants compute_constants(const RunConfig& cfg) {
    ModalBasis basis(cfg.twin.domain, cfg.twin.params, cfg.twin.interpolant.h);
    const double c0 =
        measure_c0(cfg.twin.interpolant, cfg.twin.domain, cfg.twin.params, 25, 777);
    return theorem_constants(cfg.twin.params, cfg.twin.forcing, cfg.twin.interpolant,
                             cfg.theory_c, cfg.r, basis.lambda1(), c0);
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out, bool force) {
    prepare_out_dir(out, force);
    PhaseTimer timer;

    const TwinConfig& t = cfg.twin;
    Stepper stepper(t.domain, t.params, t.solver, t.stepper);
    SmoothFieldSampler sampler(t.domain, t.seed, t.init_max_mode, t.init_amplitude);
    ModelState st = stepper.initialize(sampler.sample3d(), t.forcing);
    timer.lap("setup");

    const double total = t.spin_up_time + t.assimilation_time;
    const long n_steps = std::lround(total / t.stepper.dt);
    std::ostringstream csv;
    csv << "time,l2_T,energy_T,l2_chi,h1_U,cfl,diag_iters\n";
    auto record = [&](const ModelState& s) {
        csv << format_double(s.time) << ',' << format_double(l2_norm(s.ttilde)) << ','
            << format_double(energy_norm(s.ttilde, t.params)) << ",0,0,"
            << format_double(cfl_number(s.diag, t.stepper.dt)) << ','
            << s.diag.iterations << '\n';
    };
    record(st);
    write_snapshot((out / ("T_" + pad_step(0))).string(), st.ttilde, "T", st.time);
    for (long n = 0; n < n_steps; ++n) {
        st = stepper.step(st, t.forcing);
        if ((n + 1) % t.record_stride == 0 || n + 1 == n_steps) record(st);
        if ((n + 1) % cfg.snapshot_stride == 0 || n + 1 == n_steps)
            write_snapshot((out / ("T_" + pad_step(n + 1))).string(), st.ttilde, "T",
                           st.time);
    }
    timer.lap("run");

    write_text(out / "series.csv", csv.str());
    nlohmann::ordered_json rep;
    rep["config"] = config_echo(cfg);
    rep["versions"] = {{"pgnudge", "1.0.0"}};
    rep["steps"] = n_steps;
    rep["final_l2_T"] = l2_norm(st.ttilde);
    write_text(out / "report.json", rep.dump(2) + "\n");
    timer.lap("write");
    timer.flush(out);
    return 0;
}

int cmd_assimilate(const RunConfig& cfg, const fs::path& out, bool force) {
    prepare_out_dir(out, force);
    PhaseTimer timer;

    TwinResult res = run_twin(cfg.twin);
    timer.lap("twin_run");

    ModalBasis basis(cfg.twin.domain, cfg.twin.params, cfg.twin.interpolant.h);
    TheoremConstants tc = theorem_constants(cfg.twin.params, cfg.twin.forcing,
                                            cfg.twin.interpolant, cfg.theory_c, cfg.r,
                                            basis.lambda1(), res.measured_c0);

    nlohmann::ordered_json rep;
    rep["config"] = config_echo(cfg);
    rep["versions"] = {{"pgnudge", "1.0.0"}};
    rep["constants"] = constants_json(tc);
    rep["measured_c0"] = res.measured_c0;
    rep["no_assimilation"] = cfg.twin.params.mu == 0.0;
    try {
        DecayFit fit = fit_decay_rate(res.series, 1e-8, 1e-2);
        rep["fit"] = fit_json(fit);
    } catch (const insufficient_data_error&) {
        rep["fit"] = nullptr;
        rep["fit_note"] = "error did not enter the fit window";
    }
    rep["final"] = {{"l2_chi", res.series.l2_chi.back()},
                    {"h1_U", res.series.h1_u.back()},
                    {"l2_ref", res.series.l2_ref.back()}};
    timer.lap("analysis");

    write_text(out / "series.csv", res.series.to_csv());
    write_text(out / "report.json", rep.dump(2) + "\n");
    write_snapshot((out / "chi_final").string(), res.final_chi, "chi",
                   res.series.times.back());
    write_snapshot((out / "T_final").string(), res.final_ref, "T",
                   res.series.times.back());
    write_snapshot((out / "eta_final").string(), res.final_eta, "eta",
                   res.series.times.back());
    write_snapshot((out / "U1_final").string(), res.final_u_diff.u1, "U1",
                   res.series.times.back());
    write_snapshot((out / "U2_final").string(), res.final_u_diff.u2, "U2",
                   res.series.times.back());
    timer.lap("write");
    timer.flush(out);
    return 0;
}

int cmd_constants(const RunConfig& cfg, const std::string& sweep) {
    if (sweep.empty()) {
        std::cout << constants_json(compute_constants(cfg)).dump(2) << "\n";
        return 0;
    }
    const auto eq = sweep.find('=');
    if (eq == std::string::npos)
        throw config_error({"--sweep must look like KEY=v1,v2,..."});
    const std::string key = sweep.substr(0, eq);
    if (key != "interpolant.h" && key != "params.mu")
        throw config_error({"--sweep supports interpolant.h or params.mu, got " + key});
    std::vector<double> values;
    std::stringstream ss(sweep.substr(eq + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw config_error({"--sweep value is not a number: " + tok});
        }
    }
    if (values.empty()) throw config_error({"--sweep needs at least one value"});

    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double v : values) {
        RunConfig c = cfg;
        if (key == "interpolant.h")
            c.twin.interpolant.h = v;
        else
            c.twin.params.mu = v;
        std::vector<std::string> errs;
        c.twin.interpolant.validate(errs, "interpolant", c.twin.domain);
        if (!errs.empty()) throw config_error(errs);
        nlohmann::ordered_json entry;
        entry[key] = v;
        entry["constants"] = constants_json(compute_constants(c));
        arr.push_back(entry);
    }
    std::cout << arr.dump(2) << "\n";
    return 0;
}

int cmd_spectrum(const RunConfig& cfg, const fs::path& out, bool force) {
    prepare_out_dir(out, force);
    PhaseTimer timer;
    ModalBasis basis(cfg.twin.domain, cfg.twin.params, cfg.twin.interpolant.h);
    const double c0 =
        measure_c0(cfg.twin.interpolant, cfg.twin.domain, cfg.twin.params, 25, 777);
    timer.lap("basis");
    write_text(out / "basis.csv", basis.export_csv());
    nlohmann::ordered_json j;
    j["config"] = config_echo(cfg);
    j["kind"] = cfg.twin.interpolant.kind == InterpolantKind::modal ? "modal" : "volume";
    j["h"] = cfg.twin.interpolant.h;
    j["m_h"] = basis.retained_count();
    j["lambda1"] = basis.lambda1();
    j["measured_c0"] = c0;
    write_text(out / "c0.json", j.dump(2) + "\n");
    timer.lap("write");
    timer.flush(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("PGNUDGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"viscous planetary geostrophic model with temperature nudging"};
    app.require_subcommand(1);

    std::string config_path, out_dir, sweep;
    bool force = false;
    long long seed_override = -1;
    app.add_option("--config", config_path, "run configuration JSON")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--force", force, "allow writing into a non-empty output directory");
    app.add_option("--seed", seed_override, "override the configured seed");
    app.add_option("--sweep", sweep, "KEY=v1,v2,... parameter sweep (constants)");

    auto* sim = app.add_subcommand("simulate", "reference-only forward run");
    auto* assim = app.add_subcommand("assimilate", "twin experiment with nudging");
    auto* cons = app.add_subcommand("constants", "print the theorem constants");
    auto* spec = app.add_subcommand("spectrum", "export the observation basis and c0");
    for (CLI::App* sub : {sim, assim, cons, spec}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (seed_override >= 0)
            cfg.twin.seed = static_cast<std::uint64_t>(seed_override);
        if ((sim->parsed() || assim->parsed() || spec->parsed()) && out_dir.empty())
            throw config_error({"--out is required for this subcommand"});

        if (sim->parsed()) return cmd_simulate(cfg, out_dir, force);
        if (assim->parsed()) return cmd_assimilate(cfg, out_dir, force);
        if (cons->parsed()) return cmd_constants(cfg, sweep);
        return cmd_spectrum(cfg, out_dir, force);
    } catch (const config_error& e) {
        for (const std::string& m : e.messages) std::cerr << "config error: " << m << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
