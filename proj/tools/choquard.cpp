#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "choquard/commands.hpp"
#include "choquard/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ground states and semiclassical spikes of the nonlocal Choquard equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seed_profile;
    int threads = 1;
    app.add_option("--threads", threads, "worker threads (reserved; runs are serial)");

    auto* gs = app.add_subcommand("groundstate", "solve the limit equation -Δu + au = (I_α∗F(u))f(u)");
    gs->add_option("--config", config_path, "JSON run configuration (defaults to the shipped one)");
    gs->add_option("--out", out_dir, "override the output directory");
    gs->add_option("--seed-profile", seed_profile, "override the seed: gaussian|instanton|file");

    auto* sc = app.add_subcommand("semiclassical", "penalized solve of the rescaled ε-problem");
    sc->add_option("--config", config_path, "JSON run configuration")->required();
    sc->add_option("--out", out_dir, "override the output directory");
    sc->add_option("--seed-profile", seed_profile, "override the seed: gaussian|instanton|file");

    auto* vf = app.add_subcommand("verify", "run the self-test battery");
    vf->add_option("--out", out_dir, "directory for verify_report.txt");
    bool inject_fault = false;
    vf->add_flag("--inject-kernel-sign-bug", inject_fault,
                 "test-harness hook: flip the Riesz kernel sign");

    CLI11_PARSE(app, argc, argv);
    (void)threads;

    try {
        if (vf->parsed()) {
            choquard::VerifyOptions opts;
            opts.inject_kernel_sign_bug = inject_fault;
            return choquard::cmd_verify(opts, out_dir.empty() ? "out" : out_dir, std::cout);
        }
        choquard::RunConfig cfg = config_path.empty()
                                      ? choquard::parse_config_text(choquard::default_config_json())
                                      : choquard::parse_config_file(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!seed_profile.empty()) {
            if (seed_profile == "gaussian")
                cfg.solver.seed_profile = choquard::SolverConfig::SeedProfile::gaussian;
            else if (seed_profile == "instanton")
                cfg.solver.seed_profile = choquard::SolverConfig::SeedProfile::instanton;
            else
                throw choquard::ConfigError("--seed-profile must be gaussian or instanton");
        }
        if (gs->parsed()) return choquard::cmd_groundstate(cfg, std::cout);
        return choquard::cmd_semiclassical(cfg, std::cout);
    } catch (const choquard::ConfigError& e) {
        std::cout << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cout << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << "\n";
        return 1;
    }
}
