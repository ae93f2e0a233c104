// hybridbath command-line front end: run, sweep, oracle-compare, verify
#include "hybridbath/cli.hpp"

#include "CLI11.hpp"

#include <string>

int main(int argc, char** argv) {
    CLI::App app{"non-Markovian open-system dynamics in hybrid boson-fermion baths"};
    app.require_subcommand(1);

    std::string config_path;
    std::string knob;
    std::string values;
    std::string csv_path;
    std::string law = "cosine";
    double oc_tol = -1.0;
    double lambda = 0.0;
    double omega = 0.0;
    double v_tol = 1e-6;

    auto* cmd_run = app.add_subcommand("run", "integrate a model and write CSV/SVG artifacts");
    cmd_run->add_option("config", config_path, "JSON run configuration")->required();

    auto* cmd_sweep = app.add_subcommand("sweep", "one run per knob value, plus a summary table");
    cmd_sweep->add_option("config", config_path, "JSON run configuration")->required();
    cmd_sweep->add_option("--knob", knob, "c_f, c_b, gamma_scale, or kappa_B")->required();
    cmd_sweep->add_option("--values", values, "comma-separated values")->required();

    auto* cmd_oracle = app.add_subcommand(
        "oracle-compare", "integrate the few-mode Schrodinger reference and compare");
    cmd_oracle->add_option("config", config_path, "JSON run configuration")->required();
    cmd_oracle->add_option("--tol", oc_tol, "tolerance override (default from config)");

    auto* cmd_verify =
        app.add_subcommand("verify", "check a trajectory CSV against a closed-form law");
    cmd_verify->add_option("trajectory", csv_path, "trajectory.csv path")->required();
    cmd_verify->add_option("--law", law, "law name (cosine)")->required();
    cmd_verify->add_option("--lambda", lambda, "per-bath coupling strength")->required();
    cmd_verify->add_option("--omega", omega, "system frequency")->required();
    cmd_verify->add_option("--tol", v_tol, "max allowed deviation")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmd_run->parsed()) return hybridbath::cmd_run(config_path);
    if (cmd_sweep->parsed()) return hybridbath::cmd_sweep(config_path, knob, values);
    if (cmd_oracle->parsed()) return hybridbath::cmd_oracle_compare(config_path, oc_tol);
    if (cmd_verify->parsed()) return hybridbath::cmd_verify(csv_path, law, lambda, omega, v_tol);
    return 70;
}
