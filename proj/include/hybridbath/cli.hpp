// cli.hpp: command implementations behind the hybridbath executable. Each
// command returns a process exit code: 0 success, 1 tolerance exceeded,
// 2 configuration or schema violation, 3 numeric singularity or integration
// failure, 4 resource guard. Failures print one machine-parsable JSON line
// to stderr; the manifest is written last, so its presence marks a completed
// run.

#pragma once

#include "hybridbath/config.hpp"
#include "hybridbath/errors.hpp"
#include "hybridbath/io.hpp"
#include "hybridbath/models.hpp"
#include "hybridbath/oracle.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace hybridbath {

namespace detail {

inline void print_error_line(const nlohmann::json& j) { std::cerr << j.dump() << "\n"; }

inline int report_failure(const std::exception& e) {
    if (auto* c = dynamic_cast<const config_error*>(&e)) {
        print_error_line({{"error", "config"}, {"field", c->field()}, {"message", e.what()}});
        return 2;
    }
    if (auto* s = dynamic_cast<const singularity_error*>(&e)) {
        print_error_line({{"error", "singularity"}, {"when", s->when()}, {"message", e.what()}});
        return 3;
    }
    if (dynamic_cast<const resource_error*>(&e)) {
        print_error_line({{"error", "resource"}, {"message", e.what()}});
        return 4;
    }
    if (dynamic_cast<const integration_error*>(&e)) {
        print_error_line({{"error", "integration"}, {"message", e.what()}});
        return 3;
    }
    if (dynamic_cast<const std::invalid_argument*>(&e)) {
        print_error_line({{"error", "config"}, {"field", ""}, {"message", e.what()}});
        return 2;
    }
    print_error_line({{"error", "internal"}, {"message", e.what()}});
    return 70;
}

// HYBRIDBATH_OUTDIR replaces the configured output directory wholesale
inline std::string resolve_outdir(const std::string& configured) {
    const char* env = std::getenv("HYBRIDBATH_OUTDIR");
    if (env && *env) return env;
    return configured;
}

inline std::string metadata_line(const ModelSpec& spec) {
    std::string line = "model=";
    line += to_string(spec.name);
    line += " approximation=" + spec.approximation;
    line += " horizon=" + format_number(spec.horizon);
    line += " dt=" + format_number(spec.dt);
    return line;
}

inline nlohmann::json diagnostics_json(const Diagnostics& d) {
    nlohmann::json mem = nlohmann::json::object();
    for (const auto& [key, tau] : d.memory_times) mem[key] = tau;
    return {{"approximation", d.approximation},
            {"min_eigenvalue", d.positivity.min_eigenvalue},
            {"min_eigenvalue_time", d.positivity.time_of_min},
            {"positivity_warning", d.positivity.warning},
            {"max_trace_drift", d.max_trace_drift},
            {"memory_times", mem},
            {"memory_class", d.memory_class}};
}

// writes trajectory/coefficients CSVs plus SVGs re-rendered from the CSV
// text, and returns the artifact checksum map
inline nlohmann::json write_run_artifacts(const std::string& dir, const ModelSpec& spec,
                                          const RunResult& result, const OutputSpec& outputs) {
    std::filesystem::create_directories(dir);
    nlohmann::json sums = nlohmann::json::object();
    const std::string meta = metadata_line(spec);

    const std::string traj_csv = csv_to_string(trajectory_table(result.trajectory, meta));
    write_text_file(dir + "/trajectory.csv", traj_csv);
    sums["trajectory.csv"] = fnv1a64_hex(traj_csv);

    const std::string coeff_csv = csv_to_string(coefficients_table(result.coefficients, meta));
    write_text_file(dir + "/coefficients.csv", coeff_csv);
    sums["coefficients.csv"] = fnv1a64_hex(coeff_csv);

    if (outputs.svg) {
        const std::string plot = svg_from_csv(parse_csv(traj_csv));
        write_text_file(dir + "/plot.svg", plot);
        sums["plot.svg"] = fnv1a64_hex(plot);
        const std::string cplot = svg_from_csv(parse_csv(coeff_csv));
        write_text_file(dir + "/coefficients.svg", cplot);
        sums["coefficients.svg"] = fnv1a64_hex(cplot);
    }
    return sums;
}

inline void write_manifest(const std::string& dir, const RunConfig& cfg,
                           const nlohmann::json& artifacts, const nlohmann::json& diagnostics,
                           double duration_seconds) {
    const nlohmann::json manifest = {{"tool", kToolVersion},
                                     {"config", cfg.echo},
                                     {"artifacts", artifacts},
                                     {"diagnostics", diagnostics},
                                     {"duration_seconds", duration_seconds}};
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

inline std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        const std::string cell = csv.substr(pos, comma - pos);
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end == cell.c_str() || *end != '\0')
            throw config_error("sweep.values", "cannot parse value: \"" + cell + "\"");
        values.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return values;
}

} // namespace detail

inline int cmd_run(const std::string& config_path) {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const RunConfig cfg = load_config(config_path);
        const std::string dir = detail::resolve_outdir(cfg.outputs.directory);
        const ModelSpec spec = build_model(cfg.model, cfg.params);
        const RunResult result = run(spec);
        const nlohmann::json sums = detail::write_run_artifacts(dir, spec, result, cfg.outputs);
        const double dur =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail::write_manifest(dir, cfg, sums, detail::diagnostics_json(result.diagnostics), dur);
        std::cout << "wrote " << dir << " (" << result.trajectory.times.size() << " samples, "
                  << spec.approximation << ")\n";
        if (result.diagnostics.positivity.warning)
            std::cout << "warning: min eigenvalue " << result.diagnostics.positivity.min_eigenvalue
                      << " at t = " << result.diagnostics.positivity.time_of_min << "\n";
        return 0;
    } catch (const std::exception& e) {
        return detail::report_failure(e);
    }
}

inline int cmd_sweep(const std::string& config_path, const std::string& knob,
                     const std::string& values_csv) {
    try {
        const RunConfig cfg = load_config(config_path);
        const std::vector<double> values = detail::parse_value_list(values_csv);
        if (values.empty()) throw config_error("sweep.values", "must not be empty");
        if (knob != "c_f" && knob != "c_b" && knob != "gamma_scale" && knob != "kappa_B")
            throw config_error("sweep.knob", "unknown knob " + knob +
                                                 "; expected c_f, c_b, gamma_scale, kappa_B");
        const std::string base = detail::resolve_outdir(cfg.outputs.directory);
        std::filesystem::create_directories(base);

        CsvTable summary;
        summary.comments = {"hybridbath sweep-summary v1", "knob=" + knob};
        bool have_columns = false;
        int worst = 0;

        for (double v : values) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                ModelParams p = cfg.params;
                if (knob == "c_f") p.c_f = v;
                else if (knob == "c_b") p.c_b = v;
                else if (knob == "gamma_scale") p.gamma_scale = v;
                else {
                    if (v != 0.0 && v != 1.0)
                        throw config_error("sweep.values", "kappa_B must be 0 or 1");
                    p.kappa_B = int(v);
                }
                const ModelSpec spec = build_model(cfg.model, p);
                const RunResult result = run(spec);
                const std::string dir = base + "/" + knob + "_" + format_number(v);
                const nlohmann::json sums =
                    detail::write_run_artifacts(dir, spec, result, cfg.outputs);
                const double dur =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                detail::write_manifest(dir, cfg, sums,
                                       detail::diagnostics_json(result.diagnostics), dur);

                const Matrix& rho_end = result.trajectory.states.back();
                if (!have_columns) {
                    summary.columns.push_back("value");
                    for (Eigen::Index i = 0; i < rho_end.rows(); ++i)
                        summary.columns.push_back("pop_" + std::to_string(i));
                    summary.columns.push_back("coherence_01");
                    have_columns = true;
                }
                std::vector<double> row;
                row.push_back(v);
                for (Eigen::Index i = 0; i < rho_end.rows(); ++i)
                    row.push_back(rho_end(i, i).real());
                row.push_back(std::abs(rho_end(0, 1)));
                summary.rows.push_back(std::move(row));
                std::cout << knob << " = " << format_number(v) << ": ok\n";
            } catch (const std::exception& e) {
                worst = std::max(worst, detail::report_failure(e));
                std::cout << knob << " = " << format_number(v) << ": failed\n";
            }
        }
        const std::string summary_csv = csv_to_string(summary);
        write_text_file(base + "/summary.csv", summary_csv);
        std::cout << "wrote " << base << "/summary.csv (" << summary.rows.size() << "/"
                  << values.size() << " values)\n";
        return worst;
    } catch (const std::exception& e) {
        return detail::report_failure(e);
    }
}

inline int cmd_oracle_compare(const std::string& config_path, double tol_override) {
    try {
        const RunConfig cfg = load_config(config_path);
        const double tol = tol_override > 0.0 ? tol_override : cfg.oracle.tolerance;
        const std::string dir = detail::resolve_outdir(cfg.outputs.directory);
        const ModelSpec spec = build_model(cfg.model, cfg.params);
        const RunResult result = run(spec);

        TotalSystemSpec total = oracle_spec_for(spec);
        for (auto& bm : total.boson_modes) bm.cutoff = cfg.oracle.cutoff;
        const Trajectory oracle_traj = oracle_evolve(total, spec.horizon, spec.dt);

        std::vector<double> distances;
        distances.reserve(oracle_traj.times.size());
        double max_d = 0.0, t_max = 0.0;
        for (std::size_t i = 0; i < oracle_traj.times.size(); ++i) {
            const double d =
                trace_distance(oracle_traj.states[i], result.trajectory.states[i]);
            distances.push_back(d);
            if (d > max_d) { max_d = d; t_max = oracle_traj.times[i]; }
        }

        std::filesystem::create_directories(dir);
        write_text_file(dir + "/compare.csv",
                        csv_to_string(compare_table(oracle_traj.times, distances)));
        std::cout << "max trace distance " << format_number(max_d) << " at t = "
                  << format_number(t_max) << " (tolerance " << format_number(tol) << ", "
                  << spec.approximation << ")\n";
        if (max_d <= tol) return 0;
        detail::print_error_line({{"error", "tolerance"},
                                  {"max_trace_distance", max_d},
                                  {"tolerance", tol},
                                  {"at", t_max}});
        return 1;
    } catch (const std::exception& e) {
        return detail::report_failure(e);
    }
}

// checks a trajectory CSV against the resonant-coupling law
// |rho_21(t)| = |rho_21(0)| |cos(sqrt(2) lambda t)|, with the phase factor
// e^{i omega t} carried by the off-diagonal element
inline int cmd_verify(const std::string& csv_path, const std::string& law, double lambda,
                      double omega, double tol) {
    try {
        if (law != "cosine")
            throw config_error("verify.law", "unknown law " + law + "; expected cosine");
        if (!(tol > 0.0)) throw config_error("verify.tol", "must be > 0");
        const CsvTable table = parse_csv(read_text_file(csv_path));

        auto column = [&](const std::string& name) {
            for (std::size_t j = 0; j < table.columns.size(); ++j)
                if (table.columns[j] == name) return j;
            throw config_error("csv", "missing column " + name);
        };
        const std::size_t jt = column("t");
        const std::size_t jre = column("re_rho_1_0");
        const std::size_t jim = column("im_rho_1_0");
        if (table.rows.empty()) throw config_error("csv", "no data rows");

        const complexd r0(table.rows.front()[jre], table.rows.front()[jim]);
        double max_err = 0.0, t_max = 0.0;
        for (const auto& row : table.rows) {
            const double t = row[jt];
            const complexd r(row[jre], row[jim]);
            const complexd expected =
                r0 * std::exp(complexd(0.0, omega * t)) * std::cos(std::sqrt(2.0) * lambda * t);
            const double err = std::abs(r - expected);
            if (err > max_err) { max_err = err; t_max = t; }
        }
        std::cout << "max deviation from cosine law " << format_number(max_err) << " at t = "
                  << format_number(t_max) << " (tolerance " << format_number(tol) << ")\n";
        if (max_err <= tol) return 0;
        detail::print_error_line(
            {{"error", "tolerance"}, {"max_deviation", max_err}, {"tolerance", tol}, {"at", t_max}});
        return 1;
    } catch (const std::exception& e) {
        return detail::report_failure(e);
    }
}

} // namespace hybridbath
