// config.hpp: the JSON run-configuration schema. Parsing is strict: unknown
// fields and malformed values raise config_error carrying the dotted field
// path, which the CLI reports verbatim with exit code 2.

#pragma once

#include "hybridbath/errors.hpp"
#include "hybridbath/io.hpp"
#include "hybridbath/kernels.hpp"
#include "hybridbath/models.hpp"

#include "json.hpp"

#include <set>
#include <string>
#include <vector>

namespace hybridbath {

struct OutputSpec {
    std::string directory = "out";
    bool csv = true;
    bool svg = true;
};

struct OracleOptions {
    double tolerance = 1e-4;
    int cutoff = 12;
};

struct RunConfig {
    ModelName model = ModelName::single_qubit;
    ModelParams params;
    OutputSpec outputs;
    OracleOptions oracle;
    nlohmann::json echo;  // parsed source document, echoed into the manifest
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw config_error(path.empty() ? it.key() : path + "." + it.key(),
                               "unrecognized field");
}

inline const json& require_field(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw config_error(path, "missing required field");
    return j.at(key);
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw config_error(path, "must be a number");
    return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw config_error(path, "must be an integer");
    return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw config_error(path, "must be a string");
    return j.get<std::string>();
}

inline CorrelationKernel parse_kernel(const json& j, const std::string& path) {
    if (!j.is_object()) throw config_error(path, "must be an object with a \"type\" tag");
    const std::string type = as_string(require_field(j, "type", path + ".type"), path + ".type");
    try {
        if (type == "single_mode") {
            reject_unknown(j, {"type", "lambda", "omega"}, path);
            return kernel_single_mode(
                as_number(require_field(j, "lambda", path + ".lambda"), path + ".lambda"),
                as_number(require_field(j, "omega", path + ".omega"), path + ".omega"));
        }
        if (type == "ou") {
            reject_unknown(j, {"type", "Gamma", "gamma", "phi"}, path);
            return kernel_ou(
                as_number(require_field(j, "Gamma", path + ".Gamma"), path + ".Gamma"),
                as_number(require_field(j, "gamma", path + ".gamma"), path + ".gamma"),
                as_number(require_field(j, "phi", path + ".phi"), path + ".phi"));
        }
        if (type == "sum") {
            reject_unknown(j, {"type", "terms"}, path);
            const json& terms = require_field(j, "terms", path + ".terms");
            if (!terms.is_array()) throw config_error(path + ".terms", "must be an array");
            CorrelationKernel k = kernel_zero();
            for (std::size_t i = 0; i < terms.size(); ++i)
                k = kernel_sum(k, parse_kernel(terms[i], path + ".terms[" + std::to_string(i) + "]"));
            return k;
        }
        if (type == "zero") {
            reject_unknown(j, {"type"}, path);
            return kernel_zero();
        }
    } catch (const std::invalid_argument& e) {
        throw config_error(path, e.what());
    }
    throw config_error(path + ".type", "unknown kernel type: " + type);
}

inline Matrix parse_initial_state(const json& j, const std::string& path) {
    if (j.is_string()) {
        const std::string preset = j.get<std::string>();
        if (preset == "plus") return pure_density(plus_state());
        if (preset == "plus_plus")
            return kron(pure_density(plus_state()), pure_density(plus_state()));
        if (preset == "excited") return pure_density(basis_state(2, 0));
        if (preset == "ground") return pure_density(basis_state(2, 1));
        throw config_error(path, "unknown preset: " + preset +
                                     " (expected plus, plus_plus, excited, ground)");
    }
    if (!j.is_array() || j.empty())
        throw config_error(path, "must be a preset name or a matrix of [re, im] pairs");
    const std::size_t d = j.size();
    Matrix rho = Matrix::Zero(Eigen::Index(d), Eigen::Index(d));
    for (std::size_t i = 0; i < d; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != d)
            throw config_error(rp, "must be a row of " + std::to_string(d) + " entries");
        for (std::size_t k = 0; k < d; ++k) {
            const std::string cp = rp + "[" + std::to_string(k) + "]";
            const json& cell = j[i][k];
            if (!cell.is_array() || cell.size() != 2)
                throw config_error(cp, "must be an [re, im] pair");
            rho(Eigen::Index(i), Eigen::Index(k)) =
                complexd(as_number(cell[0], cp + "[0]"), as_number(cell[1], cp + "[1]"));
        }
    }
    return rho;
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("$", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw config_error("$", "top level must be an object");
    detail::reject_unknown(doc, {"model", "parameters", "grid", "outputs", "oracle"}, "");

    RunConfig cfg;
    cfg.echo = doc;
    cfg.model = model_name_from_string(
        detail::as_string(detail::require_field(doc, "model", "model"), "model"));
    cfg.params = default_params(cfg.model);

    const json& grid = detail::require_field(doc, "grid", "grid");
    if (!grid.is_object()) throw config_error("grid", "must be an object");
    detail::reject_unknown(grid, {"horizon", "dt"}, "grid");
    cfg.params.horizon =
        detail::as_number(detail::require_field(grid, "horizon", "grid.horizon"), "grid.horizon");
    cfg.params.dt = detail::as_number(detail::require_field(grid, "dt", "grid.dt"), "grid.dt");

    if (doc.contains("parameters")) {
        const json& p = doc.at("parameters");
        if (!p.is_object()) throw config_error("parameters", "must be an object");
        detail::reject_unknown(
            p, {"omega", "epsilon", "kernels", "scales", "kappa_B", "initial_state"}, "parameters");
        if (p.contains("omega") && p.contains("epsilon"))
            throw config_error("parameters.epsilon", "give either omega or epsilon, not both");
        if (p.contains("omega"))
            cfg.params.omega = detail::as_number(p.at("omega"), "parameters.omega");
        if (p.contains("epsilon"))
            cfg.params.omega = detail::as_number(p.at("epsilon"), "parameters.epsilon");
        if (p.contains("kernels")) {
            const json& ks = p.at("kernels");
            if (!ks.is_object()) throw config_error("parameters.kernels", "must be an object");
            detail::reject_unknown(ks, {"b", "f", "alpha", "La", "Lc", "Ra", "Rc"},
                                   "parameters.kernels");
            auto grab = [&](const char* key, std::optional<CorrelationKernel>& slot) {
                if (ks.contains(key))
                    slot = detail::parse_kernel(ks.at(key),
                                                std::string("parameters.kernels.") + key);
            };
            grab("b", cfg.params.kernel_b);
            grab("alpha", cfg.params.kernel_b);
            grab("f", cfg.params.kernel_f);
            grab("La", cfg.params.kernel_La);
            grab("Lc", cfg.params.kernel_Lc);
            grab("Ra", cfg.params.kernel_Ra);
            grab("Rc", cfg.params.kernel_Rc);
        }
        if (p.contains("scales")) {
            const json& sc = p.at("scales");
            if (!sc.is_object()) throw config_error("parameters.scales", "must be an object");
            detail::reject_unknown(sc, {"c_f", "c_b", "gamma_scale"}, "parameters.scales");
            if (sc.contains("c_f"))
                cfg.params.c_f = detail::as_number(sc.at("c_f"), "parameters.scales.c_f");
            if (sc.contains("c_b"))
                cfg.params.c_b = detail::as_number(sc.at("c_b"), "parameters.scales.c_b");
            if (sc.contains("gamma_scale"))
                cfg.params.gamma_scale =
                    detail::as_number(sc.at("gamma_scale"), "parameters.scales.gamma_scale");
        }
        if (p.contains("kappa_B"))
            cfg.params.kappa_B = detail::as_int(p.at("kappa_B"), "parameters.kappa_B");
        if (p.contains("initial_state"))
            cfg.params.initial_state =
                detail::parse_initial_state(p.at("initial_state"), "parameters.initial_state");
    }

    if (doc.contains("outputs")) {
        const json& o = doc.at("outputs");
        if (!o.is_object()) throw config_error("outputs", "must be an object");
        detail::reject_unknown(o, {"directory", "formats"}, "outputs");
        if (o.contains("directory"))
            cfg.outputs.directory = detail::as_string(o.at("directory"), "outputs.directory");
        if (o.contains("formats")) {
            const json& f = o.at("formats");
            if (!f.is_array()) throw config_error("outputs.formats", "must be an array");
            cfg.outputs.csv = cfg.outputs.svg = false;
            for (std::size_t i = 0; i < f.size(); ++i) {
                const std::string fmt =
                    detail::as_string(f[i], "outputs.formats[" + std::to_string(i) + "]");
                if (fmt == "csv") cfg.outputs.csv = true;
                else if (fmt == "svg") cfg.outputs.svg = true;
                else
                    throw config_error("outputs.formats[" + std::to_string(i) + "]",
                                       "unknown format: " + fmt);
            }
            if (!cfg.outputs.csv)
                throw config_error("outputs.formats", "csv output cannot be disabled");
        }
    }

    if (doc.contains("oracle")) {
        const json& o = doc.at("oracle");
        if (!o.is_object()) throw config_error("oracle", "must be an object");
        detail::reject_unknown(o, {"tolerance", "cutoff"}, "oracle");
        if (o.contains("tolerance"))
            cfg.oracle.tolerance = detail::as_number(o.at("tolerance"), "oracle.tolerance");
        if (o.contains("cutoff")) cfg.oracle.cutoff = detail::as_int(o.at("cutoff"), "oracle.cutoff");
        if (cfg.oracle.cutoff < 2) throw config_error("oracle.cutoff", "must be >= 2");
        if (!(cfg.oracle.tolerance > 0.0)) throw config_error("oracle.tolerance", "must be > 0");
    }

    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

} // namespace hybridbath
