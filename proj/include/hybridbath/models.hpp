// models.hpp: the catalog of worked examples. Each model binds operators,
// kernels, a coefficient system, and a master generator into one runnable
// spec; coupling scales c_b and c_f multiply kernel weights, which is the
// same as scaling the microscopic couplings by their square roots.

#pragma once

#include "hybridbath/algebra.hpp"
#include "hybridbath/coeffs.hpp"
#include "hybridbath/errors.hpp"
#include "hybridbath/kernels.hpp"
#include "hybridbath/master.hpp"
#include "hybridbath/oracle.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hybridbath {

enum class ModelName { single_qubit, two_qubit, dephasing_qubit, anderson };

inline ModelName model_name_from_string(const std::string& s) {
    if (s == "single_qubit") return ModelName::single_qubit;
    if (s == "two_qubit") return ModelName::two_qubit;
    if (s == "dephasing_qubit") return ModelName::dephasing_qubit;
    if (s == "anderson") return ModelName::anderson;
    throw config_error("model", "unknown model name: " + s);
}

inline const char* to_string(ModelName name) {
    switch (name) {
        case ModelName::single_qubit: return "single_qubit";
        case ModelName::two_qubit: return "two_qubit";
        case ModelName::dephasing_qubit: return "dephasing_qubit";
        case ModelName::anderson: return "anderson";
    }
    return "?";
}

// Everything a model can be built from. Kernel entries are unscaled; qubit
// models read kernel_b / kernel_f, the Anderson model additionally needs its
// four lead kernels and interprets omega as the dot level epsilon.
struct ModelParams {
    double omega = 1.0;
    std::optional<CorrelationKernel> kernel_b;
    std::optional<CorrelationKernel> kernel_f;
    std::optional<CorrelationKernel> kernel_La;
    std::optional<CorrelationKernel> kernel_Lc;
    std::optional<CorrelationKernel> kernel_Ra;
    std::optional<CorrelationKernel> kernel_Rc;
    double c_f = 1.0;
    double c_b = 1.0;
    double gamma_scale = 1.0;
    int kappa_B = 1;
    std::optional<Matrix> initial_state;
    double horizon = 0.0;
    double dt = 0.0;
};

struct ModelSpec {
    ModelName name = ModelName::single_qubit;
    double omega = 1.0;
    Matrix system_hamiltonian;
    std::vector<std::pair<std::string, Matrix>> couplings;
    std::vector<std::pair<std::string, CorrelationKernel>> kernels;  // scaled
    CommutationClass commutation_class = CommutationClass::commutative;
    double c_f = 1.0;
    double c_b = 1.0;
    double gamma_scale = 1.0;
    int kappa_B = 1;
    Matrix initial_state;
    double horizon = 0.0;
    double dt = 0.0;
    std::string approximation;  // "exact" or "zeroth-order"

    const CorrelationKernel& kernel(const std::string& key) const {
        for (const auto& [k, v] : kernels)
            if (k == key) return v;
        throw std::invalid_argument("ModelSpec: no kernel named " + key);
    }
    const Matrix& coupling(const std::string& key) const {
        for (const auto& [k, v] : couplings)
            if (k == key) return v;
        throw std::invalid_argument("ModelSpec: no coupling named " + key);
    }
};

struct Diagnostics {
    PositivityReport positivity;
    double max_trace_drift = 0.0;
    std::string approximation;
    // memory time per kernel from the normalized |K| integral, and a coarse
    // label relative to the horizon
    std::vector<std::pair<std::string, double>> memory_times;
    std::string memory_class;
};

struct RunResult {
    CoefficientReport coefficients;
    Trajectory trajectory;
    Diagnostics diagnostics;
};

// Documented defaults: the two-qubit coefficient experiment ships a
// representative OU pair, and the Anderson model places the dot level below
// both lead phase bands so that the near-resonant channels are the
// dissipative ones.
inline ModelParams default_params(ModelName name) {
    ModelParams p;
    switch (name) {
        case ModelName::single_qubit:
            p.omega = 1.0;
            p.kernel_b = kernel_single_mode(0.2, 1.0);
            p.kernel_f = kernel_single_mode(0.2, 1.0);
            p.initial_state = pure_density(plus_state());
            p.horizon = 3.0;
            p.dt = 1e-3;
            break;
        case ModelName::dephasing_qubit:
            p.omega = 1.0;
            p.kernel_b = kernel_single_mode(0.2, 1.0);
            p.kernel_f = kernel_single_mode(0.2, 1.0);
            p.initial_state = pure_density(plus_state());
            p.horizon = 5.0;
            p.dt = 1e-3;
            break;
        case ModelName::two_qubit:
            p.omega = 1.0;
            p.kernel_b = kernel_ou(1.0, 0.5, 0.0);
            p.kernel_f = kernel_ou(1.0, 0.5, 0.0);
            p.kappa_B = 1;
            p.initial_state = kron(pure_density(plus_state()), pure_density(plus_state()));
            p.horizon = 6.0;
            p.dt = 0.02;
            break;
        case ModelName::anderson:
            p.omega = -1.0;  // dot level epsilon
            p.kernel_b = kernel_ou(0.02, 0.4, 0.5);
            p.kernel_La = kernel_ou(0.012, 0.4, 0.75);
            p.kernel_Lc = kernel_ou(0.017, 0.3, 1.1);
            p.kernel_Ra = kernel_ou(0.044, 0.45, 1.2);
            p.kernel_Rc = kernel_ou(0.034, 0.5, 1.65);
            p.initial_state = pure_density(plus_state());
            p.horizon = 30.0;
            p.dt = 0.02;
            break;
    }
    return p;
}

namespace detail {

inline const CorrelationKernel& require_kernel(const std::optional<CorrelationKernel>& k,
                                               const char* field) {
    if (!k) throw config_error(field, "kernel required for this model");
    return *k;
}

inline CorrelationKernel scale_for_model(const CorrelationKernel& base, double weight_scale,
                                         double gamma_scale) {
    CorrelationKernel k = kernel_scaled(base, weight_scale);
    if (gamma_scale != 1.0) k = kernel_gamma_scaled(k, gamma_scale);
    return k;
}

} // namespace detail

inline ModelSpec build_model(ModelName name, const ModelParams& p) {
    if (!(p.c_f >= 0.0)) throw config_error("scales.c_f", "must be >= 0");
    if (!(p.c_b >= 0.0)) throw config_error("scales.c_b", "must be >= 0");
    if (!(p.gamma_scale > 0.0)) throw config_error("scales.gamma_scale", "must be > 0");
    if (!(p.dt > 0.0)) throw config_error("grid.dt", "must be > 0");
    if (!(p.horizon >= p.dt)) throw config_error("grid.horizon", "must be >= dt");

    ModelSpec spec;
    spec.name = name;
    spec.omega = p.omega;
    spec.c_f = p.c_f;
    spec.c_b = p.c_b;
    spec.gamma_scale = p.gamma_scale;
    spec.kappa_B = p.kappa_B;
    spec.horizon = p.horizon;
    spec.dt = p.dt;

    auto scaled_b = [&](const std::optional<CorrelationKernel>& k, const char* field) {
        return detail::scale_for_model(detail::require_kernel(k, field), p.c_b, p.gamma_scale);
    };
    auto scaled_f = [&](const std::optional<CorrelationKernel>& k, const char* field) {
        return detail::scale_for_model(detail::require_kernel(k, field), p.c_f, p.gamma_scale);
    };

    switch (name) {
        case ModelName::single_qubit: {
            spec.system_hamiltonian = 0.5 * p.omega * sigma_z();
            spec.couplings = {{"L", sigma_minus()}};
            spec.kernels = {{"b", scaled_b(p.kernel_b, "kernels.b")},
                            {"f", scaled_f(p.kernel_f, "kernels.f")}};
            spec.commutation_class = CommutationClass::commutative;
            spec.initial_state = p.initial_state.value_or(pure_density(plus_state()));
            spec.approximation = "exact";
            break;
        }
        case ModelName::dephasing_qubit: {
            spec.system_hamiltonian = 0.5 * p.omega * sigma_z();
            spec.couplings = {{"L_b", sigma_z()}, {"L_f", sigma_minus()}};
            spec.kernels = {{"b", scaled_b(p.kernel_b, "kernels.b")},
                            {"f", scaled_f(p.kernel_f, "kernels.f")}};
            spec.commutation_class = CommutationClass::commutative;
            spec.initial_state = p.initial_state.value_or(pure_density(plus_state()));
            spec.approximation = "zeroth-order";
            break;
        }
        case ModelName::two_qubit: {
            if (p.kappa_B != 0 && p.kappa_B != 1)
                throw config_error("kappa_B", "must be 0 or 1; 1 selects the collective "
                                              "coefficient system, 0 the single-qubit reduction");
            const Matrix szA = kron(sigma_z(), identity(2));
            const Matrix szB = kron(identity(2), sigma_z());
            const Matrix smA = kron(sigma_minus(), identity(2));
            const Matrix smB = kron(identity(2), sigma_minus());
            spec.system_hamiltonian = 0.5 * p.omega * (szA + szB);
            const Matrix L = smA + double(p.kappa_B) * smB;
            spec.couplings = {{"L", L}, {"O2", (szA + szB) * (smA + smB)}};
            spec.kernels = {{"b", scaled_b(p.kernel_b, "kernels.b")},
                            {"f", scaled_f(p.kernel_f, "kernels.f")}};
            spec.commutation_class = CommutationClass::commutative;
            spec.initial_state = p.initial_state.value_or(
                kron(pure_density(plus_state()), pure_density(plus_state())));
            spec.approximation = p.kappa_B == 1 ? "zeroth-order" : "exact";
            break;
        }
        case ModelName::anderson: {
            const Matrix d = (Matrix(2, 2) << 0.0, 1.0, 0.0, 0.0).finished(); // |vac><occ|
            const Matrix nop = d.adjoint() * d;
            spec.system_hamiltonian = p.omega * nop;
            spec.couplings = {{"d", d}, {"n", nop}};
            spec.kernels = {{"alpha", scaled_b(p.kernel_b, "kernels.alpha")},
                            {"La", scaled_f(p.kernel_La, "kernels.La")},
                            {"Lc", scaled_f(p.kernel_Lc, "kernels.Lc")},
                            {"Ra", scaled_f(p.kernel_Ra, "kernels.Ra")},
                            {"Rc", scaled_f(p.kernel_Rc, "kernels.Rc")}};
            spec.commutation_class = CommutationClass::anti_commutative;
            spec.initial_state = p.initial_state.value_or(pure_density(plus_state()));
            spec.approximation = "zeroth-order";
            break;
        }
    }
    require_density_matrix(spec.initial_state, "build_model");
    return spec;
}

namespace detail {

inline std::vector<complexd> series_sum(const std::vector<complexd>& a,
                                        const std::vector<complexd>& b) {
    std::vector<complexd> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline std::vector<complexd> series_negate(const std::vector<complexd>& a) {
    std::vector<complexd> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
    return out;
}

inline Diagnostics make_diagnostics(const ModelSpec& spec, const Trajectory& traj) {
    Diagnostics d;
    d.positivity = positivity_monitor(traj);
    for (const auto& rho : traj.states)
        d.max_trace_drift = std::max(d.max_trace_drift, std::abs(rho.trace() - complexd(1.0)));
    d.approximation = spec.approximation;
    double max_mem = 0.0;
    for (const auto& [key, k] : spec.kernels) {
        const double tau = markov_limit_diagnostic(k, spec.horizon);
        d.memory_times.emplace_back(key, tau);
        max_mem = std::max(max_mem, tau);
    }
    d.memory_class = max_mem > 0.05 * spec.horizon ? "non-markovian" : "quasi-markovian";
    return d;
}

} // namespace detail

// Integrates the model's coefficient system, assembles its generator, and
// propagates the initial state on the same grid.
inline RunResult run(const ModelSpec& spec) {
    RunResult result;
    MasterGenerator gen;
    gen.hamiltonian = spec.system_hamiltonian;

    switch (spec.name) {
        case ModelName::single_qubit: {
            const CorrelationKernel K = kernel_sum(spec.kernel("b"), spec.kernel("f"));
            result.coefficients =
                integrate_single_qubit_coeffs(K, spec.omega, spec.horizon, spec.dt);
            gen.terms.push_back({result.coefficients.at("F"), sigma_minus(), sigma_plus()});
            break;
        }
        case ModelName::dephasing_qubit: {
            result.coefficients = integrate_dephasing_qubit_coeffs(
                spec.kernel("f"), spec.kernel("b"), spec.omega, spec.horizon, spec.dt);
            gen.terms.push_back({result.coefficients.at("G"), sigma_minus(), sigma_plus()});
            gen.terms.push_back({result.coefficients.at("F"), sigma_z(), sigma_z()});
            break;
        }
        case ModelName::two_qubit: {
            if (spec.kappa_B == 0) {
                // qubit B decouples; qubit A follows the exact single-qubit
                // system while B precesses freely
                const CorrelationKernel K = kernel_sum(spec.kernel("b"), spec.kernel("f"));
                result.coefficients =
                    integrate_single_qubit_coeffs(K, spec.omega, spec.horizon, spec.dt);
                const Matrix smA = kron(sigma_minus(), identity(2));
                gen.terms.push_back({result.coefficients.at("F"), smA, smA.adjoint()});
            } else {
                result.coefficients = integrate_two_qubit_coeffs(
                    spec.kernel("b"), spec.kernel("f"), spec.omega, spec.horizon, spec.dt);
                const Matrix& L = spec.coupling("L");
                const Matrix& O2 = spec.coupling("O2");
                gen.terms.push_back(
                    {detail::series_sum(result.coefficients.at("F1"), result.coefficients.at("G1")),
                     L, L.adjoint()});
                gen.terms.push_back(
                    {detail::series_sum(result.coefficients.at("F2"), result.coefficients.at("G2")),
                     O2, L.adjoint()});
            }
            break;
        }
        case ModelName::anderson: {
            result.coefficients = integrate_anderson_coeffs(
                spec.kernel("alpha"), spec.kernel("La"), spec.kernel("Lc"), spec.kernel("Ra"),
                spec.kernel("Rc"), spec.omega, spec.horizon, spec.dt);
            const Matrix& d = spec.coupling("d");
            const Matrix& nop = spec.coupling("n");
            const auto creation = detail::series_sum(result.coefficients.at("FLc"),
                                                     result.coefficients.at("FRc"));
            const auto annihilation = detail::series_sum(result.coefficients.at("FLa"),
                                                         result.coefficients.at("FRa"));
            gen.terms.push_back({creation, d, d.adjoint()});
            // c [d, d^dag rho] rewrites as (-c) [d^dag rho, d]
            gen.terms.push_back({detail::series_negate(annihilation), d.adjoint(), d});
            gen.terms.push_back({result.coefficients.at("F1"), nop, nop});
            break;
        }
    }

    result.trajectory = evolve(gen, spec.initial_state, spec.horizon, spec.dt);
    result.diagnostics = detail::make_diagnostics(spec, result.trajectory);
    return result;
}

// Oracle counterpart of a model, available when every kernel is a sum of
// single-mode terms (weight lambda^2, rate -i Omega) so the finite-mode
// Hamiltonian can be reconstructed. The initial state must be pure.
inline TotalSystemSpec oracle_spec_for(const ModelSpec& spec) {
    if (spec.name == ModelName::anderson)
        throw config_error("model", "oracle comparison is not defined for the anderson model "
                                    "(thermofield kernels have no vacuum few-mode counterpart)");

    auto modes_of = [](const CorrelationKernel& k, const char* which) {
        std::vector<std::pair<double, double>> modes; // (Omega, coupling)
        for (const auto& term : k.terms) {
            if (std::abs(term.rate.real()) > 1e-12 || std::abs(term.weight.imag()) > 1e-12 ||
                term.weight.real() < 0.0)
                throw config_error(which, "oracle requires single-mode kernels");
            modes.emplace_back(-term.rate.imag(), std::sqrt(term.weight.real()));
        }
        return modes;
    };

    TotalSystemSpec total;
    total.system_dim = spec.system_hamiltonian.rows();
    total.system_hamiltonian = spec.system_hamiltonian;
    total.commutation_class = spec.commutation_class;
    for (const auto& [omega, lam] : modes_of(spec.kernel("b"), "kernels.b"))
        total.boson_modes.push_back({omega, lam, 12});
    for (const auto& [eps, mu] : modes_of(spec.kernel("f"), "kernels.f"))
        total.fermion_modes.push_back({eps, mu});

    if (spec.name == ModelName::dephasing_qubit) {
        total.coupling_b = spec.coupling("L_b");
        total.coupling_f = spec.coupling("L_f");
    } else {
        total.coupling_b = spec.coupling("L");
        total.coupling_f = spec.coupling("L");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(spec.initial_state);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    if (es.eigenvalues()(top) < 1.0 - 1e-10)
        throw std::invalid_argument("oracle_spec_for: initial state must be pure");
    total.initial_system = es.eigenvectors().col(top);
    return total;
}

// One independent run per knob value, results in input order.
inline std::vector<RunResult> sweep(ModelName name, const ModelParams& base,
                                    const std::string& knob, const std::vector<double>& values) {
    if (values.empty()) throw config_error("sweep.values", "must not be empty");
    std::vector<RunResult> results;
    results.reserve(values.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw config_error("sweep.values", "must be finite");
        ModelParams p = base;
        if (knob == "c_f") p.c_f = v;
        else if (knob == "c_b") p.c_b = v;
        else if (knob == "gamma_scale") p.gamma_scale = v;
        else if (knob == "kappa_B") {
            if (v != 0.0 && v != 1.0) throw config_error("sweep.values", "kappa_B must be 0 or 1");
            p.kappa_B = int(v);
        } else {
            throw config_error("sweep.knob",
                               "unknown knob " + knob + "; expected c_f, c_b, gamma_scale, kappa_B");
        }
        results.push_back(run(build_model(name, p)));
    }
    return results;
}

} // namespace hybridbath
