// kernels.hpp: bath correlation functions K(t,s) as exponential sums, and the
// trapezoidal memory integrals F(t) = int_0^t K(t,s) f(t,s) ds

#pragma once

#include "hybridbath/algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hybridbath {

// One decaying/oscillating component: weight * exp(rate * (t - s)), t >= s.
struct KernelTerm {
    complexd weight;
    complexd rate;
};

// K(t,s) = sum of terms. Sums of baths are concatenations of term lists, so
// K_b + K_f never needs special handling downstream.
struct CorrelationKernel {
    std::vector<KernelTerm> terms;

    complexd at_gap(double gap) const {
        complexd k = 0.0;
        for (const auto& t : terms) k += t.weight * std::exp(t.rate * gap);
        return k;
    }
    complexd at(double t, double s) const { return at_gap(t - s); }
    complexd at_coincidence() const {
        complexd k = 0.0;
        for (const auto& t : terms) k += t.weight;
        return k;
    }
};

// Single bath mode of frequency Omega and coupling lambda: K = lambda^2 e^{-i Omega (t-s)}.
inline CorrelationKernel kernel_single_mode(double lambda, double Omega) {
    if (lambda < 0.0) throw std::invalid_argument("kernel_single_mode: coupling must be >= 0");
    return {{{complexd(lambda * lambda, 0.0), complexd(0.0, -Omega)}}};
}

// Ornstein-Uhlenbeck noise: K = (Gamma/2) e^{(-gamma + i phi)(t-s)}, gamma > 0.
inline CorrelationKernel kernel_ou(double Gamma, double gamma, double phi) {
    if (Gamma < 0.0) throw std::invalid_argument("kernel_ou: Gamma must be >= 0");
    if (gamma <= 0.0) throw std::invalid_argument("kernel_ou: gamma must be > 0 (non-decaying OU disallowed)");
    return {{{complexd(Gamma / 2.0, 0.0), complexd(-gamma, phi)}}};
}

inline CorrelationKernel kernel_zero() {
    return {};
}

inline CorrelationKernel kernel_sum(const CorrelationKernel& a, const CorrelationKernel& b) {
    CorrelationKernel out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
}

// Global coupling-strength scale: multiplies every term weight (c_f and c_b
// of the Anderson sweeps scale squared couplings, hence weights).
inline CorrelationKernel kernel_scaled(const CorrelationKernel& k, double scale) {
    if (scale < 0.0) throw std::invalid_argument("kernel_scaled: scale must be >= 0");
    CorrelationKernel out = k;
    for (auto& t : out.terms) t.weight *= scale;
    return out;
}

// Decay-rate scale for Markov-limit studies: gamma -> factor * gamma on every
// decaying term; pure-phase (single-mode) terms are left untouched.
inline CorrelationKernel kernel_gamma_scaled(const CorrelationKernel& k, double factor) {
    if (factor <= 0.0) throw std::invalid_argument("kernel_gamma_scaled: factor must be > 0");
    CorrelationKernel out = k;
    for (auto& t : out.terms) t.rate = complexd(t.rate.real() * factor, t.rate.imag());
    return out;
}

// --------------------------- trapezoid quadrature ---------------------------

// Composite trapezoid weights on a uniform grid of n+1 points spacing dt.
// n = 0 integrates over an empty interval, so every weight is zero.
inline std::vector<double> trapezoid_weights(std::size_t n_points, double dt) {
    std::vector<double> w(n_points, dt);
    if (n_points <= 1) {
        if (!w.empty()) w[0] = 0.0;
        return w;
    }
    w.front() = 0.5 * dt;
    w.back() = 0.5 * dt;
    return w;
}

// Running trapezoidal approximation of F(t) = int_0^t K(t,s) f(t,s) ds.
// The caller owns the slice samples f(t, s_j) and re-evolves them between
// steps; each step appends the new diagonal sample f(t,t).
struct MemoryIntegralAccumulator {
    double grid_step = 0.0;
    std::vector<complexd> samples;
    complexd value{0.0, 0.0};
};

inline complexd memory_integral_step(MemoryIntegralAccumulator& acc,
                                     const CorrelationKernel& kernel,
                                     complexd new_diagonal) {
    if (acc.grid_step <= 0.0) throw std::invalid_argument("memory_integral_step: grid_step must be > 0");
    acc.samples.push_back(new_diagonal);
    const std::size_t n = acc.samples.size() - 1; // t = n * grid_step
    const double t = double(n) * acc.grid_step;
    const auto w = trapezoid_weights(acc.samples.size(), acc.grid_step);
    complexd sum = 0.0;
    for (std::size_t j = 0; j < acc.samples.size(); ++j)
        sum += w[j] * kernel.at_gap(t - double(j) * acc.grid_step) * acc.samples[j];
    acc.value = sum;
    return sum;
}

// --------------------------- memory-time diagnostic -------------------------

// Kernel memory time tau = int_0^horizon |K| d(gap) / |K(0)|: ~1/gamma for OU
// noise, growing with the horizon for non-decaying single-mode kernels. Used
// to classify Markovian vs non-Markovian regimes in reports and tests.
inline double markov_limit_diagnostic(const CorrelationKernel& kernel, double horizon) {
    if (horizon <= 0.0) throw std::invalid_argument("markov_limit_diagnostic: horizon must be > 0");
    const double k0 = std::abs(kernel.at_gap(0.0));
    if (k0 == 0.0) return 0.0;
    const int n = 4096;
    const double h = horizon / n;
    double integral = 0.5 * (std::abs(kernel.at_gap(0.0)) + std::abs(kernel.at_gap(horizon)));
    for (int j = 1; j < n; ++j) integral += std::abs(kernel.at_gap(j * h));
    integral *= h;
    return integral / k0;
}

} // namespace hybridbath
