// master.hpp: reduced-density-matrix propagation under generators of the form
// drho/dt = -i[H, rho] + sum_j ( c_j(t) [A_j rho, B_j] + h.c. )
//
// Every dissipator enters as a commutator plus its Hermitian conjugate, so the
// generator is trace-free and Hermiticity-preserving by construction; the
// integrator never renormalizes, it only checks that the trace stays put.

#pragma once

#include "hybridbath/algebra.hpp"
#include "hybridbath/coeffs.hpp"
#include "hybridbath/errors.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace hybridbath {

// One dissipator channel c(t) [A rho, B] + h.c. with its coefficient sampled
// on the same uniform grid the propagator steps over.
struct DissipatorTerm {
    std::vector<complexd> coefficient;
    Matrix left_op;   // A
    Matrix right_op;  // B
};

struct MasterGenerator {
    Matrix hamiltonian;
    std::vector<DissipatorTerm> terms;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
};

// drho/dt for fixed per-term coefficient values
inline Matrix generator_apply(const MasterGenerator& gen, const std::vector<complexd>& coeff,
                              const Matrix& rho) {
    Matrix out = complexd(0.0, -1.0) * (gen.hamiltonian * rho - rho * gen.hamiltonian);
    Matrix s = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t j = 0; j < gen.terms.size(); ++j) {
        const Matrix& A = gen.terms[j].left_op;
        const Matrix& B = gen.terms[j].right_op;
        s += coeff[j] * (A * rho * B - B * A * rho);
    }
    out += s;
    out += s.adjoint().eval();
    return out;
}

// RK4 propagation over [0, horizon]; coefficient samples are taken at grid
// points and averaged for the half-step stages (linear interpolation at the
// midpoint). Trace drift beyond 1e-6 aborts: the generator is trace-free, so
// any real drift means the step size cannot hold the stiffness.
inline Trajectory evolve(const MasterGenerator& gen, const Matrix& rho0,
                         double horizon, double dt) {
    const std::size_t N = detail::step_count(horizon, dt, "evolve");
    require_density_matrix(rho0, "evolve");
    const Eigen::Index d = rho0.rows();
    if (gen.hamiltonian.rows() != d || gen.hamiltonian.cols() != d)
        throw std::invalid_argument("evolve: hamiltonian dimension does not match rho0");
    for (const auto& term : gen.terms) {
        if (term.left_op.rows() != d || term.left_op.cols() != d ||
            term.right_op.rows() != d || term.right_op.cols() != d)
            throw std::invalid_argument("evolve: dissipator operator dimension does not match rho0");
        if (term.coefficient.size() < N + 1)
            throw std::invalid_argument("evolve: coefficient series does not cover the horizon");
    }

    const std::size_t M = gen.terms.size();
    std::vector<complexd> c_lo(M), c_mid(M), c_hi(M);

    Trajectory traj;
    traj.times.reserve(N + 1);
    traj.states.reserve(N + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);

    Matrix rho = rho0;
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t j = 0; j < M; ++j) {
            c_lo[j] = gen.terms[j].coefficient[n];
            c_hi[j] = gen.terms[j].coefficient[n + 1];
            c_mid[j] = 0.5 * (c_lo[j] + c_hi[j]);
        }
        const Matrix k1 = generator_apply(gen, c_lo, rho);
        const Matrix k2 = generator_apply(gen, c_mid, rho + (0.5 * dt) * k1);
        const Matrix k3 = generator_apply(gen, c_mid, rho + (0.5 * dt) * k2);
        const Matrix k4 = generator_apply(gen, c_hi, rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double t1 = double(n + 1) * dt;
        const double drift = std::abs(rho.trace() - complexd(1.0));
        if (!(drift <= 1e-6)) {
            std::ostringstream msg;
            msg << "evolve: trace drift " << drift << " at t = " << t1;
            throw integration_error(msg.str());
        }
        traj.times.push_back(t1);
        traj.states.push_back(rho);
    }
    return traj;
}

// Minimum eigenvalue over a trajectory. Zeroth-order generators may push
// eigenvalues slightly negative; that is reported as a warning, not an error.
struct PositivityReport {
    double min_eigenvalue = 0.0;
    double time_of_min = 0.0;
    bool warning = false;
};

inline PositivityReport positivity_monitor(const Trajectory& traj) {
    PositivityReport report;
    bool first = true;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const double ev = min_eigenvalue(traj.states[i]);
        if (first || ev < report.min_eigenvalue) {
            report.min_eigenvalue = ev;
            report.time_of_min = traj.times[i];
            first = false;
        }
    }
    report.warning = report.min_eigenvalue < -1e-6;
    return report;
}

} // namespace hybridbath
