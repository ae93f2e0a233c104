// oracle.hpp: brute-force ground truth. Builds the full system x boson x
// fermion Hilbert space for finitely many modes, integrates the Schrodinger
// equation, and partial-traces onto the system at every grid time.
//
// Fermionic bath operators are Jordan-Wigner chains. For a coupling operator
// that commutes with the bath (first commutation class) the chain lives
// inside the fermion factor alone; for an anti-commuting system mode (second
// class) the chain starts at the system factor, whose parity passes through
// the boson factor as identity.

#pragma once

#include "hybridbath/algebra.hpp"
#include "hybridbath/errors.hpp"
#include "hybridbath/master.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace hybridbath {

struct BosonModeSpec {
    double omega;
    double lambda;
    int cutoff;
};

struct FermionModeSpec {
    double epsilon;
    double mu;
};

enum class CommutationClass { commutative, anti_commutative };

struct TotalSystemSpec {
    Eigen::Index system_dim = 2;
    Matrix system_hamiltonian;
    std::vector<BosonModeSpec> boson_modes;
    std::vector<FermionModeSpec> fermion_modes;
    Matrix coupling_b;  // L_b, multiplies a_k^dag
    Matrix coupling_f;  // L_f, multiplies c_k^dag
    CommutationClass commutation_class = CommutationClass::commutative;
    Vector initial_system;  // baths start in the joint vacuum
};

// Everything assembled on the total space, exposed so tests can check the
// (anti)commutation relations directly on the matrices actually used.
struct TotalOperators {
    std::vector<Eigen::Index> dims;  // system, bosons..., fermions...
    Eigen::Index total_dim = 0;
    Matrix hamiltonian;
    Matrix coupling_b_total;
    Matrix coupling_f_total;
    std::vector<Matrix> boson_annihilators;
    std::vector<Matrix> fermion_annihilators;
};

namespace detail {

// op placed at factor `slot`, identities elsewhere
inline Matrix lift(const std::vector<Eigen::Index>& dims, std::size_t slot, const Matrix& op) {
    std::vector<Matrix> factors;
    factors.reserve(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i)
        factors.push_back(i == slot ? op : identity(dims[i]));
    return kron_all(factors);
}

} // namespace detail

inline TotalOperators build_total_operators(const TotalSystemSpec& spec) {
    const Eigen::Index ds = spec.system_dim;
    if (ds < 1) throw std::invalid_argument("build_total_operators: system_dim must be >= 1");
    if (spec.system_hamiltonian.rows() != ds || spec.system_hamiltonian.cols() != ds)
        throw std::invalid_argument("build_total_operators: system_hamiltonian dimension mismatch");
    if (spec.coupling_b.rows() != ds || spec.coupling_b.cols() != ds ||
        spec.coupling_f.rows() != ds || spec.coupling_f.cols() != ds)
        throw std::invalid_argument("build_total_operators: coupling operator dimension mismatch");

    TotalOperators ops;
    ops.dims.push_back(ds);
    Eigen::Index D = ds;
    for (const auto& bm : spec.boson_modes) {
        if (bm.cutoff < 2) throw std::invalid_argument("build_total_operators: boson cutoff must be >= 2");
        ops.dims.push_back(bm.cutoff);
        D *= bm.cutoff;
    }
    for (std::size_t k = 0; k < spec.fermion_modes.size(); ++k) {
        ops.dims.push_back(2);
        D *= 2;
    }
    if (D > 4096) {
        std::ostringstream msg;
        msg << "build_total_operators: total dimension " << D << " exceeds the 4096 guard";
        throw resource_error(msg.str());
    }
    ops.total_dim = D;

    const std::size_t nb = spec.boson_modes.size();
    const std::size_t nf = spec.fermion_modes.size();
    const Matrix parity = (Matrix(2, 2) << 1.0, 0.0, 0.0, -1.0).finished();

    ops.coupling_b_total = detail::lift(ops.dims, 0, spec.coupling_b);
    ops.coupling_f_total = detail::lift(ops.dims, 0, spec.coupling_f);

    if (spec.commutation_class == CommutationClass::anti_commutative) {
        // the system hosts one fermionic mode; its parity heads every bath chain
        if (ds != 2)
            throw std::invalid_argument(
                "build_total_operators: anti-commutative class expects a two-level system mode");
        if (max_abs(spec.coupling_f * parity + parity * spec.coupling_f) > 1e-12)
            throw std::invalid_argument(
                "build_total_operators: coupling_f must be odd under diag(1,-1) parity");
    }

    for (std::size_t k = 0; k < nb; ++k) {
        auto [a, adag] = boson_ops(int(spec.boson_modes[k].cutoff));
        (void)adag;
        ops.boson_annihilators.push_back(detail::lift(ops.dims, 1 + k, a));
    }
    const Matrix cmode = (Matrix(2, 2) << 0.0, 1.0, 0.0, 0.0).finished(); // |vac><occ|
    for (std::size_t k = 0; k < nf; ++k) {
        std::vector<Matrix> factors;
        factors.reserve(ops.dims.size());
        const bool global_chain = spec.commutation_class == CommutationClass::anti_commutative;
        factors.push_back(global_chain ? parity : identity(ds));
        for (std::size_t j = 0; j < nb; ++j) factors.push_back(identity(ops.dims[1 + j]));
        for (std::size_t j = 0; j < nf; ++j) {
            if (j < k) factors.push_back(parity);
            else if (j == k) factors.push_back(cmode);
            else factors.push_back(identity(2));
        }
        ops.fermion_annihilators.push_back(kron_all(factors));
    }

    Matrix H = detail::lift(ops.dims, 0, spec.system_hamiltonian);
    for (std::size_t k = 0; k < nb; ++k) {
        const Matrix& a = ops.boson_annihilators[k];
        const Matrix adag = a.adjoint();
        H += spec.boson_modes[k].omega * (adag * a);
        // L_b a^dag + its literal matrix adjoint; factors commute, so this is
        // the usual L_b a^dag + L_b^dag a
        const Matrix Vb = spec.boson_modes[k].lambda * (ops.coupling_b_total * adag);
        H += Vb + Vb.adjoint();
    }
    for (std::size_t k = 0; k < nf; ++k) {
        const Matrix& c = ops.fermion_annihilators[k];
        const Matrix cdag = c.adjoint();
        H += spec.fermion_modes[k].epsilon * (cdag * c);
        // Hermitian completion of L_f c^dag; for the anti-commuting class the
        // adjoint picks up the Jordan-Wigner sign, which only redefines the
        // coupling sign and leaves every |mu|^2 kernel unchanged
        const Matrix Vf = spec.fermion_modes[k].mu * (ops.coupling_f_total * cdag);
        H += Vf + Vf.adjoint();
    }
    ops.hamiltonian = H;
    return ops;
}

// total-space state vector: system state joined with all-mode vacuum
inline Vector initial_total_state(const TotalSystemSpec& spec, const TotalOperators& ops) {
    if (spec.initial_system.size() != spec.system_dim)
        throw std::invalid_argument("initial_total_state: initial_system has wrong dimension");
    if (std::abs(spec.initial_system.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("initial_total_state: initial_system must be normalized");
    Vector psi = spec.initial_system;
    for (std::size_t i = 1; i < ops.dims.size(); ++i) {
        Vector vac = Vector::Zero(ops.dims[i]);
        vac(0) = 1.0;
        Vector next(psi.size() * vac.size());
        for (Eigen::Index p = 0; p < psi.size(); ++p)
            next.segment(p * vac.size(), vac.size()) = psi(p) * vac;
        psi = std::move(next);
    }
    return psi;
}

// reduced density matrix of a pure total state; the system is the leading
// tensor factor, so the state reshapes to (system x environment) row-major
inline Matrix reduce_to_system(const Vector& psi, Eigen::Index system_dim) {
    const Eigen::Index de = psi.size() / system_dim;
    Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        M(psi.data(), system_dim, de);
    return M * M.adjoint();
}

// Exact stepping through the eigenbasis for small spaces, RK4 above. The
// 256 threshold keeps the dense eigensolve cost negligible next to the run.
inline Trajectory oracle_evolve(const TotalSystemSpec& spec, double horizon, double dt) {
    const std::size_t N = detail::step_count(horizon, dt, "oracle_evolve");
    const TotalOperators ops = build_total_operators(spec);
    Vector psi = initial_total_state(spec, ops);

    Trajectory traj;
    traj.times.reserve(N + 1);
    traj.states.reserve(N + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(reduce_to_system(psi, spec.system_dim));

    const Matrix Hh = 0.5 * (ops.hamiltonian + ops.hamiltonian.adjoint().eval());
    if (ops.total_dim <= 256) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(Hh);
        const Matrix U = es.eigenvectors();
        Vector phase(ops.total_dim);
        for (Eigen::Index i = 0; i < ops.total_dim; ++i)
            phase(i) = std::exp(complexd(0.0, -es.eigenvalues()(i) * dt));
        const Matrix prop = U * phase.asDiagonal() * U.adjoint();
        for (std::size_t n = 0; n < N; ++n) {
            psi = prop * psi;
            traj.times.push_back(double(n + 1) * dt);
            traj.states.push_back(reduce_to_system(psi, spec.system_dim));
        }
    } else {
        const complexd mi(0.0, -1.0);
        for (std::size_t n = 0; n < N; ++n) {
            const Vector k1 = mi * (Hh * psi);
            const Vector k2 = mi * (Hh * (psi + (0.5 * dt) * k1));
            const Vector k3 = mi * (Hh * (psi + (0.5 * dt) * k2));
            const Vector k4 = mi * (Hh * (psi + dt * k3));
            psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double t1 = double(n + 1) * dt;
            const double drift = std::abs(psi.norm() - 1.0);
            if (!(drift <= 1e-6)) {
                std::ostringstream msg;
                msg << "oracle_evolve: norm drift " << drift << " at t = " << t1;
                throw integration_error(msg.str());
            }
            traj.times.push_back(t1);
            traj.states.push_back(reduce_to_system(psi, spec.system_dim));
        }
    }
    return traj;
}

struct ComparisonReport {
    double max_trace_distance = 0.0;
    double time_of_max = 0.0;
};

inline ComparisonReport compare_to_master(const Trajectory& oracle_traj,
                                          const Trajectory& master_traj) {
    if (oracle_traj.times.size() != master_traj.times.size())
        throw std::invalid_argument("compare_to_master: trajectories have different lengths");
    ComparisonReport report;
    for (std::size_t i = 0; i < oracle_traj.times.size(); ++i) {
        if (std::abs(oracle_traj.times[i] - master_traj.times[i]) > 1e-12)
            throw std::invalid_argument("compare_to_master: time grids do not match");
        const double d = trace_distance(oracle_traj.states[i], master_traj.states[i]);
        if (d > report.max_trace_distance) {
            report.max_trace_distance = d;
            report.time_of_max = oracle_traj.times[i];
        }
    }
    return report;
}

} // namespace hybridbath
