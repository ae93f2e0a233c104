// algebra.hpp: dense complex operators for qubits, truncated bosons, and
// Jordan-Wigner fermions, plus the partial trace

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <stdexcept>
#include <vector>

namespace hybridbath {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// --------------------------- qubit operators --------------------------------
//
// Basis convention, frozen for all golden files: |0> = excited, |1> = ground,
// so sigma_z = diag(1,-1) and sigma_minus maps |0> to |1>.

inline Matrix identity(Eigen::Index dim) {
    return Matrix::Identity(dim, dim);
}

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0.0, complexd(0.0, -1.0),
         complexd(0.0, 1.0), 0.0;
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1.0,  0.0,
         0.0, -1.0;
    return m;
}

inline Matrix sigma_minus() { // |ground><excited|
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline Matrix sigma_plus() { // |excited><ground|
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

// --------------------------- tensor products --------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix kron_all(const std::vector<Matrix>& factors) {
    if (factors.empty()) return identity(1);
    Matrix out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
    return out;
}

// --------------------------- mode operators ---------------------------------

// Truncated annihilation operator, b|n> = sqrt(n)|n-1> on Fock states 0..cutoff-1.
inline std::pair<Matrix, Matrix> boson_ops(int cutoff) {
    if (cutoff < 2) throw std::invalid_argument("boson_ops: cutoff must be >= 2");
    Matrix b = Matrix::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) b(n - 1, n) = std::sqrt(double(n));
    return {b, b.adjoint()};
}

// Jordan-Wigner mode operators on 2^n_modes dimensions. The parity string
// sits on the modes preceding `mode`, so {c_i, c_j^dag} = delta_ij and all
// same-type pairs anticommute. Occupation basis is vacuum-first per mode.
inline std::pair<Matrix, Matrix> fermion_ops(int n_modes, int mode) {
    if (n_modes < 1) throw std::invalid_argument("fermion_ops: n_modes must be >= 1");
    if (mode < 0 || mode >= n_modes) throw std::invalid_argument("fermion_ops: mode out of range");
    Matrix a(2, 2), parity(2, 2);
    a << 0.0, 1.0,
         0.0, 0.0;           // a|occupied> = |empty>
    parity << 1.0, 0.0,
              0.0, -1.0;     // (-1)^n
    std::vector<Matrix> factors;
    factors.reserve(std::size_t(n_modes));
    for (int j = 0; j < n_modes; ++j) {
        if (j < mode) factors.push_back(parity);
        else if (j == mode) factors.push_back(a);
        else factors.push_back(identity(2));
    }
    Matrix c = kron_all(factors);
    return {c, c.adjoint()};
}

// --------------------------- partial trace ----------------------------------

// Trace out all factors not listed in `keep` (indices into `dims`, ascending
// order preserved). Multi-index arithmetic over row-major factor layout.
inline Matrix partial_trace(const Matrix& rho, const std::vector<Eigen::Index>& dims,
                            const std::vector<std::size_t>& keep) {
    Eigen::Index total = 1;
    for (Eigen::Index d : dims) {
        if (d < 1) throw std::invalid_argument("partial_trace: factor dims must be >= 1");
        total *= d;
    }
    if (total != rho.rows() || total != rho.cols())
        throw std::invalid_argument("partial_trace: factor dims do not multiply to rho dim");
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) throw std::invalid_argument("partial_trace: keep index out of range");
        kept[k] = true;
    }

    Eigen::Index dim_keep = 1, dim_env = 1;
    for (std::size_t f = 0; f < dims.size(); ++f) (kept[f] ? dim_keep : dim_env) *= dims[f];

    // strides of each factor in the full row index
    std::vector<Eigen::Index> stride(dims.size());
    Eigen::Index acc = 1;
    for (std::size_t f = dims.size(); f-- > 0;) {
        stride[f] = acc;
        acc *= dims[f];
    }

    // enumerate (kept multi-index, env multi-index) pairs
    Matrix out = Matrix::Zero(dim_keep, dim_keep);
    std::vector<Eigen::Index> idx(dims.size(), 0);
    // full row index for a given kept-index K and env-index E
    auto full_index = [&](Eigen::Index K, Eigen::Index E) {
        Eigen::Index r = 0;
        Eigen::Index k_rem = K, e_rem = E;
        // decode from the last factor upward so digit order matches stride order
        for (std::size_t f = dims.size(); f-- > 0;) {
            Eigen::Index digit;
            if (kept[f]) {
                digit = k_rem % dims[f];
                k_rem /= dims[f];
            } else {
                digit = e_rem % dims[f];
                e_rem /= dims[f];
            }
            r += digit * stride[f];
        }
        return r;
    };
    for (Eigen::Index ki = 0; ki < dim_keep; ++ki)
        for (Eigen::Index kj = 0; kj < dim_keep; ++kj) {
            complexd sum = 0.0;
            for (Eigen::Index e = 0; e < dim_env; ++e)
                sum += rho(full_index(ki, e), full_index(kj, e));
            out(ki, kj) = sum;
        }
    return out;
}

// --------------------------- checks and metrics -----------------------------

inline double max_abs(const Matrix& a) {
    return a.cwiseAbs().maxCoeff();
}

inline bool hermitian_check(const Matrix& a) {
    return max_abs(a - a.adjoint()) <= 1e-12;
}

// 0.5 * trace norm of the (hermitized) difference; the standard trace distance
// when both arguments are density matrices.
inline double trace_distance(const Matrix& a, const Matrix& b) {
    Matrix d = a - b;
    Matrix h = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double min_eigenvalue(const Matrix& rho) {
    Matrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Validate a density matrix: hermitian to 1e-10 and unit trace to 1e-8.
inline void require_density_matrix(const Matrix& rho, const char* where) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument(std::string(where) + ": density matrix must be square");
    if (max_abs(rho - rho.adjoint()) > 1e-10)
        throw std::invalid_argument(std::string(where) + ": density matrix not hermitian");
    if (std::abs(rho.trace() - complexd(1.0)) > 1e-8)
        throw std::invalid_argument(std::string(where) + ": density matrix trace must be 1");
}

// --------------------------- common states ----------------------------------

inline Vector basis_state(Eigen::Index dim, Eigen::Index which) {
    if (which < 0 || which >= dim) throw std::invalid_argument("basis_state: index out of range");
    Vector v = Vector::Zero(dim);
    v(which) = 1.0;
    return v;
}

inline Vector plus_state() { // (|0> + |1>)/sqrt(2)
    Vector v(2);
    v << 1.0, 1.0;
    return v / std::sqrt(2.0);
}

inline Matrix pure_density(const Vector& psi) {
    return psi * psi.adjoint();
}

} // namespace hybridbath
