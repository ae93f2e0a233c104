// operator toolkit checks: Pauli algebra, tensor products, canonical
// (anti)commutation relations, and the partial trace against an
// independently written index-loop reference
#include <catch2/catch_amalgamated.hpp>

#include "hybridbath/algebra.hpp"

#include <random>

using namespace hybridbath;

namespace {

Matrix random_matrix(Eigen::Index n, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complexd(u(gen), u(gen));
    return m;
}

Matrix random_density(Eigen::Index n, std::uint32_t seed) {
    const Matrix m = random_matrix(n, seed);
    Matrix rho = m * m.adjoint();
    rho /= rho.trace();
    return rho;
}

// partial trace written the slow way: explicit nested loops over the kept
// index pair and a sum over every configuration of the traced factors
Matrix partial_trace_reference(const Matrix& rho, const std::vector<Eigen::Index>& dims,
                               std::size_t keep) {
    const Eigen::Index dk = dims[keep];
    Eigen::Index denv = 1;
    for (std::size_t f = 0; f < dims.size(); ++f)
        if (f != keep) denv *= dims[f];

    auto full_index = [&](Eigen::Index kept, Eigen::Index env) {
        Eigen::Index idx = 0;
        Eigen::Index remaining = env;
        for (std::size_t f = 0; f < dims.size(); ++f) {
            Eigen::Index digit;
            if (f == keep) {
                digit = kept;
            } else {
                Eigen::Index tail = 1;
                for (std::size_t g = f + 1; g < dims.size(); ++g)
                    if (g != keep) tail *= dims[g];
                digit = remaining / tail;
                remaining %= tail;
            }
            idx = idx * dims[f] + digit;
        }
        return idx;
    };

    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; ++i)
        for (Eigen::Index j = 0; j < dk; ++j)
            for (Eigen::Index e = 0; e < denv; ++e)
                out(i, j) += rho(full_index(i, e), full_index(j, e));
    return out;
}

} // namespace

TEST_CASE("pauli matrices satisfy their algebra", "[algebra]") {
    const Matrix I = identity(2);
    CHECK(max_abs(sigma_x() * sigma_x() - I) < 1e-15);
    CHECK(max_abs(sigma_y() * sigma_y() - I) < 1e-15);
    CHECK(max_abs(sigma_z() * sigma_z() - I) < 1e-15);
    const Matrix comm = sigma_x() * sigma_y() - sigma_y() * sigma_x();
    CHECK(max_abs(comm - complexd(0.0, 2.0) * sigma_z()) < 1e-15);
    // ladder operators against their x/y decomposition
    CHECK(max_abs(sigma_minus() - 0.5 * (sigma_x() - complexd(0.0, 1.0) * sigma_y())) < 1e-15);
    CHECK(max_abs(sigma_plus() - sigma_minus().adjoint().eval()) < 1e-15);
    // excited state is the first basis vector in this convention
    CHECK(max_abs(sigma_z() * pure_density(basis_state(2, 0)) - pure_density(basis_state(2, 0))) <
          1e-15);
    CHECK((sigma_minus() * basis_state(2, 0) - basis_state(2, 1)).norm() < 1e-15);
}

TEST_CASE("kron satisfies the mixed-product property", "[algebra]") {
    const Matrix A = random_matrix(2, 11), B = random_matrix(3, 12);
    const Matrix C = random_matrix(2, 13), D = random_matrix(3, 14);
    CHECK(max_abs(kron(A, B) * kron(C, D) - kron((A * C).eval(), (B * D).eval())) < 1e-12);
    // block layout: first factor indexes blocks, second indexes within
    Matrix small(2, 2);
    small << 1.0, 2.0, 3.0, 4.0;
    const Matrix K = kron(small, identity(3));
    CHECK(K.rows() == 6);
    CHECK(K(0, 0) == complexd(1.0));
    CHECK(K(0, 3) == complexd(2.0));
    CHECK(K(3, 0) == complexd(3.0));
    CHECK(K(5, 5) == complexd(4.0));
    CHECK(max_abs(kron_all({A, B, C}) - kron(kron(A, B), C)) < 1e-12);
}

TEST_CASE("boson operators obey the truncated ladder algebra", "[algebra]") {
    const int cutoff = 7;
    auto [a, adag] = boson_ops(cutoff);
    CHECK(max_abs(adag - a.adjoint().eval()) < 1e-15);
    // number operator
    const Matrix n = adag * a;
    for (int k = 0; k < cutoff; ++k) CHECK(std::abs(n(k, k) - complexd(k)) < 1e-13);
    // [a, adag] = 1 away from the truncation edge
    const Matrix comm = a * adag - adag * a;
    for (int k = 0; k + 1 < cutoff; ++k) CHECK(std::abs(comm(k, k) - complexd(1.0)) < 1e-13);
    CHECK((a * basis_state(cutoff, 0)).norm() < 1e-15); // annihilates vacuum
    CHECK_THROWS_AS(boson_ops(1), std::invalid_argument);
}

TEST_CASE("fermion operators satisfy canonical anticommutation", "[algebra]") {
    for (int n_modes = 1; n_modes <= 4; ++n_modes) {
        std::vector<Matrix> c(n_modes);
        for (int m = 0; m < n_modes; ++m) c[m] = fermion_ops(n_modes, m).first;
        const Eigen::Index D = c[0].rows();
        for (int i = 0; i < n_modes; ++i)
            for (int j = 0; j < n_modes; ++j) {
                const Matrix acd = c[i] * c[j].adjoint() + c[j].adjoint() * c[i];
                const Matrix expect = i == j ? identity(D) : Matrix::Zero(D, D).eval();
                CHECK(max_abs(acd - expect) < 1e-12);
                CHECK(max_abs(c[i] * c[j] + c[j] * c[i]) < 1e-12);
            }
    }
}

TEST_CASE("partial trace matches an independent reference", "[algebra]") {
    const std::vector<Eigen::Index> dims = {2, 3, 2};
    const Matrix rho = random_density(12, 21);
    for (std::size_t keep = 0; keep < dims.size(); ++keep) {
        const Matrix fast = partial_trace(rho, dims, {keep});
        const Matrix slow = partial_trace_reference(rho, dims, keep);
        CHECK(max_abs(fast - slow) < 1e-12);
        CHECK(std::abs(fast.trace() - rho.trace()) < 1e-12);
    }
}

TEST_CASE("partial trace of a Bell state is maximally mixed", "[algebra]") {
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const Matrix rho = pure_density(bell);
    const Matrix reduced = partial_trace(rho, {2, 2}, {0});
    CHECK(max_abs(reduced - 0.5 * identity(2)) < 1e-14);
}

TEST_CASE("trace distance behaves like a metric on states", "[algebra]") {
    const Matrix r1 = random_density(4, 31), r2 = random_density(4, 32);
    CHECK(trace_distance(r1, r1) == Catch::Approx(0.0).margin(1e-14));
    CHECK(trace_distance(r1, r2) == Catch::Approx(trace_distance(r2, r1)).margin(1e-13));
    CHECK(trace_distance(r1, r2) > 0.0);
    CHECK(trace_distance(r1, r2) <= 1.0 + 1e-12);
    // orthogonal pure states sit at distance 1
    const Matrix p0 = pure_density(basis_state(2, 0)), p1 = pure_density(basis_state(2, 1));
    CHECK(trace_distance(p0, p1) == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("density-matrix validation rejects malformed inputs", "[algebra]") {
    CHECK_NOTHROW(require_density_matrix(pure_density(plus_state()), "test"));
    Matrix bad_trace = 2.0 * pure_density(plus_state());
    CHECK_THROWS_AS(require_density_matrix(bad_trace, "test"), std::invalid_argument);
    Matrix non_hermitian = pure_density(plus_state());
    non_hermitian(0, 1) += complexd(0.0, 1e-3);
    CHECK_THROWS_AS(require_density_matrix(non_hermitian, "test"), std::invalid_argument);
}

TEST_CASE("plus state and basis states have the advertised layout", "[algebra]") {
    const Matrix rho = pure_density(plus_state());
    CHECK(std::abs(rho(0, 0) - complexd(0.5)) < 1e-15);
    CHECK(std::abs(rho(1, 0) - complexd(0.5)) < 1e-15);
    CHECK(std::abs(rho.trace() - complexd(1.0)) < 1e-15);
    CHECK(min_eigenvalue(rho) > -1e-14);
    CHECK(basis_state(5, 3)(3) == complexd(1.0));
    CHECK_THROWS_AS(basis_state(2, 5), std::invalid_argument);
}
