// coeffs.hpp: integrators for the coefficient-function systems that determine
// the O and Q operators, on a growing triangular (t,s) grid
//
// Scheme, shared by every system here: classical RK4 along t applied to all
// stored grid points at once, with the memory integrals recomputed by
// composite trapezoid at each stage from stage-consistent slices. Substage
// times fall between grid points, so the quadrature gains a short
// moving-endpoint panel [t_n, t_n + c dt] closed with the prescribed diagonal
// value. Omitting that panel degrades the scheme to first order globally.

#pragma once

#include "hybridbath/algebra.hpp"
#include "hybridbath/errors.hpp"
#include "hybridbath/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hybridbath {

// One-time coefficient field f(t,s): current slice plus its pinned diagonal.
struct CoefficientField1 {
    std::string name;
    Vector slice;        // f(t, s_j), j = 0..n
    complexd diagonal_value;
};

// Two-time coefficient field f(t,s,s'): current slice over (s, s') <= t.
struct CoefficientField2 {
    std::string name;
    Matrix slice;        // rows s, cols s'
};

// Named master-equation coefficient series on the shared time grid.
struct CoefficientReport {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<complexd>> series; // series[k][i], same order as names

    const std::vector<complexd>& at(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return series[k];
        throw std::invalid_argument("CoefficientReport: no series named " + name);
    }
};

namespace detail {

// Default overflow guard: resonant single-mode kernels genuinely diverge
// (tangent law), and 1e6 flags the approach well before doubles overflow.
inline constexpr double kBlowupGuard = 1e6;

inline void guard_check(double magnitude, double when, double guard) {
    // NaN fails the comparison too, so a poisoned integral also trips here
    if (!(magnitude <= guard)) {
        std::ostringstream msg;
        msg << "memory integral exceeded overflow guard near t = " << when;
        throw singularity_error(when, msg.str());
    }
}

inline std::size_t step_count(double horizon, double dt, const char* where) {
    if (!(dt > 0.0)) throw std::invalid_argument(std::string(where) + ": dt must be > 0");
    if (!(horizon >= dt)) throw std::invalid_argument(std::string(where) + ": horizon must be >= dt");
    return std::size_t(std::llround(horizon / dt));
}

// Incrementally tracked kernel phases z_r[j] = exp(rate_r (t_n - s_j)).
// Advancing one step multiplies every entry by exp(rate dt) and appends 1, so
// the hot loop never calls exp and, for decaying kernels, never overflows
// (|z| <= 1 throughout). Stage offsets multiply by cached half/full factors.
struct KernelTrack {
    struct Term {
        complexd weight;
        complexd rate;
        complexd half_mul;  // exp(rate dt/2)
        complexd full_mul;  // exp(rate dt)
        Vector z;
    };
    std::vector<Term> terms;
    complexd coincidence{0.0, 0.0}; // K(0)

    KernelTrack(const CorrelationKernel& kernel, double dt, std::size_t capacity) {
        terms.reserve(kernel.terms.size());
        for (const auto& kt : kernel.terms) {
            Term t;
            t.weight = kt.weight;
            t.rate = kt.rate;
            t.half_mul = std::exp(kt.rate * (dt / 2.0));
            t.full_mul = std::exp(kt.rate * dt);
            t.z = Vector::Zero(Eigen::Index(capacity));
            t.z(0) = 1.0;
            terms.push_back(std::move(t));
            coincidence += kt.weight;
        }
    }

    // move the anchor t_n -> t_{n+1}; n1 is the old number of points
    void advance(Eigen::Index n1) {
        for (auto& t : terms) {
            t.z.head(n1) *= t.full_mul;
            t.z(n1) = 1.0;
        }
    }

    // stage = 0, 1, 2 for offsets 0, dt/2, dt
    static complexd stage_mul(const Term& t, int stage) {
        return stage == 0 ? complexd(1.0) : (stage == 1 ? t.half_mul : t.full_mul);
    }

    // K evaluated at gap (tau - t_n) for the given stage offset
    complexd edge_value(int stage) const {
        complexd k = 0.0;
        for (const auto& t : terms) k += t.weight * stage_mul(t, stage);
        return k;
    }
};

// trapezoid weights as an Eigen vector (first/last halved; single point -> 0);
// complex-valued so they combine with kernel phases without casts
inline Vector trap_weights(Eigen::Index n_points, double dt) {
    Vector w = Vector::Constant(n_points, complexd(dt));
    if (n_points <= 1) {
        w.setZero();
        return w;
    }
    w(0) = 0.5 * dt;
    w(n_points - 1) = 0.5 * dt;
    return w;
}

} // namespace detail

// --------------------------- one-time systems -------------------------------
//
// Shared driver for the purely one-time coefficient systems (single-qubit,
// dephasing, Anderson): every field obeys d/dt f_m(t,s) = a_m(F) f_m(t,s)
// with the multipliers a_m depending only on the aggregate integrals
// F_m(t) = int K_m(t,s) f_m(t,s) ds.

struct OneTimeFieldSpec {
    std::string name;          // aggregate series name in the report
    CorrelationKernel kernel;
    complexd diagonal;         // pinned f(t,t)
};

template <typename MultiplierFn>
CoefficientReport integrate_one_time(const std::vector<OneTimeFieldSpec>& fields,
                                     MultiplierFn&& multipliers,
                                     double horizon, double dt,
                                     double guard = detail::kBlowupGuard) {
    const std::size_t N = detail::step_count(horizon, dt, "integrate_one_time");
    const std::size_t M = fields.size();

    std::vector<Vector> slice(M), st(M), k(M), acc(M);
    std::vector<detail::KernelTrack> track;
    track.reserve(M);
    for (std::size_t m = 0; m < M; ++m) {
        slice[m] = Vector::Zero(Eigen::Index(N + 1));
        slice[m](0) = fields[m].diagonal;
        st[m] = k[m] = acc[m] = Vector::Zero(Eigen::Index(N + 1));
        track.emplace_back(fields[m].kernel, dt, N + 1);
    }

    CoefficientReport report;
    report.times.resize(N + 1);
    report.times[0] = 0.0;
    for (const auto& f : fields) report.names.push_back(f.name);
    report.series.assign(M, std::vector<complexd>(N + 1, complexd(0.0)));

    std::vector<complexd> F(M), rate(M);
    // RK4 tableau: stage offsets c, input weights a (on the previous k), and
    // accumulation weights b
    const double c_of[4] = {0.0, 0.5, 0.5, 1.0};
    const double a_of[4] = {0.0, 0.5, 0.5, 1.0};
    const double b_of[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

    for (std::size_t n = 0; n < N; ++n) {
        const double t_n = double(n) * dt;
        const Eigen::Index n1 = Eigen::Index(n + 1);
        const Vector w = detail::trap_weights(n1, dt);

        for (std::size_t m = 0; m < M; ++m) acc[m].head(n1) = slice[m].head(n1);

        for (int ic = 0; ic < 4; ++ic) {
            const double tau = t_n + c_of[ic] * dt;
            for (std::size_t m = 0; m < M; ++m) {
                if (ic == 0)
                    st[m].head(n1) = slice[m].head(n1);
                else
                    st[m].head(n1) = slice[m].head(n1) + (a_of[ic] * dt) * k[m].head(n1);
            }
            // stage-consistent aggregates with the moving-endpoint panel
            const double h2 = 0.5 * c_of[ic] * dt;
            const int stage = (ic == 0) ? 0 : (ic == 3 ? 2 : 1);
            for (std::size_t m = 0; m < M; ++m) {
                complexd sum = 0.0;
                for (const auto& term : track[m].terms) {
                    complexd d = (term.z.head(n1).array() * st[m].head(n1).array() * w.array()).sum();
                    sum += term.weight * detail::KernelTrack::stage_mul(term, stage) * d;
                }
                if (h2 > 0.0)
                    sum += h2 * (track[m].edge_value(stage) * st[m](n1 - 1) +
                                 track[m].coincidence * fields[m].diagonal);
                detail::guard_check(std::abs(sum), tau, guard);
                F[m] = sum;
            }
            multipliers(F, rate);
            for (std::size_t m = 0; m < M; ++m) {
                k[m].head(n1) = rate[m] * st[m].head(n1);
                acc[m].head(n1) += (b_of[ic] * dt) * k[m].head(n1);
            }
        }

        for (std::size_t m = 0; m < M; ++m) {
            slice[m].head(n1) = acc[m].head(n1);
            slice[m](n1) = fields[m].diagonal;
            track[m].advance(n1);
        }

        // accepted aggregates at t_{n+1}
        const Vector w2 = detail::trap_weights(n1 + 1, dt);
        const double t1 = double(n + 1) * dt;
        for (std::size_t m = 0; m < M; ++m) {
            complexd sum = 0.0;
            for (const auto& term : track[m].terms)
                sum += term.weight * (term.z.head(n1 + 1).array() * slice[m].head(n1 + 1).array() * w2.array()).sum();
            detail::guard_check(std::abs(sum), t1, guard);
            report.series[m][n + 1] = sum;
        }
        report.times[n + 1] = t1;
    }
    return report;
}

// Single qubit with both baths coupled through sigma_minus. The hybrid sum
// K_b + K_f enters as one kernel: d/dt f = [i omega + F(t)] f with
// F(t) = int (K_b + K_f)(t,s) f(t,s) ds. Emits series "F".
inline CoefficientReport integrate_single_qubit_coeffs(const CorrelationKernel& kernel_sum_bf,
                                                       double omega, double horizon, double dt,
                                                       double guard = detail::kBlowupGuard) {
    std::vector<OneTimeFieldSpec> fields = {{"F", kernel_sum_bf, complexd(1.0)}};
    auto mult = [omega](const std::vector<complexd>& F, std::vector<complexd>& a) {
        a[0] = complexd(0.0, omega) + F[0];
    };
    return integrate_one_time(fields, mult, horizon, dt, guard);
}

// Dephasing bosonic channel plus dissipative fermionic channel. The
// dissipative field obeys d/dt g = [i omega + G] g; the dephasing operator is
// constant, so its coefficient is the bare integral F(t) = int K_b(t,s) ds,
// realized here as a frozen field f == 1. Emits series "G", "F".
inline CoefficientReport integrate_dephasing_qubit_coeffs(const CorrelationKernel& kernel_f,
                                                          const CorrelationKernel& kernel_b,
                                                          double omega, double horizon, double dt,
                                                          double guard = detail::kBlowupGuard) {
    std::vector<OneTimeFieldSpec> fields = {
        {"G", kernel_f, complexd(1.0)},
        {"F", kernel_b, complexd(1.0)},
    };
    auto mult = [omega](const std::vector<complexd>& F, std::vector<complexd>& a) {
        a[0] = complexd(0.0, omega) + F[0];
        a[1] = 0.0;
    };
    return integrate_one_time(fields, mult, horizon, dt, guard);
}

// Quantum dot in a hybrid bath: bosonic dephasing field f1 is frozen at 1
// (d/dt f1 = 0), and the four lead fields share the aggregate sum
// S = F1 + F_La + F_Ra + F_Lc + F_Rc, with d/dt f_ic = (+i eps + S) f_ic and
// d/dt f_ia = (-i eps - S) f_ia. Emits "F1", "FLc", "FRc", "FLa", "FRa".
inline CoefficientReport integrate_anderson_coeffs(const CorrelationKernel& alpha,
                                                   const CorrelationKernel& kernel_La,
                                                   const CorrelationKernel& kernel_Lc,
                                                   const CorrelationKernel& kernel_Ra,
                                                   const CorrelationKernel& kernel_Rc,
                                                   double epsilon, double horizon, double dt,
                                                   double guard = detail::kBlowupGuard) {
    std::vector<OneTimeFieldSpec> fields = {
        {"F1", alpha, complexd(1.0)},
        {"FLc", kernel_Lc, complexd(1.0)},
        {"FRc", kernel_Rc, complexd(1.0)},
        {"FLa", kernel_La, complexd(1.0)},
        {"FRa", kernel_Ra, complexd(1.0)},
    };
    auto mult = [epsilon](const std::vector<complexd>& F, std::vector<complexd>& a) {
        const complexd S = F[0] + F[1] + F[2] + F[3] + F[4];
        const complexd up = complexd(0.0, epsilon) + S;
        a[0] = 0.0;
        a[1] = up;
        a[2] = up;
        a[3] = -up;
        a[4] = -up;
    };
    return integrate_one_time(fields, mult, horizon, dt, guard);
}

// --------------------------- two-qubit system -------------------------------

// Post-step view of all eight coefficient fields, for boundary-condition and
// identity tests. Slices live on s, s' in {0, dt, ..., step*dt}: the leading
// (step+1) entries of the vectors and the top-left (step+1)^2 blocks of the
// matrices are valid.
struct TwoQubitSlices {
    std::size_t step;
    double dt;
    const Vector& f1;
    const Vector& f2;
    const Vector& g1;
    const Vector& g2;
    const Matrix& f3;
    const Matrix& f4;
    const Matrix& g3;
    const Matrix& g4;
};

using TwoQubitObserver = std::function<void(const TwoQubitSlices&)>;

// Two dissipative baths coupled through sigma_minus^A + sigma_minus^B.
// Integrates the one-time fields f1, f2, g1, g2 and the two-time fields
// f3, f4, g3, g4 with their diagonal/edge conditions, and reports
// F1, F2, G1, G2 plus the doubly integrated cross terms F3', F4', G3', G4'.
//
// Storage is the current-t slice only: O(N^2) per two-time field. The
// s'-carrying driving terms iF3 + iG3 in the f1/f2/g1/g2 equations are
// evaluated at s' = s, the only reading consistent with their left sides.
//
// The two boundary rules for g4 disagree at the (t,t,t) corner: the fresh-row
// value is 0 but the fresh-column value is -4i g1 + 4i g2 = -4i. The column
// rule is applied last and wins; f3, f4, g3 have 0 at the corner either way.
inline CoefficientReport integrate_two_qubit_coeffs(const CorrelationKernel& kernel_b,
                                                    const CorrelationKernel& kernel_f,
                                                    double omega, double horizon, double dt,
                                                    const TwoQubitObserver& observer = {},
                                                    double guard = detail::kBlowupGuard) {
    const std::size_t N = detail::step_count(horizon, dt, "integrate_two_qubit_coeffs");
    const Eigen::Index P = Eigen::Index(N + 1);

    // state + stage input + stage slope + accumulator per two-time field
    const std::uint64_t bytes = 16ull * sizeof(complexd) * std::uint64_t(P) * std::uint64_t(P);
    if (bytes > (1ull << 30)) {
        std::ostringstream msg;
        msg << "integrate_two_qubit_coeffs: two-time slices need " << (bytes >> 20)
            << " MiB, over the 1 GiB budget; coarsen dt or shorten the horizon";
        throw resource_error(msg.str());
    }

    Vector f1 = Vector::Zero(P), f2 = Vector::Zero(P), g1 = Vector::Zero(P), g2 = Vector::Zero(P);
    f1(0) = 1.0;
    g1(0) = 1.0;
    Matrix m3 = Matrix::Zero(P, P), m4 = Matrix::Zero(P, P);
    Matrix n3 = Matrix::Zero(P, P), n4 = Matrix::Zero(P, P);

    detail::KernelTrack tb(kernel_b, dt, N + 1), tf(kernel_f, dt, N + 1);

    CoefficientReport report;
    report.times.assign(N + 1, 0.0);
    report.names = {"F1", "F2", "G1", "G2", "F3p", "F4p", "G3p", "G4p"};
    report.series.assign(8, std::vector<complexd>(N + 1, complexd(0.0)));

    if (observer) observer({0, dt, f1, f2, g1, g2, m3, m4, n3, n4});

    // workspace reused across steps
    Vector sf1(P), sf2(P), sg1(P), sg2(P);
    Vector kf1(P), kf2(P), kg1(P), kg2(P);
    Vector af1(P), af2(P), ag1(P), ag2(P);
    Matrix sm3(P, P), sm4(P, P), sn3(P, P), sn4(P, P);
    Matrix km3(P, P), km4(P, P), kn3(P, P), kn4(P, P);
    Matrix am3(P, P), am4(P, P), an3(P, P), an4(P, P);
    Eigen::RowVectorXcd F3v(P), F4v(P), G3v(P), G4v(P), drive3(P), drive4(P), wrow(P);

    const double c_of[4] = {0.0, 0.5, 0.5, 1.0};
    const double a_of[4] = {0.0, 0.5, 0.5, 1.0};
    const double b_of[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
    const complexd iw(0.0, omega);

    // weighted kernel row sum_r weight_r stage_mul_r (w .* z_r) over the first
    // n1 points; evaluates K(tau - s_j) w_j without touching exp
    auto weighted_row = [&](const detail::KernelTrack& tr, const Vector& w,
                            Eigen::Index n1, int stage, Eigen::RowVectorXcd& out) {
        out.head(n1).setZero();
        for (const auto& term : tr.terms)
            out.head(n1) += (term.weight * detail::KernelTrack::stage_mul(term, stage)) *
                            (term.z.head(n1).array() * w.array()).matrix().transpose();
    };
    // plain bilinear sum, no conjugation
    auto rowdot = [](const Eigen::RowVectorXcd& row, const Vector& col, Eigen::Index k) {
        return row.head(k).cwiseProduct(col.head(k).transpose()).sum();
    };

    for (std::size_t n = 0; n < N; ++n) {
        const double t_n = double(n) * dt;
        const Eigen::Index n1 = Eigen::Index(n + 1);
        const Vector w = detail::trap_weights(n1, dt);

        af1.head(n1) = f1.head(n1); af2.head(n1) = f2.head(n1);
        ag1.head(n1) = g1.head(n1); ag2.head(n1) = g2.head(n1);
        am3.topLeftCorner(n1, n1) = m3.topLeftCorner(n1, n1);
        am4.topLeftCorner(n1, n1) = m4.topLeftCorner(n1, n1);
        an3.topLeftCorner(n1, n1) = n3.topLeftCorner(n1, n1);
        an4.topLeftCorner(n1, n1) = n4.topLeftCorner(n1, n1);

        for (int ic = 0; ic < 4; ++ic) {
            const double tau = t_n + c_of[ic] * dt;
            const double h = a_of[ic] * dt;
            if (ic == 0) {
                sf1.head(n1) = f1.head(n1); sf2.head(n1) = f2.head(n1);
                sg1.head(n1) = g1.head(n1); sg2.head(n1) = g2.head(n1);
                sm3.topLeftCorner(n1, n1) = m3.topLeftCorner(n1, n1);
                sm4.topLeftCorner(n1, n1) = m4.topLeftCorner(n1, n1);
                sn3.topLeftCorner(n1, n1) = n3.topLeftCorner(n1, n1);
                sn4.topLeftCorner(n1, n1) = n4.topLeftCorner(n1, n1);
            } else {
                sf1.head(n1) = f1.head(n1) + h * kf1.head(n1);
                sf2.head(n1) = f2.head(n1) + h * kf2.head(n1);
                sg1.head(n1) = g1.head(n1) + h * kg1.head(n1);
                sg2.head(n1) = g2.head(n1) + h * kg2.head(n1);
                sm3.topLeftCorner(n1, n1) = m3.topLeftCorner(n1, n1) + h * km3.topLeftCorner(n1, n1);
                sm4.topLeftCorner(n1, n1) = m4.topLeftCorner(n1, n1) + h * km4.topLeftCorner(n1, n1);
                sn3.topLeftCorner(n1, n1) = n3.topLeftCorner(n1, n1) + h * kn3.topLeftCorner(n1, n1);
                sn4.topLeftCorner(n1, n1) = n4.topLeftCorner(n1, n1) + h * kn4.topLeftCorner(n1, n1);
            }

            const int stage = (ic == 0) ? 0 : (ic == 3 ? 2 : 1);
            const double h2 = 0.5 * c_of[ic] * dt;
            const complexd kb_edge = tb.edge_value(stage), kf_edge = tf.edge_value(stage);

            weighted_row(tb, w, n1, stage, wrow);
            complexd F1 = rowdot(wrow, sf1, n1);
            complexd F2 = rowdot(wrow, sf2, n1);
            F3v.head(n1).noalias() = wrow.head(n1) * sm3.topLeftCorner(n1, n1);
            F4v.head(n1).noalias() = wrow.head(n1) * sm4.topLeftCorner(n1, n1);
            weighted_row(tf, w, n1, stage, wrow);
            complexd G1 = rowdot(wrow, sg1, n1);
            complexd G2 = rowdot(wrow, sg2, n1);
            G3v.head(n1).noalias() = wrow.head(n1) * sn3.topLeftCorner(n1, n1);
            G4v.head(n1).noalias() = wrow.head(n1) * sn4.topLeftCorner(n1, n1);
            if (h2 > 0.0) {
                // moving endpoint: fresh diagonals are 1 (f1,g1), 0 (f2,g2),
                // and the fresh two-time row is 0, so only the s = t_n samples
                // and the one-time coincidence values contribute
                F1 += h2 * (kb_edge * sf1(n1 - 1) + tb.coincidence);
                F2 += h2 * kb_edge * sf2(n1 - 1);
                G1 += h2 * (kf_edge * sg1(n1 - 1) + tf.coincidence);
                G2 += h2 * kf_edge * sg2(n1 - 1);
                F3v.head(n1) += (h2 * kb_edge) * sm3.row(n1 - 1).head(n1);
                F4v.head(n1) += (h2 * kb_edge) * sm4.row(n1 - 1).head(n1);
                G3v.head(n1) += (h2 * kf_edge) * sn3.row(n1 - 1).head(n1);
                G4v.head(n1) += (h2 * kf_edge) * sn4.row(n1 - 1).head(n1);
            }
            detail::guard_check(std::abs(F1), tau, guard);
            detail::guard_check(std::abs(G1), tau, guard);
            detail::guard_check(F3v.head(n1).cwiseAbs().maxCoeff(), tau, guard);
            detail::guard_check(F4v.head(n1).cwiseAbs().maxCoeff(), tau, guard);

            const complexd A = 4.0 * (F2 + G2);
            const complexd B = F1 + G1;
            drive3.head(n1) = F3v.head(n1) + G3v.head(n1);
            drive4.head(n1) = F4v.head(n1) + G4v.head(n1);

            kf1.head(n1) = (iw + A) * sf1.head(n1) + complexd(0.0, 1.0) * drive3.head(n1).transpose();
            kf2.head(n1) = iw * sf2.head(n1) + (A - B) * sf1.head(n1) + (2.0 * B - A) * sf2.head(n1)
                         - complexd(0.0, 0.5) * drive3.head(n1).transpose();
            kg1.head(n1) = (iw + A) * sg1.head(n1) + complexd(0.0, 1.0) * drive3.head(n1).transpose();
            kg2.head(n1) = iw * sg2.head(n1) + (A - B) * sg1.head(n1) + (2.0 * B - A) * sg2.head(n1)
                         - complexd(0.0, 0.5) * drive3.head(n1).transpose();

            const complexd a2 = 2.0 * iw + 2.0 * B;
            km3.topLeftCorner(n1, n1) = a2 * sm3.topLeftCorner(n1, n1);
            km3.topLeftCorner(n1, n1).noalias() +=
                (2.0 * sf1.head(n1) - 4.0 * sf2.head(n1)) * drive3.head(n1);
            km4.topLeftCorner(n1, n1) = a2 * sm4.topLeftCorner(n1, n1);
            km4.topLeftCorner(n1, n1).noalias() +=
                (2.0 * sf1.head(n1) - 4.0 * sf2.head(n1)) * drive4.head(n1);
            kn3.topLeftCorner(n1, n1) = a2 * sn3.topLeftCorner(n1, n1);
            kn3.topLeftCorner(n1, n1).noalias() +=
                (2.0 * sg1.head(n1) - 4.0 * sg2.head(n1)) * drive3.head(n1);
            kn4.topLeftCorner(n1, n1) = a2 * sn4.topLeftCorner(n1, n1);
            kn4.topLeftCorner(n1, n1).noalias() +=
                (2.0 * sg1.head(n1) - 4.0 * sg2.head(n1)) * drive4.head(n1);

            const double b = b_of[ic] * dt;
            af1.head(n1) += b * kf1.head(n1); af2.head(n1) += b * kf2.head(n1);
            ag1.head(n1) += b * kg1.head(n1); ag2.head(n1) += b * kg2.head(n1);
            am3.topLeftCorner(n1, n1) += b * km3.topLeftCorner(n1, n1);
            am4.topLeftCorner(n1, n1) += b * km4.topLeftCorner(n1, n1);
            an3.topLeftCorner(n1, n1) += b * kn3.topLeftCorner(n1, n1);
            an4.topLeftCorner(n1, n1) += b * kn4.topLeftCorner(n1, n1);
        }

        f1.head(n1) = af1.head(n1); f2.head(n1) = af2.head(n1);
        g1.head(n1) = ag1.head(n1); g2.head(n1) = ag2.head(n1);
        m3.topLeftCorner(n1, n1) = am3.topLeftCorner(n1, n1);
        m4.topLeftCorner(n1, n1) = am4.topLeftCorner(n1, n1);
        n3.topLeftCorner(n1, n1) = an3.topLeftCorner(n1, n1);
        n4.topLeftCorner(n1, n1) = an4.topLeftCorner(n1, n1);

        // grow the domain: one-time diagonals first, then the two-time fresh
        // row (zero, already there) and fresh column built from them
        f1(n1) = 1.0; f2(n1) = 0.0;
        g1(n1) = 1.0; g2(n1) = 0.0;
        m3.row(n1).head(n1).setZero();
        m4.row(n1).head(n1).setZero();
        n3.row(n1).head(n1).setZero();
        n4.row(n1).head(n1).setZero();
        const complexd m4i(0.0, -4.0), p4i(0.0, 4.0);
        m3.col(n1).head(n1 + 1) = m4i * f2.head(n1 + 1);
        m4.col(n1).head(n1 + 1) = m4i * f2.head(n1 + 1);
        n3.col(n1).head(n1 + 1) = m4i * g2.head(n1 + 1);
        n4.col(n1).head(n1 + 1) = m4i * g1.head(n1 + 1) + p4i * g2.head(n1 + 1);

        tb.advance(n1);
        tf.advance(n1);

        // accepted aggregates at t_{n+1}
        const double t1 = double(n + 1) * dt;
        const Vector w2 = detail::trap_weights(n1 + 1, dt);
        weighted_row(tb, w2, n1 + 1, 0, wrow);
        const complexd F1a = rowdot(wrow, f1, n1 + 1);
        const complexd F2a = rowdot(wrow, f2, n1 + 1);
        F3v.head(n1 + 1).noalias() = wrow.head(n1 + 1) * m3.topLeftCorner(n1 + 1, n1 + 1);
        F4v.head(n1 + 1).noalias() = wrow.head(n1 + 1) * m4.topLeftCorner(n1 + 1, n1 + 1);
        const complexd F3p = wrow.head(n1 + 1).cwiseProduct(F3v.head(n1 + 1)).sum();
        const complexd F4p = wrow.head(n1 + 1).cwiseProduct(F4v.head(n1 + 1)).sum();
        weighted_row(tf, w2, n1 + 1, 0, wrow);
        const complexd G1a = rowdot(wrow, g1, n1 + 1);
        const complexd G2a = rowdot(wrow, g2, n1 + 1);
        G3v.head(n1 + 1).noalias() = wrow.head(n1 + 1) * n3.topLeftCorner(n1 + 1, n1 + 1);
        G4v.head(n1 + 1).noalias() = wrow.head(n1 + 1) * n4.topLeftCorner(n1 + 1, n1 + 1);
        const complexd G3p = wrow.head(n1 + 1).cwiseProduct(G3v.head(n1 + 1)).sum();
        const complexd G4p = wrow.head(n1 + 1).cwiseProduct(G4v.head(n1 + 1)).sum();
        detail::guard_check(std::abs(F1a), t1, guard);
        detail::guard_check(std::abs(G1a), t1, guard);

        report.times[n + 1] = t1;
        report.series[0][n + 1] = F1a;
        report.series[1][n + 1] = F2a;
        report.series[2][n + 1] = G1a;
        report.series[3][n + 1] = G2a;
        report.series[4][n + 1] = F3p;
        report.series[5][n + 1] = F4p;
        report.series[6][n + 1] = G3p;
        report.series[7][n + 1] = G4p;

        if (observer) observer({n + 1, dt, f1, f2, g1, g2, m3, m4, n3, n4});
    }
    return report;
}

} // namespace hybridbath
