#ifndef XYDIMER_OPERATORS_HPP
#define XYDIMER_OPERATORS_HPP

// Two-qubit operator algebra on the 4-dimensional product space.
// Product basis order: |ee>, |eg>, |ge>, |gg> (first slot = atom 1).
// Collective basis order: |eps>=|ee>, |s>=(|eg>+|ge>)/sqrt2,
// |a>=(|eg>-|ge>)/sqrt2, |g>=|gg>.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

namespace xydimer {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec16 = Eigen::Vector<cplx, 16>;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;

inline constexpr cplx iu{0.0, 1.0};

// Single-qubit basis order: |e>, |g>. Lowering operator moves e -> g.
inline Mat2 sigma_minus_1q() {
    Mat2 m = Mat2::Zero();
    m(1, 0) = 1.0;
    return m;
}

inline Mat2 sigma_plus_1q() {
    Mat2 m = Mat2::Zero();
    m(0, 1) = 1.0;
    return m;
}

inline Mat2 sigma_z_1q() {
    Mat2 m = Mat2::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return c;
}

// Operators embedded in the two-qubit space; atom is 1 or 2.
inline const Mat4& sigma_minus(int atom) {
    static const Mat4 s1 = kron(sigma_minus_1q(), Mat2::Identity());
    static const Mat4 s2 = kron(Mat2::Identity(), sigma_minus_1q());
    return atom == 1 ? s1 : s2;
}

inline const Mat4& sigma_plus(int atom) {
    static const Mat4 s1 = kron(sigma_plus_1q(), Mat2::Identity());
    static const Mat4 s2 = kron(Mat2::Identity(), sigma_plus_1q());
    return atom == 1 ? s1 : s2;
}

inline const Mat4& sigma_z(int atom) {
    static const Mat4 s1 = kron(sigma_z_1q(), Mat2::Identity());
    static const Mat4 s2 = kron(Mat2::Identity(), sigma_z_1q());
    return atom == 1 ? s1 : s2;
}

// Collective-basis indices.
enum CollectiveState { kEps = 0, kSym = 1, kAsym = 2, kGnd = 3 };

// Matrix unit |i><j| (meaningful in whichever basis the caller works in).
inline Mat4 unit(int i, int j) {
    Mat4 m = Mat4::Zero();
    m(i, j) = 1.0;
    return m;
}

// Collective states written as product-basis kets.
inline Eigen::Vector4cd collective_ket_in_product_basis(CollectiveState s) {
    const double c = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    switch (s) {
        case kEps: v[0] = 1.0; break;
        case kSym: v[1] = c; v[2] = c; break;
        case kAsym: v[1] = c; v[2] = -c; break;
        case kGnd: v[3] = 1.0; break;
    }
    return v;
}

inline Mat4 pure_state(const Eigen::Vector4cd& psi) {
    const Eigen::Vector4cd n = psi / psi.norm();
    return n * n.adjoint();
}

// Product -> collective transform. Real, symmetric, involutive (V*V = 1),
// so it serves for both directions and for operators: O' = V O V.
inline const Mat4& collective_transform() {
    static const Mat4 v = [] {
        const double c = 1.0 / std::sqrt(2.0);
        Mat4 m = Mat4::Zero();
        m(0, 0) = 1.0;
        m(1, 1) = c;
        m(1, 2) = c;
        m(2, 1) = c;
        m(2, 2) = -c;
        m(3, 3) = 1.0;
        return m;
    }();
    return v;
}

inline Mat4 to_collective(const Mat4& product_op) {
    const Mat4& v = collective_transform();
    return v * product_op * v;
}

inline Mat4 to_product(const Mat4& collective_op) {
    return to_collective(collective_op);
}

// Row-major vectorization: vec(m)[4j + k] = m(j, k).
inline Vec16 vec(const Mat4& m) {
    Vec16 v;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) v[4 * j + k] = m(j, k);
    return v;
}

inline Mat4 unvec(const Vec16& v) {
    Mat4 m;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) m(j, k) = v[4 * j + k];
    return m;
}

// With row-major vec, vec(A rho B) = (A kron B^T) vec(rho).
inline Mat16 kron44(const Mat4& a, const Mat4& b) {
    Mat16 c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            c.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    return c;
}

inline Mat16 sandwich_superop(const Mat4& a, const Mat4& b) {
    return kron44(a, b.transpose());
}

inline Mat16 left_superop(const Mat4& a) {
    return sandwich_superop(a, Mat4::Identity());
}

inline Mat16 right_superop(const Mat4& b) {
    return sandwich_superop(Mat4::Identity(), b);
}

// Superoperator of rho -> -i[h, rho].
inline Mat16 commutator_superop(const Mat4& h) {
    return -iu * (left_superop(h) - right_superop(h));
}

// Permutation with vec(m^T) = perm * vec(m); together with entrywise
// conjugation it takes vec(m) to vec(m^dagger).
inline const Mat16& vec_transpose_perm() {
    static const Mat16 p = [] {
        Mat16 m = Mat16::Zero();
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) m(4 * j + k, 4 * k + j) = 1.0;
        return m;
    }();
    return p;
}

// Superoperator of the conjugated map rho -> (L(rho^dagger))^dagger.
// A map preserves Hermiticity exactly when it equals this image of itself.
inline Mat16 hc_superop(const Mat16& s) {
    const Mat16& p = vec_transpose_perm();
    return p * s.conjugate() * p;
}

inline Mat16 map_plus_hc(const Mat16& s) {
    return s + hc_superop(s);
}

// Norm of vec(1)^T S; zero exactly when the map is trace preserving.
inline double trace_preservation_defect(const Mat16& s) {
    return (vec(Mat4::Identity()).transpose() * s).norm();
}

inline double hermiticity_defect(const Mat4& m) {
    return (m - m.adjoint()).norm();
}

inline double trace_defect(const Mat4& rho) {
    return std::abs(rho.trace() - 1.0);
}

// Deterministic random Hermitian matrix with entries O(1).
inline Mat4 random_hermitian(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat4 g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = cplx(n(rng), n(rng));
    return 0.5 * (g + g.adjoint()).eval();
}

// Deterministic random density matrix (positive, unit trace).
inline Mat4 random_density(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat4 g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = cplx(n(rng), n(rng));
    Mat4 rho = g * g.adjoint();
    return rho / rho.trace();
}

} // namespace xydimer

#endif
