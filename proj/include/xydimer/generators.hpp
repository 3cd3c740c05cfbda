#ifndef XYDIMER_GENERATORS_HPP
#define XYDIMER_GENERATORS_HPP

// Master-equation generators for the coupled pair, as 16x16 superoperators
// acting on vec(rho).
//
// Model tags used throughout the tool:
//   me1     independent radiative decay, phenomenological
//   me2     collective decay at the common transition frequency
//   general microscopic equation with time-dependent coefficients, valid for
//           nonidentical atoms
//   me4     identical-atom reduction of the general equation (product basis)
//   me5     me4 rewritten in the collective basis
//
// me1, me2, general and me4 act in the product basis; me5 acts in the
// collective basis. Laser driving is handled in the frame rotating at the
// laser frequency, where every generator in the family becomes time
// independent because all dissipative terms transfer a definite number of
// excitations.

#include <xydimer/model.hpp>
#include <xydimer/operators.hpp>
#include <xydimer/reservoir.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xydimer {

struct Generator {
    std::string name;
    bool time_independent = true;
    bool collective_basis = false;
    Mat16 constant = Mat16::Zero();
    std::function<Mat16(double)> eval;

    Mat16 at(double t) const { return time_independent ? constant : eval(t); }

    Mat4 apply(double t, const Mat4& rho) const { return unvec(at(t) * vec(rho)); }
};

// Bare pair Hamiltonian: split atomic frequencies plus XY exchange coupling.
inline Mat4 hamiltonian_xy(const SystemParams& p) {
    return 0.5 * p.omega1 * sigma_z(1) + 0.5 * p.omega2 * sigma_z(2) -
           p.j_coupling * (sigma_plus(1) * sigma_minus(2) + sigma_minus(1) * sigma_plus(2));
}

// rho -> (w/2)(2 a rho b - b a rho - rho b a), the decay form used by the
// phenomenological equations.
inline Mat16 decay_superop(double w, const Mat4& a, const Mat4& b) {
    const Mat4 ba = b * a;
    return 0.5 * w * (2.0 * sandwich_superop(a, b) - left_superop(ba) - right_superop(ba));
}

// Independent-decay model: each atom damped at its own transition frequency,
// with the matching single-atom frequency shifts absorbed into the
// Hamiltonian.
inline Generator build_me1(const SystemParams& p, const DerivedParams& d,
                           const ReservoirRates& r) {
    (void)d;
    const Mat4 h = 0.5 * (p.omega1 + r.lambda_ind_w1) * sigma_z(1) +
                   0.5 * (p.omega2 + r.lambda_ind_w2) * sigma_z(2) -
                   p.j_coupling * (sigma_plus(1) * sigma_minus(2) + sigma_minus(1) * sigma_plus(2));
    Mat16 s = commutator_superop(h);
    s += decay_superop(r.omega_ind_w1, sigma_minus(1), sigma_plus(1));
    s += decay_superop(r.omega_ind_w2, sigma_minus(2), sigma_plus(2));
    Generator g;
    g.name = "me1";
    g.constant = s;
    return g;
}

// Collective-decay model: adds the cross-damping channel evaluated at the mean
// frequency, and shifts the exchange coupling by the collective frequency
// shift at that frequency.
inline Generator build_me2(const SystemParams& p, const DerivedParams& d,
                           const ReservoirRates& r) {
    (void)d;
    const Mat4 h = 0.5 * (p.omega1 + r.lambda_ind_w1) * sigma_z(1) +
                   0.5 * (p.omega2 + r.lambda_ind_w2) * sigma_z(2) -
                   (p.j_coupling - r.lambda_col_omega0) *
                       (sigma_plus(1) * sigma_minus(2) + sigma_minus(1) * sigma_plus(2));
    Mat16 s = commutator_superop(h);
    s += decay_superop(r.omega_ind_w1, sigma_minus(1), sigma_plus(1));
    s += decay_superop(r.omega_ind_w2, sigma_minus(2), sigma_plus(2));
    s += decay_superop(r.omega_col_omega0, sigma_minus(1), sigma_plus(2));
    s += decay_superop(r.omega_col_omega0, sigma_minus(2), sigma_plus(1));
    Generator g;
    g.name = "me2";
    g.constant = s;
    return g;
}

// Coefficients of the microscopic equation at time t. Indices follow the
// operator pattern: a[i][j] multiplies s_i^- rho s_j^+, b[i][j] multiplies
// s_i^+ s_j^- rho, and the cross blocks c, d, e, f multiply the three-operator
// products written out in general_superop below. Entries are stored with
// atom index 1 -> 0, 2 -> 1.
struct GeneralCoefficients {
    cplx a[2][2];
    cplx b[2][2];
    cplx c12, c21;
    cplx d12, d21;
    cplx e12, e21;
    cplx f12, f21;
};

inline GeneralCoefficients general_coefficients(const SystemParams& p, const DerivedParams& d,
                                                const ReservoirRates& r, double t) {
    const double ga = d.gamma_coef;
    const double de = d.delta_coef;
    const double jd = d.j_over_delta;

    // Half-rate/shift combinations per dressed frequency. The two atoms have
    // equal dipole magnitudes, so the single-atom blocks do not depend on the
    // atom index.
    const cplx phi_p_ia(0.5 * r.omega_ind_alpha, r.lambda_ind_alpha);
    const cplx phi_m_ia = std::conj(phi_p_ia);
    const cplx phi_p_ib(0.5 * r.omega_ind_beta, r.lambda_ind_beta);
    const cplx phi_m_ib = std::conj(phi_p_ib);
    const cplx phi_p_ca(0.5 * r.omega_col_alpha, r.lambda_col_alpha);
    const cplx phi_m_ca = std::conj(phi_p_ca);
    const cplx phi_p_cb(0.5 * r.omega_col_beta, r.lambda_col_beta);
    const cplx phi_m_cb = std::conj(phi_p_cb);

    const cplx th1 = theta1(d, t);
    const cplx th2 = theta2(d, t);
    const cplx ph1 = phi1(d, t);

    const cplx epa = std::exp(-iu * d.alpha * t);
    const cplx epb = std::exp(iu * d.beta * t);

    // Auxiliary products shared by several coefficients.
    const cplx g1 = th2 * (ga * epb * phi_m_ib + de * epa * phi_p_ia) -
                    th1 * (ga * epb * phi_m_cb + de * epa * phi_p_ca) +
                    jd * (th1 * (epa * phi_p_ia - epb * phi_m_ib) -
                          th2 * (epa * phi_p_ca - epb * phi_m_cb));
    const cplx g2 = -th1 * jd * (epa * phi_p_ca - epb * phi_m_cb) -
                    th2 * (de * epb * phi_m_cb + ga * epa * phi_p_ca);
    const cplx g3 = -ph1 * jd * (epa * phi_p_ca - epb * phi_m_cb) -
                    th2 * (ga * epb * phi_m_cb + de * epa * phi_p_ca);
    const cplx g4 = th2 * (de * epb * phi_m_ib + ga * epa * phi_p_ia) -
                    ph1 * (de * epb * phi_m_cb + ga * epa * phi_p_ca) +
                    jd * (ph1 * (epa * phi_p_ia - epb * phi_m_ib) -
                          th2 * (epa * phi_p_ca - epb * phi_m_cb));
    const cplx g5 = -th1 * (de * epb * phi_m_ib + ga * epa * phi_p_ia) -
                    th2 * jd * (epa * phi_p_ia - epb * phi_m_ib);
    const cplx g6 = -ph1 * (ga * epb * phi_m_ib + de * epa * phi_p_ia) -
                    th2 * jd * (epa * phi_p_ia - epb * phi_m_ib);

    GeneralCoefficients c{};

    c.a[0][0] = ga * r.omega_ind_alpha + de * r.omega_ind_beta;
    c.a[1][1] = de * r.omega_ind_alpha + ga * r.omega_ind_beta;
    c.a[0][1] = r.omega_plus_12 +
                iu * ((p.omega1 - p.omega2) / d.delta_big) * r.lambda_plus_12;
    c.a[1][0] = std::conj(c.a[0][1]);

    c.b[0][0] = g5 * std::norm(th1) + g6 * std::norm(th2);
    c.b[1][1] = g5 * std::norm(th2) + g6 * std::norm(ph1);
    c.b[1][0] = iu * (de * r.lambda_col_beta - ga * r.lambda_col_alpha) -
                0.5 * (de * r.omega_col_beta + ga * r.omega_col_alpha) +
                jd * cplx(r.omega_minus_i, r.lambda_plus_i);
    c.b[0][1] = iu * (ga * r.lambda_col_beta - de * r.lambda_col_alpha) -
                0.5 * (de * r.omega_col_alpha + ga * r.omega_col_beta) +
                jd * cplx(r.omega_minus_i, r.lambda_plus_i);

    c.c12 = jd * cplx(r.omega_minus_i, r.lambda_plus_i);
    c.c21 = c.c12;
    c.d12 = jd * cplx(r.omega_minus_12, r.lambda_plus_12);
    c.d21 = c.d12;

    c.e12 = g1 * std::conj(th1) * th2 + g2 * std::norm(th1) + g3 * std::norm(th2);
    c.e21 = g1 * ph1 * std::conj(th2) + g2 * std::norm(th2) + g3 * std::norm(ph1);
    c.f12 = g4 * th1 * std::conj(th2);
    c.f21 = g4 * std::conj(ph1) * th2;

    return c;
}

// Microscopic generator at time t, assembled from the coefficient table.
inline Mat16 general_superop(const SystemParams& p, const DerivedParams& d,
                             const ReservoirRates& r, double t) {
    const GeneralCoefficients c = general_coefficients(p, d, r, t);

    Mat16 s = commutator_superop(hamiltonian_xy(p));

    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Mat4& smi = sigma_minus(i + 1);
            const Mat4& spj = sigma_plus(j + 1);
            const Mat4 pm = sigma_plus(i + 1) * sigma_minus(j + 1);
            s += c.a[i][j] * sandwich_superop(smi, spj);
            s += c.b[i][j] * left_superop(pm);
            s += std::conj(c.b[i][j]) * right_superop(pm.adjoint());
        }
    }

    // Cross terms carrying sigma_z factors; this block enters together with
    // its conjugated map.
    Mat16 tblock = Mat16::Zero();
    const Mat4 z1m2 = sigma_z(1) * sigma_minus(2);
    const Mat4 z2m1 = sigma_z(2) * sigma_minus(1);
    tblock += c.c12 * sandwich_superop(z1m2, sigma_plus(1));
    tblock += c.c21 * sandwich_superop(z2m1, sigma_plus(2));
    tblock += c.d12 * sandwich_superop(z1m2, sigma_plus(2));
    tblock += c.d21 * sandwich_superop(z2m1, sigma_plus(1));
    tblock += c.e12 * left_superop(sigma_plus(1) * sigma_minus(1) * sigma_z(2));
    tblock += c.e21 * left_superop(sigma_plus(2) * sigma_minus(2) * sigma_z(1));
    tblock += c.f12 * left_superop(sigma_minus(1) * sigma_plus(1) * sigma_z(2));
    tblock += c.f21 * left_superop(sigma_minus(2) * sigma_plus(2) * sigma_z(1));
    s += map_plus_hc(tblock);

    return s;
}

inline Generator build_general(const SystemParams& p, const DerivedParams& d,
                               const ReservoirRates& r) {
    Generator g;
    g.name = "general";
    g.time_independent = false;
    g.eval = [p, d, r](double t) { return general_superop(p, d, r, t); };
    return g;
}

inline void require_identical_atoms(const SystemParams& p, const char* who) {
    if (std::abs(p.omega1 - p.omega2) > 1e-9 * (p.omega1 + p.omega2))
        throw std::invalid_argument(std::string(who) + " requires identical atoms");
}

// Identical-atom reduction of the microscopic equation, product basis.
// Written exactly as the summed two-atom form; the individual i!=j pieces
// exchange trace among themselves and only the full sum is trace preserving.
inline Generator build_me4(const SystemParams& p, const DerivedParams& d,
                           const ReservoirRates& r) {
    require_identical_atoms(p, "me4");
    const double w0 = d.omega0;
    const double op = r.omega_plus_i;
    const double om = r.omega_minus_i;
    const double op12 = r.omega_plus_12;
    const double om12 = r.omega_minus_12;
    const double lp = r.lambda_plus_i;
    const double lm = r.lambda_minus_i;
    const double lp12 = r.lambda_plus_12;
    const double lm12 = r.lambda_minus_12;

    const Mat4 h = 0.5 * (w0 + 0.5 * lm) * (sigma_z(1) + sigma_z(2)) -
                   (p.j_coupling + 0.5 * (lp - lm12)) *
                       (sigma_plus(1) * sigma_minus(2) + sigma_minus(1) * sigma_plus(2));

    Mat16 s = commutator_superop(h);
    s += decay_superop(op, sigma_minus(1), sigma_plus(1));
    s += decay_superop(op, sigma_minus(2), sigma_plus(2));

    for (int i = 1; i <= 2; ++i) {
        const int j = 3 - i;
        const Mat4& smi = sigma_minus(i);
        const Mat4& smj = sigma_minus(j);
        const Mat4& spi = sigma_plus(i);
        const Mat4& spj = sigma_plus(j);
        const Mat4& szi = sigma_z(i);
        const Mat4& szj = sigma_z(j);
        const Mat4 zimj = szi * smj;
        const Mat4 pizj = spi * smi * szj;

        s += decay_superop(op12 - om, smj, spi);
        s += 0.5 * om12 *
             (sandwich_superop(zimj, spj) + sandwich_superop(smi, spi * szj) -
              left_superop(pizj) - right_superop(pizj));
        s += 0.5 * iu * lp12 *
             (sandwich_superop(zimj, spj) - sandwich_superop(smj, szi * spj) -
              left_superop(pizj) + right_superop(pizj));
        s += 0.5 * om *
             (sandwich_superop(zimj, spi) + sandwich_superop(smi, szi * spj) +
              2.0 * sandwich_superop(smi, spj));
        s += 0.5 * iu * lp * (sandwich_superop(zimj, spi) - sandwich_superop(smi, szi * spj));
    }

    Generator g;
    g.name = "me4";
    g.constant = s;
    return g;
}

// Shift and splitting combinations entering the collective-basis form and the
// driving resonances.
struct CollectiveSplittings {
    double omega_prime;  // shifted transition frequency
    double j_minus;      // energy of the antisymmetric state
    double j_plus;       // minus the energy of the symmetric state
};

inline CollectiveSplittings collective_splittings(const SystemParams& p, const DerivedParams& d,
                                                  const ReservoirRates& r) {
    CollectiveSplittings cs{};
    cs.omega_prime = d.omega0 + 0.5 * (r.lambda_minus_i + r.lambda_plus_12);
    cs.j_minus = p.j_coupling + 0.5 * (r.lambda_plus_i - r.lambda_minus_12 - 2.0 * r.lambda_plus_12);
    cs.j_plus = p.j_coupling + 0.5 * (r.lambda_plus_i - r.lambda_minus_12 + 2.0 * r.lambda_plus_12);
    return cs;
}

// Collective-basis form of me4. Works in the basis (eps, s, a, g); the
// symmetric and antisymmetric single-excitation states decay through
// independent channels with enhanced and suppressed rates.
inline Generator build_me5(const SystemParams& p, const DerivedParams& d,
                           const ReservoirRates& r) {
    require_identical_atoms(p, "me5");
    const double op = r.omega_plus_i;
    const double om = r.omega_minus_i;
    const double op12 = r.omega_plus_12;
    const double om12 = r.omega_minus_12;
    const double lp = r.lambda_plus_i;
    const double lp12 = r.lambda_plus_12;

    const CollectiveSplittings cs = collective_splittings(p, d, r);
    const Mat4 h = cs.omega_prime * (unit(kEps, kEps) - unit(kGnd, kGnd)) +
                   cs.j_minus * unit(kAsym, kAsym) - cs.j_plus * unit(kSym, kSym);

    Mat16 s = commutator_superop(h);

    // Antisymmetric channel.
    {
        const Mat4 proj = unit(kAsym, kAsym) + unit(kEps, kEps);
        const Mat4 jump = unit(kAsym, kEps) - unit(kGnd, kAsym);
        s += -0.5 * (op - op12) *
             (left_superop(proj) + right_superop(proj) -
              2.0 * sandwich_superop(jump, jump.adjoint()));
        const Mat4 diff = unit(kAsym, kAsym) - unit(kEps, kEps);
        s += -0.5 * (om - om12) *
             (left_superop(diff) + right_superop(diff) -
              2.0 * (sandwich_superop(unit(kGnd, kAsym), unit(kAsym, kGnd)) -
                     sandwich_superop(unit(kAsym, kEps), unit(kEps, kAsym))));
        s += iu * (lp - lp12) *
             (sandwich_superop(unit(kAsym, kEps), unit(kAsym, kGnd)) -
              sandwich_superop(unit(kGnd, kAsym), unit(kEps, kAsym)));
    }

    // Symmetric channel.
    {
        const Mat4 proj = unit(kSym, kSym) + unit(kEps, kEps);
        const Mat4 jump = unit(kSym, kEps) + unit(kGnd, kSym);
        s += -0.5 * (op + op12) *
             (left_superop(proj) + right_superop(proj) -
              2.0 * sandwich_superop(jump, jump.adjoint()));
        const Mat4 diff = unit(kEps, kEps) - unit(kSym, kSym);
        s += -0.5 * (om + om12) *
             (left_superop(diff) + right_superop(diff) -
              2.0 * (sandwich_superop(unit(kSym, kEps), unit(kEps, kSym)) -
                     sandwich_superop(unit(kGnd, kSym), unit(kSym, kGnd))));
        s += iu * (lp + lp12) *
             (sandwich_superop(unit(kSym, kEps), unit(kSym, kGnd)) -
              sandwich_superop(unit(kGnd, kSym), unit(kEps, kSym)));
    }

    Generator g;
    g.name = "me5";
    g.collective_basis = true;
    g.constant = s;
    return g;
}

// Superoperator conjugation by the product<->collective transform.
inline Mat16 superop_change_basis(const Mat16& s) {
    const Mat4& v = collective_transform();
    const Mat16 m = sandwich_superop(v, v);
    return m * s * m;
}

// ---------------------------------------------------------------------------
// Laser driving.

struct DriveParams {
    double rabi_1 = 0.0;       // drive amplitude seen by atom 1
    double rabi_2 = 0.0;       // drive amplitude seen by atom 2
    double omega_laser = 0.0;
    bool secular = false;      // drop the far-detuned eps<->s drive leg

    double rabi_mean() const { return 0.5 * (rabi_1 + rabi_2); }
};

// Total excitation number operator; same numeric matrix in both bases.
inline const Mat4& excitation_number() {
    static const Mat4 n = [] {
        Mat4 m = Mat4::Zero();
        m(0, 0) = 2.0;
        m(1, 1) = 1.0;
        m(2, 2) = 1.0;
        return m;
    }();
    return n;
}

// Raising part of the drive coupling in the collective basis. The symmetric
// combination is driven by the sum of the two local amplitudes, the
// antisymmetric one by their difference.
inline Mat4 drive_raising_collective(const DriveParams& dr) {
    Mat4 x = (dr.rabi_1 + dr.rabi_2) * (unit(kSym, kEps) + unit(kGnd, kSym)) +
             (dr.rabi_2 - dr.rabi_1) * (unit(kAsym, kEps) - unit(kGnd, kAsym));
    if (dr.secular) {
        x -= (dr.rabi_1 + dr.rabi_2) * unit(kSym, kEps);
        x -= (dr.rabi_2 - dr.rabi_1) * unit(kAsym, kEps);
    }
    return x;
}

// Laboratory-frame drive Hamiltonian at time t.
inline Mat4 driving_hamiltonian(const DriveParams& dr, double t, bool collective_basis) {
    const Mat4 x = drive_raising_collective(dr);
    const cplx ph = std::exp(iu * dr.omega_laser * t);
    const Mat4 h = 0.25 * iu * (ph * x - std::conj(ph) * x.adjoint());
    return collective_basis ? h : to_product(h);
}

// Static drive Hamiltonian in the frame rotating at the laser frequency.
inline Mat4 driving_hamiltonian_rotating(const DriveParams& dr, bool collective_basis) {
    const Mat4 x = drive_raising_collective(dr);
    const Mat4 h = 0.25 * iu * (x - x.adjoint());
    return collective_basis ? h : to_product(h);
}

// Add a laser drive to a time-independent generator and move to the frame
// rotating at the laser frequency. Every generator in this family commutes
// with the excitation-number rotation, so the result is exactly static.
inline Generator with_rotating_drive(const Generator& base, const DriveParams& dr) {
    if (!base.time_independent)
        throw std::invalid_argument("with_rotating_drive needs a time-independent generator");
    Generator g;
    g.name = base.name + "_driven";
    g.collective_basis = base.collective_basis;
    g.constant = base.constant +
                 commutator_superop(driving_hamiltonian_rotating(dr, base.collective_basis) -
                                    dr.omega_laser * excitation_number());
    return g;
}

// Two-level reduction of the near-resonant ground<->symmetric drive. The
// generator lives on span{|s>, |g>} embedded in the collective basis and is
// written in the frame rotating at the laser frequency, so it is static.
struct EffectiveTwoLevel {
    double detuning = 0.0;  // shifted transition frequency minus laser frequency
    double rabi = 0.0;
    double decay = 0.0;  // symmetric-channel emission rate
    Generator generator;
    std::vector<std::string> warnings;
};

inline EffectiveTwoLevel effective_two_level(const SystemParams& p, const DerivedParams& d,
                                             const ReservoirRates& r, const DriveParams& dr) {
    const CollectiveSplittings cs = collective_splittings(p, d, r);
    EffectiveTwoLevel e;
    e.detuning = (cs.omega_prime - cs.j_plus) - dr.omega_laser;
    e.rabi = dr.rabi_mean();
    e.decay = r.omega_ind_beta + r.omega_col_beta;
    if (e.rabi > 0.1 * (cs.omega_prime - cs.j_plus))
        e.warnings.push_back(
            "drive strength is a large fraction of the transition frequency; "
            "the rotating-wave reduction is unreliable");
    const Mat4 h = 0.5 * e.detuning * (unit(kSym, kSym) - unit(kGnd, kGnd)) +
                   0.5 * iu * e.rabi * (unit(kGnd, kSym) - unit(kSym, kGnd));
    e.generator.name = "effective_two_level";
    e.generator.collective_basis = true;
    e.generator.constant =
        commutator_superop(h) + decay_superop(e.decay, unit(kGnd, kSym), unit(kSym, kGnd));
    return e;
}

} // namespace xydimer

#endif
