#include <xydimer/reservoir.hpp>

#include <gtest/gtest.h>
#include <support/pv_oracle.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace xydimer;

namespace {

SystemParams identical_params(double j, double r = 0.2, double theta = std::numbers::pi / 2) {
    SystemParams p;
    p.omega1 = 1.0;
    p.omega2 = 1.0;
    p.j_coupling = j;
    p.r12_over_lambda = r;
    p.theta_dipole = theta;
    p.gamma_single = 0.05;
    return p;
}

pv_oracle::Geometry oracle_geometry(const SystemParams& p) {
    return {p.gamma_single, 0.5 * (p.omega1 + p.omega2), p.r12_over_lambda, p.theta_dipole};
}

} // namespace

TEST(GammaMu, CubicScaling) {
    const SystemParams p = identical_params(0.6);
    const DerivedParams d = derive(p);
    EXPECT_NEAR(gamma_mu(1.6, p, d), 0.05 * 4.096, 1e-15);
    EXPECT_NEAR(gamma_mu(-0.4, p, d), 0.05 * 0.064, 1e-16);
    EXPECT_DOUBLE_EQ(gamma_mu(0.0, p, d), 0.0);
    EXPECT_DOUBLE_EQ(gamma_mu(1.0, p, d), 0.05);
}

TEST(AngularBracket, ContactLimitIsTwoThirdsForEveryOrientation) {
    for (double theta : {0.1, 0.7, std::numbers::pi / 2, 2.0, 3.0})
        EXPECT_NEAR(angular_bracket(0.0, theta), 2.0 / 3.0, 1e-15) << "theta=" << theta;
}

TEST(AngularBracket, SmallChiMatchesTaylorPolynomial) {
    for (double theta : {std::numbers::pi / 2, 0.7}) {
        const double aw = std::sin(theta) * std::sin(theta);
        const double bw = 1.0 - 3.0 * std::cos(theta) * std::cos(theta);
        for (double chi : {1e-3, 0.01, 0.1, 0.3, 0.49}) {
            const double c2 = chi * chi;
            const double poly = aw * (1.0 - c2 / 6.0 + c2 * c2 / 120.0) +
                                bw * (-1.0 / 3.0 + c2 / 30.0 - c2 * c2 / 840.0);
            const double tol = 2.0 * std::pow(chi, 6) / 5040.0 + 1e-14;
            EXPECT_NEAR(angular_bracket(chi, theta), poly, tol)
                << "chi=" << chi << " theta=" << theta;
        }
    }
}

TEST(AngularBracket, MatchesDirectEvaluationAboveCrossover) {
    std::mt19937_64 rng(411u);
    std::uniform_real_distribution<double> th(0.1, std::numbers::pi - 0.1);
    for (double chi : {0.6, 1.0, 2.01, 5.0, 20.0, 62.83}) {
        for (int k = 0; k < 3; ++k) {
            const double theta = th(rng);
            const double ref = static_cast<double>(pv_oracle::a_direct(chi, theta));
            EXPECT_NEAR(angular_bracket(chi, theta), ref, 1e-13) << "chi=" << chi;
        }
    }
}

TEST(AngularBracket, ContinuousAtSeriesCrossover) {
    for (double theta : {std::numbers::pi / 2, 1.0}) {
        // Series branch just below the switch against the branch-free
        // long-double evaluation, then a tiny step across the switch.
        const double series_side = angular_bracket(0.4999, theta);
        const double ref = static_cast<double>(pv_oracle::a_direct(0.4999L, theta));
        EXPECT_NEAR(series_side, ref, 1e-14);
        const double below = angular_bracket(0.5 - 1e-12, theta);
        const double above = angular_bracket(0.5 + 1e-12, theta);
        EXPECT_NEAR(below, above, 5e-12);
    }
}

TEST(AngularBracket, MagicAngleRemovesLongitudinalTail) {
    const double theta_m = std::acos(1.0 / std::sqrt(3.0));
    for (double chi : {0.2, 3.0, 11.0}) {
        const double expected = (2.0 / 3.0) * std::sin(chi) / chi;
        EXPECT_NEAR(angular_bracket(chi, theta_m), expected, 1e-13) << "chi=" << chi;
    }
}

TEST(AngularBracket, NeverExceedsContactValue) {
    std::mt19937_64 rng(412u);
    std::uniform_real_distribution<double> ch(1e-6, 80.0);
    std::uniform_real_distribution<double> th(0.0, std::numbers::pi);
    for (int k = 0; k < 200; ++k) {
        const double chi = ch(rng), theta = th(rng);
        EXPECT_LE(std::abs(angular_bracket(chi, theta)), 2.0 / 3.0 + 1e-12)
            << "chi=" << chi << " theta=" << theta;
    }
}

TEST(OmegaRates, DeltaFunctionSupportRule) {
    const SystemParams p = identical_params(0.3);
    const DerivedParams d = derive(p);
    EXPECT_DOUBLE_EQ(omega_collective(1.3, Branch::plus, p, d), 0.0);
    EXPECT_DOUBLE_EQ(omega_collective(-0.7, Branch::minus, p, d), 0.0);
    EXPECT_DOUBLE_EQ(omega_individual(1.3, Branch::plus, p, d), 0.0);
    EXPECT_DOUBLE_EQ(omega_individual(-0.7, Branch::minus, p, d), 0.0);
    EXPECT_GT(omega_collective(1.3, Branch::minus, p, d), 0.0);
    EXPECT_GT(omega_collective(-0.7, Branch::plus, p, d), 0.0);
    EXPECT_DOUBLE_EQ(omega_individual(1.3, Branch::minus, p, d), gamma_mu(1.3, p, d));
    EXPECT_DOUBLE_EQ(omega_individual(-0.7, Branch::plus, p, d), gamma_mu(0.7, p, d));
}

TEST(OmegaRates, CollectiveApproachesIndividualAtVanishingSeparation) {
    const SystemParams p = identical_params(0.3, 1e-5);
    const DerivedParams d = derive(p);
    const double col = omega_collective(1.0, Branch::minus, p, d);
    EXPECT_NEAR(col / gamma_mu(1.0, p, d), 1.0, 1e-8);
}

TEST(OmegaRates, CollectiveDecaysAtLargeSeparation) {
    const SystemParams p = identical_params(0.3, 10.0);
    const DerivedParams d = derive(p);
    EXPECT_LT(std::abs(omega_collective(1.0, Branch::minus, p, d)), 0.025 * p.gamma_single);
}

TEST(LambdaCollective, PoleFlavorMatchesPrincipalValueQuadrature) {
    const SystemParams p = identical_params(0.3);
    const DerivedParams d = derive(p);
    const double got = lambda_collective(1.0, Branch::minus, p, d);
    const double want = pv_oracle::lambda_pole(1.0, oracle_geometry(p));
    EXPECT_NEAR(got / want, 1.0, 2e-5) << "got=" << got << " want=" << want;
}

TEST(LambdaCollective, PoleFlavorQuadratureSecondGeometry) {
    SystemParams p = identical_params(0.3, 0.35, 1.0);
    const DerivedParams d = derive(p);
    const double got = lambda_collective(1.3, Branch::minus, p, d);
    const double want = pv_oracle::lambda_pole(1.3, oracle_geometry(p));
    EXPECT_NEAR(got / want, 1.0, 5e-5) << "got=" << got << " want=" << want;
}

TEST(LambdaCollective, PoleFreeFlavorMatchesQuadrature) {
    const SystemParams p = identical_params(0.3);
    const DerivedParams d = derive(p);
    const double got = lambda_collective(1.0, Branch::plus, p, d);
    const double want = pv_oracle::lambda_nonpole(1.0, oracle_geometry(p));
    EXPECT_NEAR(got / want, 1.0, 2e-5) << "got=" << got << " want=" << want;
}

TEST(LambdaCollective, OddUnderFrequencyReflection) {
    const SystemParams p = identical_params(0.45, 0.7, 1.1);
    const DerivedParams d = derive(p);
    for (double mu : {0.4, 1.0, 1.45}) {
        EXPECT_DOUBLE_EQ(lambda_collective(-mu, Branch::plus, p, d),
                         -lambda_collective(mu, Branch::minus, p, d));
        EXPECT_DOUBLE_EQ(lambda_collective(-mu, Branch::minus, p, d),
                         -lambda_collective(mu, Branch::plus, p, d));
    }
}

TEST(LambdaCollective, VanishingSeparationThrows) {
    const SystemParams p = identical_params(0.3);
    const DerivedParams d = derive(p);
    EXPECT_THROW(lambda_collective(0.0, Branch::minus, p, d), std::domain_error);
}

TEST(LambdaCollective, DecaysAtLargeSeparation) {
    // Far-field envelope is ~ (3/4) Gamma cos(chi)/chi.
    const SystemParams p10 = identical_params(0.3, 10.0);
    EXPECT_LT(std::abs(lambda_collective(1.0, Branch::minus, p10, derive(p10))),
              0.02 * p10.gamma_single);
    const SystemParams p100 = identical_params(0.3, 100.0);
    EXPECT_LT(std::abs(lambda_collective(1.0, Branch::minus, p100, derive(p100))),
              0.002 * p100.gamma_single);
}

TEST(LambdaIndividual, LogFormula) {
    SystemParams p = identical_params(0.3);
    DerivedParams d = derive(p);

    p.omega_cutoff = std::sqrt(2.0);
    EXPECT_NEAR(lambda_individual(1.0, p, d), 0.0, 1e-16);

    p.omega_cutoff = 100.0;
    const double expected = 0.05 / (2.0 * std::numbers::pi) * std::log(99.0 * 101.0);
    EXPECT_NEAR(lambda_individual(1.0, p, d), expected, 1e-15);
    EXPECT_NEAR(expected / 0.05, 1.466, 2e-3);

    EXPECT_NEAR(lambda_individual(-1.0, p, d), expected, 1e-15);

    p.omega_cutoff = 1.0;
    EXPECT_THROW(lambda_individual(1.0, p, d), std::domain_error);
    EXPECT_THROW(lambda_individual(0.0, p, d), std::domain_error);
}

TEST(LambdaIndividual, ZeroedModeReturnsZero) {
    SystemParams p = identical_params(0.3);
    p.lamb_shift_mode = LambShiftMode::zeroed;
    const DerivedParams d = derive(p);
    EXPECT_DOUBLE_EQ(lambda_individual(1.0, p, d), 0.0);
    EXPECT_DOUBLE_EQ(lambda_individual(0.4, p, d), 0.0);
}

TEST(CompositeRates, IdenticalAtomArithmetic) {
    const SystemParams p = identical_params(0.6);
    const DerivedParams d = derive(p);
    const ReservoirRates r = composite_rates(p, d);

    EXPECT_NEAR(r.omega_ind_alpha, 0.05 * 4.096, 1e-15);
    EXPECT_NEAR(r.omega_ind_beta, 0.05 * 0.064, 1e-16);
    EXPECT_NEAR(r.omega_plus_i, 2.08 * 0.05, 1e-14);
    EXPECT_NEAR(r.omega_minus_i, 2.016 * 0.05, 1e-14);

    const double chi_a = 2.0 * std::numbers::pi * 0.2 * 1.6;
    const double chi_b = 2.0 * std::numbers::pi * 0.2 * 0.4;
    const double direct =
        0.5 * 1.5 * 0.05 *
        (4.096 * static_cast<double>(pv_oracle::a_direct(chi_a, p.theta_dipole)) +
         0.064 * static_cast<double>(pv_oracle::a_direct(chi_b, p.theta_dipole)));
    EXPECT_NEAR(r.omega_plus_12, direct, 1e-13);

    EXPECT_DOUBLE_EQ(r.omega_ind_w1, 0.05);
    EXPECT_DOUBLE_EQ(r.omega_ind_w2, 0.05);
    EXPECT_GT(r.omega_col_omega0, 0.0);
}

TEST(CompositeRates, DecoupledLimit) {
    const SystemParams p = identical_params(1e-12);
    const DerivedParams d = derive(p);
    const ReservoirRates r = composite_rates(p, d);

    EXPECT_NEAR(r.omega_plus_i / p.gamma_single, 1.0, 1e-9);
    EXPECT_LT(std::abs(r.omega_minus_i), 1e-11 * p.gamma_single);
    EXPECT_LT(std::abs(r.omega_minus_12), 1e-11 * p.gamma_single);
    EXPECT_LT(std::abs(r.lambda_plus_i), 1e-9 * p.gamma_single);
    EXPECT_LT(std::abs(r.lambda_plus_12), 1e-9 * p.gamma_single);

    EXPECT_NEAR(r.omega_plus_12 / omega_collective(1.0, Branch::minus, p, d), 1.0, 1e-9);
    EXPECT_NEAR(r.lambda_minus_12 / (2.0 * lambda_collective(1.0, Branch::minus, p, d)), 1.0, 1e-9);
    EXPECT_NEAR(r.lambda_minus_i / (2.0 * lambda_individual(1.0, p, d)), 1.0, 1e-9);
}

TEST(CompositeRates, LambShiftSignPins) {
    const SystemParams p = identical_params(0.6);
    const DerivedParams d = derive(p);
    const ReservoirRates r = composite_rates(p, d);

    EXPECT_DOUBLE_EQ(r.lambda_ind_alpha, lambda_individual(d.alpha, p, d));
    EXPECT_DOUBLE_EQ(r.lambda_ind_beta, -lambda_individual(d.beta, p, d));
    EXPECT_DOUBLE_EQ(r.lambda_col_alpha, lambda_collective(d.alpha, Branch::minus, p, d));
    EXPECT_DOUBLE_EQ(r.lambda_col_beta, lambda_collective(d.beta, Branch::plus, p, d));
    EXPECT_DOUBLE_EQ(r.lambda_minus_i, r.lambda_ind_alpha - r.lambda_ind_beta);
    EXPECT_DOUBLE_EQ(r.lambda_minus_12, r.lambda_col_alpha - r.lambda_col_beta);
    EXPECT_GT(r.lambda_minus_i, 0.0);
}

TEST(CompositeRates, BeyondRotatingWaveThrows) {
    for (double j : {1.0, 1.5}) {
        const SystemParams p = identical_params(j);
        const DerivedParams d = derive(p);
        EXPECT_THROW(composite_rates(p, d), std::domain_error) << "j=" << j;
    }
}

TEST(CompositeRates, PositivityOverRandomGeometry) {
    std::mt19937_64 rng(413u);
    std::uniform_real_distribution<double> jd(0.01, 0.85);
    std::uniform_real_distribution<double> rd(0.05, 5.0);
    std::uniform_real_distribution<double> th(0.05, std::numbers::pi - 0.05);
    std::uniform_real_distribution<double> w2(0.85, 1.15);
    for (int k = 0; k < 50; ++k) {
        SystemParams p = identical_params(jd(rng), rd(rng), th(rng));
        if (k % 2 == 1) p.omega2 = w2(rng);
        const DerivedParams d = derive(p);
        const ReservoirRates r = composite_rates(p, d);
        EXPECT_GT(r.omega_plus_i, 0.0);
        EXPECT_GE(r.omega_minus_i, 0.0);
        EXPECT_GE(r.omega_plus_i + r.omega_plus_12, -1e-15);
        EXPECT_GE(r.omega_plus_i - r.omega_plus_12, -1e-15);
        EXPECT_GE(r.omega_ind_alpha + r.omega_col_alpha, -1e-15);
        EXPECT_GE(r.omega_ind_alpha - r.omega_col_alpha, -1e-15);
        EXPECT_GE(r.omega_ind_beta + r.omega_col_beta, -1e-15);
        EXPECT_GE(r.omega_ind_beta - r.omega_col_beta, -1e-15);
    }
}

TEST(CompositeRates, CutoffBelowAlphaWarns) {
    SystemParams p = identical_params(0.5);
    p.omega_cutoff = 1.2;
    const DerivedParams d = derive(p);
    const ReservoirRates r = composite_rates(p, d);
    EXPECT_FALSE(r.warnings.empty());

    const SystemParams ok = identical_params(0.5);
    EXPECT_TRUE(composite_rates(ok, derive(ok)).warnings.empty());
}

TEST(CompositeRates, ZeroedLambModeKeepsCollectiveShifts) {
    SystemParams p = identical_params(0.6);
    p.lamb_shift_mode = LambShiftMode::zeroed;
    const DerivedParams d = derive(p);
    const ReservoirRates r = composite_rates(p, d);
    EXPECT_DOUBLE_EQ(r.lambda_ind_alpha, 0.0);
    EXPECT_DOUBLE_EQ(r.lambda_ind_beta, 0.0);
    EXPECT_DOUBLE_EQ(r.lambda_plus_i, 0.0);
    EXPECT_DOUBLE_EQ(r.lambda_minus_i, 0.0);
    EXPECT_NE(r.lambda_col_alpha, 0.0);
    EXPECT_NE(r.lambda_minus_12, 0.0);
}
