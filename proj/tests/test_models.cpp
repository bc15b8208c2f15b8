#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nhqfi/errors.hpp"
#include "nhqfi/models.hpp"
#include "nhqfi/operators.hpp"
#include "test_helpers.hpp"

using namespace nhqfi;
using nhqfi::testing::max_abs;

TEST(TwoLevel, HermitianLimitIsPauliX) { EXPECT_EQ(build_two_level({1.0, 0.0}), pauli(Axis::X)); }

TEST(TwoLevel, PureImaginaryField) {
    EXPECT_LT(max_abs(build_two_level({0.0, 1.0}) - (-kI) * pauli(Axis::Z)), 1e-15);
}

TEST(TwoLevel, MatrixLayout) {
    Operator expected(2, 2);
    expected << Complex(0, -1), 2, 2, Complex(0, 1);
    EXPECT_EQ(build_two_level({2.0, 1.0}), expected);
}

TEST(TwoLevelEigenvalues, UnbrokenExceptionalAndBroken) {
    auto [ep, em] = two_level_eigenvalues({2.0, 1.0});
    EXPECT_NEAR(ep.real(), 1.7320508075688772, 1e-15);
    EXPECT_NEAR(em.real(), -1.7320508075688772, 1e-15);
    std::tie(ep, em) = two_level_eigenvalues({1.0, 1.0});
    EXPECT_EQ(ep, Complex(0.0));
    EXPECT_EQ(em, Complex(0.0));
    std::tie(ep, em) = two_level_eigenvalues({0.2, 1.0});
    EXPECT_NEAR(ep.imag(), 0.9797958971132712, 1e-15);
    EXPECT_NEAR(em.imag(), -0.9797958971132712, 1e-15);
    EXPECT_EQ(ep.real(), 0.0);
}

TEST(TwoLevelEigenvalues, AgreeWithNumericalDiagonalization) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int checked = 0;
    while (checked < 1000) {
        const TwoLevelParams p{u(rng), u(rng)};
        const auto [ep, em] = two_level_eigenvalues(p);
        if (std::abs(ep - em) <= 1e-6) continue;
        const auto es = biorthogonal_eig(build_two_level(p));
        std::vector<Complex> closed{ep, em};
        for (const Complex& e : es.eigenvalues) {
            const double d = std::min(std::abs(e - closed[0]), std::abs(e - closed[1]));
            EXPECT_LT(d, 1e-9);
        }
        if (p.s * p.s > p.r * p.r) {
            EXPECT_LT(std::abs(ep.imag()), 1e-10);
            EXPECT_LT(std::abs(em.imag()), 1e-10);
        } else {
            EXPECT_LT(std::abs(ep - std::conj(em)), 1e-10);
        }
        ++checked;
    }
}

TEST(TwoLevelEigenstates, NormalizationAndResidual) {
    const TwoLevelParams p{2.0, 1.0};
    const auto [plus, minus] = two_level_eigenstates(p);
    EXPECT_NEAR(std::norm(plus(0)), 2.0 / (2.0 * std::sqrt(3.0)), 1e-15);
    EXPECT_NEAR(std::norm(minus(0)), 2.0 / (2.0 * std::sqrt(3.0)), 1e-15);
    const Operator h = build_two_level(p);
    EXPECT_LT((h * plus - std::sqrt(3.0) * plus).norm(), 1e-10);
    EXPECT_LT((h * minus + std::sqrt(3.0) * minus).norm(), 1e-10);
    EXPECT_GT(plus(0).real(), 0.0);
    EXPECT_EQ(plus(0).imag(), 0.0);
}

TEST(TwoLevelEigenstates, UnitCouplingNormalization) {
    const TwoLevelParams p{1.0, 0.5};
    const auto [plus, minus] = two_level_eigenstates(p);
    EXPECT_NEAR(std::norm(plus(0)), 1.0 / (2.0 * std::sqrt(0.75)), 1e-15);
    EXPECT_LT((build_two_level(p) * plus - std::sqrt(0.75) * plus).norm(), 1e-12);
}

TEST(TwoLevelEigenstates, HermitianLimit) {
    const auto [plus, minus] = two_level_eigenstates({1.0, 0.0});
    StateVector ep(2), em(2);
    ep << 1.0, 1.0;
    em << 1.0, -1.0;
    EXPECT_LT((plus - ep / std::sqrt(2.0)).norm(), 1e-15);
    EXPECT_LT((minus - em / std::sqrt(2.0)).norm(), 1e-15);
}

TEST(TwoLevelEigenstates, BrokenPhaseThrows) {
    EXPECT_THROW(two_level_eigenstates({1.0, 1.0}), PhaseDomainError);
    EXPECT_THROW(two_level_eigenstates({0.2, 1.0}), PhaseDomainError);
}

TEST(PtInnerProduct, SignedNormalization) {
    const auto [plus, minus] = two_level_eigenstates({2.0, 1.0});
    EXPECT_LT(std::abs(pt_inner_product(plus, plus) - 1.0), 1e-12);
    EXPECT_LT(std::abs(pt_inner_product(plus, minus)), 1e-12);
    EXPECT_LT(std::abs(pt_inner_product(minus, plus)), 1e-12);
    EXPECT_LT(std::abs(pt_inner_product(minus, minus) + 1.0), 1e-12);
}

TEST(PtInnerProduct, MatrixIsDiagOnRandomUnbrokenPoints) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double s = 0.1 + 3.0 * u(rng);
        const double r = (2.0 * u(rng) - 1.0) * 0.95 * s;
        const auto [plus, minus] = two_level_eigenstates({s, r});
        EXPECT_LT(std::abs(pt_inner_product(plus, plus) - 1.0), 1e-9);
        EXPECT_LT(std::abs(pt_inner_product(minus, minus) + 1.0), 1e-9);
        EXPECT_LT(std::abs(pt_inner_product(plus, minus)), 1e-9);
    }
}

TEST(PtInnerProduct, DimensionMismatchThrows) {
    EXPECT_THROW(pt_inner_product(StateVector::Zero(2), StateVector::Zero(4)), ContractError);
}

TEST(YangLee, FieldOnly) {
    EXPECT_LT(max_abs(build_yang_lee({0.0, 0.0, 1, true}) - (-0.5) * pauli(Axis::Z)), 1e-15);
}

TEST(YangLee, SingleSiteAtExceptionalPointIsNilpotent) {
    const Operator h = build_yang_lee({0.0, 1.0, 1, true});
    EXPECT_LT(max_abs(h - (-0.5) * (pauli(Axis::Z) + kI * pauli(Axis::X))), 1e-15);
    EXPECT_LT(max_abs(h * h), 1e-15);
    EXPECT_EQ(classify_phase(h).label, Phase::ExceptionalPoint);
}

TEST(YangLee, SingleSiteCouplingIsScalar) {
    const Operator diff = build_yang_lee({0.8, 0.0, 1, true}) - build_yang_lee({0.0, 0.0, 1, true});
    EXPECT_LT(max_abs(diff - (-0.4) * Operator::Identity(2, 2)), 1e-15);
}

TEST(YangLee, TwoSitesCountBondTwice) {
    const Operator xx = nhqfi::testing::kron_reference(pauli(Axis::X), pauli(Axis::X));
    const Operator zi = nhqfi::testing::kron_reference(pauli(Axis::Z), pauli(Axis::Identity));
    const Operator iz = nhqfi::testing::kron_reference(pauli(Axis::Identity), pauli(Axis::Z));
    const Operator expected = -0.5 * (zi + iz + 2.0 * xx);
    EXPECT_LT(max_abs(build_yang_lee({1.0, 0.0, 2, true}) - expected), 1e-15);
}

TEST(YangLee, InvalidParamsThrow) {
    EXPECT_THROW(build_yang_lee({1.0, 1.0, 0, true}), ContractError);
    EXPECT_THROW(build_yang_lee({1.0, 1.0, 9, true}), ContractError);
    EXPECT_THROW(build_yang_lee({1.0, 1.0, 2, false}), ContractError);
}

TEST(YangLeeSplit, SingleSiteParts) {
    const auto parts = yang_lee_split({0.0, 1.0, 1, true});
    EXPECT_LT(max_abs(parts.h0 - (-0.5) * pauli(Axis::Z)), 1e-15);
    EXPECT_LT(max_abs(parts.h1 - 0.5 * pauli(Axis::X)), 1e-15);
}

TEST(YangLeeSplit, ZeroKappaGivesZeroH1) {
    EXPECT_EQ(max_abs(yang_lee_split({1.3, 0.0, 3, true}).h1), 0.0);
}

TEST(YangLeeSplit, RecombinesExactly) {
    for (int n = 1; n <= 4; ++n) {
        const YangLeeParams p{0.6, -1.1, n, true};
        const auto parts = yang_lee_split(p);
        EXPECT_TRUE(is_hermitian(parts.h0));
        EXPECT_TRUE(is_hermitian(parts.h1));
        EXPECT_LT(max_abs(build_yang_lee(p) - (parts.h0 - kI * parts.h1)), 1e-12);
        const auto split = hermitian_split(build_yang_lee(p));
        EXPECT_LT(max_abs(split.plus - parts.h0), 1e-12);
        EXPECT_LT(max_abs(split.minus + kI * parts.h1), 1e-12);
    }
}

TEST(ClassifyPhase, TwoLevelRegimes) {
    EXPECT_EQ(classify_phase(build_two_level({2.0, 1.0})).label, Phase::Unbroken);
    EXPECT_EQ(classify_phase(build_two_level({1.0, 1.0})).label, Phase::ExceptionalPoint);
    EXPECT_EQ(classify_phase(build_two_level({0.2, 1.0})).label, Phase::Broken);
}

TEST(ClassifyPhase, LabelInvariants) {
    const auto broken = classify_phase(build_two_level({0.2, 1.0}));
    EXPECT_NEAR(broken.max_abs_im, 0.9797958971132712, 1e-12);
    EXPECT_GT(broken.min_gap, 1e-9);
    const auto unbroken = classify_phase(build_two_level({2.0, 1.0}));
    EXPECT_LE(unbroken.max_abs_im, 1e-9);
}

TEST(PhaseScan, TwoLevelRatios) {
    const auto scan = phase_scan_two_level(1.0, {0.5, 1.0, 2.0});
    ASSERT_EQ(scan.size(), 3u);
    EXPECT_EQ(scan[0].phase.label, Phase::Unbroken);
    EXPECT_EQ(scan[1].phase.label, Phase::ExceptionalPoint);
    EXPECT_EQ(scan[2].phase.label, Phase::Broken);
    EXPECT_EQ(scan[2].point, std::vector<double>{2.0});
}

TEST(PhaseScan, YangLeeSingleSiteOracle) {
    // Eigenvalues −λ/2 ± ½√(1 − κ²).
    const auto scan = phase_scan_yang_lee(1, {{0.0, 0.5}, {0.0, 2.0}});
    EXPECT_EQ(scan[0].phase.label, Phase::Unbroken);
    EXPECT_EQ(scan[1].phase.label, Phase::Broken);
    EXPECT_NEAR(scan[1].phase.max_abs_im, 0.5 * std::sqrt(3.0), 1e-12);
}

TEST(PhaseScan, YangLeeSymmetricInKappa) {
    std::vector<std::pair<double, double>> pos, neg;
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j) {
            const double lam = -2.0 + 0.4 * i;
            const double kappa = 0.3 * j;
            pos.emplace_back(lam, kappa);
            neg.emplace_back(lam, -kappa);
        }
    for (int n = 1; n <= 3; ++n) {
        const auto a = phase_scan_yang_lee(n, pos);
        const auto b = phase_scan_yang_lee(n, neg);
        for (std::size_t k = 0; k < a.size(); ++k) {
            EXPECT_EQ(a[k].phase.label, b[k].phase.label);
            const auto sa = sorted_spectrum(build_yang_lee({pos[k].first, pos[k].second, n, true}));
            const auto sb = sorted_spectrum(build_yang_lee({neg[k].first, neg[k].second, n, true}));
            for (std::size_t e = 0; e < sa.size(); ++e) EXPECT_LT(std::abs(sa[e] - sb[e]), 1e-9);
        }
    }
}

TEST(ClassifyPhase, DiagonalizableDegeneracyIsNotExceptional) {
    EXPECT_EQ(classify_phase(Operator::Identity(3, 3)).label, Phase::Unbroken);
    Operator d = Operator::Zero(4, 4);
    d.diagonal() << Complex(1, 1), Complex(1, 1), Complex(1, -1), Complex(1, -1);
    EXPECT_EQ(classify_phase(d).label, Phase::Broken);
    // Periodic three-site chain: ±k momentum pairs are exactly degenerate.
    const auto hermitian = classify_phase(build_yang_lee({0.7, 0.0, 3, true}));
    EXPECT_LT(hermitian.min_gap, 1e-9);
    EXPECT_EQ(hermitian.label, Phase::Unbroken);
    EXPECT_EQ(classify_phase(build_yang_lee({1.0, 1.5, 3, true})).label, Phase::Broken);
}

TEST(ClassifyPhase, DecoupledChainAtExceptionalPoint) {
    // λ = 0, κ = 1: three independent single-site EPs.
    EXPECT_EQ(classify_phase(build_yang_lee({0.0, 1.0, 3, true})).label, Phase::ExceptionalPoint);
}
