#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nhqfi/control.hpp"
#include "nhqfi/dynamics.hpp"
#include "nhqfi/errors.hpp"
#include "nhqfi/operators.hpp"
#include "test_helpers.hpp"

using namespace nhqfi;
using nhqfi::testing::max_abs;

namespace {

ModelSpec fig4_model() {
    ModelSpec m;
    m.params = TwoLevelParams{0.2, 1.0};
    return m;
}

ControlSchedule random_schedule(std::mt19937_64& rng, double horizon, int m, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    ControlSchedule s = ControlSchedule::zeros(horizon, m);
    for (int k = 0; k < m; ++k)
        for (int a = 0; a < 3; ++a) s.amplitudes(k, a) = n(rng);
    return s;
}

}  // namespace

TEST(ControlHamiltonian, ZeroControls) {
    EXPECT_EQ(max_abs(control_hamiltonian(Eigen::Vector3d::Zero(), 2)), 0.0);
}

TEST(ControlHamiltonian, SingleTerm) {
    EXPECT_EQ(control_hamiltonian(Eigen::Vector3d(1, 0, 0), 1), pauli(Axis::X));
}

TEST(ControlHamiltonian, KroneckerSum) {
    const Operator expected = nhqfi::testing::kron_reference(pauli(Axis::Z), pauli(Axis::Identity)) +
                              nhqfi::testing::kron_reference(pauli(Axis::Identity), pauli(Axis::Z));
    EXPECT_LT(max_abs(control_hamiltonian(Eigen::Vector3d(0, 0, 1), 2) - expected), 1e-15);
}

TEST(ControlHamiltonian, Linear) {
    const Eigen::Vector3d u(0.3, -1.2, 0.7);
    Operator expected = Operator::Zero(8, 8);
    for (int j = 1; j <= 3; ++j)
        expected += 0.3 * site_operator(Axis::X, j, 3) - 1.2 * site_operator(Axis::Y, j, 3) +
                    0.7 * site_operator(Axis::Z, j, 3);
    EXPECT_LT(max_abs(control_hamiltonian(u, 3) - expected), 1e-14);
}

TEST(ControlSchedule, Validation) {
    EXPECT_THROW(ControlSchedule::zeros(0.0, 10), ContractError);
    EXPECT_THROW(ControlSchedule::zeros(10.0, 0), ContractError);
    ControlSchedule s = ControlSchedule::zeros(10.0, 4, 0.5);
    s.amplitudes(2, 1) = 0.6;
    EXPECT_THROW(s.validate(), ContractError);
    s.amplitudes.resize(3, 3);
    s.amplitudes.setZero();
    EXPECT_THROW(s.validate(), ContractError);
}

TEST(ObjectiveQfi, ZeroScheduleMatchesUncontrolledEndpoint) {
    const ModelSpec m = fig4_model();
    const double f = objective_qfi(ControlSchedule::zeros(10.0, 100), m, "s", m.lindblad_initial_state());
    const auto series = metric_vs_time(m, DynamicsKind::Lindblad, "s", {0.0, 10.0, 100});
    EXPECT_NEAR(f, series.values.back(), 1e-10);
    EXPECT_TRUE(std::isfinite(f));
    EXPECT_GE(f, 0.0);
}

TEST(ObjectiveQfi, RefinementInvariance) {
    std::mt19937_64 rng(43);
    const ModelSpec m = fig4_model();
    const ControlSchedule coarse = random_schedule(rng, 10.0, 20, 0.3);
    ControlSchedule fine = ControlSchedule::zeros(10.0, 40);
    for (int k = 0; k < 40; ++k) fine.amplitudes.row(k) = coarse.amplitudes.row(k / 2);
    const DensityMatrix rho0 = m.lindblad_initial_state();
    EXPECT_NEAR(objective_qfi(coarse, m, "s", rho0), objective_qfi(fine, m, "s", rho0), 1e-8);
}

TEST(ObjectiveQfi, IdentityShiftOfControlIsInvisible) {
    std::mt19937_64 rng(47);
    const ModelSpec m = fig4_model();
    const ControlSchedule sched = random_schedule(rng, 10.0, 25, 0.3);
    const DensityMatrix rho0 = m.lindblad_initial_state();
    const double theta = 0.2, h = default_fd_step(theta);
    auto objective = [&](double c) {
        auto spec_at = [&](double s) {
            LindbladSpec spec = m.with_parameter("s", s).lindblad();
            spec.h_plus += c * Operator::Identity(2, 2);
            return spec;
        };
        const int n_sub = control_substeps(m.lindblad(), sched);
        return qfi_from_central_difference(evolve_controlled(spec_at(theta), sched, rho0, n_sub).back(),
                                           evolve_controlled(spec_at(theta + h), sched, rho0, n_sub).back(),
                                           evolve_controlled(spec_at(theta - h), sched, rho0, n_sub).back(), h);
    };
    EXPECT_NEAR(objective(0.0), objective_qfi(sched, m, "s", rho0), 1e-10);
    EXPECT_NEAR(objective(2.5), objective(0.0), 1e-8);
}

TEST(ObjectiveQfi, RejectsUnknownParameterAndBadState) {
    const ModelSpec m = fig4_model();
    const ControlSchedule s = ControlSchedule::zeros(2.0, 5);
    EXPECT_THROW(objective_qfi(s, m, "kappa", m.lindblad_initial_state()), ContractError);
    EXPECT_THROW(objective_qfi(s, m, "s", 2.0 * m.lindblad_initial_state()), ContractError);
}

TEST(ObjectiveQfi, MatchesDirectTrajectory) {
    std::mt19937_64 rng(53);
    ModelSpec m;
    m.params = YangLeeParams{1.0, 0.6, 2, true};
    const ControlSchedule sched = random_schedule(rng, 3.0, 6, 0.5);
    const DensityMatrix rho0 = m.lindblad_initial_state();
    // Oracle: segment-wise RK4 of the master equation with H₊ + H_c.
    const double h = default_fd_step(0.6);
    auto final_state = [&](double kappa) {
        LindbladSpec base = m.with_parameter("kappa", kappa).lindblad();
        DensityMatrix rho = rho0;
        for (int k = 0; k < sched.n_intervals; ++k) {
            LindbladSpec seg = base;
            seg.h_plus += control_hamiltonian(sched.amplitudes.row(k).transpose(), 2);
            rho = integrate_master(seg, rho, {0.0, sched.interval_length(), 1}, 200).back();
        }
        return rho;
    };
    const double oracle = qfi_from_central_difference(final_state(0.6), final_state(0.6 + h), final_state(0.6 - h), h);
    EXPECT_NEAR(objective_qfi(sched, m, "kappa", rho0, 200), oracle, 1e-8 * std::max(1.0, oracle));
}

TEST(ObjectiveGradient, AgreesWithForwardDifference) {
    std::mt19937_64 rng(59);
    const ModelSpec m = fig4_model();
    const DensityMatrix rho0 = m.lindblad_initial_state();
    for (int trial = 0; trial < 3; ++trial) {
        const ControlSchedule sched = random_schedule(rng, 10.0, 10, 0.3);
        const int n_sub = control_substeps(m.lindblad(), sched);
        const Eigen::MatrixX3d g = objective_gradient(sched, m, "s", rho0, 1e-4, n_sub);
        const double f0 = objective_qfi(sched, m, "s", rho0, n_sub);
        const double step = 1e-5;
        for (int k = 0; k < sched.n_intervals; ++k)
            for (int a = 0; a < 3; ++a) {
                ControlSchedule shifted = sched;
                shifted.amplitudes(k, a) += step;
                const double fwd = (objective_qfi(shifted, m, "s", rho0, n_sub) - f0) / step;
                EXPECT_NEAR(g(k, a), fwd, 0.05 * std::abs(fwd) + 1e-4) << "interval " << k << " axis " << a;
            }
    }
}

TEST(OptimizeControls, FixedPointConvergesImmediately) {
    // ρ₀ = 𝟙/2 is stationary for every control, so the objective is flat.
    const ModelSpec m = fig4_model();
    const DensityMatrix rho0 = 0.5 * Operator::Identity(2, 2);
    const ControlSchedule s0 = ControlSchedule::zeros(2.0, 5);
    const auto report = optimize_controls(s0, m, "s", rho0);
    EXPECT_TRUE(report.converged);
    EXPECT_LE(report.iterations, 2);
    EXPECT_EQ(report.final_schedule.amplitudes, s0.amplitudes);
}

TEST(OptimizeControls, ImprovesFig4SetupMonotonically) {
    const ModelSpec m = fig4_model();
    OptimizeOptions opts;
    opts.max_iter = 20;
    const auto report = optimize_controls(ControlSchedule::zeros(10.0, 100), m, "s", m.lindblad_initial_state(), opts);
    ASSERT_GE(report.objective_trace.size(), 2u);
    for (std::size_t k = 1; k < report.objective_trace.size(); ++k)
        EXPECT_GE(report.objective_trace[k], report.objective_trace[k - 1] - 1e-12);
    EXPECT_GT(report.objective_trace.back(), report.objective_trace.front());
    EXPECT_NEAR(objective_qfi(report.final_schedule, m, "s", m.lindblad_initial_state(), report.substeps),
                report.objective_trace.back(), 1e-12);
}

TEST(OptimizeControls, RespectsAmplitudeBound) {
    const ModelSpec m = fig4_model();
    OptimizeOptions opts;
    opts.max_iter = 10;
    opts.learning_rate = 10.0;
    const auto report =
        optimize_controls(ControlSchedule::zeros(10.0, 20, 0.05), m, "s", m.lindblad_initial_state(), opts);
    EXPECT_LE(report.final_schedule.amplitudes.cwiseAbs().maxCoeff(), 0.05);
    EXPECT_GT(report.objective_trace.back(), report.objective_trace.front());
}

TEST(OptimizeControls, RejectsBadOptions) {
    const ModelSpec m = fig4_model();
    OptimizeOptions opts;
    opts.learning_rate = 0.0;
    EXPECT_THROW(optimize_controls(ControlSchedule::zeros(1.0, 2), m, "s", m.lindblad_initial_state(), opts),
                 ContractError);
}
