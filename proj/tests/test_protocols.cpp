#include <doctest.h>

#include <cmath>

#include "ionrabi/errors.hpp"
#include "ionrabi/protocols.hpp"

using namespace ionrabi;

TEST_SUITE("protocols")
{
    TEST_CASE("rabi period")
    {
        CHECK(rabi_period(2.0) == doctest::Approx(M_PI));
        CHECK_THROWS_AS(rabi_period(0.0), std::invalid_argument);
    }

    TEST_CASE("window amplitude")
    {
        const std::vector<double> t{0, 1, 2, 3, 4};
        const std::vector<double> v{0.1, -0.9, 0.3, 0.2, -0.5};
        CHECK(window_amplitude(t, v, 0.5, 2.5) == 0.9);
        CHECK(window_amplitude(t, v, 2.0, 3.0) == 0.3);
        CHECK(window_amplitude(t, v, 10.0, 11.0) == 0.0);
    }

    TEST_CASE("filter analysis needs a barrier or a cut")
    {
        const HilbertSpace s(20);
        ModelSpec jc{.kind = ModelKind::JC, .g = 1.0};
        CHECK_THROWS_AS(run_filter_analysis(jc, fock_state(s, 0, Qubit::up), 1.0, {}), NoBarrier);
        ModelSpec weak{.kind = ModelKind::NonlinearJC, .eta = 0.05, .g = 1.0};
        CHECK_THROWS_AS(run_filter_analysis(weak, fock_state(s, 0, Qubit::up), 1.0, {}), NoBarrier);

        const auto linear = run_filter_analysis(jc, fock_state(s, 3, Qubit::up), 2.0, {0.5, 1.0}, {.n_points = 11, .cut = 3});
        CHECK(linear.barrier_n == 3);
        CHECK(linear.leakage_max > 0.1);
        CHECK(linear.snapshot_phonons.size() == 2);
    }

    TEST_CASE("filter holds population below the barrier")
    {
        const double eta = barrier_eta(6);
        const HilbertSpace s(20);
        ModelSpec nqrm{.kind = ModelKind::NonlinearQRM, .eta = eta, .g = 2.0, .omega_R = 0.5};
        const auto r = run_filter_analysis(nqrm, fock_state(s, 0, Qubit::down), 30.0, {});
        CHECK(r.barrier_n == 6);
        CHECK(r.leakage_max < 1e-12);
    }

    TEST_CASE("landscape is independent of the thread count")
    {
        const auto a = f1_landscape(0, 30, 0.01, 1.0, 17, 1);
        const auto b = f1_landscape(0, 30, 0.01, 1.0, 17, 4);
        CHECK(a.log10_abs == b.log10_abs);
        CHECK(a.n.size() == 31);
        CHECK(a.eta.back() == 1.0);
        CHECK(a.log10_abs.minCoeff() >= kLandscapeFloor);
        CHECK(a.log10_abs(0, 0) == doctest::Approx(std::log10(std::exp(-0.5e-4))));
        CHECK_THROWS_AS(f1_landscape(5, 2, 0.1, 0.2, 3), std::invalid_argument);
    }

    TEST_CASE("short Fock preparation run")
    {
        FockPrepPlan plan;
        plan.target_n = 3;
        plan.initial_nbar = 0.2;
        plan.duration = 20.0;
        plan.n_max = 12;
        plan.n_points = 11;
        const auto r = run_fock_prep(plan);
        CHECK(r.eta == doctest::Approx(barrier_eta(3)));
        CHECK(r.target_population > 0.95);
        CHECK(r.trajectory.info.max_norm_drift < 1e-8);
        CHECK(r.above_target_max < 1e-3);

        plan.n_max = 5;
        CHECK_THROWS_AS(run_fock_prep(plan), std::invalid_argument);
    }

    TEST_CASE("collapse and revival of a small coherent state")
    {
        const auto r = run_collapse_revival(JcVariant::linear, cplx(3.0), 1.0, 0.0);
        CHECK(r.revival_time == doctest::Approx(2.0 * M_PI * 3.0));
        CHECK(r.ratio > 3.0);
        CHECK_THROWS_AS(run_collapse_revival(JcVariant::linear, 0.0, 1.0, 0.0), std::invalid_argument);
    }
}
