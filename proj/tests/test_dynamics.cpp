#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ionrabi/dynamics.hpp"
#include "ionrabi/errors.hpp"
#include "ionrabi/models.hpp"

using namespace ionrabi;

namespace {

OperatorMatrix random_hermitian(const HilbertSpace& s, std::mt19937& rng)
{
    std::normal_distribution<double> d;
    Matrix m(s.dim(), s.dim());
    for (int i = 0; i < s.dim(); ++i)
        for (int j = 0; j < s.dim(); ++j)
            m(i, j) = cplx(d(rng), d(rng));
    return OperatorMatrix(s, 0.5 * (m + m.adjoint()), true);
}

QuantumState random_pure(const HilbertSpace& s, std::mt19937& rng)
{
    std::normal_distribution<double> d;
    Vector v(s.dim());
    for (int i = 0; i < s.dim(); ++i)
        v(i) = cplx(d(rng), d(rng));
    return QuantumState::pure(s, v.normalized());
}

double poisson(double mean, int n)
{
    return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

} // namespace

TEST_SUITE("dynamics")
{
    TEST_CASE("state preparation")
    {
        const HilbertSpace s(40);
        const auto f = fock_state(s, 3, Qubit::up);
        CHECK(f.vector()(s.index(Qubit::up, 3)) == cplx(1.0));
        CHECK_THROWS_AS(fock_state(s, 41, Qubit::down), TruncationTooSmall);

        const auto c = coherent_state(s, cplx(1.2, -0.9), Qubit::down);
        const auto p = phonon_distribution(c);
        for (int n = 0; n <= 20; ++n)
            CHECK(std::abs(p[n] - poisson(2.25, n)) < 1e-12);
        CHECK(std::abs(expectation(number_op(s), c) - 2.25) < 1e-10);
        CHECK(sigma_z_expectation(c) == doctest::Approx(-1.0));
        CHECK_THROWS_AS(coherent_state(HilbertSpace(10), 3.0, Qubit::down), TruncationTooSmall);
        CHECK(coherent_truncation(3.0) > 10);

        const auto th = thermal_state(s, 1.0, Qubit::down);
        const auto pt = phonon_distribution(th);
        for (int n = 0; n <= 10; ++n)
            CHECK(std::abs(pt[n] - std::pow(0.5, n + 1)) < 1e-10);
        CHECK_THROWS_AS(thermal_state(HilbertSpace(20), 3.0, Qubit::down), TruncationTooSmall);
        CHECK(th.min_eigenvalue() >= 0.0);
    }

    TEST_CASE("state validation")
    {
        const HilbertSpace s(3);
        Vector v = Vector::Zero(s.dim());
        v(0) = 1.1;
        CHECK_THROWS_AS(QuantumState::pure(s, v), std::invalid_argument);
        CHECK_THROWS_AS(QuantumState::pure(HilbertSpace(4), Vector::Zero(8)), SpaceMismatch);
        Matrix rho = Matrix::Zero(s.dim(), s.dim());
        rho(0, 0) = 1.0;
        rho(0, 1) = 0.1;
        CHECK_THROWS_AS(QuantumState::density(s, rho), std::invalid_argument);
    }

    TEST_CASE("fidelity")
    {
        const HilbertSpace s(10);
        const auto a = coherent_state(s, 0.5, Qubit::down);
        const auto b = coherent_state(s, -0.5, Qubit::down);
        CHECK(std::abs(overlap_fidelity(a, b) - std::exp(-1.0)) < 1e-12);
        const auto rho = QuantumState::density(s, a.to_density());
        CHECK(std::abs(overlap_fidelity(rho, b) - std::exp(-1.0)) < 1e-12);
        CHECK(overlap_fidelity(a, a) == doctest::Approx(1.0));
    }

    TEST_CASE("propagator matches a matrix exponential (property)")
    {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> t_dist(0.0, 3.0);
        const HilbertSpace s(5);
        for (int trial = 0; trial < 10; ++trial) {
            const auto h = random_hermitian(s, rng);
            const auto psi = random_pure(s, rng);
            const double t = t_dist(rng);
            const Matrix u = Matrix(cplx(0.0, -t) * h.matrix()).exp();
            const UnitaryPropagator prop(h);
            CHECK((prop.propagate(psi.vector(), t) - u * psi.vector()).cwiseAbs().maxCoeff() < 1e-11);
            const Matrix rho = psi.to_density();
            CHECK((prop.propagate(rho, t) - u * rho * u.adjoint()).cwiseAbs().maxCoeff() < 1e-11);
        }
    }

    TEST_CASE("JC vacuum Rabi oscillation is analytic")
    {
        const HilbertSpace s(12);
        const double g = 1.7;
        const int n = 5;
        const auto h = build_jc(s, g);
        const auto times = linear_grid(4.0, 81);
        const auto traj = evolve_unitary(h, fock_state(s, n, Qubit::down), times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double p_up = std::pow(std::sin(g * std::sqrt(double(n)) * times[k]), 2);
            CHECK(std::abs(traj.records[k].sigma_z - (2.0 * p_up - 1.0)) < 1e-12);
        }
        CHECK(traj.info.max_norm_drift < 1e-10);
        CHECK(traj.info.method == "eigendecomposition");
    }

    TEST_CASE("nonlinear anti-JC rate carries f1(n)")
    {
        const HilbertSpace s(12);
        const double g = 1.0, eta = 0.7;
        const int n = 4;
        const auto times = linear_grid(5.0, 51);
        const auto traj = evolve_unitary(build_nonlinear_anti_jc(s, g, eta), fock_state(s, n, Qubit::down), times);
        const double rate = g * std::sqrt(n + 1.0) * std::abs(f1_scalar(n, eta));
        for (std::size_t k = 0; k < times.size(); ++k)
            CHECK(std::abs(traj.records[k].sigma_z - (2.0 * std::pow(std::sin(rate * times[k]), 2) - 1.0)) < 1e-12);
    }

    TEST_CASE("snapshots and reference")
    {
        const HilbertSpace s(8);
        EvolveOptions opts;
        opts.snapshot_indices = {0, 2};
        opts.reference = fock_state(s, 0, Qubit::up);
        const auto traj = evolve_unitary(build_jc(s, 1.0), fock_state(s, 1, Qubit::down), linear_grid(1.0, 3), opts);
        CHECK(traj.snapshots.size() == 2);
        CHECK(traj.snapshot(2) != nullptr);
        CHECK(traj.snapshot(1) == nullptr);
        CHECK(traj.records[0].fidelity == doctest::Approx(0.0));
        CHECK(traj.records[2].fidelity == doctest::Approx(std::pow(std::sin(1.0), 2)));
    }

    TEST_CASE("time grids")
    {
        const HilbertSpace s(3);
        const auto h = build_jc(s, 1.0);
        const std::vector<double> bad{0.0, 1.0, 0.5};
        CHECK_THROWS_AS(evolve_unitary(h, fock_state(s, 0, Qubit::up), bad), std::invalid_argument);
        const auto g = linear_grid(2.0, 5);
        CHECK(g.size() == 5);
        CHECK(g.back() == 2.0);
        CHECK(linear_grid(3.0, 1).front() == 0.0);
    }

    TEST_CASE("RK4 with a constant generator reproduces exact propagation")
    {
        const HilbertSpace s(10);
        const auto h = build_qrm(s, 0.8, 1.0, 0.4);
        const auto psi = coherent_state(s, 0.7, Qubit::down);
        const auto times = linear_grid(3.0, 31);
        TimeDependentOptions td;
        td.dt_max = 0.002;
        td.estimate_error = true;
        td.snapshot_all = true;
        EvolveOptions ex;
        ex.snapshot_all = true;
        const auto a = evolve_unitary_td(schrodinger_generator([&](double) { return h.matrix(); }), psi, times, td);
        const auto b = evolve_unitary(h, psi, times, ex);
        for (std::size_t k = 0; k < times.size(); ++k)
            CHECK((a.snapshot(k)->vector() - b.snapshot(k)->vector()).norm() < 1e-9);
        REQUIRE(a.info.error_estimate.has_value());
        CHECK(*a.info.error_estimate < 1e-9);
        CHECK(a.info.max_norm_drift < 1e-10);

        td.dt_max = 1.0;
        td.estimate_error = false;
        CHECK_THROWS_AS(evolve_unitary_td(schrodinger_generator([&](double) { return h.matrix(); }), psi, times, td),
                        StepTooLarge);
    }

    TEST_CASE("spontaneous decay is exponential")
    {
        const HilbertSpace s(2);
        const double gamma = 0.8;
        LindbladSpec l;
        l.add(gamma, qubit_ops(s).sigma_minus);
        const OperatorMatrix zero(s, Matrix::Zero(s.dim(), s.dim()), true);
        const auto rho0 = QuantumState::density(s, fock_state(s, 1, Qubit::up).to_density());
        const auto times = linear_grid(4.0, 41);
        const auto coarse = evolve_lindblad(zero, l, rho0, times);
        LindbladOptions fine_opts;
        fine_opts.dt_max = 0.005;
        const auto fine = evolve_lindblad(zero, l, rho0, times, fine_opts);
        double err_coarse = 0.0, err_fine = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double exact = 2.0 * std::exp(-gamma * times[k]) - 1.0;
            err_coarse = std::max(err_coarse, std::abs(coarse.records[k].sigma_z - exact));
            err_fine = std::max(err_fine, std::abs(fine.records[k].sigma_z - exact));
        }
        // Default step: (sum of rates) dt = 0.05, global RK4 error ~1e-8.
        CHECK(err_coarse < 5e-8);
        // Fourth order: dt 12.5x smaller, error ~2.4e4x smaller.
        CHECK(err_fine < 1e-11);
        CHECK(coarse.info.max_norm_drift < 1e-12);
    }

    TEST_CASE("Lindblad integrator agrees with the dense right-hand side (property)")
    {
        std::mt19937 rng(99);
        const HilbertSpace s(3);
        for (int trial = 0; trial < 3; ++trial) {
            const auto h = random_hermitian(s, rng);
            LindbladSpec l;
            l.add(0.3, qubit_ops(s).sigma_minus);
            l.add(0.1, annihilation_op(s));
            const auto psi = random_pure(s, rng);
            const auto rho0 = QuantumState::density(s, psi.to_density());

            const Matrix r = lindblad_rhs(h, l, rho0.density_matrix());
            CHECK(std::abs(r.trace()) < 1e-12);
            CHECK(hermiticity_defect(r) < 1e-12);

            // Oracle: vectorized Liouvillian exponentiated densely.
            const int d = s.dim();
            Matrix liou(d * d, d * d);
            for (int j = 0; j < d * d; ++j) {
                Matrix e = Matrix::Zero(d, d);
                e(j % d, j / d) = 1.0;
                const Matrix col = lindblad_rhs(h, l, e);
                liou.col(j) = Eigen::Map<const Vector>(col.data(), d * d);
            }
            const double t = 0.9;
            const Vector vec0 = Eigen::Map<const Vector>(rho0.density_matrix().data(), d * d);
            const Vector expect = Matrix(t * liou).exp() * vec0;
            LindbladOptions lo;
            lo.snapshot_all = true;
            lo.dt_max = 0.002;
            const std::vector<double> times{0.0, t};
            const auto traj = evolve_lindblad(h, l, rho0, times, lo);
            const Matrix& rho_t = traj.snapshot(1)->density_matrix();
            CHECK((Eigen::Map<const Vector>(rho_t.data(), d * d) - expect).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(traj.info.max_norm_drift < 1e-8);
            CHECK(traj.info.min_eigenvalue > -1e-8);
        }
    }

    TEST_CASE("RWA cross-check in a well separated regime")
    {
        const HilbertSpace s(8);
        const ModelSpec tt = two_tone_for(1.0, 0.4, 0.5, 0.0, 400.0);
        const auto report = rwa_crosscheck(tt, fock_state(s, 0, Qubit::down), 2.0 * std::numbers::pi, 0.01,
                                           {.n_points = 21});
        CHECK(report.valid);
        CHECK(report.max_deviation < 1e-2);
        CHECK(report.deviation.size() == 21);
        CHECK(report.deviation.front() < 1e-14);
        CHECK_THROWS_AS(rwa_crosscheck(ModelSpec{.kind = ModelKind::JC, .g = 1.0}, fock_state(s, 0, Qubit::down), 1.0, 0.01), std::invalid_argument);
    }
}
