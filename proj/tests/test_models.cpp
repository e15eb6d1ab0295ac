#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ionrabi/dynamics.hpp"
#include "ionrabi/models.hpp"

using namespace ionrabi;

namespace {

double commutator_defect(const OperatorMatrix& a, const OperatorMatrix& b)
{
    const Matrix c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    return c.cwiseAbs().maxCoeff() / a.matrix().cwiseAbs().maxCoeff();
}

ModelSpec spec_of(ModelKind kind)
{
    ModelSpec s;
    s.kind = kind;
    s.g = 1.3;
    s.eta = 0.4;
    s.omega_R = 0.7;
    s.omega0_R = 0.2;
    return s;
}

} // namespace

TEST_SUITE("models")
{
    TEST_CASE("kind names round trip")
    {
        for (auto k : {ModelKind::JC, ModelKind::AntiJC, ModelKind::NonlinearJC, ModelKind::NonlinearAntiJC,
                       ModelKind::QRM, ModelKind::NonlinearQRM, ModelKind::TwoTone})
            CHECK(model_kind_from_string(to_string(k)) == k);
        CHECK_THROWS_AS(model_kind_from_string("Dicke"), std::invalid_argument);
        CHECK(is_nonlinear(ModelKind::NonlinearQRM));
        CHECK_FALSE(is_nonlinear(ModelKind::QRM));
    }

    TEST_CASE("every builder is Hermitian")
    {
        const HilbertSpace s(25);
        for (auto k : {ModelKind::JC, ModelKind::AntiJC, ModelKind::NonlinearJC, ModelKind::NonlinearAntiJC,
                       ModelKind::QRM, ModelKind::NonlinearQRM}) {
            CAPTURE(to_string(k));
            const auto h = build_hamiltonian(spec_of(k), s);
            CHECK(h.is_hermitian());
            CHECK(h.hermiticity_defect() < 1e-12);
        }
    }

    TEST_CASE("matrix elements")
    {
        const HilbertSpace s(10);
        const double g = 0.9, eta = 0.5;
        const auto jc = build_jc(s, g);
        CHECK(std::abs(jc.element(Qubit::up, 3, Qubit::down, 4) - cplx(0.0, g * 2.0)) < 1e-15);
        const auto ajc = build_anti_jc(s, g);
        CHECK(std::abs(ajc.element(Qubit::up, 5, Qubit::down, 4) - cplx(0.0, g * std::sqrt(5.0))) < 1e-15);
        const auto njc = build_nonlinear_jc(s, g, eta);
        CHECK(std::abs(njc.element(Qubit::up, 3, Qubit::down, 4) - cplx(0.0, g * 2.0 * f1_scalar(3, eta))) < 1e-15);
        const auto najc = build_nonlinear_anti_jc(s, g, eta);
        CHECK(std::abs(najc.element(Qubit::up, 5, Qubit::down, 4) -
                       cplx(0.0, g * std::sqrt(5.0) * f1_scalar(4, eta))) < 1e-15);
        const auto qrm = build_qrm(s, g, 0.3, 0.1);
        CHECK(std::abs(qrm.element(Qubit::up, 2, Qubit::up, 2) - cplx(0.05 + 0.6)) < 1e-15);
        CHECK(std::abs(qrm.element(Qubit::down, 2, Qubit::down, 2) - cplx(-0.05 + 0.6)) < 1e-15);
        CHECK(std::abs(qrm.element(Qubit::up, 3, Qubit::down, 2) - cplx(0.0, g * std::sqrt(3.0))) < 1e-15);
    }

    TEST_CASE("linear models are the eta -> 0 limit")
    {
        const HilbertSpace s(12);
        CHECK(build_nonlinear_jc(s, 1.0, 0.0).matrix().isApprox(build_jc(s, 1.0).matrix()));
        CHECK(build_nonlinear_anti_jc(s, 1.0, 0.0).matrix().isApprox(build_anti_jc(s, 1.0).matrix()));
        CHECK(build_nonlinear_qrm(s, 1.0, 0.0, 0.5, 0.1).matrix().isApprox(build_qrm(s, 1.0, 0.5, 0.1).matrix()));
    }

    TEST_CASE("parity commutes with the Rabi models")
    {
        const HilbertSpace s(30);
        const auto p = parity_operator(s);
        CHECK(commutator_defect(build_qrm(s, 2.0, 1.0, 0.3), p) < 1e-12);
        CHECK(commutator_defect(build_nonlinear_qrm(s, 2.0, 0.6, 1.0, 0.3), p) < 1e-12);
        // JC conserves the excitation number instead; parity is not the point
        // there, but the two-tone drive at t != 0 breaks it.
        ModelSpec tt = two_tone_for(1.0, 0.5, 0.3, 0.0, 40.0);
        const TwoToneHamiltonian h(tt, s);
        CHECK(commutator_defect(h(0.37), p) > 1e-3);
    }

    TEST_CASE("validation")
    {
        ModelSpec s = spec_of(ModelKind::JC);
        CHECK(validate(s).empty());
        s.g = 0.0;
        CHECK_THROWS_AS(validate(s), std::invalid_argument);
        s = spec_of(ModelKind::QRM);
        s.g = 0.0;
        CHECK_NOTHROW(validate(s));
        s.eta = -0.1;
        CHECK_THROWS_AS(validate(s), std::invalid_argument);

        ModelSpec tt = two_tone_for(1.0, 0.5, 0.3, 0.0, 100.0);
        CHECK(validate(tt).empty());
        tt.g *= 1.01;
        CHECK_THROWS_AS(validate(tt), std::invalid_argument);
        tt = two_tone_for(1.0, 0.5, 0.3, 0.0, 5.0);  // Omega = 4 nu / 5
        CHECK_FALSE(validate(tt).empty());
        CHECK_THROWS_AS(build_hamiltonian(tt, HilbertSpace(5)), std::invalid_argument);
    }

    TEST_CASE("two-tone parameters map back to the simulated model")
    {
        const ModelSpec tt = two_tone_for(2.0, 0.6, 0.5, 0.2);
        CHECK(std::abs(tt.Omega - 2.0 * 2.0 / 0.6) < 1e-14);
        CHECK(std::abs(coupling_strength(tt) - 2.0) < 1e-14);
        const auto f = simulated_frequencies(tt.delta_r, tt.delta_b);
        CHECK(std::abs(f.omega_R - 0.5) < 1e-15);
        CHECK(std::abs(f.omega0_R - 0.2) < 1e-15);
        CHECK(tt.nu == kDefaultTrapFrequency);
    }

    TEST_CASE("two-tone Hamiltonian against a matrix exponential oracle")
    {
        const int n_max = 10;
        const int big = 90;
        const HilbertSpace s(n_max);
        ModelSpec tt = two_tone_for(0.8, 0.45, 0.3, 0.1, 25.0);
        tt.phi_r = 0.4;
        tt.phi_b = -1.1;
        const TwoToneHamiltonian h(tt, s);

        Matrix a = Matrix::Zero(big + 1, big + 1);
        for (int n = 1; n <= big; ++n)
            a(n - 1, n) = std::sqrt(double(n));
        const cplx i(0.0, 1.0);
        for (double t : {0.0, 0.13, 1.7, 4.05}) {
            CAPTURE(t);
            const cplx beta = i * tt.eta * std::exp(i * tt.nu * t);
            const Matrix d = Matrix(beta * a.adjoint() - std::conj(beta) * a).exp();
            const cplx drive = std::exp(-i * ((tt.delta_r - tt.nu) * t - tt.phi_r)) +
                               std::exp(-i * ((tt.delta_b + tt.nu) * t - tt.phi_b));
            const Matrix lower = 0.5 * tt.Omega * drive * d.topLeftCorner(n_max + 1, n_max + 1);
            const Matrix m = h.matrix(t);
            CHECK((m.block(n_max + 1, 0, n_max + 1, n_max + 1) - lower).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(hermiticity_defect(m) < 1e-12);
            CHECK(m.topLeftCorner(n_max + 1, n_max + 1).cwiseAbs().maxCoeff() == 0.0);

            Vector psi = Vector::Zero(s.dim());
            psi(3) = 0.6;
            psi(n_max + 5) = cplx(0.0, 0.8);
            Vector out;
            h.apply_generator(t, psi, out);
            CHECK((out - (-i) * (m * psi)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("default truncation")
    {
        CHECK(default_truncation(0, 0.0, 0.0) == 40);
        CHECK(default_truncation(30, 0.0, 0.0) == 60);
        CHECK(default_truncation(7, 0.0, 4.0) == 84);
        CHECK(default_truncation(10, 1.0, 3.7) == 91);
    }
}
