#include "ionrabi/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ionrabi {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 7> kKindNames{{
    {ModelKind::JC, "JC"},
    {ModelKind::AntiJC, "AntiJC"},
    {ModelKind::NonlinearJC, "NonlinearJC"},
    {ModelKind::NonlinearAntiJC, "NonlinearAntiJC"},
    {ModelKind::QRM, "QRM"},
    {ModelKind::NonlinearQRM, "NonlinearQRM"},
    {ModelKind::TwoTone, "TwoTone"},
}};

void require_positive_g(double g)
{
    if (!(g > 0.0) || !std::isfinite(g))
        throw std::invalid_argument("coupling g must be finite and > 0, got " + std::to_string(g));
}

void require_non_negative_g(double g)
{
    if (!(g >= 0.0) || !std::isfinite(g))
        throw std::invalid_argument("coupling g must be finite and >= 0, got " + std::to_string(g));
}

Matrix boson_annihilation(int n_max)
{
    Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Matrix boson_f1(int n_max, double eta)
{
    const NonlinearCoupling f1(eta, n_max);
    Matrix d = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        d(n, n) = f1(n);
    return d;
}

// sigma+ (x) (i g A) + H.c.: the (up, down) block is i g A and the
// (down, up) block its adjoint.
Matrix sideband_coupling(const HilbertSpace& space, const Matrix& a_op, double g)
{
    const int nb = space.dim_boson();
    Matrix h = Matrix::Zero(space.dim(), space.dim());
    const Matrix lower = cplx(0.0, g) * a_op;
    h.block(nb, 0, nb, nb) = lower;
    h.block(0, nb, nb, nb) = lower.adjoint();
    return h;
}

Matrix free_rabi_part(const HilbertSpace& space, double omega_R, double omega0_R)
{
    const int nb = space.dim_boson();
    Matrix h = Matrix::Zero(space.dim(), space.dim());
    for (int n = 0; n < nb; ++n) {
        h(n, n) = -0.5 * omega0_R + omega_R * n;
        h(nb + n, nb + n) = 0.5 * omega0_R + omega_R * n;
    }
    return h;
}

} // namespace

std::string_view to_string(ModelKind kind)
{
    for (const auto& [k, name] : kKindNames)
        if (k == kind)
            return name;
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name)
{
    for (const auto& [k, n] : kKindNames)
        if (n == name)
            return k;
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

bool is_nonlinear(ModelKind kind)
{
    return kind == ModelKind::NonlinearJC || kind == ModelKind::NonlinearAntiJC ||
           kind == ModelKind::NonlinearQRM || kind == ModelKind::TwoTone;
}

double coupling_strength(const ModelSpec& spec)
{
    if (spec.kind == ModelKind::TwoTone)
        return 0.5 * spec.eta * spec.Omega;
    return spec.g;
}

std::vector<std::string> validate(const ModelSpec& spec)
{
    std::vector<std::string> warnings;
    const auto finite = {spec.eta,     spec.g,  spec.omega_R, spec.omega0_R, spec.Omega,
                         spec.nu,      spec.delta_r, spec.delta_b, spec.phi_r, spec.phi_b};
    for (double v : finite)
        if (!std::isfinite(v))
            throw std::invalid_argument("model parameters must be finite");
    if (spec.eta < 0.0)
        throw std::invalid_argument("eta must be >= 0");

    switch (spec.kind) {
    case ModelKind::JC:
    case ModelKind::AntiJC:
    case ModelKind::NonlinearJC:
    case ModelKind::NonlinearAntiJC:
        require_positive_g(spec.g);
        break;
    case ModelKind::QRM:
    case ModelKind::NonlinearQRM:
        require_non_negative_g(spec.g);
        break;
    case ModelKind::TwoTone: {
        if (!(spec.nu > 0.0))
            throw std::invalid_argument("TwoTone needs a trap frequency nu > 0");
        if (spec.Omega < 0.0)
            throw std::invalid_argument("TwoTone needs Omega >= 0");
        if (spec.g != 0.0) {
            const double expected = 0.5 * spec.eta * spec.Omega;
            if (std::abs(spec.g - expected) > 1e-9 * std::abs(expected))
                throw std::invalid_argument("g = " + std::to_string(spec.g) +
                                            " is inconsistent with eta Omega / 2 = " +
                                            std::to_string(expected));
        }
        if (std::abs(spec.delta_r) > 0.1 * spec.nu || std::abs(spec.delta_b) > 0.1 * spec.nu)
            warnings.emplace_back("sideband detuning exceeds 0.1 nu; vibrational RWA is doubtful");
        if (spec.Omega > 0.2 * spec.nu)
            warnings.emplace_back("Omega / nu > 0.2; vibrational RWA is doubtful");
        break;
    }
    }
    return warnings;
}

OperatorMatrix build_jc(const HilbertSpace& space, double g)
{
    require_positive_g(g);
    return OperatorMatrix(space, sideband_coupling(space, boson_annihilation(space.n_max()), g), true);
}

OperatorMatrix build_anti_jc(const HilbertSpace& space, double g)
{
    require_positive_g(g);
    const Matrix adag = boson_annihilation(space.n_max()).adjoint();
    return OperatorMatrix(space, sideband_coupling(space, adag, g), true);
}

OperatorMatrix build_nonlinear_jc(const HilbertSpace& space, double g, double eta)
{
    require_positive_g(g);
    const Matrix a = boson_annihilation(space.n_max());
    const Matrix f1 = boson_f1(space.n_max(), eta);
    return OperatorMatrix(space, sideband_coupling(space, f1 * a, g), true);
}

OperatorMatrix build_nonlinear_anti_jc(const HilbertSpace& space, double g, double eta)
{
    require_positive_g(g);
    const Matrix a = boson_annihilation(space.n_max());
    const Matrix f1 = boson_f1(space.n_max(), eta);
    return OperatorMatrix(space, sideband_coupling(space, a.adjoint() * f1, g), true);
}

OperatorMatrix build_qrm(const HilbertSpace& space, double g, double omega_R, double omega0_R)
{
    require_non_negative_g(g);
    const Matrix a = boson_annihilation(space.n_max());
    const Matrix x = a + a.adjoint();
    return OperatorMatrix(space, free_rabi_part(space, omega_R, omega0_R) + sideband_coupling(space, x, g),
                          true);
}

OperatorMatrix build_nonlinear_qrm(const HilbertSpace& space, double g, double eta, double omega_R,
                                   double omega0_R)
{
    require_non_negative_g(g);
    const Matrix a = boson_annihilation(space.n_max());
    const Matrix f1 = boson_f1(space.n_max(), eta);
    const Matrix x = f1 * a + a.adjoint() * f1;
    return OperatorMatrix(space, free_rabi_part(space, omega_R, omega0_R) + sideband_coupling(space, x, g),
                          true);
}

OperatorMatrix build_hamiltonian(const ModelSpec& spec, const HilbertSpace& space)
{
    validate(spec);
    switch (spec.kind) {
    case ModelKind::JC:
        return build_jc(space, spec.g);
    case ModelKind::AntiJC:
        return build_anti_jc(space, spec.g);
    case ModelKind::NonlinearJC:
        return build_nonlinear_jc(space, spec.g, spec.eta);
    case ModelKind::NonlinearAntiJC:
        return build_nonlinear_anti_jc(space, spec.g, spec.eta);
    case ModelKind::QRM:
        return build_qrm(space, spec.g, spec.omega_R, spec.omega0_R);
    case ModelKind::NonlinearQRM:
        return build_nonlinear_qrm(space, spec.g, spec.eta, spec.omega_R, spec.omega0_R);
    case ModelKind::TwoTone:
        break;
    }
    throw std::invalid_argument("TwoTone is time dependent; use TwoToneHamiltonian");
}

SimulatedFrequencies simulated_frequencies(double delta_r, double delta_b)
{
    return {-0.5 * (delta_r + delta_b), 0.5 * (delta_r - delta_b)};
}

ModelSpec two_tone_for(double g, double eta, double omega_R, double omega0_R, double nu)
{
    if (!(eta > 0.0))
        throw std::invalid_argument("a two-tone drive needs eta > 0");
    ModelSpec spec;
    spec.kind = ModelKind::TwoTone;
    spec.eta = eta;
    spec.Omega = 2.0 * g / eta;
    spec.g = 0.5 * eta * spec.Omega;
    spec.nu = nu;
    spec.delta_r = omega_R - omega0_R;
    spec.delta_b = -omega_R - omega0_R;
    spec.omega_R = omega_R;
    spec.omega0_R = omega0_R;
    return spec;
}

// --- two-tone drive ---------------------------------------------------------

TwoToneHamiltonian::TwoToneHamiltonian(const ModelSpec& spec, const HilbertSpace& space)
    : spec_(spec), space_(space)
{
    if (spec.kind != ModelKind::TwoTone)
        throw std::invalid_argument("TwoToneHamiltonian needs a TwoTone spec");
    validate(spec);
    d0_ = displacement_boson(space.n_max(), cplx(0.0, spec.eta));
}

cplx TwoToneHamiltonian::drive_factor(double t) const
{
    const cplx red = std::exp(cplx(0.0, -((spec_.delta_r - spec_.nu) * t - spec_.phi_r)));
    const cplx blue = std::exp(cplx(0.0, -((spec_.delta_b + spec_.nu) * t - spec_.phi_b)));
    return 0.5 * spec_.Omega * (red + blue);
}

Matrix TwoToneHamiltonian::matrix(double t) const
{
    const int nb = space_.dim_boson();
    const cplx c = drive_factor(t);
    Vector rot(nb);
    for (int n = 0; n < nb; ++n)
        rot(n) = std::exp(cplx(0.0, spec_.nu * t * n));
    const Matrix lower = c * (rot.asDiagonal() * d0_ * rot.conjugate().asDiagonal());

    Matrix h = Matrix::Zero(space_.dim(), space_.dim());
    h.block(nb, 0, nb, nb) = lower;
    h.block(0, nb, nb, nb) = lower.adjoint();
    return h;
}

OperatorMatrix TwoToneHamiltonian::operator()(double t) const
{
    return OperatorMatrix(space_, matrix(t), true);
}

void TwoToneHamiltonian::apply_generator(double t, const Vector& psi, Vector& out) const
{
    const int nb = space_.dim_boson();
    const cplx c = drive_factor(t);
    Vector rot(nb);
    for (int n = 0; n < nb; ++n)
        rot(n) = std::exp(cplx(0.0, spec_.nu * t * n));

    out.resize(space_.dim());
    const Vector down = rot.conjugate().cwiseProduct(psi.head(nb));
    const Vector up = rot.conjugate().cwiseProduct(psi.tail(nb));
    out.tail(nb) = cplx(0.0, -1.0) * c * rot.cwiseProduct(d0_ * down);
    out.head(nb) = cplx(0.0, -1.0) * std::conj(c) * rot.cwiseProduct(d0_.adjoint() * up);
}

OperatorMatrix build_two_tone(const ModelSpec& spec, const HilbertSpace& space, double t)
{
    if (t < 0.0)
        throw std::invalid_argument("time must be >= 0");
    return TwoToneHamiltonian(spec, space)(t);
}

OperatorMatrix parity_operator(const HilbertSpace& space)
{
    const int nb = space.dim_boson();
    Matrix p = Matrix::Zero(space.dim(), space.dim());
    for (int n = 0; n < nb; ++n) {
        const double boson = (n % 2 == 0) ? 1.0 : -1.0;
        p(n, n) = -boson;
        p(nb + n, nb + n) = boson;
    }
    return OperatorMatrix(space, std::move(p), true);
}

int default_truncation(int n_barrier, double alpha_abs, double g_over_omega)
{
    const double reach = alpha_abs + 2.0 * g_over_omega;
    const int displaced = static_cast<int>(std::ceil(reach * reach)) + 20;
    return std::max({2 * n_barrier, displaced, 40});
}

} // namespace ionrabi
