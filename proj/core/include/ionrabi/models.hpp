#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "ionrabi/fock_algebra.hpp"

namespace ionrabi {

enum class ModelKind { JC, AntiJC, NonlinearJC, NonlinearAntiJC, QRM, NonlinearQRM, TwoTone };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

bool is_nonlinear(ModelKind kind);

/// All frequencies are angular (rad per unit time); phases in radians.
/// Fields a kind does not use are ignored by its builder.
struct ModelSpec
{
    ModelKind kind = ModelKind::JC;
    double eta = 0.0;
    double g = 0.0;
    double omega_R = 0.0;
    double omega0_R = 0.0;
    // TwoTone only
    double Omega = 0.0;
    double nu = 0.0;
    double delta_r = 0.0;
    double delta_b = 0.0;
    double phi_r = 0.0;
    double phi_b = 0.0;

    bool operator==(const ModelSpec&) const = default;
};

/// Trap frequency used when a two-tone cross-check has none: 2 pi x 5 MHz.
inline constexpr double kDefaultTrapFrequency = 2.0 * std::numbers::pi * 5.0e6;

/// Throws std::invalid_argument for hard violations (g <= 0, eta < 0,
/// g != eta Omega / 2 for TwoTone). Returns soft validity warnings for the
/// sideband hierarchy |delta| << nu, Omega << nu.
std::vector<std::string> validate(const ModelSpec& spec);

/// Effective coupling; for TwoTone g = eta Omega / 2.
double coupling_strength(const ModelSpec& spec);

OperatorMatrix build_jc(const HilbertSpace& space, double g);
OperatorMatrix build_anti_jc(const HilbertSpace& space, double g);
OperatorMatrix build_nonlinear_jc(const HilbertSpace& space, double g, double eta);
OperatorMatrix build_nonlinear_anti_jc(const HilbertSpace& space, double g, double eta);
OperatorMatrix build_qrm(const HilbertSpace& space, double g, double omega_R, double omega0_R);
OperatorMatrix build_nonlinear_qrm(const HilbertSpace& space, double g, double eta, double omega_R,
                                   double omega0_R);

/// Time-independent Hamiltonian of any kind except TwoTone.
OperatorMatrix build_hamiltonian(const ModelSpec& spec, const HilbertSpace& space);

struct SimulatedFrequencies
{
    double omega0_R;
    double omega_R;
};

/// omega0_R = -(delta_r + delta_b) / 2,  omega_R = (delta_r - delta_b) / 2.
SimulatedFrequencies simulated_frequencies(double delta_r, double delta_b);

/// TwoTone spec that realizes the nonlinear Rabi model (g, eta, omega_R,
/// omega0_R): Omega = 2g/eta, delta_r = omega_R - omega0_R,
/// delta_b = -omega_R - omega0_R.
ModelSpec two_tone_for(double g, double eta, double omega_R, double omega0_R,
                       double nu = kDefaultTrapFrequency);

/// Red and blue sideband drive before the vibrational RWA, in the frame of
/// the bare qubit and trap:
///
///   H(t) = (Omega/2) sigma+ D(i eta e^{i nu t})
///          [e^{-i((delta_r - nu) t - phi_r)} + e^{-i((delta_b + nu) t - phi_b)}] + H.c.
///
/// delta_r and delta_b are the detunings from the red (omega_0 - nu) and
/// blue (omega_0 + nu) sideband resonances. D(i eta) is computed once;
/// D(i eta e^{i theta}) = e^{i theta n} D(i eta) e^{-i theta n}.
class TwoToneHamiltonian
{
public:
    TwoToneHamiltonian(const ModelSpec& spec, const HilbertSpace& space);

    const HilbertSpace& space() const noexcept { return space_; }
    const ModelSpec& spec() const noexcept { return spec_; }

    Matrix matrix(double t) const;
    OperatorMatrix operator()(double t) const;

    /// dpsi/dt = -i H(t) psi without materializing H(t).
    void apply_generator(double t, const Vector& psi, Vector& out) const;

private:
    cplx drive_factor(double t) const;

    ModelSpec spec_;
    HilbertSpace space_;
    Matrix d0_;
};

OperatorMatrix build_two_tone(const ModelSpec& spec, const HilbertSpace& space, double t);

/// P = sigma_z (-1)^n.
OperatorMatrix parity_operator(const HilbertSpace& space);

/// max(2 n_barrier, ceil((|alpha| + 2 g/omega_R)^2) + 20, 40). Pass
/// n_barrier = 0 and g_over_omega = 0 where they do not apply.
int default_truncation(int n_barrier, double alpha_abs, double g_over_omega);

} // namespace ionrabi
