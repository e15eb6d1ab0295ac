#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionrabi/dynamics.hpp"
#include "ionrabi/models.hpp"

namespace ionrabi {

inline constexpr int kSchemaVersion = 1;

/// Frequencies in scenario files are in units of 2 pi x kHz.
inline constexpr double kFrequencyUnit = 2.0 * std::numbers::pi * 1.0e3;

/// Model block as written in a scenario file (frequencies in 2 pi kHz).
struct ModelConfig
{
    ModelKind kind = ModelKind::JC;
    double eta = 0.0;
    /// When set, eta is refined to the nearby zero of f1(eta_barrier, .)
    /// before use; the written eta must lie within 5e-4 of it.
    std::optional<int> eta_barrier;
    double g = 0.0;
    double omega_R = 0.0;
    double omega0_R = 0.0;
    double Omega = 0.0;
    double nu = 0.0;
    double delta_r = 0.0;
    double delta_b = 0.0;
    double phi_r = 0.0;
    double phi_b = 0.0;

    bool operator==(const ModelConfig&) const = default;
};

enum class InitialKind { fock, coherent, thermal };

struct InitialConfig
{
    InitialKind kind = InitialKind::fock;
    int n = 0;
    cplx alpha{};
    double nbar = 0.0;
    Qubit qubit = Qubit::down;

    bool operator==(const InitialConfig&) const = default;
};

struct TimeConfig
{
    /// In units of 2 pi / g.
    double t_end = 1.0;
    int n_points = 101;

    bool operator==(const TimeConfig&) const = default;
};

inline const std::vector<std::string> kAllObservables{"sigma_z", "fidelity", "n_mean", "phonons"};

struct OutputConfig
{
    std::vector<std::string> observables = kAllObservables;
    /// In units of 2 pi / g.
    std::vector<double> snapshot_times;

    bool operator==(const OutputConfig&) const = default;
};

struct Scenario
{
    int schema_version = kSchemaVersion;
    std::string name;
    ModelConfig model;
    InitialConfig initial;
    /// Qubit decay rate Gamma_m / g; absent for closed evolution.
    std::optional<double> gamma_ratio;
    TimeConfig times;
    OutputConfig outputs;
    std::optional<int> truncation;

    bool operator==(const Scenario&) const = default;
};

/// YAML scenario file. Unknown keys, missing required keys, bad values and
/// schema version mismatches raise SchemaError with the offending line.
Scenario parse_scenario(const std::filesystem::path& file);
Scenario parse_scenario_text(std::string_view text);

/// Inverse of parse_scenario_text; doubles are written with 17 significant
/// digits so parse(emit(s)) == s.
std::string emit_scenario(const Scenario& scenario);

/// Physical model in rad/s, with eta refined to the requested barrier.
ModelSpec physical_model(const Scenario& scenario);

/// Effective coupling g in rad/s.
double scenario_coupling(const Scenario& scenario);

/// Explicit truncation, or the default for the model and initial state.
int scenario_truncation(const Scenario& scenario);

QuantumState initial_state(const Scenario& scenario, const HilbertSpace& space);

/// Assign a dotted key such as "model.eta" or "initial.nbar".
void set_scenario_value(Scenario& scenario, std::string_view key, double value);

} // namespace ionrabi
