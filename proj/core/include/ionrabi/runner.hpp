#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionrabi/dynamics.hpp"
#include "ionrabi/scenario.hpp"

namespace ionrabi {

/// One scenario evolved on its output grid plus its snapshot times.
struct Simulation
{
    ModelSpec spec;
    int n_max = 0;
    /// 2 pi / g in seconds.
    double time_unit = 1.0;
    Trajectory trajectory;
    /// Snapshot times in units of 2 pi / g and the records there.
    std::vector<double> snapshot_times;
    std::vector<ObservableRecord> snapshots;
    std::vector<std::string> warnings;
};

/// Picks the integrator: Lindblad RK4 when dissipation is present, RK4 on
/// the Schrodinger equation for TwoTone, eigendecomposition otherwise.
Simulation simulate(const Scenario& scenario, std::optional<int> n_max = {});

/// Largest absolute difference of sigma_z, fidelity, n_mean and P_n
/// (n up to the smaller truncation) between two runs on the same grid.
double max_observable_difference(const Trajectory& a, const Trajectory& b);

struct ConvergenceVerdict
{
    bool checked = false;
    bool converged = false;
    int n_max = 0;
    int n_max_check = 0;
    double max_difference = 0.0;
    double tolerance = 0.0;
};

ConvergenceVerdict check_convergence(const Scenario& scenario, const Simulation& base,
                                     double tolerance = 1e-6, int extra = 20);

struct RunOptions
{
    std::filesystem::path out_dir = ".";
    int threads = 1;
    bool convergence_check = true;
    double tolerance = 1e-6;
};

struct RunResult
{
    std::string name;
    std::filesystem::path directory;
    std::filesystem::path trajectory_csv;
    std::filesystem::path snapshots_csv;  ///< empty without snapshot times
    std::filesystem::path metadata_json;
    double wall_time = 0.0;  ///< seconds
    ConvergenceVerdict convergence;
};

/// Writes <out_dir>/<name>/{trajectory.csv, snapshots.csv, metadata.json}.
/// With threads > 1 the convergence run proceeds concurrently; the output
/// files do not depend on threads.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

/// "key=lo:hi:count" (inclusive linear grid) or "key=v1,v2,...".
struct SweepAxis
{
    std::string key;
    std::vector<double> values;
};

SweepAxis parse_axis(std::string_view text);

struct SweepFailure
{
    std::size_t index = 0;
    std::vector<double> point;
    std::string message;
};

struct SweepResult
{
    std::vector<std::vector<double>> points;
    std::vector<std::optional<RunResult>> results;
    std::vector<SweepFailure> failures;
    std::filesystem::path index_csv;
    std::filesystem::path failure_manifest;  ///< empty when nothing failed
};

/// Cartesian product of the axes. Point k is named <template name>_<k> and
/// written under out_dir; index.csv maps points to result paths and
/// failures.json lists points that threw.
SweepResult sweep(const Scenario& scenario_template, const std::vector<SweepAxis>& axes,
                  const RunOptions& options = {});

std::string version_string();

} // namespace ionrabi
