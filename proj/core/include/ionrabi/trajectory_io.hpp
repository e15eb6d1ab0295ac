#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ionrabi/dynamics.hpp"
#include "ionrabi/protocols.hpp"

namespace ionrabi {

/// "%.16e": 17 significant digits, byte-stable across runs.
std::string format_double(double value);

/// Columns: t (in units of time_unit), then sigma_z, fidelity, n_mean and
/// P_0..P_nmax in that order, restricted to `observables`.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::vector<std::string>& observables);
void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& trajectory,
                          const std::vector<std::string>& observables);

/// Long format: n,eta,log10_abs_f1, rows grouped by n.
void write_landscape_csv(const std::filesystem::path& file, const Landscape& landscape);

/// n,f1 for n = 0..n_max.
void write_f1_table_csv(std::ostream& out, double eta, int n_max);

/// Numeric CSV with a header row.
struct CsvTable
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    bool has_column(const std::string& name) const;
    /// Throws std::invalid_argument when the column is missing.
    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& file);

/// Write `text` to `file`, creating parent directories.
void write_text_file(const std::filesystem::path& file, const std::string& text);

} // namespace ionrabi
