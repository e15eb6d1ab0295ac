#include "ionrabi/trajectory_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ionrabi/errors.hpp"

namespace ionrabi {

namespace {

bool wants(const std::vector<std::string>& observables, const char* name)
{
    return std::find(observables.begin(), observables.end(), name) != observables.end();
}

std::ofstream open_output(const std::filesystem::path& file)
{
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw Error("cannot write " + file.string());
    return out;
}

} // namespace

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", value);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::vector<std::string>& observables)
{
    const bool sz = wants(observables, "sigma_z");
    const bool fid = wants(observables, "fidelity");
    const bool nm = wants(observables, "n_mean");
    const bool ph = wants(observables, "phonons");
    const int n_max = trajectory.space.n_max();

    out << "t";
    if (sz) out << ",sigma_z";
    if (fid) out << ",fidelity";
    if (nm) out << ",n_mean";
    if (ph)
        for (int n = 0; n <= n_max; ++n)
            out << ",P_" << n;
    out << '\n';

    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        const auto& rec = trajectory.records[k];
        out << format_double(trajectory.times[k] / trajectory.time_unit);
        if (sz) out << ',' << format_double(rec.sigma_z);
        if (fid) out << ',' << format_double(rec.fidelity);
        if (nm) out << ',' << format_double(rec.n_mean);
        if (ph)
            for (double p : rec.phonons)
                out << ',' << format_double(p);
        out << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& trajectory,
                          const std::vector<std::string>& observables)
{
    auto out = open_output(file);
    write_trajectory_csv(out, trajectory, observables);
}

void write_landscape_csv(const std::filesystem::path& file, const Landscape& landscape)
{
    auto out = open_output(file);
    out << "n,eta,log10_abs_f1\n";
    for (std::size_t i = 0; i < landscape.n.size(); ++i)
        for (std::size_t k = 0; k < landscape.eta.size(); ++k)
            out << landscape.n[i] << ',' << format_double(landscape.eta[k]) << ','
                << format_double(landscape.log10_abs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)))
                << '\n';
}

void write_f1_table_csv(std::ostream& out, double eta, int n_max)
{
    const NonlinearCoupling f1(eta, n_max);
    out << "n,f1\n";
    for (int n = 0; n <= n_max; ++n)
        out << n << ',' << format_double(f1(n)) << '\n';
}

bool CsvTable::has_column(const std::string& name) const
{
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> CsvTable::column(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw std::invalid_argument("missing column '" + name + "'");
    const auto j = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows)
        out.push_back(row.at(j));
    return out;
}

CsvTable read_csv(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw Error("cannot read " + file.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument(file.string() + " is empty");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            table.columns.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        if (row.size() != table.columns.size())
            throw std::invalid_argument(file.string() + ": ragged row");
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_text_file(const std::filesystem::path& file, const std::string& text)
{
    auto out = open_output(file);
    out << text;
}

} // namespace ionrabi
