#include "ionrabi/plotdata.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "ionrabi/trajectory_io.hpp"

namespace ionrabi {

PlotKind plot_kind_from_string(std::string_view name)
{
    if (name == "timeseries") return PlotKind::timeseries;
    if (name == "heatmap") return PlotKind::heatmap;
    if (name == "bars") return PlotKind::bars;
    throw std::invalid_argument("unknown plot kind '" + std::string(name) + "'");
}

namespace {

std::string quoted(const std::string& s)
{
    return "'" + s + "'";
}

std::string header(const std::filesystem::path& svg, const std::string& title)
{
    std::ostringstream gp;
    gp << "set terminal svg size 800,500\n"
       << "set output " << quoted(svg.filename().string()) << "\n";
    if (!title.empty())
        gp << "set title " << quoted(title) << "\n";
    return gp.str();
}

} // namespace

PlotFiles emit_plotdata(const std::filesystem::path& csv, const PlotRequest& request,
                        const std::filesystem::path& out_dir)
{
    const CsvTable table = read_csv(csv);
    const std::string stem = csv.stem().string();
    std::string suffix;
    std::ostringstream dat;
    std::ostringstream gp;

    switch (request.kind) {
    case PlotKind::timeseries: {
        suffix = "_timeseries";
        const std::vector<std::string> ys = request.columns.empty() ? std::vector<std::string>{"sigma_z"}
                                                                    : request.columns;
        const auto t = table.column("t");
        std::vector<std::vector<double>> cols;
        for (const auto& y : ys)
            cols.push_back(table.column(y));
        dat << "# t";
        for (const auto& y : ys)
            dat << ' ' << y;
        dat << '\n';
        for (std::size_t k = 0; k < t.size(); ++k) {
            dat << format_double(t[k]);
            for (const auto& c : cols)
                dat << ' ' << format_double(c[k]);
            dat << '\n';
        }
        gp << header(out_dir / (stem + suffix + ".svg"), request.title)
           << "set xlabel 't [2{/Symbol p}/g]'\n"
           << "plot ";
        for (std::size_t j = 0; j < ys.size(); ++j)
            gp << (j ? ", " : "") << quoted(stem + suffix + ".dat") << " using 1:" << j + 2
               << " with lines title " << quoted(ys[j]);
        gp << '\n';
        break;
    }
    case PlotKind::heatmap: {
        suffix = "_heatmap";
        const std::string value = request.columns.empty() ? "log10_abs_f1" : request.columns.front();
        const auto n = table.column("n");
        const auto eta = table.column("eta");
        const auto v = table.column(value);
        dat << "# n eta " << value << '\n';
        for (std::size_t k = 0; k < n.size(); ++k) {
            if (k > 0 && n[k] != n[k - 1])
                dat << '\n';
            dat << format_double(n[k]) << ' ' << format_double(eta[k]) << ' ' << format_double(v[k]) << '\n';
        }
        gp << header(out_dir / (stem + suffix + ".svg"), request.title)
           << "set view map\nset xlabel 'n'\nset ylabel '{/Symbol h}'\n"
           << "splot " << quoted(stem + suffix + ".dat") << " using 1:2:3 with pm3d notitle\n";
        break;
    }
    case PlotKind::bars: {
        suffix = "_bars";
        std::map<int, std::size_t> phonon_cols;
        for (std::size_t j = 0; j < table.columns.size(); ++j)
            if (table.columns[j].rfind("P_", 0) == 0)
                phonon_cols[std::stoi(table.columns[j].substr(2))] = j;
        if (phonon_cols.empty())
            throw std::invalid_argument(csv.string() + ": missing column 'P_0'");
        if (table.rows.empty())
            throw std::invalid_argument(csv.string() + " has no rows");
        const auto& last = table.rows.back();
        dat << "# n P_n\n";
        for (const auto& [nn, j] : phonon_cols)
            dat << nn << ' ' << format_double(last[j]) << '\n';
        gp << header(out_dir / (stem + suffix + ".svg"), request.title)
           << "set style fill solid 0.6\nset boxwidth 0.8\nset xlabel 'n'\nset ylabel 'P_n'\n"
           << "plot " << quoted(stem + suffix + ".dat") << " using 1:2 with boxes notitle\n";
        break;
    }
    }

    PlotFiles files{out_dir / (stem + suffix + ".dat"), out_dir / (stem + suffix + ".gp")};
    write_text_file(files.data, dat.str());
    write_text_file(files.script, gp.str());
    return files;
}

} // namespace ionrabi
