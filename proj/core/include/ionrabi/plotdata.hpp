#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ionrabi {

enum class PlotKind { timeseries, heatmap, bars };

PlotKind plot_kind_from_string(std::string_view name);

struct PlotRequest
{
    PlotKind kind = PlotKind::timeseries;
    /// timeseries: y columns against t (default sigma_z).
    /// heatmap: value column of a long-format n,eta,value CSV (default log10_abs_f1).
    /// bars: ignored; uses the P_n columns of the last row.
    std::vector<std::string> columns;
    std::string title;
};

struct PlotFiles
{
    std::filesystem::path data;
    std::filesystem::path script;  ///< gnuplot script rendering <stem>.svg
};

/// Gnuplot-ready whitespace-separated data plus a script next to it.
/// Missing columns raise std::invalid_argument.
PlotFiles emit_plotdata(const std::filesystem::path& csv, const PlotRequest& request,
                        const std::filesystem::path& out_dir);

} // namespace ionrabi
