#pragma once

#include <string>
#include <vector>

namespace smica::cli {

/// One plotted series: a named convergence trace with per-checkpoint spread.
struct PlotSeries {
    std::string label;
    std::vector<double> t;       // sample counts (> 0)
    std::vector<double> mean;    // mean eps_MSE per checkpoint (> 0 for log scale)
    std::vector<double> stddev;  // error-bar half-height, may be zero
};

/// Log-log line chart of eps_MSE vs t with error bars, one polyline per series.
void write_convergence_svg(const std::string& path, const std::string& title,
                           const std::vector<PlotSeries>& series);

}  // namespace smica::cli
